//! Radial refractive index profiles `n(r)` on `[0, 1]`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Result, TevpError};
use crate::expr::Expr;
use crate::interp::Pchip;
use crate::jet::Jet;

/// Built-in profiles used throughout the test-suite and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedIndex {
    /// `16 / ((r+1)(3-r))^2`, constant transformed potential `1/4`.
    Ex1,
    /// `1 / (1 + (1-r)^2)^2`, constant transformed potential `-1`.
    Ex2a,
    /// `(pi/4)^2`, zero transformed potential.
    Ex2b,
    /// `(1 + a(r-1))^2` with `a = 2 - pi/2`, so that the travel time is `pi/4`.
    Ex2c,
    /// `1.2 + (1-r) sin(2 pi r)`.
    Ex3,
    /// `(r + 1/2)^2`, travel time exactly one.
    Ex4,
}

impl NamedIndex {
    pub const ALL: [NamedIndex; 6] = [
        NamedIndex::Ex1,
        NamedIndex::Ex2a,
        NamedIndex::Ex2b,
        NamedIndex::Ex2c,
        NamedIndex::Ex3,
        NamedIndex::Ex4,
    ];

    pub fn id(self) -> &'static str {
        match self {
            NamedIndex::Ex1 => "ex1",
            NamedIndex::Ex2a => "ex2a",
            NamedIndex::Ex2b => "ex2b",
            NamedIndex::Ex2c => "ex2c",
            NamedIndex::Ex3 => "ex3",
            NamedIndex::Ex4 => "ex4",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            NamedIndex::Ex1 => "16/((r+1)(3-r))^2",
            NamedIndex::Ex2a => "1/(1+(1-r)^2)^2",
            NamedIndex::Ex2b => "(pi/4)^2",
            NamedIndex::Ex2c => "(1+(2-pi/2)(r-1))^2",
            NamedIndex::Ex3 => "1.2+(1-r)sin(2 pi r)",
            NamedIndex::Ex4 => "(r+0.5)^2",
        }
    }

    fn eval(self, r: Jet) -> Jet {
        use std::f64::consts::PI;
        match self {
            NamedIndex::Ex1 => {
                let u = (r + 1.0) * (3.0 - r);
                16.0 / (u * u)
            }
            NamedIndex::Ex2a => {
                let s = 1.0 - r;
                let w = s * s + 1.0;
                1.0 / (w * w)
            }
            NamedIndex::Ex2b => Jet::constant((PI / 4.0) * (PI / 4.0)),
            NamedIndex::Ex2c => {
                let w = (r - 1.0) * (2.0 - PI / 2.0) + 1.0;
                w * w
            }
            NamedIndex::Ex3 => (1.0 - r) * (r * (2.0 * PI)).sin() + 1.2,
            NamedIndex::Ex4 => {
                let w = r + 0.5;
                w * w
            }
        }
    }

    /// Exact travel time `∫_0^1 sqrt(n)` where it is known in closed form.
    pub fn exact_delta(self) -> Option<f64> {
        use std::f64::consts::PI;
        match self {
            NamedIndex::Ex1 => Some(3f64.ln()),
            NamedIndex::Ex2a | NamedIndex::Ex2b | NamedIndex::Ex2c => Some(PI / 4.0),
            NamedIndex::Ex3 => None,
            NamedIndex::Ex4 => Some(1.0),
        }
    }
}

impl FromStr for NamedIndex {
    type Err = TevpError;

    fn from_str(s: &str) -> Result<Self> {
        NamedIndex::ALL
            .iter()
            .copied()
            .find(|n| n.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| TevpError::InvalidInput(format!("unknown example id '{s}'")))
    }
}

impl fmt::Display for NamedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone)]
enum Profile {
    Named(NamedIndex),
    Expression(Expr),
    Table(Pchip),
}

/// Which flavour of profile a model wraps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexKind {
    NamedExample,
    Expression,
    SampledTable,
}

/// A refractive index `n(r)` with its first two derivatives on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct RefractiveIndexModel {
    profile: Profile,
    n_at_1: f64,
    dn_at_1: f64,
}

/// Number of points on which positivity is checked.
const POSITIVITY_SAMPLES: usize = 4097;

impl RefractiveIndexModel {
    pub fn named(id: NamedIndex) -> Self {
        Self::build(Profile::Named(id)).expect("built-in profiles are positive")
    }

    pub fn from_expression(src: &str) -> Result<Self> {
        Self::build(Profile::Expression(Expr::parse(src)?))
    }

    /// Monotone-cubic interpolant through samples `(r_i, n_i)` covering `[0, 1]`.
    pub fn from_samples(r: Vec<f64>, n: Vec<f64>) -> Result<Self> {
        if r.first().map_or(true, |&v| v > 1e-12) || r.last().map_or(true, |&v| v < 1.0 - 1e-12) {
            return Err(TevpError::InvalidInput("sampled index must cover [0, 1]".into()));
        }
        Self::build(Profile::Table(Pchip::new(r, n)?))
    }

    /// Two-column CSV `r,n` (header optional, `#` comments allowed).
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let (r, n) = parse_two_columns(&text)?;
        Self::from_samples(r, n)
    }

    fn build(profile: Profile) -> Result<Self> {
        let mut m = RefractiveIndexModel {
            profile,
            n_at_1: 0.0,
            dn_at_1: 0.0,
        };
        let end = m.jet(1.0);
        m.n_at_1 = end.v;
        m.dn_at_1 = end.d1;
        m.validate()?;
        Ok(m)
    }

    /// Checks `n > 0` (and finiteness of n, n', n'') on a dense grid.
    pub fn validate(&self) -> Result<()> {
        for i in 0..POSITIVITY_SAMPLES {
            let r = i as f64 / (POSITIVITY_SAMPLES - 1) as f64;
            let j = self.jet(r);
            if !(j.v > 0.0) || !j.v.is_finite() {
                return Err(TevpError::NonPositiveIndex { r, value: j.v });
            }
            if !j.d1.is_finite() || !j.d2.is_finite() {
                return Err(TevpError::InvalidInput(format!(
                    "derivative of n(r) is not finite at r = {r}"
                )));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> IndexKind {
        match self.profile {
            Profile::Named(_) => IndexKind::NamedExample,
            Profile::Expression(_) => IndexKind::Expression,
            Profile::Table(_) => IndexKind::SampledTable,
        }
    }

    pub fn named_id(&self) -> Option<NamedIndex> {
        match self.profile {
            Profile::Named(id) => Some(id),
            _ => None,
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match &self.profile {
            Profile::Named(id) => id.id().to_string(),
            Profile::Expression(e) => e.source().to_string(),
            Profile::Table(p) => format!("table({} knots)", p.knots().len()),
        }
    }

    /// `(n, n', n'')` at `r`.
    pub fn jet(&self, r: f64) -> Jet {
        match &self.profile {
            Profile::Named(id) => id.eval(Jet::variable(r)),
            Profile::Expression(e) => e.eval_jet(Jet::variable(r)),
            Profile::Table(p) => {
                let (v, d1, d2) = p.eval_all(r);
                Jet { v, d1, d2 }
            }
        }
    }

    pub fn n(&self, r: f64) -> f64 {
        match &self.profile {
            Profile::Named(id) => id.eval(Jet::constant(r)).v,
            Profile::Expression(e) => e.eval(r),
            Profile::Table(p) => p.eval(r),
        }
    }

    pub fn dn(&self, r: f64) -> f64 {
        self.jet(r).d1
    }

    pub fn d2n(&self, r: f64) -> f64 {
        self.jet(r).d2
    }

    pub fn n_at_1(&self) -> f64 {
        self.n_at_1
    }

    pub fn dn_at_1(&self) -> f64 {
        self.dn_at_1
    }

    /// Transformed potential `n''/(4 n^2) - 5 n'^2 / (16 n^3)` at `r`.
    pub fn potential_at(&self, r: f64) -> f64 {
        let j = self.jet(r);
        j.d2 / (4.0 * j.v * j.v) - 5.0 * j.d1 * j.d1 / (16.0 * j.v * j.v * j.v)
    }
}

/// Two numeric columns of a CSV text; a header line and `#` comments are skipped.
pub fn parse_two_columns(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 2 {
            return Err(TevpError::InvalidInput(format!(
                "line {}: expected two columns",
                lineno + 1
            )));
        }
        match (fields[0].parse::<f64>(), fields[1].parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                a.push(x);
                b.push(y);
            }
            _ if a.is_empty() => continue, // header
            _ => {
                return Err(TevpError::InvalidInput(format!(
                    "line {}: cannot parse '{line}'",
                    lineno + 1
                )))
            }
        }
    }
    Ok((a, b))
}
