//! NSBF coefficients `g_n`, `s_n`, `t_n` and the truncation indicators.
//!
//! The coefficients come from the recurrence
//!
//! ```text
//! sigma_{-1} = 1/(2x),  sigma_0 = (f - 1)/2
//! eta_n   = ∫_0^x (t f' + (n-1) f) sigma_{n-2}
//! theta_n = ∫_0^x f^{-2} (eta_n - t f sigma_{n-2})
//! sigma_n = (2n+1)/(2n-3) (x^2 sigma_{n-2} + c_n f theta_n),  c_1 = 1, c_n = 2(2n-1)
//! ```
//!
//! with `g_n = 2 (-1)^n sigma_{2n} / x^{2n}` and `s_n = 2 (-1)^n sigma_{2n+1} / x^{2n+1}`,
//! where `f'' = p f`, `f(0) = 1`, `f'(0) = 0`. These are the coefficients of
//! `phi = cos(kx) + Σ g_n j_{2n}(kx)` and `S = sin(kx)/k + (1/k) Σ s_n j_{2n+1}(kx)`.
//! The sums in the indicators carry the alternating sign back, so that
//! `Σ (-1)^n g_n = Σ (-1)^n s_n = x omega`.

use std::fmt::Write as _;

use crate::error::{Result, TevpError};
use crate::liouville::LiouvilleData;
use crate::quadrature::CumulativeRule;
use twofloat::TwoFloat;

/// Largest truncation order accepted by [`select_truncation`].
pub const MAX_TRUNCATION: usize = 64;
/// Order of the cumulative quadrature used for `eta_n` and `theta_n`.
pub const DEFAULT_QUADRATURE_ORDER: usize = 8;

const OVERFLOW: f64 = 1e300;
const VANISHING_F: f64 = 1e-12;

/// `f = phi(0, zeta)` and its derivative on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FProfile {
    pub f: Vec<f64>,
    pub df: Vec<f64>,
    exact: Option<(Vec<TwoFloat>, Vec<TwoFloat>)>,
}

impl FProfile {
    pub fn from_values(f: Vec<f64>, df: Vec<f64>) -> Self {
        FProfile { f, df, exact: None }
    }

    fn extended(&self) -> (Vec<TwoFloat>, Vec<TwoFloat>) {
        match &self.exact {
            Some(e) => e.clone(),
            None => (
                self.f.iter().map(|v| TwoFloat::from(*v)).collect(),
                self.df.iter().map(|v| TwoFloat::from(*v)).collect(),
            ),
        }
    }
}

/// Solves `f'' = p f`, `f(0) = 1`, `f'(0) = 0` with classical RK4 on the grid.
///
/// The integration runs in double-double arithmetic; the recurrence that
/// consumes `f` amplifies grid-level rounding noise.
pub fn solve_f(data: &LiouvilleData) -> Result<FProfile> {
    let h = data.step();
    let (f, df) = rk4(data.p_values(), data.p_midpoints(), h, 1);
    // Richardson check against the doubled step
    let (fc, _) = rk4(data.p_values(), data.p_values(), 2.0 * h, 2);
    let diff = fc
        .iter()
        .enumerate()
        .map(|(j, v)| f64::from(*v - f[2 * j]).abs())
        .fold(0.0, f64::max);
    if diff / 15.0 > 1e-8 {
        log::warn!(
            "f integration error estimate {:.2e}; consider a finer grid",
            diff / 15.0
        );
    }
    let lo: Vec<f64> = f.iter().map(|v| f64::from(*v)).collect();
    if let Some(i) = lo.iter().position(|v| !(*v >= VANISHING_F)) {
        // f starts at 1, so a sign change shows up as a non-positive value
        return Err(TevpError::VanishingF {
            zeta: data.zeta_grid()[i],
        });
    }
    Ok(FProfile {
        f: lo,
        df: df.iter().map(|v| f64::from(*v)).collect(),
        exact: Some((f, df)),
    })
}

/// RK4 for `(f, f')` using `p` sampled at every `stride`-th node; the stage
/// values at half steps come from `mid` (midpoint array when `stride == 1`,
/// the odd grid nodes when `stride == 2`).
fn rk4(p: &[f64], mid: &[f64], h: f64, stride: usize) -> (Vec<TwoFloat>, Vec<TwoFloat>) {
    let steps = (p.len() - 1) / stride;
    let h = TwoFloat::from(h);
    let half = h / 2.0;
    let sixth = h / 6.0;
    let mut f = Vec::with_capacity(steps + 1);
    let mut df = Vec::with_capacity(steps + 1);
    let (mut y, mut v) = (TwoFloat::from(1.0), TwoFloat::from(0.0));
    f.push(y);
    df.push(v);
    for j in 0..steps {
        let p0 = p[j * stride];
        let pm = if stride == 1 { mid[j] } else { mid[j * stride + 1] };
        let p1 = p[(j + 1) * stride];
        let k1y = v;
        let k1v = y * p0;
        let k2y = v + half * k1v;
        let k2v = (y + half * k1y) * pm;
        let k3y = v + half * k2v;
        let k3v = (y + half * k2y) * pm;
        let k4y = v + h * k3v;
        let k4v = (y + h * k3y) * p1;
        y += sixth * (k1y + k2y * 2.0 + k3y * 2.0 + k4y);
        v += sixth * (k1v + k2v * 2.0 + k3v * 2.0 + k4v);
        f.push(y);
        df.push(v);
    }
    (f, df)
}

/// NSBF coefficients on a `zeta` grid, stored as `g[n][i] = g_n(zeta_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub zeta: Vec<f64>,
    pub g: Vec<Vec<f64>>,
    pub s: Vec<Vec<f64>>,
    pub t: Option<Vec<Vec<f64>>>,
    pub f_values: Vec<f64>,
}

impl CoefficientTable {
    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.g.len()
    }

    pub fn delta(&self) -> f64 {
        *self.zeta.last().expect("non-empty grid")
    }

    pub fn last_index(&self) -> usize {
        self.zeta.len() - 1
    }

    pub fn g_at(&self, i: usize) -> Vec<f64> {
        self.g.iter().map(|c| c[i]).collect()
    }

    pub fn s_at(&self, i: usize) -> Vec<f64> {
        self.s.iter().map(|c| c[i]).collect()
    }

    pub fn t_at(&self, i: usize) -> Option<Vec<f64>> {
        self.t.as_ref().map(|t| t.iter().map(|c| c[i]).collect())
    }

    /// The table restricted to the first `n` coefficients.
    pub fn truncated(&self, n: usize) -> CoefficientTable {
        let n = n.min(self.order());
        CoefficientTable {
            zeta: self.zeta.clone(),
            g: self.g[..n].to_vec(),
            s: self.s[..n].to_vec(),
            t: self.t.as_ref().map(|t| t[..n].to_vec()),
            f_values: self.f_values.clone(),
        }
    }

    /// CSV with columns `zeta, g0..g{N-1}, s0..s{N-1}`.
    pub fn to_csv(&self) -> String {
        let n = self.order();
        let mut out = String::from("zeta");
        for j in 0..n {
            let _ = write!(out, ",g{j}");
        }
        for j in 0..n {
            let _ = write!(out, ",s{j}");
        }
        out.push('\n');
        for (i, z) in self.zeta.iter().enumerate() {
            let _ = write!(out, "{z:.17e}");
            for c in self.g.iter().chain(&self.s) {
                let _ = write!(out, ",{:.17e}", c[i]);
            }
            out.push('\n');
        }
        out
    }
}

/// Runs the recurrence up to `sigma_{2N-1}` and returns `g_n`, `s_n`, `n < N`.
pub fn compute_coefficients(data: &LiouvilleData, f: &FProfile, order: usize) -> Result<CoefficientTable> {
    compute_coefficients_with(data, f, order, DEFAULT_QUADRATURE_ORDER)
}

/// As [`compute_coefficients`] with an explicit cumulative quadrature order.
pub fn compute_coefficients_with(
    data: &LiouvilleData,
    fp: &FProfile,
    order: usize,
    quadrature_order: usize,
) -> Result<CoefficientTable> {
    if order == 0 {
        return Err(TevpError::InvalidInput("truncation order must be at least 1".into()));
    }
    let x = data.zeta_grid();
    let m = x.len();
    if fp.f.len() != m || fp.df.len() != m {
        return Err(TevpError::InvalidInput("f profile does not match the grid".into()));
    }
    if let Some(i) = fp.f.iter().position(|v| v.abs() < VANISHING_F) {
        return Err(TevpError::VanishingF { zeta: x[i] });
    }
    let (f, df) = fp.extended();
    let hd = TwoFloat::from(data.step());
    let xs: Vec<TwoFloat> = (0..m).map(|i| hd * i as f64).collect();
    let mut rule = CumulativeRule::new(quadrature_order);
    let inv_f2: Vec<TwoFloat> = f.iter().map(|v| (*v * *v).recip()).collect();
    let zero = TwoFloat::from(0.0);

    let total = 2 * order;
    let mut sigma: Vec<Vec<TwoFloat>> = Vec::with_capacity(total);
    sigma.push(f.iter().map(|v| (*v - 1.0) / 2.0).collect());
    // sigma_1 = -3/2 (x (1 - f) - f ∫(f^{-2} - 1)), exact zero when f = 1
    let excess: Vec<TwoFloat> = inv_f2.iter().map(|v| *v - 1.0).collect();
    let cum = rule.integrate_dd(&excess, hd);
    sigma.push((0..m).map(|i| (xs[i] * (-f[i] + 1.0) - f[i] * cum[i]) * -1.5).collect());

    let mut buf = vec![zero; m];
    for n in 2..total {
        let prev = &sigma[n - 2];
        let nf = n as f64;
        for i in 0..m {
            buf[i] = (xs[i] * df[i] + f[i] * (nf - 1.0)) * prev[i];
        }
        let eta = rule.integrate_dd(&buf, hd);
        for i in 0..m {
            buf[i] = inv_f2[i] * (eta[i] - xs[i] * f[i] * prev[i]);
        }
        let theta = rule.integrate_dd(&buf, hd);
        let c = 2.0 * (2.0 * nf - 1.0);
        let scale = TwoFloat::from(2.0 * nf + 1.0) / (2.0 * nf - 3.0);
        let next: Vec<TwoFloat> = (0..m)
            .map(|i| scale * (xs[i] * xs[i] * prev[i] + f[i] * theta[i] * c))
            .collect();
        if next.iter().any(|v| !(f64::from(*v).abs() <= OVERFLOW)) {
            return Err(TevpError::RecurrenceOverflow { order: n });
        }
        sigma.push(next);
    }

    let mut g = Vec::with_capacity(order);
    let mut s = Vec::with_capacity(order);
    for n in 0..order {
        let (sg, ss) = (&sigma[2 * n], &sigma[2 * n + 1]);
        let sign = alternating(n);
        let scaled = |v: &[TwoFloat], p: i32| -> Vec<f64> {
            (0..m)
                .map(|i| {
                    if i == 0 {
                        0.0
                    } else {
                        f64::from(v[i] * (2.0 * sign) / xs[i].powi(p))
                    }
                })
                .collect()
        };
        g.push(scaled(sg, 2 * n as i32));
        s.push(scaled(ss, 2 * n as i32 + 1));
    }
    Ok(CoefficientTable {
        zeta: x.to_vec(),
        g,
        s,
        t: None,
        f_values: fp.f.clone(),
    })
}

/// `t_n(zeta)` for the solution `T` with `T(k, delta) = 0`, `T'(k, delta) = 1`,
/// obtained from the `s`-coefficients of the reflected potential `p(delta - zeta)`.
pub fn compute_t_coefficients(data: &LiouvilleData, order: usize) -> Result<Vec<Vec<f64>>> {
    let reflected = data.reflected();
    let fr = solve_f(&reflected)?;
    let table = compute_coefficients(&reflected, &fr, order)?;
    Ok(table
        .s
        .into_iter()
        .map(|mut c| {
            c.reverse();
            c.iter_mut().for_each(|v| *v = -*v);
            c
        })
        .collect())
}

/// Full direct computation: `f`, `g_n`, `s_n` and `t_n`.
pub fn compute_full_table(data: &LiouvilleData, order: usize) -> Result<CoefficientTable> {
    let f = solve_f(data)?;
    let mut table = compute_coefficients(data, &f, order)?;
    table.t = Some(compute_t_coefficients(data, order)?);
    Ok(table)
}

/// Truncation-quality indicators.
#[derive(Clone, PartialEq, serde::Serialize)]
pub struct IndicatorReport {
    /// `max_zeta |Σ (-1)^n (g_n − s_n)|`.
    pub eps1: f64,
    /// `|Σ (-1)^n (g_n(delta) − s_n(delta))|`.
    pub eps1_at_delta: f64,
    /// `max_{zeta > 0} |Σ (-1)^n g_n / zeta − omega|`.
    pub eps2: f64,
    /// `max_{zeta > 0} |Σ (-1)^n s_n / zeta − omega|`.
    pub eps3: f64,
    #[serde(skip)]
    pub omega_values: Vec<f64>,
}

impl std::fmt::Debug for IndicatorReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IndicatorReport")
            .field("eps1", &self.eps1)
            .field("eps1_at_delta", &self.eps1_at_delta)
            .field("eps2", &self.eps2)
            .field("eps3", &self.eps3)
            .finish_non_exhaustive()
    }
}

/// `omega(zeta) = 1/2 ∫_0^zeta p` on the grid.
pub fn omega(data: &LiouvilleData) -> Vec<f64> {
    let mut rule = CumulativeRule::new(DEFAULT_QUADRATURE_ORDER);
    rule.integrate(data.p_values(), data.step())
        .into_iter()
        .map(|v| 0.5 * v)
        .collect()
}

pub fn indicators(table: &CoefficientTable, data: &LiouvilleData) -> IndicatorReport {
    indicators_for_order(table, &omega(data), table.order())
}

fn indicators_for_order(table: &CoefficientTable, omega: &[f64], order: usize) -> IndicatorReport {
    let m = table.zeta.len();
    let (mut eps1, mut eps2, mut eps3) = (0.0f64, 0.0f64, 0.0f64);
    let mut at_delta = 0.0;
    for i in 0..m {
        let sg: f64 = table.g[..order]
            .iter()
            .enumerate()
            .map(|(n, c)| alternating(n) * c[i])
            .sum();
        let ss: f64 = table.s[..order]
            .iter()
            .enumerate()
            .map(|(n, c)| alternating(n) * c[i])
            .sum();
        let d = (sg - ss).abs();
        eps1 = eps1.max(d);
        if i == m - 1 {
            at_delta = d;
        }
        if i > 0 {
            let z = table.zeta[i];
            eps2 = eps2.max((sg / z - omega[i]).abs());
            eps3 = eps3.max((ss / z - omega[i]).abs());
        }
    }
    IndicatorReport {
        eps1,
        eps1_at_delta: at_delta,
        eps2,
        eps3,
        omega_values: omega.to_vec(),
    }
}

/// `(-1)^n`.
pub fn alternating(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `|Σ (-1)^n (g_n(delta) − s_n(delta))|` for every prefix `N = 1..=table.order()`.
pub fn eps1_at_delta_curve(table: &CoefficientTable) -> Vec<f64> {
    prefix_sums(table).into_iter().map(|(g, s)| (g - s).abs()).collect()
}

fn prefix_sums(table: &CoefficientTable) -> Vec<(f64, f64)> {
    let i = table.last_index();
    let mut sg = 0.0;
    let mut ss = 0.0;
    (0..table.order())
        .map(|n| {
            sg += alternating(n) * table.g[n][i];
            ss += alternating(n) * table.s[n][i];
            (sg, ss)
        })
        .collect()
}

/// Index of the smallest indicator value; values closer to the minimum than
/// the rounding resolution of the partial sums count as ties and the smallest
/// order wins.
fn argmin_with_ties(curve: &[f64], sums: &[(f64, f64)]) -> usize {
    let min = curve.iter().copied().fold(f64::INFINITY, f64::min);
    curve
        .iter()
        .zip(sums)
        .position(|(v, (g, s))| *v <= min + 4.0 * f64::EPSILON * (g.abs() + s.abs()))
        .unwrap_or(0)
}

/// Chooses `N ∈ [1, n_max]` minimising `eps1` at `zeta = delta`.
///
/// Returns the order, its indicator report and the table truncated to it.
pub fn select_truncation(data: &LiouvilleData, n_max: usize) -> Result<(usize, IndicatorReport, CoefficientTable)> {
    if n_max == 0 || n_max > MAX_TRUNCATION {
        return Err(TevpError::InvalidInput(format!(
            "N_max must lie in [1, {MAX_TRUNCATION}], got {n_max}"
        )));
    }
    let f = solve_f(data)?;
    // back off if the recurrence overflows at high order
    let mut top = n_max;
    let table = loop {
        match compute_coefficients(data, &f, top) {
            Ok(t) => break t,
            Err(TevpError::RecurrenceOverflow { order }) if top > 1 => {
                top = (order / 2).clamp(1, top - 1);
            }
            Err(e) => return Err(e),
        }
    };
    let curve = eps1_at_delta_curve(&table);
    let order = argmin_with_ties(&curve, &prefix_sums(&table)) + 1;
    let report = indicators_for_order(&table, &omega(data), order);
    Ok((order, report, table.truncated(order)))
}
