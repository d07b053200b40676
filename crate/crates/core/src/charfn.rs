//! Truncated NSBF solutions and the characteristic function
//! `D0N(k) = a(k) phi_N(k, delta) + b(k) S_N(k, delta)` with
//! `a(k) = n0 sin k / k` and `b(k) = -cos k / n0 + n1 sin k / k`.

use num_complex::Complex64;

use crate::bessel::spherical_bessel_j_into;
use crate::error::{Result, TevpError};
use crate::nsbf::CoefficientTable;

pub const DEFAULT_STRIP_BOUND: f64 = 2.0;
const LIMIT_K: f64 = 1e-8;

type C64 = Complex64;

/// `n0 = n(1)^{1/4}` and `n1 = -n'(1) / (4 n(1)^{5/4})`.
pub fn endpoint_constants(n_at_1: f64, dn_at_1: f64) -> (f64, f64) {
    let n0 = n_at_1.powf(0.25);
    (n0, -dn_at_1 / (4.0 * n_at_1.powf(1.25)))
}

/// `a(k) = n0 sin k / k`.
pub fn a_coefficient(n0: f64, k: C64) -> C64 {
    sinc(k) * n0
}

/// `b(k) = -cos k / n0 + n1 sin k / k`.
pub fn b_coefficient(n0: f64, n1: f64, k: C64) -> C64 {
    -k.cos() / n0 + sinc(k) * n1
}

pub(crate) fn sinc(k: C64) -> C64 {
    if k.norm() < 1e-4 {
        let k2 = k * k;
        1.0 - k2 / 6.0 + k2 * k2 / 120.0
    } else {
        k.sin() / k
    }
}

/// `sin(k x)/k + (1/k) Σ s_n j_{2n+1}(k x)`; `x (1 + s_0/3)` as `k -> 0`.
pub fn s_series(s: &[f64], k: C64, x: f64) -> C64 {
    if k.norm() < LIMIT_K {
        return C64::new(x * (1.0 + s.first().copied().unwrap_or(0.0) / 3.0), 0.0);
    }
    let z = k * x;
    let mut j = vec![C64::new(0.0, 0.0); 2 * s.len().max(1)];
    spherical_bessel_j_into(z, &mut j);
    let mut sum = z.sin();
    for (n, c) in s.iter().enumerate() {
        sum += j[2 * n + 1] * *c;
    }
    sum / k
}

/// `cos(k x) + Σ g_n j_{2n}(k x)`; `1 + g_0` as `k -> 0`.
pub fn phi_series(g: &[f64], k: C64, x: f64) -> C64 {
    if k.norm() < LIMIT_K {
        return C64::new(1.0 + g.first().copied().unwrap_or(0.0), 0.0);
    }
    let z = k * x;
    let mut j = vec![C64::new(0.0, 0.0); 2 * g.len().max(1)];
    spherical_bessel_j_into(z, &mut j);
    let mut sum = z.cos();
    for (n, c) in g.iter().enumerate() {
        sum += j[2 * n] * *c;
    }
    sum
}

/// `phi_N(k, x)` and `S_N(k, x)` sharing one Bessel evaluation.
pub fn phi_s_series(g: &[f64], s: &[f64], k: C64, x: f64) -> (C64, C64) {
    if k.norm() < LIMIT_K {
        return (phi_series(g, k, x), s_series(s, k, x));
    }
    let n = g.len().max(s.len()).max(1);
    let z = k * x;
    let mut j = vec![C64::new(0.0, 0.0); 2 * n];
    spherical_bessel_j_into(z, &mut j);
    let mut phi = z.cos();
    for (i, c) in g.iter().enumerate() {
        phi += j[2 * i] * *c;
    }
    let mut sv = z.sin();
    for (i, c) in s.iter().enumerate() {
        sv += j[2 * i + 1] * *c;
    }
    (phi, sv / k)
}

/// Everything needed to evaluate the truncated characteristic function.
#[derive(Debug, Clone)]
pub struct CharacteristicContext {
    table: Option<CoefficientTable>,
    delta: f64,
    g_delta: Vec<f64>,
    s_delta: Vec<f64>,
    n_at_1: f64,
    dn_at_1: f64,
    n0: f64,
    n1: f64,
    strip_bound: f64,
}

impl CharacteristicContext {
    /// Context backed by a full coefficient table (direct problem).
    pub fn from_table(table: CoefficientTable, n_at_1: f64, dn_at_1: f64) -> Result<Self> {
        if table.order() == 0 {
            return Err(TevpError::InvalidInput("coefficient table is empty".into()));
        }
        let i = table.last_index();
        let g = table.g_at(i);
        let s = table.s_at(i);
        let mut ctx = Self::from_endpoint(table.delta(), g, s, n_at_1, dn_at_1)?;
        ctx.table = Some(table);
        Ok(ctx)
    }

    /// Context from the endpoint coefficients `g_n(delta)`, `s_n(delta)` only.
    pub fn from_endpoint(delta: f64, g: Vec<f64>, s: Vec<f64>, n_at_1: f64, dn_at_1: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(TevpError::InvalidInput(format!("delta must be positive, got {delta}")));
        }
        if g.is_empty() || g.len() != s.len() {
            return Err(TevpError::InvalidInput("need N >= 1 coefficients of each kind".into()));
        }
        if 2 * g.len() > crate::bessel::MAX_ORDER + 1 {
            return Err(TevpError::InvalidInput(format!(
                "truncation order {} too large",
                g.len()
            )));
        }
        if !(n_at_1 > 0.0) {
            return Err(TevpError::NonPositiveIndex { r: 1.0, value: n_at_1 });
        }
        let (n0, n1) = endpoint_constants(n_at_1, dn_at_1);
        Ok(CharacteristicContext {
            table: None,
            delta,
            g_delta: g,
            s_delta: s,
            n_at_1,
            dn_at_1,
            n0,
            n1,
            strip_bound: DEFAULT_STRIP_BOUND,
        })
    }

    pub fn with_strip_bound(mut self, c: f64) -> Self {
        self.strip_bound = c;
        self
    }

    pub fn strip_bound(&self) -> f64 {
        self.strip_bound
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn order(&self) -> usize {
        self.g_delta.len()
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn n1(&self) -> f64 {
        self.n1
    }

    pub fn n_at_1(&self) -> f64 {
        self.n_at_1
    }

    pub fn dn_at_1(&self) -> f64 {
        self.dn_at_1
    }

    pub fn endpoint_g(&self) -> &[f64] {
        &self.g_delta
    }

    pub fn endpoint_s(&self) -> &[f64] {
        &self.s_delta
    }

    pub fn table(&self) -> Option<&CoefficientTable> {
        self.table.as_ref()
    }

    fn require_table(&self) -> Result<&CoefficientTable> {
        self.table
            .as_ref()
            .ok_or_else(|| TevpError::InvalidInput("context has no interior coefficient table".into()))
    }

    /// `S_N(k, zeta_i)`.
    pub fn eval_s_n(&self, k: C64, i: usize) -> Result<C64> {
        let t = self.require_table()?;
        Ok(s_series(&t.s_at(i), k, t.zeta[i]))
    }

    /// `phi_N(k, zeta_i)`.
    pub fn eval_phi_n(&self, k: C64, i: usize) -> Result<C64> {
        let t = self.require_table()?;
        Ok(phi_series(&t.g_at(i), k, t.zeta[i]))
    }

    /// `T_N(k, zeta_i) = sin(k(zeta - delta))/k + (1/k) Σ t_n j_{2n+1}(k(delta - zeta))`.
    pub fn eval_t_n(&self, k: C64, i: usize) -> Result<C64> {
        let t = self.require_table()?;
        let tc = t
            .t_at(i)
            .ok_or_else(|| TevpError::InvalidInput("table has no t coefficients".into()))?;
        // T is minus an S-type series in the reflected variable
        Ok(-s_series(
            &tc.iter().map(|v| -v).collect::<Vec<_>>(),
            k,
            self.delta - t.zeta[i],
        ))
    }

    pub fn a(&self, k: C64) -> C64 {
        a_coefficient(self.n0, k)
    }

    pub fn b(&self, k: C64) -> C64 {
        b_coefficient(self.n0, self.n1, k)
    }

    /// Truncated characteristic function `D0N(k)`.
    pub fn eval_d0n(&self, k: C64) -> C64 {
        let (phi, s) = phi_s_series(&self.g_delta, &self.s_delta, k, self.delta);
        self.a(k) * phi + self.b(k) * s
    }

    /// Bound on `|D0 - D0N|` in the strip `|Im k| <= C` implied by an
    /// indicator value `eps1`: `10 eps1 sinh(C delta) / C`.
    pub fn remainder_bound(&self, eps1: f64) -> f64 {
        let c = self.strip_bound;
        10.0 * eps1 * (c * self.delta).sinh() / c
    }

    /// `(k, D0N(k))` at `count` equispaced real points of `[k_min, k_max]`.
    pub fn sample_real_axis(&self, k_min: f64, k_max: f64, count: usize) -> Vec<(f64, C64)> {
        let count = count.max(2);
        let h = (k_max - k_min) / (count - 1) as f64;
        (0..count)
            .map(|i| {
                let k = k_min + h * i as f64;
                (k, self.eval_d0n(C64::new(k, 0.0)))
            })
            .collect()
    }
}
