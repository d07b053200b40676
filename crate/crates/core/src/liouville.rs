//! Liouville transformation of `y'' + k^2 n(r) y = 0` to Schrödinger form.
//!
//! With `zeta(r) = ∫_r^1 sqrt(n)` and `y = z n^{-1/4}` the equation becomes
//! `-z'' + p(zeta) z = k^2 z` on `[0, delta]`, `delta = zeta(0)`.

use crate::error::{Result, TevpError};
use crate::index::RefractiveIndexModel;
use crate::interp::Pchip;
use crate::quadrature::GaussRule;

pub const DEFAULT_GRID_SIZE: usize = 3001;
pub const MIN_GRID_SIZE: usize = 64;

const PANELS: usize = 64;
const GAUSS_POINTS: usize = 16;
const INVERSION_TOL: f64 = 1e-12;

/// Travel time `zeta(r) = ∫_r^1 sqrt(n(t)) dt` by composite Gauss–Legendre.
struct TravelTime<'a> {
    model: &'a RefractiveIndexModel,
    rule: GaussRule,
    /// `tail[j] = ∫_{r_j}^1 sqrt(n)` at panel edges `r_j = j / PANELS`.
    tail: Vec<f64>,
}

impl<'a> TravelTime<'a> {
    fn new(model: &'a RefractiveIndexModel) -> Self {
        let rule = GaussRule::new(GAUSS_POINTS);
        let h = 1.0 / PANELS as f64;
        let mut tail = vec![0.0; PANELS + 1];
        for j in (0..PANELS).rev() {
            let a = j as f64 * h;
            tail[j] = tail[j + 1] + rule.integrate(|t| model.n(t).sqrt(), a, a + h);
        }
        TravelTime { model, rule, tail }
    }

    fn delta(&self) -> f64 {
        self.tail[0]
    }

    fn at(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        if r <= 0.0 {
            return self.tail[0];
        }
        let j = ((r * PANELS as f64).floor() as usize).min(PANELS - 1);
        let upper = (j + 1) as f64 / PANELS as f64;
        self.tail[j + 1] + self.rule.integrate(|t| self.model.n(t).sqrt(), r, upper)
    }

    /// Solves `zeta(r) = target` by safeguarded Newton iteration.
    fn invert(&self, target: f64, guess: f64) -> Result<f64> {
        if target <= 0.0 {
            return Ok(1.0);
        }
        if target >= self.delta() {
            return Ok(0.0);
        }
        // zeta is decreasing: zeta(lo) >= target >= zeta(hi)
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut r = guess.clamp(0.0, 1.0);
        for _ in 0..200 {
            let g = self.at(r) - target;
            if g.abs() <= INVERSION_TOL * 1e-3 {
                return Ok(r);
            }
            if g > 0.0 {
                lo = r;
            } else {
                hi = r;
            }
            let slope = -self.model.n(r).sqrt();
            let mut next = r - g / slope;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - r).abs() < INVERSION_TOL * 1e-3 || hi - lo < 1e-16 {
                return Ok(next);
            }
            r = next;
        }
        Err(TevpError::QuadratureFailure(format!(
            "no convergence inverting zeta(r) = {target}"
        )))
    }
}

/// Schrödinger-form data on a uniform `zeta` grid.
#[derive(Debug, Clone)]
pub struct LiouvilleData {
    delta: f64,
    zeta: Vec<f64>,
    p: Vec<f64>,
    /// Potential at the cell midpoints, used by the fixed-step integrator.
    p_mid: Vec<f64>,
    /// `r(zeta_i)`; empty when the data was built directly from a potential.
    r: Vec<f64>,
    n0: f64,
    n1: f64,
    interp: Pchip,
}

impl LiouvilleData {
    /// Builds the data from a potential given as a function of `zeta`.
    ///
    /// `n0 = n(1)^{1/4}` and `n1` is the `zeta`-derivative of `n^{1/4}(r(zeta))`
    /// at `zeta = 0`; the inverse map `r(zeta)` is not available.
    pub fn from_potential(delta: f64, grid_size: usize, n0: f64, n1: f64, p: impl Fn(f64) -> f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(TevpError::InvalidInput(format!("delta must be positive, got {delta}")));
        }
        if grid_size < 3 {
            return Err(TevpError::InvalidInput("grid needs at least three points".into()));
        }
        let h = delta / (grid_size - 1) as f64;
        let zeta: Vec<f64> = (0..grid_size).map(|i| grid_point(i, h, grid_size, delta)).collect();
        let pv: Vec<f64> = zeta.iter().map(|&z| p(z)).collect();
        let p_mid: Vec<f64> = (0..grid_size - 1).map(|i| p((i as f64 + 0.5) * h)).collect();
        Self::assemble(delta, zeta, pv, p_mid, Vec::new(), n0, n1)
    }

    fn assemble(
        delta: f64,
        zeta: Vec<f64>,
        p: Vec<f64>,
        p_mid: Vec<f64>,
        r: Vec<f64>,
        n0: f64,
        n1: f64,
    ) -> Result<Self> {
        if p.iter().chain(&p_mid).any(|v| !v.is_finite()) {
            return Err(TevpError::InvalidInput("transformed potential is not finite".into()));
        }
        let interp = Pchip::new(zeta.clone(), p.clone())?;
        Ok(LiouvilleData {
            delta,
            zeta,
            p,
            p_mid,
            r,
            n0,
            n1,
            interp,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn zeta_grid(&self) -> &[f64] {
        &self.zeta
    }

    pub fn step(&self) -> f64 {
        self.delta / (self.zeta.len() - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.zeta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeta.is_empty()
    }

    pub fn p_values(&self) -> &[f64] {
        &self.p
    }

    pub fn p_midpoints(&self) -> &[f64] {
        &self.p_mid
    }

    /// `r(zeta_i)` on the grid, if the data came from a refractive index.
    pub fn r_of_zeta(&self) -> Option<&[f64]> {
        if self.r.is_empty() {
            None
        } else {
            Some(&self.r)
        }
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn n1(&self) -> f64 {
        self.n1
    }

    /// Potential at arbitrary `zeta` by monotone cubic interpolation.
    pub fn p_at(&self, zeta: f64) -> Result<f64> {
        let tol = 1e-12 * self.delta;
        if !(zeta >= -tol && zeta <= self.delta + tol) {
            return Err(TevpError::OutOfDomain {
                zeta,
                delta: self.delta,
            });
        }
        Ok(self.interp.eval(zeta.clamp(0.0, self.delta)))
    }

    /// The same data seen from the right endpoint: `p~(zeta) = p(delta - zeta)`.
    pub fn reflected(&self) -> LiouvilleData {
        let mut p = self.p.clone();
        p.reverse();
        let mut p_mid = self.p_mid.clone();
        p_mid.reverse();
        let mut r = self.r.clone();
        r.reverse();
        Self::assemble(self.delta, self.zeta.clone(), p, p_mid, r, self.n0, self.n1)
            .expect("reflection of valid data is valid")
    }
}

fn grid_point(i: usize, h: f64, size: usize, delta: f64) -> f64 {
    if i + 1 == size {
        delta
    } else {
        i as f64 * h
    }
}

/// Liouville transformation of a refractive index onto a uniform `zeta` grid.
pub fn liouville_transform(model: &RefractiveIndexModel, grid_size: usize) -> Result<LiouvilleData> {
    if grid_size < MIN_GRID_SIZE {
        return Err(TevpError::InvalidInput(format!(
            "grid_size must be at least {MIN_GRID_SIZE}, got {grid_size}"
        )));
    }
    model.validate()?;
    let tt = TravelTime::new(model);
    let delta = tt.delta();
    if !(delta > 0.0) {
        return Err(TevpError::QuadratureFailure(format!(
            "non-positive travel time {delta}"
        )));
    }
    let h = delta / (grid_size - 1) as f64;
    // invert on the doubled grid so the midpoints come for free
    let fine = 2 * (grid_size - 1) + 1;
    let hf = 0.5 * h;
    let mut r_fine = Vec::with_capacity(fine);
    let mut guess = 1.0;
    for i in 0..fine {
        let target = grid_point(i, hf, fine, delta);
        let r = tt.invert(target, guess)?;
        // linear extrapolation for the next guess
        let next = if let Some(&prev) = r_fine.last() {
            2.0 * r - prev
        } else {
            r
        };
        guess = next;
        r_fine.push(r);
    }
    if r_fine.windows(2).any(|w: &[f64]| w[1] > w[0]) {
        return Err(TevpError::QuadratureFailure("r(zeta) is not monotone".into()));
    }
    let zeta: Vec<f64> = (0..grid_size).map(|i| grid_point(i, h, grid_size, delta)).collect();
    let r: Vec<f64> = (0..grid_size).map(|i| r_fine[2 * i]).collect();
    let p: Vec<f64> = r.iter().map(|&x| model.potential_at(x)).collect();
    let p_mid: Vec<f64> = (0..grid_size - 1)
        .map(|i| model.potential_at(r_fine[2 * i + 1]))
        .collect();
    let n_at_1 = model.n_at_1();
    let n0 = n_at_1.powf(0.25);
    let n1 = -model.dn_at_1() / (4.0 * n_at_1.powf(1.25));
    LiouvilleData::assemble(delta, zeta, p, p_mid, r, n0, n1)
}

/// Travel time `∫_r^1 sqrt(n)` for a model (independent of any grid).
pub fn travel_time(model: &RefractiveIndexModel, r: f64) -> f64 {
    TravelTime::new(model).at(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::NamedIndex;

    #[test]
    fn example_one_constant_potential() {
        let m = RefractiveIndexModel::named(NamedIndex::Ex1);
        let d = liouville_transform(&m, 513).unwrap();
        assert!((d.delta() - 3f64.ln()).abs() < 1e-13);
        let dev = d
            .p_values()
            .iter()
            .chain(d.p_midpoints())
            .map(|p| (p - 0.25).abs())
            .fold(0.0, f64::max);
        assert!(dev < 1e-8);
        assert!((d.p_at(0.5).unwrap() - 0.25).abs() < 1e-8);
        assert_eq!(d.n0(), 1.0);
        assert!(d.n1().abs() < 1e-15);
    }

    #[test]
    fn identity_medium() {
        let m = RefractiveIndexModel::from_expression("1").unwrap();
        let d = liouville_transform(&m, 101).unwrap();
        assert!((d.delta() - 1.0).abs() < 1e-14);
        assert!(d.p_values().iter().all(|p| *p == 0.0));
        assert_eq!(d.p_at(0.3).unwrap(), 0.0);
        let r = d.r_of_zeta().unwrap();
        for (z, r) in d.zeta_grid().iter().zip(r) {
            assert!((r - (1.0 - z)).abs() < 1e-13);
        }
    }

    #[test]
    fn constant_index_gives_zero_potential_and_delta_c() {
        let m = RefractiveIndexModel::from_expression("2.25").unwrap();
        let d = liouville_transform(&m, 101).unwrap();
        assert!((d.delta() - 1.5).abs() < 1e-14);
        assert!(d.p_values().iter().all(|p| p.abs() < 1e-15));
    }

    #[test]
    fn example_four_potential() {
        let m = RefractiveIndexModel::named(NamedIndex::Ex4);
        let d = liouville_transform(&m, 257).unwrap();
        assert!((d.delta() - 1.0).abs() < 1e-14);
        let r = d.r_of_zeta().unwrap();
        for (p, r) in d.p_values().iter().zip(r) {
            assert!((p + 12.0 / (1.0 + 2.0 * r).powi(4)).abs() < 1e-10);
        }
    }

    #[test]
    fn round_trip_of_travel_time() {
        let m = RefractiveIndexModel::named(NamedIndex::Ex3);
        let d = liouville_transform(&m, 401).unwrap();
        let r = d.r_of_zeta().unwrap();
        assert_eq!(r[0], 1.0);
        assert_eq!(*r.last().unwrap(), 0.0);
        for (z, r) in d.zeta_grid().iter().zip(r) {
            assert!((travel_time(&m, *r) - z).abs() < 1e-10);
        }
        assert!(r.windows(2).all(|w| w[1] < w[0]));
        assert!((d.delta() - 1.155384328946918).abs() < 1e-12);
    }

    #[test]
    fn p_at_rejects_out_of_domain() {
        let d = LiouvilleData::from_potential(1.0, 11, 1.0, 0.0, |_| 0.0).unwrap();
        assert!(matches!(d.p_at(1.5), Err(TevpError::OutOfDomain { .. })));
        assert!(matches!(d.p_at(-0.1), Err(TevpError::OutOfDomain { .. })));
    }

    #[test]
    fn grid_too_small() {
        let m = RefractiveIndexModel::named(NamedIndex::Ex1);
        assert!(liouville_transform(&m, 10).is_err());
    }

    #[test]
    fn reflection_reverses_potential() {
        let d = LiouvilleData::from_potential(2.0, 21, 1.0, 0.0, |z| z).unwrap();
        let rd = d.reflected();
        for (z, p) in rd.zeta_grid().iter().zip(rd.p_values()) {
            assert!((p - (2.0 - z)).abs() < 1e-14);
        }
        assert!((rd.p_midpoints()[0] - 1.95).abs() < 1e-14);
    }
}
