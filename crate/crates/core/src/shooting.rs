//! Shooting oracle: `D0(k) = (sin k / k) y'(1) - cos(k) y(1)` from a
//! fixed-step RK4 integration of `y'' + k^2 n(r) y = 0`, `y(0) = 0`, `y'(0) = 1`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::charfn::sinc;
use crate::error::{Result, TevpError};
use crate::index::RefractiveIndexModel;
use crate::roots::{find_zeros, SearchWindow, Spectrum};

pub const MIN_STEPS: usize = 1000;
pub const DEFAULT_STEPS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShootingConfig {
    pub steps: usize,
    /// Always 4.
    pub method_order: usize,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            steps: DEFAULT_STEPS,
            method_order: 4,
        }
    }
}

impl ShootingConfig {
    pub fn with_steps(steps: usize) -> Self {
        ShootingConfig {
            steps,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < MIN_STEPS || self.method_order != 4 {
            return Err(TevpError::InvalidInput(format!(
                "shooting needs steps >= {MIN_STEPS} and method order 4, got {} and {}",
                self.steps, self.method_order
            )));
        }
        Ok(())
    }
}

/// `n(r)` sampled at the RK4 stage points, reused for every `k`.
#[derive(Debug, Clone)]
pub struct ShootingOracle {
    /// `n` at `r = i h / 2`, `i = 0..=2 steps`.
    n_half: Vec<f64>,
    steps: usize,
}

impl ShootingOracle {
    pub fn new(model: &RefractiveIndexModel, cfg: ShootingConfig) -> Result<Self> {
        cfg.validate()?;
        model.validate()?;
        let h2 = 0.5 / cfg.steps as f64;
        Ok(ShootingOracle {
            n_half: (0..=2 * cfg.steps).map(|i| model.n(i as f64 * h2)).collect(),
            steps: cfg.steps,
        })
    }

    /// `(y(1), y'(1))`.
    pub fn solve(&self, k: C64) -> (C64, C64) {
        let h = 1.0 / self.steps as f64;
        let k2 = k * k;
        let (mut y, mut v) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        for i in 0..self.steps {
            let (n0, nm, n1) = (self.n_half[2 * i], self.n_half[2 * i + 1], self.n_half[2 * i + 2]);
            let a1 = -k2 * n0 * y;
            let y2 = y + v * (h / 2.0);
            let v2 = v + a1 * (h / 2.0);
            let a2 = -k2 * nm * y2;
            let y3 = y + v2 * (h / 2.0);
            let v3 = v + a2 * (h / 2.0);
            let a3 = -k2 * nm * y3;
            let y4 = y + v3 * h;
            let v4 = v + a3 * h;
            let a4 = -k2 * n1 * y4;
            y += (v + (v2 + v3) * 2.0 + v4) * (h / 6.0);
            v += (a1 + (a2 + a3) * 2.0 + a4) * (h / 6.0);
        }
        (y, v)
    }

    pub fn d0(&self, k: C64) -> C64 {
        let (y, v) = self.solve(k);
        sinc(k) * v - k.cos() * y
    }
}

/// Factor `n(0)^{1/4}` between the Liouville-form characteristic function
/// `D0N` and the shooting `D0`.
pub fn liouville_factor(model: &RefractiveIndexModel) -> f64 {
    model.n(0.0).powf(0.25)
}

pub fn d0_shooting(model: &RefractiveIndexModel, k: C64, cfg: ShootingConfig) -> Result<C64> {
    Ok(ShootingOracle::new(model, cfg)?.d0(k))
}

/// Zeros of the shooting characteristic function in `window`.
pub fn eigenvalues_shooting(
    model: &RefractiveIndexModel,
    window: &SearchWindow,
    cfg: ShootingConfig,
) -> Result<Spectrum> {
    let oracle = ShootingOracle::new(model, cfg)?;
    find_zeros(&|k| oracle.d0(k), window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfn::CharacteristicContext;
    use crate::index::NamedIndex;
    use crate::liouville::liouville_transform;
    use crate::nsbf::select_truncation;
    use proptest::prelude::*;

    fn nsbf(id: NamedIndex) -> (CharacteristicContext, RefractiveIndexModel) {
        let m = RefractiveIndexModel::named(id);
        let d = liouville_transform(&m, 3001).unwrap();
        let (_, _, t) = select_truncation(&d, 64).unwrap();
        (
            CharacteristicContext::from_table(t, m.n_at_1(), m.dn_at_1()).unwrap(),
            m,
        )
    }

    #[test]
    fn unit_index_gives_zero() {
        let m = RefractiveIndexModel::from_expression("1 + 0*r").unwrap();
        let o = ShootingOracle::new(&m, ShootingConfig::default()).unwrap();
        for k in [C64::new(0.0, 0.0), C64::new(3.7, 0.0), C64::new(12.0, 1.5)] {
            assert!(o.d0(k).norm() < 1e-10, "{k} {}", o.d0(k));
        }
    }

    #[test]
    fn config_is_validated() {
        let m = RefractiveIndexModel::named(NamedIndex::Ex1);
        assert!(ShootingOracle::new(&m, ShootingConfig::with_steps(999)).is_err());
        let cfg = ShootingConfig {
            steps: 2000,
            method_order: 2,
        };
        assert!(ShootingOracle::new(&m, cfg).is_err());
    }

    #[test]
    fn vanishes_at_nsbf_eigenvalues() {
        let (ctx, m) = nsbf(NamedIndex::Ex1);
        let s = find_zeros(&|k| ctx.eval_d0n(k), &SearchWindow::new(0.0, 25.0, 5.0)).unwrap();
        let o = ShootingOracle::new(&m, ShootingConfig::with_steps(8000)).unwrap();
        assert!(s.len() > 10);
        for k in &s.eigenvalues {
            assert!(o.d0(*k).norm() < 1e-6, "{k}: {}", o.d0(*k).norm());
        }
    }

    #[test]
    fn sign_pattern_matches_nsbf() {
        let (ctx, m) = nsbf(NamedIndex::Ex4);
        let o = ShootingOracle::new(&m, ShootingConfig::default()).unwrap();
        for (k, d) in ctx.sample_real_axis(0.1, 30.0, 600) {
            let shot = o.d0(C64::new(k, 0.0)).re;
            if d.re.abs() > 1e-6 {
                assert_eq!(shot > 0.0, d.re > 0.0, "k = {k}: {shot} vs {}", d.re);
            }
        }
    }

    #[test]
    fn constant_index_matches_closed_form() {
        let m = RefractiveIndexModel::named(NamedIndex::Ex2b);
        let c = m.n(0.5).sqrt();
        let closed = |k: f64| k.sin() / k * (c * k).cos() - k.cos() * (c * k).sin() / (c * k);
        let s = eigenvalues_shooting(&m, &SearchWindow::new(0.0, 50.0, 1.0), ShootingConfig::with_steps(8000)).unwrap();
        let real = s.real();
        assert!(real.len() >= 3);
        for k in real {
            let (mut a, mut b) = (k - 1e-3, k + 1e-3);
            assert!(closed(a) * closed(b) < 0.0);
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                if closed(a) * closed(mid) <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            assert!((k - 0.5 * (a + b)).abs() < 1e-8, "{k} vs {}", 0.5 * (a + b));
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let m = RefractiveIndexModel::named(NamedIndex::Ex3);
        let k = C64::new(9.0, 0.7);
        let d = |steps| {
            ShootingOracle::new(&m, ShootingConfig::with_steps(steps))
                .unwrap()
                .d0(k)
        };
        let (a, b, c) = (d(1000), d(2000), d(4000));
        let ratio = (a - b).norm() / (b - c).norm();
        assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn conjugate_symmetric(re in 0.1f64..20.0, im in -3.0f64..3.0) {
            let m = RefractiveIndexModel::named(NamedIndex::Ex3);
            let o = ShootingOracle::new(&m, ShootingConfig::with_steps(1000)).unwrap();
            let k = C64::new(re, im);
            prop_assert_eq!(o.d0(k.conj()), o.d0(k).conj());
        }
    }
}
