#![allow(dead_code)]

use num_complex::Complex64 as C64;
use tevp_core::charfn::CharacteristicContext;
use tevp_core::nsbf::select_truncation;
use tevp_core::roots::{find_zeros, SearchWindow, Spectrum};
use tevp_core::{liouville_transform, NamedIndex, RefractiveIndexModel};

pub struct Direct {
    pub model: RefractiveIndexModel,
    pub delta: f64,
    pub ctx: CharacteristicContext,
}

pub fn direct(id: NamedIndex) -> Direct {
    let model = RefractiveIndexModel::named(id);
    let data = liouville_transform(&model, tevp_core::liouville::DEFAULT_GRID_SIZE).unwrap();
    let (_, _, table) = select_truncation(&data, 64).unwrap();
    let ctx = CharacteristicContext::from_table(table, model.n_at_1(), model.dn_at_1()).unwrap();
    Direct {
        delta: data.delta(),
        model,
        ctx,
    }
}

impl Direct {
    pub fn spectrum(&self, window: SearchWindow) -> Spectrum {
        let ctx = self.ctx.clone().with_strip_bound(window.im_bound);
        find_zeros(&|k| ctx.eval_d0n(k), &window).unwrap()
    }
}

/// Closed-form characteristic function of the first example: `p = 1/4`,
/// `n(1) = 1`, `n'(1) = 0`.
pub fn ex1_closed_form(k: C64) -> C64 {
    let delta = 3f64.ln();
    let w = (k * k - 0.25).sqrt();
    let sinc = |z: C64| {
        if z.norm() < 1e-8 {
            C64::new(1.0, 0.0)
        } else {
            z.sin() / z
        }
    };
    sinc(k) * (w * delta).cos() - k.cos() * delta * sinc(w * delta)
}

/// Largest distance between paired entries of two spectra, or infinity if
/// their sizes differ.
pub fn paired_error(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let nearest = |k: &C64, set: &[C64]| set.iter().map(|q| (q - k).norm()).fold(f64::INFINITY, f64::min);
    let ab = a.iter().map(|k| nearest(k, b)).fold(0.0, f64::max);
    let ba = b.iter().map(|k| nearest(k, a)).fold(0.0, f64::max);
    ab.max(ba)
}

/// Deterministic scattered points in `[re0, re1] x [-im, im]`.
pub fn scattered(count: usize, re0: f64, re1: f64, im: f64) -> Vec<C64> {
    let (a, b) = (0.618_033_988_749_895, 0.754_877_666_246_693);
    (1..=count)
        .map(|i| {
            let (u, v) = ((i as f64 * a).fract(), (i as f64 * b).fract());
            C64::new(re0 + u * (re1 - re0), im * (2.0 * v - 1.0))
        })
        .collect()
}
