//! Zeros of analytic functions in a half-strip of the complex plane.
//!
//! Boxes are counted with the argument principle, subdivided four ways until
//! each holds a single zero, and the zero is then polished with a complex
//! secant iteration. Only `Im k >= 0` is searched (plus a thin band below the
//! real axis); conjugates are appended.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TevpError};
use crate::interp::{bisect, CubicSpline};

type C64 = Complex64;

pub const DEFAULT_MIN_BOX: f64 = 1e-7;
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 1e-3;
pub const DEFAULT_SAMPLES_PER_UNIT: f64 = 8.0;

const STRIP_WIDTH: f64 = 2.0;
const PERTURBATION: f64 = 0.37;
const MAX_PERTURBATIONS: usize = 3;
const POLISH_DIAMETER: f64 = 2.0;
const IDENTICALLY_ZERO: f64 = 1e-13;

/// Search region `re_min <= Re k <= re_max`, `|Im k| <= im_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchWindow {
    pub re_min: f64,
    pub re_max: f64,
    pub im_bound: f64,
    pub min_box: f64,
    pub exclusion_radius: f64,
    /// Initial contour samples per unit length before adaptive refinement.
    pub samples_per_unit: f64,
}

impl SearchWindow {
    pub fn new(re_min: f64, re_max: f64, im_bound: f64) -> Self {
        SearchWindow {
            re_min,
            re_max,
            im_bound,
            min_box: DEFAULT_MIN_BOX,
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
            samples_per_unit: DEFAULT_SAMPLES_PER_UNIT,
        }
    }

    pub fn with_min_box(mut self, min_box: f64) -> Self {
        self.min_box = min_box;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.re_min >= 0.0
            && self.re_max > self.re_min
            && self.im_bound > 0.0
            && self.min_box > 0.0
            && self.exclusion_radius >= 0.0
            && self.samples_per_unit > 0.0
            && [self.re_max, self.im_bound, self.samples_per_unit]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(TevpError::InvalidInput(format!("invalid search window {self:?}")))
        }
    }

    fn contains(&self, k: C64) -> bool {
        let tol = 1e-12 * (1.0 + self.re_max);
        k.re >= self.re_min - tol
            && k.re <= self.re_max + tol
            && k.im.abs() <= self.im_bound + tol
            && k.norm() >= self.exclusion_radius
    }
}

/// Axis-aligned rectangle `[re0, re1] x [im0, im1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl Rect {
    pub fn new(re0: f64, re1: f64, im0: f64, im1: f64) -> Self {
        Rect { re0, re1, im0, im1 }
    }

    pub fn width(&self) -> f64 {
        self.re1 - self.re0
    }

    pub fn height(&self) -> f64 {
        self.im1 - self.im0
    }

    pub fn center(&self) -> C64 {
        C64::new(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re0, self.im0),
            C64::new(self.re1, self.im0),
            C64::new(self.re1, self.im1),
            C64::new(self.re0, self.im1),
        ]
    }

    fn contains(&self, k: C64, tol: f64) -> bool {
        k.re >= self.re0 - tol && k.re <= self.re1 + tol && k.im >= self.im0 - tol && k.im <= self.im1 + tol
    }

    /// Quarters meeting at `(x, y)`.
    pub fn split(&self, x: f64, y: f64) -> [Rect; 4] {
        [
            Rect::new(self.re0, x, self.im0, y),
            Rect::new(x, self.re1, self.im0, y),
            Rect::new(x, self.re1, y, self.im1),
            Rect::new(self.re0, x, y, self.im1),
        ]
    }

    fn zero_on_contour(&self) -> TevpError {
        TevpError::ZeroOnContour {
            re_min: self.re0,
            re_max: self.re1,
            im_min: self.im0,
            im_max: self.im1,
        }
    }
}

/// Located zeros, sorted by ascending real part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    /// Winding number of the final box (multiplicity).
    pub windings: Vec<i32>,
    /// False when polishing failed and the entry is a box centre.
    pub polished: Vec<bool>,
    pub window: SearchWindow,
}

impl Spectrum {
    pub fn from_roots(mut roots: Vec<(C64, i32, bool)>, window: SearchWindow) -> Self {
        roots.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        Spectrum {
            eigenvalues: roots.iter().map(|r| r.0).collect(),
            windings: roots.iter().map(|r| r.1).collect(),
            polished: roots.iter().map(|r| r.2).collect(),
            window,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Zeros counted with multiplicity.
    pub fn count_with_multiplicity(&self) -> i32 {
        self.windings.iter().sum()
    }

    pub fn real(&self) -> Vec<f64> {
        self.eigenvalues.iter().filter(|k| k.im == 0.0).map(|k| k.re).collect()
    }

    pub fn non_real(&self) -> Vec<C64> {
        self.eigenvalues.iter().copied().filter(|k| k.im != 0.0).collect()
    }

    /// The `count` entries of smallest modulus, ordered by modulus.
    pub fn lowest_by_modulus(&self, count: usize) -> Vec<C64> {
        let mut v = self.eigenvalues.clone();
        v.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.im.total_cmp(&b.im)));
        v.truncate(count);
        v
    }

    /// Whether every entry has its conjugate in the set within `tol`.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        self.eigenvalues
            .iter()
            .all(|k| self.eigenvalues.iter().any(|q| (q - k.conj()).norm() <= tol))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,winding\n");
        for (k, w) in self.eigenvalues.iter().zip(&self.windings) {
            let _ = writeln!(out, "{:.17e},{:.17e},{w}", k.re, k.im);
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn usable(v: C64) -> bool {
    v.re.is_finite() && v.im.is_finite() && v != C64::new(0.0, 0.0)
}

struct Contour<'a, F> {
    f: &'a F,
    density: f64,
    min_seg: f64,
}

impl<'a, F: Fn(C64) -> C64 + Sync> Contour<'a, F> {
    /// Unwrapped change of `arg f` from `a` to `b`, or `None` if `f`
    /// (numerically) vanishes on the segment.
    fn edge(&self, a: C64, b: C64) -> Option<f64> {
        let n = ((b - a).norm() * self.density).ceil().max(4.0) as usize;
        let mut ka = a;
        let mut fa = (self.f)(a);
        if !usable(fa) {
            return None;
        }
        let mut total = 0.0;
        for i in 1..=n {
            let kb = if i == n { b } else { a + (b - a) * (i as f64 / n as f64) };
            let fb = (self.f)(kb);
            if !usable(fb) {
                return None;
            }
            total += self.segment(ka, fa, kb, fb, 0)?;
            ka = kb;
            fa = fb;
        }
        Some(total)
    }

    fn segment(&self, a: C64, fa: C64, b: C64, fb: C64, depth: usize) -> Option<f64> {
        let m = 0.5 * (a + b);
        let fm = (self.f)(m);
        if !usable(fm) {
            return None;
        }
        let d = (fb / fa).arg();
        let (d1, d2) = ((fm / fa).arg(), (fb / fm).arg());
        // f must stay close to the chord from fa to fb, and the chord well
        // clear of the origin
        let near = fa.norm().min(fb.norm());
        let settled = d.abs() < FRAC_PI_4
            && (fb - fa).norm() <= 0.5 * near
            && (fm - 0.5 * (fa + fb)).norm() <= 0.25 * near
            && (d1 + d2 - d).abs() < 1e-9;
        if settled {
            return Some(d);
        }
        if (b - a).norm() < self.min_seg || depth > 60 {
            return None;
        }
        Some(self.segment(a, fa, m, fm, depth + 1)? + self.segment(m, fm, b, fb, depth + 1)?)
    }

    fn winding(&self, r: &Rect) -> Option<i32> {
        let c = r.corners();
        let mut total = 0.0;
        for i in 0..4 {
            total += self.edge(c[i], c[(i + 1) % 4])?;
        }
        let w = total / (2.0 * PI);
        let rounded = w.round();
        ((w - rounded).abs() < 0.25).then_some(rounded as i32)
    }

    fn min_modulus(&self, r: &Rect) -> f64 {
        let c = r.corners();
        let mut min = f64::INFINITY;
        for i in 0..4 {
            let (a, b) = (c[i], c[(i + 1) % 4]);
            let n = ((b - a).norm() * self.density * 4.0).ceil().max(64.0) as usize;
            for j in 0..n {
                min = min.min((self.f)(a + (b - a) * (j as f64 / n as f64)).norm());
            }
        }
        min
    }
}

/// Winding number of `f` around the boundary of `rect`.
pub fn winding_number<F>(f: &F, rect: &Rect, samples_per_unit: f64) -> Result<i32>
where
    F: Fn(C64) -> C64 + Sync,
{
    let contour = Contour {
        f,
        density: samples_per_unit,
        min_seg: 1e-10 * (1.0 + rect.diameter()),
    };
    contour.winding(rect).ok_or_else(|| rect.zero_on_contour())
}

fn secant<F: Fn(C64) -> C64>(f: &F, rect: &Rect) -> Option<C64> {
    let scale = rect.diameter();
    let mut k0 = rect.center();
    let mut k1 = k0 + C64::new(0.1 * scale, 0.05 * scale);
    let mut f0 = f(k0);
    let mut f1 = f(k1);
    for _ in 0..80 {
        let den = f1 - f0;
        if !usable(den) {
            return (f1 == C64::new(0.0, 0.0)).then_some(k1);
        }
        let k2 = k1 - f1 * (k1 - k0) / den;
        if !(k2.re.is_finite() && k2.im.is_finite()) || (k2 - rect.center()).norm() > 4.0 * scale {
            return None;
        }
        if (k2 - k1).norm() <= 4.0 * f64::EPSILON * k2.norm().max(1.0) {
            return Some(k2);
        }
        k0 = k1;
        f0 = f1;
        k1 = k2;
        f1 = f(k2);
    }
    None
}

struct Finder<'a, F> {
    contour: Contour<'a, F>,
    min_box: f64,
}

impl<'a, F: Fn(C64) -> C64 + Sync> Finder<'a, F> {
    fn solve(&self, rect: Rect, w: i32, out: &mut Vec<(C64, i32, bool)>) -> Result<()> {
        if w == 0 {
            return Ok(());
        }
        if w == 1 && rect.diameter() <= POLISH_DIAMETER {
            if let Some(k) = secant(self.contour.f, &rect) {
                if rect.contains(k, 1e-12 * (1.0 + k.norm())) {
                    out.push((k, 1, true));
                    return Ok(());
                }
            }
        }
        if rect.width() <= self.min_box && rect.height() <= self.min_box {
            out.push((rect.center(), w, false));
            return Ok(());
        }
        let step = PERTURBATION * self.min_box.max(0.05 * rect.width().min(rect.height()));
        let mid = rect.center();
        for attempt in 0..=MAX_PERTURBATIONS {
            let off = step * attempt as f64;
            let children = rect.split(mid.re + off, mid.im + off);
            let ws: Option<Vec<i32>> = children.iter().map(|c| self.contour.winding(c)).collect();
            let Some(ws) = ws else { continue };
            if ws.iter().sum::<i32>() != w {
                if attempt == MAX_PERTURBATIONS {
                    return Err(TevpError::WindingMismatch {
                        re_min: rect.re0,
                        re_max: rect.re1,
                        im_min: rect.im0,
                        im_max: rect.im1,
                    });
                }
                continue;
            }
            for (c, cw) in children.iter().zip(ws) {
                self.solve(*c, cw, out)?;
            }
            return Ok(());
        }
        Err(rect.zero_on_contour())
    }
}

fn snap_real<F: Fn(C64) -> C64>(f: &F, k: C64) -> C64 {
    let x = k.re;
    let h = 1e-6 * x.abs().max(1.0);
    let g = |t: f64| f(C64::new(t, 0.0)).re;
    let (ga, gb) = (g(x - h), g(x + h));
    if ga == 0.0 {
        return C64::new(x - h, 0.0);
    }
    if ga * gb < 0.0 {
        C64::new(bisect(g, x - h, x + h, ga), 0.0)
    } else {
        C64::new(x, 0.0)
    }
}

/// Zeros of `f` in `window`, assuming `f(conj k) = conj f(k)`.
pub fn find_zeros<F>(f: &F, window: &SearchWindow) -> Result<Spectrum>
where
    F: Fn(C64) -> C64 + Sync,
{
    window.validate()?;
    let left = window.re_min.max(window.exclusion_radius);
    let eta = 0.05f64.min(window.im_bound / 4.0);
    let probe_max = (0..=16)
        .map(|i| {
            let t = i as f64 / 16.0;
            f(C64::new(left + t * (window.re_max - left), t * window.im_bound)).norm()
        })
        .fold(0.0, f64::max);
    if probe_max <= IDENTICALLY_ZERO {
        return Err(TevpError::DegenerateIdenticallyZero);
    }

    let contour = Contour {
        f,
        density: window.samples_per_unit,
        min_seg: 1e-3 * window.min_box,
    };
    let n_strips = ((window.re_max - left) / STRIP_WIDTH).ceil().max(1.0) as usize;
    let width = (window.re_max - left) / n_strips as f64;
    let (lo, hi) = (-eta, window.im_bound);

    // strip boundaries, nudged off zeros of f
    let bounds: Vec<f64> = (0..=n_strips)
        .into_par_iter()
        .map(|i| {
            let x = left + width * i as f64;
            let nudge = PERTURBATION * 0.1 * width.min(1.0);
            (0..=MAX_PERTURBATIONS)
                .map(|t| x + nudge * t as f64)
                .find(|&x| contour.edge(C64::new(x, lo), C64::new(x, hi)).is_some())
                .ok_or_else(|| Rect::new(x, x, lo, hi).zero_on_contour())
        })
        .collect::<Result<_>>()?;

    let finder = Finder {
        contour,
        min_box: window.min_box,
    };
    let found: Vec<Vec<(C64, i32, bool)>> = (0..n_strips)
        .into_par_iter()
        .map(|i| {
            let mut rect = None;
            for t in 0..=MAX_PERTURBATIONS {
                let pad = PERTURBATION * 0.1 * t as f64;
                let r = Rect::new(bounds[i], bounds[i + 1], lo - pad * eta, hi + pad);
                if let Some(w) = finder.contour.winding(&r) {
                    rect = Some((r, w));
                    break;
                }
            }
            let (r, w) = rect.ok_or_else(|| Rect::new(bounds[i], bounds[i + 1], lo, hi).zero_on_contour())?;
            let mut out = Vec::new();
            finder.solve(r, w, &mut out)?;
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut roots: Vec<(C64, i32, bool)> = Vec::new();
    for (k, w, polished) in found.into_iter().flatten() {
        let mut snap = 1e-8 * k.norm().max(1.0);
        if !polished {
            snap = snap.max(window.min_box);
        }
        let k = if k.im.abs() <= snap { snap_real(f, k) } else { k };
        if k.im < 0.0 && k.im.abs() > snap {
            // mirror image of a zero in the upper half-plane
            continue;
        }
        if !window.contains(k) {
            continue;
        }
        let dup = roots.iter().any(|(q, _, _)| (q - k).norm() <= 1e-9 * k.norm().max(1.0));
        if dup {
            continue;
        }
        roots.push((k, w, polished));
        if k.im != 0.0 {
            roots.push((k.conj(), w, polished));
        }
    }
    Ok(Spectrum::from_roots(roots, *window))
}

/// Real zeros of a real function on `[re_min, re_max]` from a cubic spline
/// through `samples` equispaced values, polished by bisection.
pub fn find_real_zeros_spline<G>(g: &G, re_min: f64, re_max: f64, samples: usize) -> Result<Vec<f64>>
where
    G: Fn(f64) -> f64 + Sync,
{
    if !(re_max > re_min) || samples < 4 {
        return Err(TevpError::InvalidInput(
            "need re_max > re_min and at least 4 samples".into(),
        ));
    }
    let h = (re_max - re_min) / (samples - 1) as f64;
    let xs: Vec<f64> = (0..samples).map(|i| re_min + h * i as f64).collect();
    let ys: Vec<f64> = xs.par_iter().map(|&x| g(x)).collect();
    if ys.iter().all(|y| y.abs() <= IDENTICALLY_ZERO) {
        return Err(TevpError::DegenerateIdenticallyZero);
    }
    let spline = CubicSpline::natural(xs, ys)?;
    let mut out: Vec<f64> = Vec::new();
    for r in spline.roots() {
        let (a, b) = ((r - 0.25 * h).max(re_min), (r + 0.25 * h).min(re_max));
        let ga = g(a);
        let root = if ga == 0.0 {
            a
        } else if ga * g(b) < 0.0 {
            bisect(g, a, b, ga)
        } else {
            r
        };
        if out
            .last()
            .map_or(true, |&l| (root - l).abs() > 1e-12 * root.abs().max(1.0))
        {
            out.push(root);
        }
    }
    Ok(out)
}

/// Rouché certificate: `eps_bound` is below `min |f|` sampled on the contour.
pub fn validate_rouche<F>(f: &F, rect: &Rect, eps_bound: f64, samples_per_unit: f64) -> bool
where
    F: Fn(C64) -> C64 + Sync,
{
    contour_min_modulus(f, rect, samples_per_unit) > eps_bound
}

/// Minimum of `|f|` over a dense sampling of the boundary of `rect`.
pub fn contour_min_modulus<F>(f: &F, rect: &Rect, samples_per_unit: f64) -> f64
where
    F: Fn(C64) -> C64 + Sync,
{
    Contour {
        f,
        density: samples_per_unit,
        min_seg: 0.0,
    }
    .min_modulus(rect)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn polynomial_windings() {
        let f = |k: C64| k * k + 1.0;
        assert_eq!(winding_number(&f, &Rect::new(-2.0, 2.0, 0.5, 1.5), 8.0).unwrap(), 1);
        assert_eq!(winding_number(&f, &Rect::new(1.0, 2.0, 1.0, 2.0), 8.0).unwrap(), 0);
        assert_eq!(winding_number(&f, &Rect::new(-2.0, 2.0, -2.0, 2.0), 8.0).unwrap(), 2);
        let g = |k: C64| (k - c(0.3, 0.2)).powi(3);
        assert_eq!(winding_number(&g, &Rect::new(0.0, 1.0, 0.0, 1.0), 8.0).unwrap(), 3);
    }

    #[test]
    fn zero_on_contour_is_reported() {
        let f = |k: C64| k - c(1.0, 0.0);
        let err = winding_number(&f, &Rect::new(1.0, 2.0, -1.0, 1.0), 8.0).unwrap_err();
        assert!(matches!(err, TevpError::ZeroOnContour { .. }));
    }

    #[test]
    fn additivity_under_subdivision() {
        let f = |k: C64| (k * 1.3).sin() * (k - c(2.2, 0.7)) * (k - c(2.2, -0.7));
        let outer = Rect::new(0.1, 5.3, -1.1, 1.3);
        let w = winding_number(&f, &outer, 8.0).unwrap();
        for (x, y) in [(2.0, 0.1), (3.3, -0.4), (1.05, 0.9)] {
            let sum: i32 = outer
                .split(x, y)
                .iter()
                .map(|r| winding_number(&f, r, 8.0).unwrap())
                .sum();
            assert_eq!(sum, w);
        }
        // zeros of sin(1.3 k) at pi/1.3 and 2pi/1.3 plus the two factors
        assert_eq!(w, 4);
    }

    #[test]
    fn sine_zeros_and_conjugate_pairs() {
        let roots = [c(1.5, 0.8), c(3.25, 1.6), c(6.0, 0.01)];
        let f = move |k: C64| {
            let mut v = k.sin();
            for r in roots {
                v *= (k - r) * (k - r.conj());
            }
            v
        };
        let w = SearchWindow::new(0.0, 10.0, 2.0);
        let s = find_zeros(&f, &w).unwrap();
        let real = s.real();
        assert_eq!(real.len(), 3);
        for (j, x) in real.iter().enumerate() {
            assert!((x - PI * (j + 1) as f64).abs() < 1e-13);
        }
        for r in roots {
            assert!(s.eigenvalues.iter().any(|k| (k - r).norm() < 1e-12));
            assert!(s.eigenvalues.iter().any(|k| (k - r.conj()).norm() < 1e-12));
        }
        assert_eq!(s.len(), 9);
        assert!(s.is_conjugate_closed(0.0));
        assert!(s.polished.iter().all(|p| *p));
        assert!(s.windings.iter().all(|w| *w == 1));
        for w in s.eigenvalues.windows(2) {
            assert!(w[0].re <= w[1].re);
        }
    }

    #[test]
    fn zero_at_origin_is_excluded() {
        let f = |k: C64| k * k * (k - 2.0);
        let s = find_zeros(&f, &SearchWindow::new(0.0, 3.0, 1.0)).unwrap();
        assert_eq!(s.eigenvalues, vec![c(2.0, 0.0)]);
    }

    #[test]
    fn double_zero_has_winding_two() {
        let f = |k: C64| (k - 1.5).powi(2) * (k + 7.0);
        let s = find_zeros(&f, &SearchWindow::new(0.0, 3.0, 1.0)).unwrap();
        assert_eq!(s.count_with_multiplicity(), 2);
        assert!(s.eigenvalues.iter().all(|k| (k - 1.5).norm() < 1e-6));
    }

    #[test]
    fn zero_on_strip_boundary_is_found() {
        // the first strip boundary sits at re = 0.001 + 2 = 2.001
        let f = |k: C64| (k - 2.001) * (k - c(5.0, 1.0)) * (k - c(5.0, -1.0));
        let s = find_zeros(&f, &SearchWindow::new(0.0, 8.0, 2.0)).unwrap();
        assert_eq!(s.len(), 3);
        assert!((s.eigenvalues[0] - 2.001).norm() < 1e-14);
    }

    #[test]
    fn identically_zero_is_degenerate() {
        let f = |_: C64| c(0.0, 0.0);
        assert!(matches!(
            find_zeros(&f, &SearchWindow::new(0.0, 5.0, 1.0)),
            Err(TevpError::DegenerateIdenticallyZero)
        ));
        assert!(matches!(
            find_real_zeros_spline(&|_| 0.0, 0.0, 5.0, 50),
            Err(TevpError::DegenerateIdenticallyZero)
        ));
    }

    #[test]
    fn spline_real_zeros() {
        let g = |x: f64| (2.0 * x).sin() * (x - 3.0);
        let z = find_real_zeros_spline(&g, 0.1, 7.0, 200).unwrap();
        let want = [PI / 2.0, 3.0, PI, 3.0 * PI / 2.0, 2.0 * PI];
        assert_eq!(z.len(), want.len());
        for (a, b) in z.iter().zip(want) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn rouche_certificate() {
        let f = |k: C64| k - c(0.5, 0.5);
        let r = Rect::new(0.0, 1.0, 0.0, 1.0);
        assert!(validate_rouche(&f, &r, 0.4, 8.0));
        assert!(!validate_rouche(&f, &r, 0.6, 8.0));
        let tight = Rect::new(0.5 - 1e-9, 1.0, 0.0, 1.0);
        assert!(!validate_rouche(&f, &tight, 1e-6, 8.0));
    }

    #[test]
    fn spectrum_exports() {
        let w = SearchWindow::new(0.0, 4.0, 1.0);
        let s = Spectrum::from_roots(
            vec![(c(2.0, 0.5), 1, true), (c(1.0, 0.0), 1, true), (c(2.0, -0.5), 1, true)],
            w,
        );
        let csv = s.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "re,im,winding");
        assert!(lines[1].starts_with("1.0"));
        assert!(lines[2].contains("-5.0"));
        let back: Spectrum = serde_json::from_str(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
        assert_eq!(s.lowest_by_modulus(1), vec![c(1.0, 0.0)]);
    }

    #[test]
    fn invalid_window_is_rejected() {
        let f = |k: C64| k;
        assert!(find_zeros(&f, &SearchWindow::new(3.0, 1.0, 1.0)).is_err());
        assert!(find_zeros(&f, &SearchWindow::new(0.0, 1.0, 0.0)).is_err());
        assert!(find_zeros(&f, &SearchWindow::new(0.0, 1.0, 1.0).with_min_box(0.0)).is_err());
    }
}
