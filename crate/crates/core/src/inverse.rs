//! Recovery of `delta`, the NSBF coefficients and `n(r)` from transmission
//! eigenvalues.

use std::f64::consts::PI;
use std::fmt::Write as _;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::spherical_bessel_j_into;
use crate::charfn::{a_coefficient, b_coefficient, endpoint_constants, phi_s_series};
use crate::error::{Result, TevpError};
use crate::index::RefractiveIndexModel;
use crate::interp::Pchip;
use crate::lstsq::{self, LstsqSolution};
use crate::nsbf::{alternating, CoefficientTable};

type C64 = Complex64;

pub const DEFAULT_DELTA_MIN: f64 = 0.2;
pub const DEFAULT_DELTA_MAX: f64 = 2.5;
pub const DEFAULT_DELTA_POINTS: usize = 81;
/// Local minima of the first-pass consensus examined further.
pub const DELTA_CANDIDATES: usize = 8;
/// Rounds narrowing a well before the per-order refinement.
pub const LOCALISATION_ROUNDS: usize = 3;
/// Refined `eps1` values at or below this count as zeros.
pub const ZERO_EPS: f64 = 1e-8;
/// First-pass spacing times `max |k|` used by [`DeltaSearchOptions::for_input`].
pub const WELL_RESOLUTION: f64 = 0.1;
/// Orders tried by [`invert`] when searching for `delta`.
pub const MAX_SEARCH_ORDERS: usize = 8;
/// Crossing cells and wells compared after a short refinement.
pub const SCREENED_CANDIDATES: usize = 3;
pub const DEFAULT_REFINEMENTS: usize = 10;
pub const REFINEMENT_POINTS: usize = 21;
pub const DEFAULT_ZETA_POINTS: usize = 201;

/// Transmission eigenvalues together with `n(1)` and `n'(1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueInput {
    pub eigenvalues: Vec<C64>,
    pub n_at_1: f64,
    pub dn_at_1: f64,
}

impl EigenvalueInput {
    /// Validates the data and adds missing conjugates.
    pub fn new(eigenvalues: Vec<C64>, n_at_1: f64, dn_at_1: f64) -> Result<Self> {
        if !(n_at_1 > 0.0) || !n_at_1.is_finite() || !dn_at_1.is_finite() {
            return Err(TevpError::InvalidInput(format!(
                "need n(1) > 0 and finite n'(1), got {n_at_1}, {dn_at_1}"
            )));
        }
        let mut out: Vec<C64> = Vec::with_capacity(eigenvalues.len() * 2);
        for k in eigenvalues {
            if !(k.re.is_finite() && k.im.is_finite()) {
                return Err(TevpError::InvalidInput(format!("non-finite eigenvalue {k}")));
            }
            if k == C64::new(0.0, 0.0) {
                return Err(TevpError::InvalidInput(
                    "zero is not accepted as an input eigenvalue".into(),
                ));
            }
            out.push(k);
        }
        let tol = |k: C64| 1e-12 * k.norm();
        let missing: Vec<C64> = out
            .iter()
            .filter(|k| k.im != 0.0)
            .filter(|k| !out.iter().any(|q| (q - k.conj()).norm() <= tol(**k)))
            .map(|k| k.conj())
            .collect();
        out.extend(missing);
        Ok(EigenvalueInput {
            eigenvalues: out,
            n_at_1,
            dn_at_1,
        })
    }

    /// Number of eigenvalues, conjugates included.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn endpoint_constants(&self) -> (f64, f64) {
        endpoint_constants(self.n_at_1, self.dn_at_1)
    }

    /// One representative per conjugate pair (the one with `Im k >= 0`).
    fn representatives(&self) -> Vec<C64> {
        let mut reps: Vec<C64> = Vec::new();
        for k in &self.eigenvalues {
            let k = if k.im < 0.0 { k.conj() } else { *k };
            if !reps.iter().any(|q| (q - k).norm() <= 1e-12 * k.norm()) {
                reps.push(k);
            }
        }
        reps
    }

    /// Largest `|Re k|`.
    pub fn max_re(&self) -> f64 {
        self.eigenvalues.iter().map(|k| k.re.abs()).fold(0.0, f64::max)
    }
}

/// `delta` from the asymptotics `k_j^2 = j^2 pi^2 / (delta - 1)^2 + O(1)` of
/// the real eigenvalues `k_1 < k_2 < ...`.
///
/// Fits `k_j^2 = A j^2 + B` and returns the positive candidates among
/// `1 + pi / sqrt(A)` and `1 - pi / sqrt(A)`, the larger first.
pub fn delta_asymptotic(real_eigs: &[f64]) -> Result<Vec<f64>> {
    if real_eigs.len() < 3 {
        return Err(TevpError::DegenerateFit(format!(
            "need at least 3 real eigenvalues, got {}",
            real_eigs.len()
        )));
    }
    let mut ks: Vec<f64> = real_eigs.iter().map(|k| k.abs()).collect();
    ks.sort_by(f64::total_cmp);
    let m = ks.len();
    let a = Mat::from_fn(m, 2, |i, j| if j == 0 { ((i + 1) * (i + 1)) as f64 } else { 1.0 });
    let b: Vec<f64> = ks.iter().map(|k| k * k).collect();
    let fit = lstsq::solve(&a, &b);
    let slope = fit.x[0];
    if !(slope > 0.0) || !slope.is_finite() {
        return Err(TevpError::DegenerateFit(format!("non-positive slope {slope}")));
    }
    let d = PI / slope.sqrt();
    Ok([1.0 + d, 1.0 - d].into_iter().filter(|v| *v > 0.0).collect())
}

/// `delta ≈ count pi / R - 1` where `count` is the number of eigenvalues
/// (conjugates included) with `0 < Re k <= R`.
pub fn delta_density(all_eigs: &[C64], r_max: f64) -> Result<f64> {
    if !(r_max > 0.0) {
        return Err(TevpError::InvalidInput(format!("R must be positive, got {r_max}")));
    }
    let count = all_eigs.iter().filter(|k| k.re > 0.0 && k.re <= r_max).count();
    Ok(count as f64 * PI / r_max - 1.0)
}

/// Real linear system for the endpoint coefficients.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: Mat<f64>,
    pub rhs: Vec<f64>,
    /// Rows obtained by splitting every eigenvalue's equation into real and
    /// imaginary parts (one row for real eigenvalues), before conjugate
    /// pairs are merged.
    pub expanded_rows: usize,
    pub reduced: bool,
    pub order: usize,
}

impl LinearSystem {
    /// Maps the unknown vector back to `(g_0..g_{N-1}, s_0..s_{N-1})`.
    pub fn unpack(&self, x: &[f64], delta: f64, n0: f64, n1: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.order;
        if self.reduced {
            let s0 = x[0];
            let gamma = delta * (1.0 - n0 * n1) / (n0 * n0);
            let mut g = vec![s0 * gamma / 3.0 + gamma - 1.0];
            g.extend_from_slice(&x[1..n]);
            let mut s = vec![s0];
            s.extend_from_slice(&x[n..2 * n - 1]);
            (g, s)
        } else {
            (x[..n].to_vec(), x[n..2 * n].to_vec())
        }
    }
}

/// Builds `D0N(k_j) = 0` as a real system in the endpoint coefficients.
///
/// Full form: unknowns `g_0..g_{N-1}, s_0..s_{N-1}`. Reduced form: `g_0` is
/// eliminated through `S(0, delta)(1 - n0 n1) = n0^2 phi(0, delta)`, leaving
/// `s_0, g_1..g_{N-1}, s_1..s_{N-1}`.
pub fn assemble_system(input: &EigenvalueInput, delta: f64, order: usize, reduced: bool) -> Result<LinearSystem> {
    if order == 0 || 2 * order > crate::bessel::MAX_ORDER + 1 {
        return Err(TevpError::InvalidInput(format!("unsupported truncation order {order}")));
    }
    if !(delta > 0.0) {
        return Err(TevpError::InvalidInput(format!("delta must be positive, got {delta}")));
    }
    let unknowns = if reduced { 2 * order - 1 } else { 2 * order };
    if input.len() < unknowns {
        return Err(TevpError::DimensionError {
            needed: unknowns,
            available: input.len(),
        });
    }
    let (n0, n1) = input.endpoint_constants();
    let gamma = delta * (1.0 - n0 * n1) / (n0 * n0);
    let expanded_rows = input.eigenvalues.iter().map(|k| if k.im == 0.0 { 1 } else { 2 }).sum();

    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut j = vec![C64::new(0.0, 0.0); 2 * order];
    for k in input.representatives() {
        let z = k * delta;
        spherical_bessel_j_into(z, &mut j);
        let a = a_coefficient(n0, k);
        let bk = b_coefficient(n0, n1, k) / k;
        let mut coeffs = vec![C64::new(0.0, 0.0); unknowns];
        let mut rhs = -a * z.cos() - bk * z.sin();
        if reduced {
            coeffs[0] = bk * j[1] + a * (gamma / 3.0) * j[0];
            rhs -= a * (gamma - 1.0) * j[0];
            for n in 1..order {
                coeffs[n] = a * j[2 * n];
                coeffs[order - 1 + n] = bk * j[2 * n + 1];
            }
        } else {
            for n in 0..order {
                coeffs[n] = a * j[2 * n];
                coeffs[order + n] = bk * j[2 * n + 1];
            }
        }
        rows.push((coeffs.iter().map(|c| c.re).collect(), rhs.re));
        if k.im != 0.0 {
            rows.push((coeffs.iter().map(|c| c.im).collect(), rhs.im));
        }
    }
    let m = rows.len();
    if m < unknowns {
        return Err(TevpError::DimensionError {
            needed: unknowns,
            available: m,
        });
    }
    let matrix = Mat::from_fn(m, unknowns, |i, c| rows[i].0[c]);
    let rhs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok(LinearSystem {
        matrix,
        rhs,
        expanded_rows,
        reduced,
        order,
    })
}

fn warn_conditioning(what: &str, sol: &LstsqSolution) {
    if sol.ill_conditioned() {
        log::warn!("{what}: ill-conditioned system (condition {:.3e})", sol.condition);
    }
}

/// `Σ (-1)^n (g_n − s_n)`.
pub fn signed_sum_gap(g: &[f64], s: &[f64]) -> f64 {
    g.iter()
        .zip(s)
        .enumerate()
        .map(|(n, (a, b))| alternating(n) * (a - b))
        .sum()
}

/// `|Σ (-1)^n (g_n − s_n)|`.
pub fn coefficient_sum_gap(g: &[f64], s: &[f64]) -> f64 {
    signed_sum_gap(g, s).abs()
}

/// Signed coefficient-sum gap at `delta` from the least-squares endpoint
/// coefficients of the full (or reduced) system; `eps1` is its modulus.
pub fn signed_gap_at(input: &EigenvalueInput, delta: f64, order: usize, reduced: bool) -> Result<f64> {
    let sys = assemble_system(input, delta, order, reduced)?;
    let sol = lstsq::solve(&sys.matrix, &sys.rhs);
    let (n0, n1) = input.endpoint_constants();
    let (g, s) = sys.unpack(&sol.x, delta, n0, n1);
    Ok(signed_sum_gap(&g, &s))
}

/// `eps1` at `delta` from the least-squares endpoint coefficients of the
/// full (or reduced) system.
pub fn eps1_at(input: &EigenvalueInput, delta: f64, order: usize, reduced: bool) -> Result<f64> {
    signed_gap_at(input, delta, order, reduced).map(f64::abs)
}

/// `eps1` curve for one truncation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsCurve {
    pub order: usize,
    pub points: Vec<(f64, f64)>,
}

/// Refined zero of `eps1` for one truncation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    pub order: usize,
    pub delta: f64,
    pub eps1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSearchResult {
    pub delta_star: f64,
    pub n_star: usize,
    /// First-pass curves, one per candidate order.
    pub first_pass: Vec<EpsCurve>,
    /// Midpoint of every first-pass grid cell and the number of orders
    /// whose signed gap changes sign in it.
    pub crossings: Vec<(f64, usize)>,
    pub order_estimates: Vec<OrderEstimate>,
    /// `(delta, eps1)` at `N*`: the first pass, then one entry per refinement.
    pub eps_curve: Vec<Vec<(f64, f64)>>,
    pub iterations: usize,
}

impl DeltaSearchResult {
    /// CSV `delta,eps1` of one iteration.
    pub fn curve_csv(&self, iteration: usize) -> String {
        let mut out = String::from("delta,eps1\n");
        for (d, e) in &self.eps_curve[iteration] {
            let _ = writeln!(out, "{d:.17e},{e:.17e}");
        }
        out
    }
}

/// Options of the `delta` search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSearchOptions {
    pub grid: Vec<f64>,
    pub orders: Vec<usize>,
    pub refinements: usize,
    pub reduced: bool,
}

impl DeltaSearchOptions {
    pub fn new(orders: Vec<usize>) -> Self {
        DeltaSearchOptions {
            grid: uniform_grid(DEFAULT_DELTA_MIN, DEFAULT_DELTA_MAX, DEFAULT_DELTA_POINTS),
            orders,
            refinements: DEFAULT_REFINEMENTS,
            reduced: false,
        }
    }
}

impl DeltaSearchOptions {
    /// Default bounds with the first-pass spacing reduced to
    /// `WELL_RESOLUTION / max |k|` when that is finer than the default grid.
    pub fn for_input(input: &EigenvalueInput, orders: Vec<usize>) -> Self {
        let k_max = input.eigenvalues.iter().map(|k| k.norm()).fold(0.0, f64::max);
        let span = DEFAULT_DELTA_MAX - DEFAULT_DELTA_MIN;
        let points = ((span * k_max / WELL_RESOLUTION).ceil() as usize + 1).max(DEFAULT_DELTA_POINTS);
        DeltaSearchOptions {
            grid: uniform_grid(DEFAULT_DELTA_MIN, DEFAULT_DELTA_MAX, points),
            ..DeltaSearchOptions::new(orders)
        }
    }
}

pub fn uniform_grid(a: f64, b: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![a];
    }
    let mut g: Vec<f64> = (0..points)
        .map(|i| a + (b - a) * i as f64 / (points - 1) as f64)
        .collect();
    g[points - 1] = b;
    g
}

fn argmin(points: &[(f64, f64)]) -> usize {
    points
        .iter()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |(bi, bv), (i, p)| {
                if p.1 < bv {
                    (i, p.1)
                } else {
                    (bi, bv)
                }
            },
        )
        .0
}

/// Sign change of `v` between `i` and `i + 1` with `|v|` smaller at the cell
/// than at its outer neighbours, which rules out poles.
fn zero_crossing(v: &[f64], i: usize) -> bool {
    if !(v[i] * v[i + 1] <= 0.0) {
        return false;
    }
    let inner = v[i].abs().max(v[i + 1].abs());
    let outer = [i.checked_sub(1), Some(i + 2)]
        .into_iter()
        .flatten()
        .filter_map(|j| v.get(j))
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    inner < outer
}

fn upper_median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn local_grid(center: f64, half: f64) -> Vec<f64> {
    let lo = (center - half).max(0.25 * center);
    uniform_grid(lo, center + half, REFINEMENT_POINTS)
}

/// `delta = 1` solves every system exactly with zero coefficients when
/// `n(1) = 1` and `n'(1) = 0`: the data are then also fitted by `n ≡ 1`.
pub fn trivial_delta(n0: f64, n1: f64) -> Option<f64> {
    ((n0 - 1.0).abs() < 1e-12 && n1.abs() < 1e-12).then_some(1.0)
}

/// Index of `N*` among refined estimates sorted by order.
///
/// Orders whose refined `eps1` reached `ZERO_EPS` are compared pairwise and
/// the higher order of the consecutive pair with the closest zeros wins.
/// Without such a pair the smallest `eps1` decides.
fn pick_order(est: &[OrderEstimate]) -> usize {
    let zeros: Vec<usize> = (0..est.len()).filter(|&i| est[i].eps1 <= ZERO_EPS).collect();
    match zeros.len() {
        0 => (0..est.len())
            .min_by(|&a, &b| est[a].eps1.total_cmp(&est[b].eps1))
            .unwrap_or(0),
        1 => zeros[0],
        _ => zeros
            .windows(2)
            .min_by(|a, b| {
                let gap = |w: &[usize]| (est[w[1]].delta - est[w[0]].delta).abs();
                gap(a).total_cmp(&gap(b))
            })
            .map(|w| w[1])
            .unwrap_or(0),
    }
}

/// Grid search for `delta` and `N`.
///
/// At the true `delta` the signed gap behind `eps1` changes sign for every
/// adequate order, wherever the grid points fall. Candidates are the grid
/// cells where most orders cross zero (not a pole) and the local minima of
/// the upper median over `N` of `eps1_N`, each relative to its median on
/// the grid. Every order is refined separately at each candidate; the
/// candidate where most orders reach a zero, and these zeros agree best, is kept.
/// `N*` is the higher order of the consecutive pair whose refined zeros
/// agree best.
pub fn recover_delta(input: &EigenvalueInput, opts: &DeltaSearchOptions) -> Result<DeltaSearchResult> {
    if opts.grid.is_empty() || opts.orders.is_empty() {
        return Err(TevpError::InvalidInput(
            "delta grid and order list must be nonempty".into(),
        ));
    }
    if opts.grid.iter().any(|d| !(*d > 0.0)) {
        return Err(TevpError::InvalidInput("delta grid must be positive".into()));
    }
    let mut grid = opts.grid.clone();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut orders = opts.orders.clone();
    orders.sort_unstable();
    orders.dedup();
    let curve = |order: usize, grid: &[f64]| -> Result<Vec<(f64, f64)>> {
        grid.par_iter()
            .map(|&d| Ok((d, eps1_at(input, d, order, opts.reduced)?)))
            .collect()
    };
    let signed: Vec<Vec<f64>> = orders
        .iter()
        .map(|&order| {
            grid.par_iter()
                .map(|&d| signed_gap_at(input, d, order, opts.reduced))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let first_pass: Vec<EpsCurve> = orders
        .iter()
        .zip(&signed)
        .map(|(&order, v)| EpsCurve {
            order,
            points: grid.iter().zip(v).map(|(d, e)| (*d, e.abs())).collect(),
        })
        .collect();
    // each order's eps1 relative to its typical size on the grid
    let scales: Vec<f64> = signed
        .iter()
        .map(|v| upper_median(v.iter().map(|x| x.abs()).collect()).max(f64::MIN_POSITIVE))
        .collect();
    let median_eps = |i: usize| upper_median(signed.iter().zip(&scales).map(|(v, s)| v[i].abs() / s).collect());
    let score = |grid: &[f64]| -> Result<Vec<(f64, f64)>> {
        grid.par_iter()
            .map(|&d| {
                let eps = orders
                    .iter()
                    .zip(&scales)
                    .map(|(&o, s)| eps1_at(input, d, o, opts.reduced).map(|e| e / s))
                    .collect::<Result<Vec<f64>>>()?;
                Ok((d, upper_median(eps)))
            })
            .collect()
    };
    let spacing = if grid.len() > 1 {
        grid.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    } else {
        0.01 * grid[0]
    };
    let (n0, n1) = input.endpoint_constants();
    let trivial = |d: f64| trivial_delta(n0, n1).is_some_and(|t| (d - t).abs() <= 2.0 * spacing);

    let crossings: Vec<(f64, usize)> = (0..grid.len().saturating_sub(1))
        .map(|i| {
            let votes = signed.iter().filter(|v| zero_crossing(v, i)).count();
            (0.5 * (grid[i] + grid[i + 1]), votes)
        })
        .collect();
    let cell_score = |i: usize| median_eps(i).min(median_eps(i + 1));
    let majority = orders.len() / 2 + 1;
    let mut cells: Vec<usize> = (0..crossings.len())
        .filter(|&i| crossings[i].1 >= majority && !trivial(crossings[i].0))
        .collect();
    cells.sort_by(|&a, &b| {
        crossings[b]
            .1
            .cmp(&crossings[a].1)
            .then(cell_score(a).total_cmp(&cell_score(b)))
    });
    cells.truncate(SCREENED_CANDIDATES);
    let mut wells: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let v = median_eps(i);
            !trivial(grid[i]) && (i == 0 || v <= median_eps(i - 1)) && (i + 1 == grid.len() || v <= median_eps(i + 1))
        })
        .collect();
    wells.sort_by(|&a, &b| median_eps(a).total_cmp(&median_eps(b)));
    wells.truncate(if cells.is_empty() {
        DELTA_CANDIDATES
    } else {
        SCREENED_CANDIDATES
    });
    // localised wells from the median score
    let mut candidates: Vec<f64> = cells.iter().map(|&i| crossings[i].0).collect();
    for i in wells {
        let (mut d, mut half) = (grid[i], spacing);
        for _ in 0..LOCALISATION_ROUNDS {
            let pts = score(&local_grid(d, half))?;
            d = pts[argmin(&pts)].0;
            half /= 10.0;
        }
        if trivial(d) {
            log::info!("delta search: skipping the trivial well at delta = {d:.6}");
        } else {
            candidates.push(d);
        }
    }
    if candidates.is_empty() {
        return Err(TevpError::DegenerateFit(
            "no nontrivial minimum of eps1 on the delta grid".into(),
        ));
    }
    let refine = |center: f64| -> Result<Vec<(OrderEstimate, Vec<Vec<(f64, f64)>>)>> {
        orders
            .iter()
            .map(|&order| {
                let mut d = center;
                let mut half = spacing;
                let mut curves = Vec::with_capacity(opts.refinements);
                for _ in 0..opts.refinements {
                    let pts = curve(order, &local_grid(d, half))?;
                    d = pts[argmin(&pts)].0;
                    curves.push(pts);
                    half /= 10.0;
                }
                let eps1 = eps1_at(input, d, order, opts.reduced)?;
                Ok((OrderEstimate { order, delta: d, eps1 }, curves))
            })
            .collect()
    };
    // more orders fit at the true delta, and their zeros agree
    let agreement = |refined: &[(OrderEstimate, Vec<Vec<(f64, f64)>>)]| {
        let fits: Vec<f64> = refined
            .iter()
            .filter(|r| r.0.eps1 <= ZERO_EPS)
            .map(|r| r.0.delta)
            .collect();
        let spread =
            fits.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - fits.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        (fits.len(), if fits.is_empty() { 0.0 } else { spread })
    };
    let mut best: Option<((usize, f64), Vec<(OrderEstimate, Vec<Vec<(f64, f64)>>)>)> = None;
    for d in candidates {
        let refined = refine(d)?;
        let value = agreement(&refined);
        log::debug!(
            "delta search: candidate {d:.6}, {} orders fit, spread {:.3e}",
            value.0,
            value.1
        );
        if best
            .as_ref()
            .is_none_or(|b| value.0 > b.0 .0 || (value.0 == b.0 .0 && value.1 < b.0 .1))
        {
            best = Some((value, refined));
        }
    }
    let refined = best.map(|b| b.1).unwrap_or_default();
    let star = pick_order(&refined.iter().map(|r| r.0.clone()).collect::<Vec<_>>());
    let (est, curves) = &refined[star];
    let mut eps_curve = vec![first_pass[star].points.clone()];
    eps_curve.extend(curves.iter().cloned());
    Ok(DeltaSearchResult {
        delta_star: est.delta,
        n_star: est.order,
        first_pass,
        crossings,
        order_estimates: refined.iter().map(|r| r.0.clone()).collect(),
        eps_curve,
        iterations: opts.refinements,
    })
}

/// Endpoint data recovered from the reduced system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointSolution {
    pub g: Vec<f64>,
    pub s: Vec<f64>,
    pub n_at_0: f64,
    pub residual: f64,
    pub condition: f64,
}

/// `g_n(delta)`, `s_n(delta)` from the reduced system, `g_0` from the
/// `k = 0` relation and `n(0)` from `S(0, delta) = n0 n(0)^{1/4}`.
pub fn recover_endpoint(input: &EigenvalueInput, delta: f64, order: usize) -> Result<EndpointSolution> {
    let sys = assemble_system(input, delta, order, true)?;
    let sol = lstsq::solve(&sys.matrix, &sys.rhs);
    warn_conditioning("endpoint system", &sol);
    let (n0, n1) = input.endpoint_constants();
    let (g, s) = sys.unpack(&sol.x, delta, n0, n1);
    let s0_delta = delta * (1.0 + s[0] / 3.0);
    Ok(EndpointSolution {
        n_at_0: (s0_delta / n0).powi(4),
        g,
        s,
        residual: sol.residual,
        condition: sol.condition,
    })
}

/// Real evaluation points for the interior system: equispaced on
/// `[0.5, max |Re k_j| + pi / delta]`, at least `4N` of them and no more than
/// `pi / (2 delta)` apart.
pub fn default_k_eval(input: &EigenvalueInput, delta: f64, order: usize) -> Vec<f64> {
    let k_max = (input.max_re() + PI / delta).max(1.0);
    let spaced = ((k_max - 0.5) * 2.0 * delta / PI).ceil() as usize + 1;
    uniform_grid(0.5, k_max, (4 * order).max(spaced))
}

/// Solves, at every `zeta` of `zeta_grid`, the least-squares system from
/// `T_N(k, zeta) = phi_N(k, delta) S_N(k, zeta) - phi_N(k, zeta) S_N(k, delta)`
/// at the points `k_eval` for `t_n(zeta)`, `g_n(zeta)`, `s_n(zeta)`.
pub fn recover_interior(
    endpoint_g: &[f64],
    endpoint_s: &[f64],
    delta: f64,
    k_eval: &[f64],
    zeta_grid: &[f64],
) -> Result<CoefficientTable> {
    let order = endpoint_g.len();
    if order == 0 || endpoint_s.len() != order {
        return Err(TevpError::InvalidInput(
            "endpoint coefficient arrays must match and be nonempty".into(),
        ));
    }
    if k_eval.len() < 3 * order {
        return Err(TevpError::DimensionError {
            needed: 3 * order,
            available: k_eval.len(),
        });
    }
    if zeta_grid.iter().any(|z| !(*z >= 0.0 && *z <= delta)) {
        return Err(TevpError::InvalidInput("zeta grid must lie in [0, delta]".into()));
    }
    let at_delta: Vec<(f64, f64, f64)> = k_eval
        .iter()
        .map(|&k| {
            let (phi, s) = phi_s_series(endpoint_g, endpoint_s, C64::new(k, 0.0), delta);
            (k, phi.re, s.re)
        })
        .collect();

    let solved: Vec<(Vec<f64>, Vec<f64>, Vec<f64>, f64)> = zeta_grid
        .par_iter()
        .map(|&zeta| {
            if zeta == 0.0 {
                return (vec![0.0; order], vec![0.0; order], vec![0.0; order], 1.0);
            }
            let m = at_delta.len();
            let mut a = Mat::<f64>::zeros(m, 3 * order);
            let mut b = vec![0.0; m];
            let mut jl = vec![C64::new(0.0, 0.0); 2 * order];
            let mut jr = vec![C64::new(0.0, 0.0); 2 * order];
            for (row, &(k, phid, sd)) in at_delta.iter().enumerate() {
                spherical_bessel_j_into(C64::new(k * zeta, 0.0), &mut jl);
                spherical_bessel_j_into(C64::new(k * (delta - zeta), 0.0), &mut jr);
                b[row] = (k * (zeta - delta)).sin() / k - phid * (k * zeta).sin() / k + sd * (k * zeta).cos();
                for n in 0..order {
                    a[(row, n)] = -jr[2 * n + 1].re / k;
                    a[(row, order + n)] = -sd * jl[2 * n].re;
                    a[(row, 2 * order + n)] = phid * jl[2 * n + 1].re / k;
                }
            }
            let sol = lstsq::solve(&a, &b);
            let x = sol.x;
            (
                x[order..2 * order].to_vec(),
                x[2 * order..].to_vec(),
                x[..order].to_vec(),
                sol.condition,
            )
        })
        .collect();
    let worst = solved.iter().map(|r| r.3).fold(0.0, f64::max);
    if !(worst <= lstsq::ILL_CONDITIONED) {
        // at zeta = delta the t-block vanishes identically
        log::info!("interior systems: ill-conditioned (worst condition {worst:.3e})");
    }
    let mut g = vec![vec![0.0; zeta_grid.len()]; order];
    let mut s = g.clone();
    let mut t = g.clone();
    for (i, (gi, si, ti, _)) in solved.iter().enumerate() {
        for n in 0..order {
            g[n][i] = gi[n];
            s[n][i] = si[n];
            t[n][i] = ti[n];
        }
    }
    let f_values = g[0].iter().map(|v| v + 1.0).collect();
    Ok(CoefficientTable {
        zeta: zeta_grid.to_vec(),
        g,
        s,
        t: Some(t),
        f_values,
    })
}

/// Reconstructed profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    /// Sorted increasingly.
    pub r: Vec<f64>,
    pub n: Vec<f64>,
    /// Whether `r(zeta)` was strictly decreasing.
    pub monotone: bool,
}

/// `n^{1/4}(r(zeta)) = n0 (g_0 + 1) + n1 (s_0/3 + 1) zeta` and
/// `r(zeta) = 1 - (s_0 + 3) zeta / (3 n0^2 (g_0 + 1) + n0 n1 (s_0 + 3) zeta)`.
pub fn reconstruct_index(table: &CoefficientTable, n_at_1: f64, dn_at_1: f64) -> Reconstruction {
    let (n0, n1) = endpoint_constants(n_at_1, dn_at_1);
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(table.zeta.len());
    for (i, &z) in table.zeta.iter().enumerate() {
        if z == 0.0 {
            pts.push((1.0, n_at_1));
            continue;
        }
        let g0 = table.g[0][i];
        let s0 = table.s[0][i];
        let q = n0 * (g0 + 1.0) + n1 * (s0 / 3.0 + 1.0) * z;
        let r = if n1 == 0.0 {
            1.0 - (s0 + 3.0) * z / (3.0 * n0 * n0 * (g0 + 1.0))
        } else {
            1.0 - (s0 + 3.0) * z / (3.0 * n0 * n0 * (g0 + 1.0) + n0 * n1 * (s0 + 3.0) * z)
        };
        pts.push((r, q.powi(4)));
    }
    let monotone = pts.windows(2).all(|w| w[1].0 < w[0].0);
    if !monotone {
        log::warn!("reconstructed r(zeta) is not decreasing");
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    Reconstruction {
        r: pts.iter().map(|p| p.0).collect(),
        n: pts.iter().map(|p| p.1).collect(),
        monotone,
    }
}

/// Options of the full inversion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseOptions {
    /// Known `delta`; searched for when absent.
    pub delta: Option<f64>,
    /// Candidate truncation orders; orders with too few equations are skipped.
    pub orders: Vec<usize>,
    /// First-pass `delta` grid; adapted to the data when absent.
    pub delta_grid: Option<Vec<f64>>,
    pub refinements: usize,
    pub zeta_points: usize,
    /// Evaluation points of the interior systems; see `default_k_eval`.
    pub k_eval: Option<Vec<f64>>,
}

impl Default for InverseOptions {
    fn default() -> Self {
        InverseOptions {
            delta: None,
            orders: (1..=40).collect(),
            delta_grid: None,
            refinements: DEFAULT_REFINEMENTS,
            zeta_points: DEFAULT_ZETA_POINTS,
            k_eval: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseSolution {
    pub delta: f64,
    pub order: usize,
    pub endpoint_g: Vec<f64>,
    pub endpoint_s: Vec<f64>,
    pub n_at_0: f64,
    pub n_at_1: f64,
    pub dn_at_1: f64,
    pub zeta_grid: Vec<f64>,
    #[serde(skip)]
    pub interior: Option<CoefficientTable>,
    pub r_samples: Vec<f64>,
    pub n_samples: Vec<f64>,
    pub monotone: bool,
    pub endpoint_condition: f64,
    pub delta_search: Option<DeltaSearchResult>,
}

impl InverseSolution {
    /// CSV `r,n` of the reconstruction.
    pub fn reconstruction_csv(&self) -> String {
        let mut out = String::from("r,n\n");
        for (r, n) in self.r_samples.iter().zip(&self.n_samples) {
            let _ = writeln!(out, "{r:.17e},{n:.17e}");
        }
        out
    }

    /// Reconstructed `n` interpolated at `r` (clamped to the sampled range).
    pub fn interpolant(&self) -> Result<Pchip> {
        let mut r: Vec<f64> = Vec::with_capacity(self.r_samples.len());
        let mut n: Vec<f64> = Vec::with_capacity(self.r_samples.len());
        for (ri, ni) in self.r_samples.iter().zip(&self.n_samples) {
            if r.last().map_or(true, |l| *ri > *l) {
                r.push(*ri);
                n.push(*ni);
            }
        }
        Pchip::new(r, n)
    }
}

/// Order minimising `eps1(delta)` of the full system among `orders`.
pub fn select_order(input: &EigenvalueInput, delta: f64, orders: &[usize]) -> Result<usize> {
    let usable: Vec<usize> = orders.iter().copied().filter(|n| 2 * n <= input.len()).collect();
    if usable.is_empty() {
        return Err(TevpError::DimensionError {
            needed: 2 * orders.iter().copied().min().unwrap_or(1),
            available: input.len(),
        });
    }
    let eps: Vec<f64> = usable
        .par_iter()
        .map(|&n| eps1_at(input, delta, n, false))
        .collect::<Result<_>>()?;
    let i = eps
        .iter()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |(bi, bv), (i, v)| if *v < bv { (i, *v) } else { (bi, bv) },
        )
        .0;
    Ok(usable[i])
}

/// At most `count` entries of `v`, evenly spread and keeping both ends.
pub fn spread(v: &[usize], count: usize) -> Vec<usize> {
    if v.len() <= count || count < 2 {
        return v.to_vec();
    }
    let mut out: Vec<usize> = (0..count)
        .map(|i| v[(i * (v.len() - 1) + (count - 1) / 2) / (count - 1)])
        .collect();
    out.dedup();
    out
}

/// Full inversion: `delta` (if unknown), endpoint coefficients, interior
/// coefficients and the reconstructed `n(r)`.
pub fn invert(input: &EigenvalueInput, opts: &InverseOptions) -> Result<InverseSolution> {
    let (delta, order, search) = match opts.delta {
        Some(d) => (d, select_order(input, d, &opts.orders)?, None),
        None => {
            let orders: Vec<usize> = opts.orders.iter().copied().filter(|n| 2 * n <= input.len()).collect();
            if orders.is_empty() {
                return Err(TevpError::DimensionError {
                    needed: 2,
                    available: input.len(),
                });
            }
            let mut search = DeltaSearchOptions::for_input(input, spread(&orders, MAX_SEARCH_ORDERS));
            search.refinements = opts.refinements;
            if let Some(grid) = &opts.delta_grid {
                search.grid = grid.clone();
            }
            let res = recover_delta(input, &search)?;
            (res.delta_star, res.n_star, Some(res))
        }
    };
    invert_with(input, delta, order, opts, search)
}

/// Inversion at a fixed `delta` and truncation order.
pub fn invert_with(
    input: &EigenvalueInput,
    delta: f64,
    order: usize,
    opts: &InverseOptions,
    delta_search: Option<DeltaSearchResult>,
) -> Result<InverseSolution> {
    let end = recover_endpoint(input, delta, order)?;
    let k_eval = opts
        .k_eval
        .clone()
        .unwrap_or_else(|| default_k_eval(input, delta, order));
    let zeta_grid = uniform_grid(0.0, delta, opts.zeta_points.max(2));
    let table = recover_interior(&end.g, &end.s, delta, &k_eval, &zeta_grid)?;
    let rec = reconstruct_index(&table, input.n_at_1, input.dn_at_1);
    Ok(InverseSolution {
        delta,
        order,
        endpoint_g: end.g,
        endpoint_s: end.s,
        n_at_0: end.n_at_0,
        n_at_1: input.n_at_1,
        dn_at_1: input.dn_at_1,
        zeta_grid,
        interior: Some(table),
        r_samples: rec.r,
        n_samples: rec.n,
        monotone: rec.monotone,
        endpoint_condition: end.condition,
        delta_search,
    })
}

/// Max-norm error of the reconstruction against `truth` on `points`
/// equispaced values of `r` in `[0, 1]`. The reconstruction is interpolated
/// monotonically and held constant outside its sampled range.
pub fn reconstruction_error(sol: &InverseSolution, truth: &RefractiveIndexModel, points: usize) -> Result<f64> {
    let interp = sol.interpolant()?;
    let (lo, hi) = (interp.knots()[0], *interp.knots().last().unwrap());
    Ok(uniform_grid(0.0, 1.0, points.max(2))
        .into_iter()
        .map(|r| (interp.eval(r.clamp(lo, hi)) - truth.n(r)).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfn::CharacteristicContext;
    use crate::index::NamedIndex;
    use crate::liouville::liouville_transform;
    use crate::nsbf::select_truncation;
    use crate::roots::{find_zeros, SearchWindow};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn direct(id: NamedIndex, n_max: usize) -> (CharacteristicContext, RefractiveIndexModel) {
        let m = RefractiveIndexModel::named(id);
        let d = liouville_transform(&m, 3001).unwrap();
        let (_, _, t) = select_truncation(&d, n_max).unwrap();
        (
            CharacteristicContext::from_table(t, m.n_at_1(), m.dn_at_1()).unwrap(),
            m,
        )
    }

    fn ex1_lowest(count: usize) -> (CharacteristicContext, EigenvalueInput) {
        let (ctx, m) = direct(NamedIndex::Ex1, 40);
        let s = find_zeros(&|k| ctx.eval_d0n(k), &SearchWindow::new(0.0, 40.0, 7.0)).unwrap();
        let eigs = s.lowest_by_modulus(count);
        (ctx, EigenvalueInput::new(eigs, m.n_at_1(), m.dn_at_1()).unwrap())
    }

    #[test]
    fn input_is_conjugate_completed() {
        let inp = EigenvalueInput::new(vec![c(1.0, 2.0), c(3.0, 0.0), c(4.0, -1.0), c(4.0, 1.0)], 1.0, 0.0).unwrap();
        assert_eq!(inp.len(), 5);
        assert!(inp.eigenvalues.contains(&c(1.0, -2.0)));
        assert!(EigenvalueInput::new(vec![c(0.0, 0.0)], 1.0, 0.0).is_err());
        assert!(EigenvalueInput::new(vec![c(1.0, 0.0)], -1.0, 0.0).is_err());
    }

    #[test]
    fn row_counts() {
        let mut eigs = vec![c(2.0, 0.0), c(3.0, 0.0), c(5.0, 0.0), c(7.0, 0.0)];
        for k in [c(1.0, 1.0), c(4.0, 2.0), c(6.0, 0.5)] {
            eigs.push(k);
            eigs.push(k.conj());
        }
        let inp = EigenvalueInput::new(eigs, 1.0, 0.0).unwrap();
        let sys = assemble_system(&inp, 1.2, 3, false).unwrap();
        assert_eq!(sys.expanded_rows, 16);
        assert_eq!(sys.matrix.nrows(), 10);
        assert_eq!(sys.matrix.ncols(), 6);
        let red = assemble_system(&inp, 1.2, 3, true).unwrap();
        assert_eq!(red.matrix.ncols(), 5);
        assert!(matches!(
            assemble_system(&inp, 1.2, 6, false),
            Err(TevpError::DimensionError {
                needed: 12,
                available: 10
            })
        ));
    }

    #[test]
    fn zero_potential_has_zero_coefficients() {
        // n = 1: delta = 1 and D0 vanishes identically, so any k is a root
        let eigs: Vec<C64> = (1..=6).map(|j| c(1.3 * j as f64, 0.4)).collect();
        let inp = EigenvalueInput::new(eigs, 1.0, 0.0).unwrap();
        for order in 1..=4 {
            let sys = assemble_system(&inp, 1.0, order, false).unwrap();
            let norm = sys.rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(norm < 1e-12, "order {order}: {norm}");
        }
        let end = recover_endpoint(&inp, 1.0, 4).unwrap();
        assert!(end.g.iter().chain(&end.s).all(|v| v.abs() < 1e-10), "{end:?}");
        assert!((end.n_at_0 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reduced_system_reproduces_direct_coefficients() {
        let (ctx, inp) = ex1_lowest(10);
        let end = recover_endpoint(&inp, 3f64.ln(), 5).unwrap();
        for n in 0..5 {
            assert!(
                (end.g[n] - ctx.endpoint_g()[n]).abs() < 1e-6,
                "g{n}: {} vs {}",
                end.g[n],
                ctx.endpoint_g()[n]
            );
            assert!((end.s[n] - ctx.endpoint_s()[n]).abs() < 1e-6, "s{n}");
        }
        assert!((end.n_at_0 - 16.0 / 9.0).abs() < 1e-4);
        // k = 0 relation
        let (n0, n1) = inp.endpoint_constants();
        let s0d = 3f64.ln() * (1.0 + end.s[0] / 3.0);
        let phi0 = 1.0 + end.g[0];
        assert!((s0d * (1.0 - n0 * n1) - n0 * n0 * phi0).abs() < 1e-6 * (1.0 + s0d));
    }

    #[test]
    fn asymptotic_delta_from_synthetic_sequence() {
        let ks: Vec<f64> = (1..=8).map(|j| j as f64 * PI / 0.5).collect();
        let d = delta_asymptotic(&ks).unwrap();
        assert!((d[0] - 1.5).abs() < 1e-12);
        assert!((d[1] - 0.5).abs() < 1e-12);
        assert!(delta_asymptotic(&[1.0, 2.0]).is_err());
        assert!(delta_asymptotic(&[3.0, 2.0, 1.0, 0.5]).is_ok());
    }

    #[test]
    fn density_delta_from_uniform_roots() {
        let delta = 1.3;
        let r = 200.0;
        let count = ((delta + 1.0) * r / PI).round() as usize;
        let h = r / count as f64;
        let eigs: Vec<C64> = (1..=count).map(|j| c(h * j as f64, 0.0)).collect();
        let d = delta_density(&eigs, r).unwrap();
        assert!((d - delta).abs() < PI / r);
    }

    #[test]
    fn uniform_grid_hits_endpoints() {
        let d = std::f64::consts::FRAC_PI_4;
        for n in [2, 81, 201, 1000] {
            let g = uniform_grid(0.0, d, n);
            assert_eq!((g[0], g[n - 1], g.len()), (0.0, d, n));
        }
    }

    #[test]
    fn crossings_exclude_poles() {
        let zero = [3.0, 1.0, -1.0, -3.0];
        let pole = [1.0, 5.0, -5.0, -1.0];
        assert!(zero_crossing(&zero, 1));
        assert!(!zero_crossing(&pole, 1));
        assert!(!zero_crossing(&zero, 0));
        assert!(zero_crossing(&[0.5, -0.1, -2.0], 0));
    }

    #[test]
    fn spread_keeps_ends() {
        let v: Vec<usize> = (1..=40).collect();
        let s = spread(&v, 8);
        assert_eq!(s.len(), 8);
        assert_eq!((s[0], s[7]), (1, 40));
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(spread(&[2, 3], 8), vec![2, 3]);
    }

    #[test]
    fn order_choice() {
        let e = |order, delta, eps1| OrderEstimate { order, delta, eps1 };
        let est = [e(3, 1.1, 1e-14), e(4, 1.2, 1e-15), e(5, 1.2001, 1e-13), e(6, 1.5, 1e-3)];
        assert_eq!(pick_order(&est), 2);
        let stuck = [e(2, 1.0, 1e-3), e(3, 1.0, 5e-4), e(4, 1.0, 2e-3)];
        assert_eq!(pick_order(&stuck), 1);
        assert_eq!(pick_order(&[e(2, 1.0, 1e-3), e(3, 1.3, 1e-12)]), 1);
    }

    #[test]
    fn trivial_well_only_for_unit_endpoint() {
        assert_eq!(trivial_delta(1.0, 0.0), Some(1.0));
        assert_eq!(trivial_delta(1.2, 0.0), None);
        assert_eq!(trivial_delta(1.0, 0.1), None);
    }

    #[test]
    fn delta_search_example_one() {
        let (_, inp) = ex1_lowest(10);
        let res = recover_delta(&inp, &DeltaSearchOptions::new(vec![3, 4, 5])).unwrap();
        assert_eq!(res.n_star, 5);
        assert!(
            (res.delta_star - 3f64.ln()).abs() < 1e-8,
            "{}",
            res.delta_star - 3f64.ln()
        );
        assert_eq!(res.eps_curve.len(), 1 + DEFAULT_REFINEMENTS);
        assert!(res.curve_csv(0).starts_with("delta,eps1\n"));
    }

    #[test]
    fn interior_recovery_example_one() {
        let (ctx, _) = ex1_lowest(10);
        let delta = 3f64.ln();
        let g: Vec<f64> = ctx.endpoint_g()[..5].to_vec();
        let s: Vec<f64> = ctx.endpoint_s()[..5].to_vec();
        let k_eval = uniform_grid(0.5, 20.0 + PI / delta, 20);
        let grid = uniform_grid(0.0, delta, 50);
        let tab = recover_interior(&g, &s, delta, &k_eval, &grid).unwrap();
        for (i, z) in grid.iter().enumerate() {
            let want = (z / 2.0).cosh() - 1.0;
            assert!((tab.g[0][i] - want).abs() < 1e-4, "zeta={z}: {} vs {want}", tab.g[0][i]);
        }
        let last = grid.len() - 1;
        for n in 0..5 {
            assert!((tab.g[n][last] - g[n]).abs() < 1e-8);
            assert!((tab.s[n][last] - s[n]).abs() < 1e-8);
        }
    }

    #[test]
    fn reconstruction_of_constant_one() {
        let grid = uniform_grid(0.0, 1.0, 11);
        let zeros = vec![vec![0.0; 11]; 2];
        let table = CoefficientTable {
            zeta: grid.clone(),
            g: zeros.clone(),
            s: zeros,
            t: None,
            f_values: vec![1.0; 11],
        };
        let rec = reconstruct_index(&table, 1.0, 0.0);
        assert!(rec.monotone);
        assert!(rec.n.iter().all(|v| (*v - 1.0).abs() < 1e-15));
        for (r, z) in rec.r.iter().zip(grid.iter().rev()) {
            assert!((r - (1.0 - z)).abs() < 1e-15);
        }
    }

    #[test]
    fn round_trip_example_one() {
        let (_, inp) = ex1_lowest(10);
        let mut opts = InverseOptions::default();
        opts.delta = Some(3f64.ln());
        let sol = invert(&inp, &opts).unwrap();
        let m = RefractiveIndexModel::named(NamedIndex::Ex1);
        let err = reconstruction_error(&sol, &m, 200).unwrap();
        assert!(err < 1e-2, "error {err}");
        assert_eq!(sol.n_samples.last().copied(), Some(1.0));
        assert!(sol.monotone);
    }

    #[test]
    fn direct_coefficients_solve_the_full_system() {
        let (ctx, inp) = ex1_lowest(12);
        let sys = assemble_system(&inp, ctx.delta(), 6, false).unwrap();
        let mut x = ctx.endpoint_g().to_vec();
        x.extend_from_slice(ctx.endpoint_s());
        let r = lstsq::residual(&sys.matrix, &x, &sys.rhs);
        assert!(r < 1e-10, "{r}");
    }
}
