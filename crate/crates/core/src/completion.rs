//! Spectrum completion: rebuild `D_{0,N}` from a few eigenvalues and locate
//! the rest of its zeros.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::charfn::{CharacteristicContext, DEFAULT_STRIP_BOUND};
use crate::error::Result;
use crate::inverse::{
    invert, recover_delta, recover_endpoint, select_order, spread, DeltaSearchOptions, DeltaSearchResult,
    EigenvalueInput, EndpointSolution, InverseOptions, InverseSolution, MAX_SEARCH_ORDERS,
};
use crate::roots::{find_zeros, SearchWindow, Spectrum};

/// Right end of the default window as a multiple of `max |Re k|` of the input.
pub const WINDOW_FACTOR: f64 = 3.0;
/// Default strip bound as a multiple of `max |Im k|` of the input.
pub const STRIP_FACTOR: f64 = 1.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionResult {
    pub given: Vec<C64>,
    pub completed: Spectrum,
    pub delta_used: f64,
    pub n_used: usize,
    pub endpoint: EndpointSolution,
    pub delta_search: Option<DeltaSearchResult>,
    /// For every given eigenvalue, the index of the nearest completed zero.
    pub matches: Vec<Option<usize>>,
}

impl CompletionResult {
    /// Largest distance from a given eigenvalue to its completed counterpart.
    pub fn max_given_mismatch(&self) -> f64 {
        self.given
            .iter()
            .zip(&self.matches)
            .map(|(k, m)| m.map_or(f64::INFINITY, |i| (self.completed.eigenvalues[i] - k).norm()))
            .fold(0.0, f64::max)
    }

    /// Whether entry `i` of the completed spectrum re-locates an input.
    pub fn is_given(&self, i: usize) -> bool {
        self.matches.contains(&Some(i))
    }

    /// Completed zeros that are not counterparts of inputs.
    pub fn new_eigenvalues(&self) -> Vec<C64> {
        (0..self.completed.len())
            .filter(|i| !self.is_given(*i))
            .map(|i| self.completed.eigenvalues[i])
            .collect()
    }

    /// CSV `re,im,winding,given`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,winding,given\n");
        for (i, (k, w)) in self
            .completed
            .eigenvalues
            .iter()
            .zip(&self.completed.windings)
            .enumerate()
        {
            let _ = writeln!(out, "{:.17e},{:.17e},{w},{}", k.re, k.im, self.is_given(i));
        }
        out
    }
}

/// `Re k` in `(0, 3 max |Re k|]`, `|Im k| <= max(C, 1.25 max |Im k|)`.
pub fn default_window(input: &EigenvalueInput) -> SearchWindow {
    let im = input.eigenvalues.iter().map(|k| k.im.abs()).fold(0.0, f64::max);
    SearchWindow::new(
        0.0,
        WINDOW_FACTOR * input.max_re(),
        DEFAULT_STRIP_BOUND.max(STRIP_FACTOR * im),
    )
}

pub fn complete_spectrum(
    input: &EigenvalueInput,
    delta: Option<f64>,
    window: Option<SearchWindow>,
) -> Result<CompletionResult> {
    let opts = InverseOptions {
        delta,
        ..InverseOptions::default()
    };
    complete_spectrum_with(input, &opts, window)
}

/// Completion with `delta` and candidate orders taken from `opts`.
pub fn complete_spectrum_with(
    input: &EigenvalueInput,
    opts: &InverseOptions,
    window: Option<SearchWindow>,
) -> Result<CompletionResult> {
    let (delta, order, search) = match opts.delta {
        Some(d) => (d, select_order(input, d, &opts.orders)?, None),
        None => {
            let orders: Vec<usize> = opts.orders.iter().copied().filter(|n| 2 * n <= input.len()).collect();
            let mut search = DeltaSearchOptions::for_input(input, spread(&orders, MAX_SEARCH_ORDERS));
            search.refinements = opts.refinements;
            if let Some(grid) = &opts.delta_grid {
                search.grid = grid.clone();
            }
            let res = recover_delta(input, &search)?;
            (res.delta_star, res.n_star, Some(res))
        }
    };
    let endpoint = recover_endpoint(input, delta, order)?;
    let window = window.unwrap_or_else(|| default_window(input));
    let ctx = CharacteristicContext::from_endpoint(
        delta,
        endpoint.g.clone(),
        endpoint.s.clone(),
        input.n_at_1,
        input.dn_at_1,
    )?
    .with_strip_bound(window.im_bound);
    let completed = find_zeros(&|k| ctx.eval_d0n(k), &window)?;
    let matches = input
        .eigenvalues
        .iter()
        .map(|k| {
            completed
                .eigenvalues
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - k).norm().total_cmp(&(b.1 - k).norm()))
                .map(|(i, _)| i)
        })
        .collect();
    Ok(CompletionResult {
        given: input.eigenvalues.clone(),
        completed,
        delta_used: delta,
        n_used: order,
        endpoint,
        delta_search: search,
        matches,
    })
}

/// Input extended by the `extra_count` newly found zeros of smallest modulus.
pub fn extended_input(
    input: &EigenvalueInput,
    result: &CompletionResult,
    extra_count: usize,
) -> Result<EigenvalueInput> {
    let mut extra = result.new_eigenvalues();
    extra.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.im.total_cmp(&b.im)));
    extra.truncate(extra_count);
    let mut eigs = input.eigenvalues.clone();
    eigs.extend(extra);
    EigenvalueInput::new(eigs, input.n_at_1, input.dn_at_1)
}

/// Completes the spectrum, appends `extra_count` new eigenvalues (lowest
/// `|k|` first) to the input and inverts the enlarged data at the `delta`
/// used for the completion.
pub fn complete_then_invert(
    input: &EigenvalueInput,
    opts: &InverseOptions,
    window: Option<SearchWindow>,
    extra_count: usize,
) -> Result<(CompletionResult, InverseSolution)> {
    let result = complete_spectrum_with(input, opts, window)?;
    let solution = if extra_count == 0 {
        invert(input, opts)?
    } else {
        let fixed = InverseOptions {
            delta: Some(result.delta_used),
            ..opts.clone()
        };
        let mut sol = invert(&extended_input(input, &result, extra_count)?, &fixed)?;
        sol.delta_search = result.delta_search.clone();
        sol
    };
    Ok((result, solution))
}
