//! Least squares through a truncated singular value decomposition.

use faer::Mat;

/// Relative singular-value cutoff.
pub const RCOND: f64 = 1e-12;
/// Condition numbers above this are reported as ill-conditioned.
pub const ILL_CONDITIONED: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct LstsqSolution {
    pub x: Vec<f64>,
    /// `||A x - b||_2`.
    pub residual: f64,
    /// `sigma_max / sigma_min` over all singular values.
    pub condition: f64,
    /// Singular values kept.
    pub rank: usize,
}

impl LstsqSolution {
    pub fn ill_conditioned(&self) -> bool {
        !(self.condition <= ILL_CONDITIONED)
    }
}

/// Minimum-norm least-squares solution of `A x = b`, discarding singular
/// values below `RCOND * sigma_max`.
pub fn solve(a: &Mat<f64>, b: &[f64]) -> LstsqSolution {
    let (m, n) = (a.nrows(), a.ncols());
    assert_eq!(b.len(), m, "right-hand side length");
    let fallback = |x: Vec<f64>| LstsqSolution {
        residual: residual(a, &x, b),
        x,
        condition: f64::INFINITY,
        rank: 0,
    };
    if m == 0 || n == 0 || !a.is_all_finite() {
        return fallback(vec![0.0; n]);
    }
    let Ok(svd) = a.thin_svd() else {
        return fallback(vec![0.0; n]);
    };
    let (u, sv, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let count = sv.nrows();
    let smax = (0..count).map(|i| sv[i]).fold(0.0, f64::max);
    let smin = if m >= n {
        (0..count).map(|i| sv[i]).fold(f64::INFINITY, f64::min)
    } else {
        0.0
    };
    let cut = RCOND * smax;
    let mut x = vec![0.0; n];
    let mut rank = 0;
    for i in 0..count {
        let s = sv[i];
        if s > cut && s > 0.0 {
            rank += 1;
            let coef = (0..m).map(|r| u[(r, i)] * b[r]).sum::<f64>() / s;
            for (j, xj) in x.iter_mut().enumerate() {
                *xj += v[(j, i)] * coef;
            }
        }
    }
    LstsqSolution {
        residual: residual(a, &x, b),
        x,
        condition: if smin > 0.0 { smax / smin } else { f64::INFINITY },
        rank,
    }
}

/// `||A x - b||_2`.
pub fn residual(a: &Mat<f64>, x: &[f64], b: &[f64]) -> f64 {
    (0..a.nrows())
        .map(|i| {
            let r: f64 = (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum::<f64>() - b[i];
            r * r
        })
        .sum::<f64>()
        .sqrt()
}
