//! One-dimensional interpolants: shape-preserving (PCHIP) Hermite cubics and
//! natural cubic splines.

use crate::error::{Result, TevpError};

fn locate(xs: &[f64], x: f64) -> usize {
    let n = xs.len();
    if x <= xs[0] {
        return 0;
    }
    if x >= xs[n - 1] {
        return n - 2;
    }
    match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(n - 2),
        Err(i) => i - 1,
    }
}

fn check_knots(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(TevpError::InvalidInput(format!(
            "interpolation knots ({}) and values ({}) differ in length",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(TevpError::InvalidInput("need at least two knots".into()));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(TevpError::InvalidInput("knots must be strictly increasing".into()));
    }
    if ys.iter().any(|v| !v.is_finite()) {
        return Err(TevpError::InvalidInput("non-finite interpolation value".into()));
    }
    Ok(())
}

/// Monotone piecewise cubic Hermite interpolant (Fritsch–Carlson slopes).
#[derive(Debug, Clone)]
pub struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        check_knots(&xs, &ys)?;
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let del: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = del[0];
            d[1] = del[0];
        } else {
            for i in 1..n - 1 {
                if del[i - 1] * del[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
                }
            }
            d[0] = end_slope(h[0], h[1], del[0], del[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
        }
        Ok(Pchip { xs, ys, slopes: d })
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    /// Value, first and second derivative at `x` (clamped to the knot range).
    pub fn eval_all(&self, x: f64) -> (f64, f64, f64) {
        let i = locate(&self.xs, x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let v =
            (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
        let dv = (6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1;
        let d2v = (12.0 * t - 6.0) * y0 + (6.0 * t - 4.0) * m0 + (-12.0 * t + 6.0) * y1 + (6.0 * t - 2.0) * m1;
        (v, dv / h, d2v / (h * h))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_all(x).0
    }
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

/// Natural cubic spline.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        check_knots(&xs, &ys)?;
        let n = xs.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior second-derivative system.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            let mut sub = vec![0.0; k];
            let mut sup = vec![0.0; k];
            for j in 0..k {
                let i = j + 1;
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                sub[j] = h0;
                diag[j] = 2.0 * (h0 + h1);
                sup[j] = h1;
                rhs[j] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
            }
            for j in 1..k {
                let w = sub[j] / diag[j - 1];
                diag[j] -= w * sup[j - 1];
                rhs[j] -= w * rhs[j - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for j in (0..k - 1).rev() {
                m[j + 1] = (rhs[j] - sup[j] * m[j + 2]) / diag[j];
            }
        }
        Ok(CubicSpline { xs, ys, m })
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = locate(&self.xs, x);
        self.eval_piece(i, x)
    }

    fn eval_piece(&self, i: usize, x: f64) -> f64 {
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    /// Real roots of the spline, located piece by piece.
    ///
    /// Each cubic piece is scanned at a few interior points so that pairs of
    /// roots without a sign change at the knots are also found.
    pub fn roots(&self) -> Vec<f64> {
        const SUB: usize = 8;
        let mut out: Vec<f64> = Vec::new();
        for i in 0..self.xs.len() - 1 {
            let (x0, x1) = (self.xs[i], self.xs[i + 1]);
            let step = (x1 - x0) / SUB as f64;
            let mut a = x0;
            let mut fa = self.eval_piece(i, a);
            for s in 1..=SUB {
                let b = if s == SUB { x1 } else { x0 + step * s as f64 };
                let fb = self.eval_piece(i, b);
                if fa == 0.0 {
                    if out.last().map_or(true, |&l| (l - a).abs() > 1e-14 * (1.0 + a.abs())) {
                        out.push(a);
                    }
                } else if fa * fb < 0.0 {
                    out.push(bisect(|x| self.eval_piece(i, x), a, b, fa));
                }
                a = b;
                fa = fb;
            }
        }
        let last = *self.xs.last().unwrap();
        if self.ys.last() == Some(&0.0) && out.last() != Some(&last) {
            out.push(last);
        }
        out
    }
}

/// Bisection on a bracketing interval; `fa` is `f(a)`.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
