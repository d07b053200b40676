//! Quadrature rules: composite Gauss–Legendre for integrals of known
//! functions, and cumulative Newton–Cotes-type rules for sampled data on a
//! uniform grid.

use std::collections::HashMap;

use twofloat::TwoFloat;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A fixed Gauss–Legendre rule mapped onto arbitrary intervals.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(points: usize) -> Self {
        let (nodes, weights) = gauss_legendre(points);
        GaussRule { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }

    pub fn composite(&self, f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|i| self.integrate(&f, a + i as f64 * h, a + (i + 1) as f64 * h))
            .sum()
    }
}

/// Cumulative integration of samples on a uniform grid.
///
/// The integral over each cell `[x_i, x_{i+1}]` comes from the Lagrange
/// interpolant through `order` neighbouring samples (centred in the interior,
/// one-sided near the ends), so the running integral has global error
/// `O(h^order)` for smooth integrands.
#[derive(Debug, Clone)]
pub struct CumulativeRule {
    order: usize,
    cache: HashMap<i64, Vec<(i128, i128)>>,
}

impl CumulativeRule {
    /// `order` must be even and between 2 and 10.
    pub fn new(order: usize) -> Self {
        assert!(order >= 2 && order <= 10 && order % 2 == 0, "unsupported order {order}");
        CumulativeRule {
            order,
            cache: HashMap::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn weights(&mut self, first_offset: i64) -> &[(i128, i128)] {
        let m = self.order;
        self.cache
            .entry(first_offset)
            .or_insert_with(|| cell_weights_exact(&(0..m as i64).map(|j| first_offset + j).collect::<Vec<_>>()))
    }

    /// Stencil start and exact weights for every cell of an `n`-point grid.
    fn stencils(&mut self, n: usize) -> Vec<(usize, Vec<(i128, i128)>)> {
        let m = self.order;
        let half = (m / 2) as i64;
        (0..n - 1)
            .map(|i| {
                let start = (i as i64 - half + 1).clamp(0, (n - m) as i64);
                (start as usize, self.weights(start - i as i64).to_vec())
            })
            .collect()
    }

    /// Running integral `I_i = ∫_{x_0}^{x_i} y` for samples `ys` with spacing `h`.
    pub fn integrate(&mut self, ys: &[f64], h: f64) -> Vec<f64> {
        let n = ys.len();
        let mut out = vec![0.0; n];
        if n < 2 {
            return out;
        }
        let m = self.order.min(n);
        if m < self.order {
            // too few samples for the requested stencil: trapezoid
            for i in 0..n - 1 {
                out[i + 1] = out[i] + 0.5 * h * (ys[i] + ys[i + 1]);
            }
            return out;
        }
        let mut cache: HashMap<i64, Vec<f64>> = HashMap::new();
        for (i, (s, w)) in self.stencils(n).into_iter().enumerate() {
            let w = cache
                .entry(s as i64 - i as i64)
                .or_insert_with(|| w.iter().map(|(a, b)| *a as f64 / *b as f64).collect());
            let cell: f64 = w.iter().zip(&ys[s..s + m]).map(|(w, y)| w * y).sum();
            out[i + 1] = out[i] + h * cell;
        }
        out
    }

    /// [`integrate`](Self::integrate) in double-double arithmetic.
    pub fn integrate_dd(&mut self, ys: &[TwoFloat], h: TwoFloat) -> Vec<TwoFloat> {
        let n = ys.len();
        let mut out = vec![TwoFloat::from(0.0); n];
        if n < 2 {
            return out;
        }
        if n < self.order {
            for i in 0..n - 1 {
                out[i + 1] = out[i] + h * (ys[i] + ys[i + 1]) / 2.0;
            }
            return out;
        }
        let m = self.order;
        let mut cache: HashMap<i64, Vec<TwoFloat>> = HashMap::new();
        for (i, (s, w)) in self.stencils(n).into_iter().enumerate() {
            let w = cache
                .entry(s as i64 - i as i64)
                .or_insert_with(|| w.iter().map(|(a, b)| TwoFloat::from(*a as f64) / *b as f64).collect());
            let mut cell = TwoFloat::from(0.0);
            for (w, y) in w.iter().zip(&ys[s..s + m]) {
                cell += *w * *y;
            }
            out[i + 1] = out[i] + h * cell;
        }
        out
    }
}

#[cfg(test)]
fn cell_weights(nodes: &[i64]) -> Vec<f64> {
    cell_weights_exact(nodes)
        .into_iter()
        .map(|(a, b)| a as f64 / b as f64)
        .collect()
}

/// `∫_0^1 L_j(t) dt` for the Lagrange basis on integer nodes as reduced
/// fractions `(numerator, denominator)`.
fn cell_weights_exact(nodes: &[i64]) -> Vec<(i128, i128)> {
    let m = nodes.len();
    let lcm: i128 = (1..=m as i128).fold(1, |acc, k| acc / gcd(acc, k) * k);
    (0..m)
        .map(|j| {
            // numerator polynomial prod_{k != j} (t - o_k), coefficients low to high
            let mut poly: Vec<i128> = vec![1];
            let mut denom: i128 = 1;
            for (k, &ok) in nodes.iter().enumerate() {
                if k == j {
                    continue;
                }
                let mut next = vec![0i128; poly.len() + 1];
                for (p, &c) in poly.iter().enumerate() {
                    next[p + 1] += c;
                    next[p] -= c * ok as i128;
                }
                poly = next;
                denom *= (nodes[j] - ok) as i128;
            }
            let num: i128 = poly.iter().enumerate().map(|(p, &c)| c * (lcm / (p as i128 + 1))).sum();
            let den = lcm * denom;
            let g = gcd(num, den);
            let sign = if den < 0 { -1 } else { 1 };
            (sign * num / g, sign * den / g)
        })
        .collect()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = GaussRule::new(10);
        let v = rule.integrate(|x| x.powi(19) + 3.0 * x.powi(6), -1.0, 2.0);
        let want = (2f64.powi(20) - 1.0) / 20.0 + 3.0 * (2f64.powi(7) + 1.0) / 7.0;
        assert!((v - want).abs() < 1e-9 * want.abs());
    }

    #[test]
    fn gauss_weights_sum_to_two() {
        for n in [1, 2, 5, 16, 33] {
            let (_, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn simpson_class_weights() {
        // interior 4-point cell weights are (-1, 13, 13, -1)/24
        let w = cell_weights(&[-1, 0, 1, 2]);
        let want = [-1.0 / 24.0, 13.0 / 24.0, 13.0 / 24.0, -1.0 / 24.0];
        for (a, b) in w.iter().zip(want) {
            assert!((a - b).abs() < 1e-16);
        }
    }

    #[test]
    fn cumulative_rule_converges_at_its_order() {
        for order in [4, 6, 8] {
            let mut errs = Vec::new();
            for n in [21, 41] {
                let h = 2.0 / (n - 1) as f64;
                let ys: Vec<f64> = (0..n).map(|i| (i as f64 * h).exp()).collect();
                let mut rule = CumulativeRule::new(order);
                let cum = rule.integrate(&ys, h);
                let err = (0..n)
                    .map(|i| (cum[i] - ((i as f64 * h).exp() - 1.0)).abs())
                    .fold(0.0, f64::max);
                errs.push(err);
            }
            let rate = (errs[0] / errs[1]).log2();
            assert!(rate > order as f64 - 0.6, "order {order}: rate {rate}");
        }
    }

    #[test]
    fn cumulative_rule_exact_on_low_degree() {
        let h = 0.1;
        let ys: Vec<f64> = (0..30).map(|i| (i as f64 * h).powi(5) - 2.0 * (i as f64 * h)).collect();
        let cum = CumulativeRule::new(6).integrate(&ys, h);
        for (i, c) in cum.iter().enumerate() {
            let x = i as f64 * h;
            assert!((c - (x.powi(6) / 6.0 - x * x)).abs() < 1e-12);
        }
    }
}
