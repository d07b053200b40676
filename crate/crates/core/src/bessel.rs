//! Spherical Bessel functions `j_n(z)` of complex argument.

use num_complex::Complex64;

/// Highest order supported by [`spherical_bessel_j`].
pub const MAX_ORDER: usize = 130;

const SMALL_ARG: f64 = 1e-3;
// keeps |value|^2 finite in complex division
const RESCALE: f64 = 1e100;

/// `j_0(z), ..., j_{n_max}(z)`.
///
/// Upward recurrence when `|z| > n_max`, Miller's downward recurrence
/// otherwise (normalised by `j_0` or `j_1`), and the leading terms of the
/// power series for very small `|z|`.
pub fn spherical_bessel_j(n_max: usize, z: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
    spherical_bessel_j_into(z, &mut out);
    out
}

/// Fills `out[n] = j_n(z)` for `n < out.len()` without allocating the result.
pub fn spherical_bessel_j_into(z: Complex64, out: &mut [Complex64]) {
    assert!(!out.is_empty() && out.len() <= MAX_ORDER + 1, "order out of range");
    let n_max = out.len() - 1;
    let az = z.norm();
    if az == 0.0 {
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        out[0] = Complex64::new(1.0, 0.0);
    } else if az < SMALL_ARG {
        series(z, out);
    } else if az > n_max as f64 {
        upward(z, out);
    } else {
        downward(z, az, out);
    }
}

fn j0_j1(z: Complex64) -> (Complex64, Complex64) {
    let (s, c) = (z.sin(), z.cos());
    let j0 = s / z;
    (j0, (j0 - c) / z)
}

fn series(z: Complex64, out: &mut [Complex64]) {
    let z2 = z * z;
    let mut lead = Complex64::new(1.0, 0.0);
    for (n, v) in out.iter_mut().enumerate() {
        if n > 0 {
            lead = lead * z / (2 * n + 1) as f64;
        }
        let a = (2 * n + 3) as f64;
        let b = (2 * n + 5) as f64;
        *v = lead * (1.0 - z2 / (2.0 * a) + z2 * z2 / (8.0 * a * b));
    }
}

fn upward(z: Complex64, out: &mut [Complex64]) {
    let (j0, j1) = j0_j1(z);
    out[0] = j0;
    if out.len() > 1 {
        out[1] = j1;
    }
    let inv = 1.0 / z;
    for n in 1..out.len() - 1 {
        out[n + 1] = out[n] * inv * (2 * n + 1) as f64 - out[n - 1];
    }
}

fn downward(z: Complex64, az: f64, out: &mut [Complex64]) {
    let n_max = out.len() - 1;
    let start = n_max + 20 + (8.0 * az.sqrt()).ceil() as usize + (az.ceil() as usize).saturating_sub(n_max);
    let inv = 1.0 / z;
    let mut next = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1e-30, 0.0);
    for n in (1..=start).rev() {
        let prev = cur * inv * (2 * n + 1) as f64 - next;
        next = cur;
        cur = prev;
        if n - 1 <= n_max {
            out[n - 1] = cur;
        }
        if n <= n_max {
            out[n] = next;
        }
        if cur.norm() > RESCALE {
            let s = 1.0 / RESCALE;
            cur *= s;
            next *= s;
            for v in out[n.saturating_sub(1)..].iter_mut() {
                *v *= s;
            }
        }
    }
    let (j0, j1) = j0_j1(z);
    let scale = if j0.norm() >= j1.norm() || n_max == 0 {
        j0 / out[0]
    } else {
        j1 / out[1]
    };
    out.iter_mut().for_each(|v| *v *= scale);
}

#[cfg(test)]
mod tests {
    use super::*;
    use twofloat::TwoFloat;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `j_n(x)` by direct summation of the Taylor series in double-double.
    fn taylor(n: usize, x: f64) -> f64 {
        let x = TwoFloat::from(x);
        let mut lead = TwoFloat::from(1.0);
        for k in 1..=n {
            lead = lead * x / (2 * k + 1) as f64;
        }
        let mut term = lead;
        let mut sum = term;
        let q = -(x * x) / 2.0;
        for k in 1..200 {
            term = term * q / (k as f64 * (2 * n + 2 * k + 1) as f64);
            sum += term;
        }
        f64::from(sum)
    }

    /// `(z, n, j_n(z))` from 40-digit arithmetic.
    const REFERENCE: [((f64, f64), usize, (f64, f64)); 28] = [
        ((30.0, 5.0), 0, (-2.3161335295720282, 0.76755401552659235)),
        ((30.0, 5.0), 7, (2.0067979413269198, 0.69580301807965475)),
        ((30.0, 5.0), 25, (0.27159976081935462, -0.20844204982543597)),
        ((30.0, 5.0), 40, (-2.5168113417546889e-5, -0.0001181668557621641)),
        ((30.0, 5.0), 60, (-2.0384288661211873e-14, 2.1556392087556157e-14)),
        ((30.0, 5.0), 90, (1.5577333781883609e-35, 1.339776917279415e-34)),
        ((30.0, 5.0), 127, (2.3475142876354044e-67, 6.1749429416038895e-66)),
        ((3.0, 8.0), 0, (-153.0615553046721, -83.690137145373475)),
        ((3.0, 8.0), 7, (4.3501630090922204, 6.5192173992621301)),
        ((3.0, 8.0), 25, (1.2114374503570601e-12, -1.1016239605649159e-10)),
        ((3.0, 8.0), 40, (-1.9099825469471265e-24, -3.4913210015160732e-24)),
        ((3.0, 8.0), 60, (-1.1335823601524434e-45, -3.1431492820783165e-46)),
        ((3.0, 8.0), 90, (-2.2306518274307509e-83, 3.5076457558679147e-83)),
        ((3.0, 8.0), 127, (-3.5458121891347856e-135, 3.7042162420397608e-136)),
        ((80.0, -2.0), 0, (-0.046835884938322457, 0.0038335919291818928)),
        ((80.0, -2.0), 7, (0.012172148584641548, -0.043434507682877554)),
        ((80.0, -2.0), 25, (0.033334873673270954, -0.026918627572957348)),
        ((80.0, -2.0), 40, (0.02197510072423868, 0.030265085487275302)),
        ((80.0, -2.0), 60, (-0.016267402893891461, 0.022311068400818675)),
        ((80.0, -2.0), 90, (0.0001181163626310096, -0.00022412230654759697)),
        ((80.0, -2.0), 127, (-1.2217743304169106e-17, -9.5752397063842757e-18)),
        ((0.7, 0.1), 0, (0.92174039636848064, -0.022231833512131405)),
        ((0.7, 0.1), 7, (2.3620315851618669e-8, 3.5923561880275265e-8)),
        ((0.7, 0.1), 25, (-5.3010679151622906e-38, -2.2695082164229945e-38)),
        ((0.7, 0.1), 40, (1.2077172849557878e-67, -8.4076880903190785e-68)),
        ((0.7, 0.1), 60, (-6.7481378791586241e-111, 8.7079499808951318e-111)),
        ((0.7, 0.1), 90, (1.4059422383278488e-180, 2.9083152965861753e-181)),
        ((0.7, 0.1), 127, (7.9165999151014556e-273, -8.6372150471827378e-273)),
    ];

    #[test]
    fn complex_arguments_against_reference() {
        for ((re, im), n, (wr, wi)) in REFERENCE {
            let want = c(wr, wi);
            for n_max in [n, 127] {
                let j = spherical_bessel_j(n_max, c(re, im));
                let err = (j[n] - want).norm() / want.norm();
                assert!(err < 1e-12, "z={re}+{im}i n={n} n_max={n_max}: rel err {err:.2e}");
            }
        }
    }

    #[test]
    fn limits_at_zero() {
        let j = spherical_bessel_j(5, c(0.0, 0.0));
        assert_eq!(j[0], c(1.0, 0.0));
        assert!(j[1..].iter().all(|v| *v == c(0.0, 0.0)));
    }

    #[test]
    fn closed_form_j1() {
        let z = c(2.0, 1.0);
        let want = z.sin() / (z * z) - z.cos() / z;
        for n_max in [1, 3, 40] {
            let j = spherical_bessel_j(n_max, z);
            assert!((j[1] - want).norm() < 1e-13);
        }
    }

    #[test]
    fn real_argument_ten_against_series() {
        let j = spherical_bessel_j(20, c(10.0, 0.0));
        for n in 0..=20 {
            let want = taylor(n, 10.0);
            assert!(((j[n].re - want) / want).abs() < 1e-12, "n={n}: {} vs {want}", j[n].re);
            assert_eq!(j[n].im, 0.0);
        }
    }

    #[test]
    fn switchover_is_seamless() {
        // same argument evaluated through both branches
        for z in [c(7.5, 0.3), c(3.0, -2.0), c(12.0, 4.0)] {
            let up = spherical_bessel_j(4, z);
            let down = spherical_bessel_j(60, z);
            for n in 0..=4 {
                assert!(
                    (up[n] - down[n]).norm() <= 1e-12 * down[n].norm().max(1e-3),
                    "{z} n={n}"
                );
            }
        }
    }

    #[test]
    fn high_order_small_argument() {
        let j = spherical_bessel_j(130, c(0.5, 0.2));
        let z = c(0.5, 0.2);
        // leading behaviour z^n/(2n+1)!! for n large
        let mut lead = c(1.0, 0.0);
        for n in 1..=30 {
            lead = lead * z / (2 * n + 1) as f64;
        }
        assert!(((j[30] - lead) / lead).norm() < 1e-2);
        assert!(j.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
    }

    #[test]
    fn small_argument_branch() {
        let z = c(5e-4, 2e-4);
        let j = spherical_bessel_j(3, z);
        let (j0, _) = j0_j1(z);
        assert!((j[0] - j0).norm() < 1e-15);
        assert!((j[1] - z / 3.0).norm() < 1e-10);
    }

    #[test]
    fn conjugate_symmetry() {
        for z in [c(4.0, 1.5), c(25.0, 3.0), c(0.01, 0.5)] {
            let a = spherical_bessel_j(30, z);
            let b = spherical_bessel_j(30, z.conj());
            for (x, y) in a.iter().zip(&b) {
                assert!((x.conj() - y).norm() <= 1e-15 * x.norm().max(1e-300));
            }
        }
    }
}
