//! Complex helpers missing from `num_complex` that the kernels need for
//! cancellation-free evaluation.

use num_complex::Complex64;

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// `e^z - 1` without cancellation for small `|z|`.
pub fn expm1(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let half = (0.5 * y).sin();
    let re = x.exp_m1() * y.cos() - 2.0 * half * half;
    let im = x.exp() * y.sin();
    Complex64::new(re, im)
}

/// Principal `ln(1 + d)` without cancellation for small `|d|`.
pub fn log1p(d: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * d.re + d.norm_sqr()).ln_1p();
    let im = d.im.atan2(1.0 + d.re);
    Complex64::new(re, im)
}

/// Wrap an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let mut r = a.rem_euclid(TWO_PI);
    if r > pi {
        r -= TWO_PI;
    }
    r
}

/// `ln w` with imaginary part in `(0, 2π]`; `w` must not be zero or positive real.
pub fn ln_cut(w: Complex64) -> Complex64 {
    let mut l = w.ln();
    if l.im <= 0.0 {
        l.im += TWO_PI;
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm1_matches_naive_for_large_and_is_accurate_for_small() {
        let z = Complex64::new(1.3, -0.4);
        assert!((expm1(z) - (z.exp() - 1.0)).norm() < 1e-15);
        let z = Complex64::new(1e-12, 2e-12);
        assert!((expm1(z) - z).norm() < 1e-23);
    }

    #[test]
    fn log1p_small_argument() {
        let d = Complex64::new(1e-14, -3e-14);
        assert!((log1p(d) - d).norm() < 1e-27);
        let d = Complex64::new(0.5, 0.25);
        assert!((log1p(d) - (d + 1.0).ln()).norm() < 1e-15);
    }

    #[test]
    fn cut_branch() {
        assert!((ln_cut(Complex64::new(-1.0, 0.0)).im - std::f64::consts::PI).abs() < 1e-15);
        assert!((ln_cut(Complex64::new(1.0, -1e-300)).im - TWO_PI).abs() < 1e-12);
        assert!(ln_cut(Complex64::new(1.0, 1e-3)).im > 0.0);
        assert!((wrap_angle(3.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
    }
}
