//! Quadrature and bracketing primitives used throughout the crate.
//!
//! Everything here works for both `f64` and `Complex64` integrands through the
//! [`QuadValue`] trait. The adaptive rule is a global Gauss-Kronrod (10/21)
//! scheme in the style of QUADPACK's QAG; the tanh-sinh rule is used where the
//! integrand has integrable endpoint singularities.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::config::QuadratureConfig;
use crate::error::{Error, Result};

pub trait QuadValue: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn norm(self) -> f64;
    fn real_part(self) -> f64;
}

impl QuadValue for f64 {
    fn norm(self) -> f64 {
        self.abs()
    }
    fn real_part(self) -> f64 {
        self
    }
}

impl QuadValue for Complex64 {
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn real_part(self) -> f64 {
        self.re
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_87,
];

#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub subdivisions: usize,
}

fn gk21<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resg = T::default();
    let mut fv1 = [T::default(); 10];
    let mut fv2 = [T::default(); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk = resk + (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            resg = resg + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = (fc - mean).norm() * WGK[10];
    let mut resabs = fc.norm() * WGK[10];
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
        resabs += WGK[j] * (fv1[j].norm() + fv2[j].norm());
    }
    let hl = half.abs();
    resasc *= hl;
    resabs *= hl;
    let mut err = ((resk - resg) * half).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (resk * half, err)
}

struct Piece<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Piece<T> {}
impl<T> PartialOrd for Piece<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Piece<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Global adaptive Gauss-Kronrod integration of `f` over `[a, b]`, with the
/// interval pre-split at `breaks` (points outside `(a, b)` are ignored).
pub fn integrate_with_breaks<T, F>(f: F, a: f64, b: f64, breaks: &[f64], cfg: &QuadratureConfig) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if a == b {
        return Ok(Estimate { value: T::default(), error: 0.0, subdivisions: 0 });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput(format!("integration limits must be finite: [{a}, {b}]")));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&p| p > lo && p < hi).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut nodes = Vec::with_capacity(cuts.len() + 2);
    nodes.push(lo);
    nodes.extend(cuts);
    nodes.push(hi);

    let mut heap = BinaryHeap::new();
    let mut total = T::default();
    let mut total_err = 0.0;
    for w in nodes.windows(2) {
        let (v, e) = gk21(&f, w[0], w[1]);
        total = total + v;
        total_err += e;
        heap.push(Piece { a: w[0], b: w[1], value: v, error: e });
    }

    let mut subdivisions = 0;
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.norm());
        if total_err <= tol {
            break;
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::Quadrature { value: total.real_part() * sign, error: total_err, subdivisions });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine resolution; keep its estimate.
            heap.push(Piece { error: 0.0, ..worst });
            total_err -= worst.error;
            continue;
        }
        let (v1, e1) = gk21(&f, worst.a, mid);
        let (v2, e2) = gk21(&f, mid, worst.b);
        total = total - worst.value + v1 + v2;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
        subdivisions += 1;
        if subdivisions % 32 == 0 {
            // Re-sum to keep roundoff in the running totals from accumulating.
            total = heap.iter().fold(T::default(), |acc, p| acc + p.value);
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    Ok(Estimate { value: total * sign, error: total_err, subdivisions })
}

pub fn integrate<T, F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    integrate_with_breaks(f, a, b, &[], cfg)
}

/// Tanh-sinh quadrature on a finite interval.
///
/// The integrand receives `(x, x - a, b - x)` so that it can evaluate endpoint
/// singularities from the exact distances instead of a cancelled difference.
pub fn tanh_sinh<T, F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64, f64, f64) -> T,
{
    const MAX_LEVEL: usize = 12;
    const T_MAX: f64 = 6.5;
    let c = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    let half_pi = std::f64::consts::FRAC_PI_2;

    // Contribution of the abscissa at parameter t (and its mirror -t).
    let pair = |t: f64| -> T {
        let s = half_pi * t.sinh();
        let ch = half_pi * t.cosh();
        // 1 - tanh(s) = 2 / (1 + e^{2s})
        let e = (-2.0 * s.abs()).exp();
        let comp = 2.0 * e / (1.0 + e); // distance from the nearer endpoint, scaled
        let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
        let w = d * ch * sech2;
        if w == 0.0 || comp == 0.0 {
            return T::default();
        }
        let dist = d * comp;
        let (right, left) = if s >= 0.0 {
            // near b
            (f(b - dist, 2.0 * d - dist, dist), f(a + dist, dist, 2.0 * d - dist))
        } else {
            (f(a + dist, dist, 2.0 * d - dist), f(b - dist, 2.0 * d - dist, dist))
        };
        if t == 0.0 {
            right * w
        } else {
            (right + left) * w
        }
    };

    let mut h = 1.0;
    let mut sum = pair(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > T_MAX {
            break;
        }
        sum = sum + pair(t);
        k += 1;
    }
    let mut estimate = sum * h;
    let _ = c;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut fresh = T::default();
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > T_MAX {
                break;
            }
            fresh = fresh + pair(t);
            k += 2;
        }
        sum = sum + fresh;
        let next = sum * h;
        let diff = (next - estimate).norm();
        estimate = next;
        let tol = cfg.abs_tol.max(cfg.rel_tol * estimate.norm());
        if level >= 3 && diff <= tol {
            return Ok(Estimate { value: estimate, error: diff, subdivisions: level });
        }
    }
    Err(Error::Quadrature { value: estimate.real_part(), error: f64::NAN, subdivisions: MAX_LEVEL })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                z
            } else {
                p1
            };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Cached 24-point Gauss-Legendre rule.
pub fn gauss_legendre_24() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(24))
}

/// Plain bisection for a sign change of `f` on `[a, b]`, stopped at `xtol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoBracket(format!("f({a}) = {fa}, f({b}) = {fb}")));
    }
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= xtol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Brent's method on a bracketing interval.
pub fn brent<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoBracket(format!("f({a}) = {fa}, f({b}) = {fb}")));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig { abs_tol: 1e-13, rel_tol: 1e-13, ..Default::default() }
    }

    #[test]
    fn gk_polynomial_and_exponential() {
        let r = integrate(|x: f64| x.powi(5) - 2.0 * x, 0.0, 2.0, &cfg()).unwrap();
        assert_relative_eq!(r.value, 64.0 / 6.0 - 4.0, max_relative = 1e-14);
        let r = integrate(|x: f64| (-x).exp(), 0.0, 40.0, &cfg()).unwrap();
        assert_relative_eq!(r.value, 1.0 - (-40.0f64).exp(), max_relative = 1e-13);
    }

    #[test]
    fn gk_reversed_limits_flip_sign() {
        let a = integrate(|x: f64| x.sin(), 0.0, 1.0, &cfg()).unwrap().value;
        let b = integrate(|x: f64| x.sin(), 1.0, 0.0, &cfg()).unwrap().value;
        assert_relative_eq!(a, -b, max_relative = 1e-15);
    }

    #[test]
    fn gk_complex_oscillatory() {
        let r: Estimate<Complex64> = integrate(|x: f64| Complex64::new(0.0, 7.0 * x).exp(), 0.0, 3.0, &cfg()).unwrap();
        let exact = (Complex64::new(0.0, 21.0).exp() - 1.0) / Complex64::new(0.0, 7.0);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn gk_reports_non_convergence() {
        let tight = QuadratureConfig { max_subdivisions: 2, ..cfg() };
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 1e-300, 1.0, &tight);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn tanh_sinh_endpoint_singularities() {
        // ∫_0^1 (1-x)^{-1/2} dx = 2, ∫_0^1 ln x dx = -1
        let r = tanh_sinh(|_x, _da, db: f64| 1.0 / db.sqrt(), 0.0, 1.0, &cfg()).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-12);
        let r = tanh_sinh(|_x, da: f64, _db| da.ln(), 0.0, 1.0, &cfg()).unwrap();
        assert_relative_eq!(r.value, -1.0, max_relative = 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_high_degree_exactly() {
        let (x, w) = gauss_legendre(24);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(46)).sum();
        assert_relative_eq!(s, 2.0 / 47.0, max_relative = 1e-13);
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn root_finders_agree() {
        let f = |x: f64| x.cos() - x;
        let a = bisect(f, 0.0, 1.0, 1e-15).unwrap();
        let b = brent(f, 0.0, 1.0, 1e-15).unwrap();
        assert!((a - 0.739_085_133_215_160_6).abs() < 1e-14);
        assert!((b - 0.739_085_133_215_160_6).abs() < 1e-14);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }
}
