//! C ABI over `tms-core`.
//!
//! Every function returns a [`TmsStatus`]. Results go through out-pointers, and a
//! failing call leaves a message retrievable with [`tms_last_error`] on the same
//! thread. Models are opaque handles created by [`tms_model_new`] and released
//! with [`tms_model_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use tms_core::cauchy::CauchyMachinery;
use tms_core::spectrum::{self, ExtensionBeta, SpectrumDetector};
use tms_core::{classify, zeros, CriticalConstants, Error, QuadratureConfig, Regime};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    RegimeMismatch = 3,
    NumericFailure = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmsRegime {
    SelfAdjoint = 0,
    ImaginaryPairZeros = 1,
    DoubleZero = 2,
    RealLineZeros = 3,
}

impl From<Regime> for TmsRegime {
    fn from(r: Regime) -> Self {
        match r {
            Regime::SelfAdjoint => TmsRegime::SelfAdjoint,
            Regime::ImaginaryPairZeros => TmsRegime::ImaginaryPairZeros,
            Regime::DoubleZero => TmsRegime::DoubleZero,
            Regime::RealLineZeros => TmsRegime::RealLineZeros,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TmsConstants {
    pub mu0: f64,
    pub mu1: f64,
    pub m0: f64,
    pub m1: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TmsZeros {
    pub regime: TmsRegime,
    pub z_plus_re: f64,
    pub z_plus_im: f64,
    pub z_minus_re: f64,
    pub z_minus_im: f64,
    /// NaN when the pair is not on the middle line.
    pub s0: f64,
    /// NaN when the pair is not on the imaginary axis.
    pub t0: f64,
}

/// Opaque model for one mass parameter in the real-line regime.
pub struct TmsModel {
    mu: f64,
    machinery: CauchyMachinery,
    cache: tms_core::eigen::PoleCache,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TmsStatus {
    match e {
        Error::InvalidInput(_) | Error::Domain(_) | Error::NoZeros { .. } => TmsStatus::InvalidArgument,
        Error::RegimeMismatch { .. } => TmsStatus::RegimeMismatch,
        _ => TmsStatus::NumericFailure,
    }
}

fn guard<F: FnOnce() -> Result<(), TmsStatus>>(f: F) -> TmsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TmsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            TmsStatus::Panic
        }
    }
}

fn check<T>(r: tms_core::Result<T>) -> Result<T, TmsStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), TmsStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        Err(TmsStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tms_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be null or point to writable memory for one `TmsConstants`.
#[no_mangle]
pub unsafe extern "C" fn tms_constants(out: *mut TmsConstants) -> TmsStatus {
    guard(|| {
        non_null(out, "out")?;
        let c = CriticalConstants::standard();
        *out = TmsConstants { mu0: c.mu0, mu1: c.mu1, m0: c.m0, m1: c.m1 };
        Ok(())
    })
}

/// # Safety
/// `out` must be null or point to writable memory for one `TmsZeros`.
#[no_mangle]
pub unsafe extern "C" fn tms_zeros(mu: f64, out: *mut TmsZeros) -> TmsStatus {
    guard(|| {
        non_null(out, "out")?;
        let z = check(zeros::find_zeros(mu, CriticalConstants::standard(), &QuadratureConfig::default()))?;
        *out = TmsZeros {
            regime: z.regime.into(),
            z_plus_re: z.z_plus.re,
            z_plus_im: z.z_plus.im,
            z_minus_re: z.z_minus.re,
            z_minus_im: z.z_minus.im,
            s0: z.s0.unwrap_or(f64::NAN),
            t0: z.t0.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// # Safety
/// `out` must be null or point to writable memory for one `TmsRegime`.
#[no_mangle]
pub unsafe extern "C" fn tms_regime(mu: f64, out: *mut TmsRegime) -> TmsStatus {
    guard(|| {
        non_null(out, "out")?;
        check(tms_core::MassParams::from_mu(mu))?;
        *out = classify(mu, CriticalConstants::standard()).into();
        Ok(())
    })
}

/// Builds the model for `mu`, which must lie in the real-line regime.
///
/// # Safety
/// `out` must be null or point to writable memory for one pointer. On success
/// `*out` owns a model that must be released with [`tms_model_free`].
#[no_mangle]
pub unsafe extern "C" fn tms_model_new(mu: f64, out: *mut *mut TmsModel) -> TmsStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        check(tms_core::MassParams::from_mu(mu))?;
        let found = classify(mu, CriticalConstants::standard());
        if found != Regime::RealLineZeros {
            return Err(check::<()>(Err(Error::RegimeMismatch { expected: Regime::RealLineZeros, found })).unwrap_err());
        }
        let cfg = QuadratureConfig::default();
        let z = check(zeros::find_zeros(mu, CriticalConstants::standard(), &cfg))?;
        let machinery = check(CauchyMachinery::new(&z, &cfg))?;
        let cache = check(tms_core::eigen::PoleCache::new(&machinery))?;
        *out = Box::into_raw(Box::new(TmsModel { mu, machinery, cache }));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a pointer from [`tms_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tms_model_free(model: *mut TmsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle and `out` writable for one `double`.
#[no_mangle]
pub unsafe extern "C" fn tms_model_s0(model: *const TmsModel, out: *mut f64) -> TmsStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(out, "out")?;
        *out = (*model).machinery.s0;
        Ok(())
    })
}

fn beta_of(re: f64, im: f64) -> Result<ExtensionBeta, TmsStatus> {
    check(ExtensionBeta::new(Complex64::new(re, im)))
}

/// Ladder entries `λ_n`, `n = n_min..=n_max`, written to `out[0..count]`.
/// `*written` receives the number of entries; if `capacity` is smaller the call
/// fails with `BufferTooSmall` and writes nothing else.
///
/// # Safety
/// `model` must be a live handle, `out` writable for `capacity` doubles and
/// `written` writable for one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn tms_ladder(
    model: *const TmsModel,
    beta_re: f64,
    beta_im: f64,
    n_min: i64,
    n_max: i64,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> TmsStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(written, "written")?;
        let l = check(spectrum::ladder(beta_of(beta_re, beta_im)?, (*model).machinery.s0, n_min, n_max))?;
        fill(l.entries.iter().map(|e| e.lambda_n).collect(), out, capacity, written)
    })
}

unsafe fn fill(values: Vec<f64>, out: *mut f64, capacity: usize, written: *mut usize) -> Result<(), TmsStatus> {
    *written = values.len();
    if values.len() > capacity {
        set_error(format!("need {} slots, got {capacity}", values.len()));
        return Err(TmsStatus::BufferTooSmall);
    }
    if !values.is_empty() {
        non_null(out, "out")?;
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    }
    Ok(())
}

/// Determinant zeros of the resolvent system in `[lo, hi]` (both negative),
/// in increasing order. Buffer semantics as in [`tms_ladder`].
///
/// # Safety
/// As for [`tms_ladder`].
#[no_mangle]
pub unsafe extern "C" fn tms_detect(
    model: *const TmsModel,
    beta_re: f64,
    beta_im: f64,
    lo: f64,
    hi: f64,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> TmsStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(written, "written")?;
        let m = &*model;
        let det = check(SpectrumDetector::with_cache(m.cache.clone(), m.mu, beta_of(beta_re, beta_im)?))?;
        let found = check(spectrum::detect_spectrum(&det, lo, hi))?;
        fill(found, out, capacity, written)
    })
}

/// `−(λ/ε)^{−2}`.
///
/// # Safety
/// `out` must be writable for one `double`.
#[no_mangle]
pub unsafe extern "C" fn tms_h_level(lambda: f64, eps: f64, out: *mut f64) -> TmsStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = check(spectrum::h_level(lambda, eps))?;
        Ok(())
    })
}
