use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use tms_ffi::*;

const MU: f64 = 1.9;

fn last_error() -> String {
    let p = tms_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn model(mu: f64) -> *mut TmsModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { tms_model_new(mu, &mut m) }, TmsStatus::Ok);
    assert!(!m.is_null());
    m
}

#[test]
fn constants_and_regime() {
    let mut c = TmsConstants::default();
    assert_eq!(unsafe { tms_constants(&mut c) }, TmsStatus::Ok);
    assert!((c.mu0 - 1.8497720216743732).abs() < 1e-8);
    assert!((c.mu1 - 1.8630790239832242).abs() < 1e-8);
    assert!((c.m0 - (2.0 / c.mu0 - 1.0)).abs() < 1e-14);

    let mut r = TmsRegime::SelfAdjoint;
    for (mu, want) in
        [(1.0, TmsRegime::SelfAdjoint), (1.855, TmsRegime::ImaginaryPairZeros), (1.9, TmsRegime::RealLineZeros)]
    {
        assert_eq!(unsafe { tms_regime(mu, &mut r) }, TmsStatus::Ok);
        assert_eq!(r, want, "mu = {mu}");
    }
}

#[test]
fn zeros_are_symmetric() {
    let mut z = std::mem::MaybeUninit::<TmsZeros>::uninit();
    assert_eq!(unsafe { tms_zeros(MU, z.as_mut_ptr()) }, TmsStatus::Ok);
    let z = unsafe { z.assume_init() };
    assert_eq!(z.regime, TmsRegime::RealLineZeros);
    assert!(z.s0 > 0.0);
    assert!(z.t0.is_nan());
    assert!((z.z_plus_re + z.z_minus_re).abs() < 1e-12);
    assert!((z.z_plus_im - 0.5).abs() < 1e-12);
}

#[test]
fn null_pointers_and_bad_arguments() {
    assert_eq!(unsafe { tms_constants(ptr::null_mut()) }, TmsStatus::NullPointer);
    assert!(last_error().contains("null"));

    let mut r = TmsRegime::SelfAdjoint;
    assert_eq!(unsafe { tms_regime(2.5, &mut r) }, TmsStatus::InvalidArgument);
    assert!(!last_error().is_empty());

    let mut m = ptr::null_mut();
    assert_eq!(unsafe { tms_model_new(1.0, &mut m) }, TmsStatus::RegimeMismatch);
    assert!(m.is_null());

    let mut h = 0.0;
    assert_eq!(unsafe { tms_h_level(-1.0, 0.0, &mut h) }, TmsStatus::InvalidArgument);
    assert_eq!(unsafe { tms_h_level(-2.0, 1.0, &mut h) }, TmsStatus::Ok);
    assert!((h + 0.25).abs() < 1e-15);

    // Freeing null is a no-op.
    unsafe { tms_model_free(ptr::null_mut()) };
}

#[test]
fn ladder_buffer_protocol() {
    let m = model(MU);
    let mut s0 = 0.0;
    assert_eq!(unsafe { tms_model_s0(m, &mut s0) }, TmsStatus::Ok);
    assert!(s0 > 0.0);

    let mut written = 0usize;
    let mut small = [0.0; 2];
    let st = unsafe { tms_ladder(m, 0.0, 1.0, -2, 2, small.as_mut_ptr(), small.len(), &mut written) };
    assert_eq!(st, TmsStatus::BufferTooSmall);
    assert_eq!(written, 5);

    let mut buf = vec![0.0; written];
    let st = unsafe { tms_ladder(m, 0.0, 1.0, -2, 2, buf.as_mut_ptr(), buf.len(), &mut written) };
    assert_eq!(st, TmsStatus::Ok);
    let ratio = (-std::f64::consts::PI / s0).exp();
    for w in buf.windows(2) {
        assert!(w[0] < 0.0 && w[1] < 0.0);
        assert!((w[0] / w[1] - ratio).abs() < 1e-12);
    }

    assert_eq!(
        unsafe { tms_ladder(m, 0.0, 0.0, 0, 0, buf.as_mut_ptr(), buf.len(), &mut written) },
        TmsStatus::InvalidArgument
    );
    unsafe { tms_model_free(m) };
}

#[test]
fn detector_agrees_with_ladder() {
    let m = model(MU);
    let mut ladder = [0.0; 3];
    let mut n = 0usize;
    assert_eq!(unsafe { tms_ladder(m, 0.0, 1.0, -1, 1, ladder.as_mut_ptr(), 3, &mut n) }, TmsStatus::Ok);
    let (lo, hi) = (ladder[2] * 1.01, ladder[0] * 0.99);
    let mut found = [0.0; 8];
    assert_eq!(unsafe { tms_detect(m, 0.0, 1.0, lo, hi, found.as_mut_ptr(), found.len(), &mut n) }, TmsStatus::Ok);
    assert_eq!(n, 3);
    let mut sorted = ladder;
    sorted.sort_by(f64::total_cmp);
    for (a, b) in found[..n].iter().zip(sorted) {
        assert!(((a - b) / b).abs() < 1e-6, "{a} vs {b}");
    }
    unsafe { tms_model_free(m) };
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/tms.h")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header()).expect("header generated by build.rs");
    for name in [
        "TMS_H",
        "typedef struct TmsModel TmsModel;",
        "TMS_STATUS_BUFFER_TOO_SMALL",
        "TMS_REGIME_REAL_LINE_ZEROS",
        "tms_last_error",
        "tms_constants",
        "tms_zeros",
        "tms_regime",
        "tms_model_new",
        "tms_model_free",
        "tms_model_s0",
        "tms_ladder",
        "tms_detect",
        "tms_h_level",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

/// Compiles a small C program against the header and the static library.
/// Skipped when no C compiler is around.
#[test]
fn c_smoke() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("c_smoke skipped: no cc");
        return;
    }
    // `cargo test` only refreshes the rlib, so build the archive explicitly.
    let status = Command::new(env!("CARGO"))
        .args(["build", "-q", "-p", "tms-ffi", "--lib", "--profile", "test"])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .status()
        .unwrap();
    assert!(status.success(), "building libtms_ffi.a failed");
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target"));
    let lib = target.join("debug/libtms_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let dir = tempfile_dir();
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <math.h>
#include "tms.h"
int main(void) {
    TmsConstants c;
    if (tms_constants(&c) != TMS_STATUS_OK) return 1;
    if (fabs(c.mu0 - 1.8497720216743732) > 1e-8) return 2;
    TmsModel *m = NULL;
    if (tms_model_new(1.0, &m) != TMS_STATUS_REGIME_MISMATCH || m != NULL) return 3;
    if (tms_last_error() == NULL) return 4;
    if (tms_model_new(1.9, &m) != TMS_STATUS_OK) return 5;
    double buf[4];
    size_t n = 0;
    if (tms_ladder(m, 0.0, 1.0, 0, 3, buf, 4, &n) != TMS_STATUS_OK || n != 4) return 6;
    tms_model_free(m);
    printf("%.17g\n", buf[0]);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.join("smoke");
    let out = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "cc failed: {}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "smoke exited with {:?}", run.status.code());
    let lambda0: f64 = String::from_utf8_lossy(&run.stdout).trim().parse().unwrap();
    assert!(lambda0 < 0.0);
    let _ = std::fs::remove_dir_all(dir);
}

fn tempfile_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("tms-ffi-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
