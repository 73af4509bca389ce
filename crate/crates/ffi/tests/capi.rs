use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use sdeflow_ffi::*;

const BROWNIAN: &str = "[model]\ndim = 2\nk1 = 1.0\nk2 = 1.0\nsigma = { kind = \"scalar\", eps = 1.0 }\n";

fn load(toml: &str) -> (SdeflowStatus, *mut SdeflowModel) {
    let text = CString::new(toml).unwrap();
    let mut h = ptr::null_mut();
    let s = unsafe { sdeflow_model_from_toml(text.as_ptr(), &mut h) };
    (s, h)
}

fn last_error() -> String {
    let p = sdeflow_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn model_lifecycle_and_integration() {
    let (s, h) = load(BROWNIAN);
    assert_eq!(s, SdeflowStatus::Ok);
    assert_eq!(unsafe { sdeflow_model_dim(h) }, 2);
    let init = [0.0, 0.0, 1.0, -2.0];
    let mut a = [0.0; 4];
    let mut b = [0.0; 4];
    unsafe {
        assert_eq!(sdeflow_integrate(h, 9, 0.01, 100, init.as_ptr(), 2, SdeflowTaming::Clip, a.as_mut_ptr()), SdeflowStatus::Ok);
        assert_eq!(sdeflow_integrate(h, 9, 0.01, 100, init.as_ptr(), 2, SdeflowTaming::Clip, b.as_mut_ptr()), SdeflowStatus::Ok);
    }
    assert_eq!(a, b);
    // Zero drift, additive noise: differences are preserved exactly.
    assert_eq!(a[2] - a[0], 1.0);
    assert_eq!(a[3] - a[1], -2.0);
    unsafe { sdeflow_model_free(h) };
}

#[test]
fn constants_json_round_trip() {
    let (_, h) = load(BROWNIAN);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { sdeflow_constants_json(h, &mut out) }, SdeflowStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["gamma"].as_f64(), Some(1.0));
    unsafe {
        sdeflow_string_free(out);
        sdeflow_model_free(h);
    }
}

#[test]
fn rate_function_matches_library() {
    let mut v = -1.0;
    assert_eq!(unsafe { sdeflow_rate_function(0.5, 1.0, 1.0, 2, &mut v) }, SdeflowStatus::Ok);
    assert_eq!(v, 0.0);
    // Middle branch: d (γ - c1 d^α).
    assert_eq!(unsafe { sdeflow_rate_function(3.0, 1.0, 1.0, 2, &mut v) }, SdeflowStatus::Ok);
    assert_eq!(v, 2.0);
    assert_eq!(unsafe { sdeflow_rate_function(-1.0, 1.0, 1.0, 2, &mut v) }, SdeflowStatus::InvalidParameter);
    assert!(last_error().contains("gamma"));
}

#[test]
fn error_codes() {
    let (s, h) = load("[model]\ndim = 1\nk1 = 2.0\nk2 = 1.0\nsigma = { kind = \"scalar\", eps = 1.0 }\n");
    assert_eq!(s, SdeflowStatus::InvalidParameter);
    assert!(h.is_null());
    assert!(last_error().contains("k1"));

    let (s, _) = load("seed = 1\n");
    assert_eq!(s, SdeflowStatus::Config);
    let (s, _) = load("not toml [");
    assert_eq!(s, SdeflowStatus::Config);

    let mut h = ptr::null_mut();
    assert_eq!(unsafe { sdeflow_model_from_toml(ptr::null(), &mut h) }, SdeflowStatus::NullPointer);
    let bad = [0xffu8, 0];
    assert_eq!(unsafe { sdeflow_model_from_toml(bad.as_ptr().cast(), &mut h) }, SdeflowStatus::InvalidUtf8);

    let mut out = [0.0; 2];
    let init = [0.0; 2];
    let st = unsafe { sdeflow_integrate(ptr::null(), 1, 0.1, 1, init.as_ptr(), 1, SdeflowTaming::Clip, out.as_mut_ptr()) };
    assert_eq!(st, SdeflowStatus::NullPointer);
    assert_eq!(unsafe { sdeflow_model_dim(ptr::null()) }, 0);

    let (_, h) = load(BROWNIAN);
    let st = unsafe { sdeflow_integrate(h, 1, -0.1, 1, init.as_ptr(), 1, SdeflowTaming::Clip, out.as_mut_ptr()) };
    assert_eq!(st, SdeflowStatus::InvalidParameter);
    unsafe {
        sdeflow_model_free(h);
        sdeflow_model_free(ptr::null_mut());
        sdeflow_string_free(ptr::null_mut());
    }
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(sdeflow_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/sdeflow.h")
}

#[test]
fn header_declares_the_surface() {
    let h = std::fs::read_to_string(header()).unwrap();
    for sym in [
        "sdeflow_model_from_toml",
        "sdeflow_model_free",
        "sdeflow_model_dim",
        "sdeflow_integrate",
        "sdeflow_constants_json",
        "sdeflow_rate_function",
        "sdeflow_last_error",
        "sdeflow_string_free",
        "sdeflow_version",
        "typedef struct SdeflowModel SdeflowModel",
        "SDEFLOW_STATUS_OK = 0",
    ] {
        assert!(h.contains(sym), "header lacks {sym}");
    }
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include <string.h>
#include "sdeflow.h"

int main(void) {
    const char *toml = "[model]\ndim = 1\nk1 = 1.0\nk2 = 1.0\nsigma = { kind = \"scalar\", eps = 1.0 }\n";
    SdeflowModel *m = NULL;
    if (sdeflow_model_from_toml(toml, &m) != SDEFLOW_STATUS_OK) return 1;
    double x0[2] = {0.0, 3.0}, x1[2];
    if (sdeflow_integrate(m, 4, 0.01, 50, x0, 2, SDEFLOW_TAMING_CLIP, x1) != SDEFLOW_STATUS_OK) return 2;
    if (x1[1] - x1[0] != 3.0) return 3;
    char *json = NULL;
    if (sdeflow_constants_json(m, &json) != SDEFLOW_STATUS_OK || strstr(json, "\"gamma\"") == NULL) return 4;
    sdeflow_string_free(json);
    sdeflow_model_free(m);
    double v;
    if (sdeflow_rate_function(-1.0, 1.0, 1.0, 1, &v) != SDEFLOW_STATUS_INVALID_PARAMETER) return 5;
    if (sdeflow_last_error() == NULL) return 6;
    printf("ok\n");
    return 0;
}
"#;

/// Directory holding the library artifacts of this build.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_compiles_links_and_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let lib = artifact_dir().join("libsdeflow_ffi.a");
    assert!(lib.is_file(), "static library not found at {}", lib.display());
    let exe = tmp.path().join("main");
    let include = header().parent().unwrap().to_path_buf();
    let cc = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .output()
        .unwrap();
    assert!(cc.status.success(), "{}", String::from_utf8_lossy(&cc.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}
