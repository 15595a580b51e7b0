use std::ffi::{c_char, c_int, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use origami_kz_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(okz_last_error_message()) }.to_string_lossy().into_owned()
}

fn take(s: *mut c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { okz_string_free(s) };
    out
}

fn wollmilchsau() -> *mut OkzOrigami {
    let h = [2u32, 3, 4, 1, 6, 7, 8, 5];
    let v = [5u32, 8, 7, 6, 3, 2, 1, 4];
    let mut o = ptr::null_mut();
    assert_eq!(unsafe { okz_origami_new(8, h.as_ptr(), v.as_ptr(), &mut o) }, OkzStatus::Ok);
    o
}

#[test]
fn stratum_through_the_handle() {
    let o = wollmilchsau();
    let (mut g, mut len) = (0usize, 0usize);
    let mut kappa = [0usize; 8];
    assert_eq!(unsafe { okz_origami_stratum(o, &mut g, kappa.as_mut_ptr(), 8, &mut len) }, OkzStatus::Ok);
    assert_eq!((g, &kappa[..len]), (3, &[1, 1, 1, 1][..]));
    assert_eq!(unsafe { okz_origami_stratum(o, &mut g, kappa.as_mut_ptr(), 2, &mut len) }, OkzStatus::SizeMismatch);
    assert_eq!(len, 4);
    unsafe { okz_origami_free(o) };
}

#[test]
fn error_codes() {
    let mut o = ptr::null_mut();
    let same = [1u32, 1];
    assert_eq!(unsafe { okz_origami_new(2, same.as_ptr(), same.as_ptr(), &mut o) }, OkzStatus::InvalidInput);
    assert!(!last_error().is_empty());
    let id = [1u32, 2];
    assert_eq!(unsafe { okz_origami_new(2, id.as_ptr(), id.as_ptr(), &mut o) }, OkzStatus::NotConnected);
    assert_eq!(unsafe { okz_origami_new(2, ptr::null(), id.as_ptr(), &mut o) }, OkzStatus::NullPointer);
    let text = CString::new(r#"{"n": 2, "h": [2, 1"#).unwrap();
    assert_eq!(unsafe { okz_origami_from_json(text.as_ptr(), &mut o) }, OkzStatus::InvalidInput);
    assert!(last_error().contains("line 1"), "{}", last_error());
    let mut g = 0usize;
    let mut len = 0usize;
    assert_eq!(unsafe { okz_origami_stratum(ptr::null(), &mut g, ptr::null_mut(), 0, &mut len) }, OkzStatus::NullPointer);
}

#[test]
fn json_entry_points() {
    let text = CString::new(r#"{"n": 3, "h": [2, 1, 3], "v": [3, 2, 1]}"#).unwrap();
    let mut o = ptr::null_mut();
    assert_eq!(unsafe { okz_origami_from_json(text.as_ptr(), &mut o) }, OkzStatus::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { okz_origami_homology_json(o, &mut s) }, OkzStatus::Ok);
    let hd: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(hd["genus"], 2);
    let mut code: c_int = -1;
    assert_eq!(unsafe { okz_check_theorem_json(o, 1, &mut s, &mut code) }, OkzStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!((code, report["status"].as_str()), (0, Some("pass")));
    unsafe { okz_origami_free(o) };
}

#[test]
fn holonomy_and_lyapunov() {
    let inst = CString::new(
        r#"{"pairing": [["0","1","0","0"],["-1","0","0","0"],["0","0","0","1"],["0","0","-1","0"]],
            "a": ["1","0","0","0"], "b": ["0","1","0","0"], "delta": ["0","0","1/2","0"], "eps": "3", "v": ["0","0","0","1"]}"#,
    )
    .unwrap();
    let mut s = ptr::null_mut();
    let mut code: c_int = -1;
    assert_eq!(unsafe { okz_holonomy_square_json(inst.as_ptr(), &mut s, &mut code) }, OkzStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(v["result"]["defect"], serde_json::json!(["0", "0", "-3/4", "0"]));
    assert_eq!(code, 0);

    let o = wollmilchsau();
    let mut ex = [0f64; 6];
    let mut len = 0usize;
    assert_eq!(unsafe { okz_lyapunov(o, 0, 20_000, false, ex.as_mut_ptr(), 6, &mut len) }, OkzStatus::Ok);
    assert_eq!(len, 6);
    assert!((ex[0] - 1.0).abs() < 1e-12 && ex[1..5].iter().all(|x| x.abs() < 0.05));
    unsafe { okz_origami_free(o) };
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/origami_kz.h")).unwrap();
    for name in ["okz_origami_new", "okz_origami_free", "okz_check_theorem_json", "okz_last_error_message", "OKZ_STATUS_NOT_CONNECTED", "typedef struct OkzOrigami OkzOrigami"] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles the C example against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let target = std::env::var_os("CARGO_TARGET_DIR").map(PathBuf::from).unwrap_or_else(|| manifest.join("../../target"));
    let lib = target.join("debug/liborigami_kz_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("examples/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("genus 3 kappa 1 1 1 1"), "{stdout}");
    assert!(stdout.contains("bad permutation: status 2"), "{stdout}");
}
