use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use dagrel_ffi::*;
use serde_json::{json, Value};

fn cstr(v: &Value) -> CString {
    CString::new(v.to_string()).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(dagrel_last_error()) }.to_string_lossy().into_owned()
}

fn load(cat: DagrelCategory, v: &Value) -> *mut DagrelMorphism {
    let mut m = ptr::null_mut();
    let status = unsafe { dagrel_morphism_from_json(cat, cstr(v).as_ptr(), &mut m) };
    assert_eq!(status, DagrelStatus::DagrelOk, "{}", last_error());
    m
}

fn json_of(m: *const DagrelMorphism) -> Value {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { dagrel_morphism_to_json(m, &mut s) }, DagrelStatus::DagrelOk);
    let v = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    unsafe { dagrel_string_free(s) };
    v
}

fn multimap() -> Value {
    json!({ "dom": ["1", "2"], "cod": ["x", "y"], "table": { "1": ["x"], "2": ["x", "y"] } })
}

#[test]
fn dagger_round_trip_and_compose() {
    let r = load(DagrelCategory::DagrelMsurj, &multimap());
    let mut rd = ptr::null_mut();
    assert_eq!(unsafe { dagrel_dagger(r, &mut rd) }, DagrelStatus::DagrelOk);
    let v = json_of(rd);
    assert_eq!(v["table"]["y"], json!(["2"]));
    assert_eq!(v["table"]["x"], json!(["1", "2"]));

    let mut rdr = ptr::null_mut();
    assert_eq!(unsafe { dagrel_compose(rd, r, &mut rdr) }, DagrelStatus::DagrelOk);
    let mut iso = false;
    assert_eq!(unsafe { dagrel_is_isometry(r, &mut iso) }, DagrelStatus::DagrelOk);
    assert!(!iso);
    let mut cat = DagrelCategory::DagrelMat;
    assert_eq!(unsafe { dagrel_morphism_category(rdr, &mut cat) }, DagrelStatus::DagrelOk);
    assert_eq!(cat, DagrelCategory::DagrelMsurj);
    unsafe {
        dagrel_morphism_free(r);
        dagrel_morphism_free(rd);
        dagrel_morphism_free(rdr);
    }
}

#[test]
fn invalid_input_is_reported() {
    let bad = json!({ "dom": ["1", "2"], "cod": ["x"], "table": { "1": ["x"], "2": [] } });
    let mut m = ptr::null_mut();
    let status = unsafe { dagrel_morphism_from_json(DagrelCategory::DagrelMsurj, cstr(&bad).as_ptr(), &mut m) };
    assert_eq!(status, DagrelStatus::DagrelInvalidInput);
    assert!(m.is_null());
    assert!(last_error().contains("totality"));

    let junk = CString::new("{").unwrap();
    let status = unsafe { dagrel_morphism_from_json(DagrelCategory::DagrelPinj, junk.as_ptr(), &mut m) };
    assert_eq!(status, DagrelStatus::DagrelInvalidInput);

    let status = unsafe { dagrel_morphism_from_json(DagrelCategory::DagrelPinj, ptr::null(), &mut m) };
    assert_eq!(status, DagrelStatus::DagrelNullPointer);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { dagrel_dagger(ptr::null(), &mut out) }, DagrelStatus::DagrelNullPointer);
}

#[test]
fn mixed_categories_do_not_compose() {
    let a = load(DagrelCategory::DagrelMsurj, &multimap());
    let b = load(DagrelCategory::DagrelMat, &json!({ "rows": 1, "cols": 1, "entries": [[0.5]] }));
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { dagrel_compose(a, b, &mut out) }, DagrelStatus::DagrelInvalidInput);
    assert!(last_error().contains("different categories"));
    unsafe {
        dagrel_morphism_free(a);
        dagrel_morphism_free(b);
    }
}

#[test]
fn codilator_of_a_half() {
    let m = load(DagrelCategory::DagrelMat, &json!({ "rows": 1, "cols": 1, "entries": [[0.5]] }));
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { dagrel_dilation_json(m, &mut s) }, DagrelStatus::DagrelOk);
    let v: Value = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    unsafe { dagrel_string_free(s) };
    let top = v["left"]["entries"][0][0].as_f64().unwrap();
    let bottom = v["left"]["entries"][1][0].as_f64().unwrap();
    assert!((top.abs() - 3f64.sqrt() / 2.0).abs() < 1e-12);
    assert!((bottom - 0.5).abs() < 1e-12);
    let mut co = true;
    assert_eq!(unsafe { dagrel_is_coisometry(m, &mut co) }, DagrelStatus::DagrelOk);
    assert!(!co);
    unsafe { dagrel_morphism_free(m) };
}

#[test]
fn check_axioms_through_the_boundary() {
    let suite = CString::new("dagger").unwrap();
    let mut s = ptr::null_mut();
    let status = unsafe { dagrel_check_axioms(DagrelCategory::DagrelFinprob, suite.as_ptr(), 3, 20, &mut s) };
    assert_eq!(status, DagrelStatus::DagrelOk, "{}", last_error());
    let v: Value = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    unsafe { dagrel_string_free(s) };
    assert_eq!(v[0]["failed"], 0);
    assert_eq!(v[0]["seed"], 3);

    let nope = CString::new("nope").unwrap();
    let status = unsafe { dagrel_check_axioms(DagrelCategory::DagrelFinprob, nope.as_ptr(), 3, 20, &mut s) };
    assert_eq!(status, DagrelStatus::DagrelInvalidInput);
}

#[test]
fn version_is_the_package_version() {
    let v = unsafe { CStr::from_ptr(dagrel_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// The generated header is valid C and declares everything a caller needs.
#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = std::path::Path::new(dir).join("include/dagrel.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["dagrel_morphism_from_json", "dagrel_compose", "dagrel_check_axioms", "DAGREL_INVALID_INPUT"] {
        assert!(text.contains(name), "{name}");
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"#include "dagrel.h"
int smoke(void) {
    DagrelMorphism *m = NULL;
    DagrelStatus s = dagrel_morphism_from_json(DAGREL_PINJ, "{}", &m);
    dagrel_morphism_free(m);
    return s == DAGREL_OK ? 0 : (int)s;
}
"#,
    )
    .unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = match Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
    {
        Ok(s) => s,
        Err(e) => {
            eprintln!("no C compiler ({cc}): {e}; header not compiled");
            return;
        }
    };
    assert!(status.success());
}
