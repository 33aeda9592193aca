use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use simplex_gauge_ffi::*;

fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { sg_string_free(p) };
    s
}

fn last_error() -> String {
    let p = sg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn complex_round_trip_and_homology() {
    let json = CString::new(r#"{"vertex_count":3,"maximal_simplices":[[0,1],[1,2],[0,2]]}"#).unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { sg_complex_from_json(json.as_ptr(), &mut c) }, SgStatus::Ok);
    let (mut rank, mut tors) = (0usize, 0usize);
    assert_eq!(unsafe { sg_homology(c, 1, &mut rank, &mut tors) }, SgStatus::Ok);
    assert_eq!((rank, tors), (1, 0));
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { sg_homology_json(c, 1, &mut s) }, SgStatus::Ok);
    assert_eq!(take_string(s), r#"{"k":1,"rank":1,"torsion":[]}"#);
    let mut n = 0usize;
    assert_eq!(unsafe { sg_complex_count(c, 1, &mut n) }, SgStatus::Ok);
    assert_eq!(n, 3);
    unsafe { sg_complex_free(c) };
}

#[test]
fn error_codes_and_messages() {
    let bad = CString::new("{not json").unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { sg_complex_from_json(bad.as_ptr(), &mut c) }, SgStatus::Config);
    assert!(c.is_null());
    assert!(!last_error().is_empty());

    let bad = CString::new(r#"{"vertex_count":2,"maximal_simplices":[[0,5]]}"#).unwrap();
    assert_eq!(unsafe { sg_complex_from_json(bad.as_ptr(), &mut c) }, SgStatus::InvalidInput);

    assert_eq!(unsafe { sg_complex_from_json(ptr::null(), &mut c) }, SgStatus::NullPointer);
    let mut n = 0usize;
    assert_eq!(unsafe { sg_complex_count(ptr::null(), 0, &mut n) }, SgStatus::NullPointer);

    let name = CString::new("no_such_fixture").unwrap();
    assert_eq!(unsafe { sg_complex_fixture(name.as_ptr(), 0, &mut c) }, SgStatus::InvalidInput);

    let ok = CString::new("triangle").unwrap();
    assert_eq!(unsafe { sg_complex_fixture(ok.as_ptr(), 0, &mut c) }, SgStatus::Ok);
    assert!(sg_last_error().is_null());
    unsafe { sg_complex_free(c) };
}

#[test]
fn bundle_connection_curvature() {
    let name = CString::new("triangle").unwrap();
    let gj = CString::new(r#"{"kind":"so","n":3}"#).unwrap();
    let (mut c, mut g, mut b, mut conn) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(sg_complex_fixture(name.as_ptr(), 0, &mut c), SgStatus::Ok);
        assert_eq!(sg_group_from_json(gj.as_ptr(), &mut g), SgStatus::Ok);
        assert_eq!(sg_bundle_trivial(c, g, &mut b), SgStatus::Ok);
        assert_eq!(sg_connection_identity(b, &mut conn), SgStatus::Ok);
        let tri = [0usize, 1, 2];
        let mut r = 0.0;
        assert_eq!(sg_scalar_curvature(conn, tri.as_ptr(), 0, &mut r), SgStatus::Ok);
        assert!((r - 3.0).abs() < 1e-12);
        let bad = [0usize, 1, 7];
        assert_ne!(sg_scalar_curvature(conn, bad.as_ptr(), 0, &mut r), SgStatus::Ok);

        let mut rc = ptr::null_mut();
        assert_eq!(sg_connection_random(b, 5, &mut rc), SgStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(sg_connection_to_json(rc, &mut s), SgStatus::Ok);
        let text = CString::new(take_string(s)).unwrap();
        let mut back = ptr::null_mut();
        assert_eq!(sg_connection_from_json(b, text.as_ptr(), &mut back), SgStatus::Ok);
        let (mut r1, mut r2) = (0.0, 0.0);
        assert_eq!(sg_scalar_curvature(rc, tri.as_ptr(), 1, &mut r1), SgStatus::Ok);
        assert_eq!(sg_scalar_curvature(back, tri.as_ptr(), 1, &mut r2), SgStatus::Ok);
        assert!((r1 - r2).abs() < 1e-12);

        let mut csv = ptr::null_mut();
        assert_eq!(sg_curvature_csv(conn, &mut csv), SgStatus::Ok);
        assert!(take_string(csv).starts_with("triangle,base_vertex,scalar_curvature"));

        let mut cls = ptr::null_mut();
        assert_eq!(sg_bundle_classes_json(b, &mut cls), SgStatus::Ok);
        assert!(!take_string(cls).contains("nontrivial"));

        sg_connection_free(back);
        sg_connection_free(rc);
        sg_connection_free(conn);
        sg_bundle_free(b);
        sg_group_free(g);
        sg_complex_free(c);
    }
}

#[test]
fn random_assignment_and_slots() {
    let name = CString::new("grid_torus").unwrap();
    let gj = CString::new(r#"{"kind":"circle"}"#).unwrap();
    let (mut c, mut g, mut b, mut b2) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(sg_complex_fixture(name.as_ptr(), 3, &mut c), SgStatus::Ok);
        assert_eq!(sg_group_from_json(gj.as_ptr(), &mut g), SgStatus::Ok);
        assert_eq!(sg_bundle_trivial(c, g, &mut b), SgStatus::Ok);
        let dims = [1usize];
        let classes = [1i64, -1];
        assert_eq!(sg_bundle_assign_random(b, dims.as_ptr(), 1, 0.5, classes.as_ptr(), 2, 0, 11, &mut b2), SgStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(sg_bundle_slots_json(b2, &mut s), SgStatus::Ok);
        let slots = CString::new(take_string(s)).unwrap();
        let mut b3 = ptr::null_mut();
        assert_eq!(sg_bundle_with_slots_json(b, slots.as_ptr(), &mut b3), SgStatus::Ok);
        let mut s3 = ptr::null_mut();
        assert_eq!(sg_bundle_slots_json(b3, &mut s3), SgStatus::Ok);
        assert_eq!(take_string(s3), slots.to_str().unwrap());
        assert_eq!(sg_bundle_assign_random(b, dims.as_ptr(), 1, 0.5, classes.as_ptr(), 2, 9, 11, &mut b2), SgStatus::InvalidInput);
        sg_bundle_free(b3);
        sg_bundle_free(b2);
        sg_bundle_free(b);
        sg_group_free(g);
        sg_complex_free(c);
    }
}

#[test]
fn run_config_reports_frustration() {
    let cfg = CString::new(r#"{"complex":{"kind":"fixture","name":"triangle"},"stages":["homology","ising"]}"#).unwrap();
    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { sg_run_config(cfg.as_ptr(), ptr::null(), &mut rep) }, SgStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(rep)).unwrap();
    assert_eq!(v["ising"]["frustrated_plaquettes"], 1);
    assert_eq!(v["ising"]["ground_degeneracy"], 6);

    let bad = CString::new(r#"{"complex":{"kind":"fixture","name":"triangle"},"stages":["optimize"]}"#).unwrap();
    assert_eq!(unsafe { sg_run_config(bad.as_ptr(), ptr::null(), &mut rep) }, SgStatus::Config);
    assert!(last_error().contains("$.stages[0]"));
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(sg_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_api_and_compiles() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include").join("simplex_gauge.h");
    let text = std::fs::read_to_string(&header).expect("generated header");
    for f in [
        "sg_last_error",
        "sg_string_free",
        "sg_complex_from_json",
        "sg_homology",
        "sg_bundle_trivial",
        "sg_connection_random",
        "sg_scalar_curvature",
        "sg_run_config",
        "typedef struct SgComplex SgComplex",
        "SG_STATUS_NULL_POINTER = 1",
    ] {
        assert!(text.contains(f), "header lacks {}", f);
    }
    let probe = dir.join("tests").join("header_probe.c");
    match Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-I"]).arg(dir.join("include")).arg(&probe).status() {
        Ok(s) => assert!(s.success(), "header does not compile as C"),
        Err(_) => eprintln!("no C compiler found; skipped compile check"),
    }
}
