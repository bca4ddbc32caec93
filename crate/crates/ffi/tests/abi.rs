use std::ffi::{CStr, CString};
use std::ptr;

use qdc_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { qdc_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(qdc_last_error_message()) }.to_str().unwrap().to_owned()
}

#[test]
fn simulate_fills_table() {
    let mut buf = [0.0f64; 8];
    assert_eq!(unsafe { qdc_simulate(1.0, 0.0, 0.0, buf.as_mut_ptr(), 8) }, QdcStatus::Ok);
    assert!((buf[0] - 0.5).abs() < 1e-12 && (buf[4] - 0.5).abs() < 1e-12);
    assert!(buf.iter().enumerate().filter(|(i, _)| *i != 0 && *i != 4).all(|(_, p)| p.abs() < 1e-12));
    assert_eq!(last_error(), "");

    assert_eq!(unsafe { qdc_simulate(-0.5, 0.0, 0.0, buf.as_mut_ptr(), 8) }, QdcStatus::Domain);
    assert!(last_error().contains("eta"));
    assert_eq!(unsafe { qdc_simulate(0.5, 0.0, 0.0, buf.as_mut_ptr(), 4) }, QdcStatus::InvalidArgument);
    assert_eq!(unsafe { qdc_simulate(0.5, 0.0, 0.0, ptr::null_mut(), 8) }, QdcStatus::NullPointer);

    let mut r = 1.0;
    assert_eq!(unsafe { qdc_circuit_residual(0.3, 0.4, 0.5, &mut r) }, QdcStatus::Ok);
    assert!(r <= 1e-12);
}

#[test]
fn distribution_handle_lifecycle() {
    let mut d = ptr::null_mut();
    assert_eq!(
        unsafe { qdc_distribution_from_params(0.5, 0.5235987755982988, 1.0471975511965976, &mut d) },
        QdcStatus::Ok
    );

    let (a, c, b, empty) =
        (CString::new("A").unwrap(), CString::new("C").unwrap(), CString::new("B").unwrap(), CString::new("").unwrap());
    let mut ind = false;
    assert_eq!(unsafe { qdc_distribution_is_ci(d, a.as_ptr(), c.as_ptr(), b.as_ptr(), 1e-9, &mut ind) }, QdcStatus::Ok);
    assert!(ind);
    assert_eq!(
        unsafe { qdc_distribution_is_ci(d, a.as_ptr(), c.as_ptr(), empty.as_ptr(), 1e-9, &mut ind) },
        QdcStatus::Ok
    );
    assert!(!ind);
    assert_eq!(
        unsafe { qdc_distribution_is_ci(d, a.as_ptr(), a.as_ptr(), empty.as_ptr(), 1e-9, &mut ind) },
        QdcStatus::InvalidArgument
    );

    let mut rel = ptr::null_mut();
    assert_eq!(unsafe { qdc_distribution_ci_relations_json(d, 1e-9, &mut rel) }, QdcStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(rel)).unwrap();
    assert_eq!(v, serde_json::json!([{"x": ["A"], "y": ["C"], "given": ["B"]}]));

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { qdc_distribution_to_json(d, &mut text) }, QdcStatus::Ok);
    let json = CString::new(take(text)).unwrap();
    let mut d2 = ptr::null_mut();
    assert_eq!(unsafe { qdc_distribution_from_json(json.as_ptr(), &mut d2) }, QdcStatus::Ok);
    unsafe { qdc_distribution_free(d2) };

    let ev = CString::new("B=0").unwrap();
    let mut cond = ptr::null_mut();
    assert_eq!(unsafe { qdc_distribution_condition(d, ev.as_ptr(), &mut cond) }, QdcStatus::Ok);
    unsafe { qdc_distribution_free(cond) };
    unsafe { qdc_distribution_free(d) };
    unsafe { qdc_distribution_free(ptr::null_mut()) };
}

#[test]
fn unconditionable_evidence_has_its_own_code() {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { qdc_distribution_from_params(1.0, 0.3, 0.3, &mut d) }, QdcStatus::Ok);
    let ev = CString::new("B=1").unwrap();
    let mut cond = ptr::null_mut();
    assert_eq!(unsafe { qdc_distribution_condition(d, ev.as_ptr(), &mut cond) }, QdcStatus::Unconditionable);
    assert!(cond.is_null());
    let bad = CString::new("B").unwrap();
    assert_eq!(unsafe { qdc_distribution_condition(d, bad.as_ptr(), &mut cond) }, QdcStatus::InvalidArgument);
    unsafe { qdc_distribution_free(d) };
}

#[test]
fn bad_json_is_rejected() {
    let bad = CString::new(r#"{"variables": ["A"], "probabilities": [0.9, 0.9]}"#).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { qdc_distribution_from_json(bad.as_ptr(), &mut d) }, QdcStatus::InvalidArgument);
    assert!(d.is_null());
    assert_eq!(unsafe { qdc_distribution_from_json(ptr::null(), &mut d) }, QdcStatus::NullPointer);
}

#[test]
fn pattern_and_enumeration() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { qdc_pattern_reference(&mut p) }, QdcStatus::Ok);
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { qdc_pattern_to_json(p, &mut text) }, QdcStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(text)).unwrap();
    assert_eq!(v["separating_sets"]["A|C"], serde_json::json!(["B"]));

    let mut counts = Vec::new();
    for ord in ["ABC", "BAC", "BCA", "CBA", "ACB", "CAB"] {
        let o = CString::new(ord).unwrap();
        let mut n = usize::MAX;
        assert_eq!(unsafe { qdc_enumerate_json(p, o.as_ptr(), &mut text, &mut n) }, QdcStatus::Ok);
        let graphs: serde_json::Value = serde_json::from_str(&take(text)).unwrap();
        assert_eq!(graphs.as_array().unwrap().len(), n);
        counts.push(n);
    }
    assert_eq!(counts, [3, 5, 5, 3, 0, 0]);

    let bad = CString::new("ABB").unwrap();
    let mut n = 0;
    assert_eq!(unsafe { qdc_enumerate_json(p, bad.as_ptr(), &mut text, &mut n) }, QdcStatus::InvalidArgument);

    let mut passed = false;
    assert_eq!(unsafe { qdc_no_go_report_json(p, &mut text, &mut passed) }, QdcStatus::Ok);
    assert!(passed);
    let report: serde_json::Value = serde_json::from_str(&take(text)).unwrap();
    assert_eq!(report["max_hidden_count"], 1);
    unsafe { qdc_pattern_free(p) };
    assert_eq!(unsafe { qdc_pattern_to_json(ptr::null(), &mut text) }, QdcStatus::NullPointer);
}

#[test]
fn discovery_through_handles() {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { qdc_distribution_from_params(0.5, 0.5, 1.0, &mut d) }, QdcStatus::Ok);
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { qdc_pattern_discover(d, 1e-9, &mut p) }, QdcStatus::Ok);
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { qdc_pattern_to_json(p, &mut text) }, QdcStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(text)).unwrap();
    let marks: Vec<&str> = v["edges"].as_array().unwrap().iter().map(|e| e["mark"].as_str().unwrap()).collect();
    assert_eq!(marks, ["oo", "oo"]);
    unsafe {
        qdc_pattern_free(p);
        qdc_distribution_free(d);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(qdc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
