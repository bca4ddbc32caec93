//! C ABI over `qdc-core`.
//!
//! Every function returns a [`QdcStatus`]. Results come back through out
//! pointers; on failure the out pointer is left untouched and
//! [`qdc_last_error_message`] describes the problem. Strings handed out by
//! the library must be released with [`qdc_string_free`], handles with their
//! matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qdc_core::discovery::{ic_star, reference_pattern, DistributionOracle, Pattern};
use qdc_core::distributions::{DistError, JointDistribution};
use qdc_core::enumeration::{enumerate_structures, no_go_report, DetectionOrdering};
use qdc_core::json::to_canonical_string;
use qdc_core::qsim::{self, CircuitParams};

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Unconditionable = 4,
    Internal = 5,
}

/// Opaque probability table.
pub struct QdcDistribution(JointDistribution);

/// Opaque IC* pattern.
pub struct QdcPattern(Pattern);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes stripped"));
}

struct Fail(QdcStatus, String);

impl From<DistError> for Fail {
    fn from(e: DistError) -> Self {
        let code = match e {
            DistError::Unconditionable(_) => QdcStatus::Unconditionable,
            _ => QdcStatus::InvalidArgument,
        };
        Fail(code, e.to_string())
    }
}

fn invalid(e: impl ToString) -> Fail {
    Fail(QdcStatus::InvalidArgument, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QdcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            QdcStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            QdcStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(QdcStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail(QdcStatus::NullPointer, format!("{what} is null")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(QdcStatus::NullPointer, format!("{what} is null")))
}

fn params(eta: f64, alpha: f64, phi: f64) -> Result<CircuitParams, Fail> {
    CircuitParams::new(eta, alpha, phi).map_err(|e| Fail(QdcStatus::Domain, e.to_string()))
}

fn to_c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s).map(CString::into_raw).map_err(|_| Fail(QdcStatus::Internal, "nul byte in output".into()))
}

fn json<T: serde::Serialize>(v: &T) -> Result<*mut c_char, Fail> {
    to_c_string(to_canonical_string(v).map_err(|e| Fail(QdcStatus::Internal, e.to_string()))?)
}

/// Message for the last failing call on this thread; empty after success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn qdc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn qdc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Writes the 8-entry joint table `P(a,b,c)` (index `4a+2b+c`) from the
/// closed form into `out`, which must hold `len == 8` doubles.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qdc_simulate(eta: f64, alpha: f64, phi: f64, out: *mut f64, len: usize) -> QdcStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail(QdcStatus::NullPointer, "out is null".into()));
        }
        if len != 8 {
            return Err(invalid(format!("expected a buffer of 8 doubles, got {len}")));
        }
        let p = params(eta, alpha, phi)?;
        let dist = qsim::joint_distribution(&qsim::closed_form_state(&p));
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(dist.probabilities());
        Ok(())
    })
}

/// Largest entrywise gap between the closed form and the simulated circuit.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdc_circuit_residual(eta: f64, alpha: f64, phi: f64, out: *mut f64) -> QdcStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = qsim::circuit_residual(&params(eta, alpha, phi)?);
        Ok(())
    })
}

/// Detection distribution over A, B, C for the given circuit parameters.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdc_distribution_from_params(
    eta: f64,
    alpha: f64,
    phi: f64,
    out: *mut *mut QdcDistribution,
) -> QdcStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let dist = qsim::joint_distribution(&qsim::closed_form_state(&params(eta, alpha, phi)?));
        *out = Box::into_raw(Box::new(QdcDistribution(dist)));
        Ok(())
    })
}

/// Parses `{"variables": [...], "probabilities": [...]}`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdc_distribution_from_json(json: *const c_char, out: *mut *mut QdcDistribution) -> QdcStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let out = out_arg(out, "out")?;
        let dist: JointDistribution = serde_json::from_str(text).map_err(invalid)?;
        *out = Box::into_raw(Box::new(QdcDistribution(dist)));
        Ok(())
    })
}

/// # Safety
/// `h` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn qdc_distribution_free(h: *mut QdcDistribution) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdc_distribution_to_json(h: *const QdcDistribution, out: *mut *mut c_char) -> QdcStatus {
    guard(|| {
        let d = handle(h, "distribution")?;
        let out = out_arg(out, "out")?;
        *out = json(&d.0)?;
        Ok(())
    })
}

fn csv(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|v| !v.is_empty()).collect()
}

/// `x ⫫ y | given`, each argument a comma-separated variable list
/// (`given` may be empty).
///
/// # Safety
/// String arguments must be nul-terminated; `h` live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qdc_distribution_is_ci(
    h: *const QdcDistribution,
    x: *const c_char,
    y: *const c_char,
    given: *const c_char,
    tol: f64,
    out: *mut bool,
) -> QdcStatus {
    guard(|| {
        let d = handle(h, "distribution")?;
        let (x, y, given) = (csv(str_arg(x, "x")?), csv(str_arg(y, "y")?), csv(str_arg(given, "given")?));
        let out = out_arg(out, "out")?;
        *out = d.0.is_conditionally_independent(&x, &y, &given, tol)?;
        Ok(())
    })
}

/// Conditions on `evidence` (`"B=0,C=1"`) and returns a new handle.
///
/// # Safety
/// `evidence` must be nul-terminated; `h` live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qdc_distribution_condition(
    h: *const QdcDistribution,
    evidence: *const c_char,
    out: *mut *mut QdcDistribution,
) -> QdcStatus {
    guard(|| {
        let d = handle(h, "distribution")?;
        let text = str_arg(evidence, "evidence")?;
        let out = out_arg(out, "out")?;
        let mut ev = Vec::new();
        for item in csv(text) {
            let (name, value) = item.split_once('=').ok_or_else(|| invalid(format!("bad evidence item `{item}`")))?;
            let value: u8 = value.trim().parse().map_err(|_| invalid(format!("bad value in `{item}`")))?;
            ev.push((name.trim(), value));
        }
        *out = Box::into_raw(Box::new(QdcDistribution(d.0.condition(&ev)?)));
        Ok(())
    })
}

/// All pairwise relations at `tol`, closed under the semi-graphoid axioms,
/// as a JSON array.
///
/// # Safety
/// `h` live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qdc_distribution_ci_relations_json(
    h: *const QdcDistribution,
    tol: f64,
    out: *mut *mut c_char,
) -> QdcStatus {
    guard(|| {
        let d = handle(h, "distribution")?;
        let out = out_arg(out, "out")?;
        *out = json(&d.0.all_ci_relations(tol)?.semigraphoid_closure())?;
        Ok(())
    })
}

/// IC* over the distribution's variables.
///
/// # Safety
/// `h` live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qdc_pattern_discover(
    h: *const QdcDistribution,
    tol: f64,
    out: *mut *mut QdcPattern,
) -> QdcStatus {
    guard(|| {
        let d = handle(h, "distribution")?;
        let out = out_arg(out, "out")?;
        let vars: Vec<&str> = d.0.variables().iter().map(String::as_str).collect();
        let p = ic_star(&DistributionOracle::new(&d.0, tol), &vars).map_err(invalid)?;
        *out = Box::into_raw(Box::new(QdcPattern(p)));
        Ok(())
    })
}

/// The chain `A o-o B o-o C` with `S_AC = {B}`.
///
/// # Safety
/// `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qdc_pattern_reference(out: *mut *mut QdcPattern) -> QdcStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(QdcPattern(reference_pattern())));
        Ok(())
    })
}

/// # Safety
/// `h` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn qdc_pattern_free(h: *mut QdcPattern) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qdc_pattern_to_json(h: *const QdcPattern, out: *mut *mut c_char) -> QdcStatus {
    guard(|| {
        let p = handle(h, "pattern")?;
        let out = out_arg(out, "out")?;
        *out = json(&p.0)?;
        Ok(())
    })
}

/// Structures for one detection ordering (`"ACB"` or `"A<C<B"`) as a JSON
/// array of graphs; `count` receives the group size.
///
/// # Safety
/// `ordering` nul-terminated; `h` live; `out` and `count` valid.
#[no_mangle]
pub unsafe extern "C" fn qdc_enumerate_json(
    h: *const QdcPattern,
    ordering: *const c_char,
    out: *mut *mut c_char,
    count: *mut usize,
) -> QdcStatus {
    guard(|| {
        let p = handle(h, "pattern")?;
        let ord: DetectionOrdering = str_arg(ordering, "ordering")?.parse().map_err(invalid)?;
        let out = out_arg(out, "out")?;
        let count = out_arg(count, "count")?;
        let structures = enumerate_structures(&p.0, &ord).map_err(invalid)?;
        let graphs: Vec<_> = structures.iter().map(|s| s.graph()).collect();
        *out = json(&graphs)?;
        *count = structures.len();
        Ok(())
    })
}

/// Full no-go report over the six orderings; `passed` receives whether every
/// assertion held.
///
/// # Safety
/// `h` live; `out` and `passed` valid.
#[no_mangle]
pub unsafe extern "C" fn qdc_no_go_report_json(
    h: *const QdcPattern,
    out: *mut *mut c_char,
    passed: *mut bool,
) -> QdcStatus {
    guard(|| {
        let p = handle(h, "pattern")?;
        let out = out_arg(out, "out")?;
        let passed = out_arg(passed, "passed")?;
        let report = no_go_report(&p.0).map_err(invalid)?;
        *out = json(&report)?;
        *passed = report.passed;
        Ok(())
    })
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn qdc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
