//! C ABI for the fuzzy set system library.
//!
//! Instances are opaque handles created from the same JSON documents the
//! CLI consumes. Rationals cross the boundary as (numerator,
//! denominator) pairs of 64-bit integers; structured results come back
//! as canonical JSON strings that the caller releases with
//! [`fvc_string_free`]. Every function returns an [`FvcStatus`]; on any
//! failure a thread-local message is retrievable via
//! [`fvc_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fuzzy_vc::instance::{self, InstanceFile};
use fuzzy_vc::measure::DiscreteMeasure;
use fuzzy_vc::nets::{self, NetStrategy};
use fuzzy_vc::rat::{self, Rat};
use fuzzy_vc::system::sauer_bound;
use fuzzy_vc::transversal;
use fuzzy_vc::Error;

/// Status codes mirrored from the library's error kinds.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FvcStatus {
    Ok = 0,
    /// A pointer argument was null or otherwise unusable.
    InvalidArgument = 1,
    /// Input bytes failed schema or invariant validation.
    ParseError = 2,
    /// An argument was outside an operation's domain.
    DomainError = 3,
    /// The instance is too large for an exhaustive operation.
    CapacityError = 4,
    /// No feasible object exists.
    Infeasible = 5,
    /// A bounded search ended without a witness.
    NotFound = 6,
    /// A stated hypothesis failed on the input.
    HypothesisFailed = 7,
    /// An internal invariant was violated; report a bug.
    InternalError = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error").expect("static"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn status_of(e: &Error) -> FvcStatus {
    match e {
        Error::Domain(_) => FvcStatus::DomainError,
        Error::Capacity(_) => FvcStatus::CapacityError,
        Error::Infeasible(_) => FvcStatus::Infeasible,
        Error::NotFound { .. } => FvcStatus::NotFound,
        Error::Hypothesis(_) => FvcStatus::HypothesisFailed,
        Error::Parse { .. } => FvcStatus::ParseError,
        Error::Internal(_) => FvcStatus::InternalError,
    }
}

fn fail(e: &Error) -> FvcStatus {
    set_error(e.to_string());
    status_of(e)
}

fn invalid(message: &str) -> FvcStatus {
    set_error(message.to_string());
    FvcStatus::InvalidArgument
}

/// Opaque parsed instance.
pub struct FvcInstance {
    inner: InstanceFile,
}

fn guarded(body: impl FnOnce() -> FvcStatus) -> FvcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("panic across the C boundary".to_string());
            FvcStatus::InternalError
        }
    }
}

/// # Safety
/// `h` must be null or a handle from `fvc_instance_parse`.
unsafe fn instance_ref<'a>(h: *const FvcInstance) -> Option<&'a InstanceFile> {
    h.as_ref().map(|h| &h.inner)
}

fn out_string(out: *mut *mut c_char, text: String) -> FvcStatus {
    let Ok(cstring) = CString::new(text) else {
        return invalid("result contained interior NUL");
    };
    unsafe { *out = cstring.into_raw() };
    FvcStatus::Ok
}

fn make_rat(num: i64, den: i64) -> Result<Rat, FvcStatus> {
    if den <= 0 {
        set_error(format!("denominator must be positive, got {den}"));
        return Err(FvcStatus::DomainError);
    }
    Ok(rat::rat(num, den))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fvc_version() -> *const c_char {
    const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Copy of the most recent error message on this thread, or null when no
/// error has occurred. Release with `fvc_string_free`.
#[no_mangle]
pub extern "C" fn fvc_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer previously returned by this library.
#[no_mangle]
pub unsafe extern "C" fn fvc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance document (any of the five schemas) into a handle.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fvc_instance_parse(
    json: *const c_char,
    out: *mut *mut FvcInstance,
) -> FvcStatus {
    guarded(|| {
        if json.is_null() || out.is_null() {
            return invalid("null argument to fvc_instance_parse");
        }
        let bytes = unsafe { CStr::from_ptr(json) }.to_bytes();
        match instance::parse_instance(bytes) {
            Ok(inner) => {
                let handle = Box::new(FvcInstance { inner });
                unsafe { *out = Box::into_raw(handle) };
                FvcStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases an instance handle.
///
/// # Safety
/// `h` must be null or a handle from `fvc_instance_parse`.
#[no_mangle]
pub unsafe extern "C" fn fvc_instance_free(h: *mut FvcInstance) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Writes the instance's type tag ("fuzzy_system", "measure", ...).
///
/// # Safety
/// `h` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fvc_instance_kind(
    h: *const FvcInstance,
    out: *mut *mut c_char,
) -> FvcStatus {
    guarded(|| {
        let (Some(inst), false) = (unsafe { instance_ref(h) }, out.is_null()) else {
            return invalid("null argument to fvc_instance_kind");
        };
        out_string(out, inst.type_tag().to_string())
    })
}

/// Canonical JSON (sorted keys, no whitespace) of the instance.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fvc_instance_canonical_json(
    h: *const FvcInstance,
    out: *mut *mut c_char,
) -> FvcStatus {
    guarded(|| {
        let (Some(inst), false) = (unsafe { instance_ref(h) }, out.is_null()) else {
            return invalid("null argument to fvc_instance_canonical_json");
        };
        out_string(out, instance::canonical_json(inst))
    })
}

/// Hex SHA-256 digest of the canonical bytes.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fvc_instance_digest(
    h: *const FvcInstance,
    out: *mut *mut c_char,
) -> FvcStatus {
    guarded(|| {
        let (Some(inst), false) = (unsafe { instance_ref(h) }, out.is_null()) else {
            return invalid("null argument to fvc_instance_digest");
        };
        out_string(out, instance::digest(inst))
    })
}

fn as_fuzzy(inst: &InstanceFile) -> Result<fuzzy_vc::FuzzySetSystem, FvcStatus> {
    match inst {
        InstanceFile::FuzzySystem(f) => Ok(f.clone()),
        InstanceFile::SetSystem(s) => Ok(s.to_fuzzy()),
        other => {
            set_error(format!(
                "expected a fuzzy or crisp set system, got {}",
                other.type_tag()
            ));
            Err(FvcStatus::DomainError)
        }
    }
}

/// VC-dimension of a fuzzy or crisp set system; -1 encodes the absent
/// value of the empty family.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fvc_vc_dimension(h: *const FvcInstance, out: *mut i64) -> FvcStatus {
    guarded(|| {
        let (Some(inst), false) = (unsafe { instance_ref(h) }, out.is_null()) else {
            return invalid("null argument to fvc_vc_dimension");
        };
        let f = match as_fuzzy(inst) {
            Ok(f) => f,
            Err(status) => return status,
        };
        let value = f.vc_dimension().map(|d| d as i64).unwrap_or(-1);
        unsafe { *out = value };
        FvcStatus::Ok
    })
}

/// Shatter function value at `n`.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fvc_shatter_function(
    h: *const FvcInstance,
    n: u64,
    out: *mut u64,
) -> FvcStatus {
    guarded(|| {
        let (Some(inst), false) = (unsafe { instance_ref(h) }, out.is_null()) else {
            return invalid("null argument to fvc_shatter_function");
        };
        let f = match as_fuzzy(inst) {
            Ok(f) => f,
            Err(status) => return status,
        };
        let Ok(n) = usize::try_from(n) else {
            return invalid("n does not fit this platform");
        };
        match f.shatter_function(n) {
            Ok(v) => {
                unsafe { *out = v as u64 };
                FvcStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// The polynomial shatter bound `sum_{k <= d} n^k` as a decimal string.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fvc_sauer_bound(d: u64, n: u64, out: *mut *mut c_char) -> FvcStatus {
    guarded(|| {
        if out.is_null() {
            return invalid("null output pointer");
        }
        let (Ok(d), Ok(n)) = (usize::try_from(d), usize::try_from(n)) else {
            return invalid("arguments do not fit this platform");
        };
        out_string(out, sauer_bound(d, n).to_string())
    })
}

/// Fat-shattering dimension of a function class at gap `num/den`.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fvc_fat_shattering(
    h: *const FvcInstance,
    eps_num: i64,
    eps_den: i64,
    out: *mut u64,
) -> FvcStatus {
    guarded(|| {
        let (Some(inst), false) = (unsafe { instance_ref(h) }, out.is_null()) else {
            return invalid("null argument to fvc_fat_shattering");
        };
        let InstanceFile::FunctionClass(q) = inst else {
            return invalid("expected a function class handle");
        };
        let eps = match make_rat(eps_num, eps_den) {
            Ok(r) => r,
            Err(status) => return status,
        };
        match q.fat_shattering(&eps) {
            Ok(v) => {
                unsafe { *out = v as u64 };
                FvcStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Gap VC-dimension of a function class at gap `num/den`.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fvc_vc_eps(
    h: *const FvcInstance,
    eps_num: i64,
    eps_den: i64,
    out: *mut u64,
) -> FvcStatus {
    guarded(|| {
        let (Some(inst), false) = (unsafe { instance_ref(h) }, out.is_null()) else {
            return invalid("null argument to fvc_vc_eps");
        };
        let InstanceFile::FunctionClass(q) = inst else {
            return invalid("expected a function class handle");
        };
        let eps = match make_rat(eps_num, eps_den) {
            Ok(r) => r,
            Err(status) => return status,
        };
        match q.vc_eps(&eps) {
            Ok(v) => {
                unsafe { *out = v as u64 };
                FvcStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Fractional transversal of a crisp set system, as canonical JSON
/// `{"tau_star": "p/q", "weights": ["p/q", ...]}`.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fvc_fractional_transversal(
    h: *const FvcInstance,
    out: *mut *mut c_char,
) -> FvcStatus {
    guarded(|| {
        let (Some(inst), false) = (unsafe { instance_ref(h) }, out.is_null()) else {
            return invalid("null argument to fvc_fractional_transversal");
        };
        let InstanceFile::SetSystem(s) = inst else {
            return invalid("expected a set system handle");
        };
        match transversal::fractional_transversal(s) {
            Ok((tau, weights)) => {
                let payload = serde_json::json!({
                    "tau_star": rat::format_rat(&tau),
                    "weights": weights.iter().map(rat::format_rat).collect::<Vec<_>>(),
                });
                out_string(out, payload.to_string())
            }
            Err(e) => fail(&e),
        }
    })
}

/// Exact minimum transversal size of a crisp set system.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fvc_transversal_number(
    h: *const FvcInstance,
    out: *mut u64,
) -> FvcStatus {
    guarded(|| {
        let (Some(inst), false) = (unsafe { instance_ref(h) }, out.is_null()) else {
            return invalid("null argument to fvc_transversal_number");
        };
        let InstanceFile::SetSystem(s) = inst else {
            return invalid("expected a set system handle");
        };
        match transversal::transversal_number(s) {
            Ok(v) => {
                unsafe { *out = v as u64 };
                FvcStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Greedy verified eps-net of a fuzzy system under a measure handle
/// (null measure means uniform), as canonical JSON
/// `{"net": [..], "heavy_sets": n}`.
///
/// # Safety
/// `h` and `measure` must be live handles (measure may be null); `out`
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn fvc_find_eps_net_greedy(
    h: *const FvcInstance,
    measure: *const FvcInstance,
    eps_num: i64,
    eps_den: i64,
    out: *mut *mut c_char,
) -> FvcStatus {
    guarded(|| {
        let (Some(inst), false) = (unsafe { instance_ref(h) }, out.is_null()) else {
            return invalid("null argument to fvc_find_eps_net_greedy");
        };
        let system = match as_fuzzy(inst) {
            Ok(f) => f,
            Err(status) => return status,
        };
        let mu = if measure.is_null() {
            match DiscreteMeasure::uniform(system.ground_size().max(1)) {
                Ok(m) => m,
                Err(e) => return fail(&e),
            }
        } else {
            match unsafe { instance_ref(measure) } {
                Some(InstanceFile::Measure(m)) => m.clone(),
                Some(other) => {
                    set_error(format!("expected a measure handle, got {}", other.type_tag()));
                    return FvcStatus::InvalidArgument;
                }
                None => return invalid("dangling measure handle"),
            }
        };
        let eps = match make_rat(eps_num, eps_den) {
            Ok(r) => r,
            Err(status) => return status,
        };
        match nets::find_eps_net(&system, &mu, &eps, NetStrategy::Greedy) {
            Ok(cert) => {
                let payload = serde_json::json!({
                    "net": cert.net,
                    "heavy_sets": cert.heavy_sets,
                    "checked_sets": cert.checked_sets,
                });
                out_string(out, payload.to_string())
            }
            Err(e) => fail(&e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> *mut FvcInstance {
        let json = CString::new(text).unwrap();
        let mut handle: *mut FvcInstance = ptr::null_mut();
        let status = unsafe { fvc_instance_parse(json.as_ptr(), &mut handle) };
        assert_eq!(status, FvcStatus::Ok);
        handle
    }

    fn take_string(ptr: *mut c_char) -> String {
        assert!(!ptr.is_null());
        let text = unsafe { CStr::from_ptr(ptr) }.to_string_lossy().into_owned();
        unsafe { fvc_string_free(ptr) };
        text
    }

    #[test]
    fn parse_query_free_cycle() {
        let h = parse(r#"{"type":"set_system","ground_size":3,"sets":[[0,1],[1,2],[0,2]]}"#);
        let mut vc = -2i64;
        assert_eq!(unsafe { fvc_vc_dimension(h, &mut vc) }, FvcStatus::Ok);
        assert_eq!(vc, 1);

        let mut tau = 0u64;
        assert_eq!(unsafe { fvc_transversal_number(h, &mut tau) }, FvcStatus::Ok);
        assert_eq!(tau, 2);

        let mut json_out: *mut c_char = ptr::null_mut();
        assert_eq!(
            unsafe { fvc_fractional_transversal(h, &mut json_out) },
            FvcStatus::Ok
        );
        let text = take_string(json_out);
        assert!(text.contains("\"tau_star\":\"3/2\""), "{text}");
        unsafe { fvc_instance_free(h) };
    }

    #[test]
    fn parse_error_reports_status_and_message() {
        let json = CString::new(r#"{"type":"measure","weights":["1/2","1/3"]}"#).unwrap();
        let mut handle: *mut FvcInstance = ptr::null_mut();
        let status = unsafe { fvc_instance_parse(json.as_ptr(), &mut handle) };
        assert_eq!(status, FvcStatus::ParseError);
        assert!(handle.is_null());
        let msg = take_string(fvc_last_error_message());
        assert!(msg.contains("sum"), "{msg}");
    }

    #[test]
    fn null_arguments_are_rejected() {
        let mut out = 0i64;
        assert_eq!(
            unsafe { fvc_vc_dimension(ptr::null(), &mut out) },
            FvcStatus::InvalidArgument
        );
        assert_eq!(
            unsafe { fvc_instance_parse(ptr::null(), ptr::null_mut()) },
            FvcStatus::InvalidArgument
        );
    }
}
