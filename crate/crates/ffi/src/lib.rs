//! C ABI over the nash-welfare solvers.
//!
//! Instances and allocations travel as JSON (the same schema the CLI uses)
//! and live behind opaque handles. Every fallible call returns an
//! `nw_status`; the message of the most recent failure on the calling
//! thread is available via `nw_last_error`. Strings returned through
//! `char**` out-parameters are owned by the caller and must be released
//! with `nw_string_free`.
//!
//! The header mirroring these declarations is `include/nash_welfare.h`.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, c_uint, c_ulonglong, CStr, CString};

use nash_welfare::envy::wwef1_violations;
use nash_welfare::error::Error;
use nash_welfare::io;
use nash_welfare::rat::rat_frac;
use nash_welfare::repair::repair_output;
use nash_welfare::solver::{solve, Method, SolveOptions};
use nash_welfare::welfare::{nash_welfare, PExponent};
use nash_welfare::{Allocation, Instance, Rat};

/// Status codes; 0 is success. Parse/validation, budget and unsupported
/// mirror the CLI exit codes.
pub const NW_OK: c_int = 0;
pub const NW_ERR_IO: c_int = 1;
pub const NW_ERR_PARSE: c_int = 2;
pub const NW_ERR_BUDGET: c_int = 3;
pub const NW_ERR_UNSUPPORTED: c_int = 4;
pub const NW_ERR_INVALID_ARGUMENT: c_int = 5;
pub const NW_ERR_INTERNAL: c_int = 6;

pub struct NwInstance(Instance);
pub struct NwAllocation(Allocation);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized: String = message.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> c_int {
    match err {
        Error::Parse { .. } | Error::InvalidAllocation(_) => NW_ERR_PARSE,
        Error::Budget { .. } => NW_ERR_BUDGET,
        Error::Unsupported(_) => NW_ERR_UNSUPPORTED,
        Error::InvalidParameter(_) => NW_ERR_INVALID_ARGUMENT,
        Error::Internal(_) => NW_ERR_INTERNAL,
    }
}

fn fail(err: &Error) -> c_int {
    set_error(&err.to_string());
    status_of(err)
}

fn fail_arg(message: &str) -> c_int {
    set_error(message);
    NW_ERR_INVALID_ARGUMENT
}

/// # Safety
/// `ptr` must be a valid NUL-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, c_int> {
    if ptr.is_null() {
        return Err(fail_arg(&format!("{what} must not be NULL")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail_arg(&format!("{what} is not valid UTF-8")))
}

fn give_string(text: String, out: *mut *mut c_char) -> c_int {
    let c = match CString::new(text) {
        Ok(c) => c,
        Err(_) => return fail_arg("output contains interior NUL"),
    };
    unsafe { *out = c.into_raw() };
    NW_OK
}

/// Library version as a static string; never freed.
#[no_mangle]
pub extern "C" fn nw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent failure on this thread. Valid until the next
/// failing call on the same thread; never freed by the caller.
#[no_mangle]
pub extern "C" fn nw_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn nw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `json` must be a valid NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_instance_parse(
    json: *const c_char,
    out: *mut *mut NwInstance,
) -> c_int {
    if out.is_null() {
        return fail_arg("out must not be NULL");
    }
    let text = match read_str(json, "json") {
        Ok(t) => t,
        Err(code) => return code,
    };
    match io::parse_instance(text) {
        Ok(instance) => {
            *out = Box::into_raw(Box::new(NwInstance(instance)));
            NW_OK
        }
        Err(e) => fail(&e),
    }
}

/// # Safety
/// `inst` must come from `nw_instance_parse` and not be freed yet.
#[no_mangle]
pub unsafe extern "C" fn nw_instance_to_json(
    inst: *const NwInstance,
    out: *mut *mut c_char,
) -> c_int {
    if inst.is_null() || out.is_null() {
        return fail_arg("inst and out must not be NULL");
    }
    give_string(io::serialize_instance(&(*inst).0), out)
}

/// # Safety
/// `inst` must come from `nw_instance_parse`; double frees are undefined.
#[no_mangle]
pub unsafe extern "C" fn nw_instance_free(inst: *mut NwInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn nw_instance_agents(inst: *const NwInstance) -> usize {
    if inst.is_null() {
        return 0;
    }
    (*inst).0.agent_count()
}

/// # Safety
/// `inst` must be a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn nw_instance_goods(inst: *const NwInstance) -> usize {
    if inst.is_null() {
        return 0;
    }
    (*inst).0.good_count()
}

/// # Safety
/// `json` must be a valid NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_allocation_parse(
    json: *const c_char,
    out: *mut *mut NwAllocation,
) -> c_int {
    if out.is_null() {
        return fail_arg("out must not be NULL");
    }
    let text = match read_str(json, "json") {
        Ok(t) => t,
        Err(code) => return code,
    };
    match io::parse_allocation(text) {
        Ok(allocation) => {
            *out = Box::into_raw(Box::new(NwAllocation(allocation)));
            NW_OK
        }
        Err(e) => fail(&e),
    }
}

/// # Safety
/// `alloc` must be a live allocation handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_allocation_to_json(
    alloc: *const NwAllocation,
    out: *mut *mut c_char,
) -> c_int {
    if alloc.is_null() || out.is_null() {
        return fail_arg("alloc and out must not be NULL");
    }
    give_string(io::serialize_allocation(&(*alloc).0), out)
}

/// # Safety
/// `alloc` must come from this library; double frees are undefined.
#[no_mangle]
pub unsafe extern "C" fn nw_allocation_free(alloc: *mut NwAllocation) {
    if !alloc.is_null() {
        drop(Box::from_raw(alloc));
    }
}

/// Solves an instance.
///
/// `method`: "auto", "ptas", "pmean", "kary", "two-valuable", "fptas" or
/// "oracle". `epsilon`: approximation parameter, <= 0 for the default 0.5.
/// `lambda`: 0 derives the rounding precision from epsilon. `p`: p-mean
/// exponent string ("1", "-1", "-inf"), NULL for the Nash objective.
/// `repair`: nonzero runs the wwEF1 transfer repair on the result.
/// `budget`: state budget, 0 for the default. `zero_optimum` (optional)
/// receives 1 when the solver proved the optimum welfare is zero.
///
/// # Safety
/// Pointer arguments must be valid as described above.
#[no_mangle]
pub unsafe extern "C" fn nw_solve(
    inst: *const NwInstance,
    method: *const c_char,
    epsilon: c_double,
    lambda: c_uint,
    p: *const c_char,
    repair: c_int,
    budget: c_ulonglong,
    out: *mut *mut NwAllocation,
    zero_optimum: *mut c_int,
) -> c_int {
    if inst.is_null() || out.is_null() {
        return fail_arg("inst and out must not be NULL");
    }
    let method_text = match read_str(method, "method") {
        Ok(t) => t,
        Err(code) => return code,
    };
    let method = match Method::parse(method_text) {
        Ok(m) => m,
        Err(e) => return fail(&e),
    };
    let epsilon = if epsilon > 0.0 {
        match Rat::from_float(epsilon) {
            Some(r) => r,
            None => return fail_arg("epsilon is not finite"),
        }
    } else {
        rat_frac(1, 2)
    };
    let p = if p.is_null() {
        PExponent::Zero
    } else {
        let text = match read_str(p, "p") {
            Ok(t) => t,
            Err(code) => return code,
        };
        match PExponent::parse(text) {
            Ok(p) => p,
            Err(e) => return fail(&e),
        }
    };
    let options = SolveOptions {
        method,
        epsilon,
        lambda: (lambda > 0).then_some(lambda as u64),
        p,
        budget: if budget > 0 {
            budget as u128
        } else {
            SolveOptions::default().budget
        },
    };
    let instance = &(*inst).0;
    let result = solve(instance, &options).and_then(|report| {
        if repair != 0 {
            repair_output(instance, report.output).map(|(o, _)| o)
        } else {
            Ok(report.output)
        }
    });
    match result {
        Ok(output) => {
            if !zero_optimum.is_null() {
                *zero_optimum = output.zero_optimum as c_int;
            }
            *out = Box::into_raw(Box::new(NwAllocation(output.allocation)));
            NW_OK
        }
        Err(e) => fail(&e),
    }
}

/// Nash welfare of an allocation: `is_zero` receives the zero flag and
/// `log_value` the natural log of the welfare (meaningless when zero).
///
/// # Safety
/// Handles must be live; out-pointers may be NULL to skip them.
#[no_mangle]
pub unsafe extern "C" fn nw_nash_welfare(
    inst: *const NwInstance,
    alloc: *const NwAllocation,
    is_zero: *mut c_int,
    log_value: *mut c_double,
) -> c_int {
    if inst.is_null() || alloc.is_null() {
        return fail_arg("inst and alloc must not be NULL");
    }
    match nash_welfare(&(*inst).0, &(*alloc).0) {
        Ok(w) => {
            if !is_zero.is_null() {
                *is_zero = w.is_zero() as c_int;
            }
            if !log_value.is_null() {
                *log_value = if w.is_zero() { 0.0 } else { w.log_value() };
            }
            NW_OK
        }
        Err(e) => fail(&e),
    }
}

/// wwEF1 violations of an allocation. Pairs are written as (envier, envied)
/// into `pairs` (2 entries per violation, up to `cap` violations); `count`
/// always receives the total number of violations. Pass `pairs = NULL` to
/// only count.
///
/// # Safety
/// Handles must be live; `pairs` must hold `2 * cap` entries when non-NULL.
#[no_mangle]
pub unsafe extern "C" fn nw_wwef1_violations(
    inst: *const NwInstance,
    alloc: *const NwAllocation,
    pairs: *mut usize,
    cap: usize,
    count: *mut usize,
) -> c_int {
    if inst.is_null() || alloc.is_null() || count.is_null() {
        return fail_arg("inst, alloc and count must not be NULL");
    }
    match wwef1_violations(&(*inst).0, &(*alloc).0) {
        Ok(violations) => {
            *count = violations.len();
            if !pairs.is_null() {
                for (slot, (i, h)) in violations.iter().take(cap).enumerate() {
                    *pairs.add(2 * slot) = *i;
                    *pairs.add(2 * slot + 1) = *h;
                }
            }
            NW_OK
        }
        Err(e) => fail(&e),
    }
}
