//! C ABI for the integrality library: opaque group handles, status codes,
//! and flat buffers.  Every function is panic-safe (internal panics surface
//! as `CAYLEY_STATUS_INTERNAL` instead of unwinding across the boundary) and
//! records a thread-local message retrievable with
//! [`cayley_last_error_message`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cayley::census::evaluate_mask;
use cayley::ext::{parse_group_spec, parse_set_expression, ExtGroup};
use cayley::reps::{classify, Rep};
use cayley::spectrum::{adjacency, exact_spectrum, numeric_spectrum};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CayleyStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The group spec or set expression did not parse.
    Parse = 3,
    /// The mask has bits outside the group's element range.
    MaskOutOfRange = 4,
    /// The caller's buffer is smaller than the group order.
    BufferTooSmall = 5,
    /// The exact spectrum contains irrational eigenvalues, so it cannot be
    /// returned as integers; use the numeric spectrum instead.
    Irrational = 6,
    /// The numeric eigensolver failed to converge.
    Numeric = 7,
    /// The three decision routes disagreed (library defect; never expected).
    Disagreement = 8,
    /// An internal invariant failed.
    Internal = 9,
}

/// Opaque handle to a parsed group with its classified representations.
pub struct CayleyGroup {
    group: ExtGroup,
    reps: Vec<Rep>,
    spec: CString,
}

/// Integrality verdicts for one connection set, one per route.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct CayleyVerdict {
    pub criteria: bool,
    pub exact: bool,
    pub numeric: bool,
    pub agree: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn guarded<F: FnOnce() -> CayleyStatus>(f: F) -> CayleyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal panic".to_string());
            set_error(&msg);
            CayleyStatus::Internal
        }
    }
}

/// # Safety
/// `text` must be a valid NUL-terminated string or null.
unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, CayleyStatus> {
    if text.is_null() {
        set_error("null string argument");
        return Err(CayleyStatus::NullArgument);
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        CayleyStatus::InvalidUtf8
    })
}

/// Message describing the most recent failure on this thread.  The pointer
/// stays valid until the next failing call on the same thread.
///
/// # Safety
/// The returned pointer must not be freed or used after a later FFI call
/// from the same thread fails.
#[no_mangle]
pub unsafe extern "C" fn cayley_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parses a group spec (e.g. `dihedral(8)`, `dicyclic(2x4; 0,2)`) into a
/// heap-allocated handle written to `out`.
///
/// # Safety
/// `spec` must be NUL-terminated; `out` must point to writable memory for
/// one pointer.  The handle must be released with [`cayley_group_free`].
#[no_mangle]
pub unsafe extern "C" fn cayley_group_parse(
    spec: *const c_char,
    out: *mut *mut CayleyGroup,
) -> CayleyStatus {
    if out.is_null() {
        set_error("null output pointer");
        return CayleyStatus::NullArgument;
    }
    let text = match read_str(spec) {
        Ok(t) => t,
        Err(status) => return status,
    };
    guarded(|| match parse_group_spec(text) {
        Ok(group) => {
            let reps = classify(&group);
            let spec = CString::new(group.spec()).unwrap_or_default();
            let handle = Box::new(CayleyGroup { group, reps, spec });
            *out = Box::into_raw(handle);
            CayleyStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            *out = ptr::null_mut();
            CayleyStatus::Parse
        }
    })
}

/// Releases a handle returned by [`cayley_group_parse`].  Null is a no-op.
///
/// # Safety
/// `handle` must be null or a pointer previously returned by
/// [`cayley_group_parse`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn cayley_group_free(handle: *mut CayleyGroup) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of elements of the group, or 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cayley_group_order(handle: *const CayleyGroup) -> u64 {
    match handle.as_ref() {
        Some(h) => h.group.order(),
        None => 0,
    }
}

/// Width of the connection-set bitmask (|G| − 1), or 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cayley_group_mask_bits(handle: *const CayleyGroup) -> u32 {
    match handle.as_ref() {
        Some(h) => h.group.mask_bits(),
        None => 0,
    }
}

/// Canonical spec string of the group; valid while the handle lives.
///
/// # Safety
/// `handle` must be a live handle; the pointer must not outlive it.
#[no_mangle]
pub unsafe extern "C" fn cayley_group_spec(handle: *const CayleyGroup) -> *const c_char {
    match handle.as_ref() {
        Some(h) => h.spec.as_ptr(),
        None => ptr::null(),
    }
}

/// Parses a comma-separated set expression (`a,x*a^2`, tuples for
/// multi-factor groups) into a bitmask written to `out_mask`.
///
/// # Safety
/// `handle` must be live, `expr` NUL-terminated, `out_mask` writable.
#[no_mangle]
pub unsafe extern "C" fn cayley_parse_set(
    handle: *const CayleyGroup,
    expr: *const c_char,
    out_mask: *mut u64,
) -> CayleyStatus {
    let Some(h) = handle.as_ref() else {
        set_error("null group handle");
        return CayleyStatus::NullArgument;
    };
    if out_mask.is_null() {
        set_error("null output pointer");
        return CayleyStatus::NullArgument;
    }
    let text = match read_str(expr) {
        Ok(t) => t,
        Err(status) => return status,
    };
    guarded(|| match parse_set_expression(&h.group, text) {
        Ok(mask) => {
            *out_mask = mask;
            CayleyStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            CayleyStatus::Parse
        }
    })
}

fn mask_in_range(h: &CayleyGroup, mask: u64) -> bool {
    let bits = h.group.mask_bits();
    bits >= 64 || mask >> bits == 0
}

/// Decides integrality of the set encoded by `mask` via all three routes.
///
/// # Safety
/// `handle` must be live and `out` writable for one `CayleyVerdict`.
#[no_mangle]
pub unsafe extern "C" fn cayley_check_mask(
    handle: *const CayleyGroup,
    mask: u64,
    out: *mut CayleyVerdict,
) -> CayleyStatus {
    let Some(h) = handle.as_ref() else {
        set_error("null group handle");
        return CayleyStatus::NullArgument;
    };
    if out.is_null() {
        set_error("null output pointer");
        return CayleyStatus::NullArgument;
    }
    if !mask_in_range(h, mask) {
        set_error("mask has bits outside the group");
        return CayleyStatus::MaskOutOfRange;
    }
    guarded(|| match evaluate_mask(&h.group, &h.reps, mask, false) {
        Ok(record) => {
            *out = CayleyVerdict {
                criteria: record.verdict_criteria,
                exact: record.verdict_exact,
                numeric: record.verdict_numeric,
                agree: record.verdicts_agree(),
            };
            if record.verdicts_agree() {
                CayleyStatus::Ok
            } else {
                set_error("decision routes disagree");
                CayleyStatus::Disagreement
            }
        }
        Err(e) => {
            set_error(&e.to_string());
            CayleyStatus::Numeric
        }
    })
}

/// Writes the exact integer spectrum (ascending, |G| values) into `buf`.
/// Fails with `Irrational` when any eigenvalue is not a rational integer.
///
/// # Safety
/// `handle` must be live; `buf` must be writable for `len` values;
/// `out_written` (optional) for one value.
#[no_mangle]
pub unsafe extern "C" fn cayley_exact_spectrum(
    handle: *const CayleyGroup,
    mask: u64,
    buf: *mut i64,
    len: usize,
    out_written: *mut usize,
) -> CayleyStatus {
    let Some(h) = handle.as_ref() else {
        set_error("null group handle");
        return CayleyStatus::NullArgument;
    };
    if buf.is_null() {
        set_error("null buffer");
        return CayleyStatus::NullArgument;
    }
    if !mask_in_range(h, mask) {
        set_error("mask has bits outside the group");
        return CayleyStatus::MaskOutOfRange;
    }
    let n = h.group.order() as usize;
    if len < n {
        set_error("buffer shorter than the group order");
        return CayleyStatus::BufferTooSmall;
    }
    guarded(|| {
        let set = cayley::ext::split_connection_set(&h.group, mask)
            .expect("mask validated above");
        let report = exact_spectrum(&h.group, &set, &h.reps);
        let mut values = Vec::with_capacity(n);
        for eig in &report.eigenvalues {
            match eig.as_exact() {
                Some(v) => values.push(v),
                None => {
                    set_error("spectrum contains irrational eigenvalues");
                    return CayleyStatus::Irrational;
                }
            }
        }
        for (i, v) in values.iter().enumerate() {
            *buf.add(i) = *v;
        }
        if !out_written.is_null() {
            *out_written = n;
        }
        CayleyStatus::Ok
    })
}

/// Writes the numeric spectrum (ascending, |G| values) into `buf`.
///
/// # Safety
/// `handle` must be live; `buf` must be writable for `len` values;
/// `out_written` (optional) for one value.
#[no_mangle]
pub unsafe extern "C" fn cayley_numeric_spectrum(
    handle: *const CayleyGroup,
    mask: u64,
    buf: *mut f64,
    len: usize,
    out_written: *mut usize,
) -> CayleyStatus {
    let Some(h) = handle.as_ref() else {
        set_error("null group handle");
        return CayleyStatus::NullArgument;
    };
    if buf.is_null() {
        set_error("null buffer");
        return CayleyStatus::NullArgument;
    }
    if !mask_in_range(h, mask) {
        set_error("mask has bits outside the group");
        return CayleyStatus::MaskOutOfRange;
    }
    let n = h.group.order() as usize;
    if len < n {
        set_error("buffer shorter than the group order");
        return CayleyStatus::BufferTooSmall;
    }
    guarded(|| {
        let set = cayley::ext::split_connection_set(&h.group, mask)
            .expect("mask validated above");
        match numeric_spectrum(&adjacency(&h.group, &set)) {
            Ok(values) => {
                for (i, v) in values.iter().enumerate() {
                    *buf.add(i) = *v;
                }
                if !out_written.is_null() {
                    *out_written = n;
                }
                CayleyStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                CayleyStatus::Numeric
            }
        }
    })
}
