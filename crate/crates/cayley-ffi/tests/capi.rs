//! Exercises the C ABI through the exported extern fns, covering status
//! codes, buffer contracts, and agreement between the exact and numeric
//! spectra.

use std::ffi::{CStr, CString};
use std::ptr;

use cayley_ffi::{
    cayley_check_mask, cayley_exact_spectrum, cayley_group_free, cayley_group_mask_bits,
    cayley_group_order, cayley_group_parse, cayley_group_spec, cayley_last_error_message,
    cayley_numeric_spectrum, cayley_parse_set, CayleyGroup, CayleyStatus, CayleyVerdict,
};

fn parse(spec: &str) -> *mut CayleyGroup {
    let spec = CString::new(spec).unwrap();
    let mut handle = ptr::null_mut();
    let status = unsafe { cayley_group_parse(spec.as_ptr(), &mut handle) };
    assert_eq!(status, CayleyStatus::Ok, "parse failed: {}", last_error());
    assert!(!handle.is_null());
    handle
}

fn last_error() -> String {
    unsafe {
        CStr::from_ptr(cayley_last_error_message())
            .to_string_lossy()
            .into_owned()
    }
}

fn blank_verdict() -> CayleyVerdict {
    CayleyVerdict {
        criteria: false,
        exact: false,
        numeric: false,
        agree: false,
    }
}

#[test]
fn handle_reports_order_bits_and_canonical_spec() {
    let h = parse("dicyclic(4; 2)");
    unsafe {
        assert_eq!(cayley_group_order(h), 8);
        assert_eq!(cayley_group_mask_bits(h), 7);
        let spec = CStr::from_ptr(cayley_group_spec(h)).to_str().unwrap();
        assert_eq!(spec, "dicyclic(4; 2)");
        cayley_group_free(h);
    }
}

#[test]
fn null_arguments_are_rejected_not_dereferenced() {
    unsafe {
        assert_eq!(cayley_group_order(ptr::null()), 0);
        assert_eq!(cayley_group_mask_bits(ptr::null()), 0);
        assert!(cayley_group_spec(ptr::null()).is_null());
        cayley_group_free(ptr::null_mut());

        let spec = CString::new("dihedral(8)").unwrap();
        assert_eq!(
            cayley_group_parse(spec.as_ptr(), ptr::null_mut()),
            CayleyStatus::NullArgument
        );
        let mut handle = ptr::null_mut();
        assert_eq!(
            cayley_group_parse(ptr::null(), &mut handle),
            CayleyStatus::NullArgument
        );

        let mut mask = 0u64;
        let expr = CString::new("a").unwrap();
        assert_eq!(
            cayley_parse_set(ptr::null(), expr.as_ptr(), &mut mask),
            CayleyStatus::NullArgument
        );

        let mut verdict = blank_verdict();
        assert_eq!(
            cayley_check_mask(ptr::null(), 0, &mut verdict),
            CayleyStatus::NullArgument
        );
    }
}

#[test]
fn bad_specs_surface_parse_status_and_message() {
    let spec = CString::new("trihedral(8)").unwrap();
    let mut handle = ptr::null_mut();
    let status = unsafe { cayley_group_parse(spec.as_ptr(), &mut handle) };
    assert_eq!(status, CayleyStatus::Parse);
    assert!(handle.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn set_expressions_round_trip_to_masks() {
    let h = parse("dihedral(8)");
    unsafe {
        let mut mask = u64::MAX;
        let expr = CString::new("a, x*a^2").unwrap();
        assert_eq!(
            cayley_parse_set(h, expr.as_ptr(), &mut mask),
            CayleyStatus::Ok
        );
        assert_eq!(mask.count_ones(), 2);
        assert!(mask >> cayley_group_mask_bits(h) == 0);

        let empty = CString::new("").unwrap();
        assert_eq!(
            cayley_parse_set(h, empty.as_ptr(), &mut mask),
            CayleyStatus::Ok
        );
        assert_eq!(mask, 0);

        let bad = CString::new("1").unwrap();
        assert_eq!(
            cayley_parse_set(h, bad.as_ptr(), &mut mask),
            CayleyStatus::Parse
        );
        assert!(last_error().contains("identity"));
        cayley_group_free(h);
    }
}

#[test]
fn verdicts_and_spectra_agree_across_every_mask() {
    let h = parse("dicyclic(4; 2)");
    let n = unsafe { cayley_group_order(h) } as usize;
    let mut integral = 0u32;
    let mut irrational = 0u32;
    for mask in 0..(1u64 << unsafe { cayley_group_mask_bits(h) }) {
        let mut verdict = blank_verdict();
        let status = unsafe { cayley_check_mask(h, mask, &mut verdict) };
        assert_eq!(status, CayleyStatus::Ok, "mask {mask}: {}", last_error());
        assert!(verdict.agree, "routes disagree on mask {mask}");
        assert_eq!(verdict.criteria, verdict.exact);

        let mut exact = vec![0i64; n];
        let mut written = 0usize;
        let status = unsafe {
            cayley_exact_spectrum(h, mask, exact.as_mut_ptr(), exact.len(), &mut written)
        };
        if verdict.exact {
            integral += 1;
            assert_eq!(status, CayleyStatus::Ok);
            assert_eq!(written, n);
            assert!(exact.windows(2).all(|w| w[0] <= w[1]));

            let mut numeric = vec![f64::NAN; n];
            let status = unsafe {
                cayley_numeric_spectrum(h, mask, numeric.as_mut_ptr(), numeric.len(), &mut written)
            };
            assert_eq!(status, CayleyStatus::Ok);
            assert_eq!(written, n);
            for (e, x) in exact.iter().zip(&numeric) {
                assert!((*e as f64 - x).abs() < 1e-6, "mask {mask}: {e} vs {x}");
            }
        } else {
            irrational += 1;
            assert_eq!(status, CayleyStatus::Irrational);
        }
    }
    assert_eq!(integral, 64);
    assert_eq!(irrational, 64);
    unsafe { cayley_group_free(h) };
}

#[test]
fn buffer_and_range_violations_are_reported() {
    let h = parse("dihedral(8)");
    unsafe {
        let mut verdict = blank_verdict();
        assert_eq!(
            cayley_check_mask(h, 1 << 7, &mut verdict),
            CayleyStatus::MaskOutOfRange
        );

        let mut short_buf = [0i64; 3];
        assert_eq!(
            cayley_exact_spectrum(h, 0, short_buf.as_mut_ptr(), short_buf.len(), ptr::null_mut()),
            CayleyStatus::BufferTooSmall
        );
        let mut short_f = [0f64; 3];
        assert_eq!(
            cayley_numeric_spectrum(h, 0, short_f.as_mut_ptr(), short_f.len(), ptr::null_mut()),
            CayleyStatus::BufferTooSmall
        );
        cayley_group_free(h);
    }
}

#[test]
fn generated_header_declares_the_full_surface() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/cayley.h"
    ))
    .expect("header generated by build.rs");
    for symbol in [
        "typedef struct CayleyGroup CayleyGroup;",
        "CAYLEY_STATUS_OK",
        "CAYLEY_STATUS_IRRATIONAL",
        "cayley_group_parse",
        "cayley_group_free",
        "cayley_parse_set",
        "cayley_check_mask",
        "cayley_exact_spectrum",
        "cayley_numeric_spectrum",
        "cayley_last_error_message",
    ] {
        assert!(header.contains(symbol), "missing {symbol}");
    }
}
