use std::ffi::CStr;
use std::ptr;

use amo_ffi::*;

fn last_error() -> String {
    let p = amo_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn norm_and_errors() {
    let mut out = 0.0;
    unsafe {
        assert_eq!(amo_norm_rational(1, 2, 2.0, &mut out), AmoStatus::Ok);
        assert!((out - 8f64.sqrt()).abs() < 1e-15);
        assert!(amo_last_error_message().is_null());

        assert_eq!(amo_norm_rational(1, 0, 2.0, &mut out), AmoStatus::InvalidFraction);
        assert!(!last_error().is_empty());
        assert_eq!(amo_norm_rational(3, 2, 2.0, &mut out), AmoStatus::InvalidFraction);
        assert_eq!(amo_norm_rational(1, 3, 2.0, ptr::null_mut()), AmoStatus::NullPointer);
        assert!(last_error().contains("NULL"));
        // a later success clears the message
        assert_eq!(amo_norm_rational(1, 3, 2.0, &mut out), AmoStatus::Ok);
        assert!(amo_last_error_message().is_null());
        assert!((out - (1.0 + 3f64.sqrt())).abs() < 1e-12);
    }
}

#[test]
fn bounds_slots_follow_names() {
    let mut b = AmoBounds {
        theta: 0.0,
        lambda: 0.0,
        values: [0.0; AMO_BOUND_COUNT],
        present: [false; AMO_BOUND_COUNT],
    };
    unsafe {
        assert_eq!(amo_bounds(0.125, 2.0, &mut b), AmoStatus::Ok);
    }
    let names: Vec<String> = (0..AMO_BOUND_COUNT)
        .map(|i| {
            unsafe { CStr::from_ptr(amo_bound_name(i)) }
                .to_str()
                .unwrap()
                .to_owned()
        })
        .collect();
    assert!(amo_bound_name(AMO_BOUND_COUNT).is_null());
    let present: Vec<&str> = names
        .iter()
        .zip(b.present)
        .filter(|(_, p)| *p)
        .map(|(n, _)| n.as_str())
        .collect();
    assert!(!present.contains(&"upper_sqrt") && !present.contains(&"upper_M1"));
    assert!(present.contains(&"lower_m"));
    let want = amo_core::bound_table(0.125, 2.0).unwrap();
    for (i, (name, v)) in want.entries().iter().enumerate() {
        assert_eq!(names[i], *name);
        assert_eq!(b.present[i], v.is_some());
        if let Some(v) = v {
            assert_eq!(b.values[i], *v);
        }
    }
    unsafe {
        assert_eq!(amo_bounds(0.7, 2.0, &mut b), AmoStatus::InvalidArgument);
    }
}

#[test]
fn lower_optimize_matches_core() {
    let mut l = AmoLower {
        value: 0.0,
        alpha: 0.0,
        r: 0.0,
        a: 0.0,
        b: 0.0,
        family: -1,
    };
    unsafe {
        assert_eq!(amo_lower_optimize(0.3, &mut l), AmoStatus::Ok);
    }
    let e = amo_core::optimize_lower(0.3).unwrap();
    assert_eq!(l.value, e.value);
    assert!((0..3).contains(&l.family));
}

#[test]
fn spectrum_handle_lifecycle() {
    let mut h: *mut AmoSpectrum = ptr::null_mut();
    unsafe {
        assert_eq!(amo_spectrum_new(1, 2, 3.0, 0.0, 1, &mut h), AmoStatus::Ok);
        assert_eq!(amo_spectrum_len(h), 2);
        let mut e = 0.0;
        assert_eq!(amo_spectrum_get(h, 1, &mut e), AmoStatus::Ok);
        assert!((e - 13f64.sqrt()).abs() < 1e-14);
        assert_eq!(amo_spectrum_get(h, 2, &mut e), AmoStatus::IndexOutOfRange);
        amo_spectrum_free(h);
        amo_spectrum_free(ptr::null_mut());
        assert_eq!(amo_spectrum_len(ptr::null()), 0);
        let mut g: *mut AmoSpectrum = ptr::null_mut();
        assert_eq!(amo_spectrum_new(1, 2, 3.0, 0.0, 0, &mut g), AmoStatus::InvalidArgument);
        assert!(g.is_null());
    }
}

#[test]
fn bands_handle_lifecycle() {
    let mut h: *mut AmoBands = ptr::null_mut();
    unsafe {
        assert_eq!(amo_bands_new(1, 3, 2.0, &mut h), AmoStatus::Ok);
        assert_eq!(amo_bands_len(h), 3);
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(amo_bands_get(h, 2, &mut lo, &mut hi), AmoStatus::Ok);
        assert!((hi - (1.0 + 3f64.sqrt())).abs() < 1e-12 && lo < hi);
        assert_eq!(amo_bands_get(h, 3, &mut lo, &mut hi), AmoStatus::IndexOutOfRange);
        assert_eq!(amo_bands_get(h, 0, ptr::null_mut(), &mut hi), AmoStatus::NullPointer);
        amo_bands_free(h);
    }
}

#[test]
fn certify_report_round_trip() {
    let lambdas = [1.0, 2.0];
    let mut h: *mut AmoReport = ptr::null_mut();
    unsafe {
        assert_eq!(amo_certify_new(10, lambdas.as_ptr(), 2, false, &mut h), AmoStatus::Ok);
        assert!(amo_report_passed(h));
        assert_eq!(amo_report_failure_count(h), 0);
        let n = amo_report_record_count(h);
        let s = amo_report_json(h);
        let json: serde_json::Value = serde_json::from_str(CStr::from_ptr(s).to_str().unwrap()).unwrap();
        assert_eq!(json["records"].as_array().unwrap().len(), n);
        assert_eq!(n, amo_core::certify_sweep(10, &lambdas).unwrap().records.len());
        amo_string_free(s);
        amo_report_free(h);
        assert!(!amo_report_passed(ptr::null()));
        assert_eq!(
            amo_certify_new(0, lambdas.as_ptr(), 2, false, &mut h),
            AmoStatus::InvalidArgument
        );
        assert_eq!(
            amo_certify_new(5, ptr::null(), 2, false, &mut h),
            AmoStatus::NullPointer
        );
    }
}

#[test]
fn version_is_the_package_version() {
    let v = unsafe { CStr::from_ptr(amo_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
