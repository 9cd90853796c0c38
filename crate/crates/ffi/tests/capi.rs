use adq_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn last_error() -> String {
    let p = adq_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn quantizer(eta: f64, w: &str, dim: usize) -> *mut AdqQuantizer {
    let w = CString::new(w).unwrap();
    let mut q = ptr::null_mut();
    assert_eq!(
        unsafe { adq_quantizer_new(eta, w.as_ptr(), dim, &mut q) },
        AdqStatus::Ok
    );
    q
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(adq_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn perelomov_quantizer_roundtrip() {
    let q = quantizer(2.0, "perelomov", 6);
    assert_eq!(unsafe { adq_quantizer_dim(q) }, 6);
    let mut d = [f64::NAN; 6];
    assert_eq!(
        unsafe { adq_quantizer_diagonal(q, d.as_mut_ptr(), 6) },
        AdqStatus::Ok
    );
    assert!((d[0] - 1.0).abs() < 1e-12 && d[1..].iter().all(|x| x.abs() < 1e-12));
    let mut g = 0.0;
    assert_eq!(unsafe { adq_quantizer_gamma(q, &mut g) }, AdqStatus::Ok);
    assert!((g - 1.0).abs() < 1e-12);

    let mut a = ptr::null_mut();
    assert_eq!(
        unsafe { adq_quantize_observable(q, AdqObservable::K0, 0, 0, &mut a) },
        AdqStatus::Ok
    );
    let n = unsafe { adq_operator_dim(a) };
    assert_eq!(n, 6);
    let (mut re, mut im) = (vec![0.0; n * n], vec![0.0; n * n]);
    assert_eq!(
        unsafe { adq_operator_entries(a, re.as_mut_ptr(), im.as_mut_ptr(), n * n) },
        AdqStatus::Ok
    );
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { 2.0 + i as f64 } else { 0.0 };
            assert!((re[i * n + j] - want).abs() < 1e-7 && im[i * n + j].abs() < 1e-7);
        }
    }
    assert_eq!(
        unsafe { adq_operator_entries(a, re.as_mut_ptr(), im.as_mut_ptr(), 3) },
        AdqStatus::InvalidArgument
    );
    unsafe {
        adq_operator_free(a);
        adq_quantizer_free(q);
    }
}

#[test]
fn portrait_and_kappa() {
    let q = quantizer(3.0, "perelomov", 8);
    let mut k = 0.0;
    assert_eq!(unsafe { adq_kappa(q, q, &mut k) }, AdqStatus::Ok);
    assert!((k - 1.5).abs() < 1e-8);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(
        unsafe { adq_portrait_value(q, q, AdqObservable::K0, 0.3, -0.2, &mut re, &mut im) },
        AdqStatus::Ok
    );
    let u: f64 = 0.13;
    assert!((re - 1.5 * (1.0 + u) / (1.0 - u)).abs() < 1e-6 && im.abs() < 1e-10);
    unsafe { adq_quantizer_free(q) };
}

#[test]
fn unitary_displacement() {
    let mut u = ptr::null_mut();
    assert_eq!(
        unsafe { adq_u_matrix_p(2.0, 0.2, 0.1, 4, &mut u) },
        AdqStatus::Ok
    );
    let mut re = [0.0; 16];
    let mut im = [0.0; 16];
    assert_eq!(
        unsafe { adq_operator_entries(u, re.as_mut_ptr(), im.as_mut_ptr(), 16) },
        AdqStatus::Ok
    );
    // U_00(p(z)) = (1 − |z|²)^η
    assert!((re[0] - 0.95f64.powi(2)).abs() < 1e-14 && im[0].abs() < 1e-14);
    unsafe { adq_operator_free(u) };
    assert_eq!(
        unsafe { adq_u_matrix_p(2.0, 1.0, 0.0, 4, &mut u) },
        AdqStatus::Domain
    );
}

#[test]
fn errors_are_reported() {
    let mut q = ptr::null_mut();
    let bad = CString::new("power:0.5").unwrap();
    assert_eq!(
        unsafe { adq_quantizer_new(2.0, bad.as_ptr(), 8, &mut q) },
        AdqStatus::Domain
    );
    assert!(q.is_null());
    assert!(last_error().contains("s > 1"));

    let junk = CString::new("triangle").unwrap();
    assert_eq!(
        unsafe { adq_quantizer_new(2.0, junk.as_ptr(), 8, &mut q) },
        AdqStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { adq_quantizer_new(2.0, ptr::null(), 8, &mut q) },
        AdqStatus::NullPointer
    );
    assert!(last_error().contains("weight"));

    let q = quantizer(0.75, "half", 4);
    let mut g = 0.0;
    assert_eq!(unsafe { adq_quantizer_gamma(q, &mut g) }, AdqStatus::Domain);
    let mut d = [0.0; 8];
    assert_eq!(
        unsafe { adq_quantizer_diagonal(q, d.as_mut_ptr(), 8) },
        AdqStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { adq_quantizer_diagonal(ptr::null(), d.as_mut_ptr(), 1) },
        AdqStatus::NullPointer
    );
    unsafe {
        adq_quantizer_free(q);
        adq_quantizer_free(ptr::null_mut());
        adq_operator_free(ptr::null_mut());
    }
    assert_eq!(unsafe { adq_quantizer_dim(ptr::null()) }, 0);
}

#[test]
fn divergent_kappa_is_reported() {
    let q = quantizer(1.0, "perelomov", 4);
    let mut k = 0.0;
    let s = unsafe { adq_kappa(q, q, &mut k) };
    assert!(
        matches!(s, AdqStatus::Domain | AdqStatus::Convergence),
        "{s:?}"
    );
    assert!(!last_error().is_empty());
    unsafe { adq_quantizer_free(q) };
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/adq.h")).unwrap();
    for name in [
        "adq_quantizer_new",
        "adq_quantizer_free",
        "adq_quantizer_diagonal",
        "adq_quantizer_gamma",
        "adq_quantize_observable",
        "adq_operator_entries",
        "adq_portrait_value",
        "adq_kappa",
        "adq_u_matrix_p",
        "adq_last_error_message",
        "typedef struct AdqQuantizer AdqQuantizer",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}
