use std::ffi::{CStr, CString};
use std::ptr;

use omega_ft_ffi::*;

fn new(id: &str, params: &[(&str, f64)]) -> (OmegaFtStatus, *mut OmegaFtFunction) {
    let id = CString::new(id).unwrap();
    let names: Vec<CString> = params.iter().map(|(n, _)| CString::new(*n).unwrap()).collect();
    let name_ptrs: Vec<_> = names.iter().map(|n| n.as_ptr()).collect();
    let values: Vec<f64> = params.iter().map(|(_, v)| *v).collect();
    let mut out = ptr::null_mut();
    let status =
        unsafe { omega_ft_function_new(id.as_ptr(), name_ptrs.as_ptr(), values.as_ptr(), params.len(), &mut out) };
    (status, out)
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(omega_ft_last_error_message()) }.to_str().unwrap().to_string()
}

#[test]
fn omega_and_transform_through_handles() {
    let (status, gauss) = new("gauss", &[]);
    assert_eq!(status, OmegaFtStatus::Ok);
    let mut v = OmegaFtValue::default();
    assert_eq!(unsafe { omega_ft_omega(gauss, 1.0, 1e-12, &mut v) }, OmegaFtStatus::Ok);
    assert!((v.re - 1.158450919616096273).abs() < 1e-10);

    let (_, sinc_abs) = new("sinc_abs", &[]);
    assert_eq!(unsafe { omega_ft_transform(sinc_abs, 2.0, 0.25, 4, 1e-10, &mut v) }, OmegaFtStatus::Ok);
    assert!((v.im + 3f64.ln()).abs() < 1e-6);

    let mut n = 0.0;
    let (_, ind) = new("indicator", &[]);
    assert_eq!(unsafe { omega_ft_norm(ind, 1e-10, &mut n) }, OmegaFtStatus::Ok);
    assert!((n - 1.0).abs() < 1e-10);

    let mut x = OmegaFtExchange::default();
    assert_eq!(unsafe { omega_ft_exchange(ind, gauss, 1e-10, &mut x) }, OmegaFtStatus::Ok);
    assert!((x.lhs.re - x.rhs.re).abs() < 1e-8 && (x.lhs.re - 2.1447322931808159).abs() < 1e-8);

    let family = CString::new("gauss_weierstrass").unwrap();
    assert_eq!(unsafe { omega_ft_invert(gauss, family.as_ptr(), 0.05, 0.0, 1e-10, &mut v) }, OmegaFtStatus::Ok);
    assert!((v.re - 1.0).abs() < 1e-2);

    unsafe {
        omega_ft_function_free(gauss);
        omega_ft_function_free(sinc_abs);
        omega_ft_function_free(ind);
        omega_ft_function_free(ptr::null_mut());
    }
}

#[test]
fn parameters_and_errors() {
    let (status, w) = new("bessel_window", &[("nu", 1.5)]);
    assert_eq!(status, OmegaFtStatus::Ok);
    unsafe { omega_ft_function_free(w) };

    let (status, f) = new("nonesuch", &[]);
    assert_eq!(status, OmegaFtStatus::UnknownFunction);
    assert!(f.is_null());
    assert!(last_error().contains("nonesuch"));

    assert_eq!(new("bessel_window", &[("nu", -3.0)]).0, OmegaFtStatus::InvalidParameter);

    let (_, gauss) = new("gauss", &[]);
    let (_, dirichlet) = new("k_dirichlet", &[("a", 1.0)]);
    let mut x = OmegaFtExchange::default();
    assert_eq!(unsafe { omega_ft_exchange(gauss, dirichlet, 1e-8, &mut x) }, OmegaFtStatus::Ineligible);
    assert_eq!(unsafe { omega_ft_omega(gauss, 1.0, 1e-8, ptr::null_mut()) }, OmegaFtStatus::NullPointer);
    assert_eq!(unsafe { omega_ft_omega(ptr::null(), 1.0, 1e-8, ptr::null_mut()) }, OmegaFtStatus::NullPointer);
    let mut v = OmegaFtValue::default();
    assert_eq!(unsafe { omega_ft_omega(gauss, 1.0, 1e-8, &mut v) }, OmegaFtStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe {
        omega_ft_function_free(gauss);
        omega_ft_function_free(dirichlet);
    }
}

#[test]
fn example_integral_and_version() {
    let (mut numeric, mut closed) = (0.0, 0.0);
    assert_eq!(unsafe { omega_ft_example_integral(0.5, 1.0, 1.0, 1e-10, &mut numeric, &mut closed) }, OmegaFtStatus::Ok);
    assert!((closed - 5.7188278506619871496).abs() < 1e-12 && ((numeric - closed) / closed).abs() < 1e-8);
    let mut dummy = 0.0;
    assert_eq!(
        unsafe { omega_ft_example_integral(2.0, 1.0, 1.0, 1e-10, &mut dummy, &mut dummy) },
        OmegaFtStatus::InvalidParameter
    );
    let version = unsafe { CStr::from_ptr(omega_ft_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/omega_ft.h")).unwrap();
    for name in [
        "omega_ft_function_new",
        "omega_ft_function_free",
        "omega_ft_omega",
        "omega_ft_transform",
        "omega_ft_norm",
        "omega_ft_invert",
        "omega_ft_exchange",
        "omega_ft_example_integral",
        "omega_ft_last_error_message",
        "omega_ft_version",
        "OMEGA_FT_STATUS_CONVERGENCE",
    ] {
        assert!(header.contains(name), "{name}");
    }
}
