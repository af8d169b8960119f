//! C interface to omega-ft.
//!
//! Functions are opaque handles created from a catalog id and parameters.
//! Every call returns an [`OmegaFtStatus`]; on failure the message is
//! available from [`omega_ft_last_error_message`] on the same thread.
//! Results are written through out-pointers only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use omega_ft::catalog::TestFunction;
use omega_ft::inversion::KernelFamily;
use omega_ft::omega::NormSource;
use omega_ft::{analysis, cli, inversion, omega, transform, Error};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaFtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    UnknownFunction = 3,
    Unsupported = 4,
    Ineligible = 5,
    Convergence = 6,
    Missing = 7,
    Panic = 8,
}

/// Opaque function handle.
pub struct OmegaFtFunction {
    inner: TestFunction,
}

/// Complex value with its error estimate.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OmegaFtValue {
    pub re: f64,
    pub im: f64,
    pub error_estimate: f64,
}

/// Both sides of the exchange identity and the a-priori bound.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OmegaFtExchange {
    pub lhs: OmegaFtValue,
    pub rhs: OmegaFtValue,
    pub bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> OmegaFtStatus {
    match e {
        Error::InvalidParameter(_) | Error::Io(_) | Error::Json(_) => OmegaFtStatus::InvalidParameter,
        Error::UnknownFunction(_) => OmegaFtStatus::UnknownFunction,
        Error::Unsupported(_) => OmegaFtStatus::Unsupported,
        Error::Ineligible(_) => OmegaFtStatus::Ineligible,
        Error::Convergence { .. } | Error::NotAccelerated { .. } => OmegaFtStatus::Convergence,
        Error::Missing(_) => OmegaFtStatus::Missing,
    }
}

struct Failure(OmegaFtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(OmegaFtStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> OmegaFtStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            OmegaFtStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            OmegaFtStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(OmegaFtStatus::InvalidParameter, format!("`{what}` is not UTF-8")))
}

unsafe fn handle<'a>(p: *const OmegaFtFunction, what: &str) -> Result<&'a TestFunction, Failure> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn value(z: Complex64, error_estimate: f64) -> OmegaFtValue {
    OmegaFtValue { re: z.re, im: z.im, error_estimate }
}

/// Creates a function from a catalog id (or `triangle_smoothed_gauss`,
/// `k_<kernel family>`) and `count` named parameters.
///
/// # Safety
/// `id` must be a NUL-terminated string; `names` and `values` must point to
/// `count` entries (they may be null when `count` is 0); `out` must be valid
/// for writing. Release the handle with [`omega_ft_function_free`].
#[no_mangle]
pub unsafe extern "C" fn omega_ft_function_new(
    id: *const c_char,
    names: *const *const c_char,
    values: *const f64,
    count: usize,
    out: *mut *mut OmegaFtFunction,
) -> OmegaFtStatus {
    guard(|| {
        let id = text(id, "id")?;
        let mut params = Vec::with_capacity(count);
        if count > 0 {
            if names.is_null() {
                return Err(null("names"));
            }
            if values.is_null() {
                return Err(null("values"));
            }
            for i in 0..count {
                let name = text(*names.add(i), "names[i]")?;
                let v = *values.add(i);
                params.push(format!("{name}={v:e}"));
            }
        }
        let f = cli::resolve_function(id, &params)?;
        write(out, Box::into_raw(Box::new(OmegaFtFunction { inner: f })), "out")
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `f` must come from [`omega_ft_function_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn omega_ft_function_free(f: *mut OmegaFtFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// `Ω_f(s)`.
///
/// # Safety
/// `f` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn omega_ft_omega(f: *const OmegaFtFunction, s: f64, tol: f64, out: *mut OmegaFtValue) -> OmegaFtStatus {
    guard(|| {
        let o = omega::omega(handle(f, "f")?, s, tol)?;
        write(out, value(o.value, o.error_estimate), "out")
    })
}

/// `f̂(s)` by Richardson-extrapolated second differences of `Ω_f`.
///
/// # Safety
/// `f` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn omega_ft_transform(
    f: *const OmegaFtFunction,
    s: f64,
    h0: f64,
    levels: usize,
    tol: f64,
    out: *mut OmegaFtValue,
) -> OmegaFtStatus {
    guard(|| {
        let e = transform::ft_extrapolated(handle(f, "f")?, s, h0, levels, tol)?;
        write(out, value(e.value, e.error_estimate), "out")
    })
}

/// Alexiewicz norm `sup_x |∫_{-∞}^x f|` on the default grid.
///
/// # Safety
/// `f` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn omega_ft_norm(f: *const OmegaFtFunction, tol: f64, out: *mut f64) -> OmegaFtStatus {
    guard(|| {
        let n = omega::alexiewicz_norm(&NormSource::Function(handle(f, "f")?), None, tol)?;
        write(out, n.value, "out")
    })
}

/// `(f∗ψ_a)(x)` for the kernel family named `family`.
///
/// # Safety
/// `f` must be a live handle, `family` NUL-terminated and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn omega_ft_invert(
    f: *const OmegaFtFunction,
    family: *const c_char,
    a: f64,
    x: f64,
    tol: f64,
    out: *mut OmegaFtValue,
) -> OmegaFtStatus {
    guard(|| {
        let family: KernelFamily = text(family, "family")?.parse()?;
        let r = inversion::invert(handle(f, "f")?, family, a, x, tol)?;
        write(out, value(r.value, r.error_estimate), "out")
    })
}

/// `∫f̂g` and `∫fĝ` for an eligible `g`, with the a-priori bound.
///
/// # Safety
/// `f` and `g` must be live handles and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn omega_ft_exchange(
    f: *const OmegaFtFunction,
    g: *const OmegaFtFunction,
    tol: f64,
    out: *mut OmegaFtExchange,
) -> OmegaFtStatus {
    guard(|| {
        let r = analysis::exchange_check(handle(f, "f")?, handle(g, "g")?, None, tol)?;
        let result = OmegaFtExchange { lhs: value(r.lhs, r.lhs_error), rhs: value(r.rhs, r.rhs_error), bound: r.bound };
        write(out, result, "out")
    })
}

/// `∫_0^∞ s^{-ν} log(1 + y²/(s-x)²) ds` by quadrature, with its closed form.
///
/// # Safety
/// `numeric` and `closed_form` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn omega_ft_example_integral(
    nu: f64,
    x: f64,
    y: f64,
    tol: f64,
    numeric: *mut f64,
    closed_form: *mut f64,
) -> OmegaFtStatus {
    guard(|| {
        let r = analysis::example_integral(nu, x, y, tol)?;
        write(numeric, r.numeric, "numeric")?;
        write(closed_form, r.closed_form, "closed_form")
    })
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn omega_ft_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn omega_ft_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
