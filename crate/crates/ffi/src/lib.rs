//! C ABI.
//!
//! Every fallible function returns an `AdqStatus`; on failure the message is
//! available from `adq_last_error_message` on the same thread. Handles are
//! opaque and owned by the caller, who releases them with the matching `_free`.

use adq::geometry::DiskPoint;
use adq::portrait::{kappa_from, Portrait};
use adq::quantizer::{
    gamma_constant, quantize, Field, GridSpec, QuantizerOperator, SeriesMode, WeightSpec,
};
use adq::repn::{u_matrix_p, FockOperator, Generator};
use adq::AdqError;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdqStatus {
    Ok = 0,
    /// malformed argument, descriptor or buffer size
    InvalidArgument = 1,
    NullPointer = 2,
    /// parameters outside the mathematical domain (e.g. weight incompatible with eta)
    Domain = 3,
    Numeric = 4,
    /// a series or limit did not converge
    Convergence = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdqObservable {
    K0 = 0,
    K1 = 1,
    K2 = 2,
    Kplus = 3,
    Kminus = 4,
}

impl From<AdqObservable> for Generator {
    fn from(o: AdqObservable) -> Generator {
        match o {
            AdqObservable::K0 => Generator::K0,
            AdqObservable::K1 => Generator::K1,
            AdqObservable::K2 => Generator::K2,
            AdqObservable::Kplus => Generator::Kplus,
            AdqObservable::Kminus => Generator::Kminus,
        }
    }
}

/// Diagonal quantizer M for one weight and truncation.
pub struct AdqQuantizer(QuantizerOperator);

/// Dense truncated operator.
pub struct AdqOperator(FockOperator);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Adq(AdqError),
    Null(&'static str),
    Arg(String),
}

impl From<AdqError> for Failure {
    fn from(e: AdqError) -> Self {
        Failure::Adq(e)
    }
}

fn status_of(e: &AdqError) -> AdqStatus {
    match e {
        AdqError::Invalid(_) | AdqError::Shape(_) | AdqError::Io(_) => AdqStatus::InvalidArgument,
        AdqError::Domain(_) | AdqError::Range { .. } | AdqError::WeightEta(_) => AdqStatus::Domain,
        AdqError::Numeric(_) => AdqStatus::Numeric,
        _ if e.is_convergence() => AdqStatus::Convergence,
        _ => AdqStatus::Numeric,
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> AdqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AdqStatus::Ok,
        Ok(Err(Failure::Adq(e))) => {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            AdqStatus::NullPointer
        }
        Ok(Err(Failure::Arg(m))) => {
            set_error(m);
            AdqStatus::InvalidArgument
        }
        Err(p) => {
            let m = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {m}"));
            AdqStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write<T>(p: *mut T, v: T, what: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    p.write(v);
    Ok(())
}

fn grid(radial_order: usize, angular_points: usize) -> GridSpec {
    let d = GridSpec::default();
    GridSpec::new(
        if radial_order == 0 {
            d.radial_order
        } else {
            radial_order
        },
        if angular_points == 0 {
            d.angular_points
        } else {
            angular_points
        },
    )
}

/// Message of the last failure on this thread, or NULL. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn adq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn adq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds the quantizer for `weight` ("perelomov", "power:<s>", "basis:<m>", "half",
/// "custom:<path>") at representation label `eta` and truncation `dim`.
///
/// # Safety
/// `weight` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adq_quantizer_new(
    eta: f64,
    weight: *const c_char,
    dim: usize,
    out: *mut *mut AdqQuantizer,
) -> AdqStatus {
    guard(|| {
        if weight.is_null() {
            return Err(Failure::Null("weight"));
        }
        let desc = CStr::from_ptr(weight)
            .to_str()
            .map_err(|_| Failure::Arg("weight descriptor is not UTF-8".into()))?;
        let q = QuantizerOperator::new(&WeightSpec::parse(desc, eta)?, dim)?;
        write(out, Box::into_raw(Box::new(AdqQuantizer(q))), "out")
    })
}

/// # Safety
/// `q` must come from `adq_quantizer_new` and not be used afterwards; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn adq_quantizer_free(q: *mut AdqQuantizer) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Truncation dimension, 0 for NULL.
///
/// # Safety
/// `q` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn adq_quantizer_dim(q: *const AdqQuantizer) -> usize {
    q.as_ref().map_or(0, |q| q.0.dim())
}

/// Copies the first `len` diagonal entries M_kk; `len` may not exceed the dimension.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn adq_quantizer_diagonal(
    q: *const AdqQuantizer,
    out: *mut f64,
    len: usize,
) -> AdqStatus {
    guard(|| {
        let q = deref(q, "quantizer")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let d = q.0.diagonal();
        if len > d.len() {
            return Err(Failure::Arg(format!(
                "requested {len} entries of a dimension-{} quantizer",
                d.len()
            )));
        }
        ptr::copy_nonoverlapping(d.as_ptr(), out, len);
        Ok(())
    })
}

/// Proportionality constant gamma with A_{k_a} = gamma times a generator; needs eta > 1.
///
/// # Safety
/// `q` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adq_quantizer_gamma(q: *const AdqQuantizer, out: *mut f64) -> AdqStatus {
    guard(|| {
        let q = deref(q, "quantizer")?;
        write(out, gamma_constant(&q.0, SeriesMode::Auto)?, "out")
    })
}

/// Quantizes a basic observable; zero grid orders select the defaults (64, 256).
///
/// # Safety
/// `q` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adq_quantize_observable(
    q: *const AdqQuantizer,
    observable: AdqObservable,
    radial_order: usize,
    angular_points: usize,
    out: *mut *mut AdqOperator,
) -> AdqStatus {
    guard(|| {
        let q = deref(q, "quantizer")?;
        let f = Field::observable(observable.into());
        let a = quantize(&q.0, &f, q.0.dim(), grid(radial_order, angular_points))?;
        write(out, Box::into_raw(Box::new(AdqOperator(a))), "out")
    })
}

/// Truncation of U(p(z)) to the first `dim` basis vectors.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adq_u_matrix_p(
    eta: f64,
    re_z: f64,
    im_z: f64,
    dim: usize,
    out: *mut *mut AdqOperator,
) -> AdqStatus {
    guard(|| {
        let u = u_matrix_p(eta, DiskPoint::from_re_im(re_z, im_z)?, dim)?;
        write(out, Box::into_raw(Box::new(AdqOperator(u))), "out")
    })
}

/// # Safety
/// `op` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn adq_operator_dim(op: *const AdqOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.dim())
}

/// Row-major real and imaginary parts; `len` must equal dim * dim.
///
/// # Safety
/// `re` and `im` must each point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn adq_operator_entries(
    op: *const AdqOperator,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> AdqStatus {
    guard(|| {
        let op = deref(op, "operator")?;
        if re.is_null() || im.is_null() {
            return Err(Failure::Null("re/im"));
        }
        let n = op.0.dim();
        if len != n * n {
            return Err(Failure::Arg(format!(
                "buffer length {len} differs from {n} x {n}"
            )));
        }
        let re = std::slice::from_raw_parts_mut(re, len);
        let im = std::slice::from_raw_parts_mut(im, len);
        for i in 0..n {
            for j in 0..n {
                let c = op.0.get(i, j);
                re[i * n + j] = c.re;
                im[i * n + j] = c.im;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `op` must come from this library and not be used afterwards; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn adq_operator_free(op: *mut AdqOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Portrait of a basic observable at z for the analysis/reconstruction pair (q1, q2).
///
/// # Safety
/// `q1`, `q2` must be live handles; `out_re`, `out_im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn adq_portrait_value(
    q1: *const AdqQuantizer,
    q2: *const AdqQuantizer,
    observable: AdqObservable,
    re_z: f64,
    im_z: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> AdqStatus {
    guard(|| {
        let (q1, q2) = (deref(q1, "q1")?, deref(q2, "q2")?);
        let engine = Portrait::new(&q1.0, &q2.0, -1.0, GridSpec::default())?;
        let v = engine.value(
            &Field::observable(observable.into()),
            DiskPoint::from_re_im(re_z, im_z)?,
        )?;
        write(out_re, v.re, "out_re")?;
        write(out_im, v.im, "out_im")
    })
}

/// kappa with portrait(k_a) = kappa k_a, checked for constancy across the disk.
///
/// # Safety
/// `q1`, `q2` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adq_kappa(
    q1: *const AdqQuantizer,
    q2: *const AdqQuantizer,
    out: *mut f64,
) -> AdqStatus {
    guard(|| {
        let (q1, q2) = (deref(q1, "q1")?, deref(q2, "q2")?);
        if q1.0.eta() != q2.0.eta() {
            return Err(Failure::Arg("quantizers built for different eta".into()));
        }
        let engine = Portrait::new(&q1.0, &q2.0, -1.0, GridSpec::default())?;
        write(out, kappa_from(&engine)?.kappa, "out")
    })
}
