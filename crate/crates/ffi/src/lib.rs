//! C ABI over `hankel-core`.
//!
//! Every entry point returns an [`HkStatus`] and writes results through out
//! pointers. On failure the message is kept per thread and can be copied out
//! with [`hk_last_error_message`]. Series and domains are opaque handles that
//! the caller owns and releases with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hankel_core::bounds;
use hankel_core::domains::{self, ConformalDomain, Symbol};
use hankel_core::hankel;
use hankel_core::{Error, PowerSeries, WeightParam};
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidWeight = 3,
    /// Zero or nonzero constant term where the other was required, or `F'(0) = 0`.
    DegenerateSeries = 4,
    NonConvergent = 5,
    Parse = 6,
    Io = 7,
    /// A Rust panic was caught at the boundary.
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HkComplex {
    pub re: f64,
    pub im: f64,
}

impl From<HkComplex> for Complex64 {
    fn from(c: HkComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<Complex64> for HkComplex {
    fn from(c: Complex64) -> Self {
        HkComplex { re: c.re, im: c.im }
    }
}

/// Truncated power series `Σ c_k z^k`.
pub struct HkSeries(PowerSeries);

/// Simply connected domain `F(𝔻)`.
pub struct HkDomain(ConformalDomain);

/// Flat copy of a bound report. Optional values are NaN when absent.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HkBoundReport {
    pub alpha: f64,
    pub dim: usize,
    pub lower_rigidity: f64,
    pub commutator_norm: f64,
    pub upper_sharp: f64,
    pub upper_putnam: f64,
    pub khavinson_lower: f64,
    pub chain_ok: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> HkStatus {
    match e {
        Error::InvalidWeight(_) => HkStatus::InvalidWeight,
        Error::NonzeroConstant(_) | Error::ZeroConstant | Error::DegenerateMap | Error::OrderTooLow { .. } => {
            HkStatus::DegenerateSeries
        }
        Error::NonConvergent { .. } => HkStatus::NonConvergent,
        Error::Parse { .. } => HkStatus::Parse,
        Error::Io(_) => HkStatus::Io,
        Error::OutsideDisk(_) | Error::EmptyMask(_) | Error::InvalidArgument(_) => HkStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
    Arg(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            HkStatus::Ok
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer: {name}"));
            HkStatus::NullPointer
        }
        Ok(Err(Failure::Arg(msg))) => {
            set_error(msg);
            HkStatus::InvalidArgument
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            HkStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn write<T>(out: *mut T, value: T, name: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn string<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Arg(format!("{name} is not valid UTF-8")))
}

fn weight(alpha: f64) -> Result<WeightParam, Failure> {
    Ok(WeightParam::new(alpha)?)
}

/// Null `psi` means the coordinate symbol.
unsafe fn symbol(psi: *const HkSeries) -> Symbol {
    match psi.as_ref() {
        None => Symbol::Coordinate,
        Some(s) => Symbol::Series(s.0.clone()),
    }
}

/// Copies the last error message of this thread into `buf` (NUL terminated,
/// truncated to `len`). Returns the full message length without the NUL.
/// Pass a null `buf` to query the length.
///
/// # Safety
/// `buf` must be null or point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hk_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn hk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a series from `len` coefficients, lowest degree first.
///
/// # Safety
/// `coeffs` must point to `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hk_series_new(coeffs: *const HkComplex, len: usize, out: *mut *mut HkSeries) -> HkStatus {
    guard(|| {
        if len == 0 {
            return Err(Failure::Arg("series needs at least one coefficient".into()));
        }
        if coeffs.is_null() {
            return Err(Failure::Null("coeffs"));
        }
        let c: Vec<Complex64> = std::slice::from_raw_parts(coeffs, len)
            .iter()
            .map(|&z| z.into())
            .collect();
        if c.iter().any(|z| !z.is_finite()) {
            return Err(Failure::Arg("coefficients must be finite".into()));
        }
        let handle = Box::into_raw(Box::new(HkSeries(PowerSeries::new(c))));
        if out.is_null() {
            drop(Box::from_raw(handle));
            return Err(Failure::Null("out"));
        }
        *out = handle;
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from [`hk_series_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hk_series_free(s: *mut HkSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of stored coefficients, 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_series_len(s: *const HkSeries) -> usize {
    s.as_ref().map_or(0, |s| s.0.coeffs().len())
}

/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_series_coeff(s: *const HkSeries, k: usize, out: *mut HkComplex) -> HkStatus {
    guard(|| {
        let s = deref(s, "series")?;
        write(out, s.0.coeff(k).into(), "out")
    })
}

/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_series_evaluate(s: *const HkSeries, z: HkComplex, out: *mut HkComplex) -> HkStatus {
    guard(|| {
        let s = deref(s, "series")?;
        write(out, s.0.evaluate(z.into()).into(), "out")
    })
}

/// Domain `F(𝔻)` for the map `F`, which must have `F'(0) ≠ 0`.
/// `samples` is the boundary sample count used for the perimeter (at least 16).
///
/// # Safety
/// `id` must be a NUL-terminated string, `map` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_domain_new(
    id: *const c_char,
    map: *const HkSeries,
    samples: usize,
    out: *mut *mut HkDomain,
) -> HkStatus {
    guard(|| {
        let id = string(id, "id")?;
        let map = deref(map, "map")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let d = ConformalDomain::with_samples(id, map.0.clone(), samples)?;
        *out = Box::into_raw(Box::new(HkDomain(d)));
        Ok(())
    })
}

/// `"disk"`, `"example1"`, or a path to a coefficient file.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_domain_builtin(name: *const c_char, out: *mut *mut HkDomain) -> HkStatus {
    guard(|| {
        let name = string(name, "name")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let d = ConformalDomain::from_spec(name, domains::DEFAULT_SAMPLES)?;
        *out = Box::into_raw(Box::new(HkDomain(d)));
        Ok(())
    })
}

/// # Safety
/// `d` must be null or a domain handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hk_domain_free(d: *mut HkDomain) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_domain_area(d: *const HkDomain, out: *mut f64) -> HkStatus {
    guard(|| write(out, deref(d, "domain")?.0.area(), "out"))
}

/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_domain_perimeter(d: *const HkDomain, out: *mut f64) -> HkStatus {
    guard(|| write(out, deref(d, "domain")?.0.perimeter(), "out"))
}

/// `‖H_{ψ̄} f‖²` in `A²_α(𝔻)`.
///
/// # Safety
/// `f` and `psi` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_hankel_norm_sq(
    f: *const HkSeries,
    psi: *const HkSeries,
    alpha: f64,
    out: *mut f64,
) -> HkStatus {
    guard(|| {
        let f = deref(f, "f")?;
        let psi = deref(psi, "psi")?;
        let v = hankel::hankel_norm_sq(&f.0, &psi.0, weight(alpha)?)?;
        write(out, v, "out")
    })
}

/// Squared norm of `H_{ψ̄}` compressed to polynomials of degree `< dim`.
///
/// # Safety
/// `psi` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_operator_norm_sq(psi: *const HkSeries, alpha: f64, dim: usize, out: *mut f64) -> HkStatus {
    guard(|| {
        let psi = deref(psi, "psi")?;
        let form = hankel::build_form(&psi.0, weight(alpha)?, dim)?;
        write(out, hankel::operator_norm_sq(&form)?, "out")
    })
}

/// `Σ n|c_n|² / (α+2)`, the sharp upper bound for the squared norm.
///
/// # Safety
/// `psi` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_theorem_bound_sq(psi: *const HkSeries, alpha: f64, out: *mut f64) -> HkStatus {
    guard(|| {
        let psi = deref(psi, "psi")?;
        write(out, hankel::theorem_bound_sq(&psi.0, weight(alpha)?), "out")
    })
}

/// Weighted torsional rigidity `‖H_{w̄} 1‖²` on the domain, normalized units.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_rigidity(d: *const HkDomain, alpha: f64, out: *mut f64) -> HkStatus {
    guard(|| {
        let d = deref(d, "domain")?;
        write(out, bounds::rigidity(d.0.map(), weight(alpha)?)?, "out")
    })
}

/// Rigidity divided by `‖1‖²`.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_rigidity_lower_bound(d: *const HkDomain, alpha: f64, out: *mut f64) -> HkStatus {
    guard(|| {
        let d = deref(d, "domain")?;
        write(out, bounds::rigidity_lower_bound(d.0.map(), weight(alpha)?)?, "out")
    })
}

/// `4 Area² / Per²`.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_khavinson(d: *const HkDomain, out: *mut f64) -> HkStatus {
    guard(|| {
        let d = deref(d, "domain")?;
        write(out, bounds::khavinson_lower_bound(d.0.map())?, "out")
    })
}

/// `Area / π`.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_putnam(d: *const HkDomain, out: *mut f64) -> HkStatus {
    guard(|| {
        let d = deref(d, "domain")?;
        write(out, bounds::putnam_bound(d.0.map())?, "out")
    })
}

/// Squared commutator norm at truncation `dim`. A null `psi` means `ψ(w) = w`.
///
/// # Safety
/// `d` must be a live handle, `psi` null or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_commutator_norm_sq(
    d: *const HkDomain,
    psi: *const HkSeries,
    alpha: f64,
    dim: usize,
    out: *mut f64,
) -> HkStatus {
    guard(|| {
        let d = deref(d, "domain")?;
        let v = bounds::commutator_norm_sq(d.0.map(), &symbol(psi), weight(alpha)?, dim)?;
        write(out, v, "out")
    })
}

/// Full bound chain. A null `psi` means `ψ(w) = w`.
///
/// # Safety
/// `d` must be a live handle, `psi` null or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_full_report(
    d: *const HkDomain,
    psi: *const HkSeries,
    alpha: f64,
    dim: usize,
    out: *mut HkBoundReport,
) -> HkStatus {
    guard(|| {
        let d = deref(d, "domain")?;
        let r = bounds::full_report(&d.0, &symbol(psi), weight(alpha)?, dim)?;
        let flat = HkBoundReport {
            alpha: r.alpha,
            dim: r.dim,
            lower_rigidity: r.lower_rigidity,
            commutator_norm: r.commutator_norm,
            upper_sharp: r.upper_sharp,
            upper_putnam: r.upper_putnam.unwrap_or(f64::NAN),
            khavinson_lower: r.khavinson_lower.unwrap_or(f64::NAN),
            chain_ok: r.chain_ok(),
        };
        write(out, flat, "out")
    })
}
