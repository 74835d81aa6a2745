//! C ABI over the exact operator layer of `hj-relax`.
//!
//! Functions are passed around as opaque `HjPl` handles owned by the caller
//! and released with [`hj_pl_free`]. Rationals cross the boundary as
//! `HjRational { num, den }` with `den > 0`. Every entry point returns an
//! [`HjStatus`]; on failure the message is retrievable with
//! [`hj_last_error`] from the same thread.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hj_relax::godunov::{dirichlet_relaxed, godunov_flux, godunov_operator, neumann_relaxed};
use hj_relax::guerand::guerand_operator;
use hj_relax::relaxation::{relax, sub_relax, super_relax, EnvelopePolicy};
use hj_relax::scalar::{from_f64, ratio, to_f64};
use hj_relax::{Error, PLFunction, Rational};
use num_traits::ToPrimitive;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HjStatus {
    Ok = 0,
    NullPointer = 1,
    /// Zero denominator, index out of range, non-finite float.
    InvalidArgument = 2,
    InvalidFunction = 3,
    InvalidHamiltonian = 4,
    InvalidBoundary = 5,
    NotSemiCoercive = 6,
    Unbounded = 7,
    /// Two exact routes disagreed; this is a bug.
    InternalMismatch = 8,
    /// A value does not fit in `i64 / i64`.
    Overflow = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HjRational {
    pub num: i64,
    pub den: i64,
}

/// Opaque piecewise-linear function.
pub struct HjPl(PLFunction);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: HjStatus, msg: impl Into<String>) -> HjStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
    status
}

impl From<Error> for HjStatus {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidFunction(_) => HjStatus::InvalidFunction,
            Error::InvalidHamiltonian(_) => HjStatus::InvalidHamiltonian,
            Error::InvalidBoundary(_) => HjStatus::InvalidBoundary,
            Error::NotSemiCoercive => HjStatus::NotSemiCoercive,
            Error::UnboundedAbove(_) | Error::UnboundedBelow(_) => HjStatus::Unbounded,
            Error::InternalMismatch(_) | Error::RootNotFound(_) => HjStatus::InternalMismatch,
            Error::CflViolation { .. } | Error::DomainTooShort { .. } | Error::InvalidGrid(_) => {
                HjStatus::InvalidArgument
            }
        };
        fail(status, e.to_string())
    }
}

/// Runs `f`, turning panics into `HjStatus::Panic`.
fn guard(f: impl FnOnce() -> Result<(), HjStatus>) -> HjStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HjStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(HjStatus::Panic, "panic inside hj-relax"),
    }
}

fn rational(r: HjRational) -> Result<Rational, HjStatus> {
    if r.den == 0 {
        return Err(fail(HjStatus::InvalidArgument, "zero denominator"));
    }
    Ok(ratio(r.num, r.den))
}

fn to_c(r: &Rational) -> Result<HjRational, HjStatus> {
    match (r.numer().to_i64(), r.denom().to_i64()) {
        (Some(num), Some(den)) => Ok(HjRational { num, den }),
        _ => Err(fail(HjStatus::Overflow, format!("{r} does not fit in i64"))),
    }
}

unsafe fn handle<'a>(p: *const HjPl) -> Result<&'a PLFunction, HjStatus> {
    p.as_ref()
        .map(|h| &h.0)
        .ok_or_else(|| fail(HjStatus::NullPointer, "null handle"))
}

unsafe fn store<T>(out: *mut T, value: T) -> Result<(), HjStatus> {
    if out.is_null() {
        return Err(fail(HjStatus::NullPointer, "null output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn emit(out: *mut *mut HjPl, f: PLFunction) -> Result<(), HjStatus> {
    store(out, Box::into_raw(Box::new(HjPl(f))))
}

fn policy(strict: bool) -> EnvelopePolicy {
    if strict {
        EnvelopePolicy::Strict
    } else {
        EnvelopePolicy::Upgrade
    }
}

/// Builds a function from `n` breakpoints `(xs[i], ys[i])` and its tail slopes.
///
/// # Safety
/// `xs` and `ys` must point to `n` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hj_pl_new(
    xs: *const HjRational,
    ys: *const HjRational,
    n: usize,
    slope_left: HjRational,
    slope_right: HjRational,
    out: *mut *mut HjPl,
) -> HjStatus {
    guard(|| {
        if n > 0 && (xs.is_null() || ys.is_null()) {
            return Err(fail(HjStatus::NullPointer, "null breakpoint array"));
        }
        let mut pts = Vec::with_capacity(n);
        for i in 0..n {
            pts.push((rational(*xs.add(i))?, rational(*ys.add(i))?));
        }
        let f = PLFunction::new(pts, rational(slope_left)?, rational(slope_right)?)?;
        emit(out, f)
    })
}

/// Copies a handle.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hj_pl_clone(f: *const HjPl, out: *mut *mut HjPl) -> HjStatus {
    guard(|| emit(out, handle(f)?.clone()))
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `f` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hj_pl_free(f: *mut HjPl) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of breakpoints in canonical form (at least one).
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hj_pl_breakpoint_count(f: *const HjPl, out: *mut usize) -> HjStatus {
    guard(|| store(out, handle(f)?.breakpoints().len()))
}

/// # Safety
/// `f` must be a live handle; `x` and `y` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hj_pl_breakpoint(
    f: *const HjPl,
    i: usize,
    x: *mut HjRational,
    y: *mut HjRational,
) -> HjStatus {
    guard(|| {
        let pts = handle(f)?.breakpoints();
        let (bx, by) = pts.get(i).ok_or_else(|| {
            fail(
                HjStatus::InvalidArgument,
                format!("index {i} out of {} breakpoints", pts.len()),
            )
        })?;
        store(x, to_c(bx)?)?;
        store(y, to_c(by)?)
    })
}

/// # Safety
/// `f` must be a live handle; `left` and `right` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hj_pl_slopes(
    f: *const HjPl,
    left: *mut HjRational,
    right: *mut HjRational,
) -> HjStatus {
    guard(|| {
        let f = handle(f)?;
        store(left, to_c(f.slope_left())?)?;
        store(right, to_c(f.slope_right())?)
    })
}

/// Exact value at `p`.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hj_pl_eval(
    f: *const HjPl,
    p: HjRational,
    out: *mut HjRational,
) -> HjStatus {
    guard(|| store(out, to_c(&handle(f)?.eval(&rational(p)?))?))
}

/// Value at a float abscissa, rounded to the nearest double.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hj_pl_eval_f64(f: *const HjPl, p: f64, out: *mut f64) -> HjStatus {
    guard(|| {
        let p =
            from_f64(p).ok_or_else(|| fail(HjStatus::InvalidArgument, "non-finite abscissa"))?;
        store(out, to_f64(&handle(f)?.eval(&p)))
    })
}

/// Exact equality of canonical forms.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hj_pl_equal(a: *const HjPl, b: *const HjPl, out: *mut bool) -> HjStatus {
    guard(|| store(out, handle(a)? == handle(b)?))
}

/// Writes the display form, NUL-terminated, into `buf`. `needed` receives the
/// size including the terminator, also when `cap` is too small.
///
/// # Safety
/// `f` must be a live handle; `buf` must hold `cap` bytes (may be null if `cap == 0`).
#[no_mangle]
pub unsafe extern "C" fn hj_pl_format(
    f: *const HjPl,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> HjStatus {
    guard(|| {
        let text = handle(f)?.to_string();
        write_c_string(&text, buf, cap, needed)
    })
}

unsafe fn write_c_string(
    text: &str,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> Result<(), HjStatus> {
    let len = text.len() + 1;
    if !needed.is_null() {
        needed.write(len);
    }
    if cap < len || buf.is_null() {
        return Err(fail(HjStatus::BufferTooSmall, format!("need {len} bytes")));
    }
    ptr::copy_nonoverlapping(text.as_ptr().cast::<c_char>(), buf, text.len());
    buf.add(text.len()).write(0);
    Ok(())
}

/// Relaxation of the boundary function `f0` against the Hamiltonian `h`.
///
/// # Safety
/// `h` and `f0` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hj_relax(
    h: *const HjPl,
    f0: *const HjPl,
    out: *mut *mut HjPl,
) -> HjStatus {
    guard(|| emit(out, relax(handle(h)?, handle(f0)?)?))
}

/// # Safety
/// `h` and `f0` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hj_sub_relax(
    h: *const HjPl,
    f0: *const HjPl,
    out: *mut *mut HjPl,
) -> HjStatus {
    guard(|| emit(out, sub_relax(handle(h)?, handle(f0)?)?))
}

/// # Safety
/// `h` and `f0` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hj_super_relax(
    h: *const HjPl,
    f0: *const HjPl,
    out: *mut *mut HjPl,
) -> HjStatus {
    guard(|| emit(out, super_relax(handle(h)?, handle(f0)?)?))
}

/// Plateau operator built from limiter points. With `strict`, a boundary
/// function whose left tail is flat is rejected instead of replaced by
/// `max(f0, H_-)`.
///
/// # Safety
/// `h` and `f0` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hj_guerand(
    h: *const HjPl,
    f0: *const HjPl,
    strict: bool,
    out: *mut *mut HjPl,
) -> HjStatus {
    guard(|| {
        emit(
            out,
            guerand_operator(handle(h)?, handle(f0)?, policy(strict))?,
        )
    })
}

/// Godunov operator `p -> G(q*, p)` with `f0(q*) = G(q*, p)`.
///
/// # Safety
/// `h` and `f0` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hj_godunov(
    h: *const HjPl,
    f0: *const HjPl,
    strict: bool,
    out: *mut *mut HjPl,
) -> HjStatus {
    guard(|| {
        emit(
            out,
            godunov_operator(handle(h)?, handle(f0)?, policy(strict))?,
        )
    })
}

/// Godunov flux `G(q, p)`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hj_godunov_flux(
    h: *const HjPl,
    q: HjRational,
    p: HjRational,
    out: *mut HjRational,
) -> HjStatus {
    guard(|| {
        store(
            out,
            to_c(&godunov_flux(handle(h)?, &rational(q)?, &rational(p)?)?)?,
        )
    })
}

/// Relaxed Neumann condition `u_x = slope`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hj_neumann(
    h: *const HjPl,
    slope: HjRational,
    out: *mut *mut HjPl,
) -> HjStatus {
    guard(|| emit(out, neumann_relaxed(handle(h)?, &rational(slope)?)?))
}

/// Relaxed Dirichlet condition `u = g`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hj_dirichlet(
    h: *const HjPl,
    g: HjRational,
    out: *mut *mut HjPl,
) -> HjStatus {
    guard(|| emit(out, dirichlet_relaxed(handle(h)?, &rational(g)?)?))
}

/// Copies this thread's last error message into `buf`, as [`hj_pl_format`].
///
/// # Safety
/// `buf` must hold `cap` bytes; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn hj_last_error(
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> HjStatus {
    let text = LAST_ERROR.with(|e| e.borrow().clone());
    match write_c_string(&text, buf, cap, needed) {
        Ok(()) => HjStatus::Ok,
        Err(s) => s,
    }
}
