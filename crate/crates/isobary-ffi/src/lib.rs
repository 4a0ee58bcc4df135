//! C interface to the tail, slice, and solver computations. Handles are
//! opaque, every call returns a status code, and values come back through
//! out-pointers. `include/isobary.h` is generated from this file by the
//! build script and committed alongside it.
//!
//! Rationals cross the boundary as numerator/denominator pairs on the way
//! in and as nearest doubles on the way out.

use std::panic::{catch_unwind, AssertUnwindSafe};

use isobary::cube_slice::{slice_stats, Halfspace};
use isobary::exactnum::{from_f64, to_f64, Rational};
use isobary::irwin_hall::IrwinHallTail;
use isobary::solver::{solve, solve_diagonal};
use isobary::Error;

/// Outcome of every call. Zero is success; everything else identifies the
/// failure class, mirroring the library's error type.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IsobaryStatus {
    Ok = 0,
    OutOfDomain = 1,
    CapExceeded = 2,
    Precondition = 3,
    EmptySlice = 4,
    InvalidHalfspace = 5,
    TargetOutOfRange = 6,
    NoConvergence = 7,
    Parse = 8,
    Io = 9,
    NullPointer = 10,
    Panic = 11,
}

fn status_of(e: &Error) -> IsobaryStatus {
    match e {
        Error::OutOfDomain { .. } => IsobaryStatus::OutOfDomain,
        Error::CapExceeded { .. } => IsobaryStatus::CapExceeded,
        Error::Precondition { .. } => IsobaryStatus::Precondition,
        Error::EmptySlice => IsobaryStatus::EmptySlice,
        Error::InvalidHalfspace(_) => IsobaryStatus::InvalidHalfspace,
        Error::TargetOutOfRange(_) => IsobaryStatus::TargetOutOfRange,
        Error::NoConvergence { .. } => IsobaryStatus::NoConvergence,
        Error::Parse(_) => IsobaryStatus::Parse,
        Error::Io(_) => IsobaryStatus::Io,
    }
}

/// Opaque distribution handle created by `isobary_tail_new`.
pub struct IsobaryTail(IrwinHallTail);

fn rational_arg(num: i64, den: i64) -> Result<Rational, Error> {
    if den == 0 {
        return Err(Error::Parse("zero denominator".to_string()));
    }
    Ok(Rational::new(num.into(), den.into()))
}

/// Runs a fallible body and stores its f64 result, translating errors and
/// panics into statuses. Panics must not unwind across the C boundary.
fn guarded(out: *mut f64, body: impl FnOnce() -> Result<f64, Error>) -> IsobaryStatus {
    if out.is_null() {
        return IsobaryStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(v)) => {
            unsafe { *out = v };
            IsobaryStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => IsobaryStatus::Panic,
    }
}

/// Allocates the mean-of-n-uniforms distribution. On success writes the
/// handle to `out`; release it with `isobary_tail_free`.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn isobary_tail_new(n: u32, out: *mut *mut IsobaryTail) -> IsobaryStatus {
    if out.is_null() {
        return IsobaryStatus::NullPointer;
    }
    match catch_unwind(|| IrwinHallTail::build(n)) {
        Ok(Ok(tail)) => {
            unsafe { *out = Box::into_raw(Box::new(IsobaryTail(tail))) };
            IsobaryStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => IsobaryStatus::Panic,
    }
}

/// Releases a handle. Null is a no-op.
///
/// # Safety
/// `handle` must be null or a pointer returned by `isobary_tail_new`
/// that has not been freed already.
#[no_mangle]
pub unsafe extern "C" fn isobary_tail_free(handle: *mut IsobaryTail) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

macro_rules! tail_query {
    ($handle:expr, $out:expr, $num:expr, $den:expr, $method:expr) => {{
        if $handle.is_null() {
            return IsobaryStatus::NullPointer;
        }
        let tail = unsafe { &(*$handle).0 };
        guarded($out, || {
            let t = rational_arg($num, $den)?;
            $method(tail, &t)
        })
    }};
}

/// P(mean > t) at t = t_num/t_den, as the nearest double.
///
/// # Safety
/// `handle` must be null or a live handle; `out` must be null or valid
/// for writing one double.
#[no_mangle]
pub unsafe extern "C" fn isobary_tail_eval(
    handle: *const IsobaryTail,
    t_num: i64,
    t_den: i64,
    out: *mut f64,
) -> IsobaryStatus {
    tail_query!(handle, out, t_num, t_den, |d: &IrwinHallTail, t| d
        .tail(t)
        .map(|v| to_f64(&v)))
}

/// E[mean | mean > t], as the nearest double.
///
/// # Safety
/// `handle` must be null or a live handle; `out` must be null or valid
/// for writing one double.
#[no_mangle]
pub unsafe extern "C" fn isobary_tail_mean(
    handle: *const IsobaryTail,
    t_num: i64,
    t_den: i64,
    out: *mut f64,
) -> IsobaryStatus {
    tail_query!(handle, out, t_num, t_den, |d: &IrwinHallTail, t| d
        .truncated_mean(t)
        .map(|v| to_f64(&v)))
}

/// D(t) = (m(t) - t)·m(t) / (1 - m(t)²), as the nearest double.
///
/// # Safety
/// `handle` must be null or a live handle; `out` must be null or valid
/// for writing one double.
#[no_mangle]
pub unsafe extern "C" fn isobary_tail_derived(
    handle: *const IsobaryTail,
    t_num: i64,
    t_den: i64,
    out: *mut f64,
) -> IsobaryStatus {
    tail_query!(handle, out, t_num, t_den, |d: &IrwinHallTail, t| d
        .derived_quantity(t)
        .map(|v| to_f64(&v)))
}

/// (1/n)·ln p(t) - (1/2)·ln(1 - m(t)²); negative iff the diagonal gap
/// inequality holds at t.
///
/// # Safety
/// `handle` must be null or a live handle; `out` must be null or valid
/// for writing one double.
#[no_mangle]
pub unsafe extern "C" fn isobary_tail_diag_gap(
    handle: *const IsobaryTail,
    t_num: i64,
    t_den: i64,
    out: *mut f64,
) -> IsobaryStatus {
    tail_query!(handle, out, t_num, t_den, |d: &IrwinHallTail, t| d.diag_gap(t))
}

/// Exact volume fraction and barycenter of [-1,1]^dim ∩ {⟨w,u⟩ >= c}.
/// `direction` need not be normalized; `out_barycenter` must hold `dim`
/// doubles. The doubles are read exactly (they are binary fractions), so
/// the statistics are exact for the halfspace the caller's bits denote.
///
/// # Safety
/// `direction` must be null or point to `dim` readable doubles;
/// `out_volume_fraction` must be null or valid for one double;
/// `out_barycenter` must be null or valid for `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn isobary_slice_stats(
    dim: u32,
    direction: *const f64,
    offset: f64,
    out_volume_fraction: *mut f64,
    out_barycenter: *mut f64,
) -> IsobaryStatus {
    if direction.is_null() || out_volume_fraction.is_null() || out_barycenter.is_null() {
        return IsobaryStatus::NullPointer;
    }
    if dim == 0 {
        return IsobaryStatus::InvalidHalfspace;
    }
    let dir = unsafe { std::slice::from_raw_parts(direction, dim as usize) };
    let result = catch_unwind(|| -> Result<(f64, Vec<f64>), Error> {
        let exact = dir
            .iter()
            .map(|&d| from_f64(d))
            .collect::<Result<Vec<Rational>, Error>>()?;
        let h = Halfspace::exact(exact, from_f64(offset)?)?;
        let stats = slice_stats(&h)?;
        Ok((
            to_f64(&stats.volume_fraction),
            stats.barycenter.iter().map(to_f64).collect(),
        ))
    });
    match result {
        Ok(Ok((volume, barycenter))) => {
            unsafe {
                *out_volume_fraction = volume;
                for (i, b) in barycenter.iter().enumerate() {
                    *out_barycenter.add(i) = *b;
                }
            }
            IsobaryStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => IsobaryStatus::Panic,
    }
}

/// Finds the halfspace whose slice of [-1,1]^dim has barycenter `target`.
/// Writes the unit direction (`dim` doubles), offset, and achieved
/// residual; `out_agreement` reports whether all solver starts landed on
/// the same halfspace.
///
/// # Safety
/// `target` must be null or point to `dim` readable doubles;
/// `out_direction` must be null or valid for `dim` doubles; the other
/// out-pointers must be null or valid for one value each.
#[no_mangle]
pub unsafe extern "C" fn isobary_solve(
    dim: u32,
    target: *const f64,
    out_direction: *mut f64,
    out_offset: *mut f64,
    out_residual: *mut f64,
    out_agreement: *mut bool,
) -> IsobaryStatus {
    if target.is_null()
        || out_direction.is_null()
        || out_offset.is_null()
        || out_residual.is_null()
        || out_agreement.is_null()
    {
        return IsobaryStatus::NullPointer;
    }
    if dim == 0 {
        return IsobaryStatus::TargetOutOfRange;
    }
    let x = unsafe { std::slice::from_raw_parts(target, dim as usize) };
    match catch_unwind(|| solve(x)) {
        Ok(Ok(r)) => {
            let Halfspace::Float { direction, offset } = &r.halfspace else {
                return IsobaryStatus::Panic;
            };
            unsafe {
                for (i, d) in direction.iter().enumerate() {
                    *out_direction.add(i) = *d;
                }
                *out_offset = *offset;
                *out_residual = r.residual;
                *out_agreement = r.multistart_agreement;
            }
            IsobaryStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => IsobaryStatus::Panic,
    }
}

/// Offset t of the diagonal slice {mean(u) >= t} of [-1,1]^n whose
/// barycenter is m·(1,..,1), with m = m_num/m_den in (-1,1)\{0}. The
/// returned t is the nearest double to the solved offset.
///
/// # Safety
/// `out_t` must be null or valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn isobary_diagonal_offset(
    n: u32,
    m_num: i64,
    m_den: i64,
    out_t: *mut f64,
) -> IsobaryStatus {
    guarded(out_t, || {
        let m = rational_arg(m_num, m_den)?;
        solve_diagonal(n, &m).map(|t| to_f64(&t))
    })
}
