//! Bisection on monotone increasing functions.

use crate::error::{Error, Result};

pub(crate) const MAX_BISECTIONS: usize = 200;

/// Finds the sign change of an increasing `f` inside `[lo, hi]`, which must
/// satisfy `f(lo) <= 0 <= f(hi)`. Stops when the bracket no longer shrinks
/// in floating point, or after [`MAX_BISECTIONS`] halvings.
pub(crate) fn bisect_increasing<F>(f: F, mut lo: f64, mut hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::NonConvergence(format!(
            "root not bracketed: f({lo})={flo}, f({hi})={fhi}"
        )));
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Grows `[lo, hi]` geometrically until an increasing `f` changes sign on it.
/// `lo` halves its distance to `lower_limit` (exclusive), or steps down by the
/// current width when the limit is infinite; `hi` doubles.
pub(crate) fn bracket_increasing<F>(
    f: &F,
    mut lo: f64,
    mut hi: f64,
    lower_limit: f64,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    for _ in 0..MAX_BISECTIONS {
        if f(lo)? > 0.0 {
            let width = (hi - lo).max(1.0);
            hi = lo;
            lo = if lower_limit.is_finite() {
                lower_limit + (lo - lower_limit) * 0.5
            } else {
                lo - width
            };
            continue;
        }
        if f(hi)? < 0.0 {
            let width = (hi - lo).max(1.0);
            lo = hi;
            hi = if hi > 0.0 { hi * 2.0 } else { hi + width };
            continue;
        }
        return Ok((lo, hi));
    }
    Err(Error::NonConvergence(format!(
        "could not bracket a root, last interval [{lo}, {hi}]"
    )))
}
