//! Minimal success count `n` whose guaranteed risk meets a target.
//!
//! The guaranteed risk `R_bar(n)` of the proposed estimator bounds the risk
//! at every `p`, so the plan holds irrespective of the unknown probability.

use crate::error::{domain, Error, Result};
use crate::estimators::{proposed, EstimatorSpec};
use crate::loss::LossSpec;
use crate::risk::guaranteed_risk;

/// Largest `n` the planner will consider.
pub const N_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanResult {
    pub n: u64,
    pub estimator: EstimatorSpec,
    pub guaranteed_risk: f64,
    pub target: f64,
}

/// Smallest `n >= 2` with `R_bar(n) <= target`.
///
/// Exponential then binary search, treating `R_bar` as decreasing; the
/// crossing `R_bar(n-1) > target >= R_bar(n)` is then checked directly, and
/// a linear scan from `n = 2` takes over if it does not hold.
pub fn plan(loss: &LossSpec, target: f64) -> Result<PlanResult> {
    if target.is_nan() {
        return domain("target risk is NaN");
    }
    let unreachable = Error::Unreachable { target, cap: N_CAP };
    if target <= 0.0 {
        return Err(unreachable);
    }
    let meets = |n: u64| -> Result<bool> { Ok(guaranteed_risk(loss, n)? <= target) };

    let n = if meets(2)? {
        2
    } else {
        let mut lo = 2;
        let mut hi = 4;
        while !meets(hi)? {
            if hi == N_CAP {
                return Err(unreachable);
            }
            lo = hi;
            hi = (hi * 2).min(N_CAP);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if meets(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if meets(hi)? && !meets(hi - 1)? {
            hi
        } else {
            linear_scan(&meets)?.ok_or(unreachable)?
        }
    };
    Ok(PlanResult {
        n,
        estimator: proposed(loss, n)?,
        guaranteed_risk: guaranteed_risk(loss, n)?,
        target,
    })
}

fn linear_scan(meets: &dyn Fn(u64) -> Result<bool>) -> Result<Option<u64>> {
    for n in 2..=N_CAP {
        if meets(n)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}
