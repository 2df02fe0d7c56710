//! The asymptotically optimal constant `omega*`, the minimax reference risk
//! and how far the proposed estimators fall short of it.
//!
//! As `p -> 0` the risk of `omega/(N+d)` depends on `omega` alone, and the
//! derivative of that limit in `omega` is increasing for both loss families.
//! Its unique zero `omega*` minimizes the limit, so `R* = R_bar(omega*)` is a
//! lower bound on the guaranteed risk of any estimator in the family.

use crate::error::{domain, Result};
use crate::estimators::{omega_il, proposed};
use crate::loss::{LossFamily, LossSpec};
use crate::risk::asymptotic_risk_at;
use crate::roots::{bisect_increasing, bracket_increasing};
use crate::special_fn::{reg_lower_gamma, reg_upper_gamma};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimaxReport {
    pub omega_star: f64,
    pub risk_star: f64,
    /// Guaranteed risk of the proposed estimator.
    pub risk_bar: f64,
    pub degradation: f64,
}

fn check_slopes(a: f64, b: f64) -> Result<()> {
    if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
        Ok(())
    } else {
        domain(format!(
            "minimax analysis requires a, b > 0, got a={a}, b={b}"
        ))
    }
}

fn check_n(n: u64) -> Result<()> {
    if n >= 2 {
        Ok(())
    } else {
        domain(format!("minimax analysis requires n >= 2, got {n}"))
    }
}

/// Derivative in `omega` of the asymptotic risk.
pub fn asymptotic_risk_derivative(loss: &LossSpec, n: u64, omega: f64) -> Result<f64> {
    check_n(n)?;
    if !(omega > 0.0) {
        return domain(format!("omega must be positive, got {omega}"));
    }
    let (a, b) = (loss.a(), loss.b());
    let n1 = (n - 1) as f64;
    let g = reg_lower_gamma(n1, omega)?;
    Ok(match loss.family() {
        LossFamily::LinearLinear => ((a + b) * g - a) / n1,
        LossFamily::InverseLinear => {
            let q = reg_upper_gamma(n as f64 + 1.0, omega)?;
            b * g / n1 - a * n as f64 * q / (omega * omega)
        }
    })
}

fn solve_omega_star(loss: &LossSpec, n: u64) -> Result<f64> {
    let f = |w: f64| asymptotic_risk_derivative(loss, n, w);
    let (lo, hi) = bracket_increasing(&f, 1e-6, n as f64 + 10.0, 0.0)?;
    bisect_increasing(f, lo, hi)
}

/// Root of `gamma(n-1, omega) = a/(a+b)`.
pub fn omega_star_ll(n: u64, a: f64, b: f64) -> Result<f64> {
    check_n(n)?;
    check_slopes(a, b)?;
    solve_omega_star(&LossSpec::linear_linear(a, b)?, n)
}

/// Root of `omega^2 / (n(n-1)) = a (1 - gamma(n+1, omega)) / (b gamma(n-1, omega))`.
pub fn omega_star_il(n: u64, a: f64, b: f64) -> Result<f64> {
    check_n(n)?;
    check_slopes(a, b)?;
    solve_omega_star(&LossSpec::inverse_linear(a, b)?, n)
}

pub fn omega_star(loss: &LossSpec, n: u64) -> Result<f64> {
    match loss.family() {
        LossFamily::LinearLinear => omega_star_ll(n, loss.a(), loss.b()),
        LossFamily::InverseLinear => omega_star_il(n, loss.a(), loss.b()),
    }
}

/// Compares the guaranteed risk of the proposed estimator for `loss` with
/// the minimax reference. Both sides use the closed-form asymptotic risk.
pub fn degradation(loss: &LossSpec, n: u64) -> Result<MinimaxReport> {
    let omega_star = omega_star(loss, n)?;
    let risk_star = asymptotic_risk_at(loss, n, omega_star)?;
    let risk_bar = asymptotic_risk_at(loss, n, proposed(loss, n)?.omega())?;
    Ok(MinimaxReport {
        omega_star,
        risk_star,
        risk_bar,
        degradation: risk_bar / risk_star,
    })
}

/// The ratio `a/b` at which UMVU is minimax under linear-linear loss:
/// `gamma(n-1, n-1) / (1 - gamma(n-1, n-1))`.
pub fn minimax_ratio_ll(n: u64) -> Result<f64> {
    check_n(n)?;
    let n1 = (n - 1) as f64;
    Ok(reg_lower_gamma(n1, n1)? / reg_upper_gamma(n1, n1)?)
}

/// Mismatch between the optimality condition for `omega` and the condition
/// defining `omega_il`, at `omega = omega_il(n, r, 1)`. Decreasing in `r`.
fn il_mismatch(n: u64, r: f64) -> Result<f64> {
    let nf = n as f64;
    let w = omega_il(n, r, 1.0)?;
    let above = w - (nf - 1.0);
    let below = nf - w;
    let lhs = reg_lower_gamma(nf - 1.0, w)? / reg_upper_gamma(nf + 1.0, w)?;
    Ok(lhs - nf * above / (w * below))
}

/// The unique ratio `a/b` at which the inverse-linear estimator with
/// `omega_il` is minimax.
pub fn minimax_ratio_il(n: u64) -> Result<f64> {
    check_n(n)?;
    let f = |s: f64| il_mismatch(n, s.exp()).map(|h| -h);
    let (lo, hi) = bracket_increasing(&f, -1.0, 1.0, f64::NEG_INFINITY)?;
    Ok(bisect_increasing(f, lo, hi)?.exp())
}
