//! Exact risk `R(p) = E[L(p_hat / p)]` under inverse binomial sampling and
//! its limit as `p -> 0`.
//!
//! Exact risk splits the stopping-time support at the breakpoint
//! `m0 = floor(omega/p - d)`. Stopping times `m <= m0` overestimate `p` and
//! are summed term by term; stopping times above `m0` underestimate `p`.
//! For inverse-linear loss that upper branch is linear in `m` and reduces to
//! negative binomial survival functions through `m p f_n(m) = n f_{n+1}(m+1)`;
//! for linear-linear loss it is summed until the remaining tail mass is
//! negligible, and the remainder is bounded by `a` times that mass.

use crate::error::{domain, Error, Result};
use crate::estimators::{omega_il, umvu, EstimatorSpec};
use crate::loss::{LossFamily, LossSpec};
use crate::quadrature::integrate_pieces;
use crate::special_fn::{
    binom_pmf, ln_negbin_unchecked, negbin_sf, poisson_pmf, reg_lower_gamma, reg_upper_gamma,
    NeumaierSum,
};

/// Largest breakpoint `m0` for which exact risk is computed.
pub const M0_CAP: u64 = 10_000_000;

/// Tail mass below which the linear-linear upper branch is truncated.
const TAIL_MASS: f64 = 1e-15;
/// Relative accuracy assumed for each pmf term in the series.
const TERM_REL_ERR: f64 = 5e-14;
const ANCHOR_EVERY: u32 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiskMethod {
    ClosedForm,
    TruncatedSeries,
    Quadrature,
}

impl RiskMethod {
    pub fn name(self) -> &'static str {
        match self {
            RiskMethod::ClosedForm => "closed-form",
            RiskMethod::TruncatedSeries => "truncated-series",
            RiskMethod::Quadrature => "quadrature",
        }
    }
}

/// A risk value, how it was obtained, and a bound on its truncation or
/// quadrature error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskReport {
    pub value: f64,
    pub method: RiskMethod,
    pub error_bound: f64,
    /// Breakpoint between over- and underestimating stopping times, when
    /// the computation uses one. Never below `n - 1`.
    pub m0: Option<u64>,
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        domain(format!("p must lie in (0, 1), got {p}"))
    }
}

/// `floor(omega/p - d)` clamped below at `n - 1`, or a capacity error.
pub fn breakpoint(spec: &EstimatorSpec, p: f64) -> Result<u64> {
    check_p(p)?;
    let raw = spec.omega() / p - spec.d();
    if !(raw <= M0_CAP as f64) {
        return Err(Error::Capacity {
            m0: raw.floor(),
            cap: M0_CAP,
        });
    }
    let floor = raw.floor();
    let n1 = spec.n() - 1;
    Ok(if floor < n1 as f64 { n1 } else { floor as u64 })
}

/// Walks `f_n(m)` for increasing `m` by the ratio recurrence, re-anchoring
/// on the saddle-point formula at a fixed stride.
struct NegbinWalk {
    n: u64,
    p: f64,
    m: u64,
    f: f64,
    since_anchor: u32,
}

impl NegbinWalk {
    fn new(n: u64, p: f64, start: u64) -> Self {
        let m = start.max(n);
        NegbinWalk {
            n,
            p,
            m,
            f: ln_negbin_unchecked(n, p, m).prob(),
            since_anchor: 0,
        }
    }

    #[inline]
    fn advance(&mut self) {
        let m = self.m;
        self.m += 1;
        self.since_anchor += 1;
        if self.since_anchor == ANCHOR_EVERY {
            self.f = ln_negbin_unchecked(self.n, self.p, self.m).prob();
            self.since_anchor = 0;
        } else {
            self.f *= m as f64 / (m + 1 - self.n) as f64 * (1.0 - self.p);
        }
    }
}

/// Sum of `f_n(m) L(p_hat(m)/p)` over `n <= m <= m0`; returns the sum and the
/// sum of absolute contributions.
fn lower_branch(loss: &LossSpec, spec: &EstimatorSpec, p: f64, m0: u64) -> (f64, f64) {
    let n = spec.n();
    if m0 < n {
        return (0.0, 0.0);
    }
    let mut acc = NeumaierSum::default();
    let mut walk = NegbinWalk::new(n, p, n);
    loop {
        let x = spec.estimate_unchecked(walk.m) / p;
        acc.add(walk.f * loss.eval_unchecked(x));
        if walk.m == m0 {
            break;
        }
        walk.advance();
    }
    let v = acc.value();
    (v, v.abs())
}

/// Linear-linear sum over `m > m0`, truncated once the tail mass is below
/// [`TAIL_MASS`]. Returns `(sum, truncation bound)`.
fn ll_upper_branch(loss: &LossSpec, spec: &EstimatorSpec, p: f64, m0: u64) -> Result<(f64, f64)> {
    let n = spec.n();
    let a = loss.a();
    if a == 0.0 {
        return Ok((0.0, 0.0));
    }
    let mode = 1.0 + (n - 1) as f64 / p;
    let mut acc = NeumaierSum::default();
    let mut walk = NegbinWalk::new(n, p, m0 + 1);
    let mut steps: u64 = 0;
    loop {
        let x = spec.estimate_unchecked(walk.m) / p;
        acc.add(walk.f * loss.eval_unchecked(x));
        steps += 1;
        if steps.is_multiple_of(256) && walk.m as f64 > mode && walk.f * a < 1e-16 {
            let tail = negbin_sf(n, p, walk.m)?;
            if tail < TAIL_MASS {
                return Ok((acc.value(), a * tail));
            }
        }
        walk.advance();
    }
}

/// Exact risk by direct summation, regardless of whether a closed form exists.
pub fn exact_risk_series(loss: &LossSpec, spec: &EstimatorSpec, p: f64) -> Result<RiskReport> {
    let m0 = breakpoint(spec, p)?;
    let n = spec.n();
    let (low, low_abs) = lower_branch(loss, spec, p, m0);
    let (high, truncation, high_abs) = match loss.family() {
        LossFamily::LinearLinear => {
            let (v, t) = ll_upper_branch(loss, spec, p, m0)?;
            (v, t, v.abs())
        }
        LossFamily::InverseLinear => {
            let a = loss.a();
            let omega = spec.omega();
            let first = a * n as f64 / omega * negbin_sf(n + 1, p, m0 + 1)?;
            let second = a * (spec.d() * p / omega - 1.0) * negbin_sf(n, p, m0)?;
            (first + second, 0.0, first.abs() + second.abs())
        }
    };
    let value = low + high;
    Ok(RiskReport {
        value,
        method: RiskMethod::TruncatedSeries,
        error_bound: truncation + TERM_REL_ERR * (low_abs + high_abs),
        m0: Some(m0),
    })
}

fn is_umvu(spec: &EstimatorSpec) -> bool {
    umvu(spec.n()).map(|u| u == *spec).unwrap_or(false)
}

/// Exact risk at `p`. Linear-linear loss with the UMVU estimator uses the
/// closed form `(a+b)(1-p) b_{m0-1,p}(n-1)`; everything else is summed.
pub fn exact_risk(loss: &LossSpec, spec: &EstimatorSpec, p: f64) -> Result<RiskReport> {
    if loss.family() == LossFamily::LinearLinear && is_umvu(spec) {
        let m0 = breakpoint(spec, p)?;
        let n = spec.n();
        let value = (loss.a() + loss.b()) * (1.0 - p) * binom_pmf(m0 - 1, p, n - 1)?;
        return Ok(RiskReport {
            value,
            method: RiskMethod::ClosedForm,
            error_bound: 0.0,
            m0: Some(m0),
        });
    }
    exact_risk_series(loss, spec, p)
}

/// `lim_{p->0} R(p)` for any estimator with `lim N p_hat(N) = omega`.
pub fn asymptotic_risk_at(loss: &LossSpec, n: u64, omega: f64) -> Result<f64> {
    if n < 2 {
        return domain(format!("asymptotic risk requires n >= 2, got {n}"));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return domain(format!("asymptotic risk requires omega > 0, got {omega}"));
    }
    let (a, b) = (loss.a(), loss.b());
    let nf = n as f64;
    let n1 = nf - 1.0;
    let g_nm1 = reg_lower_gamma(n1, omega)?;
    let g_n = reg_lower_gamma(nf, omega)?;
    Ok(match loss.family() {
        LossFamily::LinearLinear => {
            (a + b) * omega * g_nm1 / n1 - (a + b) * g_n + a * (1.0 - omega / n1)
        }
        LossFamily::InverseLinear => {
            // a n gamma(n+1)/omega and a n/omega combined through the upper tail
            let q_np1 = reg_upper_gamma(nf + 1.0, omega)?;
            b * omega * g_nm1 / n1 + (a - b) * g_n + a * nf * q_np1 / omega - a
        }
    })
}

/// Closed-form asymptotic risk of `spec` under `loss`.
pub fn asymptotic_risk_closed(loss: &LossSpec, spec: &EstimatorSpec) -> Result<RiskReport> {
    Ok(RiskReport {
        value: asymptotic_risk_at(loss, spec.n(), spec.omega())?,
        method: RiskMethod::ClosedForm,
        error_bound: 0.0,
        m0: None,
    })
}

/// Guaranteed risk `R_bar(n)` of the proposed estimator: the asymptotic
/// risk of UMVU for linear-linear loss, of `omega_il / (N + d)` for
/// inverse-linear loss. Evaluated in specialized form so it stays accurate
/// for very large `n`.
pub fn guaranteed_risk(loss: &LossSpec, n: u64) -> Result<f64> {
    if n < 2 {
        return domain(format!("guaranteed risk requires n >= 2, got {n}"));
    }
    let (a, b) = (loss.a(), loss.b());
    let nf = n as f64;
    Ok(match loss.family() {
        LossFamily::LinearLinear => (a + b) * poisson_pmf(nf - 2.0, nf - 1.0),
        LossFamily::InverseLinear => {
            let w = omega_il(n, a, b)?;
            a * (nf / w - 1.0) + (a * nf / w + b) * poisson_pmf(nf - 1.0, w)
        }
    })
}

/// Asymptotic risk by adaptive quadrature of
/// `(1/(n-1)!) int_0^inf v^{n-1} e^{-v} L(omega/v) dv`.
pub fn asymptotic_risk_quadrature(loss: &LossSpec, omega: f64, n: u64) -> Result<RiskReport> {
    if n < 2 {
        return domain(format!("asymptotic risk requires n >= 2, got {n}"));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return domain(format!("asymptotic risk requires omega > 0, got {omega}"));
    }
    let nf = n as f64;
    let a = loss.a();
    let tail_bound = |u: f64| -> Result<f64> {
        Ok(match loss.family() {
            LossFamily::LinearLinear => a * reg_upper_gamma(nf, u)?,
            LossFamily::InverseLinear => a * nf / omega * reg_upper_gamma(nf + 1.0, u)?,
        })
    };
    let mut upper = omega.max(nf) + 10.0;
    let step = nf.sqrt() + 5.0;
    while tail_bound(upper)? > 1e-14 {
        upper += step;
    }
    let integrand = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        poisson_pmf(nf - 1.0, v) * loss.eval_unchecked(omega / v)
    };
    let mut breaks = vec![0.0, omega];
    if nf - 1.0 > omega {
        breaks.push(nf - 1.0);
    }
    breaks.push(upper);
    let quad = integrate_pieces(integrand, &breaks, 1e-12, 4000)?;
    let tail = tail_bound(upper)?;
    Ok(RiskReport {
        value: quad.value,
        method: RiskMethod::Quadrature,
        error_bound: quad.error + tail,
        m0: None,
    })
}
