//! Binomial and negative binomial probabilities in log space.
//!
//! Point probabilities use Loader's saddle-point decomposition (Stirling
//! remainders plus deviance terms), which keeps full relative precision for
//! large trial counts where differences of log-factorials would cancel.

use super::gamma::{bd0, stirlerr, LN_2PI};
use super::sum::NeumaierSum;
use crate::error::{domain, Result};

/// Natural logarithm of a probability. `-inf` encodes probability zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogProb(f64);

/// Log-probabilities below this are reported as probability zero.
pub const LOG_UNDERFLOW: f64 = -745.0;

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value <= 0.0 || value == f64::NEG_INFINITY {
            Ok(LogProb(value))
        } else {
            domain(format!("log-probability must be <= 0, got {value}"))
        }
    }

    /// Clamps tiny positive rounding excursions to zero.
    pub(crate) fn saturating(value: f64) -> Self {
        if value.is_nan() {
            LogProb::ZERO
        } else {
            LogProb(value.min(0.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn prob(self) -> f64 {
        if self.0 < LOG_UNDERFLOW {
            0.0
        } else {
            self.0.exp()
        }
    }
}

fn check_open_prob(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        domain(format!("probability must lie in (0, 1), got {p}"))
    }
}

/// Saddle-point log binomial pmf; `x <= n`, `0 < p < 1`.
fn ln_dbinom_raw(x: f64, n: f64, p: f64, q: f64) -> f64 {
    if x == 0.0 {
        if n == 0.0 {
            return 0.0;
        }
        return if p < 0.1 {
            -bd0(n, n * q) - n * p
        } else {
            n * q.ln()
        };
    }
    if x == n {
        return if q < 0.1 {
            -bd0(n, n * p) - n * q
        } else {
            n * p.ln()
        };
    }
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
    let lf = LN_2PI + x.ln() + (-x / n).ln_1p();
    lc - 0.5 * lf
}

#[inline]
fn binom_term(m: u64, p: f64, i: u64) -> f64 {
    let v = ln_dbinom_raw(i as f64, m as f64, p, 1.0 - p);
    if v < LOG_UNDERFLOW {
        0.0
    } else {
        v.exp()
    }
}

/// `ln b_{m,p}(i)` for `0 <= i <= m`.
pub fn log_binom_pmf(m: u64, p: f64, i: u64) -> Result<LogProb> {
    check_open_prob(p)?;
    if i > m {
        return domain(format!("binomial index {i} outside 0..={m}"));
    }
    Ok(LogProb::saturating(ln_dbinom_raw(
        i as f64,
        m as f64,
        p,
        1.0 - p,
    )))
}

/// Binomial probability `C(m, i) p^i (1-p)^(m-i)`.
pub fn binom_pmf(m: u64, p: f64, i: u64) -> Result<f64> {
    log_binom_pmf(m, p, i).map(LogProb::prob)
}

fn check_negbin(n: u64, p: f64) -> Result<()> {
    if n == 0 {
        return domain("negative binomial requires n >= 1");
    }
    check_open_prob(p)
}

/// `ln f_n(m)`, where `f_n(m)` is the probability that the `n`-th success
/// arrives on trial `m`.
pub fn log_negbin_pmf(n: u64, p: f64, m: u64) -> Result<LogProb> {
    check_negbin(n, p)?;
    Ok(ln_negbin_unchecked(n, p, m))
}

pub(crate) fn ln_negbin_unchecked(n: u64, p: f64, m: u64) -> LogProb {
    if m < n {
        return LogProb::ZERO;
    }
    // f_n(m) = (n/m) b_{m,p}(n)
    let v = (n as f64 / m as f64).ln() + ln_dbinom_raw(n as f64, m as f64, p, 1.0 - p);
    LogProb::saturating(v)
}

/// Negative binomial pmf `f_n(m) = C(m-1, n-1) p^n (1-p)^(m-n)`; zero for `m < n`.
pub fn negbin_pmf(n: u64, p: f64, m: u64) -> Result<f64> {
    log_negbin_pmf(n, p, m).map(LogProb::prob)
}

const ANCHOR_EVERY: u32 = 128;
const TAIL_REL: f64 = 1e-17;

/// Sum of `b_{m,p}(i)` for `i` in `0..=from`, where `from` is at or below the
/// mode so the terms shrink as `i` decreases.
fn sum_down(m: u64, p: f64, from: u64) -> f64 {
    let q = 1.0 - p;
    let mut acc = NeumaierSum::default();
    let mut i = from;
    let mut term = binom_term(m, p, i);
    let mut since_anchor = 0;
    loop {
        acc.add(term);
        if i == 0 {
            break;
        }
        let ratio = i as f64 * q / ((m - i + 1) as f64 * p);
        let sum = acc.value();
        if term == 0.0 && sum == 0.0 {
            break;
        }
        if ratio < 1.0 && term * ratio / (1.0 - ratio) <= TAIL_REL * sum {
            break;
        }
        i -= 1;
        since_anchor += 1;
        if since_anchor == ANCHOR_EVERY {
            term = binom_term(m, p, i);
            since_anchor = 0;
        } else {
            term *= ratio;
        }
    }
    acc.value()
}

/// Sum of `b_{m,p}(i)` for `i` in `from..=m`, where `from` is at or above
/// the mode.
fn sum_up(m: u64, p: f64, from: u64) -> f64 {
    let q = 1.0 - p;
    let mut acc = NeumaierSum::default();
    let mut i = from;
    let mut term = binom_term(m, p, i);
    let mut since_anchor = 0;
    loop {
        acc.add(term);
        if i == m {
            break;
        }
        let ratio = (m - i) as f64 * p / ((i + 1) as f64 * q);
        let sum = acc.value();
        if term == 0.0 && sum == 0.0 {
            break;
        }
        if ratio < 1.0 && term * ratio / (1.0 - ratio) <= TAIL_REL * sum {
            break;
        }
        i += 1;
        since_anchor += 1;
        if since_anchor == ANCHOR_EVERY {
            term = binom_term(m, p, i);
            since_anchor = 0;
        } else {
            term *= ratio;
        }
    }
    acc.value()
}

fn binom_mode(m: u64, p: f64) -> u64 {
    (((m + 1) as f64) * p).floor().min(m as f64) as u64
}

/// `Pr[X <= k]` for `X ~ Binomial(m, p)`.
pub(crate) fn binom_lower_tail(m: u64, p: f64, k: u64) -> f64 {
    if k >= m {
        return 1.0;
    }
    if k < binom_mode(m, p) {
        sum_down(m, p, k).min(1.0)
    } else {
        (1.0 - sum_up(m, p, k + 1)).max(0.0)
    }
}

/// `Pr[X >= k]` for `X ~ Binomial(m, p)`.
pub(crate) fn binom_upper_tail(m: u64, p: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > m {
        return 0.0;
    }
    if k > binom_mode(m, p) {
        sum_up(m, p, k).min(1.0)
    } else {
        (1.0 - sum_down(m, p, k - 1)).max(0.0)
    }
}

/// Negative binomial distribution function `F_n(m) = sum_{k=n}^{m} f_n(k)`.
///
/// Evaluated through `F_n(m) = Pr[Binomial(m, p) >= n]`, summing whichever
/// binomial tail lies away from the mode.
pub fn negbin_cdf(n: u64, p: f64, m: u64) -> Result<f64> {
    check_negbin(n, p)?;
    Ok(binom_upper_tail(m, p, n))
}

/// Survival function `1 - F_n(m)`, computed without cancellation.
pub fn negbin_sf(n: u64, p: f64, m: u64) -> Result<f64> {
    check_negbin(n, p)?;
    Ok(binom_lower_tail(m, p, n - 1))
}

/// Smallest `M >= n` whose tail mass `1 - F_n(M)` is at most `tol`.
pub fn negbin_tail_cutoff(n: u64, p: f64, tol: f64) -> Result<u64> {
    check_negbin(n, p)?;
    if !(tol > 0.0) {
        return domain(format!("tail tolerance must be positive, got {tol}"));
    }
    let sf = |m: u64| binom_lower_tail(m, p, n - 1);
    let mut lo = n - 1;
    let mut hi = ((n as f64 / p).ceil() as u64).max(n);
    while sf(hi) > tol {
        lo = hi;
        hi = hi.saturating_mul(2);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if sf(mid) > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// `Y_rho(mu, t) = (mu-1)(mu-2)...(mu-rho+1) t^(rho-1) (1-t)^(mu-rho+1) / (rho-1)!`
/// with the falling factorial taken over a real `mu`.
pub fn y_rho(rho: u64, mu: f64, t: f64) -> Result<f64> {
    if rho < 2 {
        return domain(format!("y_rho requires rho >= 2, got {rho}"));
    }
    let r1 = (rho - 1) as f64;
    if !(mu >= r1) || !mu.is_finite() {
        return domain(format!("y_rho requires mu >= rho - 1 = {r1}, got {mu}"));
    }
    if !(t > 0.0 && t < 1.0) {
        return domain(format!("y_rho requires t in (0, 1), got {t}"));
    }
    // direct product of the rho-1 factors, each divided by its factorial index
    let mut prod = 1.0;
    for i in 1..rho {
        let i = i as f64;
        prod *= (mu - i) * t / i;
    }
    Ok(prod * ((mu - r1) * (-t).ln_1p()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn negbin_trivial_values() {
        assert_relative_eq!(negbin_pmf(1, 0.5, 3).unwrap(), 0.125, max_relative = 1e-15);
        assert_relative_eq!(negbin_pmf(2, 0.5, 2).unwrap(), 0.25, max_relative = 1e-15);
        assert_eq!(negbin_pmf(3, 0.5, 2).unwrap(), 0.0);
        assert_eq!(negbin_cdf(2, 0.5, 1).unwrap(), 0.0);
        assert_relative_eq!(negbin_cdf(1, 0.5, 3).unwrap(), 0.875, max_relative = 1e-15);
    }

    #[test]
    fn negbin_domain_errors() {
        assert!(negbin_pmf(2, 0.0, 3).is_err());
        assert!(negbin_pmf(2, 1.0, 3).is_err());
        assert!(negbin_pmf(0, 0.5, 3).is_err());
        assert!(negbin_cdf(2, 1.5, 3).is_err());
    }

    #[test]
    fn binom_trivial_values() {
        assert_relative_eq!(binom_pmf(2, 0.5, 1).unwrap(), 0.5, max_relative = 1e-15);
        assert_eq!(binom_pmf(0, 0.3, 0).unwrap(), 1.0);
        assert!(binom_pmf(3, 0.3, 4).is_err());
        assert!(binom_pmf(3, 0.0, 1).is_err());
    }

    #[test]
    fn tails_are_complementary() {
        for &(m, p) in &[(20u64, 0.3), (1000, 0.01), (50, 0.9), (1, 0.5)] {
            for k in 0..=m.min(60) {
                let lo = binom_lower_tail(m, p, k);
                let hi = if k < m {
                    binom_upper_tail(m, p, k + 1)
                } else {
                    0.0
                };
                assert!((lo + hi - 1.0).abs() < 1e-14, "m={m} p={p} k={k}");
            }
        }
    }

    #[test]
    fn tail_cutoff_is_minimal() {
        let m = negbin_tail_cutoff(5, 0.2, 1e-12).unwrap();
        assert!(negbin_sf(5, 0.2, m).unwrap() <= 1e-12);
        assert!(negbin_sf(5, 0.2, m - 1).unwrap() > 1e-12);
    }

    #[test]
    fn y_rho_examples() {
        assert_eq!(y_rho(2, 1.0, 0.5).unwrap(), 0.0);
        assert_relative_eq!(y_rho(2, 3.0, 0.5).unwrap(), 0.25, max_relative = 1e-15);
        assert!(y_rho(1, 3.0, 0.5).is_err());
        assert!(y_rho(3, 1.5, 0.5).is_err());
        assert!(y_rho(3, 5.0, 1.0).is_err());
    }

    #[test]
    fn log_prob_invariant() {
        assert!(LogProb::new(0.1).is_err());
        assert_eq!(LogProb::new(f64::NEG_INFINITY).unwrap().prob(), 0.0);
        assert_eq!(LogProb::new(-800.0).unwrap().prob(), 0.0);
        assert!(log_negbin_pmf(3, 0.2, 2).unwrap() == LogProb::ZERO);
    }
}
