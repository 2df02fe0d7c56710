//! Estimators of the form `p_hat = omega / (N + d)`, where `N` is the trial
//! on which the `n`-th success is observed.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::format::fmt_g12;
use crate::loss::{LossFamily, LossSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorSpec {
    n: u64,
    omega: f64,
    d: f64,
}

impl EstimatorSpec {
    /// Requires `n >= 2`, `omega > 0` and `d > -n`, so the estimate is finite
    /// and positive for every reachable stopping time.
    pub fn new(n: u64, omega: f64, d: f64) -> Result<Self> {
        if n < 2 {
            return domain(format!("estimator requires n >= 2, got {n}"));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return domain(format!("estimator requires omega > 0, got {omega}"));
        }
        if !(d > -(n as f64)) || !d.is_finite() {
            return domain(format!("estimator requires d > -n = -{n}, got {d}"));
        }
        Ok(EstimatorSpec { n, omega, d })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Estimate for an observed stopping time `N >= n`.
    pub fn estimate(&self, stopping_time: u64) -> Result<f64> {
        if stopping_time < self.n {
            return domain(format!(
                "stopping time {stopping_time} is below the success count {}",
                self.n
            ));
        }
        Ok(self.estimate_unchecked(stopping_time))
    }

    #[inline]
    pub(crate) fn estimate_unchecked(&self, stopping_time: u64) -> f64 {
        self.omega / (stopping_time as f64 + self.d)
    }
}

/// Free-function form of [`EstimatorSpec::estimate`].
pub fn estimate(spec: &EstimatorSpec, stopping_time: u64) -> Result<f64> {
    spec.estimate(stopping_time)
}

/// Uniformly minimum variance unbiased estimator `(n-1)/(N-1)`.
pub fn umvu(n: u64) -> Result<EstimatorSpec> {
    if n < 2 {
        return domain(format!("UMVU estimator requires n >= 2, got {n}"));
    }
    EstimatorSpec::new(n, (n - 1) as f64, -1.0)
}

/// Maximum likelihood estimator `n/N`.
pub fn ml(n: u64) -> Result<EstimatorSpec> {
    if n < 2 {
        return domain(format!("ML estimator requires n >= 2, got {n}"));
    }
    EstimatorSpec::new(n, n as f64, 0.0)
}

/// The positive root of `a n / omega - b omega / (n-1) = a - b`.
pub fn omega_il(n: u64, a: f64, b: f64) -> Result<f64> {
    if n < 2 {
        return domain(format!("omega_il requires n >= 2, got {n}"));
    }
    if !(a >= 0.0 && b >= 0.0) || !a.is_finite() || !b.is_finite() {
        return domain(format!(
            "omega_il requires finite a, b >= 0, got a={a}, b={b}"
        ));
    }
    let n1 = (n - 1) as f64;
    if a == 0.0 && b == 0.0 {
        return domain("omega_il requires (a, b) != (0, 0)");
    }
    if a == 0.0 {
        return Ok(n1);
    }
    if b == 0.0 {
        return Ok(n as f64);
    }
    // (n-1)(1 + (a+b)/(2b) (sqrt(1+e) - 1)) with sqrt(1+e) - 1 rationalized
    let s = a + b;
    let e = 4.0 * a * b / (n1 * s * s);
    Ok(n1 + 2.0 * a / (s * (1.0 + (1.0 + e).sqrt())))
}

/// Residual of the defining condition for `omega_il`.
pub fn omega_il_residual(n: u64, a: f64, b: f64, omega: f64) -> f64 {
    a * n as f64 / omega - b * omega / (n - 1) as f64 - (a - b)
}

/// Inverse-linear estimator `omega_il / (N + d)`. `d` defaults to
/// `omega_il - n`, which keeps the estimate between UMVU and ML.
pub fn proposed_il(n: u64, loss: &LossSpec, d_choice: Option<f64>) -> Result<EstimatorSpec> {
    if loss.family() != LossFamily::InverseLinear {
        return domain("proposed_il requires an inverse-linear loss");
    }
    let omega = omega_il(n, loss.a(), loss.b())?;
    let lo = omega - n as f64;
    let d = match d_choice {
        None => lo,
        Some(d) if d >= lo && d <= 0.0 => d,
        Some(d) => return domain(format!("d must lie in [{lo}, 0], got {d}")),
    };
    EstimatorSpec::new(n, omega, d)
}

/// The estimator with a guaranteed-risk property for `loss`: UMVU for
/// linear-linear loss, `proposed_il` with the default `d` for inverse-linear.
pub fn proposed(loss: &LossSpec, n: u64) -> Result<EstimatorSpec> {
    match loss.family() {
        LossFamily::LinearLinear => umvu(n),
        LossFamily::InverseLinear => proposed_il(n, loss, None),
    }
}

/// Textual estimator choice: `umvu`, `ml`, `il-default` or
/// `custom:omega=<v>,d=<v>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorSelector {
    Umvu,
    Ml,
    IlDefault { d: Option<f64> },
    Custom { omega: f64, d: f64 },
}

impl EstimatorSelector {
    pub fn with_d(self, d: Option<f64>) -> Self {
        match (self, d) {
            (EstimatorSelector::IlDefault { .. }, Some(_)) => EstimatorSelector::IlDefault { d },
            (s, _) => s,
        }
    }

    pub fn build(&self, n: u64, loss: &LossSpec) -> Result<EstimatorSpec> {
        match *self {
            EstimatorSelector::Umvu => umvu(n),
            EstimatorSelector::Ml => ml(n),
            EstimatorSelector::IlDefault { d } => proposed_il(n, loss, d),
            EstimatorSelector::Custom { omega, d } => EstimatorSpec::new(n, omega, d),
        }
    }
}

impl FromStr for EstimatorSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "umvu" => return Ok(EstimatorSelector::Umvu),
            "ml" => return Ok(EstimatorSelector::Ml),
            "il-default" => return Ok(EstimatorSelector::IlDefault { d: None }),
            _ => {}
        }
        let params = s.trim().strip_prefix("custom:").ok_or_else(|| {
            Error::Domain(format!(
                "unknown estimator '{s}', expected umvu, ml, il-default or custom:omega=<v>,d=<v>"
            ))
        })?;
        let (mut omega, mut d) = (None, None);
        for kv in params.split(',') {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::Domain(format!("malformed estimator parameter '{kv}'")))?;
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::Domain(format!("estimator parameter '{kv}' is not a number"))
            })?;
            match key.trim() {
                "omega" => omega = Some(value),
                "d" => d = Some(value),
                other => return domain(format!("unknown estimator parameter '{other}'")),
            }
        }
        match (omega, d) {
            (Some(omega), Some(d)) => Ok(EstimatorSelector::Custom { omega, d }),
            _ => domain(format!("custom estimator '{s}' must set omega and d")),
        }
    }
}

impl fmt::Display for EstimatorSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorSelector::Umvu => f.write_str("umvu"),
            EstimatorSelector::Ml => f.write_str("ml"),
            EstimatorSelector::IlDefault { .. } => f.write_str("il-default"),
            EstimatorSelector::Custom { omega, d } => {
                write!(f, "custom:omega={},d={}", fmt_g12(*omega), fmt_g12(*d))
            }
        }
    }
}
