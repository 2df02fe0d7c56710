//! Normalized asymmetric loss functions of the ratio `x = p_hat / p`.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::format::fmt_g12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossFamily {
    /// `a(1 - x)` below 1, `b(x - 1)` above.
    LinearLinear,
    /// `a(1/x - 1)` below 1, `b(x - 1)` above.
    InverseLinear,
}

impl LossFamily {
    pub fn tag(self) -> &'static str {
        match self {
            LossFamily::LinearLinear => "ll",
            LossFamily::InverseLinear => "il",
        }
    }
}

impl FromStr for LossFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ll" => Ok(LossFamily::LinearLinear),
            "il" => Ok(LossFamily::InverseLinear),
            other => domain(format!(
                "unknown loss family '{other}', expected 'll' or 'il'"
            )),
        }
    }
}

/// A loss family together with its underestimation slope `a` and
/// overestimation slope `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSpec {
    family: LossFamily,
    a: f64,
    b: f64,
}

impl LossSpec {
    pub fn new(family: LossFamily, a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite() && b >= 0.0 && b.is_finite()) {
            return domain(format!(
                "loss slopes must be finite and >= 0, got a={a}, b={b}"
            ));
        }
        if a == 0.0 && b == 0.0 {
            return domain("loss slopes a and b cannot both be zero");
        }
        Ok(LossSpec { family, a, b })
    }

    pub fn linear_linear(a: f64, b: f64) -> Result<Self> {
        Self::new(LossFamily::LinearLinear, a, b)
    }

    pub fn inverse_linear(a: f64, b: f64) -> Result<Self> {
        Self::new(LossFamily::InverseLinear, a, b)
    }

    pub fn family(&self) -> LossFamily {
        self.family
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Same family with both slopes multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return domain(format!("scale factor must be positive, got {factor}"));
        }
        Self::new(self.family, self.a * factor, self.b * factor)
    }

    /// Loss at the normalized estimate `x > 0`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return domain(format!("loss argument must be a finite x > 0, got {x}"));
        }
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        if x <= 1.0 {
            match self.family {
                LossFamily::LinearLinear => self.a * (1.0 - x),
                LossFamily::InverseLinear => self.a * (1.0 / x - 1.0),
            }
        } else {
            self.b * (x - 1.0)
        }
    }
}

/// Free-function form of [`LossSpec::eval`].
pub fn loss_eval(loss: &LossSpec, x: f64) -> Result<f64> {
    loss.eval(x)
}

impl fmt::Display for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:a={},b={}",
            self.family.tag(),
            fmt_g12(self.a),
            fmt_g12(self.b)
        )
    }
}

/// Parses `ll:a=<v>,b=<v>` or `il:a=<v>,b=<v>`.
impl FromStr for LossSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, params) = s
            .split_once(':')
            .ok_or_else(|| Error::Domain(format!("loss '{s}' must look like ll:a=<v>,b=<v>")))?;
        let family: LossFamily = family.parse()?;
        let (mut a, mut b) = (None, None);
        for kv in params.split(',') {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::Domain(format!("malformed loss parameter '{kv}'")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("loss parameter '{kv}' is not a number")))?;
            match key.trim() {
                "a" => a = Some(value),
                "b" => b = Some(value),
                other => return domain(format!("unknown loss parameter '{other}'")),
            }
        }
        match (a, b) {
            (Some(a), Some(b)) => LossSpec::new(family, a, b),
            _ => domain(format!("loss '{s}' must set both a and b")),
        }
    }
}
