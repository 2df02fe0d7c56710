//! Grid sweeps of risk quantities, written as CSV.

use std::io::Write;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::estimators::{proposed, EstimatorSelector};
use crate::format::fmt_g12;
use crate::loss::LossSpec;
use crate::minimax::degradation;
use crate::par::{map_ordered, Execution};
use crate::risk::{exact_risk, guaranteed_risk};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    GuaranteedRisk,
    ExactRisk,
    Degradation,
}

impl Quantity {
    fn column(self) -> &'static str {
        match self {
            Quantity::GuaranteedRisk => "risk_bar",
            Quantity::ExactRisk => "risk",
            Quantity::Degradation => "degradation",
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "guaranteed-risk" | "risk-bar" => Ok(Quantity::GuaranteedRisk),
            "exact-risk" | "risk" => Ok(Quantity::ExactRisk),
            "degradation" => Ok(Quantity::Degradation),
            _ => domain(format!(
                "unknown quantity '{s}', expected guaranteed-risk, exact-risk or degradation"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    OverN,
    OverP,
    /// Sweeps `a/b`, holding each loss's `b` fixed.
    OverRatio,
}

impl Sweep {
    fn column(self) -> &'static str {
        match self {
            Sweep::OverN => "n",
            Sweep::OverP => "p",
            Sweep::OverRatio => "ratio",
        }
    }
}

impl FromStr for Sweep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(Sweep::OverN),
            "p" => Ok(Sweep::OverP),
            "ratio" => Ok(Sweep::OverRatio),
            _ => domain(format!("unknown sweep '{s}', expected n, p or ratio")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" | "lin" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            _ => domain(format!("unknown scale '{s}', expected linear or log")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRequest {
    pub quantity: Quantity,
    pub sweep: Sweep,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
    /// One value column per loss.
    pub losses: Vec<LossSpec>,
    pub n: Option<u64>,
    pub p: Option<f64>,
    /// Estimator for exact risk; `None` uses the proposed estimator of each loss.
    pub estimator: Option<EstimatorSelector>,
}

/// Header plus rows of numbers; the first column is the sweep variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CurveRequest {
    pub fn validate(&self) -> Result<()> {
        if !(self.start < self.stop) || !self.start.is_finite() || !self.stop.is_finite() {
            return domain(format!(
                "sweep needs start < stop, got {} and {}",
                self.start, self.stop
            ));
        }
        if self.points < 2 {
            return domain(format!(
                "sweep needs at least 2 points, got {}",
                self.points
            ));
        }
        if self.scale == Scale::Log && self.start <= 0.0 {
            return domain("log scale needs positive endpoints");
        }
        if self.losses.is_empty() {
            return domain("curve needs at least one loss");
        }
        match (self.quantity, self.sweep) {
            (Quantity::GuaranteedRisk | Quantity::Degradation, Sweep::OverP) => {
                return domain("guaranteed risk and degradation do not depend on p");
            }
            (Quantity::ExactRisk, Sweep::OverP) | (Quantity::ExactRisk, Sweep::OverRatio)
                if self.n.is_none() =>
            {
                return domain("exact risk over p or ratio needs a fixed n");
            }
            (Quantity::ExactRisk, Sweep::OverN | Sweep::OverRatio) if self.p.is_none() => {
                return domain("exact risk over n or ratio needs a fixed p");
            }
            (Quantity::GuaranteedRisk | Quantity::Degradation, Sweep::OverRatio)
                if self.n.is_none() =>
            {
                return domain("sweep over ratio needs a fixed n");
            }
            _ => {}
        }
        if self.sweep == Sweep::OverN && self.start < 2.0 {
            return domain("sweep over n must start at n >= 2");
        }
        Ok(())
    }

    /// Sweep values; over `n` they are rounded to integers and deduplicated.
    pub fn grid(&self) -> Vec<f64> {
        let k = self.points;
        let mut xs: Vec<f64> = (0..k)
            .map(|i| {
                if i == k - 1 {
                    return self.stop;
                }
                let t = i as f64 / (k - 1) as f64;
                match self.scale {
                    Scale::Linear => self.start + t * (self.stop - self.start),
                    Scale::Log => (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect();
        if self.sweep == Sweep::OverN {
            xs.iter_mut().for_each(|x| *x = x.round());
            xs.dedup();
        }
        xs
    }

    fn header(&self) -> Vec<String> {
        let base = self.quantity.column();
        let mut header = vec![self.sweep.column().to_string()];
        if self.losses.len() == 1 {
            header.push(base.to_string());
            return header;
        }
        let tags: Vec<&str> = self.losses.iter().map(|l| l.family().tag()).collect();
        let unique = (1..tags.len()).all(|i| !tags[..i].contains(&tags[i]));
        for (i, tag) in tags.iter().enumerate() {
            if unique {
                header.push(format!("{base}_{tag}"));
            } else {
                header.push(format!("{base}_{}", i + 1));
            }
        }
        header
    }

    fn value(&self, loss: &LossSpec, x: f64) -> Result<f64> {
        let (loss, n, p) = match self.sweep {
            Sweep::OverN => (*loss, x as u64, self.p),
            Sweep::OverP => (*loss, self.n.unwrap_or(0), Some(x)),
            Sweep::OverRatio => {
                let l = LossSpec::new(loss.family(), x * loss.b(), loss.b())?;
                (l, self.n.unwrap_or(0), self.p)
            }
        };
        match self.quantity {
            Quantity::GuaranteedRisk => guaranteed_risk(&loss, n),
            Quantity::Degradation => Ok(degradation(&loss, n)?.degradation),
            Quantity::ExactRisk => {
                let spec = match self.estimator {
                    Some(sel) => sel.build(n, &loss)?,
                    None => proposed(&loss, n)?,
                };
                Ok(exact_risk(&loss, &spec, p.unwrap_or(f64::NAN))?.value)
            }
        }
    }

    pub fn evaluate(&self) -> Result<Table> {
        self.evaluate_with(Execution::default())
    }

    pub fn evaluate_with(&self, exec: Execution) -> Result<Table> {
        self.validate()?;
        let grid = self.grid();
        let rows = map_ordered(exec, &grid, |&x| -> Result<Vec<f64>> {
            let mut row = Vec::with_capacity(self.losses.len() + 1);
            row.push(x);
            for loss in &self.losses {
                row.push(self.value(loss, x)?);
            }
            Ok(row)
        });
        Ok(Table {
            header: self.header(),
            rows: rows.into_iter().collect::<Result<_>>()?,
        })
    }
}

impl Table {
    /// Comma-separated, `\n`-terminated, 12 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| fmt_g12(v)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }
}
