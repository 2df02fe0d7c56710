//! Seeded simulation of inverse binomial sampling.
//!
//! Replications are grouped into chunks; chunk `i` draws from the ChaCha8
//! stream `i` of the seed, and chunk statistics are merged in index order.
//! Results are therefore identical for a given `(seed, trials, chunk)`
//! whatever the execution strategy or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::estimators::EstimatorSpec;
use crate::loss::LossSpec;
use crate::par::{map_ordered, Execution};

/// Bernoulli draws allowed in a single replication.
pub const MAX_DRAWS: u64 = 1_000_000_000;
pub const DEFAULT_CHUNK: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    /// Replications per random stream.
    pub chunk: u64,
}

impl McConfig {
    pub fn new(p: f64, trials: u64, seed: u64) -> Result<Self> {
        Self::with_chunk(p, trials, seed, DEFAULT_CHUNK)
    }

    pub fn with_chunk(p: f64, trials: u64, seed: u64, chunk: u64) -> Result<Self> {
        let cfg = McConfig {
            p,
            trials,
            seed,
            chunk,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return domain(format!("p must lie in (0, 1), got {}", self.p));
        }
        if self.trials == 0 {
            return domain("trials must be at least 1");
        }
        if self.chunk == 0 {
            return domain("chunk must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub mean_loss: f64,
    /// Standard error of `mean_loss`; 0 when only one replication ran.
    pub std_error: f64,
    pub mean_stopping_time: f64,
    pub trials: u64,
    /// Set when the sample is too small to estimate a standard error.
    pub degenerate: bool,
}

/// Single-pass mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Welford) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / total as f64;
        self.mean += delta * w;
        self.m2 += other.m2 + delta * delta * self.count as f64 * w;
        self.count = total;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance, or `None` below two observations.
    pub fn variance(&self) -> Option<f64> {
        (self.count >= 2).then(|| self.m2 / (self.count - 1) as f64)
    }
}

/// Draws Bernoulli(`p`) trials until the `n`-th success and returns the
/// number of trials taken.
pub fn simulate_ibs<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> Result<u64> {
    if n == 0 {
        return domain("success count must be at least 1");
    }
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("p must lie in (0, 1), got {p}"));
    }
    let mut successes = 0;
    let mut draws = 0;
    while successes < n {
        if draws == MAX_DRAWS {
            return Err(Error::NonConvergence(format!(
                "{MAX_DRAWS} draws without reaching {n} successes at p={p}"
            )));
        }
        draws += 1;
        if rng.random::<f64>() < p {
            successes += 1;
        }
    }
    Ok(draws)
}

/// The RNG for chunk `index` of `seed`.
pub fn chunk_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Default, Clone, Copy)]
struct ChunkStats {
    loss: Welford,
    stopping: Welford,
}

fn run_chunk(
    loss: &LossSpec,
    spec: &EstimatorSpec,
    cfg: &McConfig,
    index: u64,
) -> Result<ChunkStats> {
    let start = index * cfg.chunk;
    let size = cfg.chunk.min(cfg.trials - start);
    let mut rng = chunk_rng(cfg.seed, index);
    let mut stats = ChunkStats::default();
    for _ in 0..size {
        let n = simulate_ibs(spec.n(), cfg.p, &mut rng)?;
        let x = spec.estimate_unchecked(n) / cfg.p;
        stats.loss.push(loss.eval_unchecked(x));
        stats.stopping.push(n as f64);
    }
    Ok(stats)
}

/// Monte Carlo estimate of the risk of `spec` under `loss` at `cfg.p`.
pub fn empirical_risk(loss: &LossSpec, spec: &EstimatorSpec, cfg: &McConfig) -> Result<McResult> {
    empirical_risk_with(loss, spec, cfg, Execution::default())
}

pub fn empirical_risk_with(
    loss: &LossSpec,
    spec: &EstimatorSpec,
    cfg: &McConfig,
    exec: Execution,
) -> Result<McResult> {
    cfg.validate()?;
    let chunks: Vec<u64> = (0..cfg.trials.div_ceil(cfg.chunk)).collect();
    let parts = map_ordered(exec, &chunks, |&i| run_chunk(loss, spec, cfg, i));
    let mut total = ChunkStats::default();
    for part in parts {
        let part = part?;
        total.loss.merge(&part.loss);
        total.stopping.merge(&part.stopping);
    }
    let k = total.loss.count();
    let (std_error, degenerate) = match total.loss.variance() {
        Some(v) => ((v / k as f64).sqrt(), false),
        None => (0.0, true),
    };
    Ok(McResult {
        mean_loss: total.loss.mean(),
        std_error,
        mean_stopping_time: total.stopping.mean(),
        trials: k,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::umvu;

    #[test]
    fn welford_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut whole = Welford::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut left = Welford::default();
        let mut right = Welford::default();
        xs[..313].iter().for_each(|&x| left.push(x));
        xs[313..].iter().for_each(|&x| right.push(x));
        left.merge(&right);
        assert_eq!(left.count(), whole.count());
        assert!((left.mean() - whole.mean()).abs() < 1e-12);
        assert!((left.variance().unwrap() - whole.variance().unwrap()).abs() < 1e-10);
    }

    #[test]
    fn near_certain_success() {
        let mut rng = chunk_rng(1, 0);
        let hits = (0..1000)
            .filter(|_| simulate_ibs(3, 0.999_999, &mut rng).unwrap() == 3)
            .count();
        assert!(hits >= 999);
    }

    #[test]
    fn single_trial_is_degenerate() {
        let loss = LossSpec::linear_linear(1.0, 1.0).unwrap();
        let cfg = McConfig::new(0.5, 1, 9).unwrap();
        let r = empirical_risk(&loss, &umvu(2).unwrap(), &cfg).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.std_error, 0.0);
        assert_eq!(r.trials, 1);
    }

    #[test]
    fn strategy_does_not_change_result() {
        let loss = LossSpec::inverse_linear(2.0, 1.0).unwrap();
        let cfg = McConfig::with_chunk(0.2, 5003, 77, 64).unwrap();
        let spec = umvu(4).unwrap();
        let a = empirical_risk_with(&loss, &spec, &cfg, Execution::Sequential).unwrap();
        let b = empirical_risk_with(&loss, &spec, &cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials, 5003);
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(0.0, 10, 1).is_err());
        assert!(McConfig::new(0.5, 0, 1).is_err());
        assert!(McConfig::with_chunk(0.5, 10, 1, 0).is_err());
    }
}
