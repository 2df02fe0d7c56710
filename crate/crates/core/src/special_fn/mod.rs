//! Special functions and distribution primitives.
//!
//! Everything here is a pure function of its arguments.

mod dist;
mod gamma;
mod sum;

pub use dist::{
    binom_pmf, log_binom_pmf, log_negbin_pmf, negbin_cdf, negbin_pmf, negbin_sf,
    negbin_tail_cutoff, y_rho, LogProb, LOG_UNDERFLOW,
};
pub use gamma::{log_gamma, reg_lower_gamma, reg_upper_gamma};
pub use sum::NeumaierSum;

pub(crate) use dist::ln_negbin_unchecked;
pub(crate) use gamma::poisson_pmf;
