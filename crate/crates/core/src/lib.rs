//! Probability estimation under inverse binomial sampling with asymmetric
//! normalized loss.
//!
//! Bernoulli trials with unknown success probability `p` are observed until
//! the `n`-th success; the stopping time `N` is negative binomial. Estimators
//! take the form `p_hat = omega / (N + d)` and are judged by the expected
//! value of a loss `L(p_hat / p)` that is linear in the overestimation branch
//! and either linear or inverse-linear in the underestimation branch.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod curve;
pub mod error;
pub mod estimators;
pub mod format;
pub mod loss;
pub mod minimax;
pub mod montecarlo;
pub mod par;
pub mod planner;
pub mod quadrature;
pub mod risk;
mod roots;
pub mod special_fn;

pub use error::{Error, Result};
pub use estimators::{
    estimate, ml, omega_il, omega_il_residual, proposed, proposed_il, umvu, EstimatorSelector,
    EstimatorSpec,
};
pub use format::fmt_g12;
pub use loss::{loss_eval, LossFamily, LossSpec};
pub use minimax::{
    degradation, minimax_ratio_il, minimax_ratio_ll, omega_star, omega_star_il, omega_star_ll,
    MinimaxReport,
};
pub use montecarlo::{empirical_risk, simulate_ibs, McConfig, McResult};
pub use par::Execution;
pub use planner::{plan, PlanResult};
pub use risk::{
    asymptotic_risk_at, asymptotic_risk_closed, asymptotic_risk_quadrature, exact_risk,
    exact_risk_series, guaranteed_risk, RiskMethod, RiskReport,
};
