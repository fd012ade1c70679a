//! Norms, level sets, fitted exponents, weak-form residuals and estimate
//! checks on discrete radial solutions.

pub(crate) mod cells;
pub mod distribution;
pub mod estimates;
pub mod exponents;
pub mod norms;
pub mod residuals;

pub use distribution::{distribution_function, marcinkiewicz_quasinorm};
pub use estimates::{
    check_estimate, check_estimates, limit_bound, parse_ids, write_ledger_csv, EstimateCheck, EstimateId, EstimateInput,
    EstimateParams, LimitBound, Verdict,
};
pub use exponents::{
    fit_decay_slope, gradient_integrability_threshold, gradient_integrability_threshold_with,
    predicted_decay_slope, predicted_gradient_threshold, ExponentFit, ExponentStudy, ThresholdConfig,
    ThresholdEstimate,
};
pub use norms::{lebesgue_norm, standard_norms, w11_seminorm, weighted_gradient_energy};
pub use residuals::{
    default_bumps, distributional_residual, entropy_residual, solution_distributional_residual, Bump,
    ClosedFormProfile, RadialProfile,
};
