//! Scaling sequences, centering constants and every rate function of the
//! moderate and large deviation limits.
//!
//! Rate functions return `f64::INFINITY` outside their effective domain.

mod homozygosity;
mod rates;
mod scaling;

pub use homozygosity::{
    contracted_rate, lambda_pair, lambda_pair_gradient, lambda_star, line_minimum, sigma2, LineMinimum,
};
pub use rates::{rate_i, rate_j1, rate_s, rate_s1, rate_sn, small_scales, SIMPLEX_TOL};
pub use scaling::{beta_shift, gamma_diagnostic, validate_scaling, ScalingKind, ScalingPlan, Validation};
