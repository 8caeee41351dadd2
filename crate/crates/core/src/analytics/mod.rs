//! Exact and semi-exact distributional quantities: homozygosity, the
//! closed-form law of the largest subordinator jump, and the marginal
//! density of the leading ranked weights.

mod density;
mod empirical;
mod homozygosity;
mod largest_jump;

pub use density::{joint_density, ln_joint_density};
pub use empirical::{cache_key, estimate_g, load_or_estimate_g, EmpiricalCdf};
pub use homozygosity::{expected_homozygosity, homozygosity, Homozygosity};
pub use largest_jump::{cdf_v1, log_sf_v1, v1_exponent, V1Exponent};
