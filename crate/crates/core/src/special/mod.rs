//! Numerical kernel: log-gamma, the exponential-tail integral behind the
//! largest-jump CDF, random variates, and reproducible random streams.

mod gamma;
mod quadrature;
mod rng;

pub use gamma::{gamma_cdf, ln_gamma, log_gamma, lower_incomplete_gamma};
pub use quadrature::{integrate, tail_integral, QuadratureSpec, TailIntegral};
pub use rng::{
    beta_pair, draw, exp_variate, gamma_variate, ln_gamma_variate, substream, uniform_open, Dist, RngStream, StreamRng,
};
