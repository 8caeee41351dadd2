//! Two-parameter Poisson-Dirichlet distribution PD(α, θ).
//!
//! Three independent samplers (GEM stick-breaking, the tempered-stable /
//! Gamma subordinator representation, and importance sampling from the
//! stable subordinator), exact distributional formulas for the largest
//! jump, the marginal densities, every rate function of the moderate and
//! large deviation limits, and desk-scale experiments that check those
//! limits numerically.
//!
//! Every random quantity is a pure function of its inputs and an
//! [`RngStream`](special::RngStream), so any run can be replayed bit for
//! bit regardless of the number of worker threads.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod asymptotics;
pub mod error;
pub mod experiments;
pub mod parallel;
pub mod sampler;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use sampler::{Params, PdSample};
pub use special::{QuadratureSpec, RngStream};
