//! Three independent constructions of PD(α, θ).
//!
//! * [`gem_sample`]: stick-breaking with `U_k ~ Beta(1-α, θ+kα)`.
//! * [`sample_pd_subordinator`]: ranked jumps of a tempered-stable
//!   subordinator run for a Gamma-distributed random time, normalized by
//!   their total.
//! * [`importance_ensemble`]: ranked jumps of the stable subordinator at
//!   time one, reweighted by `τ₁^{-θ}`.

mod constants;
mod gem;
mod params;
mod stable;
mod subordinator;

pub use constants::{c_alpha, constants, ln_c_alpha_theta, ln_c_alpha_theta_n, Constants};
pub use gem::{
    gem_atoms_for_tail, gem_sample, gem_tail_bound, rank_descending, GemSample, GemStop, StickBreaker, MAX_STICKS,
};
pub use params::Params;
pub use stable::{
    importance_ensemble, importance_particle, stable_jump_from_arrival, stable_ranked_jumps, Particle, StableJumps,
    WeightedEnsemble, ESS_WARNING_RATIO,
};
pub use subordinator::{sample_pd_subordinator, sample_pd_subordinator_with_scale, SubordinatorDraw};

use serde::{Deserialize, Serialize};

pub const DEFAULT_TAIL_EPS: f64 = 1e-6;
pub const DEFAULT_STOP_EPS: f64 = 1e-9;
pub const DEFAULT_JUMP_FLOOR: f64 = 1e-10;

/// Ranked atom weights `p₁ ≥ p₂ ≥ …` plus the mass not assigned to any
/// tracked atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdSample {
    pub weights: Vec<f64>,
    pub tail: f64,
}

impl PdSample {
    /// Largest weight, or zero for an empty sample.
    pub fn largest(&self) -> f64 {
        self.weights.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> Option<f64> {
        self.weights.last().copied()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ weights + tail`, equal to one up to rounding.
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum::<f64>() + self.tail
    }

    pub fn is_descending(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] >= w[1])
    }
}
