use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::Params;
use crate::special::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScalingKind {
    /// `a(θ) = θ^ρ` for the largest-weight MDP: needs `a → ∞`, `a/θ → 0`.
    Mdp3,
    /// `a(θ) = θ^ρ` for the homozygosity MDP, with the exponent `ε` of the
    /// extra liminf condition.
    Mdp4 { epsilon: f64 },
}

/// Power-law scaling `a(θ) = θ^ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPlan {
    pub kind: ScalingKind,
    pub rho: f64,
}

impl ScalingPlan {
    pub fn mdp3(rho: f64) -> Self {
        Self {
            kind: ScalingKind::Mdp3,
            rho,
        }
    }

    pub fn mdp4(rho: f64, epsilon: f64) -> Self {
        Self {
            kind: ScalingKind::Mdp4 { epsilon },
            rho,
        }
    }

    pub fn a(&self, theta: f64) -> f64 {
        theta.powf(self.rho)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Validation {
    Pass,
    Fail(String),
}

impl Validation {
    pub fn passed(&self) -> bool {
        matches!(self, Validation::Pass)
    }

    pub fn into_result(self) -> Result<()> {
        match self {
            Validation::Pass => Ok(()),
            Validation::Fail(reason) => Err(Error::domain(format!("inadmissible scaling: {reason}"))),
        }
    }
}

/// Admissibility of a power-law scaling, reduced to exponent inequalities.
/// `m` is the homozygosity order and only matters for `Mdp4`.
pub fn validate_scaling(plan: &ScalingPlan, m: u32) -> Validation {
    let rho = plan.rho;
    match plan.kind {
        ScalingKind::Mdp3 => {
            if !(rho > 0.0) {
                Validation::Fail(format!("rho = {rho}: a(theta) must diverge"))
            } else if !(rho < 1.0) {
                Validation::Fail(format!("rho = {rho}: a(theta)/theta must vanish"))
            } else {
                Validation::Pass
            }
        }
        ScalingKind::Mdp4 { epsilon } => {
            if m < 2 {
                return Validation::Fail(format!("homozygosity order m = {m} must be >= 2"));
            }
            let power = (m - 1) as f64 / (2 * m - 1) as f64;
            let eps_cap = 1.0 / (2 * m - 1) as f64;
            if !(rho > 0.0) {
                Validation::Fail(format!("rho = {rho}: a(theta) must diverge"))
            } else if !(rho < 0.5) {
                Validation::Fail(format!("rho = {rho}: a(theta)/sqrt(theta) must vanish"))
            } else if !(epsilon > 0.0 && epsilon < eps_cap) {
                Validation::Fail(format!("epsilon = {epsilon} must lie in (0, {eps_cap})"))
            } else if !(rho * (1.0 - epsilon) >= power) {
                Validation::Fail(format!(
                    "rho*(1-epsilon) = {} is below (m-1)/(2m-1) = {power}",
                    rho * (1.0 - epsilon)
                ))
            } else {
                Validation::Pass
            }
        }
    }
}

/// Centering `β(α,θ) = ln θ - (α+1) ln ln θ - ln Γ(1-α)`, defined for `θ > e`.
pub fn beta_shift(p: &Params) -> Result<f64> {
    let t = p.theta();
    if !(t > std::f64::consts::E) {
        return Err(Error::domain(format!("beta shift needs theta > e, got {t}")));
    }
    let a = p.alpha();
    Ok(t.ln() - (a + 1.0) * t.ln().ln() - ln_gamma(1.0 - a))
}

/// `γ(θ) = a(θ)·β(α,θ)/θ`, reported for diagnostics only.
pub fn gamma_diagnostic(p: &Params, plan: &ScalingPlan) -> Result<f64> {
    Ok(plan.a(p.theta()) * beta_shift(p)? / p.theta())
}
