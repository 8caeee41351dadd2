use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{Params, PdSample};
use crate::special::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Homozygosity {
    pub value: f64,
    /// `tail · p_min^{m-1}`; bounds the untracked part of `Σ p_i^m` whenever
    /// no untracked atom exceeds the smallest tracked one.
    pub error_bound: f64,
}

/// `H_m = Σ p_i^m` over the tracked atoms.
pub fn homozygosity(s: &PdSample, m: u32) -> Result<Homozygosity> {
    if m < 2 {
        return Err(Error::domain(format!("homozygosity order must be >= 2, got {m}")));
    }
    let e = m as i32;
    let value = s.weights.iter().map(|p| p.powi(e)).sum();
    let error_bound = match s.smallest() {
        Some(p) => s.tail * p.powi(e - 1),
        None => s.tail.powi(e),
    };
    Ok(Homozygosity { value, error_bound })
}

/// `E[H_m]` under PD(α, θ): `Γ(θ+1)Γ(m-α) / (Γ(θ+m)Γ(1-α))`.
pub fn expected_homozygosity(p: &Params, m: u32) -> Result<f64> {
    if m < 2 {
        return Err(Error::domain(format!("homozygosity order must be >= 2, got {m}")));
    }
    let (a, t, mf) = (p.alpha(), p.theta(), m as f64);
    Ok((ln_gamma(t + 1.0) + ln_gamma(mf - a) - ln_gamma(t + mf) - ln_gamma(1.0 - a)).exp())
}
