use crate::error::{Error, Result};
use crate::sampler::Params;
use crate::special::ln_gamma;

/// `c_α`, `C_{α,θ}` and `C_{α,θ,n}` with their logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub c_alpha: f64,
    pub c_alpha_theta: f64,
    pub c_alpha_theta_n: f64,
    pub ln_c_alpha: f64,
    pub ln_c_alpha_theta: f64,
    pub ln_c_alpha_theta_n: f64,
}

/// Stable Lévy-measure normalization `c_α = α / Γ(1-α)`.
pub fn c_alpha(alpha: f64) -> f64 {
    (alpha.ln() - ln_gamma(1.0 - alpha)).exp()
}

/// `ln C_{α,θ} = ln Γ(θ+1) - ln Γ(θ/α+1)`.
pub fn ln_c_alpha_theta(alpha: f64, theta: f64) -> f64 {
    ln_gamma(theta + 1.0) - ln_gamma(theta / alpha + 1.0)
}

/// `ln C_{α,θ,n}`.
pub fn ln_c_alpha_theta_n(alpha: f64, theta: f64, n: u32) -> f64 {
    let nf = n as f64;
    ln_gamma(theta + 1.0) + ln_gamma(theta / alpha + nf) + (nf - 1.0) * alpha.ln()
        - ln_gamma(theta + nf * alpha)
        - ln_gamma(theta / alpha + 1.0)
        - nf * ln_gamma(1.0 - alpha)
}

pub fn constants(p: &Params, n: u32) -> Result<Constants> {
    p.require_positive_theta()?;
    if n == 0 {
        return Err(Error::domain("C_{alpha,theta,n} needs n >= 1"));
    }
    let (a, t) = (p.alpha(), p.theta());
    let ln_c_alpha = a.ln() - ln_gamma(1.0 - a);
    let ln_cat = ln_c_alpha_theta(a, t);
    let ln_catn = ln_c_alpha_theta_n(a, t, n);
    Ok(Constants {
        c_alpha: ln_c_alpha.exp(),
        c_alpha_theta: ln_cat.exp(),
        c_alpha_theta_n: ln_catn.exp(),
        ln_c_alpha,
        ln_c_alpha_theta: ln_cat,
        ln_c_alpha_theta_n: ln_catn,
    })
}
