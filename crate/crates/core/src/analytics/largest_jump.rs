use crate::error::Result;
use crate::sampler::{c_alpha, Params};
use crate::special::{tail_integral, QuadratureSpec};

const SMALL_U: f64 = 1e-8;
const SMALL_E: f64 = 1e-8;

/// The pieces of `ν(s) = (1+u)^{-θ/α}` with `u = c_α s^{-α} ∫₁^∞ z^{-(1+α)} e^{-sz} dz`,
/// all kept in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct V1Exponent {
    pub ln_u: f64,
    /// `ln ln(1+u)`.
    pub ln_l: f64,
    /// `E = (θ/α)·ln(1+u)`.
    pub e: f64,
    pub ln_e: f64,
}

pub fn v1_exponent(p: &Params, s: f64, q: &QuadratureSpec) -> Result<V1Exponent> {
    p.require_positive_theta()?;
    let a = p.alpha();
    let integral = tail_integral(a, s, q)?;
    let ln_u = c_alpha(a).ln() - a * s.ln() + integral.ln();
    Ok(exponent_from_ln_u(p.theta() / a, ln_u))
}

/// Builds the exponent for `ratio = θ/α` from `ln u` alone.
pub(crate) fn exponent_from_ln_u(ratio: f64, ln_u: f64) -> V1Exponent {
    let ln_l = if ln_u > 36.0 {
        (ln_u + (-ln_u).exp().ln_1p()).ln()
    } else {
        let u = ln_u.exp();
        if u < SMALL_U {
            ln_u + (u * (-0.5 + u / 3.0)).ln_1p()
        } else {
            u.ln_1p().ln()
        }
    };
    let ln_e = ratio.ln() + ln_l;
    V1Exponent {
        ln_u,
        ln_l,
        e: ln_e.exp(),
        ln_e,
    }
}

pub(crate) fn log_sf_from_exponent(x: &V1Exponent) -> f64 {
    if x.e < SMALL_E {
        x.ln_e - x.e / 2.0 + x.e * x.e / 24.0
    } else if x.e < std::f64::consts::LN_2 {
        (-(-x.e).exp_m1()).ln()
    } else {
        (-(-x.e).exp()).ln_1p()
    }
}

/// `P(V₁(T) ≤ s) = exp(-(θ/α)·ln(1+u))`.
pub fn cdf_v1(p: &Params, s: f64, q: &QuadratureSpec) -> Result<f64> {
    Ok((-v1_exponent(p, s, q)?.e).exp())
}

/// `ln P(V₁(T) > s) = ln(1 - e^{-E})`.
pub fn log_sf_v1(p: &Params, s: f64, q: &QuadratureSpec) -> Result<f64> {
    Ok(log_sf_from_exponent(&v1_exponent(p, s, q)?))
}
