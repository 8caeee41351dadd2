use crate::analytics::EmpiricalCdf;
use crate::error::{Error, Result};
use crate::sampler::{ln_c_alpha_theta_n, Params};

/// `ln h(p₁,…,p_n)`, or `-∞` where the empirical `g` vanishes.
pub fn ln_joint_density(p: &Params, point: &[f64], g: &EmpiricalCdf) -> Result<f64> {
    p.require_positive_theta()?;
    let n = point.len();
    if n == 0 {
        return Err(Error::domain("density needs at least one coordinate"));
    }
    let (a, t) = (p.alpha(), p.theta());
    let beta = t + n as f64 * a;
    if !g.matches(a, beta) {
        return Err(Error::Mismatch(format!(
            "g was built for (alpha={}, beta={}) but the density needs (alpha={a}, beta={beta})",
            g.alpha, g.beta
        )));
    }
    if !point.windows(2).all(|w| w[0] >= w[1]) {
        return Err(Error::domain("density point must be nonincreasing"));
    }
    let last = point[n - 1];
    if !(last > 0.0) {
        return Err(Error::domain("density point must be strictly positive"));
    }
    let sum: f64 = point.iter().sum();
    let rest = 1.0 - sum;
    if !(rest > 0.0) {
        return Err(Error::domain(format!("density point must sum below 1, got {sum}")));
    }
    let gv = g.eval(last / rest);
    if gv == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let ln_prod: f64 = point.iter().map(|x| x.ln()).sum();
    Ok(ln_c_alpha_theta_n(a, t, n as u32) + (beta - 1.0) * rest.ln() - (1.0 + a) * ln_prod + gv.ln())
}

/// Joint density of the `n` largest weights, `n = point.len()`.
pub fn joint_density(p: &Params, point: &[f64], g: &EmpiricalCdf) -> Result<f64> {
    Ok(ln_joint_density(p, point, g)?.exp())
}
