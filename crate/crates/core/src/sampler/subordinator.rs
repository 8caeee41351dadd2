use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{Params, PdSample};
use crate::special::{exp_variate, gamma_variate, ln_gamma, lower_incomplete_gamma, uniform_open, RngStream};

/// One realization of the subordinator representation of PD(α, θ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubordinatorDraw {
    /// Random time `ζ = γ_{θ/α} / (C·Γ(1-α))`.
    pub zeta: f64,
    /// `T = σ_ζ`: the accepted jumps plus the mean mass of jumps below the floor.
    pub total: f64,
    /// Accepted jumps, descending.
    pub jumps: Vec<f64>,
    /// Expected mass of all jumps below the floor, an upper bound on `total - Σ jumps`.
    pub truncation_bound: f64,
}

impl SubordinatorDraw {
    pub fn untracked(&self) -> f64 {
        self.total - self.jumps.iter().sum::<f64>()
    }

    /// Ranked weights `V_i(T) / T`.
    pub fn normalized(&self) -> PdSample {
        PdSample {
            weights: self.jumps.iter().map(|v| v / self.total).collect(),
            tail: self.untracked() / self.total,
        }
    }
}

pub fn sample_pd_subordinator(p: &Params, jump_floor: f64, stream: &RngStream) -> Result<SubordinatorDraw> {
    sample_pd_subordinator_with_scale(p, 1.0, jump_floor, stream)
}

/// As [`sample_pd_subordinator`] with an explicit Lévy-measure scale `C`.
#[doc(hidden)]
pub fn sample_pd_subordinator_with_scale(
    p: &Params,
    scale: f64,
    jump_floor: f64,
    stream: &RngStream,
) -> Result<SubordinatorDraw> {
    p.require_positive_theta()?;
    if !(jump_floor > 0.0 && jump_floor <= 1e-6) {
        return Err(Error::domain(format!(
            "jump_floor must lie in (0, 1e-6], got {jump_floor}"
        )));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::domain(format!("scale must be positive, got {scale}")));
    }
    Ok(subordinator_with(p, scale, jump_floor, &mut stream.rng()))
}

pub(crate) fn subordinator_with<R: Rng + ?Sized>(p: &Params, scale: f64, floor: f64, rng: &mut R) -> SubordinatorDraw {
    let a = p.alpha();
    let gamma = gamma_variate(rng, p.theta() / a);
    let zeta = gamma / (scale * ln_gamma(1.0 - a).exp());
    let intensity = zeta * scale;

    let inv_alpha = 1.0 / a;
    let ln_intensity = intensity.ln();
    let mut arrival = 0.0;
    let mut jumps = Vec::new();
    let mut sum = 0.0;
    loop {
        arrival += exp_variate(rng);
        let v = (-(arrival.ln() - ln_intensity) * inv_alpha).exp();
        if v < floor {
            break;
        }
        let u = uniform_open(rng);
        if u < 1.0 - v || u < (-v).exp() {
            jumps.push(v);
            sum += v;
        }
    }

    let mass_rate = intensity * a;
    let compensator = mass_rate * lower_incomplete_gamma(1.0 - a, floor);
    let truncation_bound = mass_rate * floor.powf(1.0 - a) / (1.0 - a);
    SubordinatorDraw {
        zeta,
        total: sum + compensator,
        jumps,
        truncation_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma_cdf;
    use crate::stats::{ks_test, Moments};

    fn draws(alpha: f64, theta: f64, floor: f64, n: usize, seed: u64) -> Vec<SubordinatorDraw> {
        let p = Params::new(alpha, theta).unwrap();
        let root = RngStream::new(seed);
        (0..n)
            .map(|i| sample_pd_subordinator(&p, floor, &root.substream("sub", i as u64)).unwrap())
            .collect()
    }

    #[test]
    fn total_is_gamma_theta() {
        let d = draws(0.4, 2.0, 1e-7, 10_000, 77);
        let ts: Vec<f64> = d.iter().map(|x| x.total).collect();
        let ks = ks_test(&ts, |x| gamma_cdf(2.0, x));
        assert!(ks.p_value > 0.01, "{ks:?}");
        let mut m = Moments::default();
        ts.iter().for_each(|&t| m.push(t));
        assert!(m.estimate().z_to(2.0).abs() < 3.0);
    }

    #[test]
    fn draw_invariants() {
        for d in draws(0.6, 1.5, 1e-6, 200, 4) {
            assert!(d.jumps.windows(2).all(|w| w[0] >= w[1]));
            let u = d.untracked();
            assert!(u >= 0.0);
            assert!(u <= d.truncation_bound);
            assert!((d.normalized().total_mass() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_is_honest_against_finer_rerun() {
        let p = Params::new(0.5, 1.0).unwrap();
        let root = RngStream::new(21);
        for i in 0..1000 {
            let s = root.substream("sub", i);
            let coarse = sample_pd_subordinator(&p, 1e-6, &s).unwrap();
            let fine = sample_pd_subordinator(&p, 1e-9, &s).unwrap();
            // same arrivals, so the fine run extends the coarse jump list
            assert_eq!(coarse.zeta, fine.zeta);
            let extra: f64 = fine.jumps[coarse.jumps.len()..].iter().sum();
            assert!(extra <= 10.0 * coarse.truncation_bound);
        }
    }

    #[test]
    fn scale_does_not_change_the_law() {
        let base = Params::new(0.5, 1.0).unwrap();
        let root = RngStream::new(99);
        let mean_h2 = |scale: f64| {
            let mut m = Moments::default();
            for i in 0..2000 {
                let d = sample_pd_subordinator_with_scale(&base, scale, 1e-7, &root.substream("c", i)).unwrap();
                let s = d.normalized();
                m.push(s.weights.iter().map(|w| w * w).sum());
            }
            m.mean()
        };
        let one = mean_h2(1.0);
        for c in [0.5, 2.0] {
            assert!((mean_h2(c) - one).abs() < 1e-9, "C = {c}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = RngStream::new(0);
        assert!(sample_pd_subordinator(&Params::new(0.5, -0.1).unwrap(), 1e-8, &s).is_err());
        assert!(sample_pd_subordinator(&Params::new(0.5, 1.0).unwrap(), 1e-3, &s).is_err());
    }
}
