use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::map_indexed;
use crate::sampler::{c_alpha, ln_c_alpha_theta, Params, PdSample};
use crate::special::{exp_variate, ln_gamma, RngStream};
use crate::stats::{Estimate, Moments};

/// Ensembles whose effective sample size falls below this fraction of the
/// particle count carry a degeneracy warning.
pub const ESS_WARNING_RATIO: f64 = 0.01;

/// Jump size `(Γ(1-α)·Γ_k)^{-1/α}` for the `k`-th Poisson arrival time `Γ_k`.
pub fn stable_jump_from_arrival(alpha: f64, arrival: f64) -> f64 {
    (-(ln_gamma(1.0 - alpha) + arrival.ln()) / alpha).exp()
}

/// Ranked jumps of the stable subordinator at time one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableJumps {
    pub jumps: Vec<f64>,
    /// `τ₁` estimate: sum of the jumps plus `tail_estimate`.
    pub tau: f64,
    /// Conditional mean of the jump mass below the last generated jump.
    pub tail_estimate: f64,
}

impl StableJumps {
    pub fn normalized(&self) -> PdSample {
        PdSample {
            weights: self.jumps.iter().map(|v| v / self.tau).collect(),
            tail: self.tail_estimate / self.tau,
        }
    }
}

fn check_stop_eps(stop_eps: f64) -> Result<()> {
    if stop_eps > 0.0 && stop_eps <= 1e-2 {
        Ok(())
    } else {
        Err(Error::domain(format!("stop_eps must lie in (0, 1e-2], got {stop_eps}")))
    }
}

pub fn stable_ranked_jumps(alpha: f64, stop_eps: f64, stream: &RngStream) -> Result<StableJumps> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    check_stop_eps(stop_eps)?;
    Ok(stable_jumps_with(alpha, stop_eps, &mut stream.rng()))
}

pub(crate) fn stable_jumps_with<R: Rng + ?Sized>(alpha: f64, stop_eps: f64, rng: &mut R) -> StableJumps {
    let shift = ln_gamma(1.0 - alpha);
    let inv_alpha = 1.0 / alpha;
    let mut arrival = 0.0;
    let mut sum = 0.0;
    let mut jumps = Vec::new();
    loop {
        arrival += exp_variate(rng);
        let v = (-(shift + arrival.ln()) * inv_alpha).exp();
        let stop = v < stop_eps * sum;
        jumps.push(v);
        sum += v;
        if stop {
            break;
        }
    }
    let last = *jumps.last().expect("at least one jump");
    let tail_estimate = c_alpha(alpha) * last.powf(1.0 - alpha) / (1.0 - alpha);
    StableJumps {
        jumps,
        tau: sum + tail_estimate,
        tail_estimate,
    }
}

/// One draw from Π_{α,0} with its `τ₁` and log-weight `-θ·ln τ₁`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub sample: PdSample,
    pub tau: f64,
    pub log_weight: f64,
}

fn check_importance_params(p: &Params) -> Result<()> {
    if p.theta() < 0.0 {
        return Err(Error::domain(format!(
            "importance sampling needs theta >= 0, got {}",
            p.theta()
        )));
    }
    Ok(())
}

pub fn importance_particle(p: &Params, stop_eps: f64, stream: &RngStream) -> Result<Particle> {
    check_importance_params(p)?;
    check_stop_eps(stop_eps)?;
    let j = stable_jumps_with(p.alpha(), stop_eps, &mut stream.rng());
    Ok(Particle {
        sample: j.normalized(),
        tau: j.tau,
        log_weight: -p.theta() * j.tau.ln(),
    })
}

/// Particles use `substream(stream, "importance", i)`.
pub fn importance_ensemble(
    p: &Params,
    n_particles: usize,
    stop_eps: f64,
    stream: &RngStream,
) -> Result<WeightedEnsemble> {
    check_importance_params(p)?;
    check_stop_eps(stop_eps)?;
    if n_particles == 0 {
        return Err(Error::domain("an ensemble needs at least one particle"));
    }
    let particles = map_indexed(n_particles, |i| {
        importance_particle(p, stop_eps, &stream.substream("importance", i as u64)).expect("parameters validated above")
    });
    Ok(WeightedEnsemble::new(*p, particles))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedEnsemble {
    pub alpha: f64,
    pub theta: f64,
    pub particles: Vec<Particle>,
    pub warning: Option<String>,
}

impl WeightedEnsemble {
    pub fn new(p: Params, particles: Vec<Particle>) -> Self {
        let mut e = Self {
            alpha: p.alpha(),
            theta: p.theta(),
            particles,
            warning: None,
        };
        let ratio = e.ess() / e.particles.len() as f64;
        if ratio < ESS_WARNING_RATIO {
            e.warning = Some(format!(
                "effective sample size is {:.3e} of the particle count; weights are degenerate",
                ratio
            ));
        }
        e
    }

    fn max_log_weight(&self) -> f64 {
        self.particles
            .iter()
            .map(|q| q.log_weight)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `(Σw)² / Σw²`.
    pub fn ess(&self) -> f64 {
        let m = self.max_log_weight();
        let (s1, s2) = self.particles.iter().fold((0.0, 0.0), |(a, b), q| {
            let w = (q.log_weight - m).exp();
            (a + w, b + w * w)
        });
        s1 * s1 / s2
    }

    /// `Σ w f / Σ w`.
    pub fn self_normalized<F: Fn(&PdSample) -> f64>(&self, f: F) -> f64 {
        let m = self.max_log_weight();
        let (num, den) = self.particles.iter().fold((0.0, 0.0), |(a, b), q| {
            let w = (q.log_weight - m).exp();
            (a + w * f(&q.sample), b + w)
        });
        num / den
    }

    /// `C_{α,θ} · mean(w f)` with its standard error.
    pub fn exact_constant<F: Fn(&PdSample) -> f64>(&self, f: F) -> Estimate {
        let c = if self.theta == 0.0 {
            1.0
        } else {
            ln_c_alpha_theta(self.alpha, self.theta).exp()
        };
        let mut m = Moments::default();
        for q in &self.particles {
            m.push(q.log_weight.exp() * f(&q.sample));
        }
        let e = m.estimate();
        Estimate::new(c * e.value, c * e.std_error)
    }

    /// Mean of `τ₁^{-θ}`, which targets `1 / C_{α,θ}`.
    pub fn mean_weight(&self) -> Estimate {
        let mut m = Moments::default();
        for q in &self.particles {
            m.push(q.log_weight.exp());
        }
        m.estimate()
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }
}
