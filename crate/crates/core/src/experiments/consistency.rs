use serde::{Deserialize, Serialize};

use crate::analytics::homozygosity;
use crate::error::Result;
use crate::experiments::monte_carlo::gem_atoms_for_homozygosity;
use crate::experiments::table::check_replicas;
use crate::parallel::{block_reduce, map_indexed};
use crate::sampler::{
    gem_sample, importance_particle, ln_c_alpha_theta, rank_descending, sample_pd_subordinator, GemStop, Params,
    PdSample,
};
use crate::special::{gamma_cdf, RngStream};
use crate::stats::{ks_test, CoMoments, Estimate, KsResult, Moments};

/// Truncation settings for the three samplers in a consistency run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerSettings {
    /// Expected untracked `H₂` left by the GEM truncation.
    pub gem_h2_tolerance: f64,
    pub stop_eps: f64,
    pub jump_floor: f64,
}

impl Default for SamplerSettings {
    fn default() -> Self {
        Self {
            gem_h2_tolerance: 1e-6,
            stop_eps: 1e-5,
            jump_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub value: f64,
    pub target: f64,
    /// z-score, or a p-value for the KS entry.
    pub statistic: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerEstimates {
    pub h2: Estimate,
    pub p1: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub alpha: f64,
    pub theta: f64,
    pub replicas: usize,
    pub gem: SamplerEstimates,
    pub subordinator: SamplerEstimates,
    pub importance: SamplerEstimates,
    pub ks: KsResult,
    pub mean_weight: Estimate,
    pub ess: f64,
    pub correlation: Estimate,
    pub entries: Vec<CheckEntry>,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn entry(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

fn h2(s: &PdSample) -> f64 {
    homozygosity(s, 2).expect("order 2 is valid").value
}

#[derive(Debug, Clone, Copy, Default)]
struct PairMoments {
    h2: Moments,
    p1: Moments,
}

impl PairMoments {
    fn merge(&mut self, o: PairMoments) {
        self.h2.merge(&o.h2);
        self.p1.merge(&o.p1);
    }

    fn estimates(&self) -> SamplerEstimates {
        SamplerEstimates {
            h2: self.h2.estimate(),
            p1: self.p1.estimate(),
        }
    }
}

/// Running sums for a self-normalized weighted mean of two functionals.
#[derive(Debug, Clone, Copy, Default)]
struct WeightedSums {
    w: Moments,
    sw: f64,
    sw2: f64,
    f: [(f64, f64, f64); 2],
}

impl WeightedSums {
    fn push(&mut self, w: f64, fs: [f64; 2]) {
        self.w.push(w);
        self.sw += w;
        self.sw2 += w * w;
        for (acc, v) in self.f.iter_mut().zip(fs) {
            acc.0 += w * v;
            acc.1 += w * w * v;
            acc.2 += w * w * v * v;
        }
    }

    fn merge(&mut self, o: WeightedSums) {
        self.w.merge(&o.w);
        self.sw += o.sw;
        self.sw2 += o.sw2;
        for (a, b) in self.f.iter_mut().zip(o.f) {
            a.0 += b.0;
            a.1 += b.1;
            a.2 += b.2;
        }
    }

    /// Ratio estimate with its delta-method standard error.
    fn ratio(&self, i: usize) -> Estimate {
        let (swf, sw2f, sw2f2) = self.f[i];
        let r = swf / self.sw;
        let var = (sw2f2 - 2.0 * r * sw2f + r * r * self.sw2) / (self.sw * self.sw);
        Estimate::new(r, var.max(0.0).sqrt())
    }
}

/// Cross-checks of the three samplers at one `(α, θ)`.
///
/// Replica `i` of each sampler uses `substream(stream, label, i)` with labels
/// `consistency-gem`, `consistency-sub` and `consistency-imp`.
pub fn consistency_suite(
    alpha: f64,
    theta: f64,
    replicas: usize,
    stream: &RngStream,
    settings: &SamplerSettings,
) -> Result<ConsistencyReport> {
    check_replicas(replicas)?;
    let p = Params::large_theta(alpha, theta)?;

    let atoms = gem_atoms_for_homozygosity(&p, 2, settings.gem_h2_tolerance)?;
    let stop = GemStop::AtLeast { atoms, k: 1 };
    let gem = block_reduce(
        replicas,
        PairMoments::default,
        |acc, i| {
            let g = gem_sample(&p, stop, &stream.substream("consistency-gem", i as u64)).expect("valid stop");
            let s = rank_descending(&g);
            acc.h2.push(h2(&s));
            acc.p1.push(s.largest());
        },
        |a, b| a.merge(b),
    );

    let sub: Vec<(f64, f64, f64)> = map_indexed(replicas, |i| {
        let d = sample_pd_subordinator(&p, settings.jump_floor, &stream.substream("consistency-sub", i as u64))
            .expect("parameters validated");
        let s = d.normalized();
        (d.total, h2(&s), s.largest())
    });
    let mut sub_moments = PairMoments::default();
    let mut co = CoMoments::default();
    for &(t, h, p1) in &sub {
        sub_moments.h2.push(h);
        sub_moments.p1.push(p1);
        co.push(t, h);
    }
    let totals: Vec<f64> = sub.iter().map(|x| x.0).collect();
    let ks = ks_test(&totals, |x| gamma_cdf(theta, x));

    let imp = block_reduce(
        replicas,
        WeightedSums::default,
        |acc, i| {
            let q = importance_particle(&p, settings.stop_eps, &stream.substream("consistency-imp", i as u64))
                .expect("parameters validated");
            acc.push(q.log_weight.exp(), [h2(&q.sample), q.sample.largest()]);
        },
        |a, b| a.merge(b),
    );
    let importance = SamplerEstimates {
        h2: imp.ratio(0),
        p1: imp.ratio(1),
    };
    let mean_weight = imp.w.estimate();
    let ess = imp.sw * imp.sw / imp.sw2;

    let gem = gem.estimates();
    let subordinator = sub_moments.estimates();
    let mut entries = vec![CheckEntry {
        name: "ks_total_vs_gamma".into(),
        value: ks.statistic,
        target: 0.0,
        statistic: ks.p_value,
        passed: ks.p_value > 0.01,
    }];
    let pairs = [
        ("gem", &gem, "subordinator", &subordinator),
        ("gem", &gem, "importance", &importance),
        ("subordinator", &subordinator, "importance", &importance),
    ];
    for (na, a, nb, b) in pairs {
        for (label, ea, eb) in [("h2", a.h2, b.h2), ("p1", a.p1, b.p1)] {
            let z = ea.z_between(&eb);
            entries.push(CheckEntry {
                name: format!("{label}_{na}_vs_{nb}"),
                value: ea.value - eb.value,
                target: 0.0,
                statistic: z,
                passed: z.abs() < 3.0,
            });
        }
    }
    let inverse_constant = (-ln_c_alpha_theta(alpha, theta)).exp();
    let zw = mean_weight.z_to(inverse_constant);
    entries.push(CheckEntry {
        name: "mean_weight_vs_inverse_constant".into(),
        value: mean_weight.value,
        target: inverse_constant,
        statistic: zw,
        passed: zw.abs() < 3.0,
    });
    let correlation = co.correlation();
    let zc = correlation.z_to(0.0);
    entries.push(CheckEntry {
        name: "corr_total_h2".into(),
        value: correlation.value,
        target: 0.0,
        statistic: zc,
        passed: zc.abs() < 3.0,
    });

    Ok(ConsistencyReport {
        alpha,
        theta,
        replicas,
        gem,
        subordinator,
        importance,
        ks,
        mean_weight,
        ess,
        correlation,
        entries,
    })
}
