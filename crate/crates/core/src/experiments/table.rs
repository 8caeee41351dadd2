use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::asymptotics::ScalingPlan;
use crate::error::{Error, Result};

pub const MIN_REPLICAS: usize = 100;
pub const MIN_HITS: u64 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowStatus {
    Ok,
    /// Fewer than [`MIN_HITS`] Monte Carlo hits; no probability is reported.
    Insufficient,
    /// The scaled value moved away from the theoretical limit.
    NonMonotone,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Insufficient => "insufficient",
            RowStatus::NonMonotone => "non-monotone",
        }
    }
}

/// One row of a deviation scan. Cells that do not apply hold NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationRow {
    /// θ, or `a(α,θ)` for small-parameter scans.
    pub driver: f64,
    pub threshold: f64,
    pub log_prob: f64,
    pub log_prob_se: f64,
    pub speed: f64,
    /// `speed · log_prob`.
    pub scaled: f64,
    pub scaled_se: f64,
    /// Expected limit of `scaled`, i.e. minus the rate.
    pub theory: f64,
    /// Exact largest-jump value of `scaled` at the same point, when computed.
    pub companion: f64,
    pub hits: u64,
    pub replicas: u64,
    pub status: RowStatus,
}

impl DeviationRow {
    pub(crate) fn exact(driver: f64, threshold: f64, log_prob: f64, speed: f64, theory: f64) -> Self {
        Self {
            driver,
            threshold,
            log_prob,
            log_prob_se: 0.0,
            speed,
            scaled: speed * log_prob,
            scaled_se: 0.0,
            theory,
            companion: f64::NAN,
            hits: 0,
            replicas: 0,
            status: RowStatus::Ok,
        }
    }

    /// Binomial estimate from `hits` out of `replicas`.
    pub(crate) fn counted(driver: f64, threshold: f64, hits: u64, replicas: u64, speed: f64, theory: f64) -> Self {
        let n = replicas as f64;
        let p = hits as f64 / n;
        let (log_prob, log_prob_se, status) = if hits < MIN_HITS {
            (f64::NAN, f64::NAN, RowStatus::Insufficient)
        } else {
            (p.ln(), ((1.0 - p) / (p * n)).sqrt(), RowStatus::Ok)
        };
        Self {
            driver,
            threshold,
            log_prob,
            log_prob_se,
            speed,
            scaled: speed * log_prob,
            scaled_se: speed * log_prob_se,
            theory,
            companion: f64::NAN,
            hits,
            replicas,
            status,
        }
    }

    pub fn probability(&self) -> f64 {
        if self.replicas == 0 {
            self.log_prob.exp()
        } else {
            self.hits as f64 / self.replicas as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationTable {
    pub experiment: String,
    pub alpha: f64,
    pub m: Option<u32>,
    pub plan: Option<ScalingPlan>,
    pub seed: Option<u64>,
    pub replicas: Option<u64>,
    pub rows: Vec<DeviationRow>,
    /// Named scalar side results, e.g. auxiliary probabilities per row.
    pub notes: Vec<(String, f64)>,
}

impl DeviationTable {
    pub(crate) fn new(experiment: &str, alpha: f64) -> Self {
        Self {
            experiment: experiment.to_owned(),
            alpha,
            m: None,
            plan: None,
            seed: None,
            replicas: None,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn is_sorted_by_driver(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].driver <= w[1].driver)
    }

    pub fn note(&self, key: &str) -> Option<f64> {
        self.notes.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

/// Inputs shared by the scans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub alpha: f64,
    pub theta: Option<f64>,
    pub plan: Option<ScalingPlan>,
    pub grid: Vec<f64>,
    pub replicas: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        check_grid(&self.grid)?;
        check_replicas(self.replicas)
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain("grid must not be empty"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("grid values must be finite"));
    }
    Ok(())
}

pub(crate) fn check_replicas(replicas: usize) -> Result<()> {
    if replicas < MIN_REPLICAS {
        return Err(Error::domain(format!(
            "replica count must be at least {MIN_REPLICAS}, got {replicas}"
        )));
    }
    Ok(())
}

pub(crate) fn sorted_grid(grid: &[f64]) -> Vec<f64> {
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counted_rows_flag_rare_events() {
        let r = DeviationRow::counted(100.0, 1.0, 49, 1000, 0.1, -1.0);
        assert_eq!(r.status, RowStatus::Insufficient);
        assert!(r.log_prob.is_nan());
        let r = DeviationRow::counted(100.0, 1.0, 500, 1000, 0.1, -1.0);
        assert_eq!(r.status, RowStatus::Ok);
        assert!((r.log_prob - 0.5f64.ln()).abs() < 1e-15);
        assert!(r.scaled <= 0.0);
    }

    #[test]
    fn config_validation() {
        let mut c = ExperimentConfig {
            alpha: 0.5,
            theta: None,
            plan: None,
            grid: vec![1e3],
            replicas: 100,
            seed: 1,
            output: None,
        };
        assert!(c.validate().is_ok());
        c.replicas = 99;
        assert!(c.validate().is_err());
        c.replicas = 100;
        c.grid.clear();
        assert!(c.validate().is_err());
    }
}
