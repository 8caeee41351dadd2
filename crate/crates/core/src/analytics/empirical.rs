use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::parallel::map_indexed;
use crate::sampler::{gem_sample, GemStop, Params};
use crate::special::RngStream;
use crate::stats::dkw_half_width;

/// Empirical CDF of `P₁(α, β)`, the estimate of `g_{α,β}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub seed: u64,
    /// Substream path below the master seed.
    pub path: Vec<(String, u64)>,
    pub sorted_samples: Vec<f64>,
}

impl EmpiricalCdf {
    /// Right-continuous step function; 0 for `x ≤ 0`, 1 for `x ≥ 1`.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        self.sorted_samples.partition_point(|&v| v <= x) as f64 / self.n as f64
    }

    /// Uniform error half-width at confidence `1 - delta`.
    pub fn dkw_bound(&self, delta: f64) -> f64 {
        dkw_half_width(self.n, delta)
    }

    pub fn matches(&self, alpha: f64, beta: f64) -> bool {
        close(self.alpha, alpha) && close(self.beta, beta)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: Self = serde_json::from_str(text).map_err(|e| Error::Cache(e.to_string()))?;
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if self.sorted_samples.len() != self.n {
            return Err(Error::Cache(format!(
                "sample count {} disagrees with n = {}",
                self.sorted_samples.len(),
                self.n
            )));
        }
        if !self.sorted_samples.windows(2).all(|w| w[0] <= w[1]) {
            return Err(Error::Cache("samples are not sorted".into()));
        }
        if !self.sorted_samples.iter().all(|&v| v > 0.0 && v <= 1.0) {
            return Err(Error::Cache("samples outside (0,1]".into()));
        }
        Ok(())
    }

    /// Writes `<dir>/g-<key>.json` through a temporary file and rename.
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(cache_err)?;
        let path = dir.join(cache_file_name(&cache_key_from_parts(
            self.alpha, self.beta, self.n, self.seed, &self.path,
        )));
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(cache_err)?;
        tmp.write_all(self.to_json().as_bytes()).map_err(cache_err)?;
        tmp.as_file().sync_all().map_err(cache_err)?;
        tmp.persist(&path).map_err(|e| cache_err(e.error))?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path).map_err(cache_err)?)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn cache_err(e: std::io::Error) -> Error {
    Error::Cache(e.to_string())
}

fn cache_file_name(key: &str) -> String {
    format!("g-{key}.json")
}

fn cache_key_from_parts(alpha: f64, beta: f64, n: usize, seed: u64, path: &[(String, u64)]) -> String {
    let mut h = Sha256::new();
    h.update(b"pd2/g-cache/v1");
    h.update(alpha.to_bits().to_le_bytes());
    h.update(beta.to_bits().to_le_bytes());
    h.update((n as u64).to_le_bytes());
    h.update(seed.to_le_bytes());
    for (label, index) in path {
        h.update((label.len() as u64).to_le_bytes());
        h.update(label.as_bytes());
        h.update(index.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Content address of the estimate `estimate_g(alpha, beta, n, stream)` would produce.
pub fn cache_key(alpha: f64, beta: f64, n: usize, stream: &RngStream) -> String {
    cache_key_from_parts(alpha, beta, n, stream.master_seed(), stream.path())
}

/// `n` independent draws of `P₁(α, β)`; draw `i` uses `substream(stream, "g", i)`.
pub fn estimate_g(alpha: f64, beta: f64, n: usize, stream: &RngStream) -> Result<EmpiricalCdf> {
    if !(beta > 0.0) {
        return Err(Error::domain(format!("beta must be positive, got {beta}")));
    }
    if n == 0 {
        return Err(Error::domain("empirical CDF needs at least one sample"));
    }
    let p = Params::new(alpha, beta)?;
    let mut samples = map_indexed(n, |i| {
        let g = gem_sample(&p, GemStop::Resolved(1), &stream.substream("g", i as u64))
            .expect("resolved stop is always valid");
        g.weights.iter().cloned().fold(0.0, f64::max)
    });
    samples.sort_by(f64::total_cmp);
    Ok(EmpiricalCdf {
        alpha,
        beta,
        n,
        seed: stream.master_seed(),
        path: stream.path().to_vec(),
        sorted_samples: samples,
    })
}

/// Reads the cached estimate when present, otherwise estimates and stores it.
pub fn load_or_estimate_g(dir: &Path, alpha: f64, beta: f64, n: usize, stream: &RngStream) -> Result<EmpiricalCdf> {
    let path = dir.join(cache_file_name(&cache_key(alpha, beta, n, stream)));
    if path.exists() {
        let g = EmpiricalCdf::load(&path)?;
        if g.alpha.to_bits() == alpha.to_bits()
            && g.beta.to_bits() == beta.to_bits()
            && g.n == n
            && g.seed == stream.master_seed()
            && g.path == stream.path()
        {
            return Ok(g);
        }
        return Err(Error::Cache(format!(
            "{} does not hold the requested estimate",
            path.display()
        )));
    }
    let g = estimate_g(alpha, beta, n, stream)?;
    g.save(dir)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_and_monotonicity() {
        let g = estimate_g(0.5, 1.0, 2000, &RngStream::new(1)).unwrap();
        assert_eq!(g.eval(0.0), 0.0);
        assert_eq!(g.eval(1.0), 1.0);
        assert_eq!(g.eval(-3.0), 0.0);
        let mut prev = 0.0;
        for i in 0..=200 {
            let v = g.eval(i as f64 / 200.0);
            assert!(v >= prev);
            prev = v;
        }
        assert!(g.sorted_samples.iter().all(|&v| v > 0.0 && v <= 1.0));
    }

    #[test]
    fn independent_seeds_agree_within_dkw() {
        let n = 100_000;
        let a = estimate_g(0.5, 1.0, n, &RngStream::new(10)).unwrap();
        let b = estimate_g(0.5, 1.0, n, &RngStream::new(20)).unwrap();
        let band = a.dkw_bound(0.05) + b.dkw_bound(0.05);
        assert!((a.eval(0.5) - b.eval(0.5)).abs() <= 2.0 * band);
    }

    #[test]
    fn cache_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let s = RngStream::new(3).substream("density", 0);
        let first = load_or_estimate_g(dir.path(), 0.3, 2.3, 500, &s).unwrap();
        let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(files.len(), 1);
        let again = load_or_estimate_g(dir.path(), 0.3, 2.3, 500, &s).unwrap();
        assert_eq!(first, again);
        for (x, y) in first.sorted_samples.iter().zip(&again.sorted_samples) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        let other = cache_key(0.3, 2.3, 500, &RngStream::new(4).substream("density", 0));
        assert_ne!(other, cache_key(0.3, 2.3, 500, &s));
    }

    #[test]
    fn corrupt_cache_is_reported() {
        assert!(matches!(EmpiricalCdf::from_json("{}"), Err(Error::Cache(_))));
        let mut g = estimate_g(0.5, 1.0, 10, &RngStream::new(1)).unwrap();
        g.sorted_samples.reverse();
        assert!(EmpiricalCdf::from_json(&g.to_json()).is_err());
    }

    #[test]
    fn rejects_bad_beta() {
        assert!(estimate_g(0.5, 0.0, 10, &RngStream::new(1)).is_err());
    }
}
