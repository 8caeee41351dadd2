use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Generator handed out by [`RngStream::rng`].
pub type StreamRng = ChaCha8Rng;

/// A reproducible random substream identified by a master seed and a path
/// of `(label, index)` pairs.
///
/// Child keys are a hash of the parent key, label and index, so deriving a
/// stream never touches shared state and the output of a replica does not
/// depend on which worker runs it or in what order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    master_seed: u64,
    path: Vec<(String, u64)>,
    key: [u8; 32],
}

impl RngStream {
    pub fn new(master_seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(b"pd2/root");
        h.update(master_seed.to_le_bytes());
        Self {
            master_seed,
            path: Vec::new(),
            key: h.finalize().into(),
        }
    }

    pub fn substream(&self, label: &str, index: u64) -> Self {
        let mut h = Sha256::new();
        h.update(self.key);
        h.update((label.len() as u64).to_le_bytes());
        h.update(label.as_bytes());
        h.update(index.to_le_bytes());
        let mut path = self.path.clone();
        path.push((label.to_owned(), index));
        Self {
            master_seed: self.master_seed,
            path,
            key: h.finalize().into(),
        }
    }

    pub fn rng(&self) -> StreamRng {
        ChaCha8Rng::from_seed(self.key)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn path(&self) -> &[(String, u64)] {
        &self.path
    }

    /// `seed/label:index/...` rendering of the stream identity.
    pub fn describe(&self) -> String {
        let mut out = self.master_seed.to_string();
        for (label, index) in &self.path {
            out.push('/');
            out.push_str(label);
            out.push(':');
            out.push_str(&index.to_string());
        }
        out
    }
}

/// Free-function form of [`RngStream::substream`].
pub fn substream(stream: &RngStream, label: &str, index: u64) -> RngStream {
    stream.substream(label, index)
}

/// Distributions available through [`draw`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dist {
    Uniform,
    Beta { a: f64, b: f64 },
    Gamma { shape: f64 },
    Exponential,
}

pub fn draw<R: Rng + ?Sized>(rng: &mut R, dist: Dist) -> Result<f64> {
    match dist {
        Dist::Uniform => Ok(uniform_open(rng)),
        Dist::Exponential => Ok(exp_variate(rng)),
        Dist::Gamma { shape } => {
            check_positive("gamma shape", shape)?;
            Ok(gamma_variate(rng, shape))
        }
        Dist::Beta { a, b } => {
            check_positive("beta a", a)?;
            check_positive("beta b", b)?;
            Ok(beta_pair(rng, a, b).0)
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive, got {v}")))
    }
}

/// Uniform on the open interval (0, 1).
#[inline]
pub fn uniform_open<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[inline]
pub fn exp_variate<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Exp1)
}

/// Log of a Gamma(shape, 1) variate.
///
/// Marsaglia-Tsang for shape ≥ 1; smaller shapes draw at shape + 1 and add
/// `ln(U)/shape`, which stays finite where `U^{1/shape}` would underflow.
pub fn ln_gamma_variate<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    if shape < 1.0 {
        let boosted = marsaglia_tsang_ln(rng, shape + 1.0);
        return boosted + uniform_open(rng).ln() / shape;
    }
    marsaglia_tsang_ln(rng, shape)
}

#[inline]
fn marsaglia_tsang_ln<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = uniform_open(rng);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d.ln() + v.ln();
        }
    }
}

pub fn gamma_variate<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    ln_gamma_variate(rng, shape).exp()
}

/// Beta(a, b) variate together with its complement, `(U, 1 - U)`.
///
/// Both coordinates come from the same pair of gamma variates, so the
/// complement keeps full relative precision when `U` is close to one.
pub fn beta_pair<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> (f64, f64) {
    let lx = ln_gamma_variate(rng, a);
    let ly = ln_gamma_variate(rng, b);
    let d = ly - lx;
    (logistic(-d), logistic(d))
}

#[inline]
fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    fn mean_and_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    fn draws(seed: u64, dist: Dist, n: usize) -> Vec<f64> {
        let mut rng = RngStream::new(seed).substream("test", 0).rng();
        (0..n).map(|_| draw(&mut rng, dist).unwrap()).collect()
    }

    #[test]
    fn beta_uniform_case_mean() {
        let (m, se) = mean_and_se(&draws(1, Dist::Beta { a: 1.0, b: 1.0 }, 100_000));
        assert!((m - 0.5).abs() < 3.0 * se, "mean {m}");
    }

    #[test]
    fn gamma_mean_equals_shape() {
        for &k in &[2.5, 0.3, 1.0] {
            let (m, se) = mean_and_se(&draws(2, Dist::Gamma { shape: k }, 100_000));
            assert!((m - k).abs() < 3.0 * se, "shape {k}: mean {m}");
        }
    }

    #[test]
    fn beta_asymmetric_mean() {
        let (m, se) = mean_and_se(&draws(3, Dist::Beta { a: 0.5, b: 1.5 }, 100_000));
        assert!((m - 0.25).abs() < 3.0 * se, "mean {m}");
    }

    #[test]
    fn exponential_and_uniform_means() {
        let (m, se) = mean_and_se(&draws(4, Dist::Exponential, 100_000));
        assert!((m - 1.0).abs() < 3.0 * se);
        let us = draws(5, Dist::Uniform, 100_000);
        assert!(us.iter().all(|&u| u > 0.0 && u < 1.0));
        let (m, se) = mean_and_se(&us);
        assert!((m - 0.5).abs() < 3.0 * se);
    }

    #[test]
    fn beta_complement_is_consistent() {
        let mut rng = RngStream::new(9).rng();
        for _ in 0..10_000 {
            let (u, c) = beta_pair(&mut rng, 0.95, 0.1);
            assert!((u + c - 1.0).abs() < 1e-15);
            assert!(u >= 0.0 && c >= 0.0);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = RngStream::new(0).rng();
        assert!(draw(&mut rng, Dist::Gamma { shape: 0.0 }).is_err());
        assert!(draw(&mut rng, Dist::Beta { a: 1.0, b: -1.0 }).is_err());
        assert!(draw(&mut rng, Dist::Beta { a: f64::NAN, b: 1.0 }).is_err());
    }

    #[test]
    fn substreams_are_deterministic_and_separated() {
        let root = RngStream::new(42);
        let a: Vec<u64> = {
            let mut r = root.substream("gem", 0).rng();
            (0..100).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = substream(&root, "gem", 0).rng();
            (0..100).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        let c: Vec<u64> = {
            let mut r = root.substream("sub", 0).rng();
            (0..100).map(|_| r.next_u64()).collect()
        };
        assert_ne!(a, c);
        assert_eq!(root.substream("gem", 3).describe(), "42/gem:3");
    }

    #[test]
    fn sibling_substreams_are_uncorrelated() {
        let root = RngStream::new(7);
        let mut r0 = root.substream("gem", 0).rng();
        let mut r1 = root.substream("gem", 1).rng();
        let n = 10_000;
        let xs: Vec<f64> = (0..n).map(|_| uniform_open(&mut r0)).collect();
        let ys: Vec<f64> = (0..n).map(|_| uniform_open(&mut r1)).collect();
        let mx = xs.iter().sum::<f64>() / n as f64;
        let my = ys.iter().sum::<f64>() / n as f64;
        let mut sxy = 0.0;
        let mut sxx = 0.0;
        let mut syy = 0.0;
        for (x, y) in xs.iter().zip(&ys) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx).powi(2);
            syy += (y - my).powi(2);
        }
        let rho = sxy / (sxx * syy).sqrt();
        assert!(rho.abs() < 0.05, "rho {rho}");
    }
}
