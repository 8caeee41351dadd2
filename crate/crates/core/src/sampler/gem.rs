use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{Params, PdSample};
use crate::special::{beta_pair, ln_gamma, RngStream, StreamRng};

/// Hard ceiling on the number of sticks any stop rule may request.
pub const MAX_STICKS: usize = 50_000_000;

const DIRECT_PRODUCT_LIMIT: u64 = 100_000;

/// When to stop breaking sticks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GemStop {
    /// Exactly `n` sticks.
    Atoms(usize),
    /// The smallest `n` with `gem_tail_bound(α, θ, n) ≤ ε`.
    TailEps(f64),
    /// Stop once the realized residual mass is no larger than the `k`-th
    /// largest atom drawn so far, so the top `k` ranked weights are exact.
    Resolved(usize),
    /// At least `atoms` sticks, then continue until the top `k` are resolved.
    AtLeast { atoms: usize, k: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GemSample {
    pub sticks: Vec<f64>,
    pub weights: Vec<f64>,
    pub tail: f64,
}

/// `E[(1-U₁)···(1-U_n)] = Π_{i=1}^n (θ+iα)/(θ+iα+1-α)`.
pub fn gem_tail_bound(alpha: f64, theta: f64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if n <= DIRECT_PRODUCT_LIMIT {
        let mut acc = 0.0;
        for i in 1..=n {
            acc -= ((1.0 - alpha) / (theta + i as f64 * alpha)).ln_1p();
        }
        return acc.exp();
    }
    let a = theta / alpha;
    let b = (theta + 1.0) / alpha;
    let nf = n as f64;
    (ln_gamma(a + nf + 1.0) - ln_gamma(a + 1.0) + ln_gamma(b) - ln_gamma(b + nf))
        .exp()
        .min(1.0)
}

/// Smallest `n` with `gem_tail_bound(α, θ, n) ≤ eps`.
pub fn gem_atoms_for_tail(p: &Params, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps <= 0.1) {
        return Err(Error::domain(format!("tail threshold must lie in (0, 0.1], got {eps}")));
    }
    let (a, t) = (p.alpha(), p.theta());
    let cap = MAX_STICKS as u64;
    if gem_tail_bound(a, t, cap) > eps {
        return Err(Error::domain(format!(
            "tail threshold {eps:e} at alpha={a}, theta={t} needs more than {cap} sticks"
        )));
    }
    let (mut lo, mut hi) = (0u64, 1u64);
    while gem_tail_bound(a, t, hi) > eps {
        lo = hi;
        hi = (hi * 2).min(cap);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if gem_tail_bound(a, t, mid) > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi as usize)
}

/// Lazily generated sticks `U_k ~ Beta(1-α, θ+kα)` and weights `X_k`.
pub struct StickBreaker<R> {
    rng: R,
    alpha: f64,
    theta: f64,
    k: u64,
    remaining: f64,
}

impl<R: Rng> StickBreaker<R> {
    pub fn new(p: &Params, rng: R) -> Self {
        Self {
            rng,
            alpha: p.alpha(),
            theta: p.theta(),
            k: 0,
            remaining: 1.0,
        }
    }

    /// Residual mass `Π_{j≤k}(1-U_j)` after the sticks drawn so far.
    pub fn remaining(&self) -> f64 {
        self.remaining
    }

    pub fn count(&self) -> u64 {
        self.k
    }

    /// Draws the next stick and returns `(U_k, X_k)`.
    pub fn next_stick(&mut self) -> (f64, f64) {
        self.k += 1;
        let b = self.theta + self.k as f64 * self.alpha;
        let (u, one_minus_u) = beta_pair(&mut self.rng, 1.0 - self.alpha, b);
        let x = self.remaining * u;
        self.remaining *= one_minus_u;
        (u, x)
    }
}

impl StickBreaker<StreamRng> {
    pub fn from_stream(p: &Params, stream: &RngStream) -> Self {
        Self::new(p, stream.rng())
    }
}

pub fn gem_sample(p: &Params, stop: GemStop, stream: &RngStream) -> Result<GemSample> {
    gem_sample_with(p, stop, &mut stream.rng())
}

pub(crate) fn gem_sample_with<R: Rng>(p: &Params, stop: GemStop, rng: &mut R) -> Result<GemSample> {
    let mut sb = StickBreaker::new(p, rng);
    let mut sticks = Vec::new();
    let mut weights = Vec::new();
    match stop {
        GemStop::Atoms(n) => {
            if n > MAX_STICKS {
                return Err(Error::domain(format!("at most {MAX_STICKS} sticks, got {n}")));
            }
            sticks.reserve(n);
            weights.reserve(n);
            for _ in 0..n {
                let (u, x) = sb.next_stick();
                sticks.push(u);
                weights.push(x);
            }
        }
        GemStop::TailEps(eps) => {
            let n = gem_atoms_for_tail(p, eps)?;
            sticks.reserve(n);
            weights.reserve(n);
            for _ in 0..n {
                let (u, x) = sb.next_stick();
                sticks.push(u);
                weights.push(x);
            }
        }
        GemStop::Resolved(k) => resolve(&mut sb, &mut sticks, &mut weights, 0, k)?,
        GemStop::AtLeast { atoms, k } => resolve(&mut sb, &mut sticks, &mut weights, atoms, k)?,
    }
    Ok(GemSample {
        sticks,
        weights,
        tail: sb.remaining(),
    })
}

fn resolve<R: Rng>(
    sb: &mut StickBreaker<R>,
    sticks: &mut Vec<f64>,
    weights: &mut Vec<f64>,
    min_atoms: usize,
    k: usize,
) -> Result<()> {
    if k == 0 {
        return Err(Error::domain("resolved stop needs k >= 1"));
    }
    if min_atoms > MAX_STICKS {
        return Err(Error::domain(format!("at most {MAX_STICKS} sticks, got {min_atoms}")));
    }
    sticks.reserve(min_atoms);
    weights.reserve(min_atoms);
    // the k largest weights so far, descending
    let mut top: Vec<f64> = Vec::with_capacity(k + 1);
    loop {
        let (u, x) = sb.next_stick();
        sticks.push(u);
        weights.push(x);
        let pos = top.partition_point(|&w| w >= x);
        if pos < k {
            top.insert(pos, x);
            top.truncate(k);
        }
        let resolved = top.len() == k && sb.remaining() <= top[k - 1];
        if (resolved && sticks.len() >= min_atoms) || sticks.len() >= MAX_STICKS {
            return Ok(());
        }
    }
}

/// Stable descending sort of the GEM weights.
pub fn rank_descending(g: &GemSample) -> PdSample {
    let mut weights = g.weights.clone();
    weights.sort_by(|a, b| b.total_cmp(a));
    PdSample { weights, tail: g.tail }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Moments;
    use proptest::prelude::*;

    #[test]
    fn tail_bound_values() {
        assert_eq!(gem_tail_bound(0.5, 0.5, 0), 1.0);
        assert!((gem_tail_bound(0.5, 0.5, 1) - 2.0 / 3.0).abs() < 1e-15);
        let limit = gem_tail_bound(1e-8, 1.0, 10);
        assert!((limit - 2f64.powi(-10)).abs() < 1e-6);
    }

    #[test]
    fn tail_bound_branches_agree() {
        for &(a, t) in &[(0.3, 1.0), (0.5, -0.2), (0.7, 50.0), (0.1, 1e4)] {
            let n = DIRECT_PRODUCT_LIMIT + 1;
            let direct = {
                let mut acc = 0.0;
                for i in 1..=n {
                    acc -= ((1.0 - a) / (t + i as f64 * a)).ln_1p();
                }
                acc.exp()
            };
            let closed = gem_tail_bound(a, t, n);
            assert!(
                ((closed - direct) / direct).abs() < 1e-8,
                "{a} {t}: {closed} vs {direct}"
            );
        }
    }

    #[test]
    fn atom_count_is_minimal() {
        let p = Params::new(0.3, 2.0).unwrap();
        let n = gem_atoms_for_tail(&p, 1e-6).unwrap() as u64;
        assert!(gem_tail_bound(0.3, 2.0, n) <= 1e-6);
        assert!(gem_tail_bound(0.3, 2.0, n - 1) > 1e-6);
        assert!(gem_atoms_for_tail(&p, 0.0).is_err());
        assert!(gem_atoms_for_tail(&p, 0.2).is_err());
        assert!(gem_atoms_for_tail(&Params::new(0.9, 0.1).unwrap(), 1e-6).is_err());
    }

    #[test]
    fn first_weight_mean() {
        let p = Params::new(0.5, 0.5).unwrap();
        let root = RngStream::new(11);
        let mut m = Moments::default();
        for i in 0..100_000 {
            let g = gem_sample(&p, GemStop::Atoms(1), &root.substream("gem", i)).unwrap();
            m.push(g.weights[0]);
        }
        assert!(m.estimate().z_to(1.0 / 3.0).abs() < 3.0);
    }

    #[test]
    fn replay_is_identical() {
        let p = Params::new(0.4, 1.5).unwrap();
        let s = RngStream::new(5).substream("gem", 0);
        let a = gem_sample(&p, GemStop::TailEps(1e-4), &s).unwrap();
        let b = gem_sample(&p, GemStop::TailEps(1e-4), &s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn resolved_stop_fixes_leading_atoms() {
        let p = Params::new(0.3, 1.0).unwrap();
        for i in 0..200 {
            let s = RngStream::new(9).substream("gem", i);
            let g = gem_sample(&p, GemStop::Resolved(2), &s).unwrap();
            let r = rank_descending(&g);
            assert!(g.tail <= r.weights[1]);
            let longer = gem_sample(&p, GemStop::Atoms(g.weights.len() + 500), &s).unwrap();
            let rl = rank_descending(&longer);
            assert_eq!(r.weights[0], rl.weights[0]);
            assert_eq!(r.weights[1], rl.weights[1]);
        }
    }

    #[test]
    fn ranking_examples() {
        let g = GemSample {
            sticks: vec![0.2, 0.625, 0.5],
            weights: vec![0.2, 0.5, 0.1],
            tail: 0.2,
        };
        let r = rank_descending(&g);
        assert_eq!(r.weights, vec![0.5, 0.2, 0.1]);
        assert_eq!(r.tail, 0.2);
        let again = rank_descending(&GemSample {
            weights: r.weights.clone(),
            ..g
        });
        assert_eq!(again, r);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn gem_identities(alpha in 0.05f64..0.95, theta_off in 0.01f64..20.0, n in 1usize..400, seed: u64) {
            let p = Params::new(alpha, theta_off - alpha).unwrap();
            let g = gem_sample(&p, GemStop::Atoms(n), &RngStream::new(seed)).unwrap();
            // Beta(1-α, θ+α) with θ+α near zero rounds to 1 in f64
            let mut rem = 1.0;
            for (u, x) in g.sticks.iter().zip(&g.weights) {
                prop_assert!(*u > 0.0 && *u <= 1.0);
                prop_assert!((x - rem * u).abs() <= 1e-14);
                rem *= 1.0 - u;
            }
            prop_assert!((g.tail - rem).abs() <= 1e-12);
            prop_assert!(g.tail >= 0.0 && g.tail < 1.0);
            let total: f64 = g.weights.iter().sum::<f64>() + g.tail;
            prop_assert!((total - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn ranking_is_a_sorted_permutation(ws in proptest::collection::vec(0.0f64..1.0, 0..50)) {
            let g = GemSample { sticks: ws.clone(), weights: ws.clone(), tail: 0.0 };
            let r = rank_descending(&g);
            prop_assert!(r.is_descending());
            let mut a = ws.clone();
            let mut b = r.weights.clone();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            prop_assert_eq!(a, b);
            if let Some(m) = ws.iter().cloned().reduce(f64::max) {
                prop_assert_eq!(r.weights[0], m);
            }
        }
    }
}
