use crate::error::{Error, Result};

/// Absolute tolerance for deciding `Σ p = 1` on the simplex face.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// `J₁(x) = x` for `x ≥ 0`, `∞` otherwise.
pub fn rate_j1(x: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        f64::INFINITY
    }
}

/// `Σ x_i` when `0 ≤ x_n ≤ … ≤ x₁`, `∞` otherwise.
pub fn rate_i(xs: &[f64]) -> f64 {
    let ordered = xs.windows(2).all(|w| w[0] >= w[1]);
    let nonnegative = xs.last().is_none_or(|&x| x >= 0.0);
    if ordered && nonnegative {
        xs.iter().sum()
    } else {
        f64::INFINITY
    }
}

/// Staircase: `S₁(1) = 0`, `S₁(p) = k` on `[1/(k+1), 1/k)`, `S₁(0) = ∞`.
pub fn rate_s1(p: f64) -> f64 {
    if !(p > 0.0) || p > 1.0 {
        return f64::INFINITY;
    }
    if p == 1.0 {
        return 0.0;
    }
    let mut k = (1.0 / p).floor().max(1.0);
    while p < 1.0 / (k + 1.0) {
        k += 1.0;
    }
    while k > 1.0 && p >= 1.0 / k {
        k -= 1.0;
    }
    k
}

fn is_nonincreasing_nonnegative(p: &[f64]) -> bool {
    p.windows(2).all(|w| w[0] >= w[1]) && p.iter().all(|&x| x >= 0.0)
}

/// `S(p) = n - 1` for a probability vector with exactly `n` positive entries.
///
/// A finite vector summing to less than one stands for a point outside
/// `∇_∞` and gets `∞`.
pub fn rate_s(p: &[f64]) -> f64 {
    if !is_nonincreasing_nonnegative(p) {
        return f64::INFINITY;
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() <= SIMPLEX_TOL {
        let n = p.iter().filter(|&&x| x > 0.0).count();
        (n - 1) as f64
    } else {
        f64::INFINITY
    }
}

/// Finite-dimensional rate `S_n` of the ranked `(p₁,…,p_n)`.
pub fn rate_sn(p: &[f64]) -> f64 {
    if p.is_empty() || !is_nonincreasing_nonnegative(p) {
        return f64::INFINITY;
    }
    let n = p.len();
    let sum: f64 = p.iter().sum();
    if (p[0] - 1.0).abs() <= SIMPLEX_TOL && p[1..].iter().all(|&x| x == 0.0) {
        return 0.0;
    }
    if (sum - 1.0).abs() <= SIMPLEX_TOL {
        let l = p.iter().filter(|&&x| x > 0.0).count();
        return (l - 1) as f64;
    }
    let last = p[n - 1];
    if sum < 1.0 && last > 0.0 {
        let ratio = (last / (1.0 - sum)).min(1.0);
        return n as f64 + rate_s1(snap_to_reciprocal(ratio));
    }
    f64::INFINITY
}

/// Rounds `r` onto `1/k` when it is within the simplex tolerance of it,
/// so staircase jumps are not decided by the last bit of `1 - Σp`.
fn snap_to_reciprocal(r: f64) -> f64 {
    let k = (1.0 / r).round();
    if k >= 1.0 && (r - 1.0 / k).abs() <= SIMPLEX_TOL {
        1.0 / k
    } else {
        r
    }
}

/// Speeds `a = α ∨ |θ|` and `b = -1/ln a` of the small-parameter limit.
pub fn small_scales(alpha: f64, theta: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    if !(theta > -alpha) {
        return Err(Error::domain(format!("theta must exceed -alpha, got {theta}")));
    }
    let a = alpha.max(theta.abs());
    if a >= 1.0 {
        return Err(Error::domain(format!("a(alpha, theta) = {a} must be below 1")));
    }
    Ok((a, -1.0 / a.ln()))
}
