use serde::{Deserialize, Serialize};

use crate::analytics::{expected_homozygosity, homozygosity};
use crate::asymptotics::{
    beta_shift, contracted_rate, sigma2, small_scales, validate_scaling, ScalingKind, ScalingPlan,
};
use crate::error::{Error, Result};
use crate::experiments::exact::{check_mdp3, upper_tail_theory, v1_scaled};
use crate::experiments::table::{check_grid, check_replicas, sorted_grid, DeviationRow, DeviationTable};
use crate::parallel::{block_reduce, map_indexed};
use crate::sampler::{gem_sample, rank_descending, GemStop, Params, StickBreaker, MAX_STICKS};
use crate::special::{ln_gamma, QuadratureSpec, RngStream};
use crate::stats::{Estimate, Moments};

/// Smallest stick count `n` whose expected untracked homozygosity
/// `E[R_n^m]·E[H_m(PD(α, θ+nα))]` is at most `tol`, where `R_n` is the
/// residual stick mass.
pub fn gem_atoms_for_homozygosity(p: &Params, m: u32, tol: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let (a, t) = (p.alpha(), p.theta());
    let mut ln_moment = 0.0;
    for n in 0..=MAX_STICKS {
        if n > 0 {
            let b = t + n as f64 * a;
            for j in 0..m {
                ln_moment -= ((1.0 - a) / (b + j as f64)).ln_1p();
            }
        }
        let rest = Params::new(a, t + n as f64 * a)?;
        if ln_moment + expected_homozygosity(&rest, m)?.ln() <= tol.ln() {
            return Ok(n);
        }
    }
    Err(Error::domain(format!(
        "homozygosity tolerance {tol:e} needs more than {MAX_STICKS} sticks"
    )))
}

fn count_hits<F: Fn(&RngStream) -> bool + Sync>(
    replicas: usize,
    stream: &RngStream,
    label: &str,
    offset: u64,
    hit: F,
) -> u64 {
    block_reduce(
        replicas,
        || 0u64,
        |acc, i| {
            if hit(&stream.substream(label, offset + i as u64)) {
                *acc += 1;
            }
        },
        |a, b| *a += b,
    )
}

/// Whether some GEM atom reaches `t`, deciding as soon as the residual mass drops below it.
fn largest_atom_reaches(p: &Params, t: f64, s: &RngStream) -> bool {
    if t <= 0.0 {
        return true;
    }
    if t > 1.0 {
        return false;
    }
    let mut sb = StickBreaker::from_stream(p, s);
    while sb.remaining() >= t {
        let (_, x) = sb.next_stick();
        if x >= t {
            return true;
        }
    }
    false
}

/// Monte Carlo scan of `(a/θ)·ln P(a(P₁ - β/θ) ≥ x)`.
///
/// Row `r`, replica `i` uses `substream(stream, "mdp-p1", r·R + i)`.
/// The companion column holds the exact largest-jump value at the same point.
pub fn mdp_p1_scan(
    alpha: f64,
    plan: &ScalingPlan,
    x: f64,
    theta_grid: &[f64],
    replicas: usize,
    stream: &RngStream,
    q: &QuadratureSpec,
) -> Result<DeviationTable> {
    check_mdp3(plan)?;
    check_grid(theta_grid)?;
    check_replicas(replicas)?;
    let mut table = DeviationTable::new("mdp-p1", alpha);
    table.plan = Some(*plan);
    table.seed = Some(stream.master_seed());
    table.replicas = Some(replicas as u64);
    let theory = upper_tail_theory(x);
    for (r, t) in sorted_grid(theta_grid).into_iter().enumerate() {
        let p = Params::large_theta(alpha, t)?;
        let a = plan.a(t);
        let level = beta_shift(&p)? / t + x / a;
        let offset = (r * replicas) as u64;
        let hits = count_hits(replicas, stream, "mdp-p1", offset, |s| {
            largest_atom_reaches(&p, level, s)
        });
        let mut row = DeviationRow::counted(t, x, hits, replicas as u64, a / t, theory);
        row.companion = {
            let (lp, speed) = v1_scaled(&p, plan, x, q)?;
            speed * lp
        };
        table.rows.push(row);
    }
    Ok(table)
}

/// `θ^{m-1} Γ(1-α)/Γ(m-α)`, the normalization that sends `H_m` to one.
fn hm_normalizer(p: &Params, m: u32) -> f64 {
    let (a, t) = (p.alpha(), p.theta());
    ((m - 1) as f64 * t.ln() + ln_gamma(1.0 - a) - ln_gamma(m as f64 - a)).exp()
}

/// Expected truncation error in `H_m` for the CLT and MDP checks.
pub const HM_TOLERANCE: f64 = 1e-9;

fn hm_draw(p: &Params, m: u32, atoms: usize, s: &RngStream) -> f64 {
    let g = gem_sample(p, GemStop::Atoms(atoms), s).expect("stick count validated");
    homozygosity(&rank_descending(&g), m).expect("order validated").value
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub alpha: f64,
    pub m: u32,
    pub theta: f64,
    pub replicas: usize,
    /// Sticks per replica.
    pub atoms: usize,
    pub mean: Estimate,
    /// Sample variance with its jackknife standard error.
    pub variance: Estimate,
    pub target_variance: f64,
}

/// Moments of `W = √θ(θ^{m-1}Γ(1-α)/Γ(m-α)·H_m - 1)` over GEM replicas
/// `substream(stream, "clt-hm", i)`.
pub fn clt_hm_check(alpha: f64, m: u32, theta: f64, replicas: usize, stream: &RngStream) -> Result<CltReport> {
    if !(theta >= 50.0) {
        return Err(Error::domain(format!("the CLT check needs theta >= 50, got {theta}")));
    }
    check_replicas(replicas)?;
    let p = Params::large_theta(alpha, theta)?;
    let target_variance = sigma2(alpha, m)?;
    let atoms = gem_atoms_for_homozygosity(&p, m, HM_TOLERANCE)?;
    let norm = hm_normalizer(&p, m);
    let root = theta.sqrt();
    let w = map_indexed(replicas, |i| {
        root * (norm * hm_draw(&p, m, atoms, &stream.substream("clt-hm", i as u64)) - 1.0)
    });
    let mut mom = Moments::default();
    w.iter().for_each(|&v| mom.push(v));
    Ok(CltReport {
        alpha,
        m,
        theta,
        replicas,
        atoms,
        mean: mom.estimate(),
        variance: Estimate::new(mom.variance(), jackknife_variance_se(&w)),
        target_variance,
    })
}

/// Jackknife standard error of the unbiased sample variance.
fn jackknife_variance_se(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let centered: Vec<f64> = xs.iter().map(|x| x - mean).collect();
    let ss: f64 = centered.iter().map(|d| d * d).sum();
    // leave-one-out variance from the centered sums
    let loo: Vec<f64> = centered
        .iter()
        .map(|d| (ss - d * d * n / (n - 1.0)) / (n - 2.0))
        .collect();
    let loo_mean = loo.iter().sum::<f64>() / n;
    ((n - 1.0) / n * loo.iter().map(|v| (v - loo_mean).powi(2)).sum::<f64>()).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmMdpPoint {
    pub row: DeviationRow,
    pub atoms: usize,
    /// `scaled` lies within a factor of two of the theory value.
    pub within_factor_two: bool,
}

/// `(a²/θ)·ln P(a(θ)(θ^{m-1}Γ(1-α)/Γ(m-α)·H_m - 1) ≥ z)`, a slow-convergence
/// diagnostic; replicas use `substream(stream, "hm-mdp", i)`.
pub fn hm_mdp_point(
    alpha: f64,
    m: u32,
    plan: &ScalingPlan,
    z: f64,
    theta: f64,
    replicas: usize,
    stream: &RngStream,
) -> Result<HmMdpPoint> {
    if !matches!(plan.kind, ScalingKind::Mdp4 { .. }) {
        return Err(Error::domain("hm_mdp_point needs an Mdp4 scaling plan"));
    }
    validate_scaling(plan, m).into_result()?;
    check_replicas(replicas)?;
    let p = Params::large_theta(alpha, theta)?;
    let atoms = gem_atoms_for_homozygosity(&p, m, HM_TOLERANCE)?;
    let a = plan.a(theta);
    let norm = hm_normalizer(&p, m);
    let theory = if z > 0.0 { -contracted_rate(z, alpha, m)? } else { 0.0 };
    let hits = count_hits(replicas, stream, "hm-mdp", 0, |s| {
        a * (norm * hm_draw(&p, m, atoms, s) - 1.0) >= z
    });
    let row = DeviationRow::counted(theta, z, hits, replicas as u64, a * a / theta, theory);
    let within_factor_two = row.scaled.is_finite()
        && if theory == 0.0 {
            row.scaled.abs() < 0.05
        } else {
            let ratio = row.scaled / theory;
            (0.5..=2.0).contains(&ratio)
        };
    Ok(HmMdpPoint {
        row,
        atoms,
        within_factor_two,
    })
}

#[derive(Debug, Clone, Copy, Default)]
struct SmallCounts {
    below: u64,
    near_one: u64,
    two_atoms: u64,
}

pub const TWO_ATOM_DELTA: f64 = 1e-3;
pub const NEAR_ONE: f64 = 0.99;

/// Small-parameter staircase scan with `α = θ = a`: estimates
/// `b·ln P(P₁ < 1/k)` per grid value (sorted ascending by `a`).
///
/// Notes per row `r`: `p_near_one[r]` = P(P₁ > 0.99), `p_two_atoms[r]` =
/// P(p₁ + p₂ ≥ 1 - 10⁻³) and `two_atom_target[r]` = 1 - a^{1.5}.
/// Row `r`, replica `i` uses `substream(stream, "small-ldp", r·R + i)`.
pub fn small_param_scan(a_grid: &[f64], k: u32, replicas: usize, stream: &RngStream) -> Result<DeviationTable> {
    check_grid(a_grid)?;
    check_replicas(replicas)?;
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let level = 1.0 / k as f64;
    let mut table = DeviationTable::new("small-ldp", f64::NAN);
    table.seed = Some(stream.master_seed());
    table.replicas = Some(replicas as u64);
    for (r, a) in sorted_grid(a_grid).into_iter().enumerate() {
        let p = Params::new(a, a)?;
        let (_, b) = small_scales(a, a)?;
        let offset = (r * replicas) as u64;
        let counts = block_reduce(
            replicas,
            SmallCounts::default,
            |acc, i| {
                let s = stream.substream("small-ldp", offset + i as u64);
                let g = gem_sample(&p, GemStop::Resolved(2), &s).expect("resolved stop is valid");
                let ranked = rank_descending(&g);
                let p1 = ranked.largest();
                let p2 = ranked.weights.get(1).copied().unwrap_or(0.0);
                acc.below += u64::from(p1 < level);
                acc.near_one += u64::from(p1 > NEAR_ONE);
                acc.two_atoms += u64::from(p1 + p2 >= 1.0 - TWO_ATOM_DELTA);
            },
            |x, y| {
                x.below += y.below;
                x.near_one += y.near_one;
                x.two_atoms += y.two_atoms;
            },
        );
        let n = replicas as f64;
        let theory = if k == 1 { 0.0 } else { -(k as f64) };
        table.rows.push(DeviationRow::counted(
            a,
            level,
            counts.below,
            replicas as u64,
            b,
            theory,
        ));
        table
            .notes
            .push((format!("p_near_one[{r}]"), counts.near_one as f64 / n));
        table
            .notes
            .push((format!("p_two_atoms[{r}]"), counts.two_atoms as f64 / n));
        table.notes.push((format!("two_atom_target[{r}]"), 1.0 - a.powf(1.5)));
    }
    Ok(table)
}
