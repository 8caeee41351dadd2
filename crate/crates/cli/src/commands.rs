use std::path::PathBuf;

use pd2::analytics::{
    cdf_v1, estimate_g, homozygosity, joint_density, ln_joint_density, load_or_estimate_g, log_sf_v1,
};
use pd2::asymptotics::{lambda_star, line_minimum, rate_i, rate_j1, rate_s, rate_s1, rate_sn, sigma2, ScalingPlan};
use pd2::experiments::{
    clt_hm_check, consistency_suite, mdp_p1_scan, mdp_v1_scan, small_param_scan, DeviationTable, SamplerSettings,
};
use pd2::parallel::map_indexed;
use pd2::sampler::{
    gem_sample, importance_ensemble, rank_descending, sample_pd_subordinator, GemStop, SubordinatorDraw,
};
use pd2::{Params, PdSample, QuadratureSpec, RngStream};

use crate::args::{Command, Method, Suite, Which};
use crate::grid::{parse_grid, parse_points};
use crate::output::{float_text, Cell, Table};

const MAX_SUBDIVISIONS: usize = 2000;
const DKW_DELTA: f64 = 0.05;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(pd2::Error),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Core(e) if e.is_numerical() => 2,
            Failure::Core(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

impl From<pd2::Error> for Failure {
    fn from(e: pd2::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<String> for Failure {
    fn from(m: String) -> Self {
        Failure::Usage(m)
    }
}

/// A command result. A failure next to a table means the table is partial.
pub struct Outcome {
    pub table: Table,
    pub failure: Option<Failure>,
    /// Print the single value alone in columnar mode.
    pub scalar: bool,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self {
            table,
            failure: None,
            scalar: false,
        }
    }
}

type Res<T> = Result<T, Failure>;

fn quadrature(rel_tol: f64) -> Res<QuadratureSpec> {
    Ok(QuadratureSpec::new(rel_tol, MAX_SUBDIVISIONS)?)
}

pub fn execute(command: &Command, seed: Option<u64>) -> Res<Outcome> {
    let stream = seed.map(RngStream::new);
    let stream = || stream.clone().expect("seed checked by the caller");
    match command {
        Command::Sample {
            alpha,
            theta,
            method,
            n,
            tail_eps,
            jump_floor,
            stop_eps,
            top,
        } => sample(
            *alpha,
            *theta,
            *method,
            *n,
            *tail_eps,
            *jump_floor,
            *stop_eps,
            *top,
            &stream(),
        ),
        Command::CdfV1 {
            alpha,
            theta,
            s_grid,
            rel_tol,
        } => {
            let p = Params::large_theta(*alpha, *theta)?;
            let q = quadrature(*rel_tol)?;
            let mut t = Table::new(&["s", "cdf", "log_sf"]);
            for s in parse_grid(s_grid)? {
                t.push(vec![s.into(), cdf_v1(&p, s, &q)?.into(), log_sf_v1(&p, s, &q)?.into()]);
            }
            Ok(Outcome::ok(t))
        }
        Command::Density {
            alpha,
            theta,
            n_dim,
            points,
            g_cache_dir,
            g_samples,
        } => density(
            *alpha,
            *theta,
            *n_dim,
            points,
            g_cache_dir.clone(),
            *g_samples,
            &stream(),
        ),
        Command::Rates {
            which,
            x,
            y,
            p,
            alpha,
            m,
        } => rates(*which, x.as_deref(), *y, p.as_deref(), *alpha, *m),
        Command::MdpV1 {
            alpha,
            rho,
            x,
            theta_grid,
            rel_tol,
        } => {
            let grid = parse_grid(theta_grid)?;
            let q = quadrature(*rel_tol)?;
            Ok(match mdp_v1_scan(*alpha, &ScalingPlan::mdp3(*rho), *x, &grid, &q) {
                Ok(t) => Outcome::ok(deviation_table(&t)),
                Err(partial) => Outcome {
                    table: deviation_table(&partial.table),
                    failure: Some(Failure::Core(partial.error)),
                    scalar: false,
                },
            })
        }
        Command::MdpP1 {
            alpha,
            rho,
            x,
            theta_grid,
            reps,
            rel_tol,
        } => {
            let grid = parse_grid(theta_grid)?;
            let q = quadrature(*rel_tol)?;
            let t = mdp_p1_scan(*alpha, &ScalingPlan::mdp3(*rho), *x, &grid, *reps, &stream(), &q)?;
            Ok(Outcome::ok(deviation_table(&t)))
        }
        Command::CltHm { alpha, m, theta, reps } => {
            let r = clt_hm_check(*alpha, *m, *theta, *reps, &stream())?;
            let mut t = Table::new(&[
                "alpha",
                "m",
                "theta",
                "replicas",
                "atoms",
                "mean",
                "mean_se",
                "variance",
                "variance_se",
                "target_variance",
            ]);
            t.push(vec![
                r.alpha.into(),
                u64::from(r.m).into(),
                r.theta.into(),
                r.replicas.into(),
                r.atoms.into(),
                r.mean.value.into(),
                r.mean.std_error.into(),
                r.variance.value.into(),
                r.variance.std_error.into(),
                r.target_variance.into(),
            ]);
            Ok(Outcome::ok(t))
        }
        Command::SmallLdp { a_grid, k, reps } => {
            let grid = parse_grid(a_grid)?;
            let t = small_param_scan(&grid, *k, *reps, &stream())?;
            Ok(Outcome::ok(deviation_table(&t)))
        }
        Command::Check {
            suite,
            alpha,
            theta,
            m,
            reps,
        } => match suite {
            Suite::Consistency => consistency(*alpha, *theta, *reps, &stream()),
            Suite::Contraction => contraction(*alpha, *m),
            Suite::Invariants => invariants(*alpha, *theta, *reps, &stream()),
        },
    }
}

/// Ranked weights of one sample with the mass outside the listed rows.
fn push_sample(t: &mut Table, replica: usize, s: &PdSample, top: usize, total: f64, log_weight: f64) {
    let listed = &s.weights[..top.min(s.weights.len())];
    let rest = (1.0 - listed.iter().sum::<f64>()).max(0.0);
    for (rank, &w) in listed.iter().enumerate() {
        t.push(vec![
            replica.into(),
            (rank + 1).into(),
            w.into(),
            rest.into(),
            total.into(),
            log_weight.into(),
        ]);
    }
}

#[allow(clippy::too_many_arguments)]
fn sample(
    alpha: f64,
    theta: f64,
    method: Method,
    n: usize,
    tail_eps: f64,
    jump_floor: f64,
    stop_eps: f64,
    top: usize,
    stream: &RngStream,
) -> Res<Outcome> {
    if n == 0 || top == 0 {
        return Err(Failure::Usage("--n and --top must be at least 1".into()));
    }
    let p = Params::new(alpha, theta)?;
    let mut t = Table::new(&["replica", "rank", "weight", "rest", "total", "log_weight"]);
    let mut failure = None;
    match method {
        Method::Gem => {
            gem_sample(&p, GemStop::TailEps(tail_eps), &stream.substream("sample", 0))?;
            let draws = map_indexed(n, |i| {
                rank_descending(
                    &gem_sample(&p, GemStop::TailEps(tail_eps), &stream.substream("sample", i as u64))
                        .expect("validated"),
                )
            });
            for (i, s) in draws.iter().enumerate() {
                push_sample(&mut t, i, s, top, f64::NAN, 0.0);
            }
        }
        Method::Subordinator => {
            sample_pd_subordinator(&p, jump_floor, &stream.substream("sample", 0))?;
            let draws: Vec<SubordinatorDraw> = map_indexed(n, |i| {
                sample_pd_subordinator(&p, jump_floor, &stream.substream("sample", i as u64)).expect("validated")
            });
            for (i, d) in draws.iter().enumerate() {
                push_sample(&mut t, i, &d.normalized(), top, d.total, 0.0);
            }
        }
        Method::Importance => {
            let e = importance_ensemble(&p, n, stop_eps, stream)?;
            for (i, q) in e.particles.iter().enumerate() {
                push_sample(&mut t, i, &q.sample, top, q.tau, q.log_weight);
            }
            t.meta("ess", float_text(e.ess()));
            if let Some(w) = e.warning {
                failure = Some(Failure::Numerical(w));
            }
        }
    }
    Ok(Outcome {
        table: t,
        failure,
        scalar: false,
    })
}

fn default_cache_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| {
        std::env::var_os("PD2_CACHE_DIR")
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
}

fn density(
    alpha: f64,
    theta: f64,
    n_dim: usize,
    points: &str,
    cache: Option<PathBuf>,
    g_samples: usize,
    stream: &RngStream,
) -> Res<Outcome> {
    if n_dim == 0 || g_samples == 0 {
        return Err(Failure::Usage("--n-dim and --g-samples must be at least 1".into()));
    }
    let points = parse_points(points)?;
    if let Some(bad) = points.iter().find(|pt| pt.len() != n_dim) {
        return Err(Failure::Usage(format!(
            "point {bad:?} does not have {n_dim} coordinates"
        )));
    }
    let p = Params::large_theta(alpha, theta)?;
    let beta = theta + n_dim as f64 * alpha;
    let g_stream = stream.substream("density", 0);
    let g = match default_cache_dir(cache) {
        Some(dir) => load_or_estimate_g(&dir, alpha, beta, g_samples, &g_stream)?,
        None => estimate_g(alpha, beta, g_samples, &g_stream)?,
    };
    let mut columns: Vec<String> = (1..=n_dim).map(|i| format!("p{i}")).collect();
    columns.extend(["density".into(), "ln_density".into()]);
    let mut t = Table {
        columns,
        ..Table::default()
    };
    t.meta("g_beta", float_text(beta));
    t.meta("g_samples", g_samples);
    t.meta("g_dkw_bound", float_text(g.dkw_bound(DKW_DELTA)));
    for pt in &points {
        let mut row: Vec<Cell> = pt.iter().map(|&v| v.into()).collect();
        row.push(joint_density(&p, pt, &g)?.into());
        row.push(ln_joint_density(&p, pt, &g)?.into());
        t.push(row);
    }
    Ok(Outcome::ok(t))
}

fn require<T>(v: Option<T>, flag: &str, which: &str) -> Res<T> {
    v.ok_or_else(|| Failure::Usage(format!("--which {which} needs {flag}")))
}

fn scalar(raw: &str) -> Res<f64> {
    match parse_grid(raw)?.as_slice() {
        [v] => Ok(*v),
        _ => Err(Failure::Usage(format!("expected a single number, got {raw:?}"))),
    }
}

fn rates(
    which: Which,
    x: Option<&str>,
    y: Option<f64>,
    p: Option<&str>,
    alpha: Option<f64>,
    m: Option<u32>,
) -> Res<Outcome> {
    let name = which_name(which);
    let value = match which {
        Which::J1 => rate_j1(scalar(require(x, "--x", name)?)?),
        Which::I => rate_i(&parse_grid(require(x, "--x", name)?)?),
        Which::S1 => rate_s1(scalar(require(p, "--p", name)?)?),
        Which::S => rate_s(&parse_grid(require(p, "--p", name)?)?),
        Which::Sn => rate_sn(&parse_grid(require(p, "--p", name)?)?),
        Which::LambdaStar => lambda_star(
            scalar(require(x, "--x", name)?)?,
            require(y, "--y", name)?,
            require(alpha, "--alpha", name)?,
            require(m, "--m", name)?,
        )?,
        Which::Sigma2 => sigma2(require(alpha, "--alpha", name)?, require(m, "--m", name)?)?,
    };
    let mut t = Table::new(&["which", "value"]);
    t.push(vec![name.into(), value.into()]);
    Ok(Outcome {
        table: t,
        failure: None,
        scalar: true,
    })
}

fn which_name(w: Which) -> &'static str {
    match w {
        Which::J1 => "j1",
        Which::I => "i",
        Which::S1 => "s1",
        Which::S => "s",
        Which::Sn => "sn",
        Which::LambdaStar => "lambda-star",
        Which::Sigma2 => "sigma2",
    }
}

fn deviation_table(d: &DeviationTable) -> Table {
    let driver = if d.experiment == "small-ldp" { "a" } else { "theta" };
    let mut t = Table::new(&[
        driver,
        "threshold",
        "log_prob",
        "log_prob_se",
        "speed",
        "scaled",
        "scaled_se",
        "theory",
        "companion",
        "hits",
        "replicas",
        "status",
    ]);
    t.meta("experiment", &d.experiment);
    for r in &d.rows {
        t.push(vec![
            r.driver.into(),
            r.threshold.into(),
            r.log_prob.into(),
            r.log_prob_se.into(),
            r.speed.into(),
            r.scaled.into(),
            r.scaled_se.into(),
            r.theory.into(),
            r.companion.into(),
            r.hits.into(),
            r.replicas.into(),
            r.status.as_str().into(),
        ]);
    }
    for (k, v) in &d.notes {
        t.meta(&format!("note.{k}"), float_text(*v));
    }
    t
}

fn consistency(alpha: f64, theta: f64, reps: usize, stream: &RngStream) -> Res<Outcome> {
    let r = consistency_suite(alpha, theta, reps, stream, &SamplerSettings::default())?;
    let mut t = Table::new(&["check", "value", "target", "statistic", "passed"]);
    for e in &r.entries {
        t.push(vec![
            e.name.as_str().into(),
            e.value.into(),
            e.target.into(),
            e.statistic.into(),
            e.passed.into(),
        ]);
    }
    for (label, est) in [
        ("gem", &r.gem),
        ("subordinator", &r.subordinator),
        ("importance", &r.importance),
    ] {
        t.meta(
            &format!("{label}.h2"),
            format!("{} ± {}", float_text(est.h2.value), float_text(est.h2.std_error)),
        );
        t.meta(
            &format!("{label}.p1"),
            format!("{} ± {}", float_text(est.p1.value), float_text(est.p1.std_error)),
        );
    }
    t.meta("importance.ess", float_text(r.ess));
    Ok(Outcome::ok(t))
}

fn contraction(alpha: f64, m: u32) -> Res<Outcome> {
    let mut t = Table::new(&["z", "closed_form", "numeric", "abs_error", "argmin"]);
    for i in 0..21 {
        let z = -5.0 + 0.5 * i as f64;
        let l = line_minimum(z, alpha, m)?;
        t.push(vec![
            z.into(),
            l.closed_form.into(),
            l.numeric.into(),
            (l.numeric - l.closed_form).abs().into(),
            l.argmin.into(),
        ]);
    }
    Ok(Outcome::ok(t))
}

/// Structural checks on every draw of the three samplers.
fn invariants(alpha: f64, theta: f64, reps: usize, stream: &RngStream) -> Res<Outcome> {
    if reps == 0 {
        return Err(Failure::Usage("--reps must be at least 1".into()));
    }
    let p = Params::large_theta(alpha, theta)?;
    let settings = SamplerSettings::default();
    let violations = |s: &PdSample| -> bool {
        let h: Vec<f64> = (2..=4)
            .map(|m| homozygosity(s, m).expect("order is valid").value)
            .collect();
        !(s.is_descending()
            && (s.total_mass() - 1.0).abs() <= 1e-9
            && h[0] > 0.0
            && h[0] <= 1.0
            && h.windows(2).all(|w| w[1] <= w[0]))
    };
    let count = |f: &(dyn Fn(usize) -> PdSample + Sync)| {
        map_indexed(reps, |i| violations(&f(i))).iter().filter(|&&v| v).count()
    };
    let gem = count(&|i| {
        rank_descending(
            &gem_sample(&p, GemStop::Resolved(3), &stream.substream("invariants-gem", i as u64)).expect("valid stop"),
        )
    });
    let sub = count(&|i| {
        sample_pd_subordinator(&p, settings.jump_floor, &stream.substream("invariants-sub", i as u64))
            .expect("validated")
            .normalized()
    });
    let imp = count(&|i| {
        pd2::sampler::importance_particle(&p, settings.stop_eps, &stream.substream("invariants-imp", i as u64))
            .expect("validated")
            .sample
    });
    let mut t = Table::new(&["sampler", "replicas", "violations", "passed"]);
    for (name, v) in [("gem", gem), ("subordinator", sub), ("importance", imp)] {
        t.push(vec![name.into(), reps.into(), v.into(), (v == 0).into()]);
    }
    Ok(Outcome::ok(t))
}
