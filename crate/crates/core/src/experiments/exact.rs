use crate::analytics::log_sf_v1;
use crate::asymptotics::{beta_shift, rate_j1, validate_scaling, ScalingKind, ScalingPlan};
use crate::error::{Error, Result};
use crate::experiments::table::{check_grid, sorted_grid, DeviationRow, DeviationTable, RowStatus};
use crate::sampler::Params;
use crate::special::QuadratureSpec;

/// A scan that stopped on a numerical failure, with the rows completed so far.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialScan {
    pub table: DeviationTable,
    pub error: Error,
}

impl From<PartialScan> for Error {
    fn from(p: PartialScan) -> Self {
        p.error
    }
}

/// Limit of `(a/θ)·ln P(a(V₁(T) - β)/θ ≥ x)`: `-x` above the bulk, `0` below.
pub(crate) fn upper_tail_theory(x: f64) -> f64 {
    if x >= 0.0 {
        -rate_j1(x)
    } else {
        0.0
    }
}

/// `(a/θ)·ln P(V₁(T) ≥ θx/a + β)` from the closed-form law.
pub(crate) fn v1_scaled(p: &Params, plan: &ScalingPlan, x: f64, q: &QuadratureSpec) -> Result<(f64, f64)> {
    let t = p.theta();
    let a = plan.a(t);
    let s = t * x / a + beta_shift(p)?;
    let log_prob = if s <= 0.0 { 0.0 } else { log_sf_v1(p, s, q)? };
    Ok((log_prob, a / t))
}

pub(crate) fn check_mdp3(plan: &ScalingPlan) -> Result<()> {
    if !matches!(plan.kind, ScalingKind::Mdp3) {
        return Err(Error::domain("this scan needs an Mdp3 scaling plan"));
    }
    validate_scaling(plan, 2).into_result()
}

/// Exact scan of the largest-jump MDP over `theta_grid` (sorted ascending).
///
/// Rows with `x ≥ 0` and `θ ≥ 10³` whose distance to `-x` grows along the
/// grid are flagged [`RowStatus::NonMonotone`].
#[allow(clippy::result_large_err)]
pub fn mdp_v1_scan(
    alpha: f64,
    plan: &ScalingPlan,
    x: f64,
    theta_grid: &[f64],
    q: &QuadratureSpec,
) -> std::result::Result<DeviationTable, PartialScan> {
    let mut table = DeviationTable::new("mdp-v1", alpha);
    table.plan = Some(*plan);
    let fail = |table: DeviationTable, error: Error| PartialScan { table, error };
    if let Err(e) = check_mdp3(plan).and_then(|_| check_grid(theta_grid)) {
        return Err(fail(table, e));
    }
    let theory = upper_tail_theory(x);
    for t in sorted_grid(theta_grid) {
        let row = Params::large_theta(alpha, t).and_then(|p| v1_scaled(&p, plan, x, q));
        match row {
            Ok((log_prob, speed)) => table.rows.push(DeviationRow::exact(t, x, log_prob, speed, theory)),
            Err(e) => return Err(fail(table, e)),
        }
    }
    if x >= 0.0 {
        flag_non_monotone(&mut table.rows);
    }
    Ok(table)
}

fn flag_non_monotone(rows: &mut [DeviationRow]) {
    let mut prev: Option<f64> = None;
    for r in rows.iter_mut().filter(|r| r.driver >= 1e3) {
        let gap = (r.scaled - r.theory).abs();
        if let Some(p) = prev {
            if gap > p {
                r.status = RowStatus::NonMonotone;
            }
        }
        prev = Some(gap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: [f64; 4] = [1e3, 1e4, 1e5, 1e6];

    // mpmath, 50 digits: scaled values at α=0.3, a = √θ
    const X1: [f64; 4] = [
        -1.068_689_406_144_08,
        -1.031_888_905_653_74,
        -1.013_735_858_741_38,
        -1.005_580_954_276_17,
    ];
    const X2: [f64; 4] = [
        -2.094_231_331_088_28,
        -2.040_464_709_719_47,
        -2.016_527_643_665_31,
        -2.006_474_864_967_73,
    ];

    fn scan(x: f64) -> DeviationTable {
        mdp_v1_scan(0.3, &ScalingPlan::mdp3(0.5), x, &GRID, &QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn matches_high_precision_scan() {
        for (x, want) in [(1.0, X1), (2.0, X2)] {
            let t = scan(x);
            for (r, w) in t.rows.iter().zip(want) {
                assert!(((r.scaled - w) / w).abs() < 1e-8, "{} vs {w}", r.scaled);
                assert_eq!(r.status, RowStatus::Ok);
                assert_eq!(r.theory, -x);
            }
        }
    }

    #[test]
    fn limits_and_sign() {
        let t = scan(1.0);
        let last = t.rows.last().unwrap().scaled;
        assert!((-1.05..=-0.95).contains(&last));
        let t = scan(2.0);
        assert!(((t.rows[3].scaled + 2.0) / 2.0).abs() < 0.05);
        let below = scan(-0.5);
        let last = below.rows.last().unwrap();
        assert!((-0.01..=0.0).contains(&last.scaled));
        assert_eq!(last.theory, 0.0);
        for x in [-0.5, 0.0, 0.5, 3.0] {
            assert!(scan(x).rows.iter().all(|r| r.scaled <= 0.0));
        }
    }

    #[test]
    fn deterministic_and_sorted() {
        let q = QuadratureSpec::default();
        let plan = ScalingPlan::mdp3(0.5);
        let a = mdp_v1_scan(0.3, &plan, 1.0, &[1e5, 1e3, 1e4], &q).unwrap();
        let b = mdp_v1_scan(0.3, &plan, 1.0, &[1e5, 1e3, 1e4], &q).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        assert!(a.is_sorted_by_driver());
    }

    #[test]
    fn rejects_bad_inputs_with_partial_table() {
        let q = QuadratureSpec::default();
        let e = mdp_v1_scan(0.3, &ScalingPlan::mdp3(0.5), 1.0, &[2.0, 1e3], &q).unwrap_err();
        assert!(e.table.rows.is_empty());
        assert!(matches!(e.error, Error::Domain(_)));
        let e = mdp_v1_scan(
            0.3,
            &ScalingPlan::mdp3(0.5),
            1.0,
            &[1e3, 1e4],
            &QuadratureSpec::new(1e-10, 16).unwrap(),
        );
        if let Err(p) = e {
            assert!(p.error.is_numerical());
        }
        assert!(mdp_v1_scan(0.3, &ScalingPlan::mdp3(1.5), 1.0, &[1e3], &q).is_err());
        assert!(mdp_v1_scan(0.3, &ScalingPlan::mdp4(0.4, 0.1), 1.0, &[1e3], &q).is_err());
    }
}
