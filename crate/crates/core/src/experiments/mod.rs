//! Desk-scale numerical checks of the limit theorems: exact largest-jump
//! MDP scans, Monte Carlo deviation scans, the homozygosity CLT and the
//! cross-sampler consistency suite.
//!
//! Every Monte Carlo quantity is a sum of counts or an in-order merge of
//! fixed blocks, so results are bit-identical for any worker count.

mod consistency;
mod exact;
mod monte_carlo;
mod table;

pub use consistency::{consistency_suite, CheckEntry, ConsistencyReport, SamplerEstimates, SamplerSettings};
pub use exact::{mdp_v1_scan, PartialScan};
pub use monte_carlo::{
    clt_hm_check, gem_atoms_for_homozygosity, hm_mdp_point, mdp_p1_scan, small_param_scan, CltReport, HmMdpPoint,
    HM_TOLERANCE, NEAR_ONE, TWO_ATOM_DELTA,
};
pub use table::{DeviationRow, DeviationTable, ExperimentConfig, RowStatus, MIN_HITS, MIN_REPLICAS};
