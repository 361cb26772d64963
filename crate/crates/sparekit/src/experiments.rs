//! Canonical experiment grids: the two-good comparison tables, the
//! misspecification test bed, and the policy-surface sweep.
//!
//! The two-good setting pairs an Erlang(3)-lifetime good (mean 1) with an
//! Erlang(6) good (mean 2) behind a shared shop with mu_r = 1. Good 1
//! carries C_u = 20, C_d = 40; good 2's costs vary per row; both pay
//! C_a = 0.25 per part, and capacity costs C_w = 0.5 per channel.

use crate::lifetime::LifetimeSpec;
use crate::multi::{Discipline, GoodSpec, MultiGoodConfig};
use crate::optimize::RobustnessInstance;
use crate::lifetime::MomentFitFamily;

/// Lifetime of comparison-table good 1: Erlang(3), mean 1.
pub const GOOD1_LIFETIME: LifetimeSpec = LifetimeSpec::Erlang { phases: 3, rate: 3.0 };
/// Lifetime of comparison-table good 2: Erlang(6), mean 2.
pub const GOOD2_LIFETIME: LifetimeSpec = LifetimeSpec::Erlang { phases: 6, rate: 3.0 };

/// Fixed costs of good 1 in the comparison tables.
pub const GOOD1_UNPLANNED: f64 = 20.0;
pub const GOOD1_DOWNTIME: f64 = 40.0;
pub const STOCK_COST: f64 = 0.25;
pub const CAPACITY_COST: f64 = 0.5;

/// One row of a two-good comparison table.
#[derive(Debug, Clone, Copy)]
pub struct TwoGoodRow {
    pub unplanned2: f64,
    pub downtime2: f64,
    pub threshold1: f64,
    pub threshold2: f64,
    pub stock1: u32,
    pub stock2: u32,
}

impl TwoGoodRow {
    /// Builds the full network configuration for this row.
    pub fn config(&self, channels: u32, discipline: Discipline) -> MultiGoodConfig {
        MultiGoodConfig {
            goods: vec![
                GoodSpec {
                    lifetime: GOOD1_LIFETIME,
                    threshold: self.threshold1,
                    stock: self.stock1,
                    unplanned_cost: GOOD1_UNPLANNED,
                    downtime_cost: GOOD1_DOWNTIME,
                    stock_cost: STOCK_COST,
                },
                GoodSpec {
                    lifetime: GOOD2_LIFETIME,
                    threshold: self.threshold2,
                    stock: self.stock2,
                    unplanned_cost: self.unplanned2,
                    downtime_cost: self.downtime2,
                    stock_cost: STOCK_COST,
                },
            ],
            channels,
            repair_rate: 1.0,
            capacity_cost: CAPACITY_COST,
            discipline,
        }
    }
}

const fn row(
    unplanned2: f64,
    downtime2: f64,
    threshold1: f64,
    threshold2: f64,
    stock1: u32,
    stock2: u32,
) -> TwoGoodRow {
    TwoGoodRow {
        unplanned2,
        downtime2,
        threshold1,
        threshold2,
        stock1,
        stock2,
    }
}

/// FCFS rows at K = 1.
pub const FCFS_K1_ROWS: [TwoGoodRow; 18] = [
    row(10.0, 20.0, 0.5, 0.5, 4, 1),
    row(10.0, 20.0, 1.0, 0.5, 6, 1),
    row(10.0, 20.0, 2.0, 0.5, 7, 1),
    row(10.0, 20.0, 0.5, 1.0, 1, 4),
    row(10.0, 20.0, 0.5, 2.0, 2, 6),
    row(10.0, 20.0, 1.0, 1.0, 4, 1),
    row(10.0, 20.0, 1.0, 2.0, 2, 5),
    row(10.0, 20.0, 2.0, 1.0, 4, 2),
    row(10.0, 20.0, 2.0, 2.0, 2, 5),
    row(20.0, 20.0, 0.5, 0.5, 4, 1),
    row(20.0, 20.0, 1.0, 0.5, 6, 1),
    row(20.0, 20.0, 2.0, 0.5, 7, 1),
    row(20.0, 20.0, 0.5, 1.0, 1, 4),
    row(20.0, 20.0, 0.5, 2.0, 2, 4),
    row(20.0, 20.0, 1.0, 1.0, 4, 1),
    row(20.0, 20.0, 1.0, 2.0, 3, 3),
    row(20.0, 20.0, 2.0, 1.0, 4, 2),
    row(20.0, 20.0, 2.0, 2.0, 3, 4),
];

/// FCFS rows at K = 5.
pub const FCFS_K5_ROWS: [TwoGoodRow; 18] = [
    row(10.0, 20.0, 0.5, 0.5, 7, 6),
    row(10.0, 20.0, 1.0, 0.5, 5, 5),
    row(10.0, 20.0, 2.0, 0.5, 4, 5),
    row(10.0, 20.0, 0.5, 1.0, 6, 4),
    row(10.0, 20.0, 0.5, 2.0, 6, 3),
    row(10.0, 20.0, 1.0, 1.0, 4, 4),
    row(10.0, 20.0, 1.0, 2.0, 4, 3),
    row(10.0, 20.0, 2.0, 1.0, 4, 4),
    row(10.0, 20.0, 2.0, 2.0, 4, 3),
    row(20.0, 20.0, 0.5, 0.5, 7, 6),
    row(20.0, 20.0, 1.0, 0.5, 5, 5),
    row(20.0, 20.0, 2.0, 0.5, 4, 5),
    row(20.0, 20.0, 0.5, 1.0, 6, 4),
    row(20.0, 20.0, 0.5, 2.0, 6, 3),
    row(20.0, 20.0, 1.0, 1.0, 4, 4),
    row(20.0, 20.0, 1.0, 2.0, 4, 3),
    row(20.0, 20.0, 2.0, 1.0, 4, 4),
    row(20.0, 20.0, 2.0, 2.0, 4, 3),
];

/// Preemptive-priority rows at K = 1 (good 1 has the high priority).
pub const PRIORITY_K1_ROWS: [TwoGoodRow; 18] = [
    row(10.0, 20.0, 0.5, 0.5, 3, 1),
    row(10.0, 20.0, 1.0, 0.5, 5, 1),
    row(10.0, 20.0, 2.0, 0.5, 7, 1),
    row(10.0, 20.0, 0.5, 1.0, 1, 3),
    row(10.0, 20.0, 0.5, 2.0, 1, 4),
    row(10.0, 20.0, 1.0, 1.0, 2, 2),
    row(10.0, 20.0, 1.0, 2.0, 1, 5),
    row(10.0, 20.0, 2.0, 1.0, 2, 3),
    row(10.0, 20.0, 2.0, 2.0, 1, 6),
    row(20.0, 20.0, 0.5, 0.5, 3, 1),
    row(20.0, 20.0, 1.0, 0.5, 5, 1),
    row(20.0, 20.0, 2.0, 0.5, 7, 1),
    row(20.0, 20.0, 0.5, 1.0, 1, 3),
    row(20.0, 20.0, 0.5, 2.0, 1, 4),
    row(20.0, 20.0, 1.0, 1.0, 2, 2),
    row(20.0, 20.0, 1.0, 2.0, 1, 5),
    row(20.0, 20.0, 2.0, 1.0, 2, 3),
    row(20.0, 20.0, 2.0, 2.0, 2, 4),
];

/// Default threshold grid for single-good policy searches.
pub const TAU_GRID: [f64; 8] = [0.25, 0.5, 1.0, 1.25, 1.5, 1.75, 2.0, f64::INFINITY];

/// Threshold grid for the priority-value comparison (its optima sit at
/// integer thresholds up to 5).
pub const PRIORITY_VALUE_TAU_GRID: [f64; 5] = [1.0, 2.0, 3.0, 4.0, 5.0];

/// Mean lifetime shared by every misspecification instance.
pub const BED_MEAN_LIFETIME: f64 = 2.0;

/// Misspecification test-bed axes.
pub const BED_DOWNTIME: [f64; 4] = [5.0, 10.0, 20.0, 40.0];
pub const BED_UNPLANNED: [f64; 4] = [1.0, 5.0, 10.0, 20.0];
pub const BED_CV: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const BED_REPAIR_TIME: [f64; 4] = [1.0, 2.0, 3.0, 4.0];
pub const BED_CHANNELS: [u32; 5] = [1, 2, 3, 4, 5];

/// Full misspecification bed: every axis combination, both true families.
pub fn robustness_bed_full() -> Vec<RobustnessInstance> {
    let mut out = Vec::new();
    for family in [MomentFitFamily::Gamma, MomentFitFamily::Weibull] {
        for &cd in &BED_DOWNTIME {
            for &cu in &BED_UNPLANNED {
                for &cv in &BED_CV {
                    for &l in &BED_REPAIR_TIME {
                        for &k in &BED_CHANNELS {
                            out.push(RobustnessInstance {
                                true_family: family,
                                cv,
                                unplanned_cost: cu,
                                downtime_cost: cd,
                                mean_repair_time: l,
                                channels: k,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// 320-instance desk-scale subsample, stratified across every axis:
/// 2 downtime x 2 unplanned x 5 cv x 2 repair-time x 4 channel values per
/// family.
pub fn robustness_bed_desk() -> Vec<RobustnessInstance> {
    let mut out = Vec::new();
    for family in [MomentFitFamily::Gamma, MomentFitFamily::Weibull] {
        for &cd in &[5.0, 40.0] {
            for &cu in &[1.0, 10.0] {
                for &cv in &[0.1, 0.2, 0.4, 0.6, 0.8] {
                    for &l in &[1.0, 4.0] {
                        for &k in &[1u32, 2, 3, 5] {
                            out.push(RobustnessInstance {
                                true_family: family,
                                cv,
                                unplanned_cost: cu,
                                downtime_cost: cd,
                                mean_repair_time: l,
                                channels: k,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Grid behind the cost-surface sweeps: tau in {0.25..2} x K in {1..5}.
pub fn figure_sweep_grid() -> Vec<(f64, u32)> {
    let taus = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0];
    let mut out = Vec::new();
    for &k in &[1u32, 2, 3, 4, 5] {
        for &t in &taus {
            out.push((t, k));
        }
    }
    out
}

/// Cost-parameter pairs of the priority-value comparison: (good-1 C_u, C_d,
/// good-2 C_u, C_d), good 1 prioritized and more downtime-critical.
pub const PRIORITY_VALUE_COSTS: [(f64, f64, f64, f64); 24] = [
    (1.0, 20.0, 1.0, 5.0),
    (1.0, 20.0, 5.0, 5.0),
    (1.0, 40.0, 1.0, 5.0),
    (1.0, 40.0, 5.0, 5.0),
    (5.0, 20.0, 5.0, 5.0),
    (5.0, 40.0, 1.0, 5.0),
    (5.0, 40.0, 5.0, 5.0),
    (1.0, 10.0, 20.0, 5.0),
    (1.0, 20.0, 10.0, 5.0),
    (1.0, 20.0, 20.0, 5.0),
    (1.0, 40.0, 10.0, 5.0),
    (1.0, 40.0, 1.0, 10.0),
    (1.0, 40.0, 20.0, 5.0),
    (1.0, 40.0, 5.0, 10.0),
    (5.0, 20.0, 10.0, 5.0),
    (5.0, 20.0, 20.0, 5.0),
    (5.0, 40.0, 10.0, 5.0),
    (5.0, 40.0, 20.0, 5.0),
    (5.0, 40.0, 5.0, 10.0),
    (1.0, 20.0, 20.0, 10.0),
    (1.0, 40.0, 10.0, 10.0),
    (1.0, 40.0, 20.0, 10.0),
    (5.0, 40.0, 10.0, 10.0),
    (5.0, 40.0, 20.0, 10.0),
];
