//! Policy search over stock level, repair capacity, and age threshold.
//!
//! The stock search ascends S from 0 and stops once the monotone part of the
//! objective, C_u mu (1 - P(0)) F(tau) + C_a S + C_w K, exceeds the incumbent
//! total: the throughput term is nondecreasing in S (output rates of the
//! closed cycle grow with population) and the stock term diverges, so no
//! larger S can win. The capacity search wraps it, using the ample-capacity
//! relaxation as its floor: P(0 | S, K) >= P(0 | S, ample) for every K, so
//! min_S TC_ample(S) + C_w (K+1) bounds every policy with more channels.
//! The threshold is searched on a grid.

use crate::error::{Error, Result};
use crate::lifetime::{from_mean_cv, InstallationTime, LifetimeSpec, MomentFitFamily};
use crate::single::{steady_state_for_rates, CostRates};
use crate::transform::ServiceTransform;
use rayon::prelude::*;

/// Hard cap on the stock ascent.
pub const STOCK_CAP: u32 = 200;
/// Hard cap on the capacity ascent.
pub const CAPACITY_CAP: u32 = 50;

/// One evaluated policy point.
#[derive(Debug, Clone, Copy)]
pub struct TraceEntry {
    pub stock: u32,
    pub channels: u32,
    pub threshold: f64,
    pub cost: f64,
    pub p_down: f64,
    /// Value of the monotone stopping bound at this point.
    pub bound: f64,
}

/// Outcome of a policy search.
#[derive(Debug, Clone)]
pub struct PolicySearchResult {
    pub stock: u32,
    pub channels: u32,
    pub threshold: f64,
    pub total_cost: f64,
    pub trace: Vec<TraceEntry>,
}

struct Objective<'a> {
    svc: ServiceTransform<'a>,
    corrective: f64,
    install_rate: f64,
    repair_rate: f64,
    costs: CostRates,
}

impl<'a> Objective<'a> {
    fn new(inst: &'a InstallationTime, repair_rate: f64, costs: CostRates) -> Result<Self> {
        let corrective = inst.corrective_probability()?;
        let install_rate = 1.0 / inst.mean()?;
        Ok(Self {
            svc: ServiceTransform::new(inst),
            corrective,
            install_rate,
            repair_rate,
            costs,
        })
    }

    /// Evaluates (total cost, p_down, bound) at one (S, K); `ample` replaces
    /// the capacity constraint with S parallel channels.
    fn evaluate(&self, stock: u32, channels: u32, ample: bool) -> Result<(f64, f64, f64)> {
        let eff = if ample { stock.max(1) } else { channels };
        let rates: Vec<f64> = (0..stock)
            .map(|n| self.repair_rate * (stock - n).min(eff) as f64)
            .collect();
        let st = steady_state_for_rates(&self.svc, &rates)?;
        let unplanned = self.costs.unplanned * self.install_rate * (1.0 - st.p_down()) * self.corrective;
        let monotone = unplanned
            + self.costs.stock * stock as f64
            + if ample {
                0.0
            } else {
                self.costs.capacity * channels as f64
            };
        let total = monotone + self.costs.downtime * st.p_down();
        Ok((total, st.p_down(), monotone))
    }
}

fn stock_ascent(
    obj: &Objective<'_>,
    channels: u32,
    threshold: f64,
    ample: bool,
    trace: &mut Vec<TraceEntry>,
) -> Result<(u32, f64)> {
    let mut best: Option<(u32, f64)> = None;
    for s in 0..=STOCK_CAP {
        let (total, p_down, bound) = obj.evaluate(s, channels, ample)?;
        trace.push(TraceEntry {
            stock: s,
            channels,
            threshold,
            cost: total,
            p_down,
            bound,
        });
        if best.map_or(true, |(_, b)| total < b) {
            best = Some((s, total));
        }
        let incumbent = best.unwrap().1;
        if bound > incumbent {
            return Ok(best.unwrap());
        }
    }
    Err(Error::SearchDiverged {
        variable: "stock",
        cap: STOCK_CAP,
    })
}

/// Optimal stock level for fixed capacity and threshold (with its search
/// trace). Equals exhaustive minimization of the cost rate over S.
pub fn optimize_stock(
    channels: u32,
    threshold: f64,
    lifetime: LifetimeSpec,
    repair_rate: f64,
    costs: &CostRates,
) -> Result<(u32, f64, Vec<TraceEntry>)> {
    if channels == 0 {
        return Err(Error::invalid("channels", "need at least one repair channel"));
    }
    costs.validate()?;
    let inst = InstallationTime::with_age(lifetime, threshold)?;
    let obj = Objective::new(&inst, repair_rate, *costs)?;
    let mut trace = Vec::new();
    let (s, tc) = stock_ascent(&obj, channels, threshold, false, &mut trace)?;
    Ok((s, tc, trace))
}

/// Joint optimal stock level and capacity for a fixed threshold.
pub fn optimize_stock_capacity(
    threshold: f64,
    lifetime: LifetimeSpec,
    repair_rate: f64,
    costs: &CostRates,
) -> Result<PolicySearchResult> {
    costs.validate()?;
    let inst = InstallationTime::with_age(lifetime, threshold)?;
    let obj = Objective::new(&inst, repair_rate, *costs)?;
    let mut trace = Vec::new();

    // ample-capacity floor for the capacity stopping rule
    let mut floor_trace = Vec::new();
    let (_, ample_floor) = stock_ascent(&obj, 0, threshold, true, &mut floor_trace)?;

    let mut best: Option<(u32, u32, f64)> = None;
    for k in 1..=CAPACITY_CAP {
        let (s, tc) = stock_ascent(&obj, k, threshold, false, &mut trace)?;
        if best.map_or(true, |(_, _, b)| tc < b) {
            best = Some((s, k, tc));
        }
        let incumbent = best.unwrap().2;
        if ample_floor + obj.costs.capacity * (k + 1) as f64 > incumbent {
            let (stock, channels, total_cost) = best.unwrap();
            return Ok(PolicySearchResult {
                stock,
                channels,
                threshold,
                total_cost,
                trace,
            });
        }
    }
    Err(Error::SearchDiverged {
        variable: "capacity",
        cap: CAPACITY_CAP,
    })
}

/// Best (S, K, tau) over a threshold grid; ties break toward smaller tau,
/// then smaller S, then smaller K.
pub fn optimize_policy(
    tau_grid: &[f64],
    lifetime: LifetimeSpec,
    repair_rate: f64,
    costs: &CostRates,
) -> Result<PolicySearchResult> {
    let grid = validate_grid(tau_grid)?;
    let mut best: Option<PolicySearchResult> = None;
    let mut trace = Vec::new();
    for &tau in &grid {
        let mut r = optimize_stock_capacity(tau, lifetime, repair_rate, costs)?;
        trace.append(&mut r.trace);
        let replace = match &best {
            None => true,
            Some(b) => {
                r.total_cost < b.total_cost
                    || (r.total_cost == b.total_cost
                        && (r.threshold, r.stock, r.channels) < (b.threshold, b.stock, b.channels))
            }
        };
        if replace {
            best = Some(r);
        }
    }
    let mut out = best.unwrap();
    out.trace = trace;
    Ok(out)
}

/// Best (S, tau) at fixed capacity over a threshold grid; the search the
/// misspecification experiment runs per instance.
pub fn optimize_stock_threshold(
    channels: u32,
    tau_grid: &[f64],
    lifetime: LifetimeSpec,
    repair_rate: f64,
    costs: &CostRates,
) -> Result<PolicySearchResult> {
    let grid = validate_grid(tau_grid)?;
    let mut best: Option<PolicySearchResult> = None;
    let mut trace = Vec::new();
    for &tau in &grid {
        let (s, tc, mut t) = optimize_stock(channels, tau, lifetime, repair_rate, costs)?;
        trace.append(&mut t);
        let replace = match &best {
            None => true,
            Some(b) => {
                tc < b.total_cost
                    || (tc == b.total_cost && (tau, s) < (b.threshold, b.stock))
            }
        };
        if replace {
            best = Some(PolicySearchResult {
                stock: s,
                channels,
                threshold: tau,
                total_cost: tc,
                trace: Vec::new(),
            });
        }
    }
    let mut out = best.unwrap();
    out.trace = trace;
    Ok(out)
}

fn validate_grid(tau_grid: &[f64]) -> Result<Vec<f64>> {
    if tau_grid.is_empty() {
        return Err(Error::invalid("tau_grid", "grid must be nonempty"));
    }
    let mut grid = tau_grid.to_vec();
    for &t in &grid {
        if !(t > 0.0) {
            return Err(Error::invalid("tau_grid", format!("entry {t} must be > 0")));
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

/// One cell of the misspecification test bed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessInstance {
    /// The family generating reality; the decision-maker assumes the other.
    pub true_family: MomentFitFamily,
    pub cv: f64,
    pub unplanned_cost: f64,
    pub downtime_cost: f64,
    /// Mean repair time 1/mu_r.
    pub mean_repair_time: f64,
    pub channels: u32,
}

/// Result of one misspecification instance.
#[derive(Debug, Clone, Copy)]
pub struct RobustnessOutcome {
    pub instance: RobustnessInstance,
    /// Policy optimized under the assumed (wrong) lifetime.
    pub assumed_stock: u32,
    pub assumed_threshold: f64,
    /// Policy optimized under the true lifetime.
    pub optimal_stock: u32,
    pub optimal_threshold: f64,
    /// Cost of the assumed policy evaluated under the true lifetime.
    pub implemented_cost: f64,
    /// True optimal cost.
    pub optimal_cost: f64,
    /// 100 (implemented - optimal) / optimal; nonnegative by construction.
    pub pct_penalty: f64,
}

/// Misspecification experiment: optimize each instance under the assumed
/// family, price that policy under the true family, and compare with the
/// true optimum. Instances are independent and evaluated in parallel;
/// outcomes are returned in input order.
pub fn robustness_experiment(
    instances: &[RobustnessInstance],
    mean_lifetime: f64,
    tau_grid: &[f64],
    stock_cost: f64,
    capacity_cost: f64,
) -> Result<Vec<RobustnessOutcome>> {
    instances
        .par_iter()
        .map(|inst| {
            let assumed_family = match inst.true_family {
                MomentFitFamily::Gamma => MomentFitFamily::Weibull,
                MomentFitFamily::Weibull => MomentFitFamily::Gamma,
            };
            let true_spec = from_mean_cv(inst.true_family, mean_lifetime, inst.cv)?;
            let assumed_spec = from_mean_cv(assumed_family, mean_lifetime, inst.cv)?;
            let costs = CostRates::new(
                inst.unplanned_cost,
                inst.downtime_cost,
                stock_cost,
                capacity_cost,
            );
            let repair_rate = 1.0 / inst.mean_repair_time;

            let assumed =
                optimize_stock_threshold(inst.channels, tau_grid, assumed_spec, repair_rate, &costs)?;
            let optimal =
                optimize_stock_threshold(inst.channels, tau_grid, true_spec, repair_rate, &costs)?;

            // price the assumed policy in the true system
            let true_inst = InstallationTime::with_age(true_spec, assumed.threshold)?;
            let obj = Objective::new(&true_inst, repair_rate, costs)?;
            let (implemented_cost, _, _) = obj.evaluate(assumed.stock, inst.channels, false)?;

            Ok(RobustnessOutcome {
                instance: *inst,
                assumed_stock: assumed.stock,
                assumed_threshold: assumed.threshold,
                optimal_stock: optimal.stock,
                optimal_threshold: optimal.threshold,
                implemented_cost,
                optimal_cost: optimal.total_cost,
                pct_penalty: 100.0 * (implemented_cost - optimal.total_cost) / optimal.total_cost,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXP1: LifetimeSpec = LifetimeSpec::Exponential { rate: 1.0 };

    #[test]
    fn stocking_dominated_gives_zero() {
        let costs = CostRates::new(0.0, 1.0, 1e6, 0.5);
        let (s, _, _) = optimize_stock(1, f64::INFINITY, EXP1, 1.0, &costs).unwrap();
        assert_eq!(s, 0);
    }

    #[test]
    fn capacity_dominated_gives_one() {
        let costs = CostRates::new(0.0, 20.0, 0.25, 1e6);
        let r = optimize_stock_capacity(f64::INFINITY, EXP1, 1.0, &costs).unwrap();
        assert_eq!(r.channels, 1);
    }

    #[test]
    fn stopping_bound_is_monotone_on_trace() {
        let costs = CostRates::new(10.0, 20.0, 0.25, 0.5);
        let (_, _, trace) = optimize_stock(2, 1.5, LifetimeSpec::Erlang { phases: 3, rate: 3.0 }, 1.0, &costs).unwrap();
        for w in trace.windows(2) {
            assert!(
                w[1].bound >= w[0].bound - 1e-9,
                "bound decreased: {} -> {}",
                w[0].bound,
                w[1].bound
            );
        }
    }

    #[test]
    fn singleton_grid_reduces_to_joint_search() {
        let costs = CostRates::new(0.0, 20.0, 0.25, 0.5);
        let a = optimize_policy(&[f64::INFINITY], EXP1, 1.0, &costs).unwrap();
        let b = optimize_stock_capacity(f64::INFINITY, EXP1, 1.0, &costs).unwrap();
        assert_eq!((a.stock, a.channels), (b.stock, b.channels));
        assert_eq!(a.total_cost, b.total_cost);
    }

    #[test]
    fn all_equal_costs_tie_break_to_smallest_tau() {
        // with zero unplanned and downtime rates the cost is flat in tau
        let costs = CostRates::new(0.0, 0.0, 0.25, 0.5);
        let grid = [0.5, 1.0, 2.0];
        let r = optimize_policy(&grid, EXP1, 1.0, &costs).unwrap();
        assert_eq!(r.threshold, 0.5);
        assert_eq!(r.stock, 0);
        assert_eq!(r.channels, 1);
    }

    #[test]
    fn no_misspecification_gives_zero_penalty() {
        // same family on both sides -> identical optimization problems
        let inst = RobustnessInstance {
            true_family: MomentFitFamily::Gamma,
            cv: 0.4,
            unplanned_cost: 10.0,
            downtime_cost: 20.0,
            mean_repair_time: 2.0,
            channels: 2,
        };
        let true_spec = from_mean_cv(MomentFitFamily::Gamma, 2.0, 0.4).unwrap();
        let costs = CostRates::new(10.0, 20.0, 0.25, 0.75);
        let grid = [0.5, 1.0, 2.0];
        let own = optimize_stock_threshold(2, &grid, true_spec, 0.5, &costs).unwrap();
        // pricing the optimizer's own policy reproduces its cost
        let inst_time = InstallationTime::with_age(true_spec, own.threshold).unwrap();
        let obj = Objective::new(&inst_time, 0.5, costs).unwrap();
        let (tc, _, _) = obj.evaluate(own.stock, inst.channels, false).unwrap();
        assert!((tc - own.total_cost).abs() < 1e-10);
    }
}
