//! Steady-state analysis and policy optimization for repairable spare-parts
//! systems: one or several capital goods under age-based replacement, backed
//! by a repair shop with finitely many exponential channels.
//!
//! The single-good system is solved exactly as an M_n/GI/1 queue through
//! Laplace-transform recursions on the remaining service time; several goods
//! sharing a shop are handled by a calibrated fixed-point decomposition
//! (FCFS multi-class shop, or exact preemptive-priority marginals for a
//! single repairman). Policy search over stock level, repair capacity, and
//! age threshold uses monotone stopping bounds, and a discrete-event
//! simulator provides an independent check of every analytic quantity.

pub mod error;
pub mod experiments;
pub mod lifetime;
pub mod multi;
pub mod optimize;
pub mod priority;
pub mod quadrature;
pub mod sim;
pub mod single;
mod transform;

pub use error::{Error, Result};
pub use lifetime::{from_mean_cv, InstallationTime, LifetimeSpec, MomentFitFamily, Threshold};
pub use multi::{
    marie_fixed_point, optimize_multi, solve as solve_multi, DecompositionState, Discipline,
    GoodSpec, MultiGoodConfig, MultiGoodSummary,
};
pub use optimize::{
    optimize_policy, optimize_stock, optimize_stock_capacity, optimize_stock_threshold,
    robustness_experiment, PolicySearchResult, RobustnessInstance, RobustnessOutcome,
};
pub use priority::{j_class_steady_state, two_class_steady_state, PriorityClassSpec};
pub use sim::{compare, simulate, AnalyticSummary, Scenario, SimConfig, SimEstimate};
pub use single::{
    cost_rate, p0_closed_form, remaining_service_transforms_ample,
    remaining_service_transforms_capacitated, steady_state, CostBreakdown, CostRates,
    SingleGoodConfig, SteadyState,
};
pub use transform::RemainingServiceTable;
