//! Exact steady state of the single-capital-good system.
//!
//! The closed two-node cycle (capital good + stock point, repair shop) is
//! equivalent to an M_n/GI/1 queue with capacity S and state-dependent
//! arrival rates lambda_n = mu_r min(S - n, K): n counts parts at the stock
//! point including the one in operation, and arrivals are repair
//! completions. The steady-state vector comes out of the remaining-service
//! transform tables as
//!
//!   P(n) = (lambda_0 P(0) / lambda_n) prod_{i<n} (1 - F_i*(lambda_{i+1})) / B(lambda_{i+1})
//!
//! with P(0) given by the bracket over the same products plus the
//! expected-remaining-service tail term, and P(S) absorbing the remainder.

use crate::error::{Error, Result};
use crate::lifetime::{InstallationTime, LifetimeSpec};
use crate::transform::{
    remaining_service_table, RemainingServiceEval, RemainingServiceTable, ServiceTransform,
};

/// One capital good's full parameterization.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleGoodConfig {
    /// Turn-around stock S (circulating repairables).
    pub stock: u32,
    /// Repair channels K.
    pub channels: u32,
    /// Age threshold tau; `f64::INFINITY` means pure corrective maintenance.
    pub threshold: f64,
    /// Exponential repair rate mu_r.
    pub repair_rate: f64,
    pub lifetime: LifetimeSpec,
}

impl SingleGoodConfig {
    pub fn validate(&self) -> Result<()> {
        self.lifetime.validate()?;
        if self.channels == 0 {
            return Err(Error::invalid("channels", "need at least one repair channel"));
        }
        if !(self.repair_rate > 0.0 && self.repair_rate.is_finite()) {
            return Err(Error::invalid("repair_rate", "must be strictly positive"));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::invalid("threshold", "must be strictly positive"));
        }
        Ok(())
    }

    /// Arrival rates lambda_n = mu_r min(S - n, K) for n = 0..S-1
    /// (lambda_S = 0 is implicit).
    pub fn arrival_rates(&self) -> Vec<f64> {
        let s = self.stock;
        (0..s)
            .map(|n| self.repair_rate * (s - n).min(self.channels) as f64)
            .collect()
    }

    pub fn installation(&self) -> Result<InstallationTime> {
        InstallationTime::with_age(self.lifetime, self.threshold)
    }
}

/// Cost rates of the objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostRates {
    /// Per unplanned (corrective) replacement.
    pub unplanned: f64,
    /// Downtime cost per unit time.
    pub downtime: f64,
    /// Per unit of turn-around stock per unit time.
    pub stock: f64,
    /// Per repair channel per unit time.
    pub capacity: f64,
    /// Per part held near the capital good per unit time. Declared by the
    /// model but absent from the objective; carried inert for reporting.
    pub holding: f64,
}

impl CostRates {
    pub fn new(unplanned: f64, downtime: f64, stock: f64, capacity: f64) -> Self {
        Self {
            unplanned,
            downtime,
            stock,
            capacity,
            holding: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("unplanned", self.unplanned),
            ("downtime", self.downtime),
            ("stock", self.stock),
            ("capacity", self.capacity),
            ("holding", self.holding),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid("cost", format!("{name} must be nonnegative")));
            }
        }
        Ok(())
    }
}

/// Steady-state distribution P(0..S) with derived summaries.
#[derive(Debug, Clone)]
pub struct SteadyState {
    probs: Vec<f64>,
    p_down: f64,
    expected_inventory: f64,
    throughput: f64,
    residual: f64,
}

impl SteadyState {
    fn from_probs(mut probs: Vec<f64>, install_rate: f64, residual: f64) -> Result<Self> {
        for (n, p) in probs.iter_mut().enumerate() {
            if *p < -1e-9 {
                return Err(Error::Inconsistent(format!(
                    "P({n}) = {p} below the negativity floor"
                )));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Inconsistent(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let p_down = probs[0];
        let expected_inventory = probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        Ok(Self {
            probs,
            p_down,
            expected_inventory,
            throughput: install_rate * (1.0 - p_down),
            residual,
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Downtime probability P(0).
    pub fn p_down(&self) -> f64 {
        self.p_down
    }

    /// Expected number of parts at the stock point, the operating one included.
    pub fn expected_inventory(&self) -> f64 {
        self.expected_inventory
    }

    /// Replacement (service-completion) rate mu (1 - P(0)).
    pub fn throughput(&self) -> f64 {
        self.throughput
    }

    /// Relative disagreement between the product-form bracket for P(0) and
    /// its closed-form rewrite; a solve is degraded when this exceeds 1e-6.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn is_degraded(&self) -> bool {
        self.residual > 1e-6
    }
}

/// Cost-rate components of the objective at one (S, tau, K) point.
#[derive(Debug, Clone, Copy)]
pub struct CostBreakdown {
    pub unplanned: f64,
    pub downtime: f64,
    pub stock: f64,
    pub capacity: f64,
    pub total: f64,
}

/// Remaining-service transform table on the ample-capacity path (S <= K),
/// where every arrival rate along the recursion is distinct.
pub fn remaining_service_transforms_ample(cfg: &SingleGoodConfig) -> Result<RemainingServiceTable> {
    cfg.validate()?;
    if cfg.stock > cfg.channels {
        return Err(Error::Unsupported(format!(
            "ample path requires S <= K, got S = {}, K = {}",
            cfg.stock, cfg.channels
        )));
    }
    let inst = cfg.installation()?;
    let svc = ServiceTransform::new(&inst);
    remaining_service_table(&svc, &cfg.arrival_rates())
}

/// Remaining-service transform table on the capacitated path (S > K), where
/// the constant-rate head lambda = K mu_r engages the derivative scheme.
pub fn remaining_service_transforms_capacitated(
    cfg: &SingleGoodConfig,
) -> Result<RemainingServiceTable> {
    cfg.validate()?;
    if cfg.stock <= cfg.channels {
        return Err(Error::Unsupported(format!(
            "capacitated path requires S > K, got S = {}, K = {}",
            cfg.stock, cfg.channels
        )));
    }
    let inst = cfg.installation()?;
    let svc = ServiceTransform::new(&inst);
    remaining_service_table(&svc, &cfg.arrival_rates())
}

/// Steady state for an arbitrary positive rate vector lambda_0..lambda_(S-1).
/// This is the single-good solve generalized for the decomposition, which
/// feeds it rate vectors that are not of the min(S-n, K) form.
///
/// States whose probability falls below the representable range are
/// truncated: the remaining-service conditioning degenerates (F* -> 1)
/// exactly where the occupancy mass vanishes, so once a level's bracket
/// contribution is provably below 1e-16 of the running total the recursion
/// stops and the remaining levels are reported as zero. A degenerate level
/// that still carries mass is a genuine conditioning failure and errors out.
pub(crate) fn steady_state_for_rates(
    svc: &ServiceTransform<'_>,
    raw_rates: &[f64],
) -> Result<SteadyState> {
    let s = raw_rates.len();
    let mean_install = svc.installation().mean()?;
    let install_rate = 1.0 / mean_install;
    if s == 0 {
        return SteadyState::from_probs(vec![1.0], install_rate, 0.0);
    }
    if s == 1 {
        // alternating renewal between one installation and one repair cycle
        let cycle_up = mean_install;
        let cycle_down = 1.0 / raw_rates[0];
        let p0 = cycle_down / (cycle_up + cycle_down);
        if !(p0 > 0.0 && p0 < 1.0) {
            return Err(Error::invalid("arrival_rates", "rate must be positive"));
        }
        return SteadyState::from_probs(vec![p0, 1.0 - p0], install_rate, 0.0);
    }

    let rates = crate::transform::snap_rates(raw_rates)?;
    let mut eval = RemainingServiceEval::new(svc, &rates);
    let lambda_0 = rates[0];

    // Walk the levels, accumulating bracket terms and the P(n) weights
    // weight[n] = (lambda_0 / lambda_n) prod_{i<n} ratio_i for n >= 1.
    let mut weights: Vec<f64> = Vec::with_capacity(s);
    let mut prod = 1.0;
    let mut partial = 1.0; // bracket sum over levels seen so far
    let mut bs = Vec::with_capacity(s - 1);
    let mut vs = Vec::with_capacity(s - 1);
    let mut truncated_at: Option<usize> = None;
    for i in 0..s - 1 {
        let next = rates[i + 1];
        let b = svc.value(next)?;
        let v = eval.value(i, next);
        let v = match v {
            Ok(v) if (-1e-9..=1.0 + 1e-9).contains(&v) => v.clamp(0.0, 1.0),
            bad => {
                // degeneracy comes with collapsing level ratios; truncation
                // is sound only when the mass ahead is provably negligible
                let head = lambda_0 / next * prod;
                let collapsing = bs
                    .last()
                    .zip(vs.last())
                    .map(|(&b, &v)| (1.0 - v) / b < 1e-2)
                    .unwrap_or(false);
                if collapsing && head < 1e-16 * partial {
                    truncated_at = Some(i);
                    break;
                }
                return match bad {
                    Ok(v) => Err(Error::Inconsistent(format!(
                        "remaining-service transform F_{i}*({next}) = {v} outside [0, 1] at a non-negligible level"
                    ))),
                    Err(e) => Err(e),
                };
            }
        };
        bs.push(b);
        vs.push(v);
        prod *= (1.0 - v) / b;
        let w = lambda_0 / next * prod;
        weights.push(w);
        partial += w;
        if !prod.is_finite() || !partial.is_finite() {
            return Err(Error::Inconsistent(
                "bracket accumulation overflowed".into(),
            ));
        }
    }

    let (inv_p0, inv_closed, n_levels) = match truncated_at {
        None => {
            // full recursion: expected-remaining tail per R(n), seeded R(0) = 1/mu
            let mut r = mean_install;
            for n in 1..s {
                let denom = 1.0 - vs[n - 1];
                if denom.abs() < 1e-14 {
                    return Err(Error::IllConditioned {
                        level: n,
                        magnitude: denom.abs(),
                    });
                }
                r = bs[n - 1] * r / denom - 1.0 / rates[n] + mean_install;
            }
            let lambda_tail = rates[s - 1];
            // the bracket counts levels 1..S-2 plus the R-weighted top term
            let mut inv = 1.0 + (1.0 + lambda_tail * r) * weights[s - 2];
            for &w in weights.iter().take(s - 2) {
                inv += w;
            }
            // closed-form rewrite cross-check
            let mut inv_closed = 1.0 + lambda_0 * mean_install / bs[0];
            let mut prod_c = 1.0;
            for n in 1..s {
                prod_c *= (1.0 - vs[n - 1]) / bs[n - 1];
                if n >= 2 {
                    inv_closed += lambda_0 * mean_install * prod_c;
                }
            }
            (inv, inv_closed, s)
        }
        Some(levels) => {
            // truncated: every level beyond `levels` carries ~zero mass
            let inv: f64 = 1.0 + weights.iter().sum::<f64>();
            (inv, inv, levels + 1)
        }
    };

    let p0 = 1.0 / inv_p0;
    let p0_closed = 1.0 / inv_closed;
    let residual = (p0 - p0_closed).abs() / p0.max(f64::MIN_POSITIVE);

    let mut probs = Vec::with_capacity(s + 1);
    probs.push(p0);
    for n in 1..s {
        if n < n_levels {
            probs.push(weights[n - 1] * p0);
        } else {
            probs.push(0.0);
        }
    }
    if truncated_at.is_none() {
        let tail = 1.0 - probs.iter().sum::<f64>();
        probs.push(tail);
    } else {
        probs.push(0.0);
        // renormalize the truncated head
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
    }
    SteadyState::from_probs(probs, install_rate, residual)
}

/// Steady-state distribution of the single-good system.
pub fn steady_state(cfg: &SingleGoodConfig) -> Result<SteadyState> {
    cfg.validate()?;
    let inst = cfg.installation()?;
    let svc = ServiceTransform::new(&inst);
    steady_state_for_rates(&svc, &cfg.arrival_rates())
}

/// P(0) by the closed-form bracket rewrite
/// [1 + lambda_0/(mu B(lambda_1)) + (lambda_0/mu) sum_n prod_i ...]^-1.
/// Requires S >= 2; agrees with [`steady_state`]'s P(0) to 1e-8.
pub fn p0_closed_form(cfg: &SingleGoodConfig) -> Result<f64> {
    cfg.validate()?;
    if cfg.stock < 2 {
        return Err(Error::Unsupported(format!(
            "closed form requires S >= 2, got S = {}",
            cfg.stock
        )));
    }
    let inst = cfg.installation()?;
    let svc = ServiceTransform::new(&inst);
    let table = remaining_service_table(&svc, &cfg.arrival_rates())?;
    let s = cfg.stock as usize;
    let lambda_0 = table.rates[0];
    let mut inv = 1.0 + lambda_0 * table.mean_installation / table.service_at_next[0];
    let mut prod = 1.0;
    for n in 2..s {
        prod = if n == 2 {
            table.ratios[0] * table.ratios[1]
        } else {
            prod * table.ratios[n - 1]
        };
        inv += lambda_0 * table.mean_installation * prod;
    }
    Ok(1.0 / inv)
}

/// Evaluates the cost objective
/// C_u mu (1 - P(0)) F(tau) + C_d P(0) + C_a S + C_w K.
pub fn cost_rate(cfg: &SingleGoodConfig, costs: &CostRates) -> Result<CostBreakdown> {
    costs.validate()?;
    let state = steady_state(cfg)?;
    cost_rate_for_state(cfg, costs, &state)
}

/// Cost components given an already-computed steady state.
pub fn cost_rate_for_state(
    cfg: &SingleGoodConfig,
    costs: &CostRates,
    state: &SteadyState,
) -> Result<CostBreakdown> {
    let inst = cfg.installation()?;
    let corrective = inst.corrective_probability()?;
    let unplanned = costs.unplanned * state.throughput() * corrective;
    let downtime = costs.downtime * state.p_down();
    let stock = costs.stock * cfg.stock as f64;
    let capacity = costs.capacity * cfg.channels as f64;
    Ok(CostBreakdown {
        unplanned,
        downtime,
        stock,
        capacity,
        total: unplanned + downtime + stock + capacity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exp_cfg(stock: u32, channels: u32) -> SingleGoodConfig {
        SingleGoodConfig {
            stock,
            channels,
            threshold: f64::INFINITY,
            repair_rate: 1.0,
            lifetime: LifetimeSpec::Exponential { rate: 1.0 },
        }
    }

    #[test]
    fn empty_system_is_always_down() {
        let st = steady_state(&exp_cfg(0, 1)).unwrap();
        assert_eq!(st.probs(), &[1.0]);
        assert_eq!(st.p_down(), 1.0);
    }

    #[test]
    fn two_state_balance() {
        // S=1, K=1, exp(1), tau=inf, mu_r=1 -> P = [1/2, 1/2]
        let st = steady_state(&exp_cfg(1, 1)).unwrap();
        assert_relative_eq!(st.p_down(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(st.probs()[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn three_state_birth_death() {
        // S=2, K=2: birth-death with lambda = (2, 1), service rate 1
        let st = steady_state(&exp_cfg(2, 2)).unwrap();
        assert_relative_eq!(st.probs()[0], 0.2, epsilon = 1e-12);
        assert_relative_eq!(st.probs()[1], 0.4, epsilon = 1e-12);
        assert_relative_eq!(st.probs()[2], 0.4, epsilon = 1e-12);
    }

    #[test]
    fn p0_closed_form_matches_and_guards() {
        let cfg = exp_cfg(2, 2);
        assert_relative_eq!(p0_closed_form(&cfg).unwrap(), 0.2, epsilon = 1e-12);
        assert!(p0_closed_form(&exp_cfg(1, 1)).is_err());
        for (s, k) in [(4, 2), (6, 3), (5, 5), (9, 2)] {
            let cfg = exp_cfg(s, k);
            let st = steady_state(&cfg).unwrap();
            let p0 = p0_closed_form(&cfg).unwrap();
            assert!((st.p_down() - p0).abs() < 1e-8, "S={s} K={k}");
        }
    }

    #[test]
    fn path_selection_preconditions() {
        assert!(remaining_service_transforms_ample(&exp_cfg(3, 3)).is_ok());
        assert!(remaining_service_transforms_ample(&exp_cfg(4, 3)).is_err());
        assert!(remaining_service_transforms_capacitated(&exp_cfg(4, 3)).is_ok());
        assert!(remaining_service_transforms_capacitated(&exp_cfg(3, 3)).is_err());
    }

    #[test]
    fn machine_repairman_closed_form_small() {
        // exp lifetime, tau=inf: birth-death with up-rate lambda_n, down rate 1
        for (s, k) in [(3u32, 1u32), (5, 2), (4, 4)] {
            let cfg = exp_cfg(s, k);
            let st = steady_state(&cfg).unwrap();
            let lam: Vec<f64> = cfg.arrival_rates();
            let mut w = vec![1.0];
            for n in 0..s as usize {
                let last = *w.last().unwrap();
                w.push(last * lam[n]);
            }
            let tot: f64 = w.iter().sum();
            for (n, &wi) in w.iter().enumerate() {
                assert_relative_eq!(st.probs()[n], wi / tot, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn flow_balance_holds() {
        let cfg = SingleGoodConfig {
            stock: 6,
            channels: 2,
            threshold: 1.25,
            repair_rate: 0.8,
            lifetime: LifetimeSpec::Erlang {
                phases: 4,
                rate: 2.0,
            },
        };
        let st = steady_state(&cfg).unwrap();
        let lam = cfg.arrival_rates();
        let inflow: f64 = st
            .probs()
            .iter()
            .take(cfg.stock as usize)
            .enumerate()
            .map(|(n, p)| lam[n] * p)
            .sum();
        assert_relative_eq!(inflow, st.throughput(), epsilon = 1e-8);
    }

    #[test]
    fn cost_rate_two_state_example() {
        let costs = CostRates::new(0.0, 20.0, 0.25, 0.5);
        let cb = cost_rate(&exp_cfg(1, 1), &costs).unwrap();
        assert_relative_eq!(cb.total, 10.75, epsilon = 1e-10);
        assert_relative_eq!(cb.downtime, 10.0, epsilon = 1e-10);
        // zero rates give zero cost
        let zero = CostRates::new(0.0, 0.0, 0.0, 0.0);
        assert_eq!(cost_rate(&exp_cfg(1, 1), &zero).unwrap().total, 0.0);
    }

    #[test]
    fn degenerate_lifetime_rejected() {
        let cfg = SingleGoodConfig {
            stock: 2,
            channels: 1,
            threshold: 2.0,
            repair_rate: 1.0,
            lifetime: LifetimeSpec::Degenerate { point: 1.0 },
        };
        assert!(steady_state(&cfg).is_err());
    }
}
