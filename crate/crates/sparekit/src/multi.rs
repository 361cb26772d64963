//! Approximate analysis of several capital goods sharing one repair shop.
//!
//! Each good's cycle is replaced by a two-node Jackson sub-network with
//! state-dependent exponential rates. The rates are calibrated by a fixed
//! point: the product form of each sub-network implies state-dependent
//! arrival streams; solving each node in isolation under those streams
//! (the general-service node with the exact single-good machinery, the
//! shared shop as a multi-class exponential queue) yields conditional
//! throughputs, which become the next service rates. Iteration stops when
//! the shop-side rates settle.

use crate::error::{Error, Result};
use crate::lifetime::{InstallationTime, LifetimeSpec};
use crate::priority;
use crate::single::{steady_state_for_rates, SteadyState};
use crate::transform::ServiceTransform;

/// Cap on the joint repair-shop state space.
const JOINT_STATE_CAP: usize = 1_000_000;

/// Default fixed-point tolerance on shop service rates.
pub const FIXED_POINT_EPS: f64 = 1e-6;
/// Default fixed-point iteration cap.
pub const FIXED_POINT_MAX_ITER: usize = 500;

/// Repair-shop queueing discipline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discipline {
    Fcfs,
    /// Preemptive priority in listed order (first good = highest priority).
    /// Single repairman only.
    PreemptivePriority,
}

/// One good in a shared-shop network.
#[derive(Debug, Clone, PartialEq)]
pub struct GoodSpec {
    pub lifetime: LifetimeSpec,
    /// Age threshold tau_i.
    pub threshold: f64,
    /// Turn-around stock S_i.
    pub stock: u32,
    /// Cost per unplanned replacement.
    pub unplanned_cost: f64,
    /// Downtime cost rate.
    pub downtime_cost: f64,
    /// Stock cost rate per unit.
    pub stock_cost: f64,
}

/// J goods sharing a repair shop with K channels.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiGoodConfig {
    pub goods: Vec<GoodSpec>,
    pub channels: u32,
    pub repair_rate: f64,
    /// Cost rate per repair channel.
    pub capacity_cost: f64,
    pub discipline: Discipline,
}

impl MultiGoodConfig {
    pub fn validate(&self) -> Result<()> {
        if self.goods.is_empty() {
            return Err(Error::invalid("goods", "need at least one capital good"));
        }
        if self.channels == 0 {
            return Err(Error::invalid("channels", "need at least one repair channel"));
        }
        if !(self.repair_rate > 0.0 && self.repair_rate.is_finite()) {
            return Err(Error::invalid("repair_rate", "must be strictly positive"));
        }
        if !(self.capacity_cost >= 0.0) {
            return Err(Error::invalid("capacity_cost", "must be nonnegative"));
        }
        for g in &self.goods {
            g.lifetime.validate()?;
            if !(g.threshold > 0.0) {
                return Err(Error::invalid("threshold", "must be strictly positive"));
            }
            for (name, c) in [
                ("unplanned_cost", g.unplanned_cost),
                ("downtime_cost", g.downtime_cost),
                ("stock_cost", g.stock_cost),
            ] {
                if !(c >= 0.0 && c.is_finite()) {
                    return Err(Error::invalid("cost", format!("{name} must be nonnegative")));
                }
            }
        }
        Ok(())
    }
}

/// Calibrated state of one good at the fixed point.
#[derive(Debug, Clone)]
pub struct GoodState {
    /// Substituted service rates at the good's node, index 1..=S.
    pub node_service_rates: Vec<f64>,
    /// Substituted per-class service rates at the shop, index 1..=S.
    pub shop_service_rates: Vec<f64>,
    /// Arrival rates into the good's node, index 0..S-1.
    pub node_arrival_rates: Vec<f64>,
    /// Arrival rates of this class into the shop, index 0..S-1.
    pub shop_arrival_rates: Vec<f64>,
    /// Two-node product-form distribution of the sub-network.
    pub product_form: Vec<f64>,
    /// Normalizer of the product form before scaling.
    pub product_form_normalizer: f64,
    /// Isolated general-service node distribution P_i(n).
    pub node_probs: SteadyState,
    /// Shop marginal P_0(n_i).
    pub shop_marginal: Vec<f64>,
}

/// Converged decomposition output.
#[derive(Debug, Clone)]
pub struct DecompositionState {
    pub goods: Vec<GoodState>,
    pub iterations: usize,
    pub residual: f64,
    /// Whether oscillation damping was engaged at any point.
    pub damped: bool,
    /// Normalizer of the joint shop distribution (FCFS only).
    pub shop_normalizer: Option<f64>,
}

/// Per-good performance summary plus total cost.
#[derive(Debug, Clone)]
pub struct MultiGoodSummary {
    pub p_down: Vec<f64>,
    pub expected_inventory: Vec<f64>,
    pub throughput: Vec<f64>,
    pub total_cost: f64,
}

/// Two-node product-form distribution: P(n) proportional to
/// prod_{k<=n} 1/mu_node(k) * prod_{k<=S-n} 1/mu_shop(k). Rate vectors are
/// indexed 1..=S; entry 0 is unused.
pub fn subnetwork_product_form(
    node_service_rates: &[f64],
    shop_service_rates: &[f64],
    stock: u32,
) -> Result<(Vec<f64>, f64)> {
    let s = stock as usize;
    for (name, rates) in [
        ("node_service_rates", node_service_rates),
        ("shop_service_rates", shop_service_rates),
    ] {
        if rates.len() < s + 1 {
            return Err(Error::invalid(name, format!("need entries 1..={s}")));
        }
        for (k, &r) in rates.iter().enumerate().take(s + 1).skip(1) {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::invalid(
                    name,
                    format!("rate at index {k} must be positive, got {r}"),
                ));
            }
        }
    }
    let mut weights = Vec::with_capacity(s + 1);
    for n in 0..=s {
        let mut v = 1.0;
        for k in 1..=n {
            v /= node_service_rates[k];
        }
        for k in 1..=(s - n) {
            v /= shop_service_rates[k];
        }
        weights.push(v);
    }
    let norm: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= norm;
    }
    Ok((weights, 1.0 / norm))
}

/// State-dependent arrival rates implied by a product form:
/// lambda_node(n) = mu_node(n+1) P(n+1)/P(n) into the good's node and
/// lambda_shop(n) = mu_shop(n+1) P(S-n-1)/P(S-n) into the shop.
pub fn implied_arrival_rates(
    product_form: &[f64],
    node_service_rates: &[f64],
    shop_service_rates: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let s = product_form.len() - 1;
    for (n, &p) in product_form.iter().enumerate() {
        if !(p > 0.0) {
            return Err(Error::ZeroProbability(n));
        }
    }
    let node = (0..s)
        .map(|n| node_service_rates[n + 1] * product_form[n + 1] / product_form[n])
        .collect();
    let shop = (0..s)
        .map(|n| shop_service_rates[n + 1] * product_form[s - n - 1] / product_form[s - n])
        .collect();
    Ok((node, shop))
}

/// Conditional throughputs of an isolated general-service node under given
/// arrival rates: solves the M_n/GI/1 node and returns
/// (P_i, upsilon with upsilon(n) = lambda(n-1) P(n-1) / P(n) for n = 1..=S).
pub fn isolated_node_throughputs(
    installation: &InstallationTime,
    arrival_rates: &[f64],
) -> Result<(SteadyState, Vec<f64>)> {
    let svc = ServiceTransform::new(installation);
    let state = steady_state_for_rates(&svc, arrival_rates)?;
    let upsilon = conditional_throughputs(arrival_rates, state.probs())?;
    Ok((state, upsilon))
}

/// upsilon(n) = lambda(n-1) P(n-1) / P(n), padded with a leading zero so the
/// result indexes 1..=S like the service-rate vectors.
fn conditional_throughputs(arrival_rates: &[f64], probs: &[f64]) -> Result<Vec<f64>> {
    let s = arrival_rates.len();
    let mut out = vec![0.0; s + 1];
    for n in 1..=s {
        if probs[n] <= 0.0 {
            return Err(Error::ZeroProbability(n));
        }
        out[n] = arrival_rates[n - 1] * probs[n - 1] / probs[n];
    }
    Ok(out)
}

/// Joint and marginal occupancy of the multi-class exponential repair shop
/// under FCFS, per the product expression over (n_1, ..., n_J):
/// weight = (1/mu_r)^N prod_i [prod_k lambda_i(k)] / n_i!, times
/// N!/(K! K^(N-K)) when N > K. Returns (normalizer, marginals).
pub fn repair_shop_multiclass(
    shop_arrival_rates: &[Vec<f64>],
    repair_rate: f64,
    channels: u32,
) -> Result<(f64, Vec<Vec<f64>>)> {
    let stocks: Vec<usize> = shop_arrival_rates.iter().map(|r| r.len()).collect();
    let states: usize = stocks.iter().map(|s| s + 1).product();
    if states > JOINT_STATE_CAP {
        return Err(Error::StateSpaceTooLarge {
            states,
            cap: JOINT_STATE_CAP,
        });
    }
    let j = stocks.len();
    let k = channels as f64;

    // log-factorials up to the largest total population
    let total_max: usize = stocks.iter().sum();
    let mut ln_fact = vec![0.0f64; total_max + 1];
    for i in 1..=total_max {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }

    // per-class log prefix products of arrival rates
    let mut ln_arr: Vec<Vec<f64>> = Vec::with_capacity(j);
    for rates in shop_arrival_rates {
        let mut acc = vec![0.0f64];
        for &r in rates {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::invalid(
                    "shop_arrival_rates",
                    format!("rates must be positive, got {r}"),
                ));
            }
            acc.push(acc.last().unwrap() + r.ln());
        }
        ln_arr.push(acc);
    }

    let ln_mu = repair_rate.ln();
    let mut joint = vec![0.0f64; states];
    let mut idx = vec![0usize; j];
    let mut max_ln = f64::NEG_INFINITY;
    let mut lns = vec![0.0f64; states];
    for (flat, ln_slot) in lns.iter_mut().enumerate() {
        let mut rem = flat;
        for (i, s) in stocks.iter().enumerate() {
            idx[i] = rem % (s + 1);
            rem /= s + 1;
        }
        let total: usize = idx.iter().sum();
        let mut ln_w = -(total as f64) * ln_mu;
        for i in 0..j {
            ln_w += ln_arr[i][idx[i]] - ln_fact[idx[i]];
        }
        if total > channels as usize {
            ln_w += ln_fact[total]
                - ln_fact[channels as usize]
                - (total as f64 - k) * k.ln();
        }
        *ln_slot = ln_w;
        max_ln = max_ln.max(ln_w);
    }
    let mut norm = 0.0;
    for (flat, &ln_w) in lns.iter().enumerate() {
        let w = (ln_w - max_ln).exp();
        joint[flat] = w;
        norm += w;
    }
    for w in &mut joint {
        *w /= norm;
    }

    let mut marginals: Vec<Vec<f64>> = stocks.iter().map(|s| vec![0.0; s + 1]).collect();
    for (flat, &p) in joint.iter().enumerate() {
        let mut rem = flat;
        for (i, s) in stocks.iter().enumerate() {
            marginals[i][rem % (s + 1)] += p;
            rem /= s + 1;
        }
    }
    Ok((norm * max_ln.exp(), marginals))
}

/// Shop marginals under the selected discipline.
fn shop_marginals(
    cfg: &MultiGoodConfig,
    shop_arrival_rates: &[Vec<f64>],
) -> Result<(Option<f64>, Vec<Vec<f64>>)> {
    match discipline_of(cfg) {
        Discipline::Fcfs => {
            let (norm, marg) = repair_shop_multiclass(shop_arrival_rates, cfg.repair_rate, cfg.channels)?;
            Ok((Some(norm), marg))
        }
        Discipline::PreemptivePriority => {
            let marg = priority::shop_marginals_preemptive(shop_arrival_rates, cfg.repair_rate)?;
            Ok((None, marg))
        }
    }
}

fn discipline_of(cfg: &MultiGoodConfig) -> Discipline {
    cfg.discipline
}

/// Runs the calibration fixed point and returns the converged state.
///
/// Initialization follows the shop-heavy start: mu_shop,i(n) = n mu_r and
/// mu_node,i(n) = 1/E[Z_i]. Iterations that raise the residual twice in a
/// row switch on 50/50 blending with the previous rates, which settles
/// oscillating small-population instances.
pub fn marie_fixed_point(
    cfg: &MultiGoodConfig,
    eps: f64,
    max_iter: usize,
) -> Result<DecompositionState> {
    cfg.validate()?;
    if !(eps > 0.0) {
        return Err(Error::invalid("eps", "tolerance must be positive"));
    }
    if cfg.discipline == Discipline::PreemptivePriority && cfg.channels != 1 {
        return Err(Error::Unsupported(
            "preemptive priority requires a single repair channel".into(),
        ));
    }
    let j = cfg.goods.len();
    let installations: Vec<InstallationTime> = cfg
        .goods
        .iter()
        .map(|g| InstallationTime::with_age(g.lifetime, g.threshold))
        .collect::<Result<_>>()?;
    let install_rates: Vec<f64> = installations
        .iter()
        .map(|i| i.mean().map(|m| 1.0 / m))
        .collect::<Result<_>>()?;

    let mut mu_node: Vec<Vec<f64>> = (0..j)
        .map(|i| vec![install_rates[i]; cfg.goods[i].stock as usize + 1])
        .collect();
    let mut mu_shop: Vec<Vec<f64>> = (0..j)
        .map(|i| {
            (0..=cfg.goods[i].stock as usize)
                .map(|n| n as f64 * cfg.repair_rate)
                .collect()
        })
        .collect();

    let mut residual_history: Vec<f64> = Vec::new();
    let mut damped = false;
    for iter in 1..=max_iter {
        // Step 2: product forms and implied arrival streams
        let mut lam_node = Vec::with_capacity(j);
        let mut lam_shop = Vec::with_capacity(j);
        let mut product_forms = Vec::with_capacity(j);
        let mut normalizers = Vec::with_capacity(j);
        for i in 0..j {
            let s = cfg.goods[i].stock;
            if s == 0 {
                lam_node.push(Vec::new());
                lam_shop.push(Vec::new());
                product_forms.push(vec![1.0]);
                normalizers.push(1.0);
                continue;
            }
            let (pf, norm) = subnetwork_product_form(&mu_node[i], &mu_shop[i], s)?;
            let (ln, ls) = implied_arrival_rates(&pf, &mu_node[i], &mu_shop[i])?;
            lam_node.push(ln);
            lam_shop.push(ls);
            product_forms.push(pf);
            normalizers.push(norm);
        }

        // Step 3: isolated nodes and the shared shop
        let mut node_states = Vec::with_capacity(j);
        let mut new_mu_node = Vec::with_capacity(j);
        for i in 0..j {
            let (state, upsilon) = isolated_node_throughputs(&installations[i], &lam_node[i])?;
            node_states.push(state);
            new_mu_node.push(upsilon);
        }
        let (shop_norm, shop_marg) = shop_marginals(cfg, &lam_shop)?;
        let mut new_mu_shop = Vec::with_capacity(j);
        for i in 0..j {
            new_mu_shop.push(conditional_throughputs(&lam_shop[i], &shop_marg[i])?);
        }

        // convergence on the shop-side rates
        let mut residual: f64 = 0.0;
        for i in 0..j {
            for n in 1..new_mu_shop[i].len() {
                residual = residual.max((new_mu_shop[i][n] - mu_shop[i][n]).abs());
            }
        }

        let oscillating = residual_history.len() >= 2 && {
            let m = residual_history.len();
            residual > residual_history[m - 1] && residual_history[m - 1] > residual_history[m - 2]
        };
        if oscillating {
            damped = true;
            for i in 0..j {
                for n in 1..new_mu_shop[i].len() {
                    new_mu_shop[i][n] = 0.5 * (new_mu_shop[i][n] + mu_shop[i][n]);
                    new_mu_node[i][n] = 0.5 * (new_mu_node[i][n] + mu_node[i][n]);
                }
            }
        }
        residual_history.push(residual);
        mu_node = new_mu_node;
        mu_shop = new_mu_shop;

        if residual <= eps {
            let goods = (0..j)
                .map(|i| GoodState {
                    node_service_rates: mu_node[i].clone(),
                    shop_service_rates: mu_shop[i].clone(),
                    node_arrival_rates: lam_node[i].clone(),
                    shop_arrival_rates: lam_shop[i].clone(),
                    product_form: product_forms[i].clone(),
                    product_form_normalizer: normalizers[i],
                    node_probs: node_states[i].clone(),
                    shop_marginal: shop_marg[i].clone(),
                })
                .collect();
            return Ok(DecompositionState {
                goods,
                iterations: iter,
                residual,
                damped,
                shop_normalizer: shop_norm,
            });
        }
    }
    Err(Error::NoConvergence {
        max_iter,
        residual: *residual_history.last().unwrap_or(&f64::NAN),
    })
}

/// Total cost of a multi-good configuration at a converged state:
/// sum_i [C_u^i mu_i (1 - P_i(0)) F_i(tau_i) + C_d^i P_i(0) + C_a^i S_i]
/// + C_w K.
pub fn summarize(cfg: &MultiGoodConfig, state: &DecompositionState) -> Result<MultiGoodSummary> {
    let mut p_down = Vec::new();
    let mut expected_inventory = Vec::new();
    let mut throughput = Vec::new();
    let mut total = cfg.capacity_cost * cfg.channels as f64;
    for (g, gs) in cfg.goods.iter().zip(&state.goods) {
        let inst = InstallationTime::with_age(g.lifetime, g.threshold)?;
        let corrective = inst.corrective_probability()?;
        let p0 = gs.node_probs.p_down();
        let thr = gs.node_probs.throughput();
        total += g.unplanned_cost * thr * corrective
            + g.downtime_cost * p0
            + g.stock_cost * g.stock as f64;
        p_down.push(p0);
        expected_inventory.push(gs.node_probs.expected_inventory());
        throughput.push(thr);
    }
    Ok(MultiGoodSummary {
        p_down,
        expected_inventory,
        throughput,
        total_cost: total,
    })
}

/// Convenience: fixed point at default tolerances plus summary.
pub fn solve(cfg: &MultiGoodConfig) -> Result<(DecompositionState, MultiGoodSummary)> {
    let st = marie_fixed_point(cfg, FIXED_POINT_EPS, FIXED_POINT_MAX_ITER)?;
    let summary = summarize(cfg, &st)?;
    Ok((st, summary))
}

/// Result of the per-good stock optimization.
#[derive(Debug, Clone)]
pub struct MultiPolicyResult {
    pub stocks: Vec<u32>,
    pub total_cost: f64,
    pub summary: MultiGoodSummary,
    /// False when coordinate ascent detected a cycle and returned the best
    /// incumbent instead of a stationary point.
    pub converged: bool,
}

/// Per-good optimal stock levels at fixed K and thresholds: coordinate
/// ascent over the goods, each line search following the stock-ascent
/// pattern with the valid lower bound C_a^i S_i + (other stock costs)
/// + C_w K.
pub fn optimize_multi(cfg: &MultiGoodConfig) -> Result<MultiPolicyResult> {
    cfg.validate()?;
    const STOCK_CAP: u32 = 100;
    let mut stocks: Vec<u32> = vec![0; cfg.goods.len()];
    let mut best_cost = f64::INFINITY;
    let mut best_summary: Option<MultiGoodSummary> = None;
    let mut visited: Vec<Vec<u32>> = Vec::new();

    let eval = |stocks: &[u32]| -> Result<MultiGoodSummary> {
        let mut c = cfg.clone();
        for (g, &s) in c.goods.iter_mut().zip(stocks) {
            g.stock = s;
        }
        let (st, summary) = solve(&c)?;
        let _ = st;
        Ok(summary)
    };

    let fixed_cost = cfg.capacity_cost * cfg.channels as f64;
    for _pass in 0..50 {
        let mut changed = false;
        for i in 0..cfg.goods.len() {
            let others_stock_cost: f64 = stocks
                .iter()
                .zip(&cfg.goods)
                .enumerate()
                .filter(|(idx, _)| *idx != i)
                .map(|(_, (&s, g))| g.stock_cost * s as f64)
                .sum();
            let mut line_best: Option<(u32, f64, MultiGoodSummary)> = None;
            for s in 0..=STOCK_CAP {
                let mut candidate = stocks.clone();
                candidate[i] = s;
                let summary = eval(&candidate)?;
                let tc = summary.total_cost;
                if line_best.as_ref().map_or(true, |(_, b, _)| tc < *b) {
                    line_best = Some((s, tc, summary));
                }
                let bound = cfg.goods[i].stock_cost * s as f64 + others_stock_cost + fixed_cost;
                if bound > line_best.as_ref().unwrap().1 {
                    break;
                }
                if s == STOCK_CAP {
                    return Err(Error::SearchDiverged {
                        variable: "stock",
                        cap: STOCK_CAP,
                    });
                }
            }
            let (s_star, tc, summary) = line_best.unwrap();
            if s_star != stocks[i] {
                changed = true;
            }
            stocks[i] = s_star;
            if tc < best_cost {
                best_cost = tc;
                best_summary = Some(summary);
            }
        }
        if !changed {
            return Ok(MultiPolicyResult {
                stocks,
                total_cost: best_cost,
                summary: best_summary.unwrap(),
                converged: true,
            });
        }
        if visited.contains(&stocks) {
            // cycle: hand back the incumbent with a warning status
            return Ok(MultiPolicyResult {
                stocks,
                total_cost: best_cost,
                summary: best_summary.unwrap(),
                converged: false,
            });
        }
        visited.push(stocks.clone());
    }
    Err(Error::NoConvergence {
        max_iter: 50,
        residual: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn product_form_uniform_for_constant_rates() {
        let rates = vec![0.0, 1.0, 1.0, 1.0];
        let (pf, _) = subnetwork_product_form(&rates, &rates, 3).unwrap();
        for &p in &pf {
            assert_relative_eq!(p, 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn product_form_two_state_ratio() {
        // S=1, mu_node(1)=2, mu_shop(1)=1: the part leaves the node at rate 2
        // and returns at rate 1, so the two-state balance puts 2/3 of the
        // time at n=0 (pi(0) mu_shop = pi(1) mu_node).
        let (pf, _) = subnetwork_product_form(&[0.0, 2.0], &[0.0, 1.0], 1).unwrap();
        assert_relative_eq!(pf[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(pf[1], 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn implied_rates_uniform_and_two_state() {
        let rates = vec![0.0, 1.0, 1.0, 1.0];
        let (pf, _) = subnetwork_product_form(&rates, &rates, 3).unwrap();
        let (ln, ls) = implied_arrival_rates(&pf, &rates, &rates).unwrap();
        for &l in ln.iter().chain(ls.iter()) {
            assert_relative_eq!(l, 1.0, epsilon = 1e-12);
        }
        // two-state case: lambda_node(0) = mu_node(1) P(1)/P(0) collapses to
        // the shop rate, as the closed cycle demands
        let (pf, _) = subnetwork_product_form(&[0.0, 2.0], &[0.0, 1.0], 1).unwrap();
        let (ln, ls) = implied_arrival_rates(&pf, &[0.0, 2.0], &[0.0, 1.0]).unwrap();
        assert_relative_eq!(ln[0], 2.0 * pf[1] / pf[0], epsilon = 1e-12);
        assert_relative_eq!(ln[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(ls[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn implied_rates_satisfy_balance_identity() {
        let mu_node = vec![0.0, 1.7, 0.9, 2.2, 1.1];
        let mu_shop = vec![0.0, 0.8, 1.9, 1.3, 0.7];
        let (pf, _) = subnetwork_product_form(&mu_node, &mu_shop, 4).unwrap();
        let (ln, ls) = implied_arrival_rates(&pf, &mu_node, &mu_shop).unwrap();
        for n in 0..4 {
            assert_relative_eq!(ln[n] * pf[n], mu_node[n + 1] * pf[n + 1], epsilon = 1e-12);
            assert_relative_eq!(
                ls[n] * pf[4 - n],
                mu_shop[n + 1] * pf[4 - n - 1],
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn single_class_shop_is_state_dependent_occupancy() {
        // J=1: marginal follows the M/M/K occupancy law with the given
        // state-dependent arrivals
        let rates = vec![vec![2.0, 1.5, 1.0, 0.5]];
        let (_, marg) = repair_shop_multiclass(&rates, 1.3, 2).unwrap();
        let mu = 1.3;
        let k = 2.0;
        let mut w = vec![1.0f64];
        for n in 1..=4usize {
            let svc = mu * (n as f64).min(k);
            let last = *w.last().unwrap();
            w.push(last * rates[0][n - 1] / svc);
        }
        let tot: f64 = w.iter().sum();
        for n in 0..=4 {
            assert_relative_eq!(marg[0][n], w[n] / tot, epsilon = 1e-12);
        }
    }

    #[test]
    fn ample_shop_factorizes() {
        // K >= S_1 + S_2: each class sees its own ample-server queue and the
        // joint splits into a product of independent per-class laws
        let rates = vec![vec![1.0, 0.7], vec![0.4, 0.9, 0.2]];
        let (_, marg) = repair_shop_multiclass(&rates, 1.1, 5).unwrap();
        for (class, r) in rates.iter().enumerate() {
            let mu = 1.1;
            let mut w = vec![1.0f64];
            for n in 1..=r.len() {
                let last = *w.last().unwrap();
                w.push(last * r[n - 1] / (mu * n as f64));
            }
            let tot: f64 = w.iter().sum();
            for n in 0..w.len() {
                assert_relative_eq!(marg[class][n], w[n] / tot, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn shop_state_cap_enforced() {
        let rates: Vec<Vec<f64>> = (0..8).map(|_| vec![1.0; 9]).collect();
        assert!(matches!(
            repair_shop_multiclass(&rates, 1.0, 2),
            Err(Error::StateSpaceTooLarge { .. })
        ));
    }
}
