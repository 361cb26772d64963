//! Remaining-service-time transforms for the M_n/GI/1 queue.
//!
//! Let B be the installation-time transform and lambda_n the arrival rate
//! seen in state n. The transform F_n* of the remaining service time found by
//! an arrival that sees n parts in stock satisfies
//!
//!   F_n*(s) = lambda_n [ psi_B(s; lambda_n) + c_n psi_{F_{n-1}}(s; lambda_n) ],
//!   psi_Phi(s; a) = (Phi(s) - Phi(a)) / (a - s),
//!   c_n = B(lambda_n) / (1 - F_{n-1}*(lambda_n)),
//!
//! which reduces to the familiar pole-free recursion when s != lambda_n and,
//! via psi_Phi(a; a) = -Phi'(a), to the derivative scheme (with its 1/2, 1/3,
//! ... 1/n factors) when consecutive rates coincide. Everything here works on
//! scaled jets j_k = (-1)^k Phi^(k)(s) s^k / k!, which stay in [0, 1] for
//! transforms of distributions and keep high derivative orders well away from
//! overflow; in scaled form the equal-rate step is simply
//!
//!   F~_{n,k}(a) = B~_{k+1}(a) + c_n F~_{n-1,k+1}(a).
//!
//! Rates produced by the decomposition's fixed point can be equal only up to
//! roundoff, so rate vectors are snapped: values within a relative tolerance
//! collapse onto one representative, and exact equality selects the
//! derivative path.

use crate::error::{Error, Result};
use crate::lifetime::{InstallationTime, MAX_DERIVATIVE_ORDER};
use std::cell::RefCell;
use std::collections::HashMap;

/// Relative tolerance under which two arrival rates are treated as equal.
pub(crate) const RATE_SNAP_RTOL: f64 = 1e-9;

/// Conditioning floor for |1 - F*(lambda)| denominators.
const COND_FLOOR: f64 = 1e-14;

/// Caches scaled transform jets of one installation-time distribution,
/// keyed by the (bit-exact) evaluation point. Entries grow on demand, so a
/// jet entry is integrated at most once per solve context.
pub(crate) struct ServiceTransform<'a> {
    inst: &'a InstallationTime,
    cache: RefCell<HashMap<u64, Vec<f64>>>,
}

impl<'a> ServiceTransform<'a> {
    pub fn new(inst: &'a InstallationTime) -> Self {
        Self {
            inst,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn installation(&self) -> &InstallationTime {
        self.inst
    }

    /// Scaled jet of the service transform at s, entries 0..=order.
    pub fn jet(&self, s: f64, order: usize) -> Result<Vec<f64>> {
        let key = s.to_bits();
        {
            let cache = self.cache.borrow();
            if let Some(v) = cache.get(&key) {
                if v.len() > order {
                    return Ok(v[..=order].to_vec());
                }
            }
        }
        let jet = self.inst.transform_jet(s, order)?;
        let mut cache = self.cache.borrow_mut();
        let slot = cache.entry(key).or_default();
        if jet.len() > slot.len() {
            *slot = jet.clone();
        }
        Ok(jet)
    }

    pub fn value(&self, s: f64) -> Result<f64> {
        Ok(self.jet(s, 0)?[0])
    }
}

/// Collapses nearly-equal rates onto shared representatives and validates
/// positivity. The first occurrence of each group supplies the value.
pub(crate) fn snap_rates(rates: &[f64]) -> Result<Vec<f64>> {
    let mut snapped = Vec::with_capacity(rates.len());
    let mut reps: Vec<f64> = Vec::new();
    for (i, &r) in rates.iter().enumerate() {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid(
                "arrival_rates",
                format!("rate at index {i} must be positive and finite, got {r}"),
            ));
        }
        let rep = reps
            .iter()
            .copied()
            .find(|&p| (r - p).abs() <= RATE_SNAP_RTOL * r.abs().max(p.abs()));
        match rep {
            Some(p) => snapped.push(p),
            None => {
                reps.push(r);
                snapped.push(r);
            }
        }
    }
    Ok(snapped)
}

/// Jet evaluator for the F_n* family over a fixed (snapped) rate vector.
pub(crate) struct RemainingServiceEval<'a, 'b> {
    svc: &'b ServiceTransform<'a>,
    rates: &'b [f64],
    memo: HashMap<(usize, u64), Vec<f64>>,
}

impl<'a, 'b> RemainingServiceEval<'a, 'b> {
    pub fn new(svc: &'b ServiceTransform<'a>, rates: &'b [f64]) -> Self {
        Self {
            svc,
            rates,
            memo: HashMap::new(),
        }
    }

    /// Scaled jet of F_n* at point s (s must be a snapped rate value).
    pub fn jet(&mut self, n: usize, s: f64, order: usize) -> Result<Vec<f64>> {
        let key = (n, s.to_bits());
        if let Some(v) = self.memo.get(&key) {
            if v.len() > order {
                return Ok(v[..=order].to_vec());
            }
        }
        if order > MAX_DERIVATIVE_ORDER {
            return Err(Error::DerivativeOrder {
                required: order,
                cap: MAX_DERIVATIVE_ORDER,
            });
        }
        let jet = if n == 0 {
            self.svc.jet(s, order)?
        } else {
            let a = self.rates[n];
            let v_prev = self.value(n - 1, a)?;
            let denom = 1.0 - v_prev;
            if denom.abs() < COND_FLOOR {
                return Err(Error::IllConditioned {
                    level: n,
                    magnitude: denom.abs(),
                });
            }
            let c = self.svc.value(a)? / denom;
            if s == a {
                // equal-rate (derivative) step
                let phi = self.jet(n - 1, a, order + 1)?;
                let b = self.svc.jet(a, order + 1)?;
                (0..=order).map(|k| b[k + 1] + c * phi[k + 1]).collect()
            } else {
                let phi = self.jet(n - 1, s, order)?;
                let b = self.svc.jet(s, order)?;
                let b_a = self.svc.value(a)?;
                let inv = 1.0 / (a - s);
                let mut psi_b = Vec::with_capacity(order + 1);
                let mut psi_f = Vec::with_capacity(order + 1);
                psi_b.push((b[0] - b_a) * inv);
                psi_f.push((phi[0] - v_prev) * inv);
                for k in 1..=order {
                    psi_b.push((b[k] - s * psi_b[k - 1]) * inv);
                    psi_f.push((phi[k] - s * psi_f[k - 1]) * inv);
                }
                (0..=order)
                    .map(|k| a * (psi_b[k] + c * psi_f[k]))
                    .collect()
            }
        };
        let slot = self.memo.entry(key).or_default();
        if jet.len() > slot.len() {
            *slot = jet.clone();
        }
        Ok(jet)
    }

    pub fn value(&mut self, n: usize, s: f64) -> Result<f64> {
        Ok(self.jet(n, s, 0)?[0])
    }
}

/// Transform and expected-remaining-service tables for one rate vector.
///
/// `rates` holds lambda_0..lambda_(S-1) after snapping (lambda_S = 0 is
/// implicit). For 0 <= i <= S-2, `f_at_next[i]` is F_i*(lambda_(i+1)),
/// `service_at_next[i]` is B(lambda_(i+1)), and `ratios[i]` their steady-state
/// combination (1 - F_i*)/B. `expected_remaining[n-1]` is R(n) for
/// 1 <= n <= S-1. `head_jets[n]` carries the scaled derivative stack of F_n*
/// at lambda_(n+1) wherever the equal-rate scheme was in effect.
#[derive(Debug, Clone)]
pub struct RemainingServiceTable {
    pub rates: Vec<f64>,
    pub f_at_next: Vec<f64>,
    pub service_at_next: Vec<f64>,
    pub ratios: Vec<f64>,
    pub expected_remaining: Vec<f64>,
    pub mean_installation: f64,
    pub head_jets: Vec<Vec<f64>>,
}

/// Builds the remaining-service table for an installation time and a
/// positive rate vector lambda_0..lambda_(S-1).
pub(crate) fn remaining_service_table(
    svc: &ServiceTransform<'_>,
    raw_rates: &[f64],
) -> Result<RemainingServiceTable> {
    let rates = snap_rates(raw_rates)?;
    let s_len = rates.len();
    let mean_installation = svc.installation().mean()?;

    let mut eval = RemainingServiceEval::new(svc, &rates);
    let mut f_at_next = Vec::new();
    let mut service_at_next = Vec::new();
    let mut ratios = Vec::new();
    let mut head_jets = Vec::new();
    for i in 0..s_len.saturating_sub(1) {
        let s = rates[i + 1];
        let v = eval.value(i, s)?;
        if !v.is_finite() || v < -1e-9 || v > 1.0 + 1e-9 {
            return Err(Error::Inconsistent(format!(
                "remaining-service transform F_{i}*({s}) = {v} outside [0, 1]"
            )));
        }
        let v = v.clamp(0.0, 1.0);
        let b = svc.value(s)?;
        f_at_next.push(v);
        service_at_next.push(b);
        ratios.push((1.0 - v) / b);
        if i > 0 && rates[i] == s {
            // record the derivative stack the equal-rate scheme maintained
            head_jets.push(eval.jet(i, s, 1)?);
        } else {
            head_jets.push(vec![v]);
        }
    }

    // R(n) per the expected-remaining recursion, seeded with R(0) = 1/mu.
    let mut expected_remaining = Vec::new();
    let mut prev = mean_installation;
    for n in 1..s_len {
        let b = service_at_next[n - 1];
        let v = f_at_next[n - 1];
        let denom = 1.0 - v;
        if denom.abs() < COND_FLOOR {
            return Err(Error::IllConditioned {
                level: n,
                magnitude: denom.abs(),
            });
        }
        let r = b * prev / denom - 1.0 / rates[n] + mean_installation;
        expected_remaining.push(r);
        prev = r;
    }

    Ok(RemainingServiceTable {
        rates,
        f_at_next,
        service_at_next,
        ratios,
        expected_remaining,
        mean_installation,
        head_jets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifetime::LifetimeSpec;
    use approx::assert_relative_eq;

    #[test]
    fn snap_groups_close_rates() {
        let snapped = snap_rates(&[1.0, 1.0 + 1e-12, 0.5, 1.0 - 1e-12]).unwrap();
        assert_eq!(snapped[0], snapped[1]);
        assert_eq!(snapped[0], snapped[3]);
        assert_eq!(snapped[2], 0.5);
    }

    #[test]
    fn snap_rejects_nonpositive() {
        assert!(snap_rates(&[1.0, 0.0]).is_err());
        assert!(snap_rates(&[-0.5]).is_err());
    }

    #[test]
    fn exponential_remaining_service_is_memoryless() {
        // For exponential service every F_n* equals the service transform.
        let inst =
            InstallationTime::with_age(LifetimeSpec::Exponential { rate: 1.0 }, f64::INFINITY)
                .unwrap();
        let svc = ServiceTransform::new(&inst);
        let rates = [3.0, 2.0, 1.0];
        let table = remaining_service_table(&svc, &rates).unwrap();
        for (i, &v) in table.f_at_next.iter().enumerate() {
            let s = rates[i + 1];
            assert_relative_eq!(v, 1.0 / (1.0 + s), epsilon = 1e-12);
        }
        // and R(n) = 1 for all n
        for &r in &table.expected_remaining {
            assert_relative_eq!(r, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn expected_remaining_base_case() {
        // R(1) = (1/mu)/(1 - B(lambda_1)) - 1/lambda_1; exp(1), tau = inf,
        // S = 2, K = 2: lambda_1 = 1, B(1) = 1/2, R(1) = 2 - 1 = 1.
        let inst =
            InstallationTime::with_age(LifetimeSpec::Exponential { rate: 1.0 }, f64::INFINITY)
                .unwrap();
        let svc = ServiceTransform::new(&inst);
        let table = remaining_service_table(&svc, &[2.0, 1.0]).unwrap();
        assert_relative_eq!(table.expected_remaining[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn equal_rate_step_matches_series_limit() {
        // F_1*(lambda) at an exactly repeated rate must equal the limit of
        // F_1*(s) as s -> lambda computed on the distinct-rate branch.
        let inst = InstallationTime::with_age(
            LifetimeSpec::Erlang {
                phases: 3,
                rate: 3.0,
            },
            0.8,
        )
        .unwrap();
        let svc = ServiceTransform::new(&inst);
        let lambda = 1.3;

        let rates_eq = [lambda, lambda];
        let t_eq = remaining_service_table(&svc, &rates_eq).unwrap();
        let v_eq = t_eq.f_at_next[0];

        let mut last = f64::NAN;
        for eps in [1e-4, 1e-5, 1e-6] {
            let rates = [lambda, lambda * (1.0 + eps)];
            let t = remaining_service_table(&svc, &rates).unwrap();
            last = t.f_at_next[0];
        }
        assert_relative_eq!(v_eq, last, max_relative = 1e-5);
    }

    #[test]
    fn derivative_stack_reduces_order_by_level() {
        // constant-rate head: jets must be retrievable to the depth the
        // triangle needs, and the first derivative entries must be finite
        let inst = InstallationTime::with_age(
            LifetimeSpec::Erlang {
                phases: 2,
                rate: 1.0,
            },
            1.5,
        )
        .unwrap();
        let svc = ServiceTransform::new(&inst);
        let rates = [2.0, 2.0, 2.0, 2.0, 1.0];
        let table = remaining_service_table(&svc, &rates).unwrap();
        assert_eq!(table.f_at_next.len(), 4);
        for jet in &table.head_jets {
            assert!(jet.iter().all(|x| x.is_finite()));
        }
    }
}
