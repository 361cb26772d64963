//! Preemptive-priority repair shop with a single repairman.
//!
//! Class 1 always seizes the server, so its count is a plain birth-death
//! chain. Class 2's marginal comes out of a level recursion over the joint
//! chain (n_1, n_2): with A_k the within-level outflow/phase matrix at
//! class-2 count k and B_k = A_k - lambda_2(k) e_1 e', the unnormalized
//! level measures satisfy C_0 in null(B_0) and
//! C_k = lambda_2(k-1) B_k^{-1} C_{k-1}; the marginal is P_2(k) = e'C_k
//! normalized. Diagonal entries of A_k equal the total outflow rate of the
//! joint state: class-1 arrivals (below their population bound), class-2
//! arrivals (below theirs), and mu_r whenever anything is in the shop.
//!
//! More than two classes: class j sees everything above it as one Poisson
//! stream with rate equal to the higher classes' aggregate throughput, and
//! the two-class recursion applies with the aggregate as class 1, truncated
//! where its geometric tail drops below tolerance.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Arrival-rate specification of one priority class: `rates[n]` is the
/// arrival rate with n of this class at the shop, for n = 0..S-1.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorityClassSpec {
    pub rates: Vec<f64>,
}

impl PriorityClassSpec {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::invalid("rates", "class population bound must be >= 1"));
        }
        for (n, &r) in rates.iter().enumerate() {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::invalid(
                    "rates",
                    format!("rate at {n} must be nonnegative, got {r}"),
                ));
            }
        }
        Ok(Self { rates })
    }

    pub fn population(&self) -> usize {
        self.rates.len()
    }
}

/// Birth-death marginal of the highest class: unaffected by anything below
/// it under preemption.
fn birth_death(rates: &[f64], repair_rate: f64) -> Vec<f64> {
    let mut w = vec![1.0f64];
    for &r in rates {
        let last = *w.last().unwrap();
        w.push(last * r / repair_rate);
    }
    let tot: f64 = w.iter().sum();
    w.into_iter().map(|x| x / tot).collect()
}

/// Within-level matrix A_k for class-2 count k: tridiagonal over the class-1
/// count with -mu_r above, -lambda_1(i) below, and total-outflow diagonals.
fn level_matrix(rates1: &[f64], rates2: &[f64], k: usize, repair_rate: f64) -> DMatrix<f64> {
    let s1 = rates1.len();
    let s2 = rates2.len();
    let dim = s1 + 1;
    let mut a = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let mut out = 0.0;
        if i < s1 {
            out += rates1[i];
        }
        if k < s2 {
            out += rates2[k];
        }
        if i + k > 0 {
            out += repair_rate;
        }
        a[(i, i)] = out;
        if i >= 1 {
            a[(i, i - 1)] = -rates1[i - 1];
        }
        if i < s1 {
            a[(i, i + 1)] = -repair_rate;
        }
    }
    a
}

/// Nullspace direction of B_0 by rank-revealing SVD; sign fixed so the
/// entry sum is positive.
fn nullspace_direction(b0: &DMatrix<f64>) -> Result<DVector<f64>> {
    let dim = b0.nrows();
    let svd = b0.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smallest_idx = (0..sv.len())
        .min_by(|&a, &b| sv[a].total_cmp(&sv[b]))
        .unwrap();
    let scale = sv.iter().cloned().fold(0.0f64, f64::max).max(1.0);
    // dimension check: exactly one singular value may vanish
    let near_zero = sv.iter().filter(|&&s| s < 1e-9 * scale).count();
    if near_zero == 0 {
        return Err(Error::Inconsistent(
            "B_0 has no nullspace direction; level chain is not singular".into(),
        ));
    }
    if near_zero > 1 {
        return Err(Error::Inconsistent(format!(
            "B_0 nullspace dimension {near_zero} != 1"
        )));
    }
    let v_t = svd.v_t.as_ref().expect("svd computed with vectors");
    let mut c0 = DVector::zeros(dim);
    for i in 0..dim {
        c0[i] = v_t[(smallest_idx, i)];
    }
    if c0.sum() < 0.0 {
        c0.neg_mut();
    }
    Ok(c0)
}

/// Exact two-class marginals under preemptive priority with one repairman.
/// Returns (P_1 over 0..=S_1, P_2 over 0..=S_2).
pub fn two_class_steady_state(
    class1: &PriorityClassSpec,
    class2: &PriorityClassSpec,
    repair_rate: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(repair_rate > 0.0 && repair_rate.is_finite()) {
        return Err(Error::invalid("repair_rate", "must be strictly positive"));
    }
    let p1 = birth_death(&class1.rates, repair_rate);

    let s2 = class2.population();
    let mut levels: Vec<DVector<f64>> = Vec::with_capacity(s2 + 1);
    let b0 = {
        let mut a = level_matrix(&class1.rates, &class2.rates, 0, repair_rate);
        let lam2 = class2.rates[0];
        for col in 0..a.ncols() {
            a[(0, col)] -= lam2;
        }
        a
    };
    levels.push(nullspace_direction(&b0)?);
    for k in 1..=s2 {
        let mut bk = level_matrix(&class1.rates, &class2.rates, k, repair_rate);
        if k < s2 {
            let lam2 = class2.rates[k];
            for col in 0..bk.ncols() {
                bk[(0, col)] -= lam2;
            }
        }
        let lu = bk.lu();
        let rhs = levels[k - 1].scale(class2.rates[k - 1]);
        let ck = lu.solve(&rhs).ok_or(Error::IllConditioned {
            level: k,
            magnitude: 0.0,
        })?;
        levels.push(ck);
    }
    let sums: Vec<f64> = levels.iter().map(|c| c.sum()).collect();
    let total: f64 = sums.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Inconsistent("level measures sum to zero".into()));
    }
    let p2: Vec<f64> = sums.iter().map(|s| s / total).collect();
    for (k, &p) in p2.iter().enumerate() {
        if p < -1e-10 {
            return Err(Error::Inconsistent(format!(
                "P_2({k}) = {p} negative beyond tolerance"
            )));
        }
    }
    Ok((p1, p2.into_iter().map(|p| p.max(0.0)).collect()))
}

/// Truncation level for an aggregated class under load rho = lambda/mu:
/// smallest N whose geometric tail mass rho^N falls below 1e-10.
fn aggregate_truncation(rho: f64) -> Result<usize> {
    if rho <= 0.0 {
        return Ok(2);
    }
    if rho >= 1.0 {
        return Err(Error::Unsupported(format!(
            "aggregated higher-class load {rho:.4} >= 1; no finite truncation"
        )));
    }
    let n = (1e-10f64.ln() / rho.ln()).ceil() as usize;
    Ok(n.clamp(2, 2000))
}

/// Per-class marginals for J >= 2 classes in rank order. Classes beyond the
/// second see the ones above them as a single Poisson stream with rate equal
/// to their aggregate throughput.
pub fn j_class_steady_state(
    classes: &[PriorityClassSpec],
    repair_rate: f64,
) -> Result<Vec<Vec<f64>>> {
    if classes.len() < 2 {
        return Err(Error::invalid("classes", "need at least two priority classes"));
    }
    let mut marginals: Vec<Vec<f64>> = Vec::with_capacity(classes.len());
    marginals.push(birth_death(&classes[0].rates, repair_rate));
    for j in 1..classes.len() {
        if j == 1 {
            let (_, p2) = two_class_steady_state(&classes[0], &classes[1], repair_rate)?;
            marginals.push(p2);
            continue;
        }
        // aggregate throughput of all higher classes
        let mut agg_rate = 0.0;
        for i in 0..j {
            for (n, &r) in classes[i].rates.iter().enumerate() {
                agg_rate += r * marginals[i][n];
            }
        }
        if agg_rate == 0.0 {
            let (_, pj) = two_class_steady_state(
                &PriorityClassSpec::new(vec![0.0])?,
                &classes[j],
                repair_rate,
            )?;
            marginals.push(pj);
            continue;
        }
        let n_trunc = aggregate_truncation(agg_rate / repair_rate)?;
        let agg = PriorityClassSpec::new(vec![agg_rate; n_trunc])?;
        let (p_agg, pj) = two_class_steady_state(&agg, &classes[j], repair_rate)?;
        let tail = *p_agg.last().unwrap();
        if tail > 1e-8 {
            return Err(Error::TruncationTail {
                n_trunc,
                tail,
            });
        }
        marginals.push(pj);
    }
    Ok(marginals)
}

/// Shop marginals for the decomposition's priority step. Zero-population
/// classes pass through with the trivial marginal [1].
pub(crate) fn shop_marginals_preemptive(
    shop_arrival_rates: &[Vec<f64>],
    repair_rate: f64,
) -> Result<Vec<Vec<f64>>> {
    let active: Vec<(usize, PriorityClassSpec)> = shop_arrival_rates
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_empty())
        .map(|(i, r)| PriorityClassSpec::new(r.clone()).map(|c| (i, c)))
        .collect::<Result<_>>()?;
    let mut out: Vec<Vec<f64>> = shop_arrival_rates.iter().map(|_| vec![1.0]).collect();
    match active.len() {
        0 => {}
        1 => {
            let (i, ref c) = active[0];
            out[i] = birth_death(&c.rates, repair_rate);
        }
        _ => {
            let specs: Vec<PriorityClassSpec> = active.iter().map(|(_, c)| c.clone()).collect();
            let margs = j_class_steady_state(&specs, repair_rate)?;
            for ((i, _), m) in active.iter().zip(margs) {
                out[*i] = m;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn no_class2_arrivals_empty_marginal() {
        let c1 = PriorityClassSpec::new(vec![1.0, 0.5]).unwrap();
        let c2 = PriorityClassSpec::new(vec![0.0, 0.0]).unwrap();
        let (_, p2) = two_class_steady_state(&c1, &c2, 1.0).unwrap();
        assert_relative_eq!(p2[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(p2[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn class1_shielded_from_class2() {
        let c1 = PriorityClassSpec::new(vec![1.3, 0.9, 0.4]).unwrap();
        let weak = PriorityClassSpec::new(vec![0.1, 0.1]).unwrap();
        let strong = PriorityClassSpec::new(vec![1.0, 1.0]).unwrap();
        let (p1a, _) = two_class_steady_state(&c1, &weak, 0.8).unwrap();
        let (p1b, _) = two_class_steady_state(&c1, &strong, 0.8).unwrap();
        for (a, b) in p1a.iter().zip(&p1b) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn class1_is_birth_death() {
        let c1 = PriorityClassSpec::new(vec![2.0, 1.0]).unwrap();
        let c2 = PriorityClassSpec::new(vec![0.7]).unwrap();
        let (p1, _) = two_class_steady_state(&c1, &c2, 2.0).unwrap();
        // weights 1, 1, 1/2 -> [0.4, 0.4, 0.2]
        assert_relative_eq!(p1[0], 0.4, epsilon = 1e-12);
        assert_relative_eq!(p1[1], 0.4, epsilon = 1e-12);
        assert_relative_eq!(p1[2], 0.2, epsilon = 1e-12);
    }

    #[test]
    fn j_class_with_idle_third_class() {
        let classes = vec![
            PriorityClassSpec::new(vec![1.0, 0.5]).unwrap(),
            PriorityClassSpec::new(vec![0.8]).unwrap(),
            PriorityClassSpec::new(vec![0.0, 0.0]).unwrap(),
        ];
        let margs = j_class_steady_state(&classes, 1.5).unwrap();
        assert_relative_eq!(margs[2][0], 1.0, epsilon = 1e-10);
    }
}
