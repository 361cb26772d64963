//! Component lifetime distributions and the installation-time construction.
//!
//! A component's installation time is Z = min(X, tau): it ends at failure
//! (corrective, X < tau) or at the age threshold (preventive). For a fixed
//! threshold the distribution of Z has density f on [0, tau) plus an atom of
//! mass 1 - F(tau) at tau, so its Laplace–Stieltjes transform is
//!
//!   E[e^(-sZ)] = ∫_0^tau f(x) e^(-sx) dx + e^(-s tau) (1 - F(tau)).
//!
//! The truncated moment integrals M_k(s) = ∫_0^tau x^k f(x) e^(-sx) dx supply
//! every transform derivative the solvers need: (-1)^k d^k/ds^k E[e^(-sZ)] =
//! M_k(s) + tau^k e^(-s tau) (1 - F(tau)).

use crate::error::{Error, Result};
use crate::quadrature;
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

/// Hard cap on the derivative order of transform evaluations.
pub const MAX_DERIVATIVE_ORDER: usize = 64;

/// Default absolute tolerance for transform quadrature.
pub const QUAD_TOL: f64 = 1e-12;

/// Tail mass below which an infinite integration range is truncated.
const TAIL_EPS: f64 = 1e-14;

/// A parametric component-lifetime distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LifetimeSpec {
    /// Constant hazard; rate > 0.
    Exponential { rate: f64 },
    /// Shape/scale parameterization; cv = 1/sqrt(shape).
    Gamma { shape: f64, scale: f64 },
    /// Shape/scale parameterization.
    Weibull { shape: f64, scale: f64 },
    /// Integer-phase gamma; mean = phases/rate, cv = 1/sqrt(phases).
    Erlang { phases: u32, rate: f64 },
    /// All mass at a single point. Accepted by the simulator only; the
    /// analytic solvers reject it because it has no density.
    Degenerate { point: f64 },
}

/// Families usable with [`from_mean_cv`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentFitFamily {
    Gamma,
    Weibull,
}

impl LifetimeSpec {
    /// Validates parameter positivity.
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            LifetimeSpec::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            LifetimeSpec::Gamma { shape, scale } => {
                shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()
            }
            LifetimeSpec::Weibull { shape, scale } => {
                shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()
            }
            LifetimeSpec::Erlang { phases, rate } => phases >= 1 && rate > 0.0 && rate.is_finite(),
            LifetimeSpec::Degenerate { point } => point > 0.0 && point.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(
                "lifetime",
                format!("parameters must be strictly positive: {self:?}"),
            ))
        }
    }

    /// Probability density. The degenerate family has none.
    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match *self {
            LifetimeSpec::Exponential { rate } => rate * (-rate * x).exp(),
            LifetimeSpec::Gamma { shape, scale } => {
                if x == 0.0 {
                    return if shape < 1.0 {
                        f64::INFINITY
                    } else if shape == 1.0 {
                        1.0 / scale
                    } else {
                        0.0
                    };
                }
                ((shape - 1.0) * x.ln() - x / scale - ln_gamma(shape) - shape * scale.ln()).exp()
            }
            LifetimeSpec::Weibull { shape, scale } => {
                if x == 0.0 {
                    return if shape < 1.0 {
                        f64::INFINITY
                    } else if shape == 1.0 {
                        1.0 / scale
                    } else {
                        0.0
                    };
                }
                let z = x / scale;
                ((shape.ln() - scale.ln()) + (shape - 1.0) * z.ln() - z.powf(shape)).exp()
            }
            LifetimeSpec::Erlang { phases, rate } => LifetimeSpec::Gamma {
                shape: phases as f64,
                scale: 1.0 / rate,
            }
            .pdf(x),
            LifetimeSpec::Degenerate { .. } => f64::NAN,
        }
    }

    /// Cumulative distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x.is_infinite() {
            return 1.0;
        }
        match *self {
            LifetimeSpec::Exponential { rate } => -(-rate * x).exp_m1(),
            LifetimeSpec::Gamma { shape, scale } => gamma_lr(shape, x / scale),
            LifetimeSpec::Weibull { shape, scale } => -(-((x / scale).powf(shape))).exp_m1(),
            LifetimeSpec::Erlang { phases, rate } => gamma_lr(phases as f64, rate * x),
            LifetimeSpec::Degenerate { point } => {
                if x >= point {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Survival function 1 - F(x), computed without cancellation.
    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        if x.is_infinite() {
            return 0.0;
        }
        match *self {
            LifetimeSpec::Exponential { rate } => (-rate * x).exp(),
            LifetimeSpec::Gamma { shape, scale } => gamma_ur(shape, x / scale),
            LifetimeSpec::Weibull { shape, scale } => (-((x / scale).powf(shape))).exp(),
            LifetimeSpec::Erlang { phases, rate } => gamma_ur(phases as f64, rate * x),
            LifetimeSpec::Degenerate { point } => {
                if x >= point {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            LifetimeSpec::Exponential { rate } => 1.0 / rate,
            LifetimeSpec::Gamma { shape, scale } => shape * scale,
            LifetimeSpec::Weibull { shape, scale } => scale * gamma_fn(1.0 + 1.0 / shape),
            LifetimeSpec::Erlang { phases, rate } => phases as f64 / rate,
            LifetimeSpec::Degenerate { point } => point,
        }
    }

    /// Coefficient of variation (std/mean).
    pub fn cv(&self) -> f64 {
        match *self {
            LifetimeSpec::Exponential { .. } => 1.0,
            LifetimeSpec::Gamma { shape, .. } => shape.sqrt().recip(),
            LifetimeSpec::Weibull { shape, .. } => {
                let g1 = gamma_fn(1.0 + 1.0 / shape);
                let g2 = gamma_fn(1.0 + 2.0 / shape);
                (g2 / (g1 * g1) - 1.0).max(0.0).sqrt()
            }
            LifetimeSpec::Erlang { phases, .. } => (phases as f64).sqrt().recip(),
            LifetimeSpec::Degenerate { .. } => 0.0,
        }
    }

    /// Point beyond which at most `eps` probability mass remains.
    pub fn tail_cutoff(&self, eps: f64) -> f64 {
        match *self {
            LifetimeSpec::Exponential { rate } => -eps.ln() / rate,
            LifetimeSpec::Weibull { shape, scale } => scale * (-eps.ln()).powf(1.0 / shape),
            LifetimeSpec::Degenerate { point } => point,
            LifetimeSpec::Gamma { .. } | LifetimeSpec::Erlang { .. } => {
                // bracket on the survival function, then bisect
                let mut hi = self.mean().max(1.0);
                while self.survival(hi) > eps {
                    hi *= 2.0;
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.survival(mid) > eps {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-9 * hi.max(1.0) {
                        break;
                    }
                }
                hi
            }
        }
    }

    fn has_density(&self) -> bool {
        !matches!(self, LifetimeSpec::Degenerate { .. })
    }
}

fn gamma_fn(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Builds a gamma or weibull lifetime with the requested mean and coefficient
/// of variation. Gamma is closed form (shape = 1/cv^2, scale = mean cv^2);
/// weibull requires scalar root finding on the gamma-ratio cv equation.
pub fn from_mean_cv(family: MomentFitFamily, mean: f64, cv: f64) -> Result<LifetimeSpec> {
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::invalid("mean", "must be strictly positive"));
    }
    if !(cv > 0.0 && cv <= 1.5) {
        return Err(Error::invalid("cv", "must lie in (0, 1.5]"));
    }
    match family {
        MomentFitFamily::Gamma => Ok(LifetimeSpec::Gamma {
            shape: 1.0 / (cv * cv),
            scale: mean * cv * cv,
        }),
        MomentFitFamily::Weibull => {
            let target = cv * cv;
            let cv2 = |k: f64| {
                let g1 = ln_gamma(1.0 + 1.0 / k);
                let g2 = ln_gamma(1.0 + 2.0 / k);
                (g2 - 2.0 * g1).exp() - 1.0
            };
            // cv^2 is strictly decreasing in the shape
            let (mut lo, mut hi) = (0.3, 400.0);
            if cv2(lo) < target || cv2(hi) > target {
                return Err(Error::RootFind {
                    lo,
                    hi,
                    reason: format!(
                        "cv^2 target {target:.6} outside bracket values ({:.6}, {:.6})",
                        cv2(lo),
                        cv2(hi)
                    ),
                });
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if cv2(mid) > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if (hi - lo) < 1e-13 * hi {
                    break;
                }
            }
            let shape = 0.5 * (lo + hi);
            let scale = mean / gamma_fn(1.0 + 1.0 / shape);
            Ok(LifetimeSpec::Weibull { shape, scale })
        }
    }
}

/// Replacement trigger: a fixed age threshold (possibly infinite, meaning
/// pure corrective maintenance) or an independent random threshold.
#[derive(Debug, Clone, PartialEq)]
pub enum Threshold {
    Age(f64),
    Random(LifetimeSpec),
}

/// The installation time Z = min(lifetime, threshold).
#[derive(Debug, Clone, PartialEq)]
pub struct InstallationTime {
    lifetime: LifetimeSpec,
    threshold: Threshold,
}

impl InstallationTime {
    /// Fixed age threshold; `tau` may be `f64::INFINITY`.
    pub fn with_age(lifetime: LifetimeSpec, tau: f64) -> Result<Self> {
        lifetime.validate()?;
        if !(tau > 0.0) {
            return Err(Error::invalid(
                "tau",
                "age threshold must be strictly positive (installation time degenerates at 0)",
            ));
        }
        Ok(Self {
            lifetime,
            threshold: Threshold::Age(tau),
        })
    }

    /// Independent random threshold Y with its own distribution. Supported by
    /// the distributional operations but not wired into the solvers.
    pub fn with_random_threshold(lifetime: LifetimeSpec, threshold: LifetimeSpec) -> Result<Self> {
        lifetime.validate()?;
        threshold.validate()?;
        Ok(Self {
            lifetime,
            threshold: Threshold::Random(threshold),
        })
    }

    pub fn lifetime(&self) -> &LifetimeSpec {
        &self.lifetime
    }

    pub fn threshold(&self) -> &Threshold {
        &self.threshold
    }

    /// The fixed age threshold, or an error for random thresholds.
    pub fn fixed_age(&self) -> Result<f64> {
        match self.threshold {
            Threshold::Age(tau) => Ok(tau),
            Threshold::Random(_) => Err(Error::Unsupported(
                "random age thresholds are not wired into the solvers".into(),
            )),
        }
    }

    /// CDF of Z: G(z) = F(z) + H(z) - F(z) H(z), which collapses to
    /// G(z) = F(z) for z < tau and 1 for z >= tau under a fixed threshold.
    pub fn cdf(&self, z: f64) -> f64 {
        match &self.threshold {
            Threshold::Age(tau) => {
                if z >= *tau {
                    1.0
                } else {
                    self.lifetime.cdf(z)
                }
            }
            Threshold::Random(y) => {
                let f = self.lifetime.cdf(z);
                let h = y.cdf(z);
                f + h - f * h
            }
        }
    }

    /// Mean installation time ∫ (1-F)(1-H) dx; equals ∫_0^tau (1-F(x)) dx for
    /// a fixed threshold. Strictly positive and at most min(E[X], E[threshold]).
    pub fn mean(&self) -> Result<f64> {
        match &self.threshold {
            Threshold::Age(tau) => {
                let cut = if tau.is_finite() {
                    *tau
                } else {
                    self.lifetime.tail_cutoff(TAIL_EPS)
                };
                match self.lifetime {
                    // closed forms keep the optimizer loops cheap
                    LifetimeSpec::Exponential { rate } => {
                        Ok((1.0 - (-rate * cut).exp()).max(0.0) / rate + self.tail_mean_beyond(cut))
                    }
                    _ => {
                        let lt = self.lifetime;
                        let v = quadrature::integrate(|x| lt.survival(x), 0.0, cut, QUAD_TOL)?;
                        Ok(v + self.tail_mean_beyond(cut))
                    }
                }
            }
            Threshold::Random(y) => {
                let cut = self
                    .lifetime
                    .tail_cutoff(TAIL_EPS)
                    .min(y.tail_cutoff(TAIL_EPS));
                let lt = self.lifetime;
                let yy = *y;
                quadrature::integrate(|x| lt.survival(x) * yy.survival(x), 0.0, cut, QUAD_TOL)
            }
        }
    }

    // For tau = infinity the integral is truncated at the tail cutoff; the
    // remaining mass is below TAIL_EPS and contributes nothing at tolerance.
    fn tail_mean_beyond(&self, _cut: f64) -> f64 {
        0.0
    }

    /// Probability that an installation ends correctively (failure strictly
    /// before the threshold): P(X < tau), or P(X < Y) for random thresholds.
    pub fn corrective_probability(&self) -> Result<f64> {
        match &self.threshold {
            Threshold::Age(tau) => Ok(self.lifetime.cdf(*tau)),
            Threshold::Random(y) => {
                let cut = self
                    .lifetime
                    .tail_cutoff(TAIL_EPS)
                    .min(y.tail_cutoff(TAIL_EPS).max(y.mean() * 4.0));
                let lt = self.lifetime;
                let yy = *y;
                quadrature::integrate(|x| lt.pdf(x) * yy.survival(x), 0.0, cut, QUAD_TOL)
            }
        }
    }

    /// Truncated transform moment M_k(s) = ∫_0^tau x^k f(x) e^(-sx) dx, so
    /// that the k-th derivative of G*(s) = ∫_0^tau f(x) e^(-sx) dx is
    /// (-1)^k M_k(s). For k = 0 this is G*(s) itself. For a random threshold
    /// the integrand carries the threshold's survival weight instead of the
    /// hard truncation.
    pub fn truncated_laplace(&self, s: f64, k: usize) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::invalid("s", "transform argument must be nonnegative"));
        }
        if k > MAX_DERIVATIVE_ORDER {
            return Err(Error::DerivativeOrder {
                required: k,
                cap: MAX_DERIVATIVE_ORDER,
            });
        }
        if !self.lifetime.has_density() {
            return Err(Error::DegenerateLifetime);
        }
        match &self.threshold {
            Threshold::Age(tau) => {
                if let Some(v) = self.closed_form_mk(s, k, *tau) {
                    return Ok(v);
                }
                let cut = if tau.is_finite() {
                    *tau
                } else {
                    self.lifetime.tail_cutoff(TAIL_EPS)
                };
                let lt = self.lifetime;
                quadrature::integrate(|x| lt.pdf(x) * moment_weight(x, s, k), 0.0, cut, QUAD_TOL)
            }
            Threshold::Random(y) => {
                let cut = self
                    .lifetime
                    .tail_cutoff(TAIL_EPS)
                    .min(y.tail_cutoff(TAIL_EPS));
                let lt = self.lifetime;
                let yy = *y;
                // continuous-threshold density g = f (1-H) + h (1-F)
                quadrature::integrate(
                    |x| {
                        (lt.pdf(x) * yy.survival(x) + yy.pdf(x) * lt.survival(x))
                            * moment_weight(x, s, k)
                    },
                    0.0,
                    cut,
                    QUAD_TOL,
                )
            }
        }
    }

    /// Gamma-family M_k(s) via the incomplete-gamma identity; `None` when no
    /// closed form applies for this lifetime.
    fn closed_form_mk(&self, s: f64, k: usize, tau: f64) -> Option<f64> {
        let (shape, rate) = match self.lifetime {
            LifetimeSpec::Exponential { rate } => (1.0, rate),
            LifetimeSpec::Gamma { shape, scale } => (shape, 1.0 / scale),
            LifetimeSpec::Erlang { phases, rate } => (phases as f64, rate),
            _ => return None,
        };
        let kk = k as f64;
        let log_coef = ln_gamma(shape + kk) - ln_gamma(shape) + shape * rate.ln()
            - (shape + kk) * (rate + s).ln();
        let inc = if tau.is_finite() {
            gamma_lr(shape + kk, (rate + s) * tau)
        } else {
            1.0
        };
        Some(log_coef.exp() * inc)
    }

    /// Full Laplace–Stieltjes transform of Z including the preventive atom:
    /// E[e^(-sZ)] = M_0(s) + e^(-s tau) (1 - F(tau)).
    pub fn transform(&self, s: f64) -> Result<f64> {
        let m0 = self.truncated_laplace(s, 0)?;
        Ok(m0 + self.atom_term(s, 0))
    }

    /// Scaled transform jet at s > 0: entry k is
    /// (-1)^k d^k/ds^k E[e^(-sZ)] * s^k / k!, a quantity in [0, 1] for every
    /// order. These are what the remaining-service recursions consume; the
    /// scaling keeps the capacitated derivative scheme free of factorial
    /// overflow.
    pub fn transform_jet(&self, s: f64, order: usize) -> Result<Vec<f64>> {
        if !(s > 0.0) {
            return Err(Error::invalid("s", "jet evaluation requires s > 0"));
        }
        if order > MAX_DERIVATIVE_ORDER {
            return Err(Error::DerivativeOrder {
                required: order,
                cap: MAX_DERIVATIVE_ORDER,
            });
        }
        if !self.lifetime.has_density() {
            return Err(Error::DegenerateLifetime);
        }
        let mut out = Vec::with_capacity(order + 1);
        match &self.threshold {
            Threshold::Age(tau) => {
                for k in 0..=order {
                    let scaled_mk = if let Some(mk) = self.closed_form_mk_scaled(s, k, *tau) {
                        mk
                    } else {
                        let cut = if tau.is_finite() {
                            *tau
                        } else {
                            self.lifetime.tail_cutoff(TAIL_EPS)
                        };
                        let lt = self.lifetime;
                        quadrature::integrate(
                            |x| lt.pdf(x) * poisson_weight(s * x, k),
                            0.0,
                            cut,
                            QUAD_TOL,
                        )?
                    };
                    out.push(scaled_mk + self.atom_term(s, k));
                }
            }
            Threshold::Random(y) => {
                let cut = self
                    .lifetime
                    .tail_cutoff(TAIL_EPS)
                    .min(y.tail_cutoff(TAIL_EPS));
                let lt = self.lifetime;
                let yy = *y;
                for k in 0..=order {
                    out.push(quadrature::integrate(
                        |x| {
                            (lt.pdf(x) * yy.survival(x) + yy.pdf(x) * lt.survival(x))
                                * poisson_weight(s * x, k)
                        },
                        0.0,
                        cut,
                        QUAD_TOL,
                    )?);
                }
            }
        }
        Ok(out)
    }

    /// Scaled gamma-family moment s^k M_k(s) / k!.
    fn closed_form_mk_scaled(&self, s: f64, k: usize, tau: f64) -> Option<f64> {
        let (shape, rate) = match self.lifetime {
            LifetimeSpec::Exponential { rate } => (1.0, rate),
            LifetimeSpec::Gamma { shape, scale } => (shape, 1.0 / scale),
            LifetimeSpec::Erlang { phases, rate } => (phases as f64, rate),
            _ => return None,
        };
        let kk = k as f64;
        let log_coef = ln_gamma(shape + kk) - ln_gamma(shape) - ln_gamma(kk + 1.0)
            + kk * s.ln()
            + shape * rate.ln()
            - (shape + kk) * (rate + s).ln();
        let inc = if tau.is_finite() {
            gamma_lr(shape + kk, (rate + s) * tau)
        } else {
            1.0
        };
        Some(log_coef.exp() * inc)
    }

    /// Atom contribution to the scaled jet: (s tau)^k e^(-s tau) (1-F(tau)) / k!.
    fn atom_term(&self, s: f64, k: usize) -> f64 {
        match &self.threshold {
            Threshold::Age(tau) if tau.is_finite() => {
                let sf = self.lifetime.survival(*tau);
                if sf <= 0.0 {
                    0.0
                } else {
                    sf * poisson_weight(s * tau, k)
                }
            }
            _ => 0.0,
        }
    }
}

/// x^k e^(-sx) without the 1/k! scaling, for the raw M_k integrals.
fn moment_weight(x: f64, s: f64, k: usize) -> f64 {
    if k == 0 {
        return (-s * x).exp();
    }
    if x <= 0.0 {
        return 0.0;
    }
    (k as f64 * x.ln() - s * x).exp()
}

/// u^k e^(-u) / k!, evaluated in log space; bounded by 1 for all u >= 0.
fn poisson_weight(u: f64, k: usize) -> f64 {
    if k == 0 {
        return (-u).exp();
    }
    if u <= 0.0 {
        return 0.0;
    }
    (k as f64 * u.ln() - u - ln_gamma(k as f64 + 1.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn exponential_transform_closed_form() {
        // rate/(rate+s) at tau = infinity
        let inst = InstallationTime::with_age(LifetimeSpec::Exponential { rate: 1.0 }, f64::INFINITY)
            .unwrap();
        assert_relative_eq!(inst.truncated_laplace(1.0, 0).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn transform_at_zero_is_truncated_mass() {
        let inst =
            InstallationTime::with_age(LifetimeSpec::Exponential { rate: 1.0 }, LN2).unwrap();
        assert_relative_eq!(inst.truncated_laplace(0.0, 0).unwrap(), 0.5, epsilon = 1e-12);
        // full transform at 0 is always 1 (proper distribution incl. atom)
        assert_relative_eq!(inst.transform(0.0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gamma_first_derivative_matches_brute_force() {
        // frozen from a 1e6-panel composite rule: ∫_0^1 x^2 e^(-1.5x) dx
        let inst = InstallationTime::with_age(
            LifetimeSpec::Gamma {
                shape: 2.0,
                scale: 1.0,
            },
            1.0,
        )
        .unwrap();
        assert_relative_eq!(
            inst.truncated_laplace(0.5, 1).unwrap(),
            0.11327595227374333,
            epsilon = 1e-10
        );
    }

    #[test]
    fn quadrature_and_closed_form_agree_for_erlang() {
        let er = LifetimeSpec::Erlang {
            phases: 3,
            rate: 3.0,
        };
        let inst = InstallationTime::with_age(er, 1.25).unwrap();
        for k in [0usize, 1, 3, 7] {
            for s in [0.25, 1.0, 4.0] {
                let closed = inst.closed_form_mk(s, k, 1.25).unwrap();
                let quad = quadrature::integrate(
                    |x| er.pdf(x) * moment_weight(x, s, k),
                    0.0,
                    1.25,
                    1e-13,
                )
                .unwrap();
                assert_relative_eq!(closed, quad, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn mean_installation_examples() {
        let exp1 = LifetimeSpec::Exponential { rate: 1.0 };
        let inf = InstallationTime::with_age(exp1, f64::INFINITY).unwrap();
        assert_relative_eq!(inf.mean().unwrap(), 1.0, epsilon = 1e-10);
        let ln2 = InstallationTime::with_age(exp1, LN2).unwrap();
        assert_relative_eq!(ln2.mean().unwrap(), 0.5, epsilon = 1e-10);
        // frozen from high-resolution numerical integration
        let wb = from_mean_cv(MomentFitFamily::Weibull, 2.0, 0.3).unwrap();
        let inst = InstallationTime::with_age(wb, 2.0).unwrap();
        assert_relative_eq!(inst.mean().unwrap(), 1.75767463307372137, epsilon = 1e-8);
    }

    #[test]
    fn tau_zero_rejected() {
        let err = InstallationTime::with_age(LifetimeSpec::Exponential { rate: 1.0 }, 0.0);
        assert!(err.is_err());
    }

    #[test]
    fn from_mean_cv_gamma_closed_form() {
        let g = from_mean_cv(MomentFitFamily::Gamma, 2.0, 0.5).unwrap();
        match g {
            LifetimeSpec::Gamma { shape, scale } => {
                assert_relative_eq!(shape, 4.0, epsilon = 1e-12);
                assert_relative_eq!(scale, 0.5, epsilon = 1e-12);
            }
            _ => panic!("expected gamma"),
        }
        // cv = 1 is the exponential
        let g = from_mean_cv(MomentFitFamily::Gamma, 2.0, 1.0).unwrap();
        match g {
            LifetimeSpec::Gamma { shape, scale } => {
                assert_relative_eq!(shape, 1.0, epsilon = 1e-12);
                assert_relative_eq!(scale, 2.0, epsilon = 1e-12);
            }
            _ => panic!("expected gamma"),
        }
    }

    #[test]
    fn from_mean_cv_weibull_matches_bisection_oracle() {
        // frozen from an independent bisection on the gamma-ratio equation
        let w = from_mean_cv(MomentFitFamily::Weibull, 2.0, 0.1).unwrap();
        match w {
            LifetimeSpec::Weibull { shape, scale } => {
                assert_relative_eq!(shape, 12.153434194956146, epsilon = 1e-8);
                assert_relative_eq!(scale, 2.0860753616239612, epsilon = 1e-8);
            }
            _ => panic!("expected weibull"),
        }
    }

    #[test]
    fn from_mean_cv_round_trip() {
        for family in [MomentFitFamily::Gamma, MomentFitFamily::Weibull] {
            for cv in [0.1, 0.3, 0.5, 0.9, 1.2, 1.5] {
                for mean in [0.5, 2.0, 7.3] {
                    let spec = from_mean_cv(family, mean, cv).unwrap();
                    assert_relative_eq!(spec.mean(), mean, max_relative = 1e-8);
                    assert_relative_eq!(spec.cv(), cv, max_relative = 1e-8);
                }
            }
        }
    }

    #[test]
    fn erlang_moments() {
        let e = LifetimeSpec::Erlang {
            phases: 4,
            rate: 2.0,
        };
        assert_relative_eq!(e.mean(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(e.cv(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn pdf_integrates_to_one() {
        for spec in [
            LifetimeSpec::Exponential { rate: 0.7 },
            LifetimeSpec::Gamma {
                shape: 2.3,
                scale: 0.9,
            },
            LifetimeSpec::Weibull {
                shape: 1.7,
                scale: 2.1,
            },
            LifetimeSpec::Erlang {
                phases: 5,
                rate: 2.5,
            },
        ] {
            let cut = spec.tail_cutoff(1e-15);
            let mass = quadrature::integrate(|x| spec.pdf(x), 1e-12, cut, 1e-11).unwrap();
            assert_relative_eq!(mass, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn installation_cdf_shape() {
        let inst =
            InstallationTime::with_age(LifetimeSpec::Exponential { rate: 1.0 }, 2.0).unwrap();
        assert_eq!(inst.cdf(0.0), 0.0);
        assert_relative_eq!(inst.cdf(1.0), 1.0 - (-1.0f64).exp(), epsilon = 1e-12);
        assert_eq!(inst.cdf(2.0), 1.0);
        assert_eq!(inst.cdf(5.0), 1.0);
    }

    #[test]
    fn random_threshold_min_construction() {
        // min of two exponentials is exponential with summed rates
        let x = LifetimeSpec::Exponential { rate: 1.0 };
        let y = LifetimeSpec::Exponential { rate: 2.0 };
        let inst = InstallationTime::with_random_threshold(x, y).unwrap();
        assert_relative_eq!(inst.mean().unwrap(), 1.0 / 3.0, epsilon = 1e-10);
        assert_relative_eq!(inst.cdf(0.4), 1.0 - (-1.2f64).exp(), epsilon = 1e-12);
        // transform of Exp(3) is 3/(3+s)
        assert_relative_eq!(inst.truncated_laplace(1.0, 0).unwrap(), 0.75, epsilon = 1e-9);
        // P(X < Y) = 1/3
        assert_relative_eq!(inst.corrective_probability().unwrap(), 1.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn degenerate_rejected_by_transforms() {
        let inst =
            InstallationTime::with_age(LifetimeSpec::Degenerate { point: 1.0 }, 2.0).unwrap();
        assert!(matches!(
            inst.truncated_laplace(1.0, 0),
            Err(Error::DegenerateLifetime)
        ));
    }

    #[test]
    fn order_cap_enforced() {
        let inst =
            InstallationTime::with_age(LifetimeSpec::Exponential { rate: 1.0 }, 1.0).unwrap();
        assert!(matches!(
            inst.truncated_laplace(1.0, 65),
            Err(Error::DerivativeOrder { .. })
        ));
    }
}
