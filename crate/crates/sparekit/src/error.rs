//! Error types shared across the solver, optimizer, and simulator.

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A constructor or operation received an out-of-domain argument.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Adaptive quadrature exhausted its panel budget before reaching the
    /// requested tolerance. Carries the achieved error estimate.
    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    /// Scalar root finding failed; carries bracket diagnostics.
    #[error("root finder failed on [{lo}, {hi}]: {reason}")]
    RootFind { lo: f64, hi: f64, reason: String },

    /// The degenerate (point-mass) lifetime family has no density and cannot
    /// be fed to the transform recursions. It is accepted by the simulator only.
    #[error("degenerate lifetime is not solvable analytically")]
    DegenerateLifetime,

    /// The remaining-service recursion hit a division by |1 - F*(lambda)|
    /// below the conditioning floor at the named level.
    #[error("ill-conditioned remaining-service recursion at level {level}: |1 - F*| = {magnitude:.3e}")]
    IllConditioned { level: usize, magnitude: f64 },

    /// The capacitated derivative scheme would require a derivative order
    /// beyond the configured cap.
    #[error("derivative order {required} exceeds cap {cap}")]
    DerivativeOrder { required: usize, cap: usize },

    /// An internal consistency check on a computed distribution failed.
    #[error("steady-state inconsistency: {0}")]
    Inconsistent(String),

    /// A probability in a throughput ratio denominator vanished.
    #[error("zero probability in denominator at index {0}")]
    ZeroProbability(usize),

    /// A policy search ran past its hard cap without its stopping bound firing.
    #[error("search over {variable} exceeded cap {cap} without bound-triggered stop")]
    SearchDiverged { variable: &'static str, cap: u32 },

    /// The decomposition fixed point failed to converge.
    #[error("fixed point did not converge in {max_iter} iterations (residual {residual:.3e})")]
    NoConvergence { max_iter: usize, residual: f64 },

    /// A joint state space exceeded the enumeration cap.
    #[error("joint state space has {states} states, exceeding cap {cap}")]
    StateSpaceTooLarge { states: usize, cap: usize },

    /// The requested configuration is outside what the method supports.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Aggregated-class truncation left too much tail mass.
    #[error("aggregate-class truncation at {n_trunc} leaves tail mass {tail:.3e}; increase the truncation level")]
    TruncationTail { n_trunc: usize, tail: f64 },

    /// Simulation-level failure (e.g. all event rates zero).
    #[error("simulation error: {0}")]
    Simulation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
