use thiserror::Error;

/// Errors raised by the library. Numeric payloads are widened to `f64`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid direction: theta={theta} must lie in [0, pi] and both angles must be finite (phi={phi})")]
    InvalidDirection { theta: f64, phi: f64 },

    #[error("invalid grid orders {order_theta}x{order_phi}: need order_theta >= 2 and order_phi >= 4")]
    InvalidGridOrders { order_theta: usize, order_phi: usize },

    #[error("refinement factor must be >= 2, got {0}")]
    InvalidRefinementFactor(usize),

    #[error("integrand is not finite at node {index} (theta={theta}, phi={phi})")]
    NonFiniteIntegrand { index: usize, theta: f64, phi: f64 },

    #[error("outcome probability {probability} is too small for a posterior")]
    DegenerateOutcome { probability: f64 },

    #[error("{what}: argument {value} is outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("element {index} has non-positive weight {weight}")]
    InvalidWeight { index: usize, weight: f64 },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("measurement needs at least {min} outcomes, got {got}")]
    TooFewOutcomes { min: usize, got: usize },

    #[error("POVM is not complete: max entry error {max_entry_error}")]
    IncompletePovm { max_entry_error: f64 },

    #[error("h(theta) is not strictly decreasing near theta={theta} (sample {index})")]
    MonotonicityViolated { index: usize, theta: f64 },

    #[error("maximizer did not converge after {iterations} iterations (best objective {best_objective} bits)")]
    NonConvergence {
        iterations: usize,
        best_objective: f64,
        best_pairs: Vec<(f64, f64)>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
