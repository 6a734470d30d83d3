//! Deterministic ODE integration, event location and endpoint-singular quadrature.
//!
//! The integrator is an embedded Dormand–Prince 5(4) pair with cubic Hermite
//! dense output. Systems that are second order in disguise (position and
//! velocity stored side by side) can also be evaluated with quintic Hermite
//! interpolation, see [`Trajectory::eval_second_order`].
//!
//! Blowup is detected rather than integrated through: a state component larger
//! than [`OVERFLOW_GUARD`] or a step shorter than [`STEP_UNDERFLOW_REL`]`·|t|`
//! halts the run. [`integrate_until_halt`] keeps the partial trajectory so that
//! callers can report a touchdown time.

mod dopri;
mod events;
mod quad;
pub mod roots;

pub use dopri::{
    integrate, integrate_until_halt, IntegratorConfig, OdeState, Outcome, Trajectory,
    OVERFLOW_GUARD, STEP_UNDERFLOW_REL,
};
pub use events::{detect_events, integrate_to_event, Direction, EventSpec, DEFAULT_REFINE_TOL};
pub use quad::{gauss_legendre, quad_sin2, quad_singular, QuadResult, DEFAULT_QUAD_TOL};

use thiserror::Error;

/// Failures of the integrator and the quadrature.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    StepBudgetExceeded { t: f64, max_steps: usize },
    #[error("state blowup at t = {t} (component magnitude above overflow guard)")]
    StateBlowup { t: f64 },
    #[error("step size {h:e} underflowed at t = {t}")]
    StepUnderflow { t: f64, h: f64 },
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("quadrature did not converge: estimate {estimate}, error estimate {err_est:e}")]
    NoConvergence { estimate: f64, err_est: f64 },
}
