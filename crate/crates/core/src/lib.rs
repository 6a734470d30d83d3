//! Rotating self-similar solutions of the two-dimensional isothermal
//! Euler–Poisson equations, with the machinery to build and check them.
//!
//! * [`ode`]: Dormand–Prince integration, event location, singular quadrature.
//! * [`emden`]: the scale-factor equation, its orbit classes and period.
//! * [`liouville`]: the radial density profile and the enclosed-mass identity.
//! * [`gw`]: the `N >= 3` compactly supported profile family.
//! * [`solutions`]: closed-form spacetime fields assembled from the above.
//! * [`residual`]: finite-difference PDE residuals and convergence studies,
//!   operating on black-box [`field::Field`]s only.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod emden;
pub mod error;
pub mod field;
pub mod gw;
pub mod liouville;
pub mod ode;
mod radial;
pub mod residual;
pub mod solutions;

pub use emden::{
    classify, energy_level, equilibrium_radius, integrate_scale, period_by_quadrature,
    period_by_simulation, potential, turning_points, EmdenParams, EnergyLevel, OrbitClass,
    PeriodEstimate, PeriodMethod, ScaleRun, TurningPoints,
};
pub use error::{Error, Result};
pub use field::{Field, FieldSample, SamplePoint};
pub use gw::{alpha_const, gw_density, integrate_gw_scale, solve_gw_profile, GWParams, GWProfile};
pub use liouville::{solve_profile, LiouvilleParams, LiouvilleProfile};
pub use ode::{IntegratorConfig, OdeError, OdeState, Trajectory};
pub use radial::{default_profile_config, S0};
pub use residual::{
    convergence_study, mass_residual, momentum_residual, poisson_residual, ConvergenceResult,
    ConvergenceStatus, Equation, PressureLaw, ResidualReport, StencilConfig,
};
pub use solutions::{
    eval_gravity_radial, eval_rotational, eval_swirl_ansatz, eval_zz_inner, eval_zz_outer,
    zz_interface_radius, GravityRadial, GwSolution, RotParams, RotSolution2D, SwirlAnsatz,
    ZZSolution, ZzVariant,
};
