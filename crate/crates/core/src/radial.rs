//! Shared plumbing for radial profile ODEs with a regular singular point at
//! `s = 0`: a series start at `S0` and evaluation that falls back to the
//! series below it.

use crate::error::{Error, Result};
use crate::ode::{IntegratorConfig, OdeState, Trajectory};

/// First integration node. Below it profiles are evaluated from the series.
pub const S0: f64 = 1e-6;

/// Integrator settings used for profile solves unless overridden.
pub fn default_profile_config() -> IntegratorConfig {
    IntegratorConfig {
        rtol: 1e-13,
        atol: 1e-15,
        h_init: 1e-7,
        h_max: 0.05,
        max_steps: 2_000_000,
    }
}

/// `f = alpha + c s^2` on `[0, S0]` glued to a dense trajectory of `(f, f')`.
#[derive(Debug, Clone)]
pub(crate) struct Radial {
    pub alpha: f64,
    pub c: f64,
    pub traj: Trajectory,
}

impl Radial {
    pub fn start(alpha: f64, c: f64) -> OdeState {
        OdeState::new(S0, [alpha + c * S0 * S0, 2.0 * c * S0])
    }

    pub fn s_end(&self) -> f64 {
        self.traj.t_end()
    }

    pub fn check(&self, s: f64) -> Result<()> {
        if s > 0.0 && s <= self.s_end() {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                what: "s",
                value: s,
                lo: 0.0,
                hi: self.s_end(),
            })
        }
    }

    /// `(f, f')` at `s`, for `0 < s <= s_end`.
    pub fn eval(&self, s: f64) -> Result<(f64, f64)> {
        self.check(s)?;
        if s < S0 {
            return Ok((self.alpha + self.c * s * s, 2.0 * self.c * s));
        }
        self.traj
            .eval_second_order(s, 0, 1)
            .ok_or(Error::OutOfRange {
                what: "s",
                value: s,
                lo: 0.0,
                hi: self.s_end(),
            })
    }

    pub fn grid(&self) -> &[f64] {
        self.traj.times()
    }

    pub fn f_nodes(&self) -> Vec<f64> {
        (0..self.traj.len())
            .map(|i| self.traj.state(i)[0])
            .collect()
    }

    pub fn fdot_nodes(&self) -> Vec<f64> {
        (0..self.traj.len())
            .map(|i| self.traj.state(i)[1])
            .collect()
    }
}

pub(crate) fn validate_s_max(s_max: f64) -> Result<()> {
    if !(s_max.is_finite() && s_max > S0) {
        return Err(Error::domain(format!(
            "s_max = {s_max} must be finite and larger than the start node {S0}"
        )));
    }
    Ok(())
}
