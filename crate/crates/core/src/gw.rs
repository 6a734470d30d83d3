//! The `N >= 3` compactly supported family
//!
//! ```text
//! rho(t, r) = f(r / a)^(N/(N-2)) / a^N   for r < a S_mu, 0 outside
//! f'' + (N-1)/s f' + alpha(N)/((2N-2)K) f^(N/(N-2)) = N(N-2) lambda/((2N-2)K)
//! a'' = -lambda / a^(N-1)
//! ```
//!
//! where `S_mu` is the first zero of `f` and `alpha(N)` is `N(N-2)` times the
//! volume of the unit ball.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::emden::{run_scale, ScaleRun};
use crate::error::{Error, OdeContext, Result};
use crate::ode::{integrate_to_event, Direction, EventSpec, IntegratorConfig};
use crate::radial::{Radial, S0};

/// Horizon beyond which a profile is reported as having no first zero.
pub const S_CAP: f64 = 100.0;

// Profile values this close to zero inside the support are rounding, not sign.
const ZERO_SNAP: f64 = 1e-12;

/// Dimension constant: `alpha(1) = 2`, `alpha(2) = 2 pi` and
/// `alpha(N) = N (N-2) pi^(N/2) / Gamma(N/2 + 1)` for `N >= 3`.
pub fn alpha_const(n: u32) -> Result<f64> {
    match n {
        0 => Err(Error::domain("alpha(N) needs N >= 1")),
        1 => Ok(2.0),
        2 => Ok(2.0 * PI),
        _ => {
            let nf = n as f64;
            Ok(nf * (nf - 2.0) * PI.powf(nf / 2.0) / gamma(nf / 2.0 + 1.0))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GWParams {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "K")]
    pub k: f64,
    pub lambda: f64,
    pub alpha_center: f64,
    pub a0: f64,
    pub a1: f64,
}

impl GWParams {
    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.k, self.lambda, self.alpha_center, self.a0, self.a1]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::domain("profile parameters must be finite"));
        }
        if self.n < 3 {
            return Err(Error::domain(format!("N = {} must be at least 3", self.n)));
        }
        if !(self.k > 0.0) {
            return Err(Error::domain(format!("K = {} must be positive", self.k)));
        }
        if !(self.alpha_center > 0.0) {
            return Err(Error::domain(format!(
                "alpha = {} must be positive",
                self.alpha_center
            )));
        }
        if !(self.a0 > 0.0) {
            return Err(Error::domain(format!("a0 = {} must be positive", self.a0)));
        }
        Ok(())
    }

    /// Density exponent `N / (N - 2)`.
    pub fn power(&self) -> f64 {
        self.n as f64 / (self.n as f64 - 2.0)
    }

    // (source, gravity coefficient) of the profile equation
    fn coefficients(&self) -> (f64, f64) {
        let n = self.n as f64;
        let denom = (2.0 * n - 2.0) * self.k;
        let alpha_n = alpha_const(self.n).expect("N >= 3");
        (n * (n - 2.0) * self.lambda / denom, alpha_n / denom)
    }

    /// Coefficient `c` of the start series `f = alpha + c s^2`.
    pub fn series_coefficient(&self) -> f64 {
        let (source, grav) = self.coefficients();
        (source - grav * self.alpha_center.powf(self.power())) / (2.0 * self.n as f64)
    }

    /// Right-hand side of the profile equation. The power is extended oddly to
    /// negative `f` so that trial stages overshooting the zero stay finite;
    /// the terminal event stops the solve at the zero itself.
    pub fn profile_rhs(&self) -> impl Fn(f64, &[f64], &mut [f64]) + Copy {
        let (source, grav) = self.coefficients();
        let (q, nm1) = (self.power(), self.n as f64 - 1.0);
        move |s, y, dy| {
            dy[0] = y[1];
            dy[1] = source - grav * y[0].signum() * y[0].abs().powf(q) - nm1 * y[1] / s;
        }
    }

    pub fn scale_rhs(&self) -> impl Fn(f64, &[f64], &mut [f64]) + Copy {
        let (lambda, nm1) = (self.lambda, self.n as i32 - 1);
        move |_, y, dy| {
            dy[0] = y[1];
            dy[1] = if y[0] > 0.0 {
                -lambda / y[0].powi(nm1)
            } else {
                f64::NAN
            };
        }
    }
}

#[derive(Debug, Clone)]
pub struct GWProfile {
    pub params: GWParams,
    pub s_mu: Option<f64>,
    radial: Radial,
}

/// Solve the profile from the centre until its first zero or [`S_CAP`].
pub fn solve_gw_profile(p: &GWParams, cfg: &IntegratorConfig) -> Result<GWProfile> {
    p.validate()?;
    let c = p.series_coefficient();
    let event = EventSpec::new(|_: f64, y: &[f64]| y[0], Direction::Falling);
    let (out, s_mu) = integrate_to_event(
        p.profile_rhs(),
        &Radial::start(p.alpha_center, c),
        S_CAP,
        cfg,
        &event,
    )
    .context("profile solve")?;
    if let Some(halt) = out.halt {
        return Err(Error::Ode {
            context: "profile solve",
            source: halt,
        });
    }
    Ok(GWProfile {
        params: *p,
        s_mu,
        radial: Radial {
            alpha: p.alpha_center,
            c,
            traj: out.trajectory,
        },
    })
}

impl GWProfile {
    pub fn grid(&self) -> &[f64] {
        self.radial.grid()
    }

    pub fn f_values(&self) -> Vec<f64> {
        self.radial.f_nodes()
    }

    pub fn fdot_values(&self) -> Vec<f64> {
        self.radial.fdot_nodes()
    }

    /// Largest solved `s`: the first zero when there is one, else [`S_CAP`].
    pub fn s_end(&self) -> f64 {
        self.radial.s_end()
    }

    pub fn eval(&self, s: f64) -> Result<(f64, f64)> {
        self.radial.eval(s)
    }

    /// Centered-difference residual of the profile equation, `O(h^2)`.
    pub fn ode_residual(&self, s: f64, h: f64) -> Result<f64> {
        let (f, fdot) = self.eval(s)?;
        let fddot = (self.eval(s + h)?.1 - self.eval(s - h)?.1) / (2.0 * h);
        let mut dy = [0.0; 2];
        (self.params.profile_rhs())(s, &[f, fdot], &mut dy);
        Ok(fddot - dy[1])
    }

    /// `f(r/a)^(N/(N-2)) / a^N` inside the support, exactly zero outside.
    pub fn density(&self, a: f64, r: f64) -> Result<f64> {
        if !(a > 0.0) || !(r >= 0.0) {
            return Err(Error::domain(format!(
                "density needs a > 0 and r >= 0, got a = {a}, r = {r}"
            )));
        }
        let s = r / a;
        match self.s_mu {
            Some(s_mu) if s >= s_mu => return Ok(0.0),
            None if s > self.s_end() => return Err(Error::NoCompactSupport { s }),
            _ => {}
        }
        let f = if s < S0 {
            self.params.alpha_center
        } else {
            self.eval(s)?.0
        };
        let f = match f {
            f if f >= 0.0 => f,
            f if f > -ZERO_SNAP => 0.0,
            f => return Err(Error::NonRealPower(f)),
        };
        Ok(f.powf(self.params.power()) / a.powi(self.params.n as i32))
    }
}

pub fn gw_density(prof: &GWProfile, a: f64, r: f64) -> Result<f64> {
    prof.density(a, r)
}

/// Scale factor `(a, a')` with collapse detection, as for the two-dimensional
/// scale equation.
pub fn integrate_gw_scale(p: &GWParams, t_end: f64, cfg: &IntegratorConfig) -> Result<ScaleRun> {
    p.validate()?;
    run_scale(p.scale_rhs(), p.a0, p.a1, t_end, cfg)
}
