//! The radial Liouville profile
//!
//! ```text
//! f'' + f'/s + (2 pi / K) e^f = 2 lambda / K,   f(0) = alpha, f'(0) = 0
//! ```
//!
//! and the enclosed-mass identity `2 pi int_0^s e^f tau dtau = lambda s^2 - K s f'(s)`
//! obtained by integrating `s` times the equation. The enclosed mass is computed
//! by quadrature on the dense solution, never from the identity, so the identity
//! stays an independent check.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, OdeContext, Result};
use crate::ode::{gauss_legendre, integrate, IntegratorConfig};
use crate::radial::{validate_s_max, Radial, S0};

pub use crate::radial::default_profile_config;

/// Default outer radius of a profile solve.
pub const DEFAULT_S_MAX: f64 = 20.0;

// Gauss–Legendre points per integrator segment for the enclosed mass.
const MASS_GL_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleParams {
    #[serde(rename = "K")]
    pub k: f64,
    pub lambda: f64,
    pub alpha: f64,
}

impl LiouvilleParams {
    pub fn new(k: f64, lambda: f64, alpha: f64) -> Result<Self> {
        let p = LiouvilleParams { k, lambda, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k.is_finite() && self.lambda.is_finite() && self.alpha.is_finite()) {
            return Err(Error::domain("Liouville parameters must be finite"));
        }
        if !(self.k > 0.0) {
            return Err(Error::domain(format!("K = {} must be positive", self.k)));
        }
        Ok(())
    }

    /// Coefficient `c` of the start series `f = alpha + c s^2`.
    pub fn series_coefficient(&self) -> f64 {
        (self.lambda - PI * self.alpha.exp()) / (2.0 * self.k)
    }

    pub fn rhs(&self) -> impl Fn(f64, &[f64], &mut [f64]) + Copy {
        let (k, lambda) = (self.k, self.lambda);
        move |s, y, dy| {
            dy[0] = y[1];
            dy[1] = 2.0 * lambda / k - 2.0 * PI / k * y[0].exp() - y[1] / s;
        }
    }
}

/// A solved profile on `(0, s_max]`.
#[derive(Debug, Clone)]
pub struct LiouvilleProfile {
    pub params: LiouvilleParams,
    radial: Radial,
    // enclosed mass at each integrator node
    mass_nodes: Vec<f64>,
}

pub fn solve_profile(
    p: &LiouvilleParams,
    s_max: f64,
    cfg: &IntegratorConfig,
) -> Result<LiouvilleProfile> {
    p.validate()?;
    validate_s_max(s_max)?;
    let c = p.series_coefficient();
    let traj =
        integrate(p.rhs(), &Radial::start(p.alpha, c), s_max, cfg).context("Liouville profile")?;
    let radial = Radial {
        alpha: p.alpha,
        c,
        traj,
    };

    let (x, w) = gauss_legendre(MASS_GL_POINTS);
    let grid = radial.grid();
    let mut mass_nodes = Vec::with_capacity(grid.len());
    let mut m = series_mass(p.alpha, c, S0);
    mass_nodes.push(m);
    for seg in grid.windows(2) {
        m += segment_mass(&radial, seg[0], seg[1], &x, &w);
        mass_nodes.push(m);
    }
    Ok(LiouvilleProfile {
        params: *p,
        radial,
        mass_nodes,
    })
}

// 2 pi int_0^s exp(alpha + c t^2) t dt
fn series_mass(alpha: f64, c: f64, s: f64) -> f64 {
    let u = c * s * s;
    let ratio = if u == 0.0 { 1.0 } else { u.exp_m1() / u };
    PI * alpha.exp() * s * s * ratio
}

fn segment_mass(radial: &Radial, a: f64, b: f64, x: &[f64], w: &[f64]) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let sum: f64 = x
        .iter()
        .zip(w)
        .map(|(&xi, &wi)| {
            let tau = mid + half * xi;
            let (f, _) = radial
                .traj
                .eval_second_order(tau, 0, 1)
                .expect("node inside segment");
            wi * f.exp() * tau
        })
        .sum();
    2.0 * PI * half * sum
}

impl LiouvilleProfile {
    pub fn s_max(&self) -> f64 {
        self.radial.s_end()
    }

    pub fn grid(&self) -> &[f64] {
        self.radial.grid()
    }

    pub fn f_values(&self) -> Vec<f64> {
        self.radial.f_nodes()
    }

    pub fn fdot_values(&self) -> Vec<f64> {
        self.radial.fdot_nodes()
    }

    /// `(f(s), f'(s))`.
    pub fn eval(&self, s: f64) -> Result<(f64, f64)> {
        self.radial.eval(s)
    }

    pub fn f(&self, s: f64) -> Result<f64> {
        self.eval(s).map(|v| v.0)
    }

    pub fn fdot(&self, s: f64) -> Result<f64> {
        self.eval(s).map(|v| v.1)
    }

    /// `2 pi int_0^s e^f tau dtau`.
    pub fn enclosed_mass(&self, s: f64) -> Result<f64> {
        self.radial.check(s)?;
        if s < S0 {
            return Ok(series_mass(self.params.alpha, self.radial.c, s));
        }
        let grid = self.grid();
        // last node not beyond s
        let i = grid.partition_point(|&g| g <= s).saturating_sub(1);
        let base = self.mass_nodes[i];
        if s == grid[i] {
            return Ok(base);
        }
        let (x, w) = gauss_legendre(MASS_GL_POINTS);
        Ok(base + segment_mass(&self.radial, grid[i], s, &x, &w))
    }

    /// `-lambda s + K f'(s) + enclosed_mass(s) / s`, zero for an exact solution.
    pub fn momentum_bracket(&self, s: f64) -> Result<f64> {
        let (_, fdot) = self.eval(s)?;
        let p = &self.params;
        Ok(-p.lambda * s + p.k * fdot + self.enclosed_mass(s)? / s)
    }

    /// `|enclosed_mass(s) - (lambda s^2 - K s f'(s))|`.
    pub fn mass_identity_residual(&self, s: f64) -> Result<f64> {
        let (_, fdot) = self.eval(s)?;
        let p = &self.params;
        Ok((self.enclosed_mass(s)? - (p.lambda * s * s - p.k * s * fdot)).abs())
    }

    /// Centered-difference residual of the profile ODE at `s` with step `h`.
    /// `f''` is reconstructed from `f'` at `s +- h`, so the result is
    /// `O(h^2)` for an exact profile.
    pub fn ode_residual(&self, s: f64, h: f64) -> Result<f64> {
        let (f, fdot) = self.eval(s)?;
        let fp = self.fdot(s + h)?;
        let fm = self.fdot(s - h)?;
        let fddot = (fp - fm) / (2.0 * h);
        let p = &self.params;
        Ok(fddot + fdot / s + 2.0 * PI / p.k * f.exp() - 2.0 * p.lambda / p.k)
    }
}
