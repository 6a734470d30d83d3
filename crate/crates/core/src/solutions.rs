//! Closed-form spacetime fields.
//!
//! * [`RotSolution2D`]: the rotating isothermal family
//!   `rho = e^{f(r/a)} / a^2`, `u = (a'/a) (x, y) + (xi / a^2) (-y, x)`,
//!   with `a` from the scale equation and `f` the Liouville profile.
//!   `xi = 0` is the non-rotating family.
//! * [`SwirlAnsatz`]: the same density shape with an arbitrary swirl `G(t, r)`,
//!   which satisfies the mass equation for any `G`.
//! * [`ZZSolution`]: the two-region spiral solution of the `gamma = 2`
//!   Euler equations without gravity.
//! * [`GwSolution`]: the `N >= 3` family sampled on a coordinate plane.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::emden::{integrate_scale, EmdenParams, ScaleRun};
use crate::error::{Error, Result};
use crate::field::{Field, FieldSample, SamplePoint};
use crate::gw::{integrate_gw_scale, solve_gw_profile, GWParams, GWProfile};
use crate::liouville::{solve_profile, LiouvilleParams, LiouvilleProfile};
use crate::ode::IntegratorConfig;
use crate::radial::default_profile_config;

/// Integrator settings for scale factors that are sampled by finite
/// differences: tight tolerances and a short maximum step keep interpolation
/// noise far below the stencil truncation error.
pub fn scale_field_config() -> IntegratorConfig {
    IntegratorConfig {
        rtol: 1e-13,
        atol: 1e-15,
        h_init: 1e-4,
        h_max: 0.01,
        max_steps: 2_000_000,
    }
}

/// Parameters of one member of the rotating family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotParams {
    pub lambda: f64,
    pub xi: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub alpha: f64,
    pub a0: f64,
    pub a1: f64,
}

impl RotParams {
    pub fn emden(&self) -> EmdenParams {
        EmdenParams {
            lambda: self.lambda,
            xi: self.xi,
            a0: self.a0,
            a1: self.a1,
        }
    }

    pub fn liouville(&self) -> LiouvilleParams {
        LiouvilleParams {
            k: self.k,
            lambda: self.lambda,
            alpha: self.alpha,
        }
    }
}

/// Radial gravity computed from the enclosed mass and from the mass identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GravityRadial {
    pub quadrature: f64,
    pub identity: f64,
}

#[derive(Debug, Clone)]
pub struct RotSolution2D {
    pub params: RotParams,
    pub profile: LiouvilleProfile,
    pub scale: ScaleRun,
}

impl RotSolution2D {
    /// Solve the scale factor on `[0, t_end]` and the profile on `(0, s_max]`.
    pub fn solve(p: &RotParams, t_end: f64, s_max: f64) -> Result<Self> {
        Self::solve_with(
            p,
            t_end,
            s_max,
            &scale_field_config(),
            &default_profile_config(),
        )
    }

    pub fn solve_with(
        p: &RotParams,
        t_end: f64,
        s_max: f64,
        scale_cfg: &IntegratorConfig,
        profile_cfg: &IntegratorConfig,
    ) -> Result<Self> {
        let scale = integrate_scale(&p.emden(), t_end, scale_cfg)?;
        let profile = solve_profile(&p.liouville(), s_max, profile_cfg)?;
        Ok(RotSolution2D {
            params: *p,
            profile,
            scale,
        })
    }

    pub fn t_end(&self) -> f64 {
        self.scale.trajectory.t_end()
    }

    /// `(a, a')` at `t`.
    pub fn scale_at(&self, t: f64) -> Result<(f64, f64)> {
        self.scale.scale_at(t).ok_or(Error::OutOfRange {
            what: "t",
            value: t,
            lo: 0.0,
            hi: self.t_end(),
        })
    }

    fn profile_at(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(self.params.alpha);
        }
        self.profile.f(s)
    }

    pub fn eval_rotational(&self, t: f64, x: f64, y: f64) -> Result<FieldSample> {
        let (a, adot) = self.scale_at(t)?;
        let r = x.hypot(y);
        let f = self.profile_at(r / a)?;
        let (stretch, swirl) = (adot / a, self.params.xi / (a * a));
        let phi_r = if r == 0.0 {
            0.0
        } else {
            self.eval_gravity_radial(t, r)?.quadrature
        };
        Ok(FieldSample {
            rho: f.exp() / (a * a),
            u1: stretch * x - swirl * y,
            u2: swirl * x + stretch * y,
            phi_r: Some(phi_r),
        })
    }

    /// `Phi_r = (2 pi / r) int_0^r rho eta d eta`, from the profile quadrature
    /// and, independently, from the mass identity `(lambda s - K f'(s)) / a`.
    pub fn eval_gravity_radial(&self, t: f64, r: f64) -> Result<GravityRadial> {
        if !(r > 0.0) {
            return Err(Error::domain(format!(
                "radial gravity needs r > 0, got {r}"
            )));
        }
        let (a, _) = self.scale_at(t)?;
        let s = r / a;
        let (_, fdot) = self.profile.eval(s)?;
        Ok(GravityRadial {
            quadrature: self.profile.enclosed_mass(s)? / r,
            identity: (self.params.lambda * s - self.params.k * fdot) / a,
        })
    }
}

impl Field for RotSolution2D {
    fn sample(&self, p: SamplePoint) -> Result<FieldSample> {
        self.eval_rotational(p.t, p.x, p.y)
    }
}

pub fn eval_rotational(sol: &RotSolution2D, t: f64, x: f64, y: f64) -> Result<FieldSample> {
    sol.eval_rotational(t, x, y)
}

pub fn eval_gravity_radial(sol: &RotSolution2D, t: f64, r: f64) -> Result<GravityRadial> {
    sol.eval_gravity_radial(t, r)
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type ScaleFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;
type SwirlFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `rho = f(r/a)/a^2`, `u = (a'/a)(x, y) + (G(t, r)/r)(-y, x)` for arbitrary
/// `f >= 0`, `a > 0` and `G`.
#[derive(Clone)]
pub struct SwirlAnsatz {
    /// Density shape `f(s)`.
    pub f_profile: ScalarFn,
    /// `t -> (a(t), a'(t))`.
    pub a_fn: ScaleFn,
    /// Swirl `G(t, r)`.
    pub g_fn: SwirlFn,
}

impl fmt::Debug for SwirlAnsatz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SwirlAnsatz { .. }")
    }
}

impl SwirlAnsatz {
    pub fn new(
        f_profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
        a_fn: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static,
        g_fn: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SwirlAnsatz {
            f_profile: Arc::new(f_profile),
            a_fn: Arc::new(a_fn),
            g_fn: Arc::new(g_fn),
        }
    }

    pub fn eval(&self, t: f64, x: f64, y: f64) -> FieldSample {
        let (a, adot) = (self.a_fn)(t);
        let r = x.hypot(y);
        let stretch = adot / a;
        // the swirl term is defined as zero on the axis
        let swirl = if r > 0.0 { (self.g_fn)(t, r) / r } else { 0.0 };
        FieldSample {
            rho: (self.f_profile)(r / a) / (a * a),
            u1: stretch * x - swirl * y,
            u2: swirl * x + stretch * y,
            phi_r: None,
        }
    }
}

impl Field for SwirlAnsatz {
    fn sample(&self, p: SamplePoint) -> Result<FieldSample> {
        Ok(self.eval(p.t, p.x, p.y))
    }
}

pub fn eval_swirl_ansatz(ansatz: &SwirlAnsatz, t: f64, x: f64, y: f64) -> FieldSample {
    ansatz.eval(t, x, y)
}

/// Sign of the `(x - y)` term in the inner spiral velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZzVariant {
    /// `u2 = (y - x) / 2t`, which satisfies the mass and momentum equations.
    #[default]
    Corrected,
    /// `u2 = (x - y) / 2t` as commonly quoted; kept as a negative control.
    AsPrinted,
}

/// Spiral solution of the `gamma = 2` Euler equations, `P = K rho^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZZSolution {
    #[serde(rename = "K")]
    pub k: f64,
    pub rho0: f64,
    /// `P'(rho0) = 2 K rho0`.
    pub pdot0: f64,
}

impl ZZSolution {
    pub fn new(k: f64, rho0: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0 && rho0.is_finite() && rho0 > 0.0) {
            return Err(Error::domain(format!(
                "need K > 0 and rho0 > 0, got K = {k}, rho0 = {rho0}"
            )));
        }
        Ok(ZZSolution {
            k,
            rho0,
            pdot0: 2.0 * k * rho0,
        })
    }

    /// Radius `2 t sqrt(P'(rho0))` separating the two regions.
    pub fn interface_radius(&self, t: f64) -> f64 {
        2.0 * t * self.pdot0.sqrt()
    }

    pub fn eval_inner(&self, t: f64, x: f64, y: f64, variant: ZzVariant) -> Result<FieldSample> {
        if !(t > 0.0) {
            return Err(Error::domain(format!("inner region needs t > 0, got {t}")));
        }
        let r = x.hypot(y);
        if r > self.interface_radius(t) {
            return Err(Error::OutsideRegion { t, r });
        }
        let u2 = match variant {
            ZzVariant::Corrected => (y - x) / (2.0 * t),
            ZzVariant::AsPrinted => (x - y) / (2.0 * t),
        };
        Ok(FieldSample {
            rho: r * r / (8.0 * self.k * t * t),
            u1: (x + y) / (2.0 * t),
            u2,
            phi_r: None,
        })
    }

    pub fn eval_outer(&self, t: f64, x: f64, y: f64) -> Result<FieldSample> {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("outer region needs t >= 0, got {t}")));
        }
        let r = x.hypot(y);
        if !(r > self.interface_radius(t)) {
            return Err(Error::OutsideRegion { t, r });
        }
        let p = self.pdot0;
        let (cos, sin) = (x / r, y / r);
        let radial = 2.0 * t * p;
        let swirl = (2.0 * p).sqrt() * (r * r - 2.0 * t * t * p).sqrt();
        Ok(FieldSample {
            rho: self.rho0,
            u1: (radial * cos + swirl * sin) / r,
            u2: (radial * sin - swirl * cos) / r,
            phi_r: None,
        })
    }

    /// Inner field inside the interface, outer field beyond it.
    pub fn eval(&self, t: f64, x: f64, y: f64, variant: ZzVariant) -> Result<FieldSample> {
        if x.hypot(y) <= self.interface_radius(t) {
            self.eval_inner(t, x, y, variant)
        } else {
            self.eval_outer(t, x, y)
        }
    }
}

pub fn eval_zz_inner(
    zz: &ZZSolution,
    t: f64,
    x: f64,
    y: f64,
    variant: ZzVariant,
) -> Result<FieldSample> {
    zz.eval_inner(t, x, y, variant)
}

pub fn eval_zz_outer(zz: &ZZSolution, t: f64, x: f64, y: f64) -> Result<FieldSample> {
    zz.eval_outer(t, x, y)
}

pub fn zz_interface_radius(zz: &ZZSolution, t: f64) -> f64 {
    zz.interface_radius(t)
}

/// The `N >= 3` family on the plane through the origin spanned by the first
/// two coordinates: `rho = f(r/a)^(N/(N-2)) / a^N`, `u = (a'/a)(x, y)`.
#[derive(Debug, Clone)]
pub struct GwSolution {
    pub profile: GWProfile,
    pub scale: ScaleRun,
}

impl GwSolution {
    pub fn solve(p: &GWParams, t_end: f64) -> Result<Self> {
        let profile = solve_gw_profile(p, &default_profile_config())?;
        let scale = integrate_gw_scale(p, t_end, &scale_field_config())?;
        Ok(GwSolution { profile, scale })
    }

    pub fn eval(&self, t: f64, x: f64, y: f64) -> Result<FieldSample> {
        let (a, adot) = self.scale.scale_at(t).ok_or(Error::OutOfRange {
            what: "t",
            value: t,
            lo: 0.0,
            hi: self.scale.trajectory.t_end(),
        })?;
        Ok(FieldSample {
            rho: self.profile.density(a, x.hypot(y))?,
            u1: adot / a * x,
            u2: adot / a * y,
            phi_r: None,
        })
    }
}
