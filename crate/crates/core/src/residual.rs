//! Finite-difference residuals of the Euler–Poisson system on black-box
//! fields, and convergence studies over a sequence of stencil steps.
//!
//! Only [`Field`] is consulted: the verifier knows nothing about how a field
//! was built. All stencils are centered three-point differences in `t`, `x`
//! and `y`, so the residual of an exact solution is `O(h^2)` until rounding
//! takes over. Stencils that leave the domain of a field are rejected.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldSample, SamplePoint};

/// Rounding floor of a centered first difference, `FLOOR_COEF / h`.
pub const FLOOR_COEF: f64 = 1e-11;

/// Window an estimated order must fall in for a study to count as converging.
pub const ORDER_WINDOW: (f64, f64) = (1.8, 2.2);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StencilConfig {
    pub h_space: f64,
    pub h_time: f64,
}

impl StencilConfig {
    pub fn new(h_space: f64, h_time: f64) -> Result<Self> {
        if !(h_space > 0.0 && h_time > 0.0 && h_space.is_finite() && h_time.is_finite()) {
            return Err(Error::domain(format!(
                "stencil steps must be positive, got h_space = {h_space}, h_time = {h_time}"
            )));
        }
        Ok(StencilConfig { h_space, h_time })
    }

    /// Same step in space and time.
    pub fn uniform(h: f64) -> Result<Self> {
        Self::new(h, h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Mass,
    MomentumX,
    MomentumY,
    Poisson,
}

impl Equation {
    pub fn name(self) -> &'static str {
        match self {
            Equation::Mass => "mass",
            Equation::MomentumX => "momentum_x",
            Equation::MomentumY => "momentum_y",
            Equation::Poisson => "poisson",
        }
    }
}

/// Pressure law of the momentum equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureLaw {
    /// `P = K rho` with self-gravity; the field must carry `phi_r`.
    Isothermal(f64),
    /// `P = K rho^2`, no gravity.
    Gamma2(f64),
    /// Pressureless, no gravity.
    None,
}

impl PressureLaw {
    fn pressure(&self, rho: f64) -> f64 {
        match *self {
            PressureLaw::Isothermal(k) => k * rho,
            PressureLaw::Gamma2(k) => k * rho * rho,
            PressureLaw::None => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub equation: Equation,
    pub points: Vec<SamplePoint>,
    /// Signed residual at each point.
    pub values: Vec<f64>,
    pub max_abs: f64,
    /// Root sum of squares over the points.
    pub l2: f64,
    pub h_used: (f64, f64),
}

impl ResidualReport {
    fn new(
        equation: Equation,
        points: &[SamplePoint],
        values: Vec<f64>,
        cfg: &StencilConfig,
    ) -> Self {
        let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let l2 = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        ResidualReport {
            equation,
            points: points.to_vec(),
            values,
            max_abs,
            l2,
            h_used: (cfg.h_space, cfg.h_time),
        }
    }
}

// Samples at the centre and at +-h along t, x and y.
struct Stencil {
    c: FieldSample,
    t: [FieldSample; 2],
    x: [FieldSample; 2],
    y: [FieldSample; 2],
}

fn sample_at<F: Field + ?Sized>(
    field: &F,
    centre: SamplePoint,
    q: SamplePoint,
) -> Result<FieldSample> {
    let s = field.sample(q).map_err(|e| Error::StencilOutOfDomain {
        t: centre.t,
        x: centre.x,
        y: centre.y,
        reason: e.to_string(),
    })?;
    let finite = [s.rho, s.u1, s.u2, s.phi_r.unwrap_or(0.0)]
        .iter()
        .all(|v| v.is_finite());
    if !finite {
        return Err(Error::StencilOutOfDomain {
            t: centre.t,
            x: centre.x,
            y: centre.y,
            reason: format!("non-finite sample at ({}, {}, {})", q.t, q.x, q.y),
        });
    }
    Ok(s)
}

fn gather<F: Field + ?Sized>(field: &F, p: SamplePoint, cfg: &StencilConfig) -> Result<Stencil> {
    let (hs, ht) = (cfg.h_space, cfg.h_time);
    let at = |dt: f64, dx: f64, dy: f64| {
        sample_at(field, p, SamplePoint::new(p.t + dt, p.x + dx, p.y + dy))
    };
    Ok(Stencil {
        c: at(0.0, 0.0, 0.0)?,
        t: [at(-ht, 0.0, 0.0)?, at(ht, 0.0, 0.0)?],
        x: [at(0.0, -hs, 0.0)?, at(0.0, hs, 0.0)?],
        y: [at(0.0, 0.0, -hs)?, at(0.0, 0.0, hs)?],
    })
}

fn diff<G: Fn(&FieldSample) -> f64>(pair: &[FieldSample; 2], h: f64, g: G) -> f64 {
    (g(&pair[1]) - g(&pair[0])) / (2.0 * h)
}

/// `rho_t + (rho u1)_x + (rho u2)_y` at each point.
pub fn mass_residual<F: Field + ?Sized>(
    field: &F,
    pts: &[SamplePoint],
    cfg: &StencilConfig,
) -> Result<ResidualReport> {
    let values = pts
        .iter()
        .map(|&p| {
            let s = gather(field, p, cfg)?;
            let (hs, ht) = (cfg.h_space, cfg.h_time);
            Ok(diff(&s.t, ht, |f| f.rho)
                + diff(&s.x, hs, |f| f.rho * f.u1)
                + diff(&s.y, hs, |f| f.rho * f.u2))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport::new(Equation::Mass, pts, values, cfg))
}

/// `rho (u_t + (u . grad) u) + grad P + rho grad Phi`, one report per
/// component. `grad Phi` is `(x, y)/r * phi_r` at the centre point.
pub fn momentum_residual<F: Field + ?Sized>(
    field: &F,
    pts: &[SamplePoint],
    cfg: &StencilConfig,
    pressure: PressureLaw,
) -> Result<[ResidualReport; 2]> {
    let mut mx = Vec::with_capacity(pts.len());
    let mut my = Vec::with_capacity(pts.len());
    for &p in pts {
        let s = gather(field, p, cfg)?;
        let (hs, ht) = (cfg.h_space, cfg.h_time);
        let c = s.c;
        let (gx, gy) = match pressure {
            PressureLaw::Isothermal(_) => {
                let phi_r = c.phi_r.ok_or(Error::MissingGravity)?;
                let r = p.x.hypot(p.y);
                if r == 0.0 {
                    (0.0, 0.0)
                } else {
                    (p.x / r * phi_r, p.y / r * phi_r)
                }
            }
            _ => (0.0, 0.0),
        };
        let px = diff(&s.x, hs, |f| pressure.pressure(f.rho));
        let py = diff(&s.y, hs, |f| pressure.pressure(f.rho));
        for (comp, grad_p, g, out) in [(0usize, px, gx, &mut mx), (1, py, gy, &mut my)] {
            let u = |f: &FieldSample| if comp == 0 { f.u1 } else { f.u2 };
            let du_t = diff(&s.t, ht, u);
            let du_x = diff(&s.x, hs, u);
            let du_y = diff(&s.y, hs, u);
            out.push(c.rho * (du_t + c.u1 * du_x + c.u2 * du_y) + grad_p + c.rho * g);
        }
    }
    Ok([
        ResidualReport::new(Equation::MomentumX, pts, mx, cfg),
        ResidualReport::new(Equation::MomentumY, pts, my, cfg),
    ])
}

/// `(1/r)(r phi_r)_r - 2 pi rho`, differenced along the radial direction
/// through each point. Points need `r > 2 h_space`.
pub fn poisson_residual<F: Field + ?Sized>(
    field: &F,
    pts: &[SamplePoint],
    cfg: &StencilConfig,
) -> Result<ResidualReport> {
    let h = cfg.h_space;
    let values = pts
        .iter()
        .map(|&p| {
            let r = p.r();
            if !(r > 2.0 * h) {
                return Err(Error::StencilOutOfDomain {
                    t: p.t,
                    x: p.x,
                    y: p.y,
                    reason: format!("radial stencil needs r > 2h, got r = {r}"),
                });
            }
            let (ex, ey) = (p.x / r, p.y / r);
            let at = |rr: f64| -> Result<f64> {
                let s = sample_at(field, p, SamplePoint::new(p.t, rr * ex, rr * ey))?;
                Ok(rr * s.phi_r.ok_or(Error::MissingGravity)?)
            };
            let centre = sample_at(field, p, p)?;
            let div = (at(r + h)? - at(r - h)?) / (2.0 * h * r);
            Ok(div - 2.0 * PI * centre.rho)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport::new(Equation::Poisson, pts, values, cfg))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceStatus {
    /// Estimated order inside [`ORDER_WINDOW`].
    Converging,
    /// Fewer than two norms above the rounding floor; no order can be fitted.
    AtFloor,
    NonConverging,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceResult {
    pub equation: Equation,
    pub h_sequence: Vec<f64>,
    /// Max-abs residual per step.
    pub norms: Vec<f64>,
    /// Least-squares slope of `ln norm` against `ln h`, over norms above the
    /// floor. `None` when the study is at the floor.
    pub estimated_order: Option<f64>,
    pub status: ConvergenceStatus,
}

impl ConvergenceResult {
    pub fn passed(&self) -> bool {
        self.status == ConvergenceStatus::Converging
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Run `residual_op` at each step of `h_list` (strictly decreasing, at least
/// three entries) and estimate the order of the max-abs residual.
pub fn convergence_study<Op>(mut residual_op: Op, h_list: &[f64]) -> Result<ConvergenceResult>
where
    Op: FnMut(&StencilConfig) -> Result<ResidualReport>,
{
    if h_list.len() < 3 {
        return Err(Error::domain(
            "a convergence study needs at least three steps",
        ));
    }
    if !h_list.windows(2).all(|w| w[1] < w[0]) {
        return Err(Error::domain(
            "convergence study steps must be strictly decreasing",
        ));
    }
    let mut norms = Vec::with_capacity(h_list.len());
    let mut equation = Equation::Mass;
    for &h in h_list {
        let report = residual_op(&StencilConfig::uniform(h)?)?;
        equation = report.equation;
        norms.push(report.max_abs);
    }
    let (lx, ly): (Vec<f64>, Vec<f64>) = h_list
        .iter()
        .zip(&norms)
        .filter(|(&h, &n)| n > FLOOR_COEF / h)
        .map(|(h, n)| (h.ln(), n.ln()))
        .unzip();
    let (estimated_order, status) = if lx.len() < 2 {
        (None, ConvergenceStatus::AtFloor)
    } else {
        let order = fit_slope(&lx, &ly);
        let ok = order >= ORDER_WINDOW.0 && order <= ORDER_WINDOW.1;
        (
            Some(order),
            if ok {
                ConvergenceStatus::Converging
            } else {
                ConvergenceStatus::NonConverging
            },
        )
    };
    Ok(ConvergenceResult {
        equation,
        h_sequence: h_list.to_vec(),
        norms,
        estimated_order,
        status,
    })
}
