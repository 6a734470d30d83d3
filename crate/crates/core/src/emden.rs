//! The scale-factor ODE `a'' = -lambda / a + xi^2 / a^3`.
//!
//! Multiplying by `a'` and integrating gives the conserved energy
//! `a'^2 / 2 + lambda ln a + xi^2 / (2 a^2)`. For `lambda > 0` and `xi != 0`
//! the potential has a single minimum at `|xi| / sqrt(lambda)` and every
//! other orbit is closed; its period is computed both by singular quadrature
//! between the turning points and by direct simulation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, OdeContext, Result};
use crate::ode::{
    self, detect_events, integrate_until_halt, roots::bisect, Direction, EventSpec,
    IntegratorConfig, OdeError, OdeState, Trajectory,
};

/// Relative band used to decide that an initial state sits on the equilibrium.
pub const STEADY_REL_TOL: f64 = 1e-12;

/// Below this fraction of the initial scale a halted collapse counts as touchdown.
const TOUCHDOWN_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmdenParams {
    pub lambda: f64,
    pub xi: f64,
    pub a0: f64,
    pub a1: f64,
}

impl EmdenParams {
    pub fn new(lambda: f64, xi: f64, a0: f64, a1: f64) -> Result<Self> {
        let p = Self { lambda, xi, a0, a1 };
        p.validate()?;
        Ok(p)
    }

    /// `a'' = -1/a + 1/a^3`, `a(0) = 1`, `a'(0) = 1`: the plotted example orbit.
    pub fn reference_orbit() -> Self {
        Self {
            lambda: 1.0,
            xi: 1.0,
            a0: 1.0,
            a1: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.lambda, self.xi, self.a0, self.a1]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::domain("Emden parameters must be finite"));
        }
        if !(self.a0 > 0.0) {
            return Err(Error::domain(format!("a0 = {} must be positive", self.a0)));
        }
        Ok(())
    }

    /// Right-hand side of the first-order system `(a, a')`. Returns NaN for
    /// `a <= 0` so that trial steps past a collapse are rejected.
    pub fn rhs(&self) -> impl Fn(f64, &[f64], &mut [f64]) + Copy {
        let (lambda, xi2) = (self.lambda, self.xi * self.xi);
        move |_t, y, dy| {
            let a = y[0];
            dy[0] = y[1];
            dy[1] = if a > 0.0 {
                -lambda / a + xi2 / (a * a * a)
            } else {
                f64::NAN
            };
        }
    }

    /// Total energy of the state `(a, adot)` under these parameters.
    pub fn energy(&self, a: f64, adot: f64) -> f64 {
        0.5 * adot * adot + self.lambda * a.ln() + self.xi * self.xi / (2.0 * a * a)
    }
}

/// Conserved energy of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub theta: f64,
}

pub fn energy_level(p: &EmdenParams) -> EnergyLevel {
    EnergyLevel {
        theta: p.energy(p.a0, p.a1),
    }
}

/// `lambda ln a + xi^2 / (2 a^2)`.
pub fn potential(a: f64, p: &EmdenParams) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::domain(format!("potential needs a > 0, got {a}")));
    }
    Ok(p.lambda * a.ln() + p.xi * p.xi / (2.0 * a * a))
}

/// The potential minimum `|xi| / sqrt(lambda)`.
pub fn equilibrium_radius(p: &EmdenParams) -> Result<f64> {
    if !(p.lambda > 0.0) || p.xi == 0.0 {
        return Err(Error::domain(format!(
            "equilibrium needs lambda > 0 and xi != 0 (lambda = {}, xi = {})",
            p.lambda, p.xi
        )));
    }
    Ok(p.xi.abs() / p.lambda.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitClass {
    Steady,
    Periodic,
    GlobalNonPeriodic,
    FiniteTimeBlowup,
}

pub fn classify(p: &EmdenParams) -> OrbitClass {
    if p.lambda <= 0.0 {
        return OrbitClass::GlobalNonPeriodic;
    }
    if p.xi == 0.0 {
        return OrbitClass::FiniteTimeBlowup;
    }
    let abar = p.xi.abs() / p.lambda.sqrt();
    let at_rest = p.a1.abs() <= STEADY_REL_TOL * p.lambda.sqrt();
    if (p.a0 - abar).abs() <= STEADY_REL_TOL * abar && at_rest {
        OrbitClass::Steady
    } else {
        OrbitClass::Periodic
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoints {
    pub a_min: f64,
    pub a_max: f64,
}

// theta - V(a), evaluated relative to the initial point so that the
// difference keeps its precision near a0.
fn energy_gap(p: &EmdenParams, a: f64) -> f64 {
    let d = a - p.a0;
    // ln(a0 / a); ln_1p only where it gains precision, since -d/a rounds to -1
    // for a >> a0
    let log_ratio = if d.abs() < 0.5 * a {
        (-d / a).ln_1p()
    } else {
        (p.a0 / a).ln()
    };
    let inv_sq = d * (a + p.a0) / (p.a0 * p.a0 * a * a); // 1/a0^2 - 1/a^2
    0.5 * p.a1 * p.a1 + p.lambda * log_ratio + 0.5 * p.xi * p.xi * inv_sq
}

/// Extreme scale values of a periodic orbit: the two roots of `V(a) = theta`.
pub fn turning_points(p: &EmdenParams) -> Result<TurningPoints> {
    let class = classify(p);
    if class != OrbitClass::Periodic {
        return Err(Error::NotPeriodic(class));
    }
    let abar = equilibrium_radius(p)?;
    let gap = |a: f64| energy_gap(p, a);

    // Starting from rest, a0 is itself one of the turning points.
    let exact_max = (p.a1 == 0.0 && p.a0 > abar).then_some(p.a0);
    let exact_min = (p.a1 == 0.0 && p.a0 < abar).then_some(p.a0);

    let a_max = match exact_max {
        Some(a) => a,
        None => {
            let mut hi = abar;
            while gap(hi) > 0.0 {
                hi *= 2.0;
                if !hi.is_finite() {
                    return Err(Error::domain("orbit energy too large to bracket a_max"));
                }
            }
            bisect(gap, abar.max(0.5 * hi), hi, 0.0).expect("bracket holds a sign change")
        }
    };
    let a_min = match exact_min {
        Some(a) => a,
        None => {
            let mut lo = abar;
            while gap(lo) > 0.0 {
                lo *= 0.5;
                if lo == 0.0 {
                    return Err(Error::domain("could not bracket a_min"));
                }
            }
            bisect(gap, lo, abar.min(2.0 * lo), 0.0).expect("bracket holds a sign change")
        }
    };
    Ok(TurningPoints { a_min, a_max })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodMethod {
    Quadrature,
    Simulation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodEstimate {
    pub period: f64,
    pub method: PeriodMethod,
    pub err_est: f64,
}

/// Small-oscillation period `2 pi / sqrt(V''(abar))`, with `V''(abar) = 2 lambda^2 / xi^2`.
pub fn linearized_period(p: &EmdenParams) -> Result<f64> {
    equilibrium_radius(p)?;
    Ok(2.0 * PI * p.xi.abs() / (2f64.sqrt() * p.lambda))
}

/// `T = 2 ∫ da / sqrt(2 (theta - V(a)))` over `[a_min, a_max]`.
pub fn period_by_quadrature(p: &EmdenParams, tol: f64) -> Result<PeriodEstimate> {
    let tp = turning_points(p)?;
    let (lo, hi) = (tp.a_min, tp.a_max);
    let xi2 = p.xi * p.xi;
    // V(e) - V(e + d), exact in d for small offsets from a turning point e
    let drop = |e: f64, d: f64| -> f64 {
        let x = e + d;
        -p.lambda * (d / e).ln_1p() + 0.5 * xi2 * d * (2.0 * e + d) / (e * e * x * x)
    };
    let integrand = |_x: f64, d_lo: f64, d_hi: f64| -> f64 {
        let h = if d_lo <= d_hi {
            drop(lo, d_lo)
        } else {
            drop(hi, -d_hi)
        };
        if h > 0.0 {
            1.0 / (2.0 * h).sqrt()
        } else {
            0.0
        }
    };
    let r = ode::quad_sin2(integrand, lo, hi, 0.5 * tol).context("period quadrature")?;
    Ok(PeriodEstimate {
        period: 2.0 * r.value,
        method: PeriodMethod::Quadrature,
        err_est: 2.0 * r.err_est,
    })
}

/// Integrator settings used when the caller does not supply any.
pub fn default_period_config() -> IntegratorConfig {
    IntegratorConfig::with_tolerances(1e-12, 1e-14).with_h_max(0.05)
}

/// Period from the spacing of successive maxima (`a'` crossing zero downward)
/// over at least three full cycles. `err_est` is the largest deviation of a
/// single cycle from the mean.
pub fn period_by_simulation(p: &EmdenParams, cfg: &IntegratorConfig) -> Result<PeriodEstimate> {
    let class = classify(p);
    if class != OrbitClass::Periodic {
        return Err(Error::NotPeriodic(class));
    }
    let mut horizon = 4.5 * linearized_period(p)?;
    let spec = EventSpec::new(|_t: f64, y: &[f64]| y[1], Direction::Falling);
    for _ in 0..40 {
        let traj = ode::integrate(p.rhs(), &OdeState::new(0.0, [p.a0, p.a1]), horizon, cfg)
            .context("period simulation")?;
        let events = detect_events(&traj, &spec);
        if events.len() >= 4 {
            let n = events.len() - 1;
            let mean = (events[n] - events[0]) / n as f64;
            let err_est = events
                .windows(2)
                .map(|w| ((w[1] - w[0]) - mean).abs())
                .fold(0.0, f64::max);
            return Ok(PeriodEstimate {
                period: mean,
                method: PeriodMethod::Simulation,
                err_est,
            });
        }
        horizon *= 2.0;
    }
    Err(Error::domain(
        "fewer than three cycles found within the simulation horizon",
    ))
}

/// A scale-factor run, with the collapse time when `a` reached zero.
#[derive(Debug, Clone)]
pub struct ScaleRun {
    pub trajectory: Trajectory,
    pub touchdown: Option<f64>,
}

impl ScaleRun {
    /// `(a, a')` at time `t` from the dense output.
    pub fn scale_at(&self, t: f64) -> Option<(f64, f64)> {
        self.trajectory.eval_second_order(t, 0, 1)
    }
}

/// Integrate `(a, a')` up to `t_end`. A collapse to `a = 0` stops the run and
/// is reported as a touchdown time; any other integrator halt is an error.
pub fn integrate_scale(p: &EmdenParams, t_end: f64, cfg: &IntegratorConfig) -> Result<ScaleRun> {
    p.validate()?;
    run_scale(p.rhs(), p.a0, p.a1, t_end, cfg)
}

pub(crate) fn run_scale<F>(
    rhs: F,
    a0: f64,
    a1: f64,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<ScaleRun>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    if !(t_end > 0.0) {
        return Err(Error::domain(format!("t_end = {t_end} must be positive")));
    }
    let out = integrate_until_halt(rhs, &OdeState::new(0.0, [a0, a1]), t_end, cfg)
        .context("scale factor integration")?;
    let Some(halt) = out.halt else {
        return Ok(ScaleRun {
            trajectory: out.trajectory,
            touchdown: None,
        });
    };
    let last = out.trajectory.final_state();
    let (a, adot) = (last.y[0], last.y[1]);
    let collapsing = adot < 0.0 && a <= TOUCHDOWN_FRACTION * a0.max(1.0);
    match halt {
        OdeError::StepUnderflow { .. } | OdeError::StateBlowup { .. } if collapsing => {
            Ok(ScaleRun {
                touchdown: Some(last.t + a / adot.abs()),
                trajectory: out.trajectory,
            })
        }
        other => Err(Error::Ode {
            context: "scale factor integration",
            source: other,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: f64, xi: f64, a0: f64, a1: f64) -> EmdenParams {
        EmdenParams::new(lambda, xi, a0, a1).unwrap()
    }

    #[test]
    fn energy_levels() {
        assert_eq!(energy_level(&params(1.0, 1.0, 1.0, 0.0)).theta, 0.5);
        assert_eq!(energy_level(&params(1.0, 1.0, 1.0, 1.0)).theta, 1.0);
        assert_eq!(energy_level(&params(0.0, 2.0, 2.0, 0.0)).theta, 0.5);
    }

    #[test]
    fn potential_values_and_domain() {
        let p = params(1.0, 1.0, 1.0, 0.0);
        assert_eq!(potential(1.0, &p).unwrap(), 0.5);
        let p0 = params(1.0, 0.0, 1.0, 0.0);
        assert!((potential(std::f64::consts::E, &p0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(potential(0.0, &p), Err(Error::Domain(_))));
        assert!(potential(-1.0, &p).is_err());
    }

    #[test]
    fn potential_minimum_matches_golden_section_oracle() {
        let p = params(4.0, 2.0, 1.0, 0.0);
        let v = |a: f64| potential(a, &p).unwrap();
        // coarse grid then golden-section refinement
        let (mut best, mut best_v) = (0.0, f64::INFINITY);
        for k in 1..=4000 {
            let a = k as f64 * 1e-3;
            if v(a) < best_v {
                best = a;
                best_v = v(a);
            }
        }
        let (mut lo, mut hi) = (best - 1e-3, best + 1e-3);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if v(m1) < v(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let amin = 0.5 * (lo + hi);
        assert!((amin - 1.0).abs() < 1e-6);
        assert_eq!(equilibrium_radius(&p).unwrap(), 1.0);
        assert_eq!(v(1.0), 2.0);
    }

    #[test]
    fn equilibrium_radius_cases() {
        assert_eq!(
            equilibrium_radius(&params(1.0, 1.0, 1.0, 0.0)).unwrap(),
            1.0
        );
        assert_eq!(
            equilibrium_radius(&params(1.0, 3.0, 1.0, 0.0)).unwrap(),
            3.0
        );
        let p = params(2.0, 1.5, 1.0, 0.0);
        let abar = equilibrium_radius(&p).unwrap();
        let mut dy = [0.0; 2];
        p.rhs()(0.0, &[abar, 0.0], &mut dy);
        assert!(dy[1].abs() < 1e-15);
        assert!(equilibrium_radius(&params(0.0, 1.0, 1.0, 0.0)).is_err());
        assert!(equilibrium_radius(&params(1.0, 0.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&params(1.0, 1.0, 1.0, 0.0)), OrbitClass::Steady);
        assert_eq!(classify(&params(1.0, 1.0, 1.0, 1.0)), OrbitClass::Periodic);
        assert_eq!(
            classify(&params(1.0, 0.0, 1.0, 0.0)),
            OrbitClass::FiniteTimeBlowup
        );
        assert_eq!(
            classify(&params(0.0, 2.0, 2.0, 0.0)),
            OrbitClass::GlobalNonPeriodic
        );
        assert_eq!(
            classify(&params(-1.0, 1.0, 1.0, 0.0)),
            OrbitClass::GlobalNonPeriodic
        );
        assert_eq!(
            classify(&params(1.0, 1.0, 1.0 + 1e-13, 0.0)),
            OrbitClass::Steady
        );
        assert_eq!(
            classify(&params(1.0, 1.0, 1.0 + 1e-9, 0.0)),
            OrbitClass::Periodic
        );
        assert!(EmdenParams::new(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(EmdenParams::new(1.0, f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn turning_points_of_reference_orbit() {
        let p = EmdenParams::reference_orbit();
        let tp = turning_points(&p).unwrap();
        // oracle: plain bisection of ln a + 1/(2 a^2) - 1 on fixed brackets
        let g = |a: f64| a.ln() + 0.5 / (a * a) - 1.0;
        let (mut lo, mut hi) = (0.3, 1.0);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if g(m) > 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        let amin_ref = 0.5 * (lo + hi);
        let (mut lo, mut hi) = (1.0, 5.0);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if g(m) < 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        let amax_ref = 0.5 * (lo + hi);
        assert!((tp.a_min - amin_ref).abs() < 1e-14);
        assert!((tp.a_max - amax_ref).abs() < 1e-13);
        assert!((tp.a_min - 0.5638).abs() < 1e-3 && (tp.a_max - 2.5111).abs() < 1e-3);
        let theta = energy_level(&p).theta;
        for a in [tp.a_min, tp.a_max] {
            assert!((potential(a, &p).unwrap() - theta).abs() <= 1e-12 * theta.abs().max(1.0));
        }
    }

    #[test]
    fn turning_points_start_at_rest() {
        let tp = turning_points(&params(1.0, 1.0, 2.0, 0.0)).unwrap();
        assert_eq!(tp.a_max, 2.0);
        assert!(tp.a_min < 1.0);
        let tp = turning_points(&params(1.0, 1.0, 0.5, 0.0)).unwrap();
        assert_eq!(tp.a_min, 0.5);
    }

    #[test]
    fn turning_points_shrink_linearly_near_steady() {
        let width = |eps: f64| {
            let tp = turning_points(&params(1.0, 1.0, 1.0, eps)).unwrap();
            tp.a_max - tp.a_min
        };
        let (w1, w2) = (width(1e-6), width(5e-7));
        // harmonic approximation: width = 2 eps / omega, omega = sqrt(2)
        assert!((w1 - 2e-6 / 2f64.sqrt()).abs() < 1e-9);
        assert!((w1 / w2 - 2.0).abs() < 1e-3);
        assert!(matches!(
            turning_points(&params(1.0, 1.0, 1.0, 0.0)),
            Err(Error::NotPeriodic(OrbitClass::Steady))
        ));
    }

    #[test]
    fn period_quadrature_is_sign_symmetric_and_near_linear_limit() {
        let p = params(1.0, 1.0, 1.0, 1e-4);
        let t = period_by_quadrature(&p, 1e-10).unwrap().period;
        let t_lin = 2.0 * std::f64::consts::PI / 2f64.sqrt();
        assert!(((t - t_lin) / t_lin).abs() < 1e-3);
        assert_eq!(linearized_period(&p).unwrap(), t_lin);

        let q = EmdenParams::reference_orbit();
        let flipped = EmdenParams { xi: -q.xi, ..q };
        assert_eq!(
            period_by_quadrature(&q, 1e-10).unwrap().period,
            period_by_quadrature(&flipped, 1e-10).unwrap().period
        );
    }

    #[test]
    fn both_period_routes_agree_on_reference_orbit() {
        let p = EmdenParams::reference_orbit();
        let tq = period_by_quadrature(&p, 1e-10).unwrap();
        let ts = period_by_simulation(&p, &default_period_config()).unwrap();
        assert!(tq.period > 0.0);
        assert!(((tq.period - ts.period) / tq.period).abs() < 1e-6);
        assert!(
            ts.err_est <= 1e-8 * ts.period,
            "cycle spread {}",
            ts.err_est
        );
    }

    #[test]
    fn steady_has_no_period() {
        let p = params(1.0, 1.0, 1.0, 0.0);
        assert!(matches!(
            period_by_simulation(&p, &default_period_config()),
            Err(Error::NotPeriodic(OrbitClass::Steady))
        ));
        assert!(period_by_quadrature(&p, 1e-10).is_err());
    }

    #[test]
    fn steady_state_stays_put() {
        let p = params(1.0, 1.0, 1.0, 0.0);
        let run = integrate_scale(&p, 100.0, &IntegratorConfig::default()).unwrap();
        assert!(run.touchdown.is_none());
        for i in 0..run.trajectory.len() {
            assert!((run.trajectory.state(i)[0] - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn non_rotating_collapse_matches_energy_quadrature() {
        let p = params(1.0, 0.0, 1.0, 0.0);
        let cfg = IntegratorConfig::with_tolerances(1e-11, 1e-14);
        let run = integrate_scale(&p, 10.0, &cfg).unwrap();
        let t_star = run.touchdown.expect("collapse");
        let oracle =
            ode::quad_singular(|a: f64| 1.0 / (-2.0 * a.ln()).sqrt(), 0.0, 1.0, 1e-12).unwrap();
        assert!(
            ((t_star - oracle) / oracle).abs() < 1e-6,
            "{t_star} vs {oracle}"
        );
        // monotone collapse
        let a: Vec<f64> = (0..run.trajectory.len())
            .map(|i| run.trajectory.state(i)[0])
            .collect();
        assert!(a.windows(2).skip(1).all(|w| w[1] < w[0]));
    }

    #[test]
    fn negative_lambda_runs_globally() {
        let p = params(-1.0, 1.0, 1.0, 0.0);
        let run = integrate_scale(&p, 100.0, &IntegratorConfig::default()).unwrap();
        assert!(run.touchdown.is_none());
        assert_eq!(run.trajectory.t_end(), 100.0);
        let a: Vec<f64> = (0..run.trajectory.len())
            .map(|i| run.trajectory.state(i)[0])
            .collect();
        assert!(a.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn wide_orbit_turning_point_is_a_true_root() {
        // weak confinement: a_max is around 6e20
        let p = params(0.3, 2.7, 0.5, 0.0);
        let tp = turning_points(&p).unwrap();
        assert_eq!(tp.a_min, 0.5);
        let theta = energy_level(&p).theta;
        assert!((potential(tp.a_max, &p).unwrap() - theta).abs() <= 1e-12 * theta);
        // the centrifugal term is negligible out there, so lambda ln a_max = theta
        let oracle = (theta / 0.3).exp();
        assert!((tp.a_max / oracle - 1.0).abs() < 1e-6);
        assert!(period_by_quadrature(&p, 1e-10).unwrap().period > 0.0);
    }
}
