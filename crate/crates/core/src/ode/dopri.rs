use serde::{Deserialize, Serialize};

use super::OdeError;

/// Any state component with magnitude above this halts integration.
pub const OVERFLOW_GUARD: f64 = 1e300;
/// A step shorter than this multiple of `|t|` halts integration.
pub const STEP_UNDERFLOW_REL: f64 = 1e-14;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// b - b*, the embedded error weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// A point `(t, y)` of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeState {
    pub t: f64,
    pub y: Vec<f64>,
}

impl OdeState {
    pub fn new(t: f64, y: impl Into<Vec<f64>>) -> Self {
        Self { t, y: y.into() }
    }
}

/// Step-size control and budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: 1e-3,
            h_max: 0.1,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        if self.h_init > h_max {
            self.h_init = h_max;
        }
        self
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        let bad = |msg: &str| Err(OdeError::InvalidConfig(msg.to_string()));
        if !(self.rtol > 0.0 && self.rtol.is_finite()) {
            return bad("rtol must be positive");
        }
        if !(self.atol >= 0.0 && self.atol.is_finite()) {
            return bad("atol must be non-negative");
        }
        if !(self.h_init > 0.0 && self.h_init.is_finite()) {
            return bad("h_init must be positive");
        }
        if !(self.h_max >= self.h_init) {
            return bad("h_max must be at least h_init");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive");
        }
        Ok(())
    }
}

/// Accepted nodes of an integration together with the derivative at each
/// node. Consecutive nodes delimit the dense-output segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dim: usize,
    t: Vec<f64>,
    y: Vec<f64>,
    f: Vec<f64>,
}

impl Trajectory {
    fn start(t: f64, y: &[f64], f: &[f64]) -> Self {
        Self {
            dim: y.len(),
            t: vec![t],
            y: y.to_vec(),
            f: f.to_vec(),
        }
    }

    fn push(&mut self, t: f64, y: &[f64], f: &[f64]) {
        self.t.push(t);
        self.y.extend_from_slice(y);
        self.f.extend_from_slice(f);
    }

    /// Replace the final node. Used to cut a run at a terminal event.
    pub(crate) fn replace_last(&mut self, t: f64, y: &[f64], f: &[f64]) {
        let n = self.t.len() - 1;
        self.t[n] = t;
        let d = self.dim;
        self.y[n * d..(n + 1) * d].copy_from_slice(y);
        self.f[n * d..(n + 1) * d].copy_from_slice(f);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of accepted nodes (segments + 1).
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn t_start(&self) -> f64 {
        self.t[0]
    }

    pub fn t_end(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.y[i * self.dim..(i + 1) * self.dim]
    }

    pub fn deriv(&self, i: usize) -> &[f64] {
        &self.f[i * self.dim..(i + 1) * self.dim]
    }

    pub fn node(&self, i: usize) -> OdeState {
        OdeState::new(self.t[i], self.state(i))
    }

    pub fn final_state(&self) -> OdeState {
        self.node(self.len() - 1)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_start() && t <= self.t_end()
    }

    /// Index `i` of the segment `[t_i, t_{i+1}]` holding `t`, or `None` when
    /// `t` is outside the span. A trajectory with a single node has no segments.
    fn segment(&self, t: f64) -> Option<usize> {
        if !self.contains(t) || self.len() < 2 {
            return None;
        }
        let i = self.t.partition_point(|&ti| ti <= t);
        Some(i.saturating_sub(1).min(self.len() - 2))
    }

    fn node_index(&self, t: f64) -> Option<usize> {
        self.t.binary_search_by(|ti| ti.total_cmp(&t)).ok()
    }

    /// Cubic Hermite interpolation of every component. Node times return the
    /// stored node state bit for bit.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) -> bool {
        if let Some(i) = self.node_index(t) {
            out.copy_from_slice(self.state(i));
            return true;
        }
        let Some(i) = self.segment(t) else {
            return false;
        };
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let (y0, y1) = (self.state(i), self.state(i + 1));
        let (f0, f1) = (self.deriv(i), self.deriv(i + 1));
        for k in 0..self.dim {
            out[k] = h00 * y0[k] + h * (h10 * f0[k] + h11 * f1[k]) + h01 * y1[k];
        }
        true
    }

    pub fn eval(&self, t: f64) -> Option<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out).then_some(out)
    }

    /// Quintic Hermite interpolation for a component pair where `y[vel]` is
    /// the time derivative of `y[pos]`. Uses position, velocity and
    /// acceleration at both segment ends; returns `(position, velocity)`.
    pub fn eval_second_order(&self, t: f64, pos: usize, vel: usize) -> Option<(f64, f64)> {
        if let Some(i) = self.node_index(t) {
            let y = self.state(i);
            return Some((y[pos], y[vel]));
        }
        let i = self.segment(t)?;
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (y0, y1) = (self.state(i), self.state(i + 1));
        let (f0, f1) = (self.deriv(i), self.deriv(i + 1));
        let (p0, v0, a0) = (y0[pos], y0[vel], f0[vel]);
        let (p1, v1, a1) = (y1[pos], y1[vel], f1[vel]);

        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        let s5 = s4 * s;
        let hp0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
        let hv0 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
        let ha0 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
        let ha1 = 0.5 * s3 - s4 + 0.5 * s5;
        let hv1 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
        let hp1 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
        let p = hp0 * p0 + hp1 * p1 + h * (hv0 * v0 + hv1 * v1) + h * h * (ha0 * a0 + ha1 * a1);

        // d/ds of the basis, divided by h below
        let dp0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
        let dv0 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
        let da0 = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4;
        let da1 = 1.5 * s2 - 4.0 * s3 + 2.5 * s4;
        let dv1 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
        let dp1 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;
        let v = (dp0 * p0 + dp1 * p1) / h + (dv0 * v0 + dv1 * v1) + h * (da0 * a0 + da1 * a1);
        Some((p, v))
    }
}

/// Result of a run that may have stopped early.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub trajectory: Trajectory,
    /// Why the run stopped before `t_end`, if it did.
    pub halt: Option<OdeError>,
}

/// Integrate `y' = rhs(t, y)` from `y0` to `t_end`, failing on any halt.
pub fn integrate<F>(
    rhs: F,
    y0: &OdeState,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, OdeError>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let out = integrate_until_halt(rhs, y0, t_end, cfg)?;
    match out.halt {
        Some(err) => Err(err),
        None => Ok(out.trajectory),
    }
}

/// Integrate to `t_end`, returning the partial trajectory alongside the halt
/// reason instead of discarding it. Only invalid input is an `Err`.
pub fn integrate_until_halt<F>(
    rhs: F,
    y0: &OdeState,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Outcome, OdeError>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    run(rhs, y0, t_end, cfg, |_| false)
}

/// Core driver. `stop` is consulted after every accepted step; returning
/// `true` ends the run without a halt reason.
pub(crate) fn run<F, S>(
    rhs: F,
    y0: &OdeState,
    t_end: f64,
    cfg: &IntegratorConfig,
    mut stop: S,
) -> Result<Outcome, OdeError>
where
    F: Fn(f64, &[f64], &mut [f64]),
    S: FnMut(&Trajectory) -> bool,
{
    cfg.validate()?;
    if y0.y.is_empty() {
        return Err(OdeError::InvalidInput("empty state vector".into()));
    }
    if !y0.t.is_finite() || !(t_end > y0.t) {
        return Err(OdeError::InvalidInput(format!(
            "t_end = {t_end} must exceed t0 = {}",
            y0.t
        )));
    }
    if y0.y.iter().any(|v| !v.is_finite()) {
        return Err(OdeError::InvalidInput("non-finite initial state".into()));
    }

    let n = y0.y.len();
    let mut t = y0.t;
    let mut y = y0.y.clone();
    let mut k1 = vec![0.0; n];
    rhs(t, &y, &mut k1);
    if k1.iter().any(|v| !v.is_finite()) {
        return Err(OdeError::InvalidInput(
            "right-hand side not finite at t0".into(),
        ));
    }

    let mut traj = Trajectory::start(t, &y, &k1);
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) = (
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
    );
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];

    let mut h = cfg.h_init.min(cfg.h_max);
    let mut attempts = 0usize;
    let mut rejected_last = false;

    let halt = loop {
        if t >= t_end {
            break None;
        }
        if attempts >= cfg.max_steps {
            break Some(OdeError::StepBudgetExceeded {
                t,
                max_steps: cfg.max_steps,
            });
        }
        attempts += 1;

        let remaining = t_end - t;
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        if h < STEP_UNDERFLOW_REL * t.abs() || t + h == t {
            break Some(OdeError::StepUnderflow { t, h });
        }

        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        rhs(t + C2 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(t + C3 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(t + C4 * h, &tmp, &mut k4);
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(t + C5 * h, &tmp, &mut k5);
        for i in 0..n {
            tmp[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_next = if last { t_end } else { t + h };
        rhs(t_next, &tmp, &mut k6);
        for i in 0..n {
            y_new[i] =
                y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        rhs(t_next, &y_new, &mut k7);

        let mut acc = 0.0;
        let mut finite = true;
        for i in 0..n {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = cfg.atol + cfg.rtol * y[i].abs().max(y_new[i].abs());
            let r = e / sc;
            acc += r * r;
            finite &= y_new[i].is_finite() && k7[i].is_finite() && e.is_finite();
        }
        let err = (acc / n as f64).sqrt();

        if !finite {
            h *= MIN_FACTOR;
            rejected_last = true;
            continue;
        }

        if err <= 1.0 {
            t = t_next;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            traj.push(t, &y, &k1);
            if y.iter().any(|v| v.abs() > OVERFLOW_GUARD) {
                break Some(OdeError::StateBlowup { t });
            }
            if stop(&traj) {
                break None;
            }
            let mut factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if rejected_last {
                factor = factor.min(1.0);
            }
            rejected_last = false;
            h = (h * factor).min(cfg.h_max);
        } else {
            let factor = (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
            h *= factor;
            rejected_last = true;
        }
    };

    Ok(Outcome {
        trajectory: traj,
        halt,
    })
}
