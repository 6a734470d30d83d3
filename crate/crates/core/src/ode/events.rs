use super::dopri::{run, IntegratorConfig, OdeState, Outcome, Trajectory};
use super::roots::brent;
use super::OdeError;

pub const DEFAULT_REFINE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Rising,
    Falling,
    Any,
}

/// Zero crossing of a scalar function of the state.
#[derive(Debug, Clone)]
pub struct EventSpec<F> {
    pub event_fn: F,
    pub direction: Direction,
    pub refine_tol: f64,
}

impl<F: Fn(f64, &[f64]) -> f64> EventSpec<F> {
    pub fn new(event_fn: F, direction: Direction) -> Self {
        Self {
            event_fn,
            direction,
            refine_tol: DEFAULT_REFINE_TOL,
        }
    }

    pub fn with_refine_tol(mut self, tol: f64) -> Self {
        assert!(tol > 0.0, "refine_tol must be positive");
        self.refine_tol = tol;
        self
    }

    // A crossing from g0 to g1. Exact zeros count at the segment end only, so
    // a zero sitting on a node is reported once.
    fn crosses(&self, g0: f64, g1: f64) -> bool {
        let rising = g0 < 0.0 && g1 >= 0.0;
        let falling = g0 > 0.0 && g1 <= 0.0;
        match self.direction {
            Direction::Rising => rising,
            Direction::Falling => falling,
            Direction::Any => rising || falling,
        }
    }

    fn refine(&self, traj: &Trajectory, t0: f64, t1: f64, g1: f64) -> f64 {
        if g1 == 0.0 {
            return t1;
        }
        let mut buf = vec![0.0; traj.dim()];
        let g = |t: f64| {
            traj.eval_into(t, &mut buf);
            (self.event_fn)(t, &buf)
        };
        // Interpolated values can disagree in sign with node values only when
        // both are at rounding level; fall back to the segment end.
        brent(g, t0, t1, self.refine_tol, 200).unwrap_or(t1)
    }
}

/// Locate every crossing along the trajectory, in time order.
///
/// Sign changes are detected between consecutive nodes and refined on the
/// dense output. A zero at the very first node is not an event.
pub fn detect_events<F: Fn(f64, &[f64]) -> f64>(
    traj: &Trajectory,
    spec: &EventSpec<F>,
) -> Vec<f64> {
    let mut events = Vec::new();
    if traj.len() < 2 {
        return events;
    }
    let times = traj.times();
    let mut g_prev = (spec.event_fn)(times[0], traj.state(0));
    for i in 1..traj.len() {
        let g = (spec.event_fn)(times[i], traj.state(i));
        if spec.crosses(g_prev, g) {
            events.push(spec.refine(traj, times[i - 1], times[i], g));
        }
        g_prev = g;
    }
    events
}

/// Integrate until the first event or `t_end`. When an event fires the final
/// node is moved onto the refined event time, so the trajectory ends exactly
/// there. Returns the outcome and the event time, if any.
pub fn integrate_to_event<F, G>(
    rhs: F,
    y0: &OdeState,
    t_end: f64,
    cfg: &IntegratorConfig,
    spec: &EventSpec<G>,
) -> Result<(Outcome, Option<f64>), OdeError>
where
    F: Fn(f64, &[f64], &mut [f64]),
    G: Fn(f64, &[f64]) -> f64,
{
    let mut g_prev = (spec.event_fn)(y0.t, &y0.y);
    let mut fired = false;
    let outcome = run(&rhs, y0, t_end, cfg, |traj| {
        let i = traj.len() - 1;
        let g = (spec.event_fn)(traj.times()[i], traj.state(i));
        let hit = spec.crosses(g_prev, g);
        g_prev = g;
        fired = hit;
        hit
    })?;
    if !fired {
        return Ok((outcome, None));
    }

    let mut traj = outcome.trajectory;
    let n = traj.len();
    let (t0, t1) = (traj.times()[n - 2], traj.times()[n - 1]);
    let g1 = (spec.event_fn)(t1, traj.state(n - 1));
    let t_event = spec.refine(&traj, t0, t1, g1);
    if t_event < t1 {
        let y = traj.eval(t_event).expect("event inside last segment");
        let mut f = vec![0.0; y.len()];
        rhs(t_event, &y, &mut f);
        traj.replace_last(t_event, &y, &f);
    }
    Ok((
        Outcome {
            trajectory: traj,
            halt: outcome.halt,
        },
        Some(t_event),
    ))
}
