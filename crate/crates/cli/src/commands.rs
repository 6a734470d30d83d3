//! The five subcommands. Each takes validated [`Settings`] and returns the
//! artifacts to write; nothing here touches the file system.

use std::f64::consts::PI;

use ep2d_core::emden::{default_period_config, linearized_period, turning_points};
use ep2d_core::residual::{convergence_study, mass_residual, momentum_residual, poisson_residual};
use ep2d_core::{
    classify, default_profile_config, energy_level, equilibrium_radius, integrate_scale,
    period_by_quadrature, period_by_simulation, solve_profile, ConvergenceResult,
    ConvergenceStatus, EmdenParams, Equation, Error, Field, FieldSample, GWParams, GwSolution,
    IntegratorConfig, LiouvilleParams, OrbitClass, PressureLaw, RotParams, RotSolution2D,
    SamplePoint, SwirlAnsatz, TurningPoints, ZZSolution, ZzVariant,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Settings;
use crate::error::CliError;
use crate::output::{to_json, Table};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EMDEN_COLUMNS: &[&str] = &["t", "a", "adot", "energy"];
pub const LIOUVILLE_COLUMNS: &[&str] = &["s", "f", "fdot", "enclosed_mass", "bracket"];
pub const FIELDS_COLUMNS: &[&str] = &["t", "x", "y", "rho", "u1", "u2", "phi_r"];

pub const EMDEN_KEYS: &[&str] = &[
    "lambda",
    "xi",
    "a0",
    "a1",
    "t_end",
    "samples",
    "rtol",
    "atol",
    "h_max",
    "max_steps",
];
pub const LIOUVILLE_KEYS: &[&str] = &[
    "K",
    "lambda",
    "alpha",
    "s_max",
    "s_out",
    "samples",
    "rtol",
    "atol",
    "h_max",
    "max_steps",
];
pub const FIELDS_KEYS: &[&str] = &[
    "family",
    "lambda",
    "xi",
    "K",
    "alpha",
    "a0",
    "a1",
    "s_max",
    "rho0",
    "N",
    "alpha_center",
    "variant",
    "t_start",
    "t_end",
    "nt",
    "r_max",
    "nr",
    "ntheta",
];
pub const VERIFY_KEYS: &[&str] = &[
    "family", "lambda", "xi", "K", "alpha", "a0", "a1", "s_max", "rho0", "points", "seed", "t_min",
    "t_max", "r_min", "r_max", "h", "corrupt", "swirls",
];
pub const PERIOD_KEYS: &[&str] = &[
    "lambda",
    "xi",
    "a0",
    "a1",
    "tol",
    "rtol",
    "atol",
    "h_max",
    "max_steps",
];

/// What a command produced. `failure` is set when the command ran but its
/// checks did not pass.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub name: &'static str,
    pub json: String,
    pub csv: Option<String>,
    pub failure: Option<String>,
}

fn integrator(s: &Settings, base: IntegratorConfig) -> Result<IntegratorConfig, CliError> {
    let cfg = IntegratorConfig {
        rtol: s.f64("rtol", base.rtol)?,
        atol: s.f64("atol", base.atol)?,
        h_max: s.f64("h_max", base.h_max)?,
        h_init: base.h_init,
        max_steps: s.usize("max_steps", base.max_steps)?,
    };
    let cfg = IntegratorConfig {
        h_init: cfg.h_init.min(cfg.h_max),
        ..cfg
    };
    cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
    Ok(cfg)
}

// Defaults give the reference orbit lambda = xi = a0 = a1 = 1.
fn emden_params(s: &Settings) -> Result<EmdenParams, CliError> {
    Ok(EmdenParams::new(
        s.f64("lambda", 1.0)?,
        s.f64("xi", 1.0)?,
        s.f64("a0", 1.0)?,
        s.f64("a1", 1.0)?,
    )?)
}

fn rot_params(s: &Settings, xi_default: f64) -> Result<RotParams, CliError> {
    Ok(RotParams {
        lambda: s.f64("lambda", 1.0)?,
        xi: s.f64("xi", xi_default)?,
        k: s.f64("K", 1.0)?,
        alpha: s.f64("alpha", 0.0)?,
        a0: s.f64("a0", 1.0)?,
        a1: s.f64("a1", 1.0)?,
    })
}

fn positive_count(s: &Settings, key: &str, default: usize, min: usize) -> Result<usize, CliError> {
    let n = s.usize(key, default)?;
    if n < min {
        return Err(CliError::usage(format!("{key} must be at least {min}")));
    }
    Ok(n)
}

#[derive(Serialize)]
struct EmdenReport {
    command: &'static str,
    tool_version: &'static str,
    inputs: Value,
    classification: OrbitClass,
    theta: f64,
    equilibrium_radius: Option<f64>,
    turning_points: Option<TurningPoints>,
    period_quadrature: Option<f64>,
    period_simulation: Option<f64>,
    touchdown_time: Option<f64>,
    t_final: f64,
    max_relative_energy_drift: f64,
    rows: usize,
}

/// Scale-factor orbit sampled uniformly on `[0, t_end]`, truncated at a
/// touchdown.
pub fn emden(s: &Settings) -> Result<Artifacts, CliError> {
    let p = emden_params(s)?;
    let t_end = s.f64("t_end", 20.0)?;
    let samples = positive_count(s, "samples", 2001, 2)?;
    let cfg = integrator(s, IntegratorConfig::default())?;

    let run = integrate_scale(&p, t_end, &cfg)?;
    let class = classify(&p);
    let theta = energy_level(&p).theta;
    let t_final = run.trajectory.t_end();

    let mut table = Table::new(EMDEN_COLUMNS);
    let mut drift = 0.0f64;
    let mut emit = |t: f64, a: f64, adot: f64| {
        let e = p.energy(a, adot);
        drift = drift.max((e - theta).abs() / theta.abs().max(1.0));
        table.push_values(&[t, a, adot, e]);
    };
    for i in 0..samples {
        let t = t_end * i as f64 / (samples - 1) as f64;
        if t > t_final {
            break;
        }
        let (a, adot) = run.scale_at(t).expect("t inside the run");
        emit(t, a, adot);
    }
    if run.touchdown.is_some() {
        // last resolved state before the collapse
        let last = run.trajectory.final_state();
        emit(last.t, last.y[0], last.y[1]);
    }

    let periodic = class == OrbitClass::Periodic;
    let (tp, t_quad, t_sim) = if periodic {
        (
            Some(turning_points(&p)?),
            Some(period_by_quadrature(&p, 1e-10)?.period),
            Some(period_by_simulation(&p, &default_period_config())?.period),
        )
    } else {
        (None, None, None)
    };
    let report = EmdenReport {
        command: "emden",
        tool_version: TOOL_VERSION,
        inputs: json!({
            "lambda": p.lambda, "xi": p.xi, "a0": p.a0, "a1": p.a1, "t_end": t_end, "samples": samples,
            "rtol": cfg.rtol, "atol": cfg.atol, "h_max": cfg.h_max, "max_steps": cfg.max_steps,
        }),
        classification: class,
        theta,
        equilibrium_radius: equilibrium_radius(&p).ok(),
        turning_points: tp,
        period_quadrature: t_quad,
        period_simulation: t_sim,
        touchdown_time: run.touchdown,
        t_final,
        max_relative_energy_drift: drift,
        rows: table.rows.len(),
    };
    Ok(Artifacts {
        name: "emden",
        json: to_json(&report),
        csv: Some(table.to_csv()),
        failure: None,
    })
}

#[derive(Serialize)]
struct LiouvilleReport {
    command: &'static str,
    tool_version: &'static str,
    inputs: Value,
    series_coefficient: f64,
    solver_nodes: usize,
    max_abs_bracket: f64,
    max_identity_residual: f64,
    rows: usize,
}

/// Profile sampled at `samples` equally spaced radii in `(0, s_out]`.
pub fn liouville(s: &Settings) -> Result<Artifacts, CliError> {
    let p = LiouvilleParams::new(
        s.f64("K", 1.0)?,
        s.f64("lambda", 1.0)?,
        s.f64("alpha", 0.0)?,
    )?;
    let s_max = s.f64("s_max", ep2d_core::liouville::DEFAULT_S_MAX)?;
    let s_out = s.f64("s_out", s_max)?;
    let samples = positive_count(s, "samples", 400, 1)?;
    let cfg = integrator(s, default_profile_config())?;
    let prof = solve_profile(&p, s_max, &cfg)?;

    let mut table = Table::new(LIOUVILLE_COLUMNS);
    let mut max_bracket = 0.0f64;
    for i in 1..=samples {
        let sv = s_out * i as f64 / samples as f64;
        let (f, fdot) = prof.eval(sv)?;
        let bracket = prof.momentum_bracket(sv)?;
        max_bracket = max_bracket.max(bracket.abs());
        table.push_values(&[sv, f, fdot, prof.enclosed_mass(sv)?, bracket]);
    }
    let max_identity = prof
        .grid()
        .iter()
        .map(|&g| prof.mass_identity_residual(g))
        .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))?;

    let report = LiouvilleReport {
        command: "liouville",
        tool_version: TOOL_VERSION,
        inputs: json!({
            "K": p.k, "lambda": p.lambda, "alpha": p.alpha, "s_max": s_max, "s_out": s_out, "samples": samples,
            "rtol": cfg.rtol, "atol": cfg.atol, "h_max": cfg.h_max, "max_steps": cfg.max_steps,
        }),
        series_coefficient: p.series_coefficient(),
        solver_nodes: prof.grid().len(),
        max_abs_bracket: max_bracket,
        max_identity_residual: max_identity,
        rows: table.rows.len(),
    };
    Ok(Artifacts {
        name: "liouville",
        json: to_json(&report),
        csv: Some(table.to_csv()),
        failure: None,
    })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Polar sample grid: the origin once, then `ntheta` angles on each of `nr`
/// rings out to `r_max`.
fn disk(r_max: f64, nr: usize, ntheta: usize) -> Vec<(f64, f64)> {
    let mut pts = vec![(0.0, 0.0)];
    for ir in 1..=nr {
        let r = r_max * ir as f64 / nr as f64;
        for it in 0..ntheta {
            let th = 2.0 * PI * it as f64 / ntheta as f64;
            pts.push((r * th.cos(), r * th.sin()));
        }
    }
    pts
}

fn zz_variant(s: &Settings) -> Result<ZzVariant, CliError> {
    match s.string("variant", "corrected") {
        "corrected" => Ok(ZzVariant::Corrected),
        "as-printed" => Ok(ZzVariant::AsPrinted),
        v => Err(CliError::usage(format!(
            "variant = {v:?}; expected corrected or as-printed"
        ))),
    }
}

fn yuen_params(s: &Settings) -> Result<RotParams, CliError> {
    let p = rot_params(s, 0.0)?;
    if p.xi != 0.0 {
        return Err(Error::Domain(format!(
            "the non-rotating family needs xi = 0, got {}",
            p.xi
        ))
        .into());
    }
    Ok(p)
}

/// Sampled fields of one family on a `t` x disk grid. Points outside the
/// family's region of validity are skipped and counted.
pub fn fields(s: &Settings) -> Result<Artifacts, CliError> {
    let family = s.string("family", "rotational").to_string();
    let nt = positive_count(s, "nt", 5, 1)?;
    let nr = positive_count(s, "nr", 16, 1)?;
    let ntheta = positive_count(s, "ntheta", 16, 1)?;
    let r_max = s.f64("r_max", 3.0)?;
    let s_max = s.f64("s_max", ep2d_core::liouville::DEFAULT_S_MAX)?;

    type Eval = Box<dyn Fn(f64, f64, f64) -> ep2d_core::Result<FieldSample>>;
    let (eval, t_default, extra, inputs): (Eval, (f64, f64), Value, Value) = match family.as_str() {
        "rotational" | "yuen" => {
            let p = if family == "yuen" {
                yuen_params(s)?
            } else {
                rot_params(s, 1.0)?
            };
            let period = (classify(&p.emden()) == OrbitClass::Periodic)
                .then(|| period_by_quadrature(&p.emden(), 1e-10).map(|e| e.period))
                .transpose()?;
            let t_hi = s.f64("t_end", period.unwrap_or(1.0))?;
            let sol = RotSolution2D::solve(&p, t_hi, s_max)?;
            let inputs = serde_json::to_value(p).expect("params serialize");
            (
                Box::new(move |t, x, y| sol.eval_rotational(t, x, y)),
                (0.0, t_hi),
                json!({ "period": period }),
                inputs,
            )
        }
        "zz-inner" | "zz-outer" => {
            let zz = ZZSolution::new(s.f64("K", 1.0)?, s.f64("rho0", 1.0)?)?;
            let variant = zz_variant(s)?;
            let inner = family == "zz-inner";
            let inputs =
                json!({ "K": zz.k, "rho0": zz.rho0, "pdot0": zz.pdot0, "variant": variant });
            (
                Box::new(move |t, x, y| {
                    if inner {
                        zz.eval_inner(t, x, y, variant)
                    } else {
                        zz.eval_outer(t, x, y)
                    }
                }),
                (0.5, 1.5),
                Value::Null,
                inputs,
            )
        }
        "gw" => {
            let n = s.u64("N", 3)?;
            let p = GWParams {
                n: u32::try_from(n).map_err(|_| CliError::usage("N too large"))?,
                k: s.f64("K", 1.0)?,
                lambda: s.f64("lambda", 0.0)?,
                alpha_center: s.f64("alpha_center", 1.0)?,
                a0: s.f64("a0", 1.0)?,
                a1: s.f64("a1", 0.5)?,
            };
            let t_hi = s.f64("t_end", 1.0)?;
            let sol = GwSolution::solve(&p, t_hi)?;
            let extra = json!({ "s_mu": sol.profile.s_mu });
            let inputs = serde_json::to_value(p).expect("params serialize");
            (
                Box::new(move |t, x, y| sol.eval(t, x, y)),
                (0.0, t_hi),
                extra,
                inputs,
            )
        }
        other => {
            return Err(CliError::usage(format!(
                "family = {other:?}; expected rotational, yuen, zz-inner, zz-outer or gw"
            )))
        }
    };
    let t_start = s.f64("t_start", t_default.0)?;
    let t_end = s.f64("t_end", t_default.1)?;
    if !(t_end >= t_start) {
        return Err(CliError::usage("t_end must not be smaller than t_start"));
    }

    let mut table = Table::new(FIELDS_COLUMNS);
    let mut skipped = 0usize;
    for t in linspace(t_start, t_end, nt) {
        for &(x, y) in &disk(r_max, nr, ntheta) {
            match eval(t, x, y) {
                Ok(f) => table.push(vec![
                    Some(t),
                    Some(x),
                    Some(y),
                    Some(f.rho),
                    Some(f.u1),
                    Some(f.u2),
                    f.phi_r,
                ]),
                Err(Error::OutsideRegion { .. }) => skipped += 1,
                Err(e) => return Err(e.into()),
            }
        }
    }
    let report = json!({
        "command": "fields",
        "tool_version": TOOL_VERSION,
        "family": family,
        "inputs": inputs,
        "grid": { "t_start": t_start, "t_end": t_end, "nt": nt, "r_max": r_max, "nr": nr, "ntheta": ntheta },
        "details": extra,
        "rows": table.rows.len(),
        "skipped_outside_region": skipped,
    });
    Ok(Artifacts {
        name: "fields",
        json: to_json(&report),
        csv: Some(table.to_csv()),
        failure: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Converge,
    Fail,
}

/// One convergence study with its expected outcome.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub equation: Equation,
    pub expect: Expect,
    pub status: ConvergenceStatus,
    pub estimated_order: Option<f64>,
    pub h_sequence: Vec<f64>,
    pub norms: Vec<f64>,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, expect: Expect, r: ConvergenceResult) -> Self {
        let passed = match expect {
            Expect::Converge => r.status == ConvergenceStatus::Converging,
            Expect::Fail => r.status == ConvergenceStatus::NonConverging,
        };
        Check {
            name: name.to_string(),
            equation: r.equation,
            expect,
            status: r.status,
            estimated_order: r.estimated_order,
            h_sequence: r.h_sequence,
            norms: r.norms,
            passed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub tool_version: &'static str,
    pub family: String,
    pub inputs: Value,
    pub points: Vec<SamplePoint>,
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

#[allow(clippy::too_many_arguments)]
fn run_studies<F: Field>(
    name: &str,
    field: &F,
    pts: &[SamplePoint],
    hs: &[f64],
    law: PressureLaw,
    equations: &[Equation],
    expect: Expect,
    out: &mut Vec<Check>,
) -> Result<(), CliError> {
    for &eq in equations {
        let r = match eq {
            Equation::Mass => convergence_study(|c| mass_residual(field, pts, c), hs)?,
            Equation::MomentumX => convergence_study(
                |c| Ok(momentum_residual(field, pts, c, law)?[0].clone()),
                hs,
            )?,
            Equation::MomentumY => convergence_study(
                |c| Ok(momentum_residual(field, pts, c, law)?[1].clone()),
                hs,
            )?,
            Equation::Poisson => convergence_study(|c| poisson_residual(field, pts, c), hs)?,
        };
        out.push(Check::new(name, expect, r));
    }
    Ok(())
}

/// Density tilt and gravity scaling used as the corrupted-field control.
fn corrupt(mut f: FieldSample, p: SamplePoint) -> FieldSample {
    f.rho *= 1.0 + 0.01 * (p.x + p.y);
    f.phi_r = f.phi_r.map(|g| 1.01 * g);
    f
}

fn polar_points(
    rng: &mut ChaCha8Rng,
    n: usize,
    t: (f64, f64),
    r: impl Fn(&mut ChaCha8Rng, f64) -> f64,
) -> Vec<SamplePoint> {
    (0..n)
        .map(|_| {
            let tt = rng.random_range(t.0..=t.1);
            let rr = r(rng, tt);
            let th = rng.random_range(0.0..2.0 * PI);
            SamplePoint::new(tt, rr * th.cos(), rr * th.sin())
        })
        .collect()
}

const ALL_EQUATIONS: &[Equation] = &[
    Equation::Mass,
    Equation::MomentumX,
    Equation::MomentumY,
    Equation::Poisson,
];
const EULER_EQUATIONS: &[Equation] = &[Equation::Mass, Equation::MomentumX, Equation::MomentumY];

/// Residual convergence studies for one family, including its negative
/// controls. `failure` is set unless every check met its expectation.
pub fn verify(s: &Settings) -> Result<Artifacts, CliError> {
    let report = verify_report(s)?;
    let failure = (!report.all_passed).then(|| {
        let bad: Vec<String> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}/{}", c.name, c.equation.name()))
            .collect();
        format!("checks not met: {}", bad.join(", "))
    });
    Ok(Artifacts {
        name: "verify",
        json: to_json(&report),
        csv: None,
        failure,
    })
}

pub fn verify_report(s: &Settings) -> Result<VerifyReport, CliError> {
    let family = s.string("family", "rotational").to_string();
    let n = positive_count(s, "points", 20, 1)?;
    let seed = s.u64("seed", 1)?;
    let hs = s.f64_list("h", &[1e-2, 5e-3, 2.5e-3])?;
    let corrupted = s.bool("corrupt", false)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h_big = hs.iter().cloned().fold(0.0, f64::max);
    let (t_min_default, t_max_default) = match family.as_str() {
        "zz" => (0.5, 1.5),
        "yuen" => (0.1, 1.0),
        _ => (0.1, 2.0),
    };
    let t_range = (
        s.f64("t_min", t_min_default)?,
        s.f64("t_max", t_max_default)?,
    );
    let r_range = (s.f64("r_min", 0.2)?, s.f64("r_max", 3.0)?);
    if !(t_range.0 < t_range.1 && 0.0 < r_range.0 && r_range.0 < r_range.1) {
        return Err(CliError::usage("need t_min < t_max and 0 < r_min < r_max"));
    }
    let mut checks = Vec::new();
    let mut points = Vec::new();
    let inputs;

    match family.as_str() {
        "rotational" | "yuen" => {
            let p = if family == "yuen" {
                yuen_params(s)?
            } else {
                rot_params(s, 1.0)?
            };
            let s_max = s.f64("s_max", ep2d_core::liouville::DEFAULT_S_MAX)?;
            let sol = RotSolution2D::solve(&p, t_range.1 + 2.0 * h_big, s_max)?;
            if let Some(t_c) = sol.scale.touchdown {
                return Err(Error::Domain(format!(
                    "the scale factor collapses at t = {t_c}, inside the sampled window"
                ))
                .into());
            }
            points = polar_points(&mut rng, n, t_range, |g, _| {
                g.random_range(r_range.0..=r_range.1)
            });
            let law = PressureLaw::Isothermal(p.k);
            let bad = |q: SamplePoint| sol.sample(q).map(|f| corrupt(f, q));
            if corrupted {
                run_studies(
                    &family,
                    &bad,
                    &points,
                    &hs,
                    law,
                    ALL_EQUATIONS,
                    Expect::Converge,
                    &mut checks,
                )?;
            } else {
                run_studies(
                    &family,
                    &sol,
                    &points,
                    &hs,
                    law,
                    ALL_EQUATIONS,
                    Expect::Converge,
                    &mut checks,
                )?;
            }
            run_studies(
                "corrupted-control",
                &bad,
                &points,
                &hs,
                law,
                ALL_EQUATIONS,
                Expect::Fail,
                &mut checks,
            )?;
            inputs = serde_json::to_value(p).expect("params serialize");
        }
        "swirl" => {
            let count = positive_count(s, "swirls", 5, 1)?;
            points = polar_points(&mut rng, n, t_range, |g, _| {
                g.random_range(r_range.0..=r_range.1)
            });
            let mut gs = Vec::new();
            for i in 0..count {
                let c: [f64; 4] = [
                    rng.random_range(-2.0..2.0),
                    rng.random_range(0.5..3.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(1.0..3.0),
                ];
                gs.push(json!({ "amplitude": c[0], "frequency": c[1], "decay_amplitude": c[2], "power": c[3] }));
                let ansatz = SwirlAnsatz::new(
                    |s: f64| (-s * s).exp(),
                    |t: f64| (2.0 + t.cos(), -t.sin()),
                    move |t: f64, r: f64| {
                        c[0] * (c[1] * t).sin() * r.powf(c[3]) + c[2] * r * (-r).exp()
                    },
                );
                let name = format!("swirl-{i}");
                let bad = |q: SamplePoint| ansatz.sample(q).map(|f| corrupt(f, q));
                let law = PressureLaw::None;
                if corrupted {
                    run_studies(
                        &name,
                        &bad,
                        &points,
                        &hs,
                        law,
                        &[Equation::Mass],
                        Expect::Converge,
                        &mut checks,
                    )?;
                } else {
                    run_studies(
                        &name,
                        &ansatz,
                        &points,
                        &hs,
                        law,
                        &[Equation::Mass],
                        Expect::Converge,
                        &mut checks,
                    )?;
                }
            }
            inputs = json!({
                "profile": "exp(-s^2)",
                "scale": "a(t) = 2 + cos t",
                "swirl": "G(t, r) = amplitude sin(frequency t) r^power + decay_amplitude r exp(-r)",
                "swirls": gs,
            });
        }
        "zz" => {
            let zz = ZZSolution::new(s.f64("K", 1.0)?, s.f64("rho0", 1.0)?)?;
            let law = PressureLaw::Gamma2(zz.k);
            if t_range.0 <= 2.0 * h_big {
                return Err(CliError::usage(
                    "t_min must exceed twice the largest step for the spiral family",
                ));
            }
            // inner samples sit well inside the interface, outer ones well outside
            let inner_pts = polar_points(&mut rng, n, t_range, |g, t| {
                zz.interface_radius(t) * g.random_range(0.05..0.8)
            });
            let outer_pts = polar_points(&mut rng, n, t_range, |g, t| {
                1.2 * zz.interface_radius(t) + g.random_range(r_range.0..=r_range.1)
            });
            let corrected = |q: SamplePoint| {
                let f = zz.eval_inner(q.t, q.x, q.y, ZzVariant::Corrected)?;
                Ok(if corrupted { corrupt(f, q) } else { f })
            };
            let printed = |q: SamplePoint| zz.eval_inner(q.t, q.x, q.y, ZzVariant::AsPrinted);
            let outer = |q: SamplePoint| zz.eval_outer(q.t, q.x, q.y);
            run_studies(
                "zz-inner",
                &corrected,
                &inner_pts,
                &hs,
                law,
                EULER_EQUATIONS,
                Expect::Converge,
                &mut checks,
            )?;
            run_studies(
                "zz-outer",
                &outer,
                &outer_pts,
                &hs,
                law,
                EULER_EQUATIONS,
                Expect::Converge,
                &mut checks,
            )?;
            run_studies(
                "zz-inner-as-printed",
                &printed,
                &inner_pts,
                &hs,
                law,
                &[Equation::Mass],
                Expect::Fail,
                &mut checks,
            )?;
            points.extend(inner_pts);
            points.extend(outer_pts);
            inputs = serde_json::to_value(zz).expect("params serialize");
        }
        other => {
            return Err(CliError::usage(format!(
                "family = {other:?}; expected rotational, yuen, swirl or zz"
            )))
        }
    }

    let all_passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        command: "verify",
        tool_version: TOOL_VERSION,
        family,
        inputs: json!({
            "family_parameters": inputs, "points": n, "seed": seed, "h": hs, "corrupt": corrupted,
            "t_range": [t_range.0, t_range.1], "r_range": [r_range.0, r_range.1],
        }),
        points,
        checks,
        all_passed,
    })
}

/// Period by quadrature and by simulation, with their relative difference.
pub fn period(s: &Settings) -> Result<Artifacts, CliError> {
    let p = emden_params(s)?;
    let tol = s.f64("tol", ep2d_core::ode::DEFAULT_QUAD_TOL)?;
    let cfg = integrator(s, default_period_config())?;
    let class = classify(&p);
    if class != OrbitClass::Periodic {
        return Err(Error::NotPeriodic(class).into());
    }
    let q = period_by_quadrature(&p, tol)?;
    let sim = period_by_simulation(&p, &cfg)?;
    let report = json!({
        "command": "period",
        "tool_version": TOOL_VERSION,
        "inputs": {
            "lambda": p.lambda, "xi": p.xi, "a0": p.a0, "a1": p.a1, "tol": tol,
            "rtol": cfg.rtol, "atol": cfg.atol, "h_max": cfg.h_max, "max_steps": cfg.max_steps,
        },
        "T_quadrature": q.period,
        "T_simulation": sim.period,
        "rel_diff": (q.period - sim.period).abs() / q.period,
        "quadrature_err_est": q.err_est,
        "simulation_gap_spread": sim.err_est,
        "T_linearized": linearized_period(&p)?,
    });
    Ok(Artifacts {
        name: "period",
        json: to_json(&report),
        csv: None,
        failure: None,
    })
}
