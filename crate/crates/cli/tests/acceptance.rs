//! Acceptance suite: one PASS/FAIL line per criterion, each timed against its
//! runtime budget. Runs without the libtest harness so the lines are always
//! shown; the process fails if any criterion does.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use ep2d_cli::commands::{verify_report, Expect, VerifyReport};
use ep2d_cli::config::Settings;
use ep2d_core::emden::{default_period_config, linearized_period};
use ep2d_core::residual::ORDER_WINDOW;
use ep2d_core::{
    alpha_const, default_profile_config, energy_level, integrate_scale, period_by_quadrature,
    period_by_simulation, solve_gw_profile, solve_profile, EmdenParams, Equation, GWParams,
    IntegratorConfig, LiouvilleParams, ZZSolution, ZzVariant,
};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Option<Duration>,
    body: fn() -> Outcome,
}

fn secs(s: f64) -> Option<Duration> {
    Some(Duration::from_secs_f64(s))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn reference() -> EmdenParams {
    EmdenParams::new(1.0, 1.0, 1.0, 1.0).unwrap()
}

/// Samples `(a, a')` on a uniform grid plus every solver node.
fn orbit_samples(
    p: &EmdenParams,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<(f64, f64)>, String> {
    let run = integrate_scale(p, t_end, cfg).map_err(|e| e.to_string())?;
    if let Some(t) = run.touchdown {
        return Err(format!("unexpected touchdown at t = {t}"));
    }
    let traj = &run.trajectory;
    let mut out: Vec<(f64, f64)> = (0..traj.len())
        .map(|i| (traj.state(i)[0], traj.state(i)[1]))
        .collect();
    for i in 0..=10_000 {
        out.push(
            run.scale_at(t_end * i as f64 / 10_000.0)
                .ok_or("dense output out of range")?,
        );
    }
    Ok(out)
}

fn steady() -> Outcome {
    let p = EmdenParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
    let cfg = IntegratorConfig::with_tolerances(1e-10, 1e-12);
    let dev = orbit_samples(&p, 100.0, &cfg)?
        .iter()
        .map(|&(a, _)| (a - 1.0).abs())
        .fold(0.0, f64::max);
    ensure(dev <= 1e-10, || format!("max |a - 1| = {dev:e}"))?;
    Ok(format!("max |a - 1| = {dev:.2e}"))
}

fn energy() -> Outcome {
    let p = reference();
    let theta = energy_level(&p).theta;
    let drift = orbit_samples(&p, 100.0, &IntegratorConfig::default())?
        .iter()
        .map(|&(a, adot)| (p.energy(a, adot) - theta).abs() / theta.abs())
        .fold(0.0, f64::max);
    ensure(drift <= 1e-8, || format!("relative drift {drift:e}"))?;
    Ok(format!("relative drift {drift:.2e}"))
}

fn period_agreement() -> Outcome {
    let mut cases = vec![reference()];
    for lambda in [0.5, 1.0, 2.0] {
        for xi in [0.5, 1.0, 2.0] {
            cases.push(EmdenParams::new(lambda, xi, 1.0, 1.0).unwrap());
        }
    }
    let mut worst = 0.0f64;
    for p in &cases {
        let q = period_by_quadrature(p, 1e-10)
            .map_err(|e| format!("{p:?}: {e}"))?
            .period;
        let s = period_by_simulation(p, &default_period_config())
            .map_err(|e| format!("{p:?}: {e}"))?
            .period;
        let rel = (q - s).abs() / q;
        ensure(rel <= 1e-6, || format!("{p:?}: T_quad {q}, T_sim {s}"))?;
        worst = worst.max(rel);
    }
    Ok(format!(
        "{} orbits, worst relative gap {worst:.2e}",
        cases.len()
    ))
}

fn near_steady() -> Outcome {
    let p = EmdenParams::new(1.0, 1.0, 1.0, 1e-4).unwrap();
    let oracle = 2.0 * PI / 2f64.sqrt();
    let q = period_by_quadrature(&p, 1e-10)
        .map_err(|e| e.to_string())?
        .period;
    let s = period_by_simulation(&p, &default_period_config())
        .map_err(|e| e.to_string())?
        .period;
    let lin = linearized_period(&p).map_err(|e| e.to_string())?;
    for (name, t) in [("quadrature", q), ("simulation", s), ("linearized", lin)] {
        let rel = (t / oracle - 1.0).abs();
        ensure(rel <= 1e-3, || format!("{name} period {t} vs {oracle}"))?;
    }
    Ok(format!("T = {q:.10}, 2 pi / sqrt 2 = {oracle:.10}"))
}

fn blowup() -> Outcome {
    let p = EmdenParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
    let run = integrate_scale(&p, 10.0, &IntegratorConfig::default()).map_err(|e| e.to_string())?;
    let t_c = run.touchdown.ok_or("no touchdown")?;
    // a = exp(-u^2/2) turns the energy integral into a half Gaussian
    let oracle = (PI / 2.0).sqrt();
    let rel = (t_c / oracle - 1.0).abs();
    ensure(rel <= 1e-6, || format!("touchdown {t_c} vs {oracle}"))?;
    Ok(format!("touchdown {t_c:.12}, relative error {rel:.1e}"))
}

fn liouville_identity() -> Outcome {
    let mut worst = 0.0f64;
    for lambda in [1.0, 2.0] {
        for k in [1.0, 2.0] {
            for alpha in [-0.5, 0.0, 0.5] {
                let p = LiouvilleParams::new(k, lambda, alpha).unwrap();
                let prof = solve_profile(&p, 20.0, &default_profile_config())
                    .map_err(|e| e.to_string())?;
                for &s in prof.grid() {
                    let r = prof.mass_identity_residual(s).map_err(|e| e.to_string())?;
                    ensure(r <= 1e-8, || format!("{p:?} at s = {s}: {r:e}"))?;
                    worst = worst.max(r);
                }
            }
        }
    }
    Ok(format!("12 profiles, worst residual {worst:.2e}"))
}

fn settings(pairs: &[(&'static str, &str)]) -> Settings {
    let flags = pairs.iter().map(|&(k, v)| (k, v.to_string())).collect();
    Settings::merge(Default::default(), flags, ep2d_cli::commands::VERIFY_KEYS).unwrap()
}

/// Every check must meet its expectation; expected convergence must also land
/// inside the order window.
fn judge(report: &VerifyReport) -> Outcome {
    let mut orders = Vec::new();
    for c in &report.checks {
        ensure(c.passed, || {
            format!(
                "{} {} expected {:?}, got {:?}",
                c.name,
                c.equation.name(),
                c.expect,
                c.status
            )
        })?;
        if c.expect == Expect::Converge {
            let o = c
                .estimated_order
                .ok_or_else(|| format!("{} {}: no order", c.name, c.equation.name()))?;
            ensure(o > ORDER_WINDOW.0 && o < ORDER_WINDOW.1, || {
                format!("{} order {o}", c.name)
            })?;
            orders.push(o);
        }
    }
    let lo = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = orders.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(format!(
        "{} checks, orders in [{lo:.4}, {hi:.4}]",
        report.checks.len()
    ))
}

fn expect_checks(
    report: &VerifyReport,
    name: &str,
    equations: &[Equation],
    expect: Expect,
) -> Result<(), String> {
    for eq in equations {
        ensure(
            report
                .checks
                .iter()
                .any(|c| c.name == name && c.equation == *eq && c.expect == expect),
            || format!("missing check {name} {}", eq.name()),
        )?;
    }
    Ok(())
}

const ALL: &[Equation] = &[
    Equation::Mass,
    Equation::MomentumX,
    Equation::MomentumY,
    Equation::Poisson,
];
const EULER: &[Equation] = &[Equation::Mass, Equation::MomentumX, Equation::MomentumY];

fn pde_rotational() -> Outcome {
    let r = verify_report(&settings(&[
        ("family", "rotational"),
        ("points", "20"),
        ("h", "1e-2,5e-3,2.5e-3"),
    ]))
    .map_err(|e| e.to_string())?;
    ensure(r.points.len() == 20, || {
        format!("{} points", r.points.len())
    })?;
    expect_checks(&r, "rotational", ALL, Expect::Converge)?;
    expect_checks(&r, "corrupted-control", ALL, Expect::Fail)?;
    judge(&r)
}

fn swirl() -> Outcome {
    let r = verify_report(&settings(&[("family", "swirl"), ("swirls", "5")]))
        .map_err(|e| e.to_string())?;
    for i in 0..5 {
        expect_checks(
            &r,
            &format!("swirl-{i}"),
            &[Equation::Mass],
            Expect::Converge,
        )?;
    }
    judge(&r)
}

fn spiral() -> Outcome {
    let zz = ZZSolution::new(1.0, 1.0).unwrap();
    let mut worst = 0.0f64;
    for t in [0.1, 0.5, 1.0, 3.0] {
        let big_r = zz.interface_radius(t);
        for k in 0..8 {
            let th = 2.0 * PI * k as f64 / 8.0;
            let f = zz
                .eval_inner(t, big_r * th.cos(), big_r * th.sin(), ZzVariant::Corrected)
                .map_err(|e| e.to_string())?;
            worst = worst.max((f.rho - zz.rho0).abs());
        }
    }
    ensure(worst <= 1e-12, || {
        format!("interface density gap {worst:e}")
    })?;
    let r = verify_report(&settings(&[("family", "zz")])).map_err(|e| e.to_string())?;
    expect_checks(&r, "zz-inner", EULER, Expect::Converge)?;
    expect_checks(&r, "zz-outer", EULER, Expect::Converge)?;
    expect_checks(&r, "zz-inner-as-printed", &[Equation::Mass], Expect::Fail)?;
    Ok(format!("interface gap {worst:.1e}; {}", judge(&r)?))
}

fn gw_profile() -> Outcome {
    let p = GWParams {
        n: 3,
        k: 1.0,
        lambda: 0.0,
        alpha_center: 1.0,
        a0: 1.0,
        a1: 0.0,
    };
    let prof = solve_gw_profile(&p, &default_profile_config()).map_err(|e| e.to_string())?;
    let s_mu = prof.s_mu.ok_or("no first zero")?;
    ensure(s_mu.is_finite() && s_mu > 0.0, || format!("s_mu = {s_mu}"))?;
    let grid = prof.grid();
    for &s in &grid[..grid.len() - 1] {
        let f = prof.eval(s).map_err(|e| e.to_string())?.0;
        ensure(f > 0.0, || format!("f({s}) = {f}"))?;
    }
    // least-squares slope of log rho against log(s_mu - s) near the edge
    let pts: Vec<(f64, f64)> = (0..=20)
        .map(|i| {
            let d = s_mu * 10f64.powf(-4.0 + 2.0 * i as f64 / 20.0);
            let rho = prof.density(1.0, s_mu - d).unwrap();
            (d.ln(), rho.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx).powi(2))
    });
    let slope = sxy / sxx;
    ensure((slope / 3.0 - 1.0).abs() <= 0.05, || {
        format!("vanishing exponent {slope}")
    })?;
    Ok(format!("s_mu = {s_mu:.9}, vanishing exponent {slope:.4}"))
}

fn alpha_table() -> Outcome {
    let table = [(1, 2.0), (2, 2.0 * PI), (3, 4.0 * PI), (4, 4.0 * PI * PI)];
    for (n, want) in table {
        let got = alpha_const(n).map_err(|e| e.to_string())?;
        ensure((got / want - 1.0).abs() <= 1e-12, || {
            format!("alpha({n}) = {got}, want {want}")
        })?;
    }
    // alpha(N) = N (N-2) |B^N|, with |B^N| = 2 pi |B^(N-2)| / N
    let mut ball = vec![1.0, 2.0];
    for n in 2..=10 {
        ball.push(ball[n - 2] * 2.0 * PI / n as f64);
    }
    for n in 3..=10u32 {
        let want = (n * (n - 2)) as f64 * ball[n as usize];
        let got = alpha_const(n).map_err(|e| e.to_string())?;
        ensure((got / want - 1.0).abs() <= 1e-12, || {
            format!("alpha({n}) = {got}, want {want}")
        })?;
    }
    Ok("table and recursion to N = 10 agree".into())
}

fn run_verify_binary(dir: &std::path::Path) -> Result<(Vec<u8>, Vec<u8>), String> {
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "family = rotational\npoints = 20\nseed = 11\n")
        .map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_ep2d"))
        .arg("verify")
        .arg("--config")
        .arg(&cfg)
        .arg("--out-dir")
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), || {
        format!("exit {:?}", out.status.code())
    })?;
    let file = std::fs::read(dir.join("verify.json")).map_err(|e| e.to_string())?;
    Ok((out.stdout, file))
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (out_a, file_a) = run_verify_binary(a.path())?;
    let (out_b, file_b) = run_verify_binary(b.path())?;
    ensure(file_a == file_b, || {
        "verify.json differs between runs".into()
    })?;
    ensure(out_a == out_b, || "stdout differs between runs".into())?;
    ensure(out_a == file_a, || "stdout differs from verify.json".into())?;
    Ok(format!("{} identical bytes", file_a.len()))
}

fn main() {
    // Accept and ignore libtest flags such as `--nocapture`.
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let criteria = [
        Criterion {
            id: 1,
            title: "steady solution stays at a = 1",
            budget: secs(1.0),
            body: steady,
        },
        Criterion {
            id: 2,
            title: "energy conservation",
            budget: secs(1.0),
            body: energy,
        },
        Criterion {
            id: 3,
            title: "period by quadrature vs simulation",
            budget: secs(10.0),
            body: period_agreement,
        },
        Criterion {
            id: 4,
            title: "near-steady frequency",
            budget: secs(1.0),
            body: near_steady,
        },
        Criterion {
            id: 5,
            title: "non-rotating collapse time",
            budget: secs(1.0),
            body: blowup,
        },
        Criterion {
            id: 6,
            title: "profile mass identity",
            budget: secs(5.0),
            body: liouville_identity,
        },
        Criterion {
            id: 7,
            title: "rotating family PDE residuals",
            budget: secs(30.0),
            body: pde_rotational,
        },
        Criterion {
            id: 8,
            title: "swirl ansatz mass conservation",
            budget: secs(10.0),
            body: swirl,
        },
        Criterion {
            id: 9,
            title: "spiral solutions",
            budget: secs(10.0),
            body: spiral,
        },
        Criterion {
            id: 10,
            title: "compactly supported profile",
            budget: secs(2.0),
            body: gw_profile,
        },
        Criterion {
            id: 11,
            title: "dimension constant",
            budget: None,
            body: alpha_table,
        },
        Criterion {
            id: 12,
            title: "verify output is byte-identical",
            budget: None,
            body: determinism,
        },
    ];
    let mut failed = 0;
    let mut ran = 0;
    for c in &criteria {
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|f| c.title.contains(f.as_str()) || *f == c.id.to_string())
        {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = (c.body)();
        let took = start.elapsed();
        let (ok, detail) = match (outcome, c.budget) {
            (Err(e), _) => (false, e),
            (Ok(d), Some(b)) if took > b => {
                (false, format!("{d}; over budget {:.1} s", b.as_secs_f64()))
            }
            (Ok(d), _) => (true, d),
        };
        if !ok {
            failed += 1;
        }
        let budget = c.budget.map_or("no limit".to_string(), |b| {
            format!("limit {:.0} s", b.as_secs_f64())
        });
        println!(
            "{} [{:>2}] {}: {} ({:.3} s, {budget})",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            detail,
            took.as_secs_f64(),
        );
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
