//! Driver behind the `ep2d` binary. Every command reads `key = value`
//! settings from an optional `--config` file and from flags of the same name
//! (underscores become dashes), writes `<command>.json` and, where there is
//! tabular output, `<command>.csv`, and prints the JSON report on stdout.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::commands::Artifacts;
use crate::config::{read_config, Settings};
pub use crate::error::{CliError, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, EXIT_VERIFY};
use crate::output::{resolve_out_dir, write_artifact};

type Runner = fn(&Settings) -> Result<Artifacts, CliError>;

struct CommandDef {
    name: &'static str,
    about: &'static str,
    keys: &'static [&'static str],
    run: Runner,
}

const COMMANDS: &[CommandDef] = &[
    CommandDef {
        name: "emden",
        about: "Integrate the scale-factor equation and sample the orbit (t, a, adot, energy)",
        keys: commands::EMDEN_KEYS,
        run: commands::emden,
    },
    CommandDef {
        name: "liouville",
        about: "Solve the radial profile and sample (s, f, fdot, enclosed_mass, bracket)",
        keys: commands::LIOUVILLE_KEYS,
        run: commands::liouville,
    },
    CommandDef {
        name: "fields",
        about: "Sample density, velocity and radial gravity of one solution family on a disk",
        keys: commands::FIELDS_KEYS,
        run: commands::fields,
    },
    CommandDef {
        name: "verify",
        about: "Run residual convergence studies; exits 3 unless every check meets its expectation",
        keys: commands::VERIFY_KEYS,
        run: commands::verify,
    },
    CommandDef {
        name: "period",
        about: "Orbit period by quadrature and by simulation",
        keys: commands::PERIOD_KEYS,
        run: commands::period,
    },
];

fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

fn key_help(key: &str) -> &'static str {
    match key {
        "lambda" => "mass-like parameter lambda",
        "xi" => "rotation parameter xi",
        "a0" | "a1" => "initial scale factor and its rate",
        "K" => "pressure constant",
        "alpha" => "profile value at the centre",
        "alpha_center" => "profile value at the centre (N >= 3 family)",
        "N" => "dimension of the N >= 3 family",
        "rho0" => "outer density of the spiral family",
        "family" => "solution family",
        "variant" => "spiral inner velocity: corrected or as-printed",
        "h" => "comma-separated decreasing step sizes",
        "corrupt" => "perturb the field under test (self-test, should fail)",
        "rtol" | "atol" | "h_max" | "max_steps" | "tol" => "numerical tolerance or limit",
        _ => "see README",
    }
}

fn cli() -> Command {
    let mut cmd = Command::new("ep2d")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Rotating solutions of the 2D isothermal Euler-Poisson equations")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for def in COMMANDS {
        let mut sub = Command::new(def.name)
            .about(def.about)
            .arg(
                Arg::new("config")
                    .long("config")
                    .value_name("FILE")
                    .value_parser(clap::value_parser!(PathBuf))
                    .help("key = value settings file; flags override it"),
            )
            .arg(
                Arg::new("out_dir")
                    .long("out-dir")
                    .value_name("DIR")
                    .value_parser(clap::value_parser!(PathBuf))
                    .help("output directory (default $EP2D_OUT_DIR, then .)"),
            );
        for &key in def.keys {
            let mut arg = Arg::new(key)
                .long(flag_name(key))
                .value_name("VALUE")
                .action(ArgAction::Set)
                .allow_negative_numbers(true)
                .help(key_help(key));
            if key == "corrupt" {
                arg = arg.num_args(0..=1).default_missing_value("true");
            }
            sub = sub.arg(arg);
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

fn settings(def: &CommandDef, m: &ArgMatches) -> Result<Settings, CliError> {
    let file = match m.get_one::<PathBuf>("config") {
        Some(p) => read_config(p)?,
        None => Default::default(),
    };
    let flags = def
        .keys
        .iter()
        .filter_map(|&k| m.get_one::<String>(k).map(|v| (k, v.clone())))
        .collect();
    Settings::merge(file, flags, def.keys)
}

fn execute(def: &CommandDef, m: &ArgMatches) -> Result<(), CliError> {
    let s = settings(def, m)?;
    let started = Instant::now();
    let art = (def.run)(&s)?;
    let dir = resolve_out_dir(m.get_one::<PathBuf>("out_dir").map(PathBuf::as_path));
    write_artifact(&dir, &format!("{}.json", art.name), &art.json)?;
    if let Some(csv) = &art.csv {
        write_artifact(&dir, &format!("{}.csv", art.name), csv)?;
    }
    print!("{}", art.json);
    // kept out of the report so that reports stay byte-identical
    eprintln!(
        "{}: wall time {:.3} s",
        art.name,
        started.elapsed().as_secs_f64()
    );
    match art.failure {
        Some(msg) => Err(CliError::Verification(msg)),
        None => Ok(()),
    }
}

/// Parse `args` (including the program name), run the command and return
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let def = COMMANDS
        .iter()
        .find(|s| s.name == name)
        .expect("registered subcommand");
    match execute(def, sub) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_definition_is_consistent() {
        cli().debug_assert();
    }

    #[test]
    fn flags_map_to_keys() {
        let m = cli()
            .try_get_matches_from(["ep2d", "emden", "--t-end", "5", "--a1", "-0.5"])
            .unwrap();
        let (_, sub) = m.subcommand().unwrap();
        let s = settings(&COMMANDS[0], sub).unwrap();
        assert_eq!(s.f64("t_end", 0.0).unwrap(), 5.0);
        assert_eq!(s.f64("a1", 0.0).unwrap(), -0.5);
    }

    #[test]
    fn bare_corrupt_flag_means_true() {
        let m = cli()
            .try_get_matches_from(["ep2d", "verify", "--corrupt"])
            .unwrap();
        let (_, sub) = m.subcommand().unwrap();
        let s = settings(&COMMANDS[3], sub).unwrap();
        assert!(s.bool("corrupt", false).unwrap());
    }
}
