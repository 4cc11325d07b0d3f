//! Batch verification front-end.
//!
//! ```text
//! rsk verify <all|geometry|maps|retraction|charclass> [--samples N] [--seed S]
//!            [--m M] [--delta D] [--grid G] [--k-max K] [--out PATH] [--format json|md]
//! rsk invariant [--m M] [--k-max K] [--dump-curves DIR] [common options]
//! ```
//!
//! The seed falls back to the RSK_SEED environment variable, then to the
//! built-in default. Exit codes: 0 all checks pass, 1 some check failed,
//! 2 invalid configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rsk_core::maps::MapSpec;
use rsk_core::report::{Report, RunConfig};
use rsk_core::suites::{invariant_report, run_suite, Suite};
use rsk_core::winding::{push_curve, TorusCurve};
use rsk_core::Error;

#[derive(Parser)]
#[command(
    name = "rsk",
    version,
    about = "Verification suites for the equivariant geometry of S^2 x S^2"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named check suite and emit a report.
    Verify {
        /// Suite: all, geometry, maps, retraction, or charclass.
        suite: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Push torus curves through twist iterates and report their classes.
    Invariant {
        #[command(flatten)]
        common: CommonOpts,
        /// Directory for CSV exports of the pushed curves.
        #[arg(long, value_name = "DIR")]
        dump_curves: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CommonOpts {
    /// Random samples per check.
    #[arg(long)]
    samples: Option<u64>,
    /// RNG seed; falls back to RSK_SEED, then the default.
    #[arg(long)]
    seed: Option<u64>,
    /// Twisting number (must be even).
    #[arg(long)]
    m: Option<i64>,
    /// Band half-width of the twist.
    #[arg(long)]
    delta: Option<f64>,
    /// Starting quadrature grid for mapping degrees.
    #[arg(long)]
    grid: Option<usize>,
    /// Largest iterate checked.
    #[arg(long = "k-max")]
    k_max: Option<u32>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Md,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = Cli::parse();
    let (report, common) = match &cli.command {
        Command::Verify { suite, common } => {
            let cfg = match build_config(common) {
                Ok(cfg) => cfg,
                Err(err) => return config_error(&err),
            };
            let suite = match Suite::parse(suite) {
                Ok(s) => s,
                Err(err) => return config_error(&err),
            };
            match run_suite(suite, &cfg) {
                Ok(report) => (report, common),
                Err(err) => return dispatch_error(&err),
            }
        }
        Command::Invariant {
            common,
            dump_curves,
        } => {
            let cfg = match build_config(common) {
                Ok(cfg) => cfg,
                Err(err) => return config_error(&err),
            };
            let report = match invariant_report(&cfg) {
                Ok(report) => report,
                Err(err) => return dispatch_error(&err),
            };
            if let Some(dir) = dump_curves {
                if let Err(err) = dump_curve_csvs(&cfg, dir) {
                    eprintln!("rsk: curve export failed: {err}");
                    return 1;
                }
            }
            (report, common)
        }
    };
    match emit(&report, common) {
        Ok(()) => {
            if report.pass {
                0
            } else {
                1
            }
        }
        Err(err) => {
            eprintln!("rsk: cannot write report: {err}");
            1
        }
    }
}

fn build_config(common: &CommonOpts) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::default();
    cfg.seed = match common.seed {
        Some(seed) => seed,
        None => match std::env::var("RSK_SEED") {
            Ok(text) => text.parse().map_err(|_| {
                Error::InvalidConfig(format!("RSK_SEED must be an integer, got '{text}'"))
            })?,
            Err(_) => cfg.seed,
        },
    };
    if let Some(samples) = common.samples {
        cfg.samples = samples;
    }
    if let Some(m) = common.m {
        cfg.m = m;
    }
    if let Some(delta) = common.delta {
        cfg.delta = delta;
    }
    if let Some(grid) = common.grid {
        cfg.grid = grid;
    }
    if let Some(k_max) = common.k_max {
        cfg.k_max = k_max;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn config_error(err: &Error) -> i32 {
    eprintln!("rsk: {err}");
    2
}

fn dispatch_error(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_) | Error::Parse(_) | Error::ConstructionUnavailable { .. } => {
            config_error(err)
        }
        other => {
            eprintln!("rsk: check aborted: {other}");
            1
        }
    }
}

fn emit(report: &Report, common: &CommonOpts) -> std::io::Result<()> {
    let text = match common.format {
        Format::Json => report.to_json(),
        Format::Md => report.to_markdown(),
    };
    match &common.out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dump_curve_csvs(cfg: &RunConfig, dir: &PathBuf) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let twist = MapSpec::twist(cfg.m, cfg.delta).map_err(|e| e.to_string())?;
    for k in 0..=cfg.k_max {
        let fk = MapSpec::power(twist.clone(), k);
        let pushed = push_curve(&fk, &TorusCurve::gamma_a(0.0, 256)).map_err(|e| e.to_string())?;
        let file = std::fs::File::create(dir.join(format!("gamma_a_k{k}.csv")))
            .map_err(|e| e.to_string())?;
        pushed
            .write_csv(std::io::BufWriter::new(file))
            .map_err(|e| e.to_string())?;
    }
    let b = push_curve(&twist, &TorusCurve::gamma_b(0.0, 256)).map_err(|e| e.to_string())?;
    let file = std::fs::File::create(dir.join("gamma_b.csv")).map_err(|e| e.to_string())?;
    b.write_csv(std::io::BufWriter::new(file))
        .map_err(|e| e.to_string())?;
    Ok(())
}
