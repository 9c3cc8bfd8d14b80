use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thetalift_cli::coeffs::CoeffFile;
use thetalift_cli::compute::{compute, ComputeRequest, Quantity};
use thetalift_cli::suite::{parse_override, run_suite, workers_from_env, Grid, Group, SuiteConfig};

/// Verification suite for the theta-lift identities.
#[derive(Parser)]
#[command(name = "thetalift", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    Exact,
    Theta,
    Analytic,
    Parseval,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Coarse,
    Fine,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantityArg {
    R,
    I0,
    Icusp,
    Quadmoment,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a check group and print the JSON report.
    Verify {
        #[arg(value_enum, default_value = "all")]
        group: GroupArg,
        /// Comma-separated odd primes replacing each check's own set.
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        /// Tolerance override `check=value`; repeatable.
        #[arg(long = "tol")]
        tol: Vec<String>,
        #[arg(long, value_enum, default_value = "coarse")]
        grid: GridArg,
        /// Coefficient file to ingest and check; repeatable.
        #[arg(long)]
        coeffs: Vec<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run only this check id; repeatable.
        #[arg(long = "check")]
        check: Vec<String>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write per-check wall times (JSON) here.
        #[arg(long)]
        timings: Option<PathBuf>,
    },
    /// Evaluate one quantity for a coefficient file or a synthetic series.
    Compute {
        #[arg(value_enum)]
        quantity: QuantityArg,
        #[arg(long, default_value_t = 5)]
        p: u64,
        /// Height cutoff T.
        #[arg(long, default_value_t = 1.0)]
        height: f64,
        /// Cusp index 1..=6 for `icusp`.
        #[arg(long, default_value_t = 1)]
        which: usize,
        /// Constant C for `quadmoment`.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        coeffs: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest |n| of the synthetic series.
        #[arg(long, default_value_t = 200)]
        support: i64,
    },
    /// Parse and validate a coefficient file, printing its canonical form.
    Ingest { path: PathBuf },
}

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn config_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_CONFIG)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match workers_from_env() {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                return config_error(e);
            }
        }
        Ok(None) => {}
        Err(e) => return config_error(e),
    }
    match cli.cmd {
        Cmd::Verify { group, primes, tol, grid, coeffs, seed, check, out, timings } => {
            let groups = match group {
                GroupArg::Exact => vec![Group::Exact],
                GroupArg::Theta => vec![Group::Theta],
                GroupArg::Analytic => vec![Group::Analytic],
                GroupArg::Parseval => vec![Group::Parseval],
                GroupArg::All => Group::ALL.to_vec(),
            };
            let mut tolerances = BTreeMap::new();
            for t in &tol {
                match parse_override(t) {
                    Ok((k, v)) => {
                        tolerances.insert(k, v);
                    }
                    Err(e) => return config_error(e),
                }
            }
            let grid = match grid {
                GridArg::Coarse => Grid::Coarse,
                GridArg::Fine => Grid::Fine,
            };
            let config = SuiteConfig { groups, primes, tolerances, grid, coeffs, seed, checks: check };
            let (report, times) = match run_suite(&config) {
                Ok(r) => r,
                Err(e) => return config_error(e),
            };
            for t in &times {
                eprintln!("{:<32} {:>9.3} s", t.id, t.seconds);
            }
            if let Some(path) = timings {
                let s = serde_json::to_string_pretty(&times).expect("timings serialize");
                if let Err(e) = std::fs::write(&path, s + "\n") {
                    return config_error(format!("{}: {e}", path.display()));
                }
            }
            let json = report.to_json();
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, &json) {
                        return config_error(format!("{}: {e}", path.display()));
                    }
                }
                None => print!("{json}"),
            }
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("FAILED {}", c.id);
            }
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Cmd::Compute { quantity, p, height, which, c, coeffs, seed, support } => {
            let quantity = match quantity {
                QuantityArg::R => Quantity::R,
                QuantityArg::I0 => Quantity::I0,
                QuantityArg::Icusp => Quantity::ICusp,
                QuantityArg::Quadmoment => Quantity::QuadMoment,
            };
            let req = ComputeRequest { quantity, p, height, which, c, coeffs, seed, support };
            match compute(&req) {
                Ok(v) => {
                    println!("{}", serde_json::to_string_pretty(&v).expect("values serialize"));
                    ExitCode::SUCCESS
                }
                Err(e) => config_error(e),
            }
        }
        Cmd::Ingest { path } => match CoeffFile::read(&path) {
            Ok(f) => {
                print!("{}", f.serialize());
                ExitCode::SUCCESS
            }
            Err(e) => config_error(e),
        },
    }
}
