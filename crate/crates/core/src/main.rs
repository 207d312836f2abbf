use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use friedlab::heat_mellin::{mellin_estimate, HeatTraceModel, MellinConfig};
use friedlab::report::{fried_suite, run_check, run_sweep, CheckKind, DEFAULT_SEED};
use friedlab::torsion::circle_factor_torsion;
use friedlab::{parse_scenario, Error};

#[derive(Parser)]
#[command(name = "friedlab", version, about = "Ruelle zeta functions and analytic torsion of suspension flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Fried,
    AtiyahBott,
    Cutoff,
    Abel,
    Mellin,
}

impl From<Kind> for CheckKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Fried => CheckKind::Fried,
            Kind::AtiyahBott => CheckKind::AtiyahBott,
            Kind::Cutoff => CheckKind::Cutoff,
            Kind::Abel => CheckKind::Abel,
            Kind::Mellin => CheckKind::Mellin,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one check against a scenario file (exit 0 pass, 1 fail, 2 input error)
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Override the file's tolerance for this check
        #[arg(long)]
        tol: Option<f64>,
        /// Override the file's truncation depth
        #[arg(long = "N", value_name = "K")]
        n: Option<u32>,
    },
    /// Evaluate every point of the file's sigma grid and write a CSV
    Sweep {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Independent numerical oracles
    Oracle {
        #[command(subcommand)]
        oracle: Oracle,
    },
    /// Fried identity on seeded random acyclic spectra
    Suite {
        #[arg(long, env = "FRIEDLAB_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum Oracle {
    /// Torsion of the line at n from its heat trace, against the closed form
    Mellin {
        #[arg(long)]
        n: i64,
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
    },
}

fn input_error(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { file, kind, tol, n } => {
            let parsed = match parse_scenario(&file) {
                Ok(f) => f,
                Err(e) => return input_error(e),
            };
            match run_check(&parsed, kind.into(), tol, n) {
                Ok(report) => {
                    println!("{} check on {} (tolerance {:e})", report.kind.name(), parsed.name, report.tolerance);
                    for line in &report.lines {
                        println!("  {line}");
                    }
                    println!("{}", if report.passed { "PASS" } else { "FAIL" });
                    if report.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => input_error(e),
            }
        }
        Command::Sweep { file, out } => {
            let parsed = match parse_scenario(&file) {
                Ok(f) => f,
                Err(e) => return input_error(e),
            };
            match run_sweep(&parsed, &out) {
                Ok(rows) => {
                    println!("wrote {rows} rows to {}", out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => input_error(e),
            }
        }
        Command::Oracle {
            oracle: Oracle::Mellin { n, sigma, step, t_max },
        } => {
            let defaults = MellinConfig::default();
            let config = MellinConfig {
                step: step.unwrap_or(defaults.step),
                t_max: t_max.unwrap_or(defaults.t_max),
                ..defaults
            };
            let outcome = HeatTraceModel::line(n).and_then(|model| {
                let estimate = mellin_estimate(&model, sigma, &config)?;
                let closed = circle_factor_torsion(n, Complex64::new(sigma, 0.0))?.re;
                Ok((estimate, closed))
            });
            match outcome {
                Ok((estimate, closed)) => {
                    println!("mellin        {:.12}", estimate.torsion);
                    println!("closed form   {closed:.12}");
                    println!("difference    {:.3e}", (estimate.torsion - closed).abs());
                    println!("quadrature    {:.3e}", estimate.quadrature_error);
                    ExitCode::SUCCESS
                }
                Err(e) => input_error(e),
            }
        }
        Command::Suite { seed, count, tol } => {
            let report = fried_suite(seed, count, tol);
            println!(
                "seed {}: {} spectra, {} evaluations, worst relative residual {:.3e}",
                report.seed, report.spectra, report.evaluations, report.worst_relative
            );
            for f in &report.failures {
                println!("  {f}");
            }
            if report.failures.is_empty() {
                println!("PASS");
                ExitCode::SUCCESS
            } else {
                println!("FAIL");
                ExitCode::from(1)
            }
        }
    }
}
