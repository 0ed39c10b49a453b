use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use lindblad_rand::config::load_config;
use lindblad_rand::fit::fit_order;
use lindblad_rand::sweep::{run_sweep, with_worker_pool, Status};
use lindblad_rand::table1::{render_latex, render_text, table1_report, Table1Input};
use lindblad_rand::validate::{validate_all, validate_suite, ValidateOptions, DEFAULT_SEED};
use lindblad_rand::{simulate, InputError};
use lindblad_rand_core::formulas::{gate_count, BoundOptions, Implementation, MethodId};
use lindblad_rand_core::Error as CoreError;

#[derive(Parser)]
#[command(name = "lindblad-rand", version, about = "Randomised product formulas for Lindblad dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run each configured method once and print the final states.
    Simulate {
        config: PathBuf,
        /// Step count overriding the first grid point.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run the configured sweeps and write CSV and gnuplot files.
    Sweep { config: PathBuf },
    /// Run the property suite, or one suite of it.
    Validate {
        suite: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Also write the report as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Half-step coefficient of the second-order formula under test.
        #[arg(long, default_value_t = 0.5, hide = true)]
        s2_coefficient: f64,
    },
    /// Gate-complexity table with computed step and gate counts.
    Table1 {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        latex: bool,
        /// Use the larger constant for the second-order randomised bound.
        #[arg(long)]
        conservative_bounds: bool,
    },
    /// Gate count of one method and implementation.
    Gatecount {
        #[arg(long)]
        method: MethodId,
        #[arg(long = "impl")]
        implementation: Implementation,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
}

/// Exit status for a check that ran and failed.
const CHECK_FAILED: u8 = 1;
const BAD_INPUT: u8 = 2;

fn is_input_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.is::<InputError>()
            || matches!(
                c.downcast_ref::<CoreError>(),
                Some(
                    CoreError::InvalidArgument(_)
                        | CoreError::Parse(_)
                        | CoreError::InvalidGenerator(_)
                        | CoreError::Unsupported(_)
                        | CoreError::MixtureCap { .. }
                )
            )
    })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Simulate { config, n } => {
            for spec in load_config(&config)? {
                let runs = with_worker_pool(|| simulate::simulate(&spec, n))??;
                print!("{}", simulate::render(&spec, &runs));
            }
            Ok(0)
        }
        Command::Sweep { config } => {
            let mut code = 0;
            for spec in load_config(&config)? {
                let out = run_sweep(&spec).with_context(|| format!("experiment {}", spec.name))?;
                let bad: Vec<_> = out.records.iter().filter(|r| r.status != Status::Ok).collect();
                println!(
                    "{}: {} records, {} not ok, Lambda = {:.6}, Omega = {:.6}, Gamma = {:.6} -> {}",
                    spec.name,
                    out.records.len(),
                    bad.len(),
                    out.stats.lambda,
                    out.stats.omega,
                    out.stats.gamma_total,
                    out.csv.display()
                );
                for r in &bad {
                    println!("  {} N={}: {}", r.method, r.n, r.status);
                }
                if let Ok(slopes) = fit_order(&out.records) {
                    for (m, s) in slopes {
                        println!("  slope {m}: {s:.3} (order {})", m.order());
                    }
                }
                if !bad.is_empty() {
                    code = CHECK_FAILED;
                }
            }
            Ok(code)
        }
        Command::Validate { suite, seed, csv, s2_coefficient } => {
            let opts = ValidateOptions { seed, s2_coefficient };
            let report = with_worker_pool(|| match &suite {
                Some(s) => validate_suite(s, &opts).map_err(|e| InputError(e.to_string()).into()),
                None => validate_all(&opts),
            })??;
            print!("{}", report.render_text());
            if let Some(path) = csv {
                let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                report.write_csv(file)?;
            }
            Ok(if report.all_passed() { 0 } else { CHECK_FAILED })
        }
        Command::Table1 { m, t, lambda, gamma, omega, eps, latex, conservative_bounds } => {
            let input = Table1Input { m, t, lambda, gamma, omega, eps };
            let opts = BoundOptions { conservative: conservative_bounds, exp_factor: false };
            let rows = table1_report(&input, opts).map_err(|e| InputError(format!("{e:#}")))?;
            if latex {
                print!("{}", render_latex(&rows));
            } else {
                print!("{}", render_text(&input, &rows));
            }
            Ok(0)
        }
        Command::Gatecount { method, implementation, m, n } => {
            println!("{}", gate_count(method, m, n, implementation)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_input_error(&e) { BAD_INPUT } else { CHECK_FAILED })
        }
    }
}
