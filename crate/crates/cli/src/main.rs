//! Scenario runner CLI: reproduce the four reference panels as CSV + SVG,
//! compare runs, check gradients, and audit the dual-based SCC against
//! the re-optimization oracle.
//!
//! Exit codes: 0 ok, 2 usage/config error, 3 optimizer did not converge.

use clap::{Parser, Subcommand};
use dicekit::diffkernel::fd_check;
use dicekit::dynamics::Controls;
use dicekit::error::RunError;
use dicekit::marginals::{oracle_compensation, OracleOptions};
use dicekit::params::{load_params, validate};
use dicekit::scenario::{compare, load_scenario, run_scenario};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dicekit", version, about = "climate-economy scenario runner")]
struct Cli {
    /// Root directory for run artifacts.
    #[arg(long, default_value = "out", global = true)]
    output_dir: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Optimize a scenario and write trajectory/marginals CSVs, the SVG
    /// panel, and the convergence log.
    Run { scenario: PathBuf },
    /// Tabulate scc, smac, and their ratio across run directories.
    Compare {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
    },
    /// Verify the adjoint gradients against central finite differences.
    Gradcheck {
        params: PathBuf,
        #[arg(long, default_value_t = 1e-5)]
        eps: f64,
    },
    /// Re-optimization compensation audit of the dual-based SCC.
    Oracle {
        scenario: PathBuf,
        /// Comma-separated 1-based periods.
        #[arg(long, value_delimiter = ',', required = true)]
        periods: Vec<usize>,
        /// Emission bump in native units.
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode, RunError> {
    match &cli.cmd {
        Cmd::Run { scenario } => {
            let cfg = load_scenario(scenario)?;
            let artifacts = run_scenario(&cfg, &cli.output_dir)?;
            let s = &artifacts.summary;
            println!("scenario {}: W* = {:.12e}", cfg.name, s.w_star);
            if s.converged {
                println!(
                    "max scc/smac = {:.6} at year {}",
                    s.max_ratio, s.year_of_max
                );
                println!("artifacts in {}", artifacts.trajectory_csv.parent().unwrap().display());
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("optimizer did not converge; artifacts flagged");
                Ok(ExitCode::from(EXIT_NOT_CONVERGED))
            }
        }
        Cmd::Compare { dirs } => {
            let report = compare(dirs)?;
            print!("{report}");
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Gradcheck { params, eps } => {
            let p = load_params(params)?;
            let rep = validate(&p);
            if !rep.is_valid() {
                for (field, msg) in &rep.errors {
                    eprintln!("invalid params: {field}: {msg}");
                }
                return Ok(ExitCode::from(EXIT_CONFIG));
            }
            // fixed interior point, deterministic
            let n = p.t_max;
            let u = Controls::new(
                (0..n).map(|t| 0.2 + 0.1 * (t as f64) / (n as f64)).collect(),
                (0..n)
                    .map(|t| (0.05 + 0.6 * (t as f64) / (n as f64)).min(0.9 * p.pi35[t]))
                    .collect(),
            );
            let report = fd_check(&p, &u, *eps).map_err(|e| RunError::Config(e.to_string()))?;
            print!("{}", report.render());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Oracle {
            scenario,
            periods,
            delta,
        } => {
            let cfg = load_scenario(scenario)?;
            let p = cfg.resolve_params()?;
            let sc = cfg.constraints();
            println!(
                "{:<8} {:>12} {:>14} {:>14} {:>12}",
                "period", "delta_e", "scc_dual", "scc_oracle", "rel_gap"
            );
            for &t in periods {
                let r = oracle_compensation(&p, &sc, t, *delta, &OracleOptions::default())?;
                println!(
                    "{:<8} {:>12.4e} {:>14.6} {:>14.6} {:>12.4e}",
                    r.period, r.delta_e, r.scc_predicted, r.scc_oracle, r.relative_gap
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
