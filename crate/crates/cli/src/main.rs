//! `volperc` command-line driver.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation or oracle failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use volperc::job::{self, Command, JobConfig};
use volperc::{Error, Mode};

#[derive(Parser, Debug)]
#[command(name = "volperc", version, about = "Constrained volume-difference site percolation")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run ensembles and write one Q-curve and one statistics file per (L, r).
    Sweep(Common),
    /// Canonical curves, plot data and scaling fits from Q-curve files.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Q-curve files or directories containing them.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Final-state statistics (density, largest cluster, distinct volumes).
    Stats(Common),
    /// Check the engine against the brute-force references.
    OracleCheck {
        #[command(flatten)]
        common: Common,
        /// Q-curve files of L <= 3 to compare against exact values.
        #[arg(long = "qcurve")]
        qcurves: Vec<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Lattice side (repeatable).
    #[arg(long = "L", value_name = "L")]
    sides: Vec<usize>,
    /// Constraint value (repeatable).
    #[arg(long = "r", value_name = "R")]
    rs: Vec<u32>,
    #[arg(long, default_value = "standard", value_parser = parse_mode)]
    mode: Mode,
    /// Runs per (L, r); for oracle-check, seeds per (L, r).
    #[arg(long)]
    runs: Option<u64>,
    /// First run index of this invocation.
    #[arg(long, default_value_t = 0)]
    run_start: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Points of the uniform t grid.
    #[arg(long = "t-grid", default_value_t = volperc::ensemble::DEFAULT_GRID)]
    t_grid: usize,
    /// Exponent used in the critical-time fit.
    #[arg(long = "nu-fixed", default_value_t = 4.0 / 3.0)]
    nu_fixed: f64,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Common {
    fn config(&self, command: Command, default_runs: u64) -> JobConfig {
        JobConfig {
            command,
            sides: self.sides.clone(),
            rs: self.rs.clone(),
            mode: self.mode,
            runs: self.runs.unwrap_or(default_runs),
            run_start: self.run_start,
            seed: self.seed,
            workers: self.workers,
            out: self.out.clone(),
            t_grid: self.t_grid,
            nu_fixed: self.nu_fixed,
        }
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Cmd::Sweep(c) => match job::cmd_sweep(&c.config(Command::Sweep, 1000)) {
            Ok(outs) => {
                for o in outs {
                    println!("L={} r={} -> {} {}", o.side, o.r, o.qcurve.display(), o.stats.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Cmd::Stats(c) => match job::cmd_stats(&c.config(Command::Stats, 1000)) {
            Ok(rows) => {
                print!("{}", job::stats_table(&rows));
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Cmd::Analyze { common, inputs } => match job::cmd_analyze(&common.config(Command::Analyze, 1), &inputs) {
            Ok(reports) => {
                for rep in reports {
                    match (&rep.tc, &rep.nu) {
                        (Some(tc), Some(nu)) => println!(
                            "r={} mode={}: t_c = {:.6} +- {:.6}, nu = {:.4} +- {:.4}",
                            rep.r, rep.mode, tc.estimate, tc.uncertainty, nu.estimate, nu.uncertainty
                        ),
                        _ if rep.percolates => println!(
                            "r={} mode={}: t_c undetermined ({})",
                            rep.r,
                            rep.mode,
                            rep.fit_skipped.as_deref().unwrap_or("fit failed")
                        ),
                        _ => println!("r={} mode={}: no wrapping observed, t_c = inf", rep.r, rep.mode),
                    }
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Cmd::OracleCheck { common, qcurves } => {
            match job::cmd_oracle_check(&common.config(Command::OracleCheck, 100), &qcurves) {
                Ok(report) => {
                    print!("{}", report.render());
                    if report.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(2)
                    }
                }
                Err(e) => fail(&e),
            }
        }
    }
}
