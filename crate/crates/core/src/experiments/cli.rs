//! Argument parsing and dispatch for the `bosonic-ep` binary.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::entanglement::PartitionLabel;

use super::commands::{cmd_entangle, cmd_es_scan, cmd_spectrum, es_scan_default_plan};
use super::figures::{cmd_fig2, cmd_fig3, cmd_fig4, fig2_default_plan, fig3_default_plan, fig4_default_plan};
use super::plan::{Format, SweepPlan};
use super::selftest::{run_selftest, SelftestOptions};
use super::{CliError, Report, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "bosonic-ep", version, about = "Exceptional points and entanglement in bosonic chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Sweep plan (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output data file; figures put companion files beside it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Tolerance override (region classification, checks, surface residual).
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Worker threads; defaults to available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Bipartition such as "13|2".
    #[arg(long, global = true)]
    pub partition: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues, region labels and EPs over a sweep.
    Spectrum,
    /// Witness trajectories from the vacuum.
    Entangle {
        /// Also export the covariance matrix (upper triangle).
        #[arg(long)]
        covariance: bool,
    },
    /// Two-mode region map and line cuts.
    Fig2,
    /// Phase dependence and enhancement ratio of uniform chains.
    Fig3,
    /// Three-mode witness map and exceptional-surface line cut.
    Fig4,
    /// Exceptional-surface scan of the three-mode chain.
    EsScan,
    /// Invariant suite.
    Selftest {
        /// Perturb the symplectic form to show that the suite can fail.
        #[cfg(feature = "fault-injection")]
        #[arg(long)]
        inject_fault: bool,
    },
}

fn load_plan(path: Option<&PathBuf>, default: Option<fn() -> SweepPlan>, cmd: &str) -> Result<SweepPlan, CliError> {
    match (path, default) {
        (Some(p), _) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::config(format!("{}: {e}", p.display())))?;
            SweepPlan::from_json(&text)
        }
        (None, Some(d)) => Ok(d()),
        (None, None) => Err(CliError::config(format!("{cmd} needs --config"))),
    }
}

fn validate_flags(cli: &Cli) -> Result<(), CliError> {
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::config("--tol must be positive and finite"));
        }
    }
    if cli.threads == Some(0) {
        return Err(CliError::config("--threads must be at least 1"));
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    validate_flags(cli)?;
    let partition = cli
        .partition
        .as_deref()
        .map(|s| s.parse::<PartitionLabel>())
        .transpose()
        .map_err(|e| CliError::config(e.to_string()))?;
    let mut opts = RunOptions {
        out: cli.out.clone(),
        format: cli.format,
        tol: cli.tol,
        partition,
        covariance: false,
    };
    let cfg = cli.config.as_ref();
    match &cli.command {
        Command::Spectrum => cmd_spectrum(&load_plan(cfg, None, "spectrum")?, &opts),
        Command::Entangle { covariance } => {
            opts.covariance = *covariance;
            cmd_entangle(&load_plan(cfg, None, "entangle")?, &opts)
        }
        Command::Fig2 => cmd_fig2(&load_plan(cfg, Some(fig2_default_plan), "fig2")?, &opts),
        Command::Fig3 => cmd_fig3(&load_plan(cfg, Some(fig3_default_plan), "fig3")?, &opts),
        Command::Fig4 => cmd_fig4(&load_plan(cfg, Some(fig4_default_plan), "fig4")?, &opts),
        Command::EsScan => cmd_es_scan(&load_plan(cfg, Some(es_scan_default_plan), "es-scan")?, &opts),
        #[cfg_attr(not(feature = "fault-injection"), allow(unused_variables))]
        Command::Selftest { .. } => {
            #[allow(unused_mut)]
            let mut st = SelftestOptions {
                tol: cli.tol,
                ..Default::default()
            };
            #[cfg(feature = "fault-injection")]
            if let Command::Selftest { inject_fault } = &cli.command {
                st.perturb_omega = *inject_fault;
            }
            let checks = run_selftest(&st);
            for c in &checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                match c.tol {
                    Some(t) => println!("{status} {:<34} {:.3e} (tol {:.1e})", c.name, c.value, t),
                    None => println!("{status} {}", c.name),
                }
            }
            Ok(Report {
                checks,
                ..Default::default()
            })
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads.filter(|&n| n > 0) {
        builder = builder.num_threads(n);
    }
    let result = match builder.build() {
        Ok(pool) => pool.install(|| dispatch(&cli)),
        Err(e) => Err(CliError::config(format!("thread pool: {e}"))),
    };
    match result {
        Ok(report) => {
            for f in &report.files {
                eprintln!("wrote {}", f.display());
            }
            for n in &report.notes {
                eprintln!("{n}");
            }
            let failed = report.failed();
            if failed.is_empty() {
                0
            } else {
                let e = CliError::CheckFailed(failed);
                eprintln!("{e}");
                e.exit_code()
            }
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
