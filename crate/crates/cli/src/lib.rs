//! Command-line front end for the dipole library.

pub mod commands;
pub mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{Opts, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "dipole", version, about = "Dipole deformation: evaluation, energies and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a map on a meridian grid (CSV)
    Eval(#[command(flatten)] Opts),
    /// Energy of a map (JSON)
    Energy(#[command(flatten)] Opts),
    /// Run verification checks (JSON); exits nonzero when any check fails
    Verify {
        #[command(flatten)]
        opts: Opts,
        /// write per-check wall-clock timings here as JSON
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Energy ladders against the relaxed value of v (CSV)
    Gap {
        #[command(flatten)]
        opts: Opts,
        /// full ledger as JSON instead of the CSV table
        #[arg(long)]
        json: bool,
    },
    /// Region labels of the meridian section x2 = 0 (CSV)
    ExportAtlas(#[command(flatten)] Opts),
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Eval(o) => {
            let cfg = RunConfig::resolve(&o)?;
            commands::emit(&cfg, &commands::eval_csv(&cfg)?)?;
        }
        Command::Energy(o) => {
            let cfg = RunConfig::resolve(&o)?;
            commands::emit(&cfg, &commands::energy_json(&cfg)?)?;
        }
        Command::Verify { opts, meta } => {
            let cfg = RunConfig::resolve(&opts)?;
            let v = commands::verify(&cfg)?;
            commands::emit(&cfg, &v.json)?;
            if let Some(p) = meta {
                std::fs::write(&p, serde_json::to_string_pretty(&v.timings)? + "\n")?;
            }
            if !v.passed {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Gap { opts, json } => {
            let cfg = RunConfig::resolve(&opts)?;
            commands::emit(&cfg, &commands::gap_table(&cfg, json)?)?;
        }
        Command::ExportAtlas(o) => {
            let cfg = RunConfig::resolve(&o)?;
            commands::emit(&cfg, &commands::atlas_csv(&cfg)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
