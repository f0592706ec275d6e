//! Command-line front end: analysis, identity checks, reconstruction and
//! the built-in catalog.

pub mod commands;
pub mod summary;

use clap::{Parser, Subcommand};
use commands::*;
use frontal_core::io::{parse_floats, parse_grid};
use frontal_core::GridSpec;
use std::path::PathBuf;
use summary::RunSummary;

#[derive(Debug, Parser)]
#[command(name = "frontals", version, about = "Frontal surfaces from moving-base data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

fn grid_arg(s: &str) -> Result<GridSpec, String> {
    parse_grid(s)
}

fn pair_arg(s: &str) -> Result<[f64; 2], String> {
    parse_floats::<2>(s)
}

fn triple_arg(s: &str) -> Result<[f64; 3], String> {
    parse_floats::<3>(s)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify every grid node; write fields.csv, surface.obj and summary.json.
    Analyze {
        /// Spec file, or catalog:NAME.
        spec: String,
        /// u0:u1:nu,v0:v1:nv
        #[arg(long, value_parser = grid_arg, allow_hyphen_values = true)]
        grid: Option<GridSpec>,
        /// Classification tolerance on the normalized curvatures.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Evaluate compatibility identities and ideal membership.
    Check {
        spec: String,
        #[arg(long, value_parser = grid_arg, allow_hyphen_values = true)]
        grid: Option<GridSpec>,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Residual tolerance for every selected suite.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derive data from a spec, reconstruct it and align with the original.
    Roundtrip {
        spec: String,
        #[arg(long, value_parser = grid_arg, allow_hyphen_values = true)]
        grid: Option<GridSpec>,
        /// Grid spacing, used when --grid is absent.
        #[arg(long, default_value_t = DEFAULT_ROUNDTRIP_H)]
        h: f64,
        /// Largest accepted rms after alignment.
        #[arg(long, default_value_t = DEFAULT_ROUNDTRIP_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Realize a data directory as a surface.
    Reconstruct {
        data_dir: PathBuf,
        /// u,v of the node where frame and position are seeded.
        #[arg(long, value_parser = pair_arg, allow_hyphen_values = true)]
        origin: Option<[f64; 2]>,
        /// x,y,z at the origin.
        #[arg(long, value_parser = triple_arg, allow_hyphen_values = true)]
        seed: Option<[f64; 3]>,
        /// Largest accepted Frobenius residual.
        #[arg(long, default_value_t = DEFAULT_FROBENIUS_TOL)]
        tol: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Write the reconstruction data of a spec as a data directory.
    Export {
        spec: String,
        #[arg(long, value_parser = grid_arg, allow_hyphen_values = true)]
        grid: Option<GridSpec>,
        #[arg(long, default_value_t = DEFAULT_ROUNDTRIP_H)]
        h: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// List the built-in surfaces as spec documents.
    Catalog {
        /// Print only this entry.
        #[arg(long)]
        name: Option<String>,
    },
}

/// What a run prints and how it exits.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: Option<String>,
    pub code: i32,
}

pub fn run(cli: Cli) -> Outcome {
    let summary = |s: RunSummary| Outcome {
        stdout: s.to_json(),
        stderr: s.error.as_ref().map(|e| format!("error ({}): {}", e.stage, e.message)),
        code: s.exit_status,
    };
    let text = |t: String| Outcome { stdout: t, stderr: None, code: summary::EXIT_OK };
    match cli.command {
        Command::Analyze { spec, grid, tol, out } => summary(analyze(&spec, grid, tol, &out)),
        Command::Check { spec, grid, suite, tol, out } => summary(check(&spec, grid, suite, tol, out.as_deref())),
        Command::Roundtrip { spec, grid, h, tol, out } => summary(roundtrip_cmd(&spec, grid, h, tol, out.as_deref())),
        Command::Reconstruct { data_dir, origin, seed, tol, out } => {
            summary(reconstruct_cmd(&data_dir, origin, seed, tol, &out))
        }
        Command::Export { spec, grid, h, out } => summary(export(&spec, grid, h, &out)),
        Command::Catalog { name: None } => text(catalog_listing()),
        Command::Catalog { name: Some(n) } => match catalog_entry(&n) {
            Some(t) => text(t),
            None => Outcome {
                stdout: String::new(),
                stderr: Some(format!("no catalog entry '{n}'")),
                code: summary::EXIT_INPUT,
            },
        },
    }
}
