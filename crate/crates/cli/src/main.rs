//! `zdtl`: experiment runner for lattice-action cross-section tilings.
//!
//! Every command reads an optional flat key=value config file plus flag
//! overrides (flags win), runs its checks, and prints one report —
//! JSON with sorted keys and 17-significant-digit floats, or SVG for
//! the planar tiling render. Reports are written even when checks
//! fail. Exit codes: 0 all checks passed, 1 a check failed (report
//! still emitted), 2 invalid configuration.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::Output;
use zdtl_core::report::to_json17;

#[derive(Parser)]
#[command(name = "zdtl", version, about = "Lattice-action tiling laboratory")]
pub struct Cli {
    /// Flat key=value config file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Lattice dimension (1 or 2).
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Torus dimension (defaults to d).
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Increment matrix entries, comma-separated, row-major d*m.
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    /// Marker bump center, comma-separated m coordinates.
    #[arg(long, global = true)]
    pub center: Option<String>,
    #[arg(long = "r-inner", global = true)]
    pub r_inner: Option<f64>,
    #[arg(long = "r-outer", global = true)]
    pub r_outer: Option<f64>,
    /// Cross-section depth override.
    #[arg(long = "H", global = true)]
    pub depth: Option<f64>,
    /// Cut-down scale override (> 1).
    #[arg(long = "s", global = true)]
    pub scale: Option<f64>,
    /// Box side for tower and window commands.
    #[arg(long = "N", global = true)]
    pub n: Option<u64>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Also write the report to this path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format: json (default) or svg (tiling, d=2 only).
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Body reach for the lattice lemma.
    #[arg(long, global = true)]
    pub r: Option<f64>,
    #[arg(long = "e-center", global = true)]
    pub e_center: Option<String>,
    #[arg(long = "e-radius", global = true)]
    pub e_radius: Option<f64>,
    #[arg(long = "f-center", global = true)]
    pub f_center: Option<String>,
    #[arg(long = "f-radius", global = true)]
    pub f_radius: Option<f64>,
    /// two-towers: refuse to sample when the scale cannot work.
    #[arg(long, global = true)]
    pub strict: bool,
    /// two-towers: collapse piece groups (negative control).
    #[arg(long = "merge-groups", global = true)]
    pub merge_groups: bool,
    #[command(subcommand)]
    pub command: CommandKind,
}

#[derive(Subcommand, Clone, Copy)]
pub enum CommandKind {
    /// Build the marker bump and verify its separation and covering scales.
    Marker,
    /// Verify sampled tiling properties, or render one tiling as SVG.
    Tiling,
    /// Check tower translate disjointness and deep-clearance coverage.
    Tower,
    /// Build the two-tower decomposition and sample its properties.
    TwoTowers,
    /// Find the window side for the boundary-fraction bound and test it.
    Lattice,
    /// Estimate the orbit capacity of a ball.
    Ocap,
    /// Run the comparison pipeline and emit its certificate.
    Certify,
}

fn apply_thread_cap() -> Result<(), String> {
    let Ok(raw) = std::env::var("ZDTL_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or(format!("ZDTL_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| format!("cannot configure {threads} threads: {e}"))
}

fn run() -> i32 {
    let cli = Cli::parse();
    if let Err(msg) = apply_thread_cap() {
        eprintln!("config error: {msg}");
        return 2;
    }
    let cfg = match config::resolve(&cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return 2;
        }
    };
    match commands::execute(cli.command, &cfg) {
        Ok(outcome) => {
            let text = match &outcome.output {
                Output::Json(value) => to_json17(value),
                Output::Svg(svg) => svg.clone(),
            };
            print!("{text}");
            if let Some(path) = &cfg.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("cannot write report to {}: {e}", path.display());
                    return 2;
                }
            }
            if outcome.pass {
                0
            } else {
                1
            }
        }
        Err(msg) => {
            eprintln!("config error: {msg}");
            2
        }
    }
}

fn main() {
    std::process::exit(run());
}
