use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mapcone::{OptConfig, Settings};

#[derive(Debug, Parser)]
#[command(
    name = "mapcone",
    version,
    about = "Positivity analysis of linear maps between matrix algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split the map and decide every cone.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Opts,
        /// Add per-stage wall-clock timings to the report.
        #[arg(long)]
        timings: bool,
    },
    /// Print c, the Choi matrix of phi_cp and the split residual.
    Split {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Opts,
    },
    /// Decide k-positivity, for one k or for every k up to the smaller dimension.
    Kpos {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Opts,
        #[arg(long)]
        k: Option<usize>,
        /// Also run the brute-force oracle with this many samples.
        #[arg(long)]
        oracle: Option<usize>,
    },
    /// Check the witness preconditions at a product vector and extend it.
    Witness {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Opts,
        /// Schmidt vector JSON; defaults to the uniform product vector.
        #[arg(long)]
        vector: Option<PathBuf>,
    },
    /// Decide decomposability through the PPT optimization.
    Decomposable {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Opts,
    },
    /// Norm of the map relative to a cone.
    Norm {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Opts,
        /// positive, cp, decomposable, or k-positive as `2-positive` / `kpos:2`.
        #[arg(long, default_value = "cp")]
        cone: String,
        /// Shorthand for `--cone k-positive` with this k.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Walk through the Choi map of B(C^3): both it and its transpose fail 2-positivity.
    PaperExample {
        #[arg(long)]
        json: bool,
    },
    /// Gallery maps.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum GalleryAction {
    /// List the available gallery maps.
    List {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct Input {
    /// Gallery map name (see `gallery list`).
    #[arg(long, conflicts_with = "choi", required_unless_present = "choi")]
    pub gallery: Option<String>,
    /// Choi matrix file: {"dim_k": .., "dim_h": .., "choi": [[re, im], ...]}.
    #[arg(long)]
    pub choi: Option<PathBuf>,
    /// Dimension for gallery maps (default 3).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Gallery parameter (lambda for reduction, rank for adv).
    #[arg(long, allow_negative_numbers = true)]
    pub param: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Opts {
    #[arg(long, default_value_t = OptConfig::default().seed)]
    pub seed: u64,
    #[arg(long, default_value_t = OptConfig::default().restarts)]
    pub restarts: usize,
    #[arg(long, default_value_t = OptConfig::default().max_iter)]
    pub max_iter: usize,
    /// Stopping tolerance of the Schmidt-rank optimizer.
    #[arg(long, default_value_t = OptConfig::default().tol)]
    pub tol: f64,
    /// Emit JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

impl Opts {
    pub fn settings(&self) -> Settings {
        let mut s = Settings::default();
        s.opt.seed = self.seed;
        s.opt.restarts = self.restarts;
        s.opt.max_iter = self.max_iter;
        s.opt.tol = self.tol;
        s
    }
}
