//! `nilnet` command-line driver.
//!
//! Exit codes: 0 when a command succeeds and its verdict (if any) passes,
//! 1 when a verdict fails, 2 on bad input.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "nilnet",
    version,
    about = "Separated nets, dyadic tiles and discrepancy tests on nilpotent Lie groups"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Group file, or a preset: heisenberg, heisenberg-integral, filiform, abelianN.
    #[arg(long, global = true, default_value = "heisenberg-integral")]
    pub group: String,
    /// Window such as `[-2,2]^3` or `[0,4]x[0,4]x[-1,1)`.
    #[arg(long, global = true)]
    pub window: Option<String>,
    /// Output directory; files are printed to stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Records,
    Svg,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Validate a group and print its law.
    Check {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Points of the lattice net `G(Λ)` in the window.
    Net {
        /// Diagonal entries of Λ, e.g. `2,1,1`.
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Enumerate a dyadic tile, or describe the window's cells by tiles.
    Dyadic {
        #[arg(long, default_value_t = 2)]
        level: u32,
        /// Integer base point, e.g. `0,0,4`.
        #[arg(long)]
        base: Option<String>,
        /// Use graded digits and dilations instead of `{0, 2^(i-1)}^n`.
        #[arg(long)]
        carnot: bool,
        /// Print a signed tile decomposition of the window's integer cells.
        #[arg(long)]
        describe: bool,
    },
    /// Perimeter of the window.
    Perimeter {
        #[arg(long, value_enum, default_value = "combinatorial")]
        method: PerimeterKind,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 20000)]
        samples: usize,
        #[arg(long, default_value_t = 0.25)]
        pitch: f64,
        #[arg(long, default_value = "quasi-max")]
        metric: String,
    },
    /// Discrepancy between two lattice nets on dyadic tiles meeting the window.
    Discrepancy {
        #[arg(long)]
        lambda1: Option<String>,
        #[arg(long)]
        lambda2: String,
        #[arg(long, default_value_t = 3)]
        max_level: u32,
    },
    /// Uniform-spread ratios of `G(Λ)` on the nested tiles at the origin.
    Spread {
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_level: u32,
    },
    /// Strong bounded-displacement slope test against `G(Z)`.
    Strongbd {
        #[arg(long, value_enum, default_value = "exotic")]
        against: Against,
        #[command(flatten)]
        exotic: ExoticArgs,
        #[arg(long, default_value_t = 5)]
        max_level: u32,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Quasicrystal points in the window, optionally with a density report.
    Qc {
        /// Slope θ of `L(g) = θ g_1` (default: golden ratio conjugate).
        #[arg(long)]
        theta: Option<String>,
        /// Internal window length for the slope construction.
        #[arg(long, default_value = "1/2")]
        s: String,
        /// Spec file (m, l1.., window or vertex/edge, alphaN, offset).
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Side lengths of nested centred cubes for the density report.
        #[arg(long)]
        density: Option<String>,
    },
    /// Build the exotic net; writes its manifest and optionally verifies it.
    Exotic {
        #[command(flatten)]
        exotic: ExoticArgs,
        #[arg(long)]
        verify: bool,
        /// Smaller ball layout for pictures (no discrepancy guarantee).
        #[arg(long)]
        compressed: bool,
    },
    /// SVG pictures of the tiles at levels `0..=levels`.
    Render {
        #[arg(long, default_value_t = 2)]
        levels: u32,
        /// One projection, e.g. `1,3`; default renders all standard views.
        #[arg(long)]
        axes: Option<String>,
        #[arg(long)]
        oblique: bool,
        #[arg(long)]
        carnot: bool,
    },
    /// Named experiments; each writes `<name>.jsonl` and `<name>.txt`.
    Experiment {
        #[arg(value_enum)]
        name: Experiment,
        #[command(flatten)]
        exotic: ExoticArgs,
        /// Semicolon-separated Λ list for lambda-density.
        #[arg(long, default_value = "1,1,1;2,1,1;1,1,2;2,2,4")]
        lambdas: String,
        #[arg(long, default_value = "16,32,64,128")]
        sides: String,
    },
}

#[derive(Args, Clone)]
pub struct ExoticArgs {
    /// Rational θ in (0, 1) (default: golden ratio conjugate to 12 digits).
    #[arg(long)]
    pub theta: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub i_max: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PerimeterKind {
    Combinatorial,
    Neighborhood,
    BoundaryNet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Against {
    Exotic,
    Halfspace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    LambdaDensity,
    StrongBd,
    QuasicrystalContrast,
    ExoticVerify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
