//! `pdsphere` command-line front end.
//!
//! Exit codes: 0 success, 1 other failure, 2 file not found, 3 parse error,
//! 4 invalid parameter. Failures print one JSON line to stderr.

// `!(x > 0.0)` is used on purpose so NaN falls into the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pdsphere::density::{DEFAULT_GRID, DEFAULT_SIGMA};
use pdsphere::{DensityParams, HomologySelection, Metric};

use error::{CliError, CliResult, Kind};

#[derive(Debug, Parser)]
#[command(
    name = "pdsphere",
    version,
    about = "Persistence diagrams on the Hilbert sphere"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
struct DensityArgs {
    /// Grid resolution K (the density has K x K cells).
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
    /// Kernel bandwidth in normalized diagram units.
    #[arg(long, default_value_t = DEFAULT_SIGMA, allow_hyphen_values = true)]
    sigma: f64,
}

impl DensityArgs {
    fn params(&self) -> CliResult<DensityParams> {
        Ok(DensityParams::new(self.grid, self.sigma)?)
    }
}

/// Normalization scale: `auto` uses the largest finite death over all inputs
/// of the invocation; a number fixes it.
#[derive(Debug, Clone, Copy, PartialEq)]
enum ScalePolicy {
    Auto,
    Fixed(f64),
}

impl FromStr for ScalePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(ScalePolicy::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(ScalePolicy::Fixed(v)),
            _ => Err(format!(
                "scale must be 'auto' or a positive number, got '{s}'"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, Args)]
struct DiagramArgs {
    /// Homology dimension feeding the density: 0, 1 or all.
    #[arg(long, default_value = "1")]
    dim: HomologySelection,
    /// Normalization scale: auto or a positive number.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    scale: ScalePolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GridKind {
    /// Probability mass per cell (sums to 1).
    Pdf,
    /// Square-root density (unit norm under the grid inner product).
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Aggregate {
    Mean,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Delay-embed a time series into a point cloud.
    Embed {
        #[arg(long)]
        input: PathBuf,
        /// Column of a multi-column series (0-based).
        #[arg(long)]
        channel: Option<usize>,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        tau: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Rips persistence (H0 and H1) of a point cloud or an embedded series.
    Persist {
        /// Point-cloud CSV.
        #[arg(long, conflicts_with = "series", required_unless_present = "series")]
        input: Option<PathBuf>,
        /// Time-series CSV, delay-embedded first. Without --channel every
        /// channel is processed and --output names a directory.
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long)]
        channel: Option<usize>,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        tau: usize,
        #[arg(long, default_value_t = f64::INFINITY, allow_hyphen_values = true)]
        max_scale: f64,
        /// Give consecutive samples an edge born at 0.
        #[arg(long)]
        temporal_links: bool,
        #[arg(long)]
        output: PathBuf,
    },
    /// Kernel density grid of a diagram.
    Density {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        diagram: DiagramArgs,
        #[command(flatten)]
        density: DensityArgs,
        #[arg(long, value_enum, default_value_t = GridKind::Pdf)]
        kind: GridKind,
        #[arg(long)]
        output: PathBuf,
    },
    /// Distance between two diagrams.
    Dist {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value = "hilbert")]
        metric: Metric,
        #[command(flatten)]
        diagram: DiagramArgs,
        #[command(flatten)]
        density: DensityArgs,
    },
    /// Pairwise distance matrix; directories are multi-channel items.
    Distmat {
        #[arg(long, num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value = "hilbert")]
        metric: Metric,
        #[command(flatten)]
        diagram: DiagramArgs,
        #[command(flatten)]
        density: DensityArgs,
        /// How per-channel distances combine for multi-channel items.
        #[arg(long, value_enum, default_value_t = Aggregate::Mean)]
        aggregate: Aggregate,
        /// Matrix CSV; the manifest goes next to it with extension .json.
        #[arg(long)]
        output: PathBuf,
    },
    /// Grids sampled along the sphere geodesic between two diagrams' densities.
    Geodesic {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(long, default_value_t = 5)]
        steps: usize,
        #[command(flatten)]
        diagram: DiagramArgs,
        #[command(flatten)]
        density: DensityArgs,
        #[arg(long, value_enum, default_value_t = GridKind::Pdf)]
        kind: GridKind,
        /// Also write diagram-space (Wasserstein) geodesic samples.
        #[arg(long)]
        alexandrov: bool,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Extrinsic mean of diagram densities.
    Mean {
        #[arg(long, num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        diagram: DiagramArgs,
        #[command(flatten)]
        density: DensityArgs,
        #[arg(long, value_enum, default_value_t = GridKind::Pdf)]
        kind: GridKind,
        #[arg(long)]
        output: PathBuf,
    },
    /// Principal geodesic analysis of diagram densities.
    Pga {
        #[arg(long, num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value_t = 2)]
        components: usize,
        #[command(flatten)]
        diagram: DiagramArgs,
        #[command(flatten)]
        density: DensityArgs,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// k-NN classification; leave-one-out on --train when --test is absent.
    Knn {
        /// Item list `path,label`.
        #[arg(long)]
        train: PathBuf,
        /// Item list `path` or `path,label`.
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "hilbert")]
        metric: Metric,
        #[command(flatten)]
        diagram: DiagramArgs,
        #[command(flatten)]
        density: DensityArgs,
        /// Predictions CSV.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Leave-one-out linear regression of scores on PGA coordinates.
    Regress {
        /// Item list `path,score`.
        #[arg(long)]
        items: PathBuf,
        #[arg(long, default_value_t = 1)]
        components: usize,
        #[command(flatten)]
        diagram: DiagramArgs,
        #[command(flatten)]
        density: DensityArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Time Hilbert against w1 distances on random diagrams.
    Bench {
        #[arg(long, default_value_t = 30)]
        n: usize,
        #[command(flatten)]
        density: DensityArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON report path; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Render a grid CSV as an 8-bit PGM image.
    Heatmap {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Seeded synthetic point clouds (circle, two circles, noise).
    Synth {
        #[arg(long, default_value_t = 3)]
        classes: usize,
        #[arg(long, default_value_t = 30)]
        per_class: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also compute each cloud's diagrams and an `items.csv` list.
        #[arg(long)]
        diagrams: bool,
        #[arg(long)]
        output_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string();
            let message = first
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            return fail(CliError::new(Kind::Parameter, message));
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", e.to_line());
    ExitCode::from(e.kind.exit_code())
}
