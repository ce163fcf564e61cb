use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "pgspectra", version, about = "Spectral optimality criteria of SLAM pose-graphs")]
pub struct Cli {
    /// Log verbosity (error, warn, info, debug, trace); overrides RUST_LOG.
    #[arg(long, global = true)]
    pub log_level: Option<log::LevelFilter>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Criteria of one pose-graph file through either or both routes.
    Analyze(AnalyzeArgs),
    /// Replay a graph edge by edge and compare the two routes at every step.
    Compare(CompareArgs),
    /// Time both routes over a size sweep.
    Bench(BenchArgs),
    /// Write a synthetic pose-graph.
    Gen(GenArgs),
    /// Run exploration episodes in a grid world.
    Explore(ExploreArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Fim,
    Laplacian,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Pose-graph file (VERTEX_SE2 / EDGE_SE2 or the SE3 quaternion records).
    pub graph: PathBuf,
    /// Edge weights: unit, maxeig or matched:<p>.
    #[arg(long, default_value = "unit")]
    pub weights: String,
    #[arg(long, value_enum, default_value_t = Route::Both)]
    pub route: Route,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Pose-graph file, or a series CSV with --audit-series.
    pub input: PathBuf,
    /// Edge weights: unit, maxeig or matched:<p>. Overrides the config file.
    #[arg(long)]
    pub weights: Option<String>,
    /// Evaluate every N-th edge insertion.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Largest nℓ for which the information-matrix route runs.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Experiment config (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Treat the input as a series from a maxeig run and audit its bound.
    #[arg(long)]
    pub audit_series: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the run summary (gaps, violations, audit outcome) as JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [50usize, 100, 200, 400])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub ell: usize,
    /// Timed samples per route and size (at least 3).
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Chain,
    Loops,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edge information: frh (diag 11.11, 11.11, 250), random, or diag:<a>,<b>,...
    #[arg(long, default_value = "frh")]
    pub phi: String,
    /// Block dimension for random information (3 or 6).
    #[arg(long, default_value_t = 3)]
    pub ell: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    /// World map: header "width height resolution", then rows of '#' and '.'.
    pub world: PathBuf,
    /// closest, dopt, or all for a head-to-head comparison.
    #[arg(long, default_value = "dopt")]
    pub policy: String,
    /// Motion steps per episode.
    #[arg(long, default_value_t = 6000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Episodes per policy, with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// Explorer constants (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Trajectory log (JSON lines) of every episode, in run order.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Metrics output; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with status 3 unless dopt matches or beats closest on mean τ̄ and mean rmse.
    #[arg(long)]
    pub check_ordering: bool,
}
