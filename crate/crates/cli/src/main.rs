use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spgamma::{FdrMode, PowerMode, Statistic};

mod commands;
mod manifest;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  input error (unreadable or malformed files, bad flags, dimension mismatch)
  3  numeric failure (matrix not positive definite, special function failure)";

#[derive(Parser, Debug)]
#[command(name = "spgamma", version, about = "Gamma-index tests of spatial association for panel data")]
#[command(after_help = EXIT_CODES)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Local tests: per-region statistic, p-values and FDR flags.
    #[command(after_help = EXIT_CODES)]
    Lisa(LisaArgs),
    /// Global test over all regions.
    #[command(after_help = EXIT_CODES)]
    Gisa(GisaArgs),
    /// Power curves on simulated Gaussian grid data.
    #[command(after_help = EXIT_CODES)]
    Simulate(SimulateArgs),
    /// Agreement (MCC, Rand index) between two significance tables.
    #[command(after_help = EXIT_CODES)]
    Compare(CompareArgs),
    /// Edge list of the lag-k weight graph (pairs at distance exactly k).
    #[command(after_help = EXIT_CODES)]
    Lag(LagArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum StatArg {
    Moran,
    GearyL2,
    GearyL1,
    Binary,
}

impl From<StatArg> for Statistic {
    fn from(s: StatArg) -> Self {
        match s {
            StatArg::Moran => Statistic::Moran,
            StatArg::GearyL2 => Statistic::GearyL2,
            StatArg::GearyL1 => Statistic::GearyL1,
            StatArg::Binary => Statistic::Binary,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FdrArg {
    Global,
    Spatial,
    None,
}

impl From<FdrArg> for FdrMode {
    fn from(f: FdrArg) -> Self {
        match f {
            FdrArg::Global => FdrMode::Global,
            FdrArg::Spatial => FdrMode::Spatial,
            FdrArg::None => FdrMode::None,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Lisa,
    Gisa,
}

impl From<ModeArg> for PowerMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Lisa => PowerMode::Lisa,
            ModeArg::Gisa => PowerMode::Gisa,
        }
    }
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// Edge list CSV (`src,dst`).
    #[arg(long)]
    pub graph: PathBuf,
    /// Panel CSV, wide (`region_0,...`) or long (`region,time,value`).
    #[arg(long)]
    pub panel: PathBuf,
    #[arg(long, value_enum, default_value = "moran")]
    pub stat: StatArg,
    /// Use pairs at graph distance exactly k as neighbors.
    #[arg(long, default_value_t = 1)]
    pub lag: usize,
    /// Headerless T x T symmetric positive-definite matrix for Moran.
    #[arg(long)]
    pub metric_matrix: Option<PathBuf>,
    /// Also compute Monte Carlo permutation p-values with this many draws.
    #[arg(long)]
    pub mc: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct LisaArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "global")]
    pub fdr: FdrArg,
    /// Level for the significant-region count printed on completion.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Args, Debug)]
pub struct GisaArgs {
    #[command(flatten)]
    pub input: InputArgs,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 50)]
    pub rows: usize,
    #[arg(long, default_value_t = 60)]
    pub cols: usize,
    /// Observations per region.
    #[arg(long, default_value_t = 5)]
    pub t: usize,
    /// Comma-separated correlation parameters.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
          default_value = "-0.25,-0.2,-0.15,-0.1,-0.05,0,0.05,0.1,0.15,0.2,0.25")]
    pub c_list: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "lisa")]
    pub mode: ModeArg,
    /// Comma-separated statistics (default: all four).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub stats: Vec<StatArg>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum LevelArg {
    #[value(name = "0.05")]
    Five,
    #[value(name = "0.01")]
    One,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Significance table treated as the reference labeling.
    pub a: PathBuf,
    pub b: PathBuf,
    /// Which significance column to compare.
    #[arg(long, value_enum, default_value = "0.05")]
    pub level: LevelArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct LagArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Vertex count (default: 1 + largest id in the edge list).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Lisa(a) => commands::lisa(a),
        Command::Gisa(a) => commands::gisa(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Compare(a) => commands::compare(a),
        Command::Lag(a) => commands::lag(a),
    };
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
