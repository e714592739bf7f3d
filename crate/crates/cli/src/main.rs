mod commands;
mod endpoint;
mod error;

use clap::{Args, Parser, Subcommand, ValueEnum};
use railroute_core::nav::NavConfig;
use railroute_core::terrain::Scenario;
use std::path::PathBuf;
use std::process::ExitCode;

pub use endpoint::Endpoint;
pub use error::CliError;

/// Terrain-aware railway route prediction.
#[derive(Debug, Parser)]
#[command(name = "railroute", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic DEM tile and print its checksum.
    Synth(SynthArgs),
    /// Write the slope (rise over run) raster of a DEM.
    Slope(SlopeArgs),
    /// Predict a route between two endpoints.
    Predict(PredictArgs),
    /// Learn a cost model from demonstrated routes.
    Train(TrainArgs),
    /// Write the cost map a model assigns to a DEM.
    Costmap(CostmapArgs),
    /// Compare a predicted route with ground truth.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub scenario: Scenario,
    #[arg(long, default_value_t = 128)]
    pub size: usize,
    #[arg(long, default_value_t = 60.0)]
    pub cellsize: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short = 'o')]
    pub out: PathBuf,
    /// Also write the valley-floor route as GeoJSON (valley scenario only).
    #[arg(long)]
    pub truth_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SlopeArgs {
    #[arg(long)]
    pub dem: PathBuf,
    #[arg(long, short = 'o')]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Main-line limit of 1% grade.
    Mainline,
}

#[derive(Debug, Args)]
pub struct NavArgs {
    /// Maximum grade as rise over run [default: 0.022].
    #[arg(long, conflicts_with = "preset")]
    pub max_grade: Option<f64>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Erosion radius of the walkable mask, in cells.
    #[arg(long, default_value_t = 0)]
    pub track_halfwidth: usize,
}

impl NavArgs {
    pub fn config(&self) -> Result<NavConfig, CliError> {
        let grade = match (self.preset, self.max_grade) {
            (Some(Preset::Mainline), _) => NavConfig::mainline().max_grade,
            (None, Some(g)) => g,
            (None, None) => NavConfig::default().max_grade,
        };
        Ok(NavConfig::new(grade, self.track_halfwidth)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Geometric,
    Irl,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Trained model file; without it an untrained network from `--seed` is used.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    pub c_min: f64,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub dem: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Geometric)]
    pub mode: Mode,
    /// World coordinates `x,y` in meters, or `cell:col,row`.
    #[arg(long, required_unless_present = "extend_from", conflicts_with = "extend_from")]
    pub start: Option<Endpoint>,
    #[arg(long, required_unless_present = "extend_from", conflicts_with = "extend_from")]
    pub end: Option<Endpoint>,
    /// Continue this GeoJSON route along its final heading.
    #[arg(long, requires = "distance")]
    pub extend_from: Option<PathBuf>,
    /// Extension length in meters.
    #[arg(long)]
    pub distance: Option<f64>,
    #[command(flatten)]
    pub nav: NavArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, short = 'o')]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// DEM of each demonstration, paired in order with `--route`.
    #[arg(long, required = true)]
    pub dem: Vec<PathBuf>,
    #[arg(long, required = true)]
    pub route: Vec<PathBuf>,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    /// Convergence tolerance on mean deviation, in cells.
    #[arg(long, default_value_t = 2.0)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    pub c_min: f64,
    #[command(flatten)]
    pub nav: NavArgs,
    /// Let the policy step ignore the grade limit.
    #[arg(long)]
    pub no_grade_mask: bool,
    #[arg(long, short = 'o')]
    pub out: PathBuf,
    /// Per-epoch CSV log.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CostmapArgs {
    #[arg(long)]
    pub dem: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, short = 'o')]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub dem: PathBuf,
    /// Corridor radius around the prediction, meters.
    #[arg(long, default_value_t = 2000.0)]
    pub radius: f64,
    /// Distance within which a truth cell counts as covered [default: one cellsize].
    #[arg(long)]
    pub coverage_radius: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => commands::synth(&a),
        Command::Slope(a) => commands::slope(&a),
        Command::Predict(a) => commands::predict(&a),
        Command::Train(a) => commands::train(&a),
        Command::Costmap(a) => commands::costmap(&a),
        Command::Eval(a) => commands::eval(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("railroute: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
