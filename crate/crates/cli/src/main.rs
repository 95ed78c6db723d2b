//! `lanefog` - batch fog rendering and lane-benchmark tooling.
//!
//! Exit codes: 0 full success, 1 partial or runtime failure (per-file
//! errors are recorded in the report), 2 usage error.

mod commands;
mod util;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use util::CliError;

#[derive(Parser)]
#[command(
    name = "lanefog",
    version,
    about = "Scattering-model fog rendering and lane-detection benchmark tooling",
    propagate_version = true
)]
struct Cli {
    /// Worker threads for batch commands (default: all hardware threads)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render fog over a directory of clear road images
    Fog(FogArgs),
    /// Write a synthetic ground-plane depth map as 16-bit PNG
    DepthSynth(DepthSynthArgs),
    /// Convert lane annotations between formats
    Convert(ConvertArgs),
    /// Generate edge-supervision labels (detector edges + lane strokes)
    Edges(EdgesArgs),
    /// Evaluate lane predictions against ground truth
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Keep every Nth frame of an ordered image sequence
    Sample(SampleArgs),
    /// Resize a dataset (and optionally its annotations) to one resolution
    Resize(ResizeArgs),
    /// Scene-balanced train/test split of a manifest
    Split(SplitArgs),
    /// Enumerate images under a root into a manifest
    Manifest(ManifestArgs),
}

#[derive(Args)]
struct FogArgs {
    /// Directory of clear input images (PNG/JPEG)
    #[arg(long)]
    input: PathBuf,
    /// Output directory; mirrors the input tree, same filenames
    #[arg(long)]
    out: PathBuf,
    /// Extinction coefficient; presets 2/4/8 give light/medium/heavy fog
    /// against depth normalized to [0, 1] (benchmark presets)
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    beta: f32,
    /// Fixed atmospheric light in [0, 1]; default estimates per image from
    /// the dark channel
    #[arg(long, allow_negative_numbers = true)]
    atmospheric_light: Option<f32>,
    /// Dark-channel window side length, odd (dehazing-literature default)
    #[arg(long, default_value_t = 15)]
    dc_window: u32,
    /// Fraction of brightest dark-channel pixels voting for the
    /// atmospheric light (benchmark convention: top 0.1%)
    #[arg(long, default_value_t = 0.001)]
    bright_percentile: f64,
    /// Directory of per-image depth maps sharing the image stem
    /// (16-bit grayscale PNG or PFM)
    #[arg(long)]
    depth_dir: Option<PathBuf>,
    /// Synthesize flat-road ground-plane depth; acts as the fallback when
    /// --depth-dir is also given
    #[arg(long)]
    synthetic_depth: bool,
    /// Horizon row in pixels from the top (required with --synthetic-depth)
    #[arg(long, allow_negative_numbers = true)]
    horizon: Option<f32>,
    /// Ground-plane scale k in d = k / (y - horizon) (toolkit default)
    #[arg(long, default_value_t = 300.0)]
    gp_scale: f32,
    /// Nearest modeled depth before normalization (toolkit default)
    #[arg(long, default_value_t = 1.0)]
    gp_dmin: f32,
    /// Farthest modeled depth before normalization (toolkit default)
    #[arg(long, default_value_t = 50.0)]
    gp_dmax: f32,
    /// Report path, line-delimited JSON (default: <out>/fog_report.jsonl)
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct DepthSynthArgs {
    /// Map width in pixels
    #[arg(long)]
    width: u32,
    /// Map height in pixels
    #[arg(long)]
    height: u32,
    /// Horizon row in pixels from the top
    #[arg(long)]
    horizon: f32,
    /// Ground-plane scale k in d = k / (y - horizon) (toolkit default)
    #[arg(long, default_value_t = 300.0)]
    gp_scale: f32,
    /// Nearest modeled depth before normalization (toolkit default)
    #[arg(long, default_value_t = 1.0)]
    gp_dmin: f32,
    /// Farthest modeled depth before normalization (toolkit default)
    #[arg(long, default_value_t = 50.0)]
    gp_dmax: f32,
    /// Output 16-bit PNG path
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::ValueEnum, Clone, Copy, PartialEq, Eq)]
enum FormatArg {
    Culane,
    Tusimple,
}

#[derive(Args)]
struct ConvertArgs {
    /// Source format
    #[arg(long, value_enum)]
    from: FormatArg,
    /// Target format
    #[arg(long, value_enum)]
    to: FormatArg,
    /// Source: sidecar root for culane, record-per-line file for tusimple
    #[arg(long)]
    input: PathBuf,
    /// Relative image paths to convert (required for a culane source)
    #[arg(long)]
    list: Option<PathBuf>,
    /// Target: record-per-line file for tusimple, sidecar root for culane
    #[arg(long)]
    out: PathBuf,
    /// Row grid start:end:step for the tusimple target, e.g. 240:710:10
    #[arg(long)]
    h_samples: Option<String>,
    /// Annotated image resolution
    #[arg(long, default_value = "1640x590")]
    image_size: String,
}

#[derive(Args)]
struct EdgesArgs {
    /// Directory of input images
    #[arg(long)]
    input: PathBuf,
    /// Root of lane-label sidecars (<rel>.lines.txt)
    #[arg(long)]
    labels: PathBuf,
    /// Output directory for 8-bit PNG edge maps (0/255)
    #[arg(long)]
    out: PathBuf,
    /// Hysteresis low threshold, 8-bit gradient scale (toolkit default)
    #[arg(long, default_value_t = 50.0)]
    low: f32,
    /// Hysteresis high threshold, 8-bit gradient scale (toolkit default)
    #[arg(long, default_value_t = 150.0)]
    high: f32,
    /// Gaussian blur sigma (toolkit default)
    #[arg(long, default_value_t = 1.4)]
    sigma: f32,
    /// Lane stroke width in pixels (toolkit default)
    #[arg(long, default_value_t = 3)]
    stroke: u32,
    /// Block-max downsample factor for the supervision resolution
    #[arg(long, default_value_t = 1)]
    downsample: u32,
    /// Report path, line-delimited JSON (default: <out>/edges_report.jsonl)
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Rasterized-lane IoU F1 over sidecar trees
    Culane(EvalCulaneArgs),
    /// Point-tolerance accuracy over record files
    Tusimple(EvalTusimpleArgs),
}

#[derive(Args)]
struct EvalCulaneArgs {
    /// Prediction sidecar root
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth sidecar root
    #[arg(long)]
    gt: PathBuf,
    /// List of relative image paths to evaluate
    #[arg(long)]
    list: PathBuf,
    /// Lane stroke width in pixels (benchmark convention: 30)
    #[arg(long, default_value_t = 30)]
    width: u32,
    /// Reported IoU thresholds (benchmark convention)
    #[arg(long, default_value = "0.5,0.65,0.75,0.85")]
    thresholds: String,
    /// mF1 averaging grid start:end:step (toolkit convention; the mF1
    /// definition is not standardized)
    #[arg(long, default_value = "0.5:0.95:0.05")]
    mf1_grid: String,
    /// Raster resolution for lane masks (benchmark convention)
    #[arg(long, default_value = "1640x590")]
    image_size: String,
    /// Manifest with scene tags for a per-scene breakdown
    #[arg(long)]
    scene_manifest: Option<PathBuf>,
    /// Report path, line-delimited JSON
    #[arg(long, default_value = "culane_report.jsonl")]
    report: PathBuf,
}

#[derive(Args)]
struct EvalTusimpleArgs {
    /// Prediction record file (one JSON record per line)
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth record file
    #[arg(long)]
    gt: PathBuf,
    /// Lateral point tolerance in pixels (benchmark convention: 20)
    #[arg(long, default_value_t = 20.0)]
    tol: f64,
    /// Matched-point ratio a lane must exceed to be a true positive
    /// (benchmark convention: 0.85)
    #[arg(long, default_value_t = 0.85)]
    ratio: f64,
    /// Report path, line-delimited JSON
    #[arg(long, default_value = "tusimple_report.jsonl")]
    report: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    /// Frame directory (ordered by relative path) or a list file
    #[arg(long)]
    input: PathBuf,
    /// Keep every Nth frame; mandatory, there is no universal default
    #[arg(long)]
    interval: usize,
    /// Output list file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ResizeArgs {
    /// Input dataset root
    #[arg(long)]
    input: PathBuf,
    /// Output root; mirrors the input tree
    #[arg(long)]
    out: PathBuf,
    /// Target resolution (benchmark convention: 1640x590)
    #[arg(long, default_value = "1640x590")]
    to: String,
    /// Rescale .lines.txt sidecars with the same factors
    #[arg(long)]
    with_annotations: bool,
    /// Report path, line-delimited JSON (default: <out>/resize_report.jsonl)
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SplitArgs {
    /// Manifest file (<path><TAB><scene> per line; bare list files default
    /// to scene Normal)
    #[arg(long)]
    manifest: PathBuf,
    /// train:test ratio (benchmark convention: 2:1)
    #[arg(long, default_value = "2:1")]
    ratio: String,
    /// Shuffle seed; the same seed reproduces the same split
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving train.txt and test.txt
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ManifestArgs {
    /// Dataset root to enumerate
    #[arg(long)]
    root: PathBuf,
    /// Optional scene map (TSV: <path><TAB><scene>); later entries win
    #[arg(long)]
    scene_map: Option<PathBuf>,
    /// Output manifest file
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // A zero or oversubscribed value is a usage problem, not a crash.
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let outcome = match cli.command {
        Command::Fog(args) => commands::fog::run(&args),
        Command::DepthSynth(args) => commands::depth::run(&args),
        Command::Convert(args) => commands::convert::run(&args),
        Command::Edges(args) => commands::edges::run(&args),
        Command::Eval(EvalCommand::Culane(args)) => commands::eval::run_culane(&args),
        Command::Eval(EvalCommand::Tusimple(args)) => commands::eval::run_tusimple(&args),
        Command::Sample(args) => commands::dataset::run_sample(&args),
        Command::Resize(args) => commands::dataset::run_resize(&args),
        Command::Split(args) => commands::dataset::run_split(&args),
        Command::Manifest(args) => commands::dataset::run_manifest(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(error)) => {
            eprintln!("error: {error:#}");
            ExitCode::from(1)
        }
    }
}
