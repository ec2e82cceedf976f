//! `drumline` command-line front end.

mod commands;
mod config;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use drumline::planner::PerformMode;

/// An error in how the program was invoked or configured (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(
    name = "drumline",
    version,
    about = "MIDI drum tracks to simulated two-stick performances and scores"
)]
pub struct Cli {
    /// Project configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a MIDI file into a frame-quantized drum track.
    Ingest(IngestArgs),
    /// Compute complexity features for tracks or MIDI files.
    Analyze(AnalyzeArgs),
    /// Build the contact chain of a track and split it into segments.
    Segment(SegmentArgs),
    /// Play a track with the baseline planner and record the strikes.
    Perform(PerformArgs),
    /// Score strike logs against a track.
    Score(ScoreArgs),
    /// Rank-correlate song features with F1 scores.
    Correlate(CorrelateArgs),
    /// Step the simulator with a zero or random policy and print the rollout.
    EnvDemo(EnvDemoArgs),
}

#[derive(Debug, Args)]
pub struct MappingArgs {
    /// Note-to-drum mapping file (TOML); repeat to merge, later files win.
    #[arg(long = "mapping")]
    pub mappings: Vec<PathBuf>,
    /// Keep every articulation instead of only each drum's most frequent note.
    #[arg(long)]
    pub remap_articulations: bool,
    /// Frames per second of the output grid.
    #[arg(long)]
    pub fps: Option<u32>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    pub midi: PathBuf,
    #[command(flatten)]
    pub mapping: MappingArgs,
    /// Output track JSON.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Track JSON files, MIDI files, or directories of them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub mapping: MappingArgs,
    /// Features JSON (single input only).
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Features CSV, one row per song.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    pub track: PathBuf,
    /// Contact steps per segment.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PerformArgs {
    pub track: PathBuf,
    /// `kinematic` or `pd`.
    #[arg(long, default_value = "pd")]
    pub mode: PerformMode,
    /// Strike log JSON.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Per-frame rollout log (JSON lines, pd mode).
    #[arg(long)]
    pub rollout: Option<PathBuf>,
    /// Trajectory plan JSON.
    #[arg(long)]
    pub plan: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    pub track: PathBuf,
    /// One or more strike logs of the same track.
    #[arg(required = true)]
    pub strikes: Vec<PathBuf>,
    /// Matching tolerance in frames.
    #[arg(long)]
    pub tolerance: Option<usize>,
    /// Report JSON.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// One-row score CSV for `correlate`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Features CSV from `analyze`.
    pub features: PathBuf,
    /// Score CSVs from `score`.
    #[arg(required = true)]
    pub scores: Vec<PathBuf>,
    /// Correlation table CSV.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Feature/F1 scatter data JSON.
    #[arg(long)]
    pub scatter: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnvDemoArgs {
    pub track: PathBuf,
    /// `zero` or `random`.
    #[arg(long, default_value = "zero")]
    pub policy: String,
    /// Segment number, counting from 1.
    #[arg(long, default_value_t = 1)]
    pub segment: usize,
    /// Start at a random contact step of the segment.
    #[arg(long)]
    pub random_start: bool,
    /// Stop after this many frames.
    #[arg(long)]
    pub frames: Option<usize>,
    /// Rollout log (JSON lines); stdout when absent.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<drumline::Error>() {
        Some(drumline::Error::Config(_) | drumline::Error::Usage(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
