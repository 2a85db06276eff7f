mod commands;
mod failure;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use trackforge_core::PoseFrame;

use failure::Failure;

/// Synthetic multi-camera capture, pose-projection annotation and MOT evaluation.
#[derive(Debug, Parser)]
#[command(name = "trackforge", version)]
pub struct Cli {
    /// Seed overriding the one in the scenario spec.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON run configuration (thresholds, pose frame, default paths).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a scenario: pose stream, image log, events, models and rig.
    Simulate {
        /// Scenario spec (JSON).
        #[arg(long)]
        spec: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Match every image to each entity's nearest valid pose.
    Sync {
        /// Pose stream (.csv or .jsonl).
        #[arg(long)]
        poses: PathBuf,
        /// Image log (.csv).
        #[arg(long)]
        images: PathBuf,
        /// Matched pairs output (.jsonl).
        #[arg(long)]
        out: PathBuf,
        /// Reject matches further apart than this many seconds.
        #[arg(long)]
        max_dt: Option<f64>,
    },
    /// Project entity models into each camera and write annotation files.
    Annotate {
        /// Camera rig (JSON).
        #[arg(long)]
        rig: Option<PathBuf>,
        /// Entity model catalog (JSON).
        #[arg(long)]
        models: Option<PathBuf>,
        /// Matched pairs from `sync`.
        #[arg(long)]
        matched: PathBuf,
        /// Output directory; one file per camera.
        #[arg(long)]
        out: PathBuf,
        /// Frame of the reported poses: camera or world.
        #[arg(long, value_parser = PoseFrame::from_str)]
        pose_frame: Option<PoseFrame>,
    },
    /// Per-camera and per-class instance counts and annotation time.
    Stats {
        /// Annotation files (.jsonl or .csv).
        #[arg(required = true)]
        annotations: Vec<PathBuf>,
        /// Entity model catalog used to classify names.
        #[arg(long)]
        models: Option<PathBuf>,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert one annotation file to MOT-Challenge ground truth.
    ExportMot {
        /// Annotation file (.jsonl or .csv).
        #[arg(long)]
        annotations: PathBuf,
        /// MOT text output.
        #[arg(long)]
        out: PathBuf,
        /// Name-to-id map (JSON); read if present, extended and written back.
        #[arg(long)]
        id_map: Option<PathBuf>,
    },
    /// Score tracker results against ground truth.
    Evaluate {
        /// Ground truth, MOT text.
        #[arg(long)]
        gt: PathBuf,
        /// Tracker results, MOT text.
        #[arg(long)]
        results: PathBuf,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// IoU threshold for CLEAR matching and IDF1.
        #[arg(long)]
        iou: Option<f64>,
        /// Row label in the text table.
        #[arg(long)]
        name: Option<String>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TRACKFORGE_LOG", "warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { kind, error }) => {
            eprintln!("error: {}", describe(&error));
            ExitCode::from(kind as u8)
        }
    }
}

/// The error chain joined with ": ", skipping causes already quoted by the
/// message above them.
fn describe(error: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in error.chain() {
        let msg = cause.to_string();
        if !out.contains(&msg) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&msg);
        }
    }
    out
}
