mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Pointing-gesture object detection, tracking and approach simulation.
#[derive(Parser)]
#[command(name = "dip", version, about)]
struct Cli {
    /// Config file of `key = value` lines (default: $DIP_CONFIG when set)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one config key, e.g. --set c=120 (repeatable, wins over --config)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the detector on a single frame and print the result as JSON
    Detect {
        /// Frame image (PGM or PPM)
        #[arg(long)]
        frame: PathBuf,
        /// Landmark stream; the first record drives the frame
        #[arg(long)]
        landmarks: PathBuf,
        /// Write an annotated copy of the frame here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compact single-line JSON instead of pretty-printed
        #[arg(long)]
        json: bool,
    },
    /// Process a frame directory against a landmark stream
    Run {
        /// Directory holding frame_NNNNNN.pgm/.ppm files
        #[arg(long)]
        frames: PathBuf,
        /// Landmark stream file
        #[arg(long)]
        landmarks: PathBuf,
        /// Write the session report JSON here
        #[arg(long)]
        report: PathBuf,
        /// Write one annotated image per input frame into this directory
        #[arg(long)]
        annotate: Option<PathBuf>,
    },
    /// Score results against ground truth (or summarise angle annotations)
    Eval(EvalArgs),
    /// Drive the closed-loop approach simulator on a scene file
    Simulate {
        /// Scene description (key = value lines)
        #[arg(long)]
        scene: PathBuf,
        /// Write the trajectory CSV here
        #[arg(long)]
        log: PathBuf,
        /// Save every rendered frame into this directory
        #[arg(long)]
        render: Option<PathBuf>,
        /// Print a compact JSON summary instead of prose
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct EvalArgs {
    #[command(subcommand)]
    mode: Option<EvalMode>,
    /// Run report JSON (from `dip run --report`)
    #[arg(long)]
    results: Option<PathBuf>,
    /// Ground-truth CSV
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Write the evaluation report JSON here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EvalMode {
    /// Summarise per-image pointing-angle annotations
    Angles {
        /// Annotation CSV: image_id,annotator_id,angle
        #[arg(long)]
        annotations: PathBuf,
        /// Write the angle table JSON here
        #[arg(long)]
        out: PathBuf,
    },
}

fn dispatch(cli: Cli) -> anyhow::Result<u8> {
    let settings = config::load(cli.config.as_ref(), &cli.set)?;
    match cli.command {
        Command::Detect {
            frame,
            landmarks,
            out,
            json,
        } => commands::detect(&settings, &frame, &landmarks, out.as_deref(), json),
        Command::Run {
            frames,
            landmarks,
            report,
            annotate,
        } => commands::run(&settings, &frames, &landmarks, &report, annotate.as_deref()),
        Command::Eval(args) => match args.mode {
            Some(EvalMode::Angles { annotations, out }) => {
                commands::eval_angles(&annotations, &out)
            }
            None => {
                let results = args
                    .results
                    .ok_or_else(|| anyhow::anyhow!("--results is required"))?;
                let truth = args
                    .truth
                    .ok_or_else(|| anyhow::anyhow!("--truth is required"))?;
                let out = args
                    .out
                    .ok_or_else(|| anyhow::anyhow!("--out is required"))?;
                commands::eval(&settings, &results, &truth, &out)
            }
        },
        Command::Simulate {
            scene,
            log,
            render,
            json,
        } => commands::simulate(&settings, &scene, &log, render.as_deref(), json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
