use crate::config::Settings;
use anyhow::{anyhow, bail, Context, Result};
use dip_core::eval::{angle_report, containment_stats, load_annotations, load_ground_truth};
use dip_core::imaging::{load_image, save_image};
use dip_core::pipeline::{
    annotate, annotate_tracked, parse_landmark_stream, run_frame, run_session, AnnotateStyle,
    FrameInput, FrameResult, Phase, PoseLandmarks, SessionOptions, TrackEvent,
};
use dip_core::sim::{simulate_with_observer, SimOutcome, SimScene};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NO_RESULT: u8 = 1;

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn load_landmark_file(path: &Path) -> Result<Vec<(u64, Option<PoseLandmarks>)>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading landmark stream {}", path.display()))?;
    let entries = parse_landmark_stream(&text).map_err(|e| anyhow!("{}:{e}", path.display()))?;
    if entries.is_empty() {
        bail!("{}: landmark stream holds no records", path.display());
    }
    Ok(entries)
}

pub fn detect(
    settings: &Settings,
    frame: &Path,
    landmarks: &Path,
    out: Option<&Path>,
    compact: bool,
) -> Result<u8> {
    let image = load_image(frame).with_context(|| format!("loading {}", frame.display()))?;
    let entries = load_landmark_file(landmarks)?;
    let (frame_id, pose) = &entries[0];
    let result = run_frame(*frame_id, &image, pose.as_ref(), &settings.dip);
    if compact {
        println!("{}", serde_json::to_string(&result)?);
    } else {
        println!("{}", serde_json::to_string_pretty(&result)?);
    }
    if let Some(path) = out {
        let annotated = annotate(&image, &result, &AnnotateStyle::default());
        save_image(&annotated, path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if result.detection.is_some() {
        EXIT_OK
    } else {
        EXIT_NO_RESULT
    })
}

/// Everything `run` learned about one stream, written to `--report` and
/// accepted back by `eval --results`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub phase: Phase,
    pub confirmed_frame: Option<u64>,
    pub frames_processed: u64,
    pub mean_elapsed_ms: f64,
    pub results: Vec<FrameResult>,
    pub tracking: Vec<TrackEvent>,
}

fn frame_path(dir: &Path, frame_id: u64) -> Result<PathBuf> {
    for ext in ["pgm", "ppm"] {
        let candidate = dir.join(format!("frame_{frame_id:06}.{ext}"));
        if candidate.is_file() {
            return Ok(candidate);
        }
    }
    bail!(
        "no frame file for landmark record {frame_id} (expected {}/frame_{frame_id:06}.pgm or .ppm)",
        dir.display()
    );
}

pub fn run(
    settings: &Settings,
    frames: &Path,
    landmarks: &Path,
    report: &Path,
    annotate_dir: Option<&Path>,
) -> Result<u8> {
    let entries = load_landmark_file(landmarks)?;
    let mut sources = Vec::with_capacity(entries.len());
    for (frame_id, pose) in &entries {
        sources.push((*frame_id, frame_path(frames, *frame_id)?, *pose));
    }

    let inputs = sources.iter().map(|(frame_id, path, pose)| {
        let frame = load_image(path).with_context(|| format!("loading {}", path.display()))?;
        Ok::<_, anyhow::Error>(FrameInput {
            frame_id: *frame_id,
            frame,
            landmarks: *pose,
        })
    });
    let opts = SessionOptions {
        track: settings.track,
        tracker: settings.tracker,
    };
    let outcome = run_session(inputs, &settings.dip, &opts)?;

    let mean_elapsed_ms = if outcome.results.is_empty() {
        0.0
    } else {
        outcome.results.iter().map(|r| r.elapsed_ms).sum::<f64>() / outcome.results.len() as f64
    };
    let run_report = RunReport {
        phase: outcome.state.phase,
        confirmed_frame: outcome.confirmed_frame,
        frames_processed: outcome.state.frames_processed,
        mean_elapsed_ms,
        results: outcome.results,
        tracking: outcome.tracking,
    };
    write_json(report, &run_report)?;

    if let Some(dir) = annotate_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let style = AnnotateStyle::default();
        let by_result: std::collections::HashMap<u64, &FrameResult> =
            run_report.results.iter().map(|r| (r.frame_id, r)).collect();
        let by_track: std::collections::HashMap<u64, &TrackEvent> = run_report
            .tracking
            .iter()
            .map(|t| (t.frame_id, t))
            .collect();
        for (frame_id, path, _) in &sources {
            let frame = load_image(path)?;
            let annotated = if let Some(result) = by_result.get(frame_id) {
                annotate(&frame, result, &style)
            } else if let Some(event) = by_track.get(frame_id) {
                match &event.window {
                    Some(window) => annotate_tracked(&frame, window, &style),
                    None => frame.clone(),
                }
            } else {
                frame.clone()
            };
            let name = path.file_name().expect("frame paths carry file names");
            save_image(&annotated, dir.join(name))?;
        }
    }

    println!(
        "processed {} frames, mean {:.3} ms/frame",
        run_report.frames_processed, run_report.mean_elapsed_ms
    );
    match run_report.confirmed_frame {
        Some(frame_id) => {
            println!(
                "confirmed detection at frame {frame_id} ({:?})",
                run_report.phase
            );
            Ok(EXIT_OK)
        }
        None => {
            println!("no confirmed detection");
            Ok(EXIT_NO_RESULT)
        }
    }
}

fn load_results(path: &Path) -> Result<Vec<FrameResult>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading results {}", path.display()))?;
    if let Ok(report) = serde_json::from_str::<RunReport>(&text) {
        return Ok(report.results);
    }
    serde_json::from_str::<Vec<FrameResult>>(&text)
        .with_context(|| format!("parsing {} as a run report or result list", path.display()))
}

pub fn eval(settings: &Settings, results: &Path, truth: &Path, out: &Path) -> Result<u8> {
    let results = load_results(results)?;
    let file =
        fs::File::open(truth).with_context(|| format!("reading truth {}", truth.display()))?;
    let truth_rows = load_ground_truth(file).map_err(|e| anyhow!("{}: {e}", truth.display()))?;
    let report = containment_stats(&results, &truth_rows, settings.detection_tolerance)
        .map_err(|e| anyhow!("joining results with truth: {e}"))?;
    write_json(out, &report)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(EXIT_OK)
}

pub fn eval_angles(annotations: &Path, out: &Path) -> Result<u8> {
    let file = fs::File::open(annotations)
        .with_context(|| format!("reading annotations {}", annotations.display()))?;
    let records = load_annotations(file).map_err(|e| anyhow!("{}: {e}", annotations.display()))?;
    let rows = angle_report(&records).map_err(|e| anyhow!("{}: {e}", annotations.display()))?;
    write_json(out, &rows)?;
    println!("{}", serde_json::to_string_pretty(&rows)?);
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct SimSummary {
    outcome: SimOutcome,
    steps: usize,
}

pub fn simulate(
    settings: &Settings,
    scene_path: &Path,
    log: &Path,
    render: Option<&Path>,
    compact: bool,
) -> Result<u8> {
    let text = fs::read_to_string(scene_path)
        .with_context(|| format!("reading scene {}", scene_path.display()))?;
    let scene =
        SimScene::from_key_values(&text).map_err(|e| anyhow!("{}: {e}", scene_path.display()))?;

    let mut render_err = None;
    let result = if let Some(dir) = render {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let save = |step: u32, frame: &dip_core::ImageBuffer| {
            let path = dir.join(format!("frame_{step:04}.ppm"));
            if let Err(e) = save_image(frame, &path) {
                render_err.get_or_insert_with(|| anyhow!("writing {}: {e}", path.display()));
            }
        };
        simulate_with_observer(&scene, &settings.sim, save)
    } else {
        simulate_with_observer(&scene, &settings.sim, |_, _| {})
    };
    if let Some(err) = render_err {
        return Err(err);
    }

    let mut writer =
        csv::Writer::from_path(log).with_context(|| format!("writing {}", log.display()))?;
    for row in &result.trajectory {
        writer.serialize(row)?;
    }
    writer.flush()?;

    let summary = SimSummary {
        outcome: result.outcome,
        steps: result.trajectory.len(),
    };
    if compact {
        println!("{}", serde_json::to_string(&summary)?);
    } else {
        match result.outcome {
            SimOutcome::Converged(step) => println!("converged at step {step}"),
            SimOutcome::Lost(step) => println!("target lost at step {step}"),
            SimOutcome::Timeout => {
                println!("no convergence within {} steps", settings.sim.max_steps)
            }
        }
    }
    Ok(match result.outcome {
        SimOutcome::Converged(_) => EXIT_OK,
        SimOutcome::Lost(_) | SimOutcome::Timeout => EXIT_NO_RESULT,
    })
}
