//! Frame pipeline: pointing gate, ray extension, area-of-interest
//! construction, object localization, and the multi-frame session state
//! machine that confirms a detection and hands it to the tracker.

mod landmarks;

pub use landmarks::{parse_landmark_stream, Arm, LandmarkError, PoseLandmarks};

use crate::detection::{locate_object, Detection, DetectorParams, LocateStrategy};
use crate::geometry::{
    build_area_of_interest, build_area_of_interest_perpendicular, PointingRay, Rect, Triangle,
};
use crate::imaging::{
    draw_cross, draw_line, draw_rect_outline, draw_triangle_outline, ImageBuffer,
};
use crate::tracking::{init_tracker, track, TrackerParams, TrackerState, TrackingError};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Pipeline configuration. Field defaults follow the reference pointing
/// setup: extension scale 10, base half-width 100 px, apex offset 5 px.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DipConfig {
    /// Ray extension scale factor.
    pub sf: f64,
    /// Half-width of the triangle base, in pixels.
    pub c: f64,
    /// Apex offset from the wrist, in pixels.
    pub eps: f64,
    /// Minimum joint confidence for a usable pose.
    pub min_conf: f64,
    /// Minimum elbow→wrist distance for a pointing pose, in pixels.
    pub min_forearm: f64,
    pub strategy: LocateStrategy,
    pub detector: DetectorParams,
    /// Offset the triangle base perpendicular to the ray instead of
    /// vertically, which behaves better for near-vertical pointing.
    pub perpendicular_mode: bool,
    /// Consecutive detections required before the target is confirmed.
    pub confirm_frames: u32,
}

impl Default for DipConfig {
    fn default() -> Self {
        Self {
            sf: 10.0,
            c: 100.0,
            eps: 5.0,
            min_conf: 0.5,
            min_forearm: 15.0,
            strategy: LocateStrategy::ContourThenKeypoint,
            detector: DetectorParams::default(),
            perpendicular_mode: false,
            confirm_frames: 1,
        }
    }
}

impl DipConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.sf > 0.0) {
            return Err("sf must be positive".into());
        }
        if !(self.c > 0.0) {
            return Err("c must be positive".into());
        }
        if !(self.eps >= 0.0) {
            return Err("eps must be non-negative".into());
        }
        if !(0.0..=1.0).contains(&self.min_conf) {
            return Err("min_conf must be in [0, 1]".into());
        }
        if !(self.min_forearm >= 0.0) {
            return Err("min_forearm must be non-negative".into());
        }
        if self.confirm_frames == 0 {
            return Err("confirm_frames must be at least 1".into());
        }
        let d = &self.detector;
        if !(d.canny.low > 0.0 && d.canny.high > d.canny.low) {
            return Err("canny thresholds must satisfy 0 < low < high".into());
        }
        if !(d.canny.sigma > 0.0) {
            return Err("canny sigma must be positive".into());
        }
        if !(d.window_sigma > 0.0) {
            return Err("window sigma must be positive".into());
        }
        Ok(())
    }
}

/// Why a frame did or did not produce an area of interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateStatus {
    /// No landmarks supplied for the frame.
    NoPose,
    /// A joint confidence fell below the minimum.
    LowConfidence,
    /// Forearm too short (or degenerate) to define a direction.
    NotPointing,
    Ok,
}

/// Gate decision for a frame's landmarks.
pub fn is_pointing_pose(landmarks: Option<&PoseLandmarks>, cfg: &DipConfig) -> GateStatus {
    let Some(lm) = landmarks else {
        return GateStatus::NoPose;
    };
    if lm.elbow_conf < cfg.min_conf || lm.wrist_conf < cfg.min_conf {
        return GateStatus::LowConfidence;
    }
    if !lm.elbow.is_finite() || !lm.wrist.is_finite() {
        return GateStatus::NotPointing;
    }
    if lm.wrist.distance(lm.elbow) < cfg.min_forearm {
        return GateStatus::NotPointing;
    }
    GateStatus::Ok
}

/// Everything one frame produced. Stages degrade independently: a passing
/// gate with a degenerate triangle still reports the ray; an empty scan
/// region reports the triangle with no detection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameResult {
    pub frame_id: u64,
    pub gate: GateStatus,
    pub ray: Option<PointingRay>,
    pub aoi: Option<Triangle>,
    pub detection: Option<Detection>,
    pub elapsed_ms: f64,
}

/// Runs the full single-frame pipeline.
pub fn run_frame(
    frame_id: u64,
    frame: &ImageBuffer,
    landmarks: Option<&PoseLandmarks>,
    cfg: &DipConfig,
) -> FrameResult {
    let start = Instant::now();
    let mut result = FrameResult {
        frame_id,
        gate: is_pointing_pose(landmarks, cfg),
        ray: None,
        aoi: None,
        detection: None,
        elapsed_ms: 0.0,
    };
    if result.gate != GateStatus::Ok {
        result.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        return result;
    }
    let lm = landmarks.expect("gate passed");
    match PointingRay::new(lm.elbow, lm.wrist, cfg.sf) {
        Ok(ray) => result.ray = Some(ray),
        Err(_) => {
            // coincident joints that slipped past the forearm gate
            result.gate = GateStatus::NotPointing;
            result.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            return result;
        }
    }
    let ray = result.ray.as_ref().expect("just set");
    let built = if cfg.perpendicular_mode {
        build_area_of_interest_perpendicular(ray.wrist, ray.ext, cfg.c, cfg.eps)
    } else {
        build_area_of_interest(ray.wrist, ray.ext, cfg.c, cfg.eps)
    };
    match built {
        Ok(aoi) => result.aoi = Some(aoi),
        // degenerate triangle: the ray stands on its own
        Err(_) => {
            result.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            return result;
        }
    }
    let aoi = result.aoi.as_ref().expect("just set");
    // an off-frame AOI is a per-frame miss, not a pipeline failure
    result.detection = locate_object(frame, aoi, cfg.strategy, &cfg.detector)
        .ok()
        .flatten();
    result.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    result
}

/// One frame of session input.
#[derive(Debug, Clone)]
pub struct FrameInput {
    pub frame_id: u64,
    pub frame: ImageBuffer,
    pub landmarks: Option<PoseLandmarks>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Still waiting for a detection streak.
    Detecting,
    /// Target confirmed; tracker unavailable or disabled.
    Confirmed,
    /// Target confirmed and the tracker is following it.
    Tracking,
    /// Tracker reported the target lost.
    Lost,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackEvent {
    pub frame_id: u64,
    pub window: Option<Rect>,
    pub lost: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionState {
    pub phase: Phase,
    pub confirmed_detection: Option<Detection>,
    pub frames_processed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionOutcome {
    pub state: SessionState,
    /// Frame on which the detection streak reached `confirm_frames`.
    pub confirmed_frame: Option<u64>,
    /// Per-frame pipeline results up to and including the confirming frame.
    pub results: Vec<FrameResult>,
    /// Tracker windows for frames after confirmation.
    pub tracking: Vec<TrackEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionOptions {
    /// Hand the confirmed detection to the tracker and keep consuming
    /// frames. When false the session stops at confirmation.
    pub track: bool,
    pub tracker: TrackerParams,
}

impl Default for SessionOptions {
    fn default() -> Self {
        Self {
            track: true,
            tracker: TrackerParams::default(),
        }
    }
}

/// Drives the pipeline over a frame stream: detect on every frame until
/// `confirm_frames` consecutive detections, then either stop or follow the
/// target with the tracker until the stream ends or the target is lost.
///
/// Input errors (`E`) abort and propagate; per-frame pipeline misses do
/// not.
pub fn run_session<E>(
    inputs: impl IntoIterator<Item = Result<FrameInput, E>>,
    cfg: &DipConfig,
    opts: &SessionOptions,
) -> Result<SessionOutcome, E> {
    let mut results = Vec::new();
    let mut tracking = Vec::new();
    let mut streak = 0u32;
    let mut phase = Phase::Detecting;
    let mut confirmed: Option<Detection> = None;
    let mut confirmed_frame = None;
    let mut tracker: Option<TrackerState> = None;
    let mut frames = 0u64;

    for input in inputs {
        let input = input?;
        frames += 1;
        match phase {
            Phase::Detecting => {
                let result = run_frame(input.frame_id, &input.frame, input.landmarks.as_ref(), cfg);
                let detection = result.detection;
                results.push(result);
                if let Some(det) = detection {
                    streak += 1;
                    if streak >= cfg.confirm_frames {
                        confirmed = Some(det);
                        confirmed_frame = Some(input.frame_id);
                        if !opts.track {
                            phase = Phase::Confirmed;
                            break;
                        }
                        match init_tracker(&input.frame, &det.bbox, opts.tracker.bins) {
                            Ok(state) => {
                                phase = Phase::Tracking;
                                tracker = Some(state);
                            }
                            Err(_) => {
                                // confirmation stands even if the tracker
                                // cannot model the target's color
                                phase = Phase::Confirmed;
                                break;
                            }
                        }
                    }
                } else {
                    streak = 0;
                }
            }
            Phase::Tracking => {
                let state = tracker.as_mut().expect("tracking phase");
                match track(state, &input.frame, &opts.tracker) {
                    Ok(window) => tracking.push(TrackEvent {
                        frame_id: input.frame_id,
                        window: Some(window),
                        lost: false,
                    }),
                    Err(TrackingError::TargetLost) | Err(TrackingError::EmptyWindow) => {
                        tracking.push(TrackEvent {
                            frame_id: input.frame_id,
                            window: None,
                            lost: true,
                        });
                        phase = Phase::Lost;
                        break;
                    }
                }
            }
            Phase::Confirmed | Phase::Lost => break,
        }
    }

    Ok(SessionOutcome {
        state: SessionState {
            phase,
            confirmed_detection: confirmed,
            frames_processed: frames,
        },
        confirmed_frame,
        results,
        tracking,
    })
}

/// Overlay colors and sizes for [`annotate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnotateStyle {
    pub forearm: [u8; 3],
    pub ray: [u8; 3],
    pub triangle: [u8; 3],
    pub detection: [u8; 3],
    pub cross_arm: u32,
}

impl Default for AnnotateStyle {
    fn default() -> Self {
        Self {
            forearm: [0, 255, 0],
            ray: [255, 0, 255],
            triangle: [255, 255, 255],
            detection: [255, 255, 0],
            cross_arm: 5,
        }
    }
}

/// Draws a frame result onto a copy of the frame: forearm segment,
/// extended ray, AOI triangle, and detection cross + box. A frame whose
/// gate failed comes back as an unmodified copy.
pub fn annotate(frame: &ImageBuffer, result: &FrameResult, style: &AnnotateStyle) -> ImageBuffer {
    let mut out = frame.clone();
    if result.gate != GateStatus::Ok {
        return out;
    }
    if let Some(ray) = &result.ray {
        draw_line(&mut out, ray.elbow, ray.wrist, style.forearm);
        draw_line(&mut out, ray.wrist, ray.ext, style.ray);
    }
    if let Some(aoi) = &result.aoi {
        draw_triangle_outline(&mut out, aoi, style.triangle);
    }
    if let Some(det) = &result.detection {
        draw_cross(&mut out, det.point, style.cross_arm, style.detection);
        draw_rect_outline(&mut out, &det.bbox, style.detection);
    }
    out
}

/// Draws a tracked window onto a copy of the frame.
pub fn annotate_tracked(frame: &ImageBuffer, window: &Rect, style: &AnnotateStyle) -> ImageBuffer {
    let mut out = frame.clone();
    draw_rect_outline(&mut out, window, style.detection);
    draw_cross(&mut out, window.center(), style.cross_arm, style.detection);
    out
}
