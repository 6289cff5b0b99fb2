//! Hue-histogram tracker with mean-shift window relocation and adaptive
//! sizing, plus the PID approach controller it feeds.

use crate::geometry::{Point2, Rect};
use crate::imaging::{back_project, hue_histogram, HueHistogram, ImageBuffer, DEFAULT_HUE_BINS};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrackingError {
    /// The seed window held no chromatic pixels to model.
    #[error("seed window holds no chromatic pixels")]
    EmptyWindow,
    /// Back-projection density in the final window fell below the loss
    /// threshold.
    #[error("target lost")]
    TargetLost,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackerParams {
    pub bins: usize,
    /// Mean back-projection density below which the target counts as lost.
    pub lost_threshold: f64,
    pub max_iterations: u32,
    /// Smallest window side after adaptation, in pixels.
    pub min_window: f64,
}

impl Default for TrackerParams {
    fn default() -> Self {
        Self {
            bins: DEFAULT_HUE_BINS,
            lost_threshold: 0.05,
            max_iterations: 10,
            min_window: 8.0,
        }
    }
}

/// Tracker state: the appearance model, the current window, and the last
/// observed density.
#[derive(Debug, Clone)]
pub struct TrackerState {
    histogram: HueHistogram,
    window: Rect,
    last_density: f64,
}

impl TrackerState {
    pub fn window(&self) -> Rect {
        self.window
    }

    pub fn last_density(&self) -> f64 {
        self.last_density
    }

    pub fn histogram(&self) -> &HueHistogram {
        &self.histogram
    }
}

/// Moments of a back-projection plane over the integer pixels of a window.
fn window_moments(bp: &crate::imaging::Plane, window: &Rect) -> (f64, f64, f64, f64) {
    let x0 = window.x_min.ceil().max(0.0) as u32;
    let y0 = window.y_min.ceil().max(0.0) as u32;
    let x1 = window.x_max.floor().min(bp.width as f64 - 1.0).max(0.0) as u32;
    let y1 = window.y_max.floor().min(bp.height as f64 - 1.0).max(0.0) as u32;
    let (mut m00, mut m10, mut m01, mut count) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for y in y0..=y1 {
        for x in x0..=x1 {
            let p = bp.get(x, y) as f64;
            m00 += p;
            m10 += p * x as f64;
            m01 += p * y as f64;
            count += 1.0;
        }
    }
    (m00, m10, m01, count)
}

/// Square window of side `side` centered at `center`, shifted (and if
/// necessary shrunk) to lie inside the frame.
fn fitted_window(center: Point2, side_x: f64, side_y: f64, w: u32, h: u32) -> Rect {
    let side_x = side_x.min(w as f64 - 1.0);
    let side_y = side_y.min(h as f64 - 1.0);
    let x_min = (center.x - side_x / 2.0).clamp(0.0, w as f64 - 1.0 - side_x);
    let y_min = (center.y - side_y / 2.0).clamp(0.0, h as f64 - 1.0 - side_y);
    Rect::new(x_min, y_min, x_min + side_x, y_min + side_y)
}

/// Builds a tracker from the object's seed box: hue histogram over the box,
/// window = box. Fails with `EmptyWindow` when the box yields an all-zero
/// histogram (gray frame or achromatic region).
pub fn init_tracker(
    frame: &ImageBuffer,
    bbox: &Rect,
    bins: usize,
) -> Result<TrackerState, TrackingError> {
    if frame.channels() != 3 {
        return Err(TrackingError::EmptyWindow);
    }
    let histogram = hue_histogram(frame, bbox, bins).map_err(|_| TrackingError::EmptyWindow)?;
    if histogram.is_empty() {
        return Err(TrackingError::EmptyWindow);
    }
    let bp = back_project(frame, &histogram);
    let (m00, _, _, count) = window_moments(&bp, bbox);
    Ok(TrackerState {
        histogram,
        window: *bbox,
        last_density: if count > 0.0 { m00 / count } else { 0.0 },
    })
}

/// One tracking step: mean-shift the window over the frame's
/// back-projection until the centroid moves less than a pixel (capped at
/// `max_iterations`), adapt the window side to `2·sqrt(M00/256)` on the
/// 8-bit mass scale, then verify density against `lost_threshold`.
///
/// On success the state's window is updated and returned. On `TargetLost`
/// the previous window is kept so a caller may retry on a later frame.
pub fn track(
    state: &mut TrackerState,
    frame: &ImageBuffer,
    params: &TrackerParams,
) -> Result<Rect, TrackingError> {
    assert_eq!(frame.channels(), 3, "track expects an RGB frame");
    let (w, h) = (frame.width(), frame.height());
    let bp = back_project(frame, &state.histogram);

    let mut window = state.window;
    let mut m00 = 0.0;
    for _ in 0..params.max_iterations {
        let (m, m10, m01, _) = window_moments(&bp, &window);
        m00 = m;
        if m00 <= 0.0 {
            break;
        }
        let center = Point2::new(m10 / m00, m01 / m00);
        let shifted = fitted_window(center, window.width(), window.height(), w, h);
        let moved = shifted.center().distance(window.center());
        window = shifted;
        if moved < 1.0 {
            break;
        }
    }

    // adapt: window mass on the 8-bit scale sets the new square side
    let side =
        (2.0 * ((255.0 * m00) / 256.0).sqrt()).clamp(params.min_window, (w.min(h) - 1) as f64);
    let adapted = fitted_window(window.center(), side, side, w, h);

    let (m00_f, _, _, count) = window_moments(&bp, &adapted);
    let density = if count > 0.0 { m00_f / count } else { 0.0 };
    state.last_density = density;
    if density < params.lost_threshold {
        return Err(TrackingError::TargetLost);
    }
    state.window = adapted;
    Ok(adapted)
}

/// One PID channel with rectangular integration and anti-windup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidState {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub output_limit: f64,
    integral: f64,
    prev_error: f64,
}

impl PidState {
    pub fn new(kp: f64, ki: f64, kd: f64, output_limit: f64) -> Self {
        assert!(output_limit > 0.0);
        Self {
            kp,
            ki,
            kd,
            output_limit,
            integral: 0.0,
            prev_error: 0.0,
        }
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }
}

/// One discrete PID step:
/// `out = clamp(kp·e + ki·∫e + kd·(e − e_prev)/dt)` with the integral
/// accumulated rectangularly and clamped to `output_limit/ki`.
pub fn pid_step(state: &mut PidState, error: f64, dt: f64) -> f64 {
    assert!(dt > 0.0, "dt must be positive");
    state.integral += error * dt;
    if state.ki > 0.0 {
        let cap = state.output_limit / state.ki;
        state.integral = state.integral.clamp(-cap, cap);
    }
    let derivative = (error - state.prev_error) / dt;
    state.prev_error = error;
    let raw = state.kp * error + state.ki * state.integral + state.kd * derivative;
    raw.clamp(-state.output_limit, state.output_limit)
}

/// The three control channels of the approach loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproachPids {
    pub yaw: PidState,
    pub pitch: PidState,
    pub surge: PidState,
}

impl Default for ApproachPids {
    fn default() -> Self {
        Self {
            yaw: PidState::new(0.6, 0.05, 0.1, 1.0),
            // vertical channel ships zero-gain: approach behavior only
            pitch: PidState::new(0.0, 0.0, 0.0, 1.0),
            surge: PidState::new(0.6, 0.05, 0.1, 1.0),
        }
    }
}

/// Normalized actuator commands, each in [−1, 1]. Negative yaw turns left,
/// positive surge advances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproachCommand {
    pub yaw: f64,
    pub pitch: f64,
    pub surge: f64,
}

/// Maps the tracked window to actuator commands: yaw and pitch follow the
/// window center's normalized offset from the frame center, surge follows
/// the gap between `target_ratio` and the window's share of the frame area.
pub fn approach_command(
    bbox: &Rect,
    frame_w: u32,
    frame_h: u32,
    target_ratio: f64,
    pids: &mut ApproachPids,
    dt: f64,
) -> ApproachCommand {
    assert!((0.0..1.0).contains(&target_ratio) && target_ratio > 0.0);
    let (w, h) = (frame_w as f64, frame_h as f64);
    let center = bbox.center();
    let yaw_e = (center.x - w / 2.0) / (w / 2.0);
    let pitch_e = (center.y - h / 2.0) / (h / 2.0);
    let surge_e = target_ratio - bbox.area() / (w * h);
    ApproachCommand {
        yaw: pid_step(&mut pids.yaw, yaw_e, dt).clamp(-1.0, 1.0),
        pitch: pid_step(&mut pids.pitch, pitch_e, dt).clamp(-1.0, 1.0),
        surge: pid_step(&mut pids.surge, surge_e, dt).clamp(-1.0, 1.0),
    }
}
