//! Closed-loop approach simulator: a planar unicycle robot with a forward
//! camera, a rendered chromatic disk target, and the tracker + PID loop
//! driving the robot toward it.
//!
//! World frame matches the image convention: x right, y down, heading
//! measured from +x toward +y, so a positive yaw command turns the camera
//! toward larger image x.

use crate::detection::{locate_object, DetectorParams, LocateStrategy};
use crate::exec::fill_rows;
use crate::geometry::{build_area_of_interest, Point2};
use crate::imaging::{CannyParams, ImageBuffer};
use crate::tracking::{approach_command, init_tracker, track, ApproachPids, TrackerParams};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotPose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

/// A static scene: one disk-shaped chromatic object on a noisy gray
/// background, viewed by the robot's pinhole-like camera.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimScene {
    pub object_pos: Point2,
    /// World-space disk diameter.
    pub object_size: f64,
    pub object_color: [u8; 3],
    pub robot_start: RobotPose,
    /// Base background gray level.
    pub background: u8,
    /// Half-range of the deterministic per-pixel background noise.
    pub noise: u8,
    /// Focal length in pixels.
    pub focal: f64,
    pub width: u32,
    pub height: u32,
    pub seed: u64,
    /// Step at which the object disappears from view, if any.
    pub vanish_step: Option<u32>,
}

impl Default for SimScene {
    fn default() -> Self {
        Self {
            object_pos: Point2::new(2.5, 0.0),
            object_size: 0.5,
            object_color: [250, 80, 80],
            robot_start: RobotPose {
                x: 0.0,
                y: 0.0,
                heading: 0.0,
            },
            background: 40,
            noise: 10,
            focal: 320.0,
            width: 640,
            height: 480,
            seed: 7,
            vanish_step: None,
        }
    }
}

impl SimScene {
    /// Parses the plain-text `key = value` scene format. Unknown keys are
    /// rejected; omitted keys keep their defaults. `object_color` is
    /// `r,g,b`.
    pub fn from_key_values(text: &str) -> Result<SimScene, String> {
        let mut scene = SimScene::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected 'key = value'", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| format!("line {}: invalid {what} '{value}'", lineno + 1);
            let num = |field: &mut f64| -> Result<(), String> {
                *field = value.parse().map_err(|_| bad(key))?;
                Ok(())
            };
            match key {
                "object_x" => num(&mut scene.object_pos.x)?,
                "object_y" => num(&mut scene.object_pos.y)?,
                "object_size" => num(&mut scene.object_size)?,
                "robot_x" => num(&mut scene.robot_start.x)?,
                "robot_y" => num(&mut scene.robot_start.y)?,
                "robot_heading" => num(&mut scene.robot_start.heading)?,
                "focal" => num(&mut scene.focal)?,
                "object_color" => {
                    let parts: Vec<_> = value.split(',').map(str::trim).collect();
                    if parts.len() != 3 {
                        return Err(bad(key));
                    }
                    for (i, p) in parts.iter().enumerate() {
                        scene.object_color[i] = p.parse().map_err(|_| bad(key))?;
                    }
                }
                "background" => scene.background = value.parse().map_err(|_| bad(key))?,
                "noise" => scene.noise = value.parse().map_err(|_| bad(key))?,
                "width" => scene.width = value.parse().map_err(|_| bad(key))?,
                "height" => scene.height = value.parse().map_err(|_| bad(key))?,
                "seed" => scene.seed = value.parse().map_err(|_| bad(key))?,
                "vanish_step" => scene.vanish_step = Some(value.parse().map_err(|_| bad(key))?),
                other => return Err(format!("line {}: unknown key '{other}'", lineno + 1)),
            }
        }
        if scene.object_size <= 0.0 || scene.focal <= 0.0 {
            return Err("object_size and focal must be positive".into());
        }
        if scene.width == 0 || scene.height == 0 {
            return Err("frame dimensions must be positive".into());
        }
        Ok(scene)
    }
}

/// Loop tuning: kinematic limits, control gains, convergence window, and
/// the detector used to seed the tracker on the first frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub dt: f64,
    pub v_max: f64,
    pub omega_max: f64,
    pub target_ratio: f64,
    pub max_steps: u32,
    /// Convergence band as a fraction of `target_ratio`.
    pub converge_tol: f64,
    /// Consecutive in-band steps required to declare convergence.
    pub converge_steps: u32,
    pub pids: ApproachPids,
    pub tracker: TrackerParams,
    pub detector: DetectorParams,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            dt: 0.1,
            v_max: 1.5,
            omega_max: 1.0,
            target_ratio: 0.15,
            max_steps: 500,
            converge_tol: 0.10,
            converge_steps: 10,
            pids: ApproachPids::default(),
            tracker: TrackerParams::default(),
            // rendered contrast is gentler than the planted test scenes,
            // so the seeding detector runs with softer edge thresholds
            detector: DetectorParams {
                canny: CannyParams {
                    low: 15.0,
                    high: 40.0,
                    sigma: 1.4,
                },
                ..DetectorParams::default()
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "step")]
pub enum SimOutcome {
    Converged(u32),
    Lost(u32),
    Timeout,
}

/// One logged control step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub step: u32,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub bbox_x: f64,
    pub bbox_y: f64,
    pub bbox_w: f64,
    pub bbox_h: f64,
    pub yaw: f64,
    pub pitch: f64,
    pub surge: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub outcome: SimOutcome,
    pub trajectory: Vec<TrajectoryRow>,
}

/// Deterministic per-pixel noise in `[-amplitude, amplitude]`.
fn noise_at(seed: u64, step: u32, x: u32, y: u32, amplitude: u8) -> i32 {
    if amplitude == 0 {
        return 0;
    }
    let mut z = seed
        ^ (step as u64).wrapping_mul(0x9E3779B97F4A7C15)
        ^ (y as u64).wrapping_mul(0xD1B54A32D192ED03)
        ^ (x as u64).wrapping_mul(0x8CB92BA72F3D8DD7);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^= z >> 31;
    let span = 2 * amplitude as i32 + 1;
    (z % span as u64) as i32 - amplitude as i32
}

/// Projection of the object into the camera at `robot`: image center x,
/// disk pixel radius, and whether it is in front of the camera.
fn project(scene: &SimScene, robot: &RobotPose) -> Option<(f64, f64, f64)> {
    let to_obj = scene.object_pos - Point2::new(robot.x, robot.y);
    let dist = to_obj.norm();
    if dist < 1e-6 {
        return None;
    }
    let bearing = {
        let raw = to_obj.y.atan2(to_obj.x) - robot.heading;
        (raw + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI
    };
    if bearing.abs() >= FRAC_PI_2 - 0.05 {
        return None; // behind or at the side of the camera
    }
    let cx = scene.width as f64 / 2.0 + scene.focal * bearing.tan();
    let axial = dist * bearing.cos();
    let radius = scene.focal * (scene.object_size / 2.0) / axial;
    Some((cx, radius, dist))
}

/// Renders the scene as viewed from `robot` at `step`. The object is a
/// filled disk at the camera's horizon line; the background is gray with
/// deterministic noise.
pub fn render_frame(scene: &SimScene, robot: &RobotPose, step: u32) -> ImageBuffer {
    let (w, h) = (scene.width, scene.height);
    let mut data = vec![0u8; w as usize * h as usize * 3];
    let (seed, base, amp) = (scene.seed, scene.background as i32, scene.noise);
    fill_rows(
        &mut data,
        w as usize * 3,
        cfg!(feature = "parallel"),
        |y, row| {
            for x in 0..w {
                let v = (base + noise_at(seed, step, x, y as u32, amp)).clamp(0, 255) as u8;
                let i = x as usize * 3;
                row[i] = v;
                row[i + 1] = v;
                row[i + 2] = v;
            }
        },
    );
    let mut frame = ImageBuffer::new(w, h, 3, data).expect("computed shape");

    let vanished = scene.vanish_step.is_some_and(|v| step >= v);
    if vanished {
        return frame;
    }
    if let Some((cx, radius, _)) = project(scene, robot) {
        let cy = h as f64 / 2.0;
        let x0 = ((cx - radius).floor().max(0.0)) as u32;
        let x1 = ((cx + radius).ceil().min(w as f64 - 1.0)) as u32;
        let y0 = ((cy - radius).floor().max(0.0)) as u32;
        let y1 = ((cy + radius).ceil().min(h as f64 - 1.0)) as u32;
        if x0 <= x1 && y0 <= y1 {
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                    if dx * dx + dy * dy <= radius * radius {
                        frame.put_pixel(x, y, &scene.object_color);
                    }
                }
            }
        }
    }
    frame
}

/// Seeds the tracker by running the object detector over a frame-spanning
/// area of interest on the first frame, then closes the loop: render,
/// track, command, integrate unicycle kinematics. Convergence is the size
/// ratio staying within `converge_tol·target_ratio` for `converge_steps`
/// consecutive steps.
pub fn simulate_approach(scene: &SimScene, params: &SimParams) -> SimResult {
    simulate_with_observer(scene, params, |_, _| {})
}

/// [`simulate_approach`] with a per-frame observer (step, rendered frame),
/// called for every frame including the seeding one.
pub fn simulate_with_observer(
    scene: &SimScene,
    params: &SimParams,
    mut observe: impl FnMut(u32, &ImageBuffer),
) -> SimResult {
    let mut robot = scene.robot_start;
    let mut trajectory = Vec::new();
    let (w, h) = (scene.width, scene.height);

    let frame = render_frame(scene, &robot, 0);
    observe(0, &frame);
    // a triangle spanning nearly the whole frame stands in for a pointing
    // gesture at the target
    let aoi = build_area_of_interest(
        Point2::new(4.0, h as f64 / 2.0),
        Point2::new(w as f64 - 4.0, h as f64 / 2.0),
        h as f64 / 2.0 - 4.0,
        2.0,
    )
    .expect("frame-spanning triangle");
    let seed_detection =
        match locate_object(&frame, &aoi, LocateStrategy::Contour, &params.detector) {
            Ok(Some(d)) => d,
            _ => {
                return SimResult {
                    outcome: SimOutcome::Lost(0),
                    trajectory,
                }
            }
        };
    let mut tracker = match init_tracker(&frame, &seed_detection.bbox, params.tracker.bins) {
        Ok(t) => t,
        Err(_) => {
            return SimResult {
                outcome: SimOutcome::Lost(0),
                trajectory,
            }
        }
    };

    let mut pids = params.pids;
    let mut streak = 0u32;
    for step in 1..=params.max_steps {
        let frame = render_frame(scene, &robot, step);
        observe(step, &frame);
        let window = match track(&mut tracker, &frame, &params.tracker) {
            Ok(wdw) => wdw,
            Err(_) => {
                return SimResult {
                    outcome: SimOutcome::Lost(step),
                    trajectory,
                };
            }
        };
        let cmd = approach_command(&window, w, h, params.target_ratio, &mut pids, params.dt);
        robot.heading += cmd.yaw * params.dt * params.omega_max;
        let advance = cmd.surge * params.dt * params.v_max;
        robot.x += advance * robot.heading.cos();
        robot.y += advance * robot.heading.sin();

        let ratio = window.area() / (w as f64 * h as f64);
        trajectory.push(TrajectoryRow {
            step,
            x: robot.x,
            y: robot.y,
            heading: robot.heading,
            bbox_x: window.x_min,
            bbox_y: window.y_min,
            bbox_w: window.width(),
            bbox_h: window.height(),
            yaw: cmd.yaw,
            pitch: cmd.pitch,
            surge: cmd.surge,
            ratio,
        });

        if (ratio - params.target_ratio).abs() <= params.converge_tol * params.target_ratio {
            streak += 1;
            if streak >= params.converge_steps {
                return SimResult {
                    outcome: SimOutcome::Converged(step),
                    trajectory,
                };
            }
        } else {
            streak = 0;
        }
    }
    SimResult {
        outcome: SimOutcome::Timeout,
        trajectory,
    }
}
