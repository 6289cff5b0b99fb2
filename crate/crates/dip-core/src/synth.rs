//! Synthetic scenes for evaluation and stress testing: pointing corpora
//! with known object boxes, and moving-blob sequences for the tracker.

use crate::detection::Detection;
use crate::eval::GroundTruth;
use crate::exec::map_indexed;
use crate::geometry::{build_area_of_interest, point_in_triangle, Point2, Rect, Triangle};
use crate::imaging::ImageBuffer;
use crate::pipeline::{run_frame, Arm, DipConfig, FrameResult, PoseLandmarks};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FRAME_W: u32 = 640;
const FRAME_H: u32 = 480;
const BG_LEVEL: u8 = 25;
const BG_NOISE: u8 = 8;
const SQUARE_LEVEL: u8 = 255;

/// One generated frame: the image, its landmark record (absent on
/// deliberate no-pose frames), and the planted object's ground truth.
#[derive(Debug, Clone)]
pub struct CorpusFrame {
    pub frame: ImageBuffer,
    pub landmarks: Option<PoseLandmarks>,
    pub truth: GroundTruth,
}

fn noise_level(seed: u64, x: u32, y: u32, amplitude: u8) -> i32 {
    if amplitude == 0 {
        return 0;
    }
    let mut z = seed
        ^ (y as u64).wrapping_mul(0xD1B54A32D192ED03)
        ^ (x as u64).wrapping_mul(0x8CB92BA72F3D8DD7);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^= z >> 31;
    let span = 2 * amplitude as i32 + 1;
    (z % span as u64) as i32 - amplitude as i32
}

fn gray_noise_frame(seed: u64, width: u32, height: u32, base: u8, amplitude: u8) -> ImageBuffer {
    let mut frame = ImageBuffer::filled(width, height, 1, base);
    for y in 0..height {
        for x in 0..width {
            let v = (base as i32 + noise_level(seed, x, y, amplitude)).clamp(0, 255) as u8;
            frame.put_pixel(x, y, &[v]);
        }
    }
    frame
}

/// A pose whose AOI is known to fit a square of side `side` at `center`.
struct Placement {
    landmarks: PoseLandmarks,
    center: Point2,
    side: f64,
}

fn box_fits(center: Point2, side: f64, aoi: &Triangle) -> bool {
    let half = side / 2.0;
    let margin = 2.0;
    if center.x - half < margin
        || center.y - half < margin
        || center.x + half > FRAME_W as f64 - 1.0 - margin
        || center.y + half > FRAME_H as f64 - 1.0 - margin
    {
        return false;
    }
    [
        Point2::new(center.x - half, center.y - half),
        Point2::new(center.x + half, center.y - half),
        Point2::new(center.x - half, center.y + half),
        Point2::new(center.x + half, center.y + half),
    ]
    .iter()
    .all(|p| point_in_triangle(*p, aoi))
}

fn sample_placement(rng: &mut ChaCha8Rng, frame_id: u64, cfg: &DipConfig) -> Placement {
    for _ in 0..64 {
        let elbow = Point2::new(
            rng.random_range(60.0..140.0),
            rng.random_range(180.0..300.0),
        );
        let theta: f64 = rng.random_range(-0.7..0.7);
        let forearm: f64 = rng.random_range(20.0..40.0);
        let wrist = elbow + Point2::new(forearm * theta.cos(), forearm * theta.sin());
        let ext = Point2::new(
            wrist.x + cfg.sf * (wrist.x - elbow.x),
            wrist.y + cfg.sf * (wrist.y - elbow.y),
        );
        let Ok(aoi) = build_area_of_interest(wrist, ext, cfg.c, cfg.eps) else {
            continue;
        };
        let t: f64 = rng.random_range(0.35..0.75);
        let lateral: f64 = rng.random_range(-0.75..0.75);
        let mid = Point2::new(ext.x, ext.y);
        let axis = aoi.apex.scale(1.0 - t) + mid.scale(t);
        let half_width = t * cfg.c;
        let center = Point2::new(axis.x, axis.y + lateral * half_width);
        let side: f64 = rng.random_range(24.0..40.0);
        let side = side.round();
        if box_fits(center, side, &aoi) {
            return Placement {
                landmarks: PoseLandmarks {
                    frame_id,
                    arm: Arm::Right,
                    elbow,
                    wrist,
                    elbow_conf: 0.9,
                    wrist_conf: 0.9,
                },
                center,
                side,
            };
        }
    }
    // guaranteed-fit fallback: horizontal pose through the frame center
    let elbow = Point2::new(100.0, 240.0);
    let wrist = Point2::new(130.0, 240.0);
    Placement {
        landmarks: PoseLandmarks {
            frame_id,
            arm: Arm::Right,
            elbow,
            wrist,
            elbow_conf: 0.9,
            wrist_conf: 0.9,
        },
        center: Point2::new(330.0, 240.0),
        side: 30.0,
    }
}

/// Generates `n` frames with a planted bright square inside each pose's
/// area of interest. Every 16th frame carries no pose (and is marked
/// pose-incorrect in its ground truth). Generation is deterministic in
/// `seed` and independent per frame.
pub fn corpus(seed: u64, n: usize, cfg: &DipConfig) -> Vec<CorpusFrame> {
    let indices: Vec<usize> = (0..n).collect();
    map_indexed(&indices, cfg!(feature = "parallel"), |_, &i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E3779B97F4A7C15));
        let frame_id = i as u64;
        let placement = sample_placement(&mut rng, frame_id, cfg);
        let no_pose = i % 16 == 15;

        let mut frame = gray_noise_frame(
            seed ^ (i as u64).rotate_left(17),
            FRAME_W,
            FRAME_H,
            BG_LEVEL,
            BG_NOISE,
        );
        let half = placement.side / 2.0;
        let truth_box = Rect {
            x_min: (placement.center.x - half).round(),
            y_min: (placement.center.y - half).round(),
            x_max: (placement.center.x + half).round(),
            y_max: (placement.center.y + half).round(),
        };
        for y in truth_box.y_min as u32..=truth_box.y_max as u32 {
            for x in truth_box.x_min as u32..=truth_box.x_max as u32 {
                frame.put_pixel(x, y, &[SQUARE_LEVEL]);
            }
        }
        CorpusFrame {
            frame,
            landmarks: (!no_pose).then_some(placement.landmarks),
            truth: GroundTruth {
                frame_id,
                object_box: truth_box,
                pose_correct: !no_pose,
            },
        }
    })
}

/// Runs the frame pipeline over a corpus, in parallel when available.
pub fn evaluate_corpus(frames: &[CorpusFrame], cfg: &DipConfig) -> Vec<FrameResult> {
    map_indexed(frames, cfg!(feature = "parallel"), |_, cf| {
        run_frame(cf.truth.frame_id, &cf.frame, cf.landmarks.as_ref(), cfg)
    })
}

/// A tracker stress sequence: a red disk sliding right by `step_px` per
/// frame over noisy gray, with two static non-red chromatic distractors.
/// Returns each frame with the disk's true center (`None` once vanished).
pub fn moving_blob_sequence(
    seed: u64,
    n: usize,
    step_px: f64,
    vanish_at: Option<usize>,
) -> Vec<(ImageBuffer, Option<Point2>)> {
    const W: u32 = 320;
    const H: u32 = 240;
    const RADIUS: f64 = 14.0;
    let indices: Vec<usize> = (0..n).collect();
    map_indexed(&indices, cfg!(feature = "parallel"), |_, &i| {
        let mut frame = ImageBuffer::filled(W, H, 3, 0);
        for y in 0..H {
            for x in 0..W {
                let v = (90 + noise_level(seed ^ ((i as u64) << 32), x, y, 6)).clamp(0, 255) as u8;
                frame.put_pixel(x, y, &[v, v, v]);
            }
        }
        let patch = |frame: &mut ImageBuffer, cx: u32, cy: u32, color: [u8; 3]| {
            for y in cy - 8..cy + 8 {
                for x in cx - 8..cx + 8 {
                    frame.put_pixel(x, y, &color);
                }
            }
        };
        patch(&mut frame, 40, 40, [40, 60, 220]);
        patch(&mut frame, 280, 200, [40, 200, 60]);

        let vanished = vanish_at.is_some_and(|v| i >= v);
        let center = Point2::new(60.0 + step_px * i as f64, 120.0);
        if !vanished {
            let x0 = (center.x - RADIUS).floor().max(0.0) as u32;
            let x1 = (center.x + RADIUS).ceil().min(W as f64 - 1.0) as u32;
            let y0 = (center.y - RADIUS).floor().max(0.0) as u32;
            let y1 = (center.y + RADIUS).ceil().min(H as f64 - 1.0) as u32;
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let (dx, dy) = (x as f64 - center.x, y as f64 - center.y);
                    if dx * dx + dy * dy <= RADIUS * RADIUS {
                        frame.put_pixel(x, y, &[220, 40, 40]);
                    }
                }
            }
        }
        (frame, (!vanished).then_some(center))
    })
}

/// Convenience for tests: the detection produced for a corpus frame, if
/// any.
pub fn detect_on(frame: &CorpusFrame, cfg: &DipConfig) -> Option<Detection> {
    run_frame(
        frame.truth.frame_id,
        &frame.frame,
        frame.landmarks.as_ref(),
        cfg,
    )
    .detection
}
