//! Corner-strength response and non-max-suppressed keypoints.

use super::filter::blur_plane;
use super::gradient::sobel_planes;
use super::{ImageBuffer, Plane};
use crate::exec::fill_rows;
use crate::geometry::Point2;

pub const DEFAULT_HARRIS_K: f64 = 0.04;
pub const DEFAULT_WINDOW_SIGMA: f64 = 1.5;

/// A local maximum of the corner response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keypoint {
    pub x: u32,
    pub y: u32,
    pub strength: f32,
}

impl Keypoint {
    pub fn location(&self) -> Point2 {
        Point2::new(self.x as f64, self.y as f64)
    }
}

fn response_impl(gray: &ImageBuffer, k: f64, window_sigma: f64, parallel: bool) -> Plane {
    assert_eq!(gray.channels(), 1, "corner_response expects a gray image");
    let plane = Plane::from_gray(gray);
    let (gx, gy) = sobel_planes(&plane, parallel);
    let (w, h) = (plane.width, plane.height);

    // derivative products on the 8-bit scale (Sobel response / 4)
    let mut ixx = Plane::zeros(w, h);
    let mut iyy = Plane::zeros(w, h);
    let mut ixy = Plane::zeros(w, h);
    fill_rows(&mut ixx.data, w as usize, parallel, |y, row| {
        let base = y * w as usize;
        for (x, out) in row.iter_mut().enumerate() {
            let v = gx.data[base + x] as f64 / 4.0;
            *out = (v * v) as f32;
        }
    });
    fill_rows(&mut iyy.data, w as usize, parallel, |y, row| {
        let base = y * w as usize;
        for (x, out) in row.iter_mut().enumerate() {
            let v = gy.data[base + x] as f64 / 4.0;
            *out = (v * v) as f32;
        }
    });
    fill_rows(&mut ixy.data, w as usize, parallel, |y, row| {
        let base = y * w as usize;
        for (x, out) in row.iter_mut().enumerate() {
            *out = ((gx.data[base + x] as f64 / 4.0) * (gy.data[base + x] as f64 / 4.0)) as f32;
        }
    });

    let sxx = blur_plane(&ixx, window_sigma, parallel);
    let syy = blur_plane(&iyy, window_sigma, parallel);
    let sxy = blur_plane(&ixy, window_sigma, parallel);

    let mut resp = Plane::zeros(w, h);
    fill_rows(&mut resp.data, w as usize, parallel, |y, row| {
        let base = y * w as usize;
        for (x, out) in row.iter_mut().enumerate() {
            let (a, b, c) = (
                sxx.data[base + x] as f64,
                syy.data[base + x] as f64,
                sxy.data[base + x] as f64,
            );
            let det = a * b - c * c;
            let trace = a + b;
            *out = (det - k * trace * trace) as f32;
        }
    });
    resp
}

/// Corner response `det(M) − k·trace(M)²` of the Gaussian-windowed
/// structure tensor, with derivatives on the 8-bit scale.
pub fn corner_response(gray: &ImageBuffer, k: f64, window_sigma: f64) -> Plane {
    response_impl(gray, k, window_sigma, cfg!(feature = "parallel"))
}

/// Sequential reference for [`corner_response`]; identical output.
pub fn corner_response_seq(gray: &ImageBuffer, k: f64, window_sigma: f64) -> Plane {
    response_impl(gray, k, window_sigma, false)
}

/// Local maxima of a response plane above `threshold`, non-max-suppressed
/// within a Chebyshev `nms_radius`, optionally restricted to `mask`.
///
/// Plateaus are broken deterministically: within a radius, a pixel loses to
/// any strictly stronger pixel and to an equal-strength pixel of smaller
/// (y, x). The mask filters *after* suppression, so masked output equals
/// the unmasked output filtered to the mask.
pub fn detect_keypoints_with(
    resp: &Plane,
    threshold: f64,
    nms_radius: u32,
    mask: Option<&(dyn Fn(u32, u32) -> bool + Sync)>,
) -> Vec<Keypoint> {
    let (w, h) = (resp.width as i64, resp.height as i64);
    let r = nms_radius as i64;
    let mut found = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let m = resp.data[(y * w + x) as usize];
            if (m as f64) <= threshold {
                continue;
            }
            let mut wins = true;
            'scan: for qy in (y - r).max(0)..=(y + r).min(h - 1) {
                for qx in (x - r).max(0)..=(x + r).min(w - 1) {
                    if qx == x && qy == y {
                        continue;
                    }
                    let q = resp.data[(qy * w + qx) as usize];
                    if q > m || (q == m && (qy, qx) < (y, x)) {
                        wins = false;
                        break 'scan;
                    }
                }
            }
            if wins {
                if let Some(f) = mask {
                    if !f(x as u32, y as u32) {
                        continue;
                    }
                }
                found.push(Keypoint {
                    x: x as u32,
                    y: y as u32,
                    strength: m,
                });
            }
        }
    }
    found.sort_by(|a, b| {
        b.strength
            .total_cmp(&a.strength)
            .then(a.y.cmp(&b.y))
            .then(a.x.cmp(&b.x))
    });
    found
}

/// [`detect_keypoints_with`] over [`corner_response`] at default `k` and
/// window sigma.
pub fn detect_keypoints(
    gray: &ImageBuffer,
    threshold: f64,
    nms_radius: u32,
    mask: Option<&(dyn Fn(u32, u32) -> bool + Sync)>,
) -> Vec<Keypoint> {
    let resp = corner_response(gray, DEFAULT_HARRIS_K, DEFAULT_WINDOW_SIGMA);
    detect_keypoints_with(&resp, threshold, nms_radius, mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Four-quadrant checkerboard junction at (cx−0.5, cy−0.5).
    pub(crate) fn junction_scene(w: u32, h: u32, cx: u32, cy: u32) -> ImageBuffer {
        let data: Vec<u8> = (0..w * h)
            .map(|i| {
                let (x, y) = (i % w, i / w);
                if (x < cx) ^ (y < cy) {
                    255
                } else {
                    0
                }
            })
            .collect();
        ImageBuffer::new(w, h, 1, data).unwrap()
    }

    #[test]
    fn constant_image_has_zero_response() {
        let resp = corner_response(&ImageBuffer::filled(24, 24, 1, 140), 0.04, 1.5);
        assert!(resp.data.iter().all(|&v| v == 0.0));
        assert!(detect_keypoints(&ImageBuffer::filled(24, 24, 1, 140), 1.0, 5, None).is_empty());
    }

    #[test]
    fn straight_edge_response_is_non_positive() {
        let data: Vec<u8> = (0..40u32 * 40)
            .map(|i| if i % 40 >= 20 { 255 } else { 0 })
            .collect();
        let img = ImageBuffer::new(40, 40, 1, data).unwrap();
        let resp = corner_response(&img, 0.04, 1.5);
        for y in 10..30 {
            for x in 18..23 {
                assert!(resp.get(x, y) <= 1e-2, "({x},{y}): {}", resp.get(x, y));
            }
        }
    }

    #[test]
    fn junction_is_a_positive_local_max() {
        let img = junction_scene(40, 40, 20, 20);
        let resp = corner_response(&img, 0.04, 1.5);
        let (mut bx, mut by, mut bv) = (0, 0, f32::MIN);
        for y in 0..40 {
            for x in 0..40 {
                if resp.get(x, y) > bv {
                    bv = resp.get(x, y);
                    (bx, by) = (x, y);
                }
            }
        }
        assert!(bv > 0.0);
        assert!(
            (bx as f64 - 19.5).abs() <= 1.0 && (by as f64 - 19.5).abs() <= 1.0,
            "peak at ({bx},{by})"
        );

        let kps = detect_keypoints(&img, bv as f64 / 10.0, 5, None);
        assert!(!kps.is_empty());
        assert_eq!((kps[0].x, kps[0].y), (bx, by));
    }

    #[test]
    fn mask_restricts_after_suppression() {
        // two junctions side by side
        let mut img = junction_scene(80, 40, 20, 20);
        let right = junction_scene(80, 40, 60, 20);
        for y in 0..40 {
            for x in 40..80 {
                img.put_pixel(x, y, &[right.sample(x, y, 0)]);
            }
        }
        let resp = corner_response(&img, 0.04, 1.5);
        let all = detect_keypoints_with(&resp, 1e5, 5, None);
        let left_mask = |x: u32, _y: u32| x < 40;
        let masked = detect_keypoints_with(&resp, 1e5, 5, Some(&left_mask));
        let filtered: Vec<_> = all.iter().copied().filter(|k| k.x < 40).collect();
        assert_eq!(masked, filtered);
        assert!(masked.iter().any(|k| (k.x as i64 - 20).abs() <= 2));
        assert!(masked.iter().all(|k| k.x < 40));
    }

    #[test]
    fn detection_is_deterministic() {
        let img = junction_scene(64, 64, 31, 33);
        let a = detect_keypoints(&img, 1e5, 5, None);
        let b = detect_keypoints(&img, 1e5, 5, None);
        assert_eq!(a, b);
        let seq = detect_keypoints_with(
            &corner_response_seq(&img, DEFAULT_HARRIS_K, DEFAULT_WINDOW_SIGMA),
            1e5,
            5,
            None,
        );
        assert_eq!(a, seq);
    }
}
