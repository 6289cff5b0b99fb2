//! Canny edge detection: blur, Sobel, direction-quantized non-max
//! suppression, double-threshold hysteresis with 8-connectivity.

use super::filter::blur_plane;
use super::gradient::gradients_impl;
use super::{ImageBuffer, Plane};
use crate::exec::fill_rows;
use std::collections::VecDeque;
use std::f32::consts::PI;

/// Canny thresholds on the 8-bit magnitude scale plus the blur sigma.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CannyParams {
    pub low: f64,
    pub high: f64,
    pub sigma: f64,
}

impl Default for CannyParams {
    fn default() -> Self {
        Self {
            low: 40.0,
            high: 100.0,
            sigma: 1.4,
        }
    }
}

/// Binary edge map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMap {
    width: u32,
    height: u32,
    pub(crate) data: Vec<bool>,
}

impl EdgeMap {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn is_edge(&self, x: u32, y: u32) -> bool {
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn count_edges(&self) -> usize {
        self.data.iter().filter(|&&e| e).count()
    }

    /// Edge pixel coordinates in row-major order.
    pub fn edge_pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &e)| e)
            .map(move |(i, _)| ((i as u32) % w, (i as u32) / w))
    }
}

/// Intermediate stages kept for hysteresis audits: the final edge map and
/// the post-suppression magnitude plane (zero at suppressed pixels).
#[derive(Debug, Clone)]
pub struct CannyStages {
    pub edges: EdgeMap,
    pub nms_magnitude: Plane,
}

/// Offsets of the two neighbors along the quantized gradient direction,
/// ordered so the first is the lexicographically smaller (dy, dx) pair.
/// The keep rule is strict against the first and non-strict against the
/// second, so exactly one pixel survives on a symmetric two-pixel plateau.
fn sector_neighbors(theta: f32) -> ((i64, i64), (i64, i64)) {
    let d = (theta.rem_euclid(PI)) / PI * 8.0; // eighths of a half-turn
    if d < 1.0 || d >= 7.0 {
        ((-1, 0), (1, 0)) // horizontal gradient: east-west neighbors
    } else if d < 3.0 {
        ((-1, -1), (1, 1)) // gradient toward +x+y
    } else if d < 5.0 {
        ((0, -1), (0, 1)) // vertical gradient: north-south neighbors
    } else {
        ((1, -1), (-1, 1)) // gradient toward -x+y
    }
}

fn canny_impl(plane: &Plane, low: f64, high: f64, sigma: f64, parallel: bool) -> CannyStages {
    assert!(
        0.0 < low && low < high,
        "thresholds must satisfy 0 < low < high"
    );
    let blurred = blur_plane(plane, sigma, parallel);
    let grads = gradients_impl(&blurred, parallel);
    let (w, h) = (plane.width, plane.height);

    let mag_at = |x: i64, y: i64| -> f32 {
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            0.0 // out-of-frame neighbors never suppress border pixels
        } else {
            grads.magnitude.data[y as usize * w as usize + x as usize]
        }
    };

    let mut nms = Plane::zeros(w, h);
    fill_rows(&mut nms.data, w as usize, parallel, |y, row| {
        let y = y as i64;
        for (x, out) in row.iter_mut().enumerate() {
            let x = x as i64;
            let m = grads.magnitude.data[y as usize * w as usize + x as usize];
            if m <= 0.0 {
                continue;
            }
            let theta = grads.direction.data[y as usize * w as usize + x as usize];
            let ((px, py), (nx, ny)) = sector_neighbors(theta);
            if m > mag_at(x + px, y + py) && m >= mag_at(x + nx, y + ny) {
                *out = m;
            }
        }
    });

    // hysteresis: flood from strong pixels through weak ones, 8-connected
    let (wi, hi) = (w as usize, h as usize);
    let mut edges = vec![false; wi * hi];
    let mut queue = VecDeque::new();
    for (i, &m) in nms.data.iter().enumerate() {
        if m as f64 >= high {
            edges[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % wi) as i64, (i / wi) as i64);
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                let (qx, qy) = (x + dx, y + dy);
                if qx < 0 || qy < 0 || qx >= w as i64 || qy >= h as i64 {
                    continue;
                }
                let j = qy as usize * wi + qx as usize;
                if !edges[j] && nms.data[j] as f64 >= low {
                    edges[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }

    CannyStages {
        edges: EdgeMap {
            width: w,
            height: h,
            data: edges,
        },
        nms_magnitude: nms,
    }
}

fn gray_plane(gray: &ImageBuffer) -> Plane {
    assert_eq!(gray.channels(), 1, "canny expects a gray image");
    Plane::from_gray(gray)
}

/// Canny edges of a gray image. Magnitude thresholds are on the 8-bit
/// scale (a full-contrast axis-aligned step peaks near 255).
pub fn canny(gray: &ImageBuffer, low: f64, high: f64, sigma: f64) -> EdgeMap {
    canny_impl(
        &gray_plane(gray),
        low,
        high,
        sigma,
        cfg!(feature = "parallel"),
    )
    .edges
}

/// Sequential reference for [`canny`]; identical output.
pub fn canny_seq(gray: &ImageBuffer, low: f64, high: f64, sigma: f64) -> EdgeMap {
    canny_impl(&gray_plane(gray), low, high, sigma, false).edges
}

/// [`canny`] plus the suppressed-magnitude plane for audits.
pub fn canny_stages(gray: &ImageBuffer, low: f64, high: f64, sigma: f64) -> CannyStages {
    canny_impl(
        &gray_plane(gray),
        low,
        high,
        sigma,
        cfg!(feature = "parallel"),
    )
}
