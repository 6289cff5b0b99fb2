//! 8-connected components of edge pixels with moment centroids.

use super::EdgeMap;
use crate::geometry::{Point2, Rect};

pub const DEFAULT_MIN_AREA: u32 = 20;

/// One connected component of edge pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    /// Member pixels in row-major discovery order.
    pub pixels: Vec<(u32, u32)>,
    /// Arithmetic mean of member pixel coordinates.
    pub centroid: Point2,
    /// Pixel count.
    pub area: u32,
    /// Tight bounding box of the member pixels.
    pub bbox: Rect,
}

/// Extracts 8-connected components with `area >= min_area`, sorted by area
/// descending; ties broken by centroid (y, then x) ascending.
pub fn extract_contours(edges: &EdgeMap, min_area: u32) -> Vec<Contour> {
    let (w, h) = (edges.width() as usize, edges.height() as usize);
    let mut visited = vec![false; w * h];
    let mut contours = Vec::new();

    for start in 0..w * h {
        if !edges.data[start] || visited[start] {
            continue;
        }
        visited[start] = true;
        let mut stack = vec![start];
        let mut pixels = Vec::new();
        while let Some(i) = stack.pop() {
            let (x, y) = ((i % w) as u32, (i / w) as u32);
            pixels.push((x, y));
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    let (qx, qy) = (x as i64 + dx, y as i64 + dy);
                    if qx < 0 || qy < 0 || qx >= w as i64 || qy >= h as i64 {
                        continue;
                    }
                    let j = qy as usize * w + qx as usize;
                    if edges.data[j] && !visited[j] {
                        visited[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        if (pixels.len() as u32) < min_area {
            continue;
        }
        let n = pixels.len() as f64;
        let (sx, sy) = pixels.iter().fold((0.0, 0.0), |(sx, sy), &(x, y)| {
            (sx + x as f64, sy + y as f64)
        });
        let bbox = Rect {
            x_min: pixels.iter().map(|p| p.0).min().unwrap() as f64,
            y_min: pixels.iter().map(|p| p.1).min().unwrap() as f64,
            x_max: pixels.iter().map(|p| p.0).max().unwrap() as f64,
            y_max: pixels.iter().map(|p| p.1).max().unwrap() as f64,
        };
        contours.push(Contour {
            area: pixels.len() as u32,
            centroid: Point2::new(sx / n, sy / n),
            pixels,
            bbox,
        });
    }

    contours.sort_by(|a, b| {
        b.area
            .cmp(&a.area)
            .then(a.centroid.y.total_cmp(&b.centroid.y))
            .then(a.centroid.x.total_cmp(&b.centroid.x))
    });
    contours
}
