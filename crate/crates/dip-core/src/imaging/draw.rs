//! Overlay drawing used by the frame annotator. Colors are RGB; on gray
//! images the luma projection of the color is stamped instead.

use super::ImageBuffer;
use crate::geometry::{Point2, Rect, Triangle};

fn stamp(img: &mut ImageBuffer, x: i64, y: i64, color: [u8; 3]) {
    if x < 0 || y < 0 || x >= img.width() as i64 || y >= img.height() as i64 {
        return;
    }
    let (x, y) = (x as u32, y as u32);
    if img.channels() == 3 {
        img.put_pixel(x, y, &color);
    } else {
        let luma = 0.299 * color[0] as f64 + 0.587 * color[1] as f64 + 0.114 * color[2] as f64;
        img.put_pixel(x, y, &[luma.round().clamp(0.0, 255.0) as u8]);
    }
}

/// 1-px line from `p0` to `p1` by dense sampling (two samples per pixel of
/// length). Segments reaching outside the frame are clipped per sample.
pub fn draw_line(img: &mut ImageBuffer, p0: Point2, p1: Point2, color: [u8; 3]) {
    let len = p0.distance(p1);
    let steps = (len * 2.0).ceil() as u64 + 1;
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let x = p0.x + t * (p1.x - p0.x);
        let y = p0.y + t * (p1.y - p0.y);
        stamp(img, x.round() as i64, y.round() as i64, color);
    }
}

pub fn draw_rect_outline(img: &mut ImageBuffer, r: &Rect, color: [u8; 3]) {
    let corners = [
        Point2::new(r.x_min, r.y_min),
        Point2::new(r.x_max, r.y_min),
        Point2::new(r.x_max, r.y_max),
        Point2::new(r.x_min, r.y_max),
    ];
    for i in 0..4 {
        draw_line(img, corners[i], corners[(i + 1) % 4], color);
    }
}

pub fn draw_triangle_outline(img: &mut ImageBuffer, t: &Triangle, color: [u8; 3]) {
    let [a, b, c] = t.vertices();
    draw_line(img, a, b, color);
    draw_line(img, b, c, color);
    draw_line(img, c, a, color);
}

/// Axis-aligned cross of half-extent `arm` centered on `center`.
pub fn draw_cross(img: &mut ImageBuffer, center: Point2, arm: u32, color: [u8; 3]) {
    let a = arm as f64;
    draw_line(
        img,
        Point2::new(center.x - a, center.y),
        Point2::new(center.x + a, center.y),
        color,
    );
    draw_line(
        img,
        Point2::new(center.x, center.y - a),
        Point2::new(center.x, center.y + a),
        color,
    );
}
