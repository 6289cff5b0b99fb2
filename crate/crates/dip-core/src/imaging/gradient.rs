//! 3×3 Sobel gradients.

use super::{ImageBuffer, Plane};
use crate::exec::fill_rows;

/// Per-pixel gradient planes. `magnitude` is reported on an 8-bit scale:
/// the raw Sobel hypot divided by 4 so a full-contrast axis-aligned step
/// maps to roughly 255. `direction` is `atan2(gy, gx)` in radians with the
/// image y-down convention.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub gx: Plane,
    pub gy: Plane,
    pub magnitude: Plane,
    pub direction: Plane,
}

/// Raw Sobel responses of a float plane (no magnitude normalization).
pub(crate) fn sobel_planes(src: &Plane, parallel: bool) -> (Plane, Plane) {
    let (w, h) = (src.width, src.height);
    let mut gx = Plane::zeros(w, h);
    fill_rows(&mut gx.data, w as usize, parallel, |y, row| {
        let y = y as i64;
        for (x, out) in row.iter_mut().enumerate() {
            let x = x as i64;
            let s = |dx: i64, dy: i64| src.get_replicated(x + dx, y + dy) as f64;
            *out =
                ((s(1, -1) - s(-1, -1)) + 2.0 * (s(1, 0) - s(-1, 0)) + (s(1, 1) - s(-1, 1))) as f32;
        }
    });
    let mut gy = Plane::zeros(w, h);
    fill_rows(&mut gy.data, w as usize, parallel, |y, row| {
        let y = y as i64;
        for (x, out) in row.iter_mut().enumerate() {
            let x = x as i64;
            let s = |dx: i64, dy: i64| src.get_replicated(x + dx, y + dy) as f64;
            *out =
                ((s(-1, 1) - s(-1, -1)) + 2.0 * (s(0, 1) - s(0, -1)) + (s(1, 1) - s(1, -1))) as f32;
        }
    });
    (gx, gy)
}

pub(crate) fn gradients_impl(src: &Plane, parallel: bool) -> Gradients {
    let (gx, gy) = sobel_planes(src, parallel);
    let (w, h) = (src.width, src.height);
    let mut magnitude = Plane::zeros(w, h);
    fill_rows(&mut magnitude.data, w as usize, parallel, |y, row| {
        let base = y * w as usize;
        for (x, out) in row.iter_mut().enumerate() {
            *out = (gx.data[base + x].hypot(gy.data[base + x])) / 4.0;
        }
    });
    let mut direction = Plane::zeros(w, h);
    fill_rows(&mut direction.data, w as usize, parallel, |y, row| {
        let base = y * w as usize;
        for (x, out) in row.iter_mut().enumerate() {
            *out = gy.data[base + x].atan2(gx.data[base + x]);
        }
    });
    Gradients {
        gx,
        gy,
        magnitude,
        direction,
    }
}

/// Sobel gradients of a 1-channel image with edge replication at borders.
pub fn sobel_gradients(gray: &ImageBuffer) -> Gradients {
    assert_eq!(gray.channels(), 1, "sobel_gradients expects a gray image");
    gradients_impl(&Plane::from_gray(gray), cfg!(feature = "parallel"))
}
