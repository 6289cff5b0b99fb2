//! Hue histograms and back-projection for the tracker's appearance model.

use super::{ImageBuffer, ImagingError, Plane};
use crate::exec::fill_rows;
use crate::geometry::Rect;

pub const DEFAULT_HUE_BINS: usize = 16;

/// Fraction of full range below which saturation or value disqualifies a
/// pixel from hue statistics.
const CHROMA_FLOOR: f64 = 0.1;

/// Normalized weights over hue bins covering [0°, 360°). All-zero when the
/// source window held no chromatic pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct HueHistogram {
    weights: Vec<f64>,
}

impl HueHistogram {
    pub fn bins(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, bin: usize) -> f64 {
        self.weights[bin]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.iter().all(|&w| w == 0.0)
    }

    fn bin_of(&self, hue_deg: f64) -> usize {
        let n = self.weights.len();
        (((hue_deg / 360.0) * n as f64) as usize).min(n - 1)
    }
}

/// RGB (0..=255 each) to HSV: hue in degrees [0, 360), saturation and
/// value in [0, 1].
pub fn rgb_to_hsv(r: u8, g: u8, b: u8) -> (f64, f64, f64) {
    let (rf, gf, bf) = (r as f64 / 255.0, g as f64 / 255.0, b as f64 / 255.0);
    let max = rf.max(gf).max(bf);
    let min = rf.min(gf).min(bf);
    let delta = max - min;
    let v = max;
    let s = if max == 0.0 { 0.0 } else { delta / max };
    let h = if delta == 0.0 {
        0.0
    } else if max == rf {
        60.0 * ((gf - bf) / delta)
    } else if max == gf {
        60.0 * ((bf - rf) / delta + 2.0)
    } else {
        60.0 * ((rf - gf) / delta + 4.0)
    };
    (h.rem_euclid(360.0), s, v)
}

fn chromatic(px: &[u8]) -> Option<f64> {
    let (h, s, v) = rgb_to_hsv(px[0], px[1], px[2]);
    if s < CHROMA_FLOOR || v < CHROMA_FLOOR {
        None
    } else {
        Some(h)
    }
}

/// Hue histogram over the pixels whose centers lie in the closed window.
/// Low-saturation and low-value pixels are excluded; a window with only
/// such pixels yields an all-zero histogram. `EmptyWindow` is raised only
/// when the window covers no pixel centers at all.
pub fn hue_histogram(
    rgb: &ImageBuffer,
    window: &Rect,
    bins: usize,
) -> Result<HueHistogram, ImagingError> {
    assert!(bins > 0);
    if rgb.channels() != 3 {
        return Err(ImagingError::ChannelMismatch {
            expected: 3,
            actual: rgb.channels(),
        });
    }
    let x0 = window.x_min.ceil().max(0.0) as i64;
    let y0 = window.y_min.ceil().max(0.0) as i64;
    let x1 = window.x_max.floor().min(rgb.width() as f64 - 1.0) as i64;
    let y1 = window.y_max.floor().min(rgb.height() as f64 - 1.0) as i64;
    if x0 > x1 || y0 > y1 || window.x_max < 0.0 || window.y_max < 0.0 {
        return Err(ImagingError::EmptyWindow);
    }

    let mut hist = HueHistogram {
        weights: vec![0.0; bins],
    };
    let mut total = 0usize;
    for y in y0..=y1 {
        for x in x0..=x1 {
            if let Some(h) = chromatic(rgb.pixel(x as u32, y as u32)) {
                let bin = hist.bin_of(h);
                hist.weights[bin] += 1.0;
                total += 1;
            }
        }
    }
    if total > 0 {
        for w in &mut hist.weights {
            *w /= total as f64;
        }
    }
    Ok(hist)
}

/// Per-pixel probability plane: the histogram weight of each pixel's hue
/// bin, zero for achromatic pixels. Values lie in [0, 1].
pub fn back_project(rgb: &ImageBuffer, hist: &HueHistogram) -> Plane {
    assert_eq!(rgb.channels(), 3, "back_project expects an RGB image");
    let (w, h) = (rgb.width(), rgb.height());
    let mut plane = Plane::zeros(w, h);
    fill_rows(
        &mut plane.data,
        w as usize,
        cfg!(feature = "parallel"),
        |y, row| {
            for (x, out) in row.iter_mut().enumerate() {
                if let Some(hue) = chromatic(rgb.pixel(x as u32, y as u32)) {
                    *out = hist.weight(hist.bin_of(hue)) as f32;
                }
            }
        },
    );
    plane
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solid(w: u32, h: u32, color: [u8; 3]) -> ImageBuffer {
        let mut img = ImageBuffer::filled(w, h, 3, 0);
        for y in 0..h {
            for x in 0..w {
                img.put_pixel(x, y, &color);
            }
        }
        img
    }

    #[test]
    fn hsv_reference_points() {
        assert_eq!(rgb_to_hsv(255, 0, 0), (0.0, 1.0, 1.0));
        let (h, s, v) = rgb_to_hsv(0, 255, 0);
        assert_eq!((h, s, v), (120.0, 1.0, 1.0));
        let (h, _, _) = rgb_to_hsv(0, 0, 255);
        assert_eq!(h, 240.0);
        let (_, s, v) = rgb_to_hsv(128, 128, 128);
        assert_eq!(s, 0.0);
        assert!((v - 128.0 / 255.0).abs() < 1e-12);
    }

    #[test]
    fn pure_red_concentrates_in_one_bin() {
        let img = solid(8, 8, [255, 0, 0]);
        let hist = hue_histogram(&img, &Rect::new(0.0, 0.0, 7.0, 7.0), 16).unwrap();
        assert_eq!(hist.weight(0), 1.0);
        assert!((hist.sum() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gray_window_yields_zero_histogram() {
        let img = solid(8, 8, [90, 90, 90]);
        let hist = hue_histogram(&img, &Rect::new(0.0, 0.0, 7.0, 7.0), 16).unwrap();
        assert!(hist.is_empty());
        let plane = back_project(&img, &hist);
        assert!(plane.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn off_image_window_is_an_error() {
        let img = solid(8, 8, [255, 0, 0]);
        assert!(matches!(
            hue_histogram(&img, &Rect::new(20.0, 20.0, 30.0, 30.0), 16),
            Err(ImagingError::EmptyWindow)
        ));
    }

    #[test]
    fn back_projection_separates_disjoint_hues() {
        // left half red, right half blue
        let mut img = solid(16, 8, [255, 0, 0]);
        for y in 0..8 {
            for x in 8..16 {
                img.put_pixel(x, y, &[0, 0, 255]);
            }
        }
        let hist = hue_histogram(&img, &Rect::new(0.0, 0.0, 7.0, 7.0), 16).unwrap();
        let plane = back_project(&img, &hist);
        for y in 0..8 {
            assert_eq!(plane.get(2, y), 1.0);
            assert_eq!(plane.get(12, y), 0.0);
        }
    }

    #[test]
    fn mixed_window_weights_match_pixel_counts() {
        // 3 red rows, 1 blue row in the window
        let mut img = solid(4, 4, [200, 10, 10]);
        for x in 0..4 {
            img.put_pixel(x, 3, &[10, 10, 200]);
        }
        let hist = hue_histogram(&img, &Rect::new(0.0, 0.0, 3.0, 3.0), 16).unwrap();
        let red_bin = 0;
        let blue_bin = (240.0 / 360.0 * 16.0) as usize;
        assert!((hist.weight(red_bin) - 0.75).abs() < 1e-12);
        assert!((hist.weight(blue_bin) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn projection_values_bounded() {
        let data: Vec<u8> = (0..24u32 * 24 * 3)
            .map(|i| (i.wrapping_mul(2654435761) >> 23) as u8)
            .collect();
        let img = ImageBuffer::new(24, 24, 3, data).unwrap();
        let hist = hue_histogram(&img, &Rect::new(3.0, 3.0, 20.0, 20.0), 16).unwrap();
        assert!((hist.sum() - 1.0).abs() < 1e-6);
        let plane = back_project(&img, &hist);
        assert!(plane.data.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
}
