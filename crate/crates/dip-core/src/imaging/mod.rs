//! From-scratch raster toolkit: NetPBM I/O, grayscale conversion, Gaussian
//! blur, Sobel gradients, Canny edges, contour components, corner-strength
//! keypoints, hue histograms with back-projection, and line drawing.
//!
//! All kernels use edge replication at image borders. Functions without a
//! `_seq` suffix run data-parallel when the `parallel` feature is enabled;
//! `_seq` variants force the sequential path. Both produce identical bytes:
//! work is split by output row and rows never participate in reductions.

mod canny;
mod contour;
mod corner;
mod draw;
mod filter;
mod gradient;
mod hue;
mod pnm;

pub use canny::{canny, canny_seq, canny_stages, CannyParams, CannyStages, EdgeMap};
pub use contour::{extract_contours, Contour, DEFAULT_MIN_AREA};
pub use corner::{
    corner_response, corner_response_seq, detect_keypoints, detect_keypoints_with, Keypoint,
    DEFAULT_HARRIS_K, DEFAULT_WINDOW_SIGMA,
};
pub use draw::{draw_cross, draw_line, draw_rect_outline, draw_triangle_outline};
pub use filter::{gaussian_blur, gaussian_blur_seq};
pub use gradient::{sobel_gradients, Gradients};
pub use hue::{back_project, hue_histogram, rgb_to_hsv, HueHistogram, DEFAULT_HUE_BINS};
pub use pnm::{load_image, save_image};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("truncated data: expected {expected} bytes, got {actual}")]
    TruncatedData { expected: usize, actual: usize },
    #[error("unsupported max value {0} (only 255 is supported)")]
    UnsupportedMaxval(u32),
    #[error("invalid dimensions or channel count")]
    InvalidDimensions,
    #[error("expected a {expected}-channel image, got {actual}")]
    ChannelMismatch { expected: u8, actual: u8 },
    #[error("window covers no pixels")]
    EmptyWindow,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// 8-bit raster image, 1 (gray) or 3 (RGB) channels, row-major samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: u32,
    height: u32,
    channels: u8,
    data: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: u32, height: u32, channels: u8, data: Vec<u8>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 || !matches!(channels, 1 | 3) {
            return Err(ImagingError::InvalidDimensions);
        }
        let expected = width as usize * height as usize * channels as usize;
        if data.len() != expected {
            return Err(ImagingError::TruncatedData {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Uniform image of the given value in every sample.
    pub fn filled(width: u32, height: u32, channels: u8, value: u8) -> Self {
        assert!(width > 0 && height > 0 && matches!(channels, 1 | 3));
        Self {
            width,
            height,
            channels,
            data: vec![value; width as usize * height as usize * channels as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    fn index(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        (y as usize * self.width as usize + x as usize) * self.channels as usize
    }

    /// Sample channel `c` at pixel (x, y).
    pub fn sample(&self, x: u32, y: u32, c: u8) -> u8 {
        debug_assert!(c < self.channels);
        self.data[self.index(x, y) + c as usize]
    }

    /// All channels at pixel (x, y).
    pub fn pixel(&self, x: u32, y: u32) -> &[u8] {
        let i = self.index(x, y);
        &self.data[i..i + self.channels as usize]
    }

    /// Overwrites all channels at pixel (x, y). `px` length must equal the
    /// channel count.
    pub fn put_pixel(&mut self, x: u32, y: u32, px: &[u8]) {
        assert_eq!(px.len(), self.channels as usize);
        let i = self.index(x, y);
        self.data[i..i + px.len()].copy_from_slice(px);
    }

    /// Copy of the rectangle `[x0, x0+w) × [y0, y0+h)`; must lie in bounds.
    pub fn crop(&self, x0: u32, y0: u32, w: u32, h: u32) -> ImageBuffer {
        assert!(w > 0 && h > 0 && x0 + w <= self.width && y0 + h <= self.height);
        let ch = self.channels as usize;
        let mut data = Vec::with_capacity(w as usize * h as usize * ch);
        for y in y0..y0 + h {
            let start = (y as usize * self.width as usize + x0 as usize) * ch;
            data.extend_from_slice(&self.data[start..start + w as usize * ch]);
        }
        ImageBuffer {
            width: w,
            height: h,
            channels: self.channels,
            data,
        }
    }
}

/// Single-channel float plane used for kernel intermediates and responses.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f32>,
}

impl Plane {
    pub fn zeros(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0);
        Self {
            width,
            height,
            data: vec![0.0; width as usize * height as usize],
        }
    }

    /// Lossless copy of a 1-channel image's samples.
    pub fn from_gray(img: &ImageBuffer) -> Self {
        assert_eq!(img.channels(), 1);
        Self {
            width: img.width(),
            height: img.height(),
            data: img.data().iter().map(|&v| v as f32).collect(),
        }
    }

    pub fn get(&self, x: u32, y: u32) -> f32 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y as usize * self.width as usize + x as usize]
    }

    /// Access with coordinates clamped into bounds (edge replication).
    pub(crate) fn get_replicated(&self, x: i64, y: i64) -> f32 {
        let cx = x.clamp(0, self.width as i64 - 1) as usize;
        let cy = y.clamp(0, self.height as i64 - 1) as usize;
        self.data[cy * self.width as usize + cx]
    }

    /// Row-major slice of row `y`.
    pub fn row(&self, y: u32) -> &[f32] {
        let w = self.width as usize;
        let start = y as usize * w;
        &self.data[start..start + w]
    }
}

/// Converts RGB to gray via `round(0.299 R + 0.587 G + 0.114 B)`.
/// A 1-channel input is returned as a copy.
pub fn to_grayscale(img: &ImageBuffer) -> ImageBuffer {
    if img.channels() == 1 {
        return img.clone();
    }
    let data: Vec<u8> = img
        .data()
        .chunks_exact(3)
        .map(|px| {
            let luma = 0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64;
            luma.round().clamp(0.0, 255.0) as u8
        })
        .collect();
    ImageBuffer {
        width: img.width(),
        height: img.height(),
        channels: 1,
        data,
    }
}
