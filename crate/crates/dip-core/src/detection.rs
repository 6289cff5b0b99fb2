//! Object localization inside the area of interest: strongest corner
//! keypoint, largest contour centroid, or contour with keypoint fallback.

use crate::geometry::{
    clip_triangle_to_image, point_in_triangle, GeometryError, Point2, Rect, Triangle,
};
use crate::imaging::{
    canny, corner_response, detect_keypoints_with, extract_contours, to_grayscale, CannyParams,
    ImageBuffer, DEFAULT_HARRIS_K, DEFAULT_MIN_AREA, DEFAULT_WINDOW_SIGMA,
};
use serde::{Deserialize, Serialize};

/// Which localizer(s) to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocateStrategy {
    Keypoint,
    Contour,
    ContourThenKeypoint,
}

impl std::str::FromStr for LocateStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "keypoint" => Ok(Self::Keypoint),
            "contour" => Ok(Self::Contour),
            "contour_then_keypoint" => Ok(Self::ContourThenKeypoint),
            other => Err(format!(
                "unknown method '{other}' (expected keypoint, contour, or contour_then_keypoint)"
            )),
        }
    }
}

impl std::fmt::Display for LocateStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Keypoint => "keypoint",
            Self::Contour => "contour",
            Self::ContourThenKeypoint => "contour_then_keypoint",
        })
    }
}

/// Which localizer actually produced a detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionMethod {
    Keypoint,
    Contour,
}

/// A located object: a point, a tracker seed box, and the winning score
/// (keypoint strength or contour area).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub point: Point2,
    pub bbox: Rect,
    pub method: DetectionMethod,
    pub score: f64,
}

/// Detector tuning shared by both localizers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    pub canny: CannyParams,
    /// Minimum contour pixel count.
    pub min_area: u32,
    pub harris_k: f64,
    pub window_sigma: f64,
    /// Corner response must exceed this to count as a keypoint.
    pub keypoint_threshold: f64,
    /// Chebyshev radius for keypoint non-max suppression.
    pub nms_radius: u32,
    /// Side of the square tracker seed box around a keypoint.
    pub seed_box: u32,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            canny: CannyParams::default(),
            min_area: DEFAULT_MIN_AREA,
            harris_k: DEFAULT_HARRIS_K,
            window_sigma: DEFAULT_WINDOW_SIGMA,
            keypoint_threshold: 1e5,
            nms_radius: 5,
            seed_box: 40,
        }
    }
}

/// Strongest corner keypoint whose location lies inside the AOI, or `None`.
///
/// The response is computed on the clipped AOI box expanded by a margin of
/// `nms_radius + 1 + ceil(3·window_sigma)`, so in-triangle values match the
/// full-frame computation exactly. Out-of-triangle responses are zeroed
/// before suppression: only AOI pixels compete, and the returned point is
/// always the exhaustive argmax of the masked response.
pub fn locate_by_keypoint(
    gray: &ImageBuffer,
    aoi: &Triangle,
    params: &DetectorParams,
) -> Option<Detection> {
    let (w, h) = (gray.width(), gray.height());
    let region = clip_triangle_to_image(aoi, w, h).ok()?;
    let margin = params.nms_radius + 1 + (3.0 * params.window_sigma).ceil() as u32;
    let window = region.expanded(margin, w, h);
    let crop = gray.crop(window.x0, window.y0, window.width(), window.height());
    let mut resp = corner_response(&crop, params.harris_k, params.window_sigma);
    for cy in 0..resp.height {
        for cx in 0..resp.width {
            let (fx, fy) = (cx + window.x0, cy + window.y0);
            let inside = region.contains(fx, fy)
                && point_in_triangle(Point2::new(fx as f64, fy as f64), aoi);
            if !inside {
                resp.data[(cy * resp.width + cx) as usize] = 0.0;
            }
        }
    }
    let kps = detect_keypoints_with(&resp, params.keypoint_threshold, params.nms_radius, None);
    let best = kps.first()?;
    let point = Point2::new((best.x + window.x0) as f64, (best.y + window.y0) as f64);
    let bbox = Rect::from_center_size(point, params.seed_box as f64, params.seed_box as f64)
        .clamped_to_frame(w, h);
    Some(Detection {
        point,
        bbox,
        method: DetectionMethod::Keypoint,
        score: best.strength as f64,
    })
}

/// Largest contour whose centroid lies inside the AOI, or `None`.
///
/// The scan region is the clipped AOI box expanded by the edge detector's
/// support (`2 + ceil(3·sigma)`), so rings of objects near the AOI border
/// keep their full gradient support and their centroids stay unbiased.
pub fn locate_by_contour(
    gray: &ImageBuffer,
    aoi: &Triangle,
    params: &DetectorParams,
) -> Option<Detection> {
    let (w, h) = (gray.width(), gray.height());
    let region = clip_triangle_to_image(aoi, w, h).ok()?;
    let margin = 2 + (3.0 * params.canny.sigma).ceil() as u32;
    let window = region.expanded(margin, w, h);
    let crop = gray.crop(window.x0, window.y0, window.width(), window.height());
    let edges = canny(
        &crop,
        params.canny.low,
        params.canny.high,
        params.canny.sigma,
    );
    let offset = Point2::new(window.x0 as f64, window.y0 as f64);
    // the list is area-desc sorted; a constant shift keeps the tie order
    extract_contours(&edges, params.min_area)
        .into_iter()
        .map(|c| (c.centroid + offset, c))
        .find(|(centroid, _)| point_in_triangle(*centroid, aoi))
        .map(|(centroid, c)| Detection {
            point: centroid,
            bbox: Rect::new(
                c.bbox.x_min + offset.x,
                c.bbox.y_min + offset.y,
                c.bbox.x_max + offset.x,
                c.bbox.y_max + offset.y,
            ),
            method: DetectionMethod::Contour,
            score: c.area as f64,
        })
}

/// Dispatches to the configured localizer(s). RGB frames are converted to
/// gray first. An AOI entirely off-frame is an `EmptyRegion` error; a
/// scanned-but-empty AOI is `Ok(None)`.
pub fn locate_object(
    frame: &ImageBuffer,
    aoi: &Triangle,
    strategy: LocateStrategy,
    params: &DetectorParams,
) -> Result<Option<Detection>, GeometryError> {
    clip_triangle_to_image(aoi, frame.width(), frame.height())?;
    let gray = to_grayscale(frame);
    Ok(match strategy {
        LocateStrategy::Keypoint => locate_by_keypoint(&gray, aoi, params),
        LocateStrategy::Contour => locate_by_contour(&gray, aoi, params),
        LocateStrategy::ContourThenKeypoint => {
            locate_by_contour(&gray, aoi, params).or_else(|| locate_by_keypoint(&gray, aoi, params))
        }
    })
}
