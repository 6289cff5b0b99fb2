//! Planar geometry of pointing: segment extension, area-of-interest
//! triangles, containment tests, and circular angle statistics.
//!
//! Image convention throughout: origin at the top-left corner, x grows
//! right, y grows *down*. Angles returned by [`pointing_angle`] negate the
//! y component first, so they read as standard math angles (counterclockwise
//! from +x) in `[0, 2π)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

/// Tolerance below which two landmarks are considered coincident and the
/// cross-product collinearity checks are considered exact.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    /// Elbow and wrist coincide; the forearm has no direction.
    #[error("degenerate pose: elbow and wrist coincide")]
    DegeneratePose,
    /// The constructed area-of-interest triangle has zero signed area.
    #[error("degenerate triangle: zero signed area")]
    DegenerateTriangle,
    /// A region to scan lies entirely outside the image.
    #[error("empty region: geometry lies outside the image")]
    EmptyRegion,
    /// An aggregate was requested over an empty collection.
    #[error("empty input")]
    EmptyInput,
}

/// A point (or displacement) in image space, in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(&self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z component of the 3D cross product of two displacement vectors.
    pub fn cross(&self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: Point2) -> f64 {
        (*self - other).norm()
    }

    pub fn scale(&self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// The triangular area of interest: an apex at the (offset) wrist and a
/// vertical base centered on the extended pointing endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    /// Offset wrist vertex.
    pub apex: Point2,
    /// Extension endpoint shifted up (−c on y).
    pub base_top: Point2,
    /// Extension endpoint shifted down (+c on y).
    pub base_bottom: Point2,
}

impl Triangle {
    pub const fn new(apex: Point2, base_top: Point2, base_bottom: Point2) -> Self {
        Self {
            apex,
            base_top,
            base_bottom,
        }
    }

    pub fn vertices(&self) -> [Point2; 3] {
        [self.apex, self.base_top, self.base_bottom]
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * (self.base_top - self.apex).cross(self.base_bottom - self.apex)
    }

    pub fn is_degenerate(&self) -> bool {
        self.signed_area() == 0.0
    }

    /// Axis-aligned bounds of the three vertices.
    pub fn bounds(&self) -> Rect {
        let xs = [self.apex.x, self.base_top.x, self.base_bottom.x];
        let ys = [self.apex.y, self.base_top.y, self.base_bottom.y];
        Rect {
            x_min: xs.iter().copied().fold(f64::INFINITY, f64::min),
            y_min: ys.iter().copied().fold(f64::INFINITY, f64::min),
            x_max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            y_max: ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Boundary-inclusive containment of an integer pixel coordinate.
    pub fn contains_pixel(&self, x: u32, y: u32) -> bool {
        point_in_triangle(Point2::new(x as f64, y as f64), self)
    }
}

/// Axis-aligned rectangle in pixel coordinates, closed on all sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect {
    pub const fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Self {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    pub fn from_center_size(center: Point2, width: f64, height: f64) -> Self {
        Self {
            x_min: center.x - width / 2.0,
            y_min: center.y - height / 2.0,
            x_max: center.x + width / 2.0,
            y_max: center.y + height / 2.0,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.x_min <= self.x_max && self.y_min <= self.y_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point2 {
        Point2::new(
            (self.x_min + self.x_max) / 2.0,
            (self.y_min + self.y_max) / 2.0,
        )
    }

    /// Boundary-inclusive point containment.
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Rectangle grown by `amount` on every side.
    pub fn dilated(&self, amount: f64) -> Rect {
        Rect {
            x_min: self.x_min - amount,
            y_min: self.y_min - amount,
            x_max: self.x_max + amount,
            y_max: self.y_max + amount,
        }
    }

    /// Edges clamped into `[0, width-1] × [0, height-1]`.
    pub fn clamped_to_frame(&self, width: u32, height: u32) -> Rect {
        Rect {
            x_min: self.x_min.clamp(0.0, (width - 1) as f64),
            y_min: self.y_min.clamp(0.0, (height - 1) as f64),
            x_max: self.x_max.clamp(0.0, (width - 1) as f64),
            y_max: self.y_max.clamp(0.0, (height - 1) as f64),
        }
    }
}

/// The elbow→wrist segment extended past the wrist by a scale factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointingRay {
    pub elbow: Point2,
    pub wrist: Point2,
    pub ext: Point2,
    pub sf: f64,
}

impl PointingRay {
    /// Builds the ray, computing the extension endpoint.
    pub fn new(elbow: Point2, wrist: Point2, sf: f64) -> Result<Self, GeometryError> {
        let ext = extend_pointing_segment(elbow, wrist, sf)?;
        Ok(Self {
            elbow,
            wrist,
            ext,
            sf,
        })
    }
}

/// Extends the elbow→wrist segment past the wrist: `ext = w + sf·(w − e)`,
/// applied per coordinate.
pub fn extend_pointing_segment(
    elbow: Point2,
    wrist: Point2,
    sf: f64,
) -> Result<Point2, GeometryError> {
    if wrist.distance(elbow) < DEGENERACY_TOL {
        return Err(GeometryError::DegeneratePose);
    }
    Ok(Point2::new(
        wrist.x + sf * (wrist.x - elbow.x),
        wrist.y + sf * (wrist.y - elbow.y),
    ))
}

/// Builds the area-of-interest triangle: apex at the wrist offset by
/// `(−eps, +eps)`, base vertices at the extension endpoint offset by `∓c`
/// vertically.
pub fn build_area_of_interest(
    wrist: Point2,
    ext: Point2,
    c: f64,
    eps: f64,
) -> Result<Triangle, GeometryError> {
    let t = Triangle::new(
        Point2::new(wrist.x - eps, wrist.y + eps),
        Point2::new(ext.x, ext.y - c),
        Point2::new(ext.x, ext.y + c),
    );
    if t.is_degenerate() {
        return Err(GeometryError::DegenerateTriangle);
    }
    Ok(t)
}

/// Variant with the base offset perpendicular to the pointing direction
/// instead of vertically, and the apex pulled back along the ray by `eps`.
/// Avoids the sliver triangles that vertical offsets produce for
/// near-vertical pointing.
pub fn build_area_of_interest_perpendicular(
    wrist: Point2,
    ext: Point2,
    c: f64,
    eps: f64,
) -> Result<Triangle, GeometryError> {
    let dir = ext - wrist;
    let len = dir.norm();
    if len < DEGENERACY_TOL {
        return Err(GeometryError::DegenerateTriangle);
    }
    let unit = dir.scale(1.0 / len);
    let normal = Point2::new(-unit.y, unit.x);
    let t = Triangle::new(
        wrist - unit.scale(eps),
        ext - normal.scale(c),
        ext + normal.scale(c),
    );
    if t.is_degenerate() {
        return Err(GeometryError::DegenerateTriangle);
    }
    Ok(t)
}

/// Boundary-inclusive point-in-triangle test via three orientation signs.
pub fn point_in_triangle(p: Point2, t: &Triangle) -> bool {
    let [a, b, c] = t.vertices();
    let d1 = (b - a).cross(p - a);
    let d2 = (c - b).cross(p - b);
    let d3 = (a - c).cross(p - c);
    let has_neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let has_pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    !(has_neg && has_pos)
}

/// Angle of the elbow→wrist direction in `[0, 2π)`, counterclockwise from
/// +x with the image y axis negated (y-up convention).
pub fn pointing_angle(elbow: Point2, wrist: Point2) -> Result<f64, GeometryError> {
    if wrist.distance(elbow) < DEGENERACY_TOL {
        return Err(GeometryError::DegeneratePose);
    }
    let dx = wrist.x - elbow.x;
    let dy_up = -(wrist.y - elbow.y);
    Ok(dy_up.atan2(dx).rem_euclid(TAU))
}

/// Minimal absolute circular difference between two angles, in `[0, π]`.
pub fn angular_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Circular mean of a set of angles, normalized to `[0, 2π)`.
pub fn circular_mean(angles: &[f64]) -> Result<f64, GeometryError> {
    if angles.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    let (sin_sum, cos_sum) = angles
        .iter()
        .fold((0.0, 0.0), |(s, c), &a| (s + a.sin(), c + a.cos()));
    Ok(sin_sum.atan2(cos_sum).rem_euclid(TAU))
}

/// Sample variance (n−1 denominator) of angles unwrapped to the branch
/// nearest their circular mean. A single angle has zero variance.
pub fn circular_variance(angles: &[f64]) -> Result<f64, GeometryError> {
    if angles.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    if angles.len() == 1 {
        return Ok(0.0);
    }
    let center = circular_mean(angles)?;
    let unwrapped: Vec<f64> = angles
        .iter()
        .map(|&a| a - TAU * ((a - center) / TAU).round())
        .collect();
    let mean = unwrapped.iter().sum::<f64>() / unwrapped.len() as f64;
    let ss = unwrapped
        .iter()
        .map(|a| (a - mean) * (a - mean))
        .sum::<f64>();
    Ok(ss / (unwrapped.len() - 1) as f64)
}

/// True iff the closed segment `p0→p1` intersects the closed rectangle.
/// Liang-Barsky clipping with inclusive parameter bounds.
pub fn segment_intersects_rect(p0: Point2, p1: Point2, r: &Rect) -> bool {
    let d = p1 - p0;
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    let checks = [
        (-d.x, p0.x - r.x_min),
        (d.x, r.x_max - p0.x),
        (-d.y, p0.y - r.y_min),
        (d.y, r.y_max - p0.y),
    ];
    for (p, q) in checks {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
    }
    t0 <= t1
}

/// True iff the triangle and rectangle overlap (boundary-inclusive).
pub fn triangle_intersects_rect(t: &Triangle, r: &Rect) -> bool {
    if t.vertices().iter().any(|&v| r.contains(v)) {
        return true;
    }
    let corners = [
        Point2::new(r.x_min, r.y_min),
        Point2::new(r.x_max, r.y_min),
        Point2::new(r.x_max, r.y_max),
        Point2::new(r.x_min, r.y_max),
    ];
    if corners.iter().any(|&c| point_in_triangle(c, t)) {
        return true;
    }
    let [a, b, c] = t.vertices();
    [(a, b), (b, c), (c, a)]
        .iter()
        .any(|&(p0, p1)| segment_intersects_rect(p0, p1, r))
}

/// Integer pixel region to scan for a triangle clipped to an image,
/// inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRegion {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl ScanRegion {
    pub fn width(&self) -> u32 {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> u32 {
        self.y1 - self.y0 + 1
    }

    /// Region grown by `margin` on every side, clamped to the frame.
    pub fn expanded(&self, margin: u32, frame_w: u32, frame_h: u32) -> ScanRegion {
        ScanRegion {
            x0: self.x0.saturating_sub(margin),
            y0: self.y0.saturating_sub(margin),
            x1: (self.x1 + margin).min(frame_w - 1),
            y1: (self.y1 + margin).min(frame_h - 1),
        }
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

/// Integer pixel bounding box of the triangle intersected with the frame
/// `[0, width) × [0, height)`. Downstream scans iterate this box and apply
/// [`point_in_triangle`] per pixel.
pub fn clip_triangle_to_image(
    t: &Triangle,
    width: u32,
    height: u32,
) -> Result<ScanRegion, GeometryError> {
    assert!(width > 0 && height > 0, "image dimensions must be positive");
    let b = t.bounds();
    if b.x_max < 0.0
        || b.y_max < 0.0
        || b.x_min > (width - 1) as f64
        || b.y_min > (height - 1) as f64
    {
        return Err(GeometryError::EmptyRegion);
    }
    let x0 = b.x_min.ceil().max(0.0) as u32;
    let y0 = b.y_min.ceil().max(0.0) as u32;
    let x1 = b.x_max.floor().min((width - 1) as f64) as u32;
    let y1 = b.y_max.floor().min((height - 1) as f64) as u32;
    if x0 > x1 || y0 > y1 {
        return Err(GeometryError::EmptyRegion);
    }
    Ok(ScanRegion { x0, y0, x1, y1 })
}
