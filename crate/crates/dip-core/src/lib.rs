//! Pointing-gesture interpretation for human-robot interaction.
//!
//! From a pair of 2D arm landmarks (elbow and wrist) in image space, this
//! crate derives a pointing direction, extends it into a triangular area of
//! interest, locates a salient object inside that area with low-level image
//! features, and optionally hands the object off to a mean-shift tracker
//! driving a PID approach controller in a closed-loop simulator.
//!
//! The stages are:
//!
//! 1. **geometry** - ray extension, triangle construction, containment and
//!    angle arithmetic. Pure functions on `f64` points.
//! 2. **imaging** - a small from-scratch raster toolkit: NetPBM I/O,
//!    grayscale, Gaussian blur, Sobel gradients, Canny edges, contour
//!    extraction, corner-strength keypoints, hue histograms.
//! 3. **detection** - locate the object inside the area of interest by
//!    strongest keypoint or largest contour centroid.
//! 4. **pipeline** - per-frame orchestration, the multi-frame session state
//!    machine, and annotated rendering.
//! 5. **tracking** - hue-histogram mean-shift tracking and PID approach
//!    commands.
//! 6. **sim** - a planar kinematic simulator closing the loop from rendered
//!    frames back to robot motion.
//! 7. **eval** - angle statistics against human annotations and
//!    containment/vector-hit/detection ratios over labeled sequences.
//!
//! With the default `parallel` feature the image kernels and batch
//! evaluation fan out over rayon; disabling it selects a sequential
//! fallback that produces bit-identical results.

pub mod detection;
pub mod eval;
mod exec;
pub mod geometry;
pub mod imaging;
pub mod pipeline;
pub mod sim;
pub mod synth;
pub mod tracking;

pub use detection::{Detection, DetectionMethod, DetectorParams, LocateStrategy};
pub use geometry::{Point2, Rect, Triangle};
pub use imaging::ImageBuffer;
pub use pipeline::{DipConfig, FrameResult, GateStatus, PoseLandmarks};
