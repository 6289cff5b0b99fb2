//! Evaluation: per-image angle agreement against human annotations, and
//! containment statistics for detector output against ground-truth boxes.

use crate::geometry::{
    angular_difference, circular_mean, circular_variance, point_in_triangle,
    segment_intersects_rect, triangle_intersects_rect, Rect,
};
use crate::pipeline::FrameResult;
use serde::Serialize;
use std::collections::HashMap;
use std::io::Read;
use thiserror::Error;

/// Annotator id reserved for the algorithm's own angle. Rows under this id
/// are excluded from the human mean and variance; the last one per image
/// supplies the comparison angle.
pub const DIP_ANNOTATOR: &str = "dip";

/// Tolerance in pixels when checking a detection against a truth box.
pub const DEFAULT_DETECTION_TOLERANCE: f64 = 10.0;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no ground truth for frame {frame_id}")]
    JoinMismatch { frame_id: u64 },
    #[error("empty input")]
    EmptyInput,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationRecord {
    pub image_id: String,
    pub annotator_id: String,
    /// Radians in `[0, 2pi)`.
    pub angle: f64,
}

/// Per-image agreement row: circular mean and variance over human
/// annotators, plus the algorithm's angle and |difference| when present.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleRow {
    pub image_id: String,
    /// Human annotation count.
    pub n: usize,
    pub mean: f64,
    pub dip: Option<f64>,
    pub difference: Option<f64>,
    pub variance: f64,
}

/// Reads `image_id,annotator_id,angle` CSV (header required).
pub fn load_annotations<R: Read>(reader: R) -> Result<Vec<AnnotationRecord>, EvalError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let mut records = Vec::new();
    for (i, row) in csv_reader.records().enumerate() {
        let line = i + 2;
        let parse = |msg: String| EvalError::Parse { line, msg };
        let row = row.map_err(|e| parse(e.to_string()))?;
        if row.len() != 3 {
            return Err(parse(format!("expected 3 fields, got {}", row.len())));
        }
        let angle: f64 = row[2]
            .trim()
            .parse()
            .map_err(|_| parse(format!("bad angle '{}'", &row[2])))?;
        if !(0.0..std::f64::consts::TAU).contains(&angle) {
            return Err(parse(format!("angle {angle} outside [0, 2pi)")));
        }
        records.push(AnnotationRecord {
            image_id: row[0].trim().to_string(),
            annotator_id: row[1].trim().to_string(),
            angle,
        });
    }
    Ok(records)
}

/// Groups annotations by image (first-appearance order) and reports the
/// human circular mean/variance next to the algorithm angle. Errors if any
/// image carries only algorithm rows, or no rows at all were given.
pub fn angle_report(records: &[AnnotationRecord]) -> Result<Vec<AngleRow>, EvalError> {
    if records.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut order = Vec::new();
    let mut humans: HashMap<&str, Vec<f64>> = HashMap::new();
    let mut dips: HashMap<&str, f64> = HashMap::new();
    for rec in records {
        let id = rec.image_id.as_str();
        if !humans.contains_key(id) && !dips.contains_key(id) {
            order.push(id);
        }
        if rec.annotator_id == DIP_ANNOTATOR {
            dips.insert(id, rec.angle);
        } else {
            humans.entry(id).or_default().push(rec.angle);
        }
    }
    let mut rows = Vec::with_capacity(order.len());
    for id in order {
        let angles = humans.get(id).map(Vec::as_slice).unwrap_or(&[]);
        if angles.is_empty() {
            return Err(EvalError::Parse {
                line: 0,
                msg: format!("image '{id}' has no human annotations"),
            });
        }
        let mean = circular_mean(angles).expect("non-empty");
        let variance = circular_variance(angles).expect("non-empty");
        let dip = dips.get(id).copied();
        rows.push(AngleRow {
            image_id: id.to_string(),
            n: angles.len(),
            mean,
            dip,
            difference: dip.map(|d| angular_difference(d, mean)),
            variance,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruth {
    pub frame_id: u64,
    pub object_box: Rect,
    pub pose_correct: bool,
}

/// Reads `frame_id,x_min,y_min,x_max,y_max,pose_correct` CSV (header
/// required, pose_correct strictly `true`/`false`).
pub fn load_ground_truth<R: Read>(reader: R) -> Result<Vec<GroundTruth>, EvalError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let mut records = Vec::new();
    for (i, row) in csv_reader.records().enumerate() {
        let line = i + 2;
        let parse = |msg: String| EvalError::Parse { line, msg };
        let row = row.map_err(|e| parse(e.to_string()))?;
        if row.len() != 6 {
            return Err(parse(format!("expected 6 fields, got {}", row.len())));
        }
        let field = |idx: usize| -> Result<f64, EvalError> {
            row[idx]
                .trim()
                .parse()
                .map_err(|_| parse(format!("bad number '{}'", &row[idx])))
        };
        let frame_id: u64 = row[0]
            .trim()
            .parse()
            .map_err(|_| parse(format!("bad frame id '{}'", &row[0])))?;
        let object_box = Rect {
            x_min: field(1)?,
            y_min: field(2)?,
            x_max: field(3)?,
            y_max: field(4)?,
        };
        if !object_box.is_valid() {
            return Err(parse("degenerate box".into()));
        }
        let pose_correct = match row[5].trim() {
            "true" => true,
            "false" => false,
            other => return Err(parse(format!("bad pose_correct '{other}'"))),
        };
        records.push(GroundTruth {
            frame_id,
            object_box,
            pose_correct,
        });
    }
    Ok(records)
}

/// Containment statistics over a joined run. Counters are nested: a frame
/// only counts at a stage if it passed every earlier one, so
/// `n_frames >= n_pose_correct >= n_contained >= n_detected`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalReport {
    pub n_frames: usize,
    /// Frames whose ground truth marks the pose usable.
    pub n_pose_correct: usize,
    /// Pose-correct frames whose truth-box center fell inside the triangle.
    pub n_contained: usize,
    /// Pose-correct frames where the triangle overlapped the truth box at all.
    pub n_box_overlap: usize,
    /// Pose-correct frames where the extended pointing segment crossed the box.
    pub n_vector_hit: usize,
    /// Contained frames whose detection landed inside the dilated truth box.
    pub n_detected: usize,
    pub containment_rate: f64,
    pub box_overlap_rate: f64,
    pub vector_hit_rate: f64,
    pub detection_rate: f64,
}

impl EvalReport {
    /// Builds a report from raw counters, for summarizing externally
    /// produced tallies.
    pub fn from_counts(
        n_frames: usize,
        n_pose_correct: usize,
        n_contained: usize,
        n_box_overlap: usize,
        n_vector_hit: usize,
        n_detected: usize,
    ) -> EvalReport {
        let rate = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        EvalReport {
            n_frames,
            n_pose_correct,
            n_contained,
            n_box_overlap,
            n_vector_hit,
            n_detected,
            containment_rate: rate(n_contained, n_pose_correct),
            box_overlap_rate: rate(n_box_overlap, n_pose_correct),
            vector_hit_rate: rate(n_vector_hit, n_pose_correct),
            detection_rate: rate(n_detected, n_contained),
        }
    }
}

/// Joins frame results with ground truth on frame id and tallies the
/// nested containment counters. `tolerance` dilates the truth box before
/// the detection check.
pub fn containment_stats(
    results: &[FrameResult],
    truth: &[GroundTruth],
    tolerance: f64,
) -> Result<EvalReport, EvalError> {
    if results.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let by_frame: HashMap<u64, &GroundTruth> = truth.iter().map(|t| (t.frame_id, t)).collect();
    let (mut pose_ok, mut contained, mut overlap, mut vector, mut detected) = (0, 0, 0, 0, 0);
    for result in results {
        let truth = by_frame
            .get(&result.frame_id)
            .ok_or(EvalError::JoinMismatch {
                frame_id: result.frame_id,
            })?;
        if !truth.pose_correct {
            continue;
        }
        pose_ok += 1;
        if let Some(ray) = &result.ray {
            if segment_intersects_rect(ray.wrist, ray.ext, &truth.object_box) {
                vector += 1;
            }
        }
        let Some(aoi) = &result.aoi else { continue };
        if triangle_intersects_rect(aoi, &truth.object_box) {
            overlap += 1;
        }
        if !point_in_triangle(truth.object_box.center(), aoi) {
            continue;
        }
        contained += 1;
        if let Some(det) = &result.detection {
            if truth.object_box.dilated(tolerance).contains(det.point) {
                detected += 1;
            }
        }
    }
    Ok(EvalReport::from_counts(
        results.len(),
        pose_ok,
        contained,
        overlap,
        vector,
        detected,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_area_of_interest, Point2, PointingRay};
    use crate::pipeline::GateStatus;

    fn rec(image: &str, annotator: &str, angle: f64) -> AnnotationRecord {
        AnnotationRecord {
            image_id: image.into(),
            annotator_id: annotator.into(),
            angle,
        }
    }

    #[test]
    fn angle_report_groups_and_diffs() {
        let records = vec![
            rec("img1", "a1", 3.05),
            rec("img1", "a2", 3.07),
            rec("img1", DIP_ANNOTATOR, 2.91),
            rec("img2", "a1", 0.30),
        ];
        let rows = angle_report(&records).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].image_id, "img1");
        assert_eq!(rows[0].n, 2);
        assert!((rows[0].mean - 3.06).abs() < 1e-12);
        assert!((rows[0].difference.unwrap() - 0.15).abs() < 1e-12);
        assert_eq!(rows[1].dip, None);
        assert_eq!(rows[1].difference, None);
        assert_eq!(rows[1].n, 1);
        assert_eq!(rows[1].variance, 0.0);
    }

    #[test]
    fn dip_only_image_is_rejected() {
        let records = vec![rec("img1", DIP_ANNOTATOR, 1.0)];
        assert!(angle_report(&records).is_err());
        assert_eq!(angle_report(&[]), Err(EvalError::EmptyInput));
    }

    #[test]
    fn annotation_csv_parses_and_validates() {
        let csv = "image_id,annotator_id,angle\nimg1,a1,3.05\nimg1,dip,2.91\n";
        let records = load_annotations(csv.as_bytes()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[1].annotator_id, DIP_ANNOTATOR);

        let bad = "image_id,annotator_id,angle\nimg1,a1,7.0\n";
        match load_annotations(bad.as_bytes()) {
            Err(EvalError::Parse { line: 2, .. }) => {}
            other => panic!("expected line-2 parse error, got {other:?}"),
        }
    }

    #[test]
    fn ground_truth_csv_parses_and_validates() {
        let csv = "frame_id,x_min,y_min,x_max,y_max,pose_correct\n\
                   0,10,20,60,80,true\n1,5,5,30,30,false\n";
        let records = load_ground_truth(csv.as_bytes()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].object_box.x_max, 60.0);
        assert!(!records[1].pose_correct);

        let bad = "frame_id,x_min,y_min,x_max,y_max,pose_correct\n0,10,20,60,80,yes\n";
        assert!(load_ground_truth(bad.as_bytes()).is_err());
        let degenerate = "frame_id,x_min,y_min,x_max,y_max,pose_correct\n0,60,20,10,80,true\n";
        assert!(load_ground_truth(degenerate.as_bytes()).is_err());
    }

    fn frame_result(frame_id: u64) -> FrameResult {
        // triangle around x in [100, 400], apex near (95, 245)
        let wrist = Point2::new(100.0, 240.0);
        let elbow = Point2::new(70.0, 240.0);
        let ray = PointingRay::new(elbow, wrist, 10.0).unwrap();
        let aoi = build_area_of_interest(wrist, ray.ext, 100.0, 5.0).unwrap();
        FrameResult {
            frame_id,
            gate: GateStatus::Ok,
            ray: Some(ray),
            aoi: Some(aoi),
            detection: None,
            elapsed_ms: 0.0,
        }
    }

    #[test]
    fn containment_counters_nest() {
        // truth box centered on the ray axis, well inside the triangle
        let truth = vec![
            GroundTruth {
                frame_id: 0,
                object_box: Rect {
                    x_min: 230.0,
                    y_min: 220.0,
                    x_max: 270.0,
                    y_max: 260.0,
                },
                pose_correct: true,
            },
            GroundTruth {
                frame_id: 1,
                object_box: Rect {
                    x_min: 230.0,
                    y_min: 220.0,
                    x_max: 270.0,
                    y_max: 260.0,
                },
                pose_correct: false,
            },
            // box far outside the triangle
            GroundTruth {
                frame_id: 2,
                object_box: Rect {
                    x_min: 10.0,
                    y_min: 10.0,
                    x_max: 30.0,
                    y_max: 30.0,
                },
                pose_correct: true,
            },
        ];
        let results: Vec<FrameResult> = (0..3).map(|i| frame_result(i)).collect();
        let report = containment_stats(&results, &truth, 10.0).unwrap();
        assert_eq!(report.n_frames, 3);
        assert_eq!(report.n_pose_correct, 2);
        assert_eq!(report.n_contained, 1);
        assert_eq!(report.n_box_overlap, 1);
        assert_eq!(report.n_vector_hit, 1);
        assert_eq!(report.n_detected, 0);
        assert!((report.containment_rate - 0.5).abs() < 1e-12);
        assert_eq!(report.detection_rate, 0.0);
    }

    #[test]
    fn detection_inside_dilated_box_counts() {
        let truth = vec![GroundTruth {
            frame_id: 0,
            object_box: Rect {
                x_min: 230.0,
                y_min: 220.0,
                x_max: 270.0,
                y_max: 260.0,
            },
            pose_correct: true,
        }];
        let mut result = frame_result(0);
        result.detection = Some(crate::detection::Detection {
            point: Point2::new(275.0, 240.0), // 5 px outside, inside +10 dilation
            bbox: Rect::from_center_size(Point2::new(275.0, 240.0), 40.0, 40.0),
            method: crate::detection::DetectionMethod::Contour,
            score: 100.0,
        });
        let report = containment_stats(&[result.clone()], &truth, 10.0).unwrap();
        assert_eq!(report.n_detected, 1);
        assert!((report.detection_rate - 1.0).abs() < 1e-12);
        // zero tolerance excludes it
        let strict = containment_stats(&[result], &truth, 0.0).unwrap();
        assert_eq!(strict.n_detected, 0);
    }

    #[test]
    fn missing_truth_row_is_a_join_error() {
        let results = vec![frame_result(7)];
        assert_eq!(
            containment_stats(&results, &[], 10.0),
            Err(EvalError::JoinMismatch { frame_id: 7 })
        );
    }

    #[test]
    fn paper_scale_counts_reproduce_reported_rates() {
        let report = EvalReport::from_counts(349, 349, 345, 349, 74, 0);
        assert!((report.containment_rate - 0.98853868).abs() < 1e-6);
        assert!((report.vector_hit_rate - 0.21203438).abs() < 1e-6);
    }
}
