//! Pose landmark input: one whitespace-separated record per frame,
//! `frame_id arm elbow_x elbow_y elbow_conf wrist_x wrist_y wrist_conf`.
//!
//! A record of `<frame_id> -` (or a bare `-`, which takes the next
//! sequential id) marks a frame where no pose was found. Blank lines and
//! `#` comments are skipped. Frame ids must be strictly increasing.

use crate::geometry::Point2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseLandmarks {
    pub frame_id: u64,
    pub arm: Arm,
    pub elbow: Point2,
    pub wrist: Point2,
    pub elbow_conf: f64,
    pub wrist_conf: f64,
}

#[derive(Debug, Error, PartialEq)]
#[error("landmark stream line {line}: {msg}")]
pub struct LandmarkError {
    pub line: usize,
    pub msg: String,
}

/// Parses a landmark stream into `(frame_id, pose)` entries in order.
pub fn parse_landmark_stream(
    text: &str,
) -> Result<Vec<(u64, Option<PoseLandmarks>)>, LandmarkError> {
    let mut entries: Vec<(u64, Option<PoseLandmarks>)> = Vec::new();
    let mut next_id: u64 = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| LandmarkError { line, msg };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();

        let (frame_id, rest): (u64, &[&str]) = if tokens[0] == "-" {
            (next_id, &tokens[1..])
        } else {
            let id = tokens[0]
                .parse()
                .map_err(|_| err(format!("bad frame id '{}'", tokens[0])))?;
            (id, &tokens[1..])
        };
        if let Some(&(prev, _)) = entries.last() {
            if frame_id <= prev {
                return Err(err(format!(
                    "frame id {frame_id} does not increase past {prev}"
                )));
            }
        }
        next_id = frame_id + 1;

        let pose = match rest {
            [] | ["-"] => None,
            [arm, ex, ey, ec, wx, wy, wc] => {
                let arm = match *arm {
                    "right" => Arm::Right,
                    "left" => Arm::Left,
                    other => return Err(err(format!("bad arm '{other}'"))),
                };
                let num = |tok: &str, what: &str| -> Result<f64, LandmarkError> {
                    let v: f64 = tok
                        .parse()
                        .map_err(|_| err(format!("bad {what} '{tok}'")))?;
                    if !v.is_finite() {
                        return Err(err(format!("non-finite {what} '{tok}'")));
                    }
                    Ok(v)
                };
                let conf = |tok: &str, what: &str| -> Result<f64, LandmarkError> {
                    let v = num(tok, what)?;
                    if !(0.0..=1.0).contains(&v) {
                        return Err(err(format!("{what} {v} outside [0, 1]")));
                    }
                    Ok(v)
                };
                Some(PoseLandmarks {
                    frame_id,
                    arm,
                    elbow: Point2::new(num(ex, "elbow x")?, num(ey, "elbow y")?),
                    wrist: Point2::new(num(wx, "wrist x")?, num(wy, "wrist y")?),
                    elbow_conf: conf(ec, "elbow confidence")?,
                    wrist_conf: conf(wc, "wrist confidence")?,
                })
            }
            _ => {
                return Err(err(format!(
                    "expected 8 fields or a no-pose marker, got {} fields",
                    tokens.len()
                )))
            }
        };
        entries.push((frame_id, pose));
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_records_and_markers() {
        let text = "\
# stream header comment
0 right 170 240 0.9 200 240 0.95
1 -
- left 10 20 0.5 30 40 0.6  # inline comment

5 right 0 0 1 1 1 1
";
        let entries = parse_landmark_stream(text).unwrap();
        assert_eq!(entries.len(), 4);
        let first = entries[0].1.unwrap();
        assert_eq!(first.frame_id, 0);
        assert_eq!(first.arm, Arm::Right);
        assert_eq!(first.elbow, Point2::new(170.0, 240.0));
        assert_eq!(first.wrist, Point2::new(200.0, 240.0));
        assert_eq!(first.wrist_conf, 0.95);
        assert_eq!(entries[1], (1, None));
        // bare `-` id takes the next sequential value
        assert_eq!(entries[2].0, 2);
        assert_eq!(entries[2].1.unwrap().arm, Arm::Left);
        assert_eq!(entries[3].0, 5);
    }

    #[test]
    fn rejects_malformed_rows_with_line_numbers() {
        let no_increase = "3 -\n3 -\n";
        assert_eq!(parse_landmark_stream(no_increase).unwrap_err().line, 2);

        let bad_arm = "0 up 1 2 0.5 3 4 0.5\n";
        assert!(parse_landmark_stream(bad_arm)
            .unwrap_err()
            .msg
            .contains("arm"));

        let bad_conf = "0 right 1 2 1.5 3 4 0.5\n";
        assert!(parse_landmark_stream(bad_conf)
            .unwrap_err()
            .msg
            .contains("confidence"));

        let short = "0 right 1 2 0.5\n";
        assert!(parse_landmark_stream(short).is_err());

        let nan = "0 right nan 2 0.5 3 4 0.5\n";
        assert!(parse_landmark_stream(nan).is_err());
    }

    #[test]
    fn empty_stream_is_empty() {
        assert_eq!(parse_landmark_stream("").unwrap(), vec![]);
        assert_eq!(
            parse_landmark_stream("# only comments\n\n").unwrap(),
            vec![]
        );
    }
}
