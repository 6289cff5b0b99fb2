//! End-to-end pipeline tests: file I/O through the frame pipeline, session
//! folding, and machine-output round-trips.

use dip_core::eval::{containment_stats, GroundTruth};
use dip_core::geometry::Rect;
use dip_core::imaging::{load_image, save_image};
use dip_core::pipeline::{
    parse_landmark_stream, run_session, DipConfig, FrameInput, FrameResult, SessionOptions,
    SessionOutcome,
};
use dip_core::synth::{corpus, evaluate_corpus, moving_blob_sequence};
use dip_core::tracking::{init_tracker, track, TrackerParams};
use std::fmt::Write as _;

#[test]
fn corpus_survives_a_disk_round_trip() {
    // frames written as PGM, landmarks as a text stream, then re-read and
    // run as a session; results must match the in-memory run exactly
    let cfg = DipConfig::default();
    let frames = corpus(21, 6, &cfg);
    let dir = tempfile::tempdir().unwrap();

    let mut stream = String::new();
    for f in &frames {
        let path = dir
            .path()
            .join(format!("frame_{:06}.pgm", f.truth.frame_id));
        save_image(&f.frame, &path).unwrap();
        match &f.landmarks {
            Some(lm) => writeln!(
                stream,
                "{} right {} {} {} {} {} {}",
                lm.frame_id,
                lm.elbow.x,
                lm.elbow.y,
                lm.elbow_conf,
                lm.wrist.x,
                lm.wrist.y,
                lm.wrist_conf
            )
            .unwrap(),
            None => writeln!(stream, "{} -", f.truth.frame_id).unwrap(),
        }
    }

    let entries = parse_landmark_stream(&stream).unwrap();
    assert_eq!(entries.len(), frames.len());
    let inputs = entries.iter().map(|(frame_id, lm)| {
        let path = dir.path().join(format!("frame_{frame_id:06}.pgm"));
        load_image(&path).map(|frame| FrameInput {
            frame_id: *frame_id,
            frame,
            landmarks: *lm,
        })
    });
    let from_disk = run_session(
        inputs,
        &cfg,
        &SessionOptions {
            track: false,
            ..SessionOptions::default()
        },
    )
    .unwrap();

    let in_memory = run_session(
        frames.iter().map(|f| {
            Ok::<_, std::convert::Infallible>(FrameInput {
                frame_id: f.truth.frame_id,
                frame: f.frame.clone(),
                landmarks: f.landmarks,
            })
        }),
        &cfg,
        &SessionOptions {
            track: false,
            ..SessionOptions::default()
        },
    )
    .unwrap();

    assert_eq!(from_disk.confirmed_frame, in_memory.confirmed_frame);
    assert_eq!(from_disk.results.len(), in_memory.results.len());
    for (a, b) in from_disk.results.iter().zip(in_memory.results.iter()) {
        assert_eq!(a.gate, b.gate);
        assert_eq!(
            a.detection.map(|d| (d.point, d.bbox)),
            b.detection.map(|d| (d.point, d.bbox))
        );
    }
}

#[test]
fn session_outcome_json_round_trips() {
    let cfg = DipConfig::default();
    let frames = corpus(33, 4, &cfg);
    let outcome = run_session(
        frames.iter().map(|f| {
            Ok::<_, std::convert::Infallible>(FrameInput {
                frame_id: f.truth.frame_id,
                frame: f.frame.clone(),
                landmarks: f.landmarks,
            })
        }),
        &cfg,
        &SessionOptions::default(),
    )
    .unwrap();

    let json = serde_json::to_string_pretty(&outcome).unwrap();
    let back: SessionOutcome = serde_json::from_str(&json).unwrap();
    let json2 = serde_json::to_string_pretty(&back).unwrap();
    assert_eq!(json, json2, "JSON must round-trip byte-identically");
    assert_eq!(back.confirmed_frame, outcome.confirmed_frame);

    let row: FrameResult =
        serde_json::from_str(&serde_json::to_string(&outcome.results[0]).unwrap()).unwrap();
    assert_eq!(row.frame_id, outcome.results[0].frame_id);
}

#[test]
fn corpus_results_join_cleanly_with_truth() {
    let cfg = DipConfig::default();
    let frames = corpus(8, 48, &cfg);
    let results = evaluate_corpus(&frames, &cfg);
    let truth: Vec<GroundTruth> = frames.iter().map(|f| f.truth).collect();
    let report = containment_stats(&results, &truth, 10.0).unwrap();
    assert_eq!(report.n_frames, 48);
    assert!(report.containment_rate >= 0.98, "{report:?}");
    assert!(
        report.containment_rate >= report.vector_hit_rate,
        "{report:?}"
    );
    assert!(report.detection_rate >= 0.9, "{report:?}");
}

#[test]
fn tracker_follows_the_synthetic_blob_sequence() {
    let frames = moving_blob_sequence(99, 30, 3.0, None);
    let (first, center0) = &frames[0];
    let c0 = center0.unwrap();
    let seed = Rect::from_center_size(c0, 30.0, 30.0);
    let mut state = init_tracker(first, &seed, 16).unwrap();
    let params = TrackerParams::default();
    let mut hits = 0;
    for (frame, truth_center) in &frames[1..] {
        let window = track(&mut state, frame, &params).unwrap();
        let err = window.center().distance(truth_center.unwrap());
        if err <= 2.0 {
            hits += 1;
        }
    }
    assert!(hits >= 27, "only {hits}/29 frames within 2 px");
}

#[test]
fn tracking_session_reports_loss_after_vanish() {
    let frames = moving_blob_sequence(7, 20, 2.0, Some(12));
    let (first, center0) = &frames[0];
    let seed = Rect::from_center_size(center0.unwrap(), 30.0, 30.0);
    let mut state = init_tracker(first, &seed, 16).unwrap();
    let params = TrackerParams::default();
    let mut lost_at = None;
    for (i, (frame, _)) in frames.iter().enumerate().skip(1) {
        if track(&mut state, frame, &params).is_err() {
            lost_at = Some(i);
            break;
        }
    }
    let lost = lost_at.expect("tracker should lose the vanished blob");
    assert!((12..=15).contains(&lost), "lost at {lost}");
}
