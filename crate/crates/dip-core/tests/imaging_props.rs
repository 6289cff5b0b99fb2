//! Property tests for the raster toolkit: format round-trips, kernel
//! invariants, and parallel/sequential identity.

use dip_core::imaging::{
    canny, canny_seq, corner_response, corner_response_seq, detect_keypoints_with, gaussian_blur,
    gaussian_blur_seq, load_image, save_image, CannyParams, ImageBuffer,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_image(seed: u64, width: u32, height: u32, channels: u8) -> ImageBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..width as usize * height as usize * channels as usize)
        .map(|_| rng.random())
        .collect();
    ImageBuffer::new(width, height, channels, data).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pnm_file_round_trip(
        seed in 0u64..1000,
        w in 1u32..40,
        h in 1u32..40,
        rgb in proptest::bool::ANY,
    ) {
        let img = random_image(seed, w, h, if rgb { 3 } else { 1 });
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(if rgb { "t.ppm" } else { "t.pgm" });
        save_image(&img, &path).unwrap();
        let back = load_image(&path).unwrap();
        prop_assert_eq!(back.width(), img.width());
        prop_assert_eq!(back.height(), img.height());
        prop_assert_eq!(back.channels(), img.channels());
        prop_assert_eq!(back.data(), img.data());
        // canonical encoding: saving the reload is byte-identical
        let path2 = dir.path().join("u.pnm");
        save_image(&back, &path2).unwrap();
        prop_assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
    }

    #[test]
    fn blur_fixes_constant_images(
        level in 0u8..=255,
        sigma in 0.5..3.0f64,
        w in 3u32..32,
        h in 3u32..32,
    ) {
        let img = ImageBuffer::filled(w, h, 1, level);
        let out = gaussian_blur(&img, sigma);
        prop_assert!(out.data().iter().all(|&v| v == level));
    }

    #[test]
    fn blur_parallel_matches_sequential(
        seed in 0u64..1000,
        w in 3u32..48,
        h in 3u32..48,
        sigma in 0.5..3.0f64,
    ) {
        let img = random_image(seed, w, h, 1);
        let par = gaussian_blur(&img, sigma);
        let seq = gaussian_blur_seq(&img, sigma);
        prop_assert_eq!(par.data(), seq.data());
    }

    #[test]
    fn canny_parallel_matches_sequential(
        seed in 0u64..1000,
        w in 8u32..64,
        h in 8u32..64,
    ) {
        let img = random_image(seed, w, h, 1);
        let p = CannyParams::default();
        let a = canny(&img, p.low, p.high, p.sigma);
        let b = canny_seq(&img, p.low, p.high, p.sigma);
        prop_assert_eq!(a.edge_pixels().collect::<Vec<_>>(), b.edge_pixels().collect::<Vec<_>>());
    }

    #[test]
    fn corner_response_parallel_matches_sequential(
        seed in 0u64..1000,
        w in 8u32..48,
        h in 8u32..48,
    ) {
        let img = random_image(seed, w, h, 1);
        let a = corner_response(&img, 0.04, 1.5);
        let b = corner_response_seq(&img, 0.04, 1.5);
        prop_assert_eq!(a.data, b.data);
    }

    #[test]
    fn masked_keypoints_equal_filtered_unmasked(
        seed in 0u64..200,
        x0 in 5u32..40,
        y0 in 5u32..40,
    ) {
        // structured squares on noise so keypoints exist
        let mut img = random_image(seed, 96, 96, 1);
        for y in y0..y0 + 20 {
            for x in x0..x0 + 20 {
                img.put_pixel(x, y, &[250]);
            }
        }
        for y in 60..80u32 {
            for x in 55..85u32 {
                img.put_pixel(x, y, &[5]);
            }
        }
        let resp = corner_response(&img, 0.04, 1.5);
        let mask = |x: u32, y: u32| (x + y) % 3 != 0;
        let masked = detect_keypoints_with(&resp, 1e4, 5, Some(&mask));
        let unmasked = detect_keypoints_with(&resp, 1e4, 5, None);
        let filtered: Vec<_> = unmasked.into_iter().filter(|k| mask(k.x, k.y)).collect();
        prop_assert_eq!(masked, filtered);
    }
}

#[test]
fn canny_hysteresis_audit_on_random_scenes() {
    // every reported edge must trace back to a strong seed through weak
    // neighbors; verified by re-running the reachability from scratch
    for seed in 0..6u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed * 911 + 17);
        let mut img = ImageBuffer::filled(160, 120, 1, 120);
        for _ in 0..4 {
            let x0: u32 = rng.random_range(5..100);
            let y0: u32 = rng.random_range(5..70);
            let side: u32 = rng.random_range(10..40);
            let level: u8 = if rng.random() { 240 } else { 10 };
            for y in y0..(y0 + side).min(119) {
                for x in x0..(x0 + side).min(159) {
                    img.put_pixel(x, y, &[level]);
                }
            }
        }
        let params = CannyParams::default();
        let stages = dip_core::imaging::canny_stages(&img, params.low, params.high, params.sigma);
        let edges = &stages.edges;
        let nms = &stages.nms_magnitude;
        let (w, h) = (edges.width() as i64, edges.height() as i64);
        let at = |x: i64, y: i64| nms.data[(y * w + x) as usize] as f64;

        // all edges meet the weak threshold
        for (x, y) in edges.edge_pixels() {
            assert!(
                at(x as i64, y as i64) >= params.low,
                "weak edge at ({x},{y})"
            );
        }
        // reachability from strong seeds covers every edge pixel
        let mut reach = vec![false; (w * h) as usize];
        let mut stack = Vec::new();
        for (x, y) in edges.edge_pixels() {
            if at(x as i64, y as i64) >= params.high {
                reach[(y as i64 * w + x as i64) as usize] = true;
                stack.push((x as i64, y as i64));
            }
        }
        while let Some((x, y)) = stack.pop() {
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    let idx = (ny * w + nx) as usize;
                    if !reach[idx] && edges.is_edge(nx as u32, ny as u32) {
                        reach[idx] = true;
                        stack.push((nx, ny));
                    }
                }
            }
        }
        for (x, y) in edges.edge_pixels() {
            assert!(
                reach[(y as i64 * w + x as i64) as usize],
                "orphan edge at ({x},{y}) seed {seed}"
            );
        }
    }
}
