//! Property tests for the geometry layer.

use dip_core::geometry::{
    angular_difference, build_area_of_interest, circular_mean, clip_triangle_to_image,
    extend_pointing_segment, point_in_triangle, segment_intersects_rect, Point2, Rect, Triangle,
};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn finite_coord() -> impl Strategy<Value = f64> {
    -1e4..1e4f64
}

fn point() -> impl Strategy<Value = Point2> {
    (finite_coord(), finite_coord()).prop_map(|(x, y)| Point2::new(x, y))
}

proptest! {
    #[test]
    fn extension_is_collinear_with_scaled_length(
        e in point(),
        w in point(),
        sf in 0.1..50.0f64,
    ) {
        prop_assume!(w.distance(e) > 1e-3);
        let ext = extend_pointing_segment(e, w, sf).unwrap();
        let d = w - e;
        let de = ext - w;
        // collinearity: cross product vanishes relative to the magnitudes
        let cross = d.cross(de).abs();
        let scale = d.norm() * de.norm();
        prop_assert!(cross <= 1e-9 * scale.max(1.0), "cross {cross} at scale {scale}");
        // length law
        let expected = sf * d.norm();
        prop_assert!(
            (de.norm() - expected).abs() <= 1e-9 * expected.max(1.0),
            "{} vs {expected}", de.norm()
        );
        // extension lies on the far side of the wrist
        prop_assert!(de.dot(d) > 0.0);
    }

    #[test]
    fn aoi_translates_with_its_inputs(
        e in point(),
        w in point(),
        shift in point(),
        sf in 0.5..20.0f64,
        c in 1.0..300.0f64,
        eps in 0.0..20.0f64,
    ) {
        prop_assume!(w.distance(e) > 1e-3);
        let ext = extend_pointing_segment(e, w, sf).unwrap();
        let base = build_area_of_interest(w, ext, c, eps);
        prop_assume!(base.is_ok());
        let base = base.unwrap();

        let (es, ws) = (e + shift, w + shift);
        let exts = extend_pointing_segment(es, ws, sf).unwrap();
        let moved = build_area_of_interest(ws, exts, c, eps).unwrap();

        for (a, b) in base.vertices().iter().zip(moved.vertices().iter()) {
            let back = *b - shift;
            prop_assert!(
                a.distance(back) <= 1e-6 * (1.0 + a.norm() + shift.norm()),
                "{a:?} vs {back:?}"
            );
        }
    }

    #[test]
    fn containment_matches_barycentric_oracle(
        a in point(),
        b in point(),
        c in point(),
        p in point(),
    ) {
        let t = Triangle::new(a, b, c);
        let den = (b - a).cross(c - a);
        prop_assume!(den.abs() > 1e-3);
        let u = (p - a).cross(c - a) / den;
        let v = (b - a).cross(p - a) / den;
        let w = 1.0 - u - v;
        // skip points near the boundary where float noise flips the answer
        let margin = 1e-7;
        prop_assume!(u.abs() > margin && v.abs() > margin && w.abs() > margin);
        prop_assume!((u - 1.0).abs() > margin && (v - 1.0).abs() > margin && (w - 1.0).abs() > margin);
        let oracle = u > 0.0 && v > 0.0 && w > 0.0;
        prop_assert_eq!(point_in_triangle(p, &t), oracle);
    }

    #[test]
    fn angular_difference_properties(
        a in 0.0..TAU,
        b in 0.0..TAU,
        c in 0.0..TAU,
        k in -3i32..=3,
    ) {
        let dab = angular_difference(a, b);
        prop_assert!((0.0..=std::f64::consts::PI + 1e-12).contains(&dab));
        prop_assert!((dab - angular_difference(b, a)).abs() <= 1e-12);
        // invariant under full turns
        let shifted = angular_difference(a + k as f64 * TAU, b);
        prop_assert!((dab - shifted).abs() <= 1e-9);
        // triangle inequality on the circle
        let dac = angular_difference(a, c);
        let dcb = angular_difference(c, b);
        prop_assert!(dab <= dac + dcb + 1e-9);
    }

    #[test]
    fn circular_mean_rotates_with_its_inputs(
        base in proptest::collection::vec(0.0..TAU, 1..12),
        rot in 0.0..TAU,
    ) {
        // a near-zero resultant makes the mean ill-conditioned; skip those
        let (s, c): (f64, f64) = base.iter().fold((0.0, 0.0), |(s, c), a| (s + a.sin(), c + a.cos()));
        prop_assume!(s.hypot(c) > 0.1 * base.len() as f64);
        let mean = circular_mean(&base).unwrap();
        let rotated: Vec<f64> = base.iter().map(|a| (a + rot).rem_euclid(TAU)).collect();
        let mean_rot = circular_mean(&rotated).unwrap();
        let diff = angular_difference(mean_rot, (mean + rot).rem_euclid(TAU));
        prop_assert!(diff <= 1e-6, "mean {mean}, rotated mean {mean_rot}, rot {rot}");
    }

    #[test]
    fn segment_with_endpoint_inside_rect_intersects(
        p0 in point(),
        cx in -100.0..100.0f64,
        cy in -100.0..100.0f64,
        hw in 1.0..50.0f64,
        hh in 1.0..50.0f64,
    ) {
        let r = Rect { x_min: cx - hw, y_min: cy - hh, x_max: cx + hw, y_max: cy + hh };
        let inside = Point2::new(cx, cy);
        prop_assert!(segment_intersects_rect(p0, inside, &r));
        prop_assert!(segment_intersects_rect(inside, p0, &r));
    }

    #[test]
    fn clipped_region_stays_in_frame(
        e in point(),
        w in point(),
        sf in 0.5..20.0f64,
        c in 1.0..300.0f64,
    ) {
        prop_assume!(w.distance(e) > 1e-2);
        let ext = extend_pointing_segment(e, w, sf).unwrap();
        let aoi = build_area_of_interest(w, ext, c, 5.0);
        prop_assume!(aoi.is_ok());
        if let Ok(region) = clip_triangle_to_image(&aoi.unwrap(), 640, 480) {
            prop_assert!(region.x0 <= region.x1 && region.x1 < 640);
            prop_assert!(region.y0 <= region.y1 && region.y1 < 480);
        }
    }
}

#[test]
fn reference_triangle_is_bit_exact() {
    let e = Point2::new(170.0, 240.0);
    let w = Point2::new(200.0, 240.0);
    let ext = extend_pointing_segment(e, w, 10.0).unwrap();
    assert_eq!(ext, Point2::new(500.0, 240.0));
    let aoi = build_area_of_interest(w, ext, 100.0, 5.0).unwrap();
    assert_eq!(aoi.apex, Point2::new(195.0, 245.0));
    assert_eq!(aoi.base_top, Point2::new(500.0, 140.0));
    assert_eq!(aoi.base_bottom, Point2::new(500.0, 340.0));
}
