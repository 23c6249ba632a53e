use std::f64::consts::TAU;

use proptest::prelude::*;
use reflectprob::analytic::NetworkConfig;
use reflectprob::geometry::{
    intersect_slope_polar, line_through, mid_perpendicular, object_from_params, same_side, side_of,
    GeneralLine, Point2, PolarLine, SideClassification,
};
use reflectprob::montecarlo::{check_event1, check_event1_crossing, check_event2};

const R: f64 = 30.0;
const TIE: f64 = 1e-12;

fn disk_point() -> impl Strategy<Value = Point2> {
    (0.0..1.0f64, 0.0..TAU).prop_map(|(u, a)| {
        let r = R * u.sqrt();
        Point2::new(r * a.cos(), r * a.sin())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn centre_round_trips(u in 0.0..=1.0f64, alpha in 0.0..TAU, len in 0.1..40.0f64) {
        let obj = object_from_params(u, alpha, len, R).unwrap();
        let mid = obj.end1.midpoint(obj.end2);
        prop_assert!((mid.x - obj.center.x).abs() < 1e-12 * R);
        prop_assert!((mid.y - obj.center.y).abs() < 1e-12 * R);
        let span = ((obj.end1.x - obj.end2.x).powi(2) + (obj.end1.y - obj.end2.y).powi(2)).sqrt();
        prop_assert!((span - len).abs() < 1e-9 * len.max(1.0));
        prop_assert!((obj.p() - R * u.sqrt()).abs() < 1e-12 * R);
        // both endpoints sit on the object's support line
        let line = obj.support_line();
        prop_assert!(line.signed_offset(obj.end1).abs() < 1e-9 * R);
        prop_assert!(line.signed_offset(obj.end2).abs() < 1e-9 * R);
    }

    #[test]
    fn side_matches_y_comparison(m in -50.0..50.0f64, z in -30.0..30.0f64, pt in disk_point()) {
        let line = GeneralLine::new(-m, 1.0, -z).unwrap();
        let y_line = m * pt.x + z;
        prop_assume!((pt.y - y_line).abs() > TIE * (1.0 + y_line.abs()));
        let expected = if pt.y > y_line { SideClassification::Above } else { SideClassification::Below };
        prop_assert_eq!(side_of(&line, pt).unwrap(), expected);
        // scaling by a negative factor must not flip the classification
        let flipped = GeneralLine::new(2.0 * m, -2.0, 2.0 * z).unwrap();
        prop_assert_eq!(side_of(&flipped, pt).unwrap(), expected);
    }

    #[test]
    fn intersection_lies_on_both_lines(a in disk_point(), b in disk_point(), p in 0.0..R, alpha in 0.0..TAU) {
        let Ok(line) = line_through(a, b) else { return Ok(()) };
        prop_assume!(line.m.abs() < 1e3);
        let polar = PolarLine::new(p, alpha);
        if let Ok(pt) = intersect_slope_polar(&line, &polar) {
            prop_assume!(pt.norm() < 1e3 * R);
            let scale = R.max(pt.norm());
            prop_assert!(line.residual(pt).abs() < 1e-9 * scale * (1.0 + line.m.abs()));
            prop_assert!(polar.signed_offset(pt).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn same_side_is_symmetric(a in disk_point(), b in disk_point(), p in 0.0..R, alpha in 0.0..TAU) {
        let line = PolarLine::new(p, alpha);
        prop_assert_eq!(same_side(a, b, &line), same_side(b, a, &line));
        prop_assert!(same_side(a, a, &line) || line.signed_offset(a) == 0.0);
    }

    #[test]
    fn event1_predicates_agree(tx in disk_point(), rx in disk_point(), u in 0.0..=1.0f64, alpha in 0.0..TAU) {
        let Ok(cfg) = NetworkConfig::new(R, tx, rx) else { return Ok(()) };
        prop_assume!(cfg.slope_rotation().is_ok());
        let obj = object_from_params(u, alpha, 5.0, R).unwrap();
        let line = obj.support_line();
        prop_assume!(line.signed_offset(tx).abs() > TIE * R && line.signed_offset(rx).abs() > TIE * R);
        prop_assert_eq!(check_event1(&cfg, &obj), check_event1_crossing(&cfg, &obj));
    }

    #[test]
    fn event2_matches_parametric_crossing(tx in disk_point(), rx in disk_point(), u in 0.0..=1.0f64, alpha in 0.0..TAU, len in 0.5..40.0f64) {
        let Ok(cfg) = NetworkConfig::new(R, tx, rx) else { return Ok(()) };
        prop_assume!(cfg.slope_rotation().is_ok());
        let obj = object_from_params(u, alpha, len, R).unwrap();
        // signed distance to the perpendicular bisector, linear along the segment
        let dir = Point2::new(rx.x - tx.x, rx.y - tx.y);
        let mid = tx.midpoint(rx);
        let h = |q: Point2| (q.x - mid.x) * dir.x + (q.y - mid.y) * dir.y;
        let (h1, h2) = (h(obj.end1), h(obj.end2));
        prop_assume!((h1 - h2).abs() > TIE * R * dir.norm());
        let t = h1 / (h1 - h2);
        prop_assume!(t.abs() > TIE && (t - 1.0).abs() > TIE);
        prop_assert_eq!(check_event2(&cfg, &obj), (0.0..=1.0).contains(&t));
    }
}

#[test]
fn mid_perpendicular_is_equidistant() {
    let (tx, rx) = (Point2::new(0.0, 3.0), Point2::new(20.0, 20.0));
    let mp = mid_perpendicular(tx, rx).unwrap();
    for x in [-30.0, -3.0, 0.0, 7.5, 29.0] {
        let q = Point2::new(x, mp.y_at(x));
        let dt = ((q.x - tx.x).powi(2) + (q.y - tx.y).powi(2)).sqrt();
        let dr = ((q.x - rx.x).powi(2) + (q.y - rx.y).powi(2)).sqrt();
        assert!((dt - dr).abs() < 1e-10 * dt);
    }
}
