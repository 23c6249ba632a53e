//! Reference probabilities computed offline by an independent route: for each
//! orientation the admissible interval of p was found from the parametric
//! position of the crossing point along the segment, then integrated with an
//! adaptive scheme at 1e-12 relative tolerance.

use reflectprob::analytic::{pr_event1_approach1, pr_event1_approach2, pr_event2};
use reflectprob::{NetworkConfig, Point2, QuadratureSpec};

const TOL: f64 = 1e-8;

fn cfg(tx: (f64, f64), rx: (f64, f64)) -> NetworkConfig {
    NetworkConfig::new(30.0, Point2::new(tx.0, tx.1), Point2::new(rx.0, rx.1)).unwrap()
}

#[test]
fn event1_reference_values() {
    let q = QuadratureSpec::default();
    let cases = [
        ((0.0, 3.0), (20.0, 20.0), 0.779_734_274_074),
        ((2.0, 3.0), (0.0, 0.0), 0.996_388_888_889),
        ((10.0, 3.0), (0.0, 0.0), 0.969_722_222_222),
        ((20.0, 3.0), (0.0, 0.0), 0.886_388_888_889),
    ];
    for (tx, rx, expected) in cases {
        let c = cfg(tx, rx);
        let a1 = pr_event1_approach1(&c, &q).unwrap();
        let a2 = pr_event1_approach2(&c, &q).unwrap();
        assert!(
            (a1 - expected).abs() < TOL,
            "approach 1 {tx:?}: {a1} vs {expected}"
        );
        assert!(
            (a2 - expected).abs() < TOL,
            "approach 2 {tx:?}: {a2} vs {expected}"
        );
    }
}

#[test]
fn event2_reference_values() {
    let q = QuadratureSpec::default();
    let base_setup = cfg((0.0, 3.0), (20.0, 20.0));
    let cases = [
        (1.0, 0.010_564_653_920),
        (5.0, 0.053_058_715_136),
        (10.0, 0.107_580_979_382),
        (20.0, 0.226_639_153_061),
        (30.0, 0.367_529_832_553),
    ];
    for (length, expected) in cases {
        let v = pr_event2(&base_setup, length, &q).unwrap();
        assert!(
            (v - expected).abs() < TOL,
            "L = {length}: {v} vs {expected}"
        );
    }
    for (x, expected) in [
        (2.0, 0.098_797_487_238),
        (10.0, 0.087_886_049_336),
        (20.0, 0.070_585_125_559),
    ] {
        let v = pr_event2(&cfg((x, 3.0), (0.0, 0.0)), 5.0, &q).unwrap();
        assert!((v - expected).abs() < TOL, "x_tx = {x}: {v} vs {expected}");
    }
}
