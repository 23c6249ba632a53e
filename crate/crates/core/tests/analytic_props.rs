use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reflectprob::analytic::{
    frechet_upper, pr_event1_approach1, pr_event1_approach2, pr_event2, reflection_report,
    theta_kernel, NetworkConfig,
};
use reflectprob::{Point2, QuadratureSpec};

const R: f64 = 30.0;

fn random_config(rng: &mut ChaCha8Rng) -> NetworkConfig {
    loop {
        let mut pt = || {
            let r = R * rng.random::<f64>().sqrt();
            let a = TAU * rng.random::<f64>();
            Point2::new(r * a.cos(), r * a.sin())
        };
        let (tx, rx) = (pt(), pt());
        let m = (tx.y - rx.y) / (tx.x - rx.x);
        if m.is_finite() && (1e-6..=1e6).contains(&m.abs()) {
            return NetworkConfig::new(R, tx, rx).unwrap();
        }
    }
}

fn base_setup() -> NetworkConfig {
    NetworkConfig::new(R, Point2::new(0.0, 3.0), Point2::new(20.0, 20.0)).unwrap()
}

#[test]
fn theta_kernel_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let mu: [f64; 4] = std::array::from_fn(|_| rng.random_range(-0.5..1.5));
        let k = theta_kernel(mu[0], mu[1], mu[2], mu[3]);
        assert!((0.0..=1.0).contains(&k));
        // midpoint rule for the integral of 2v over the admissible v
        let steps = 2000;
        let brute: f64 = (0..steps)
            .map(|i| (i as f64 + 0.5) / steps as f64)
            .filter(|&v| v <= mu[0] && v <= mu[1] && v >= mu[2] && v >= mu[3])
            .map(|v| 2.0 * v / steps as f64)
            .sum();
        assert!((k - brute).abs() < 2e-3, "mu = {mu:?}: {k} vs {brute}");
    }
}

#[test]
fn approaches_agree_on_random_configs() {
    let quad = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..25 {
        let cfg = random_config(&mut rng);
        let a1 = pr_event1_approach1(&cfg, &quad).unwrap();
        let a2 = pr_event1_approach2(&cfg, &quad).unwrap();
        assert!((a1 - a2).abs() < 1e-6, "{cfg:?}: {a1} vs {a2}");
        assert!((0.0..=1.0).contains(&a1));
    }
}

#[test]
fn rotation_leaves_probabilities_unchanged() {
    let quad = QuadratureSpec::default();
    let base = reflection_report(&base_setup(), 5.0, &quad).unwrap();
    for angle in [0.3, PI / 2.0, 2.0, PI, 4.5] {
        let r = reflection_report(&base_setup().rotated(angle), 5.0, &quad).unwrap();
        assert!((r.pr_event1_a1 - base.pr_event1_a1).abs() < 1e-8);
        assert!((r.pr_event1_a2 - base.pr_event1_a2).abs() < 1e-8);
        assert!((r.pr_event2 - base.pr_event2).abs() < 1e-8);
    }
}

#[test]
fn swapping_tx_and_rx_is_invisible() {
    let quad = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let cfg = random_config(&mut rng);
        let a = reflection_report(&cfg, 10.0, &quad).unwrap();
        let b = reflection_report(&cfg.swapped(), 10.0, &quad).unwrap();
        assert!((a.pr_event1_a2 - b.pr_event1_a2).abs() < 1e-9);
        assert!((a.pr_event1_a1 - b.pr_event1_a1).abs() < 1e-9);
        assert!((a.pr_event2 - b.pr_event2).abs() < 1e-9);
    }
}

#[test]
fn event2_grows_with_length_and_vanishes_at_zero() {
    let quad = QuadratureSpec::default();
    let cfg = base_setup();
    let mut prev = 0.0;
    for l in [1e-6, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0, 45.0, 60.0] {
        let p = pr_event2(&cfg, l, &quad).unwrap();
        assert!(p >= prev - 1e-9, "L = {l}: {p} < {prev}");
        assert!((0.0..=1.0).contains(&p));
        prev = p;
    }
    assert!(pr_event2(&cfg, 1e-6, &quad).unwrap() < 1e-6);
}

#[test]
fn upper_bound_is_minimum() {
    assert_eq!(frechet_upper(0.3, 0.7), 0.3);
    assert_eq!(frechet_upper(0.9, 0.2), 0.2);
    let r = reflection_report(&base_setup(), 20.0, &QuadratureSpec::default()).unwrap();
    assert_eq!(r.pr_event3_upper, r.pr_event1_a2.min(r.pr_event2));
}

#[test]
fn bad_inputs_are_rejected() {
    let quad = QuadratureSpec::default();
    assert!(pr_event2(&base_setup(), 0.0, &quad).is_err());
    assert!(pr_event2(&base_setup(), f64::NAN, &quad).is_err());
    assert!(NetworkConfig::new(R, Point2::new(31.0, 0.0), Point2::ORIGIN).is_err());
}
