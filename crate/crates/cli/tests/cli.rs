use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_reflectprob");
const HEADER: &str = "sweep_value,pr_e1_a1,pr_e1_a2,pr_e2,pr_e3_upper,mc_e1,mc_e1_se,mc_e2,mc_e2_se,mc_e3,mc_e3_se,n,seed";

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn columns(csv: &str) -> Vec<Vec<f64>> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(HEADER));
    lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn sweep_to(path: &Path) -> Output {
    run(&[
        "sweep-length",
        "--samples",
        "50000",
        "--seed",
        "17",
        "--out",
        path.to_str().unwrap(),
    ])
}

#[test]
fn length_sweep_is_reproducible_and_shaped() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert!(sweep_to(&a).status.success());
    assert!(sweep_to(&b).status.success());
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.as_bytes(), std::fs::read(&b).unwrap().as_slice());

    let rows = columns(&text);
    assert_eq!(rows.len(), 5);
    for (i, r) in rows.iter().enumerate() {
        assert!((r[1] - rows[0][1]).abs() < 1e-6 && (r[2] - rows[0][2]).abs() < 1e-6);
        assert!(r[1..11].iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(r[9] <= r[5].min(r[7]));
        assert_eq!(r[12], 17.0 + i as f64);
    }
    for w in rows.windows(2) {
        assert!(w[1][3] >= w[0][3] - 1e-6);
    }
}

#[test]
fn tx_sweep_defaults_and_bound() {
    let out = run(&["sweep-tx", "--samples", "20000", "--txx", "2,6,10,14,18"]);
    assert!(out.status.success());
    let rows = columns(&String::from_utf8(out.stdout).unwrap());
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(xs, [2.0, 6.0, 10.0, 14.0, 18.0]);
    for r in &rows {
        let slack = 4.0 * r[6].max(r[8]);
        assert!(r[9] <= r[4] + slack);
    }
}

#[test]
fn longer_objects_reflect_more_along_tx_sweep() {
    let pr_e2 = |len: &str| {
        let out = run(&["sweep-tx", "--samples", "1000", "--length", len]);
        assert!(out.status.success());
        columns(&String::from_utf8(out.stdout).unwrap())
            .into_iter()
            .map(|r| r[3])
            .collect::<Vec<_>>()
    };
    for (short, long) in pr_e2("5").iter().zip(pr_e2("20")) {
        assert!(long > *short);
    }
}

#[test]
fn json_mirrors_rows() {
    let out = run(&[
        "point",
        "--samples",
        "1000",
        "--json",
        "--tx",
        "-3,4",
        "--rx",
        "5,5",
    ]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["sweep_value"], 5.0);
    assert_eq!(rows[0]["n"], 1000);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "samples = 2000\nseed = 5\nlengths = [3.0, 4.0]\n").unwrap();
    let out = run(&[
        "sweep-length",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "9",
        "--show-config",
    ]);
    assert!(out.status.success());
    let shown = String::from_utf8(out.stdout).unwrap();
    assert!(shown.contains("seed = 9"));
    assert!(shown.contains("samples = 2000"));
    assert!(shown.contains("lengths = [3.0, 4.0]"));
    assert!(shown.contains("rnet = 30.0"));

    let out = run(&["sweep-length", "--config", cfg.to_str().unwrap()]);
    let rows = columns(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][11], 2000.0);
}

#[test]
fn small_validation_passes() {
    let out = run(&["validate", "--configs", "5", "--samples", "20000"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("5 of 5 configs passed"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["validate", "--configs", "0"][..],
        &["sweep-tx", "--txx", "2,40"],
        &["sweep-length", "--lengths", "1,-2"],
        &["point", "--tx", "0,0", "--rx", "0,0"],
        &["point", "--samples", "0"],
        &["point", "--bogus"],
        &["sweep-length", "--config", "/nonexistent/run.toml"],
    ] {
        let out = run(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let out = run(&[
        "point",
        "--samples",
        "100",
        "--out",
        "/nonexistent/dir/out.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
}
