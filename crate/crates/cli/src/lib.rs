//! Batch experiment driver: length and transmitter sweeps, single points and
//! a randomized analytic-vs-Monte-Carlo validation run.
//!
//! Every sweep produces one [`ResultRow`] per sweep value. Analytic columns come
//! from [`reflectprob::analytic`], Monte Carlo columns from
//! [`reflectprob::montecarlo`] with row `i` seeded by `seed + i`.

pub mod settings;

use std::f64::consts::TAU;
use std::io::Write;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reflectprob::analytic::{reflection_report, NetworkConfig};
use reflectprob::montecarlo::estimate;
use reflectprob::{Point2, QuadratureSpec, SampleSpec};
use serde::Serialize;

pub const CSV_HEADER: [&str; 13] = [
    "sweep_value",
    "pr_e1_a1",
    "pr_e1_a2",
    "pr_e2",
    "pr_e3_upper",
    "mc_e1",
    "mc_e1_se",
    "mc_e2",
    "mc_e2_se",
    "mc_e3",
    "mc_e3_se",
    "n",
    "seed",
];

/// Slopes outside `[1e-6, 1e6]` in magnitude are redrawn by the validation run.
const VALIDATE_SLOPE_RANGE: (f64, f64) = (1e-6, 1e6);

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{row}: {source}")]
    Compute {
        row: String,
        #[source]
        source: reflectprob::Error,
    },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit code: 2 for usage errors, 3 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    SweepLength,
    SweepTxX,
    Point,
    Validate,
}

/// Everything one invocation needs, after defaults, config file and flags are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub cfg: NetworkConfig,
    /// Object lengths for [`Mode::SweepLength`].
    pub lengths: Vec<f64>,
    /// Transmitter abscissas for [`Mode::SweepTxX`].
    pub tx_x_values: Vec<f64>,
    /// Transmitter ordinate held fixed by [`Mode::SweepTxX`].
    pub tx_y: f64,
    /// Object length for [`Mode::SweepTxX`] and [`Mode::Point`].
    pub length: f64,
    /// Number of random configurations for [`Mode::Validate`].
    pub configs: usize,
    pub sample_spec: SampleSpec,
    pub quad: QuadratureSpec,
    pub output_path: Option<PathBuf>,
    pub json: bool,
}

impl ExperimentSpec {
    pub fn validate(&self) -> CliResult<()> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        match self.mode {
            Mode::SweepLength if self.lengths.is_empty() => {
                return usage("--lengths must list at least one value".into())
            }
            Mode::SweepTxX if self.tx_x_values.is_empty() => {
                return usage("--txx must list at least one value".into())
            }
            Mode::Validate if self.configs == 0 => {
                return usage("--configs must be at least 1".into())
            }
            _ => {}
        }
        if let Some(bad) = self.lengths.iter().find(|l| **l <= 0.0 || !l.is_finite()) {
            return usage(format!("object lengths must be positive, got {bad}"));
        }
        if self.length <= 0.0 || !self.length.is_finite() {
            return usage(format!(
                "object length must be positive, got {}",
                self.length
            ));
        }
        self.sample_spec
            .validate()
            .and_then(|_| self.quad.validate())
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub pr_e1_a1: f64,
    pub pr_e1_a2: f64,
    pub pr_e2: f64,
    pub pr_e3_upper: f64,
    pub mc_e1: f64,
    pub mc_e1_se: f64,
    pub mc_e2: f64,
    pub mc_e2_se: f64,
    pub mc_e3: f64,
    pub mc_e3_se: f64,
    pub n: u64,
    pub seed: u64,
}

impl ResultRow {
    fn new(
        sweep_value: f64,
        cfg: &NetworkConfig,
        length: f64,
        spec: &ExperimentSpec,
        index: usize,
    ) -> CliResult<Self> {
        let seed = spec.sample_spec.seed.wrapping_add(index as u64);
        let row_name = || format!("row {index} (sweep value {sweep_value})");
        let analytic =
            reflection_report(cfg, length, &spec.quad).map_err(|source| CliError::Compute {
                row: row_name(),
                source,
            })?;
        let mc = estimate(
            cfg,
            length,
            &SampleSpec {
                seed,
                ..spec.sample_spec
            },
        )
        .map_err(|source| CliError::Compute {
            row: row_name(),
            source,
        })?;
        Ok(Self {
            sweep_value,
            pr_e1_a1: analytic.pr_event1_a1,
            pr_e1_a2: analytic.pr_event1_a2,
            pr_e2: analytic.pr_event2,
            pr_e3_upper: analytic.pr_event3_upper,
            mc_e1: mc.e1.value,
            mc_e1_se: mc.e1.std_err,
            mc_e2: mc.e2.value,
            mc_e2_se: mc.e2.std_err,
            mc_e3: mc.e3.value,
            mc_e3_se: mc.e3.std_err,
            n: mc.e1.n,
            seed,
        })
    }

    /// Largest of the three Monte Carlo standard errors.
    pub fn max_se(&self) -> f64 {
        self.mc_e1_se.max(self.mc_e2_se).max(self.mc_e3_se)
    }

    fn csv_record(&self) -> Vec<String> {
        let mut out: Vec<String> = [
            self.sweep_value,
            self.pr_e1_a1,
            self.pr_e1_a2,
            self.pr_e2,
            self.pr_e3_upper,
            self.mc_e1,
            self.mc_e1_se,
            self.mc_e2,
            self.mc_e2_se,
            self.mc_e3,
            self.mc_e3_se,
        ]
        .iter()
        .map(|&v| format_sig(v))
        .collect();
        out.push(self.n.to_string());
        out.push(self.seed.to_string());
        out
    }
}

/// Formats `x` with 12 significant digits, trailing zeros dropped, switching to
/// exponent notation outside `[1e-4, 1e12)`.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (DIGITS - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn run_sweep_length(spec: &ExperimentSpec) -> CliResult<Vec<ResultRow>> {
    spec.validate()?;
    spec.lengths
        .iter()
        .enumerate()
        .map(|(i, &l)| ResultRow::new(l, &spec.cfg, l, spec, i))
        .collect()
}

/// One row per `x` with Tx at `(x, tx_y)`; Rx and the object length stay fixed.
pub fn run_sweep_tx(spec: &ExperimentSpec) -> CliResult<Vec<ResultRow>> {
    spec.validate()?;
    let configs = spec
        .tx_x_values
        .iter()
        .map(|&x| {
            NetworkConfig::new(spec.cfg.r_net, Point2::new(x, spec.tx_y), spec.cfg.rx)
                .map_err(|e| CliError::Usage(format!("x_tx = {x}: {e}")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    spec.tx_x_values
        .iter()
        .zip(&configs)
        .enumerate()
        .map(|(i, (&x, cfg))| ResultRow::new(x, cfg, spec.length, spec, i))
        .collect()
}

pub fn run_point(spec: &ExperimentSpec) -> CliResult<ResultRow> {
    spec.validate()?;
    ResultRow::new(spec.length, &spec.cfg, spec.length, spec, 0)
}

/// Outcome of the checks for one random configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationCase {
    pub index: usize,
    pub cfg: NetworkConfig,
    pub length: f64,
    pub row: ResultRow,
    pub failures: Vec<String>,
}

impl ValidationCase {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationSummary {
    pub cases: Vec<ValidationCase>,
}

impl ValidationSummary {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(ValidationCase::passed)
    }

    pub fn failed(&self) -> usize {
        self.cases.iter().filter(|c| !c.passed()).count()
    }

    pub fn write_report(&self, out: &mut impl Write) -> std::io::Result<()> {
        for c in &self.cases {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            write!(
                out,
                "{status} config {:3}: tx=({}, {}) rx=({}, {}) L={}",
                c.index,
                format_sig(c.cfg.tx.x),
                format_sig(c.cfg.tx.y),
                format_sig(c.cfg.rx.x),
                format_sig(c.cfg.rx.y),
                format_sig(c.length),
            )?;
            if c.passed() {
                writeln!(out)?;
            } else {
                writeln!(out, " [{}]", c.failures.join("; "))?;
            }
        }
        writeln!(
            out,
            "{} of {} configs passed",
            self.cases.len() - self.failed(),
            self.cases.len()
        )
    }
}

fn random_disk_point(rng: &mut ChaCha8Rng, r_net: f64) -> Point2 {
    let r = r_net * rng.random::<f64>().sqrt();
    let a = TAU * rng.random::<f64>();
    Point2::new(r * a.cos(), r * a.sin())
}

/// Draws `configs` random Tx/Rx pairs in the disk (near-axis slopes redrawn) with
/// lengths uniform on `[1, r_net]`, reproducible from the sampling seed.
pub fn random_configs(r_net: f64, configs: usize, seed: u64) -> Vec<(NetworkConfig, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(configs);
    while out.len() < configs {
        let tx = random_disk_point(&mut rng, r_net);
        let rx = random_disk_point(&mut rng, r_net);
        let length = rng.random_range(1.0..=r_net.max(1.0));
        let m = ((tx.y - rx.y) / (tx.x - rx.x)).abs();
        if !(VALIDATE_SLOPE_RANGE.0..=VALIDATE_SLOPE_RANGE.1).contains(&m) {
            continue;
        }
        if let Ok(cfg) = NetworkConfig::new(r_net, tx, rx) {
            out.push((cfg, length));
        }
    }
    out
}

/// Cross-checks both Event-1 formulations, Event 2 and the Event-3 bound against
/// Monte Carlo on random configurations.
pub fn run_validate(spec: &ExperimentSpec) -> CliResult<ValidationSummary> {
    spec.validate()?;
    let cases = random_configs(spec.cfg.r_net, spec.configs, spec.sample_spec.seed)
        .into_iter()
        .enumerate()
        .map(|(i, (cfg, length))| {
            let row = ResultRow::new(length, &cfg, length, spec, i)?;
            Ok(ValidationCase {
                index: i,
                cfg,
                length,
                failures: validation_failures(&row),
                row,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(ValidationSummary { cases })
}

fn validation_failures(row: &ResultRow) -> Vec<String> {
    // NaN deltas count as failures
    let below = |d: f64, limit: f64| d < limit;
    let mut failures = Vec::new();
    let d12 = (row.pr_e1_a1 - row.pr_e1_a2).abs();
    if !below(d12, 1e-6) {
        failures.push(format!("|a1 - a2| = {d12:.3e} >= 1e-6"));
    }
    let d1 = (row.pr_e1_a2 - row.mc_e1).abs();
    if !below(d1, 4.0 * row.mc_e1_se) {
        failures.push(format!(
            "|a2 - mc_e1| = {d1:.3e} >= 4 se = {:.3e}",
            4.0 * row.mc_e1_se
        ));
    }
    let d2 = (row.pr_e2 - row.mc_e2).abs();
    if !below(d2, 4.0 * row.mc_e2_se) {
        failures.push(format!(
            "|pr_e2 - mc_e2| = {d2:.3e} >= 4 se = {:.3e}",
            4.0 * row.mc_e2_se
        ));
    }
    let slack = 4.0 * row.max_se();
    if row.mc_e3 > row.pr_e3_upper + slack || row.pr_e3_upper.is_nan() {
        failures.push(format!(
            "mc_e3 = {} exceeds bound {} + {slack:.3e}",
            format_sig(row.mc_e3),
            format_sig(row.pr_e3_upper)
        ));
    }
    failures
}

pub fn write_csv(rows: &[ResultRow], out: impl Write) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(rows: &[ResultRow], mut out: impl Write) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    Ok(())
}

/// Writes rows as CSV, or as a JSON record array when `spec.json` is set.
pub fn write_rows(spec: &ExperimentSpec, rows: &[ResultRow], out: impl Write) -> CliResult<()> {
    if spec.json {
        write_json(rows, out)
    } else {
        write_csv(rows, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(20.0), "20");
        assert_eq!(format_sig(0.779734274074123), "0.779734274074");
        assert_eq!(format_sig(0.0105646539201234), "0.0105646539201");
        assert_eq!(format_sig(4.12345678901234e-5), "4.12345678901e-5");
        assert_eq!(format_sig(-2.5), "-2.5");
        assert_eq!(format_sig(1e6), "1000000");
    }

    #[test]
    fn validation_flags_perturbed_rows() {
        let row = ResultRow {
            sweep_value: 5.0,
            pr_e1_a1: 0.78,
            pr_e1_a2: 0.78,
            pr_e2: 0.05,
            pr_e3_upper: 0.05,
            mc_e1: 0.7801,
            mc_e1_se: 4e-4,
            mc_e2: 0.0501,
            mc_e2_se: 2e-4,
            mc_e3: 0.033,
            mc_e3_se: 1.8e-4,
            n: 1_000_000,
            seed: 1,
        };
        assert!(validation_failures(&row).is_empty());
        let bad_a1 = ResultRow {
            pr_e1_a1: 0.78 + 2e-6,
            ..row
        };
        assert_eq!(validation_failures(&bad_a1).len(), 1);
        let bad_e2 = ResultRow {
            pr_e2: 0.052,
            pr_e3_upper: 0.052,
            ..row
        };
        assert_eq!(validation_failures(&bad_e2).len(), 1);
        let bad_bound = ResultRow { mc_e3: 0.06, ..row };
        assert_eq!(validation_failures(&bad_bound).len(), 1);
    }

    #[test]
    fn random_configs_are_reproducible_and_inside() {
        let a = random_configs(30.0, 20, 1);
        assert_eq!(a, random_configs(30.0, 20, 1));
        assert_ne!(a, random_configs(30.0, 20, 2));
        for (cfg, l) in a {
            assert!(cfg.tx.norm() <= 30.0 && cfg.rx.norm() <= 30.0);
            assert!((1.0..=30.0).contains(&l));
        }
    }
}
