//! Layered run settings: built-in defaults, then an optional TOML file, then
//! command-line flags.

use std::path::{Path, PathBuf};

use reflectprob::analytic::NetworkConfig;
use reflectprob::{Point2, QuadratureSpec, SampleSpec};
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult, ExperimentSpec, Mode};

/// Every tunable of a run. `None` means "not set at this layer".
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub rnet: Option<f64>,
    pub tx: Option<[f64; 2]>,
    pub rx: Option<[f64; 2]>,
    /// Transmitter ordinate for `sweep-tx`.
    pub ty: Option<f64>,
    /// Object length for `sweep-tx` and `point`.
    pub length: Option<f64>,
    pub lengths: Option<Vec<f64>>,
    pub txx: Option<Vec<f64>>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub workers: Option<usize>,
    pub configs: Option<usize>,
    pub out: Option<PathBuf>,
    pub json: Option<bool>,
}

macro_rules! overlay {
    ($top:expr, $base:expr, $($field:ident),*) => {
        Settings { $($field: $top.$field.or($base.$field)),* }
    };
}

impl Settings {
    pub fn from_toml_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: Settings) -> Settings {
        overlay!(
            self, base, rnet, tx, rx, ty, length, lengths, txx, samples, seed, tol, workers,
            configs, out, json
        )
    }

    /// Built-in defaults for `mode`: the length sweep and single points use
    /// Tx (0, 3), Rx (20, 20); the Tx sweep uses Rx at the origin, Tx at
    /// (x, 3) for x = 2, 4, ..., 20 and L = 5.
    pub fn defaults(mode: Mode) -> Settings {
        let sampling = SampleSpec::default();
        let (tx, rx) = match mode {
            Mode::SweepTxX => ([2.0, 3.0], [0.0, 0.0]),
            _ => ([0.0, 3.0], [20.0, 20.0]),
        };
        Settings {
            rnet: Some(30.0),
            tx: Some(tx),
            rx: Some(rx),
            ty: Some(3.0),
            length: Some(5.0),
            lengths: Some(vec![1.0, 5.0, 10.0, 20.0, 30.0]),
            txx: Some((1..=10).map(|k| 2.0 * k as f64).collect()),
            samples: Some(sampling.n_samples),
            seed: Some(sampling.seed),
            tol: Some(QuadratureSpec::default().rel_tol),
            workers: Some(sampling.workers),
            configs: Some(100),
            out: None,
            json: Some(false),
        }
    }

    /// Renders the settings as a TOML document accepted by `--config`.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("settings serialize to TOML")
    }

    /// Builds the experiment from settings already layered over [`Settings::defaults`].
    pub fn into_spec(self, mode: Mode) -> CliResult<ExperimentSpec> {
        let missing = |name: &str| CliError::Usage(format!("no value for {name}"));
        let point = |p: [f64; 2]| Point2::new(p[0], p[1]);
        let r_net = self.rnet.ok_or_else(|| missing("rnet"))?;
        let ty = self.ty.ok_or_else(|| missing("ty"))?;
        let tx_x_values = self.txx.ok_or_else(|| missing("txx"))?;
        let mut tx = point(self.tx.ok_or_else(|| missing("tx"))?);
        if mode == Mode::SweepTxX {
            // the sweep replaces Tx row by row; keep the base config consistent with row 0
            if let Some(&x) = tx_x_values.first() {
                tx = Point2::new(x, ty);
            }
        }
        let rx = point(self.rx.ok_or_else(|| missing("rx"))?);
        let cfg = NetworkConfig::new(r_net, tx, rx).map_err(|e| CliError::Usage(e.to_string()))?;
        let quad = QuadratureSpec {
            rel_tol: self.tol.ok_or_else(|| missing("tol"))?,
            ..QuadratureSpec::default()
        };
        let sample_spec = SampleSpec {
            n_samples: self.samples.ok_or_else(|| missing("samples"))?,
            seed: self.seed.ok_or_else(|| missing("seed"))?,
            workers: self.workers.ok_or_else(|| missing("workers"))?,
        };
        let spec = ExperimentSpec {
            mode,
            cfg,
            lengths: self.lengths.ok_or_else(|| missing("lengths"))?,
            tx_x_values,
            tx_y: ty,
            length: self.length.ok_or_else(|| missing("length"))?,
            configs: self.configs.ok_or_else(|| missing("configs"))?,
            sample_spec,
            quad,
            output_path: self.out,
            json: self.json.unwrap_or(false),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file: Settings =
            toml::from_str("seed = 7\nsamples = 1000\nlengths = [2.0, 4.0]").unwrap();
        let flags = Settings {
            seed: Some(9),
            ..Settings::default()
        };
        let s = flags.over(file).over(Settings::defaults(Mode::SweepLength));
        assert_eq!(s.seed, Some(9));
        assert_eq!(s.samples, Some(1000));
        assert_eq!(s.lengths, Some(vec![2.0, 4.0]));
        assert_eq!(s.rnet, Some(30.0));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<Settings>("sede = 1").is_err());
    }

    #[test]
    fn defaults_resolve_for_every_mode() {
        for mode in [
            Mode::SweepLength,
            Mode::SweepTxX,
            Mode::Point,
            Mode::Validate,
        ] {
            let spec = Settings::defaults(mode).into_spec(mode).unwrap();
            assert_eq!(spec.cfg.r_net, 30.0);
        }
        let tx = Settings::defaults(Mode::SweepTxX)
            .into_spec(Mode::SweepTxX)
            .unwrap();
        assert_eq!(tx.tx_x_values.len(), 10);
        assert_eq!(tx.cfg.rx, Point2::ORIGIN);
    }

    #[test]
    fn resolved_settings_round_trip_through_toml() {
        let s = Settings::defaults(Mode::Point);
        let back: Settings = toml::from_str(&s.to_toml()).unwrap();
        assert_eq!(back, s);
    }
}
