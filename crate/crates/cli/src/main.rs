use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reflectprob_cli::settings::Settings;
use reflectprob_cli::{
    run_point, run_sweep_length, run_sweep_tx, run_validate, write_rows, CliResult, ExperimentSpec,
    Mode,
};

/// Reflection probabilities of a random line-segment object: analytic values
/// next to Monte Carlo estimates.
#[derive(Debug, Parser)]
#[command(name = "reflectprob", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// One row per object length.
    SweepLength,
    /// One row per transmitter abscissa, Tx at (x, ty).
    SweepTx,
    /// A single configuration.
    Point,
    /// Analytic vs Monte Carlo on random configurations; exit 1 on any mismatch.
    Validate,
}

impl Command {
    fn mode(self) -> Mode {
        match self {
            Command::SweepLength => Mode::SweepLength,
            Command::SweepTx => Mode::SweepTxX,
            Command::Point => Mode::Point,
            Command::Validate => Mode::Validate,
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML file with any of the settings below; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Network disk radius in meters.
    #[arg(long, global = true, value_name = "M")]
    rnet: Option<f64>,

    /// Transmitter position.
    #[arg(long, global = true, value_name = "X,Y", value_parser = parse_point, allow_hyphen_values = true)]
    tx: Option<[f64; 2]>,

    /// Receiver position.
    #[arg(long, global = true, value_name = "X,Y", value_parser = parse_point, allow_hyphen_values = true)]
    rx: Option<[f64; 2]>,

    /// Transmitter ordinate held fixed by sweep-tx.
    #[arg(long, global = true, value_name = "M", allow_hyphen_values = true)]
    ty: Option<f64>,

    /// Object length for sweep-tx and point.
    #[arg(long, global = true, value_name = "M")]
    length: Option<f64>,

    /// Object lengths for sweep-length.
    #[arg(long, global = true, value_name = "CSV", value_delimiter = ',')]
    lengths: Option<Vec<f64>>,

    /// Transmitter abscissas for sweep-tx.
    #[arg(
        long,
        global = true,
        value_name = "CSV",
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    txx: Option<Vec<f64>>,

    /// Monte Carlo samples per row.
    #[arg(long, global = true, value_name = "N")]
    samples: Option<u64>,

    /// Base seed; row i uses seed + i.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Relative quadrature tolerance.
    #[arg(long, global = true, value_name = "REL")]
    tol: Option<f64>,

    /// Sampling threads.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Random configurations checked by validate.
    #[arg(long, global = true, value_name = "N")]
    configs: Option<usize>,

    /// Output file (stdout if omitted).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Emit a JSON record array instead of CSV.
    #[arg(long, global = true)]
    json: bool,

    /// Print the resolved settings as TOML and exit.
    #[arg(long, global = true)]
    show_config: bool,
}

impl RunArgs {
    fn settings(&self) -> Settings {
        Settings {
            rnet: self.rnet,
            tx: self.tx,
            rx: self.rx,
            ty: self.ty,
            length: self.length,
            lengths: self.lengths.clone(),
            txx: self.txx.clone(),
            samples: self.samples,
            seed: self.seed,
            tol: self.tol,
            workers: self.workers,
            configs: self.configs,
            out: self.out.clone(),
            json: self.json.then_some(true),
        }
    }
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok([num(x)?, num(y)?])
}

fn output(spec: &ExperimentSpec) -> CliResult<Box<dyn Write>> {
    Ok(match &spec.output_path {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs the command and returns the process exit code.
fn run(cli: Cli) -> CliResult<u8> {
    let mode = cli.command.mode();
    let mut settings = cli.run.settings();
    if let Some(path) = &cli.run.config {
        settings = settings.over(Settings::from_toml_file(path)?);
    }
    let settings = settings.over(Settings::defaults(mode));
    if cli.run.show_config {
        print!("{}", settings.to_toml());
        return Ok(0);
    }
    let spec = settings.into_spec(mode)?;
    log::info!("running {mode:?} with {spec:?}");

    match mode {
        Mode::SweepLength | Mode::SweepTxX | Mode::Point => {
            let rows = match mode {
                Mode::SweepLength => run_sweep_length(&spec)?,
                Mode::SweepTxX => run_sweep_tx(&spec)?,
                _ => vec![run_point(&spec)?],
            };
            let mut out = output(&spec)?;
            write_rows(&spec, &rows, &mut out)?;
            out.flush()?;
            Ok(0)
        }
        Mode::Validate => {
            let summary = run_validate(&spec)?;
            let mut out = output(&spec)?;
            if spec.json {
                serde_json::to_writer_pretty(&mut out, &summary)?;
                writeln!(out)?;
            } else {
                summary.write_report(&mut out)?;
            }
            out.flush()?;
            if !summary.passed() {
                eprintln!(
                    "validation failed for {} of {} configs",
                    summary.failed(),
                    summary.cases.len()
                );
            }
            Ok(if summary.passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
