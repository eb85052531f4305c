//! `qtele`: fidelity / success-probability sweeps as CSV, plus a self-check.
//!
//! Exit codes: 0 success, 1 verification or runtime failure, 2 usage error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod settings;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use qtele::sweep::{self, Mode};
use qtele::verify::{run_verify, VerifyOptions};

use settings::Settings;

#[derive(Debug, Parser)]
#[command(
    name = "qtele",
    version,
    about = "Teleportation of light through parallel qutrit channels"
)]
struct Cli {
    /// ideal | noisy | negativity | verify
    #[arg(long)]
    mode: Option<String>,
    /// coherent | cat | squeezed | tmsv
    #[arg(long)]
    state: Option<String>,
    /// Channel dimensions, comma separated (2 = qubit, 3 = qutrit)
    #[arg(long)]
    dim: Option<String>,
    /// Arm counts, comma separated
    #[arg(long)]
    n: Option<String>,
    /// Noise kinds, comma separated, or `all`
    #[arg(long)]
    noise: Option<String>,
    /// Noise probabilities: `0,0.1,0.2` or `start:stop:step`
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    param_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    param_max: Option<String>,
    /// Number of grid points
    #[arg(long)]
    steps: Option<String>,
    /// Output file (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
    /// With verify: print every printed-vs-corrected transfer coefficient
    #[arg(long)]
    printed_eq8: bool,
    /// File of key=value lines; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Cli {
    fn settings(&self) -> Settings {
        let mut s = Settings::default();
        let pairs = [
            ("mode", &self.mode),
            ("state", &self.state),
            ("dim", &self.dim),
            ("n", &self.n),
            ("noise", &self.noise),
            ("p", &self.p),
            ("param-min", &self.param_min),
            ("param-max", &self.param_max),
            ("steps", &self.steps),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                s.set(key, v.clone());
            }
        }
        if let Some(out) = &self.out {
            s.set("out", out.to_string_lossy().into_owned());
        }
        if self.printed_eq8 {
            s.set("printed-eq8", "true");
        }
        s
    }
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

fn usage<T>(r: Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(Failure::Usage)
}

fn runtime<T>(r: Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(Failure::Runtime)
}

fn open_output(settings: &Settings) -> Result<Box<dyn Write>> {
    Ok(match settings.out() {
        Some(path) => Box::new(BufWriter::new(
            File::create(&path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: &Cli) -> std::result::Result<bool, Failure> {
    let from_file = match &cli.config {
        Some(path) => {
            let text = usage(fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())))?;
            usage(Settings::parse_config(&text))?
        }
        None => Settings::default(),
    };
    let settings = from_file.overlay(&cli.settings());

    if usage(settings.mode())? == Mode::Verify {
        let opts = VerifyOptions {
            printed_eq8: usage(settings.printed_eq8())?,
            ..VerifyOptions::default()
        };
        let report = run_verify(&opts);
        let mut out = runtime(open_output(&settings))?;
        runtime(
            write!(out, "{report}")
                .and_then(|_| out.flush())
                .context("writing report"),
        )?;
        return Ok(report.passed());
    }

    let spec = usage(settings.spec())?;
    let records = runtime(sweep::run(&spec).context("sweep failed"))?;
    let out = runtime(open_output(&settings))?;
    runtime(sweep::write_csv(&records, out).context("writing CSV"))?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
