//! Parameter sweeps over the ideal and noisy pipelines, emitted as CSV.
//!
//! Grid points are independent and evaluated in parallel; records are
//! returned in a fixed order so that output is byte-identical regardless of
//! the number of worker threads.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fock::{cat, coherent, default_cutoff, squeezed_vacuum};
use crate::ideal::{teleport_pure, teleport_tmsv, transfer_profile, ChannelDim, MAX_ARMS};
use crate::noise::{log_negativity, NoiseKind};
use crate::pipeline::noisy_metrics;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "param,N,channel_dim,noise_kind,p_noise,fidelity,success_prob";

/// Slack allowed above 1 for emitted fidelities and success probabilities.
pub const UNIT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Ideal,
    Noisy,
    Negativity,
    Verify,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ideal" => Ok(Mode::Ideal),
            "noisy" => Ok(Mode::Noisy),
            "negativity" => Ok(Mode::Negativity),
            "verify" => Ok(Mode::Verify),
            other => Err(Error::invalid("mode", format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputState {
    Coherent,
    Cat,
    Squeezed,
    Tmsv,
}

impl InputState {
    pub fn name(self) -> &'static str {
        match self {
            InputState::Coherent => "coherent",
            InputState::Cat => "cat",
            InputState::Squeezed => "squeezed",
            InputState::Tmsv => "tmsv",
        }
    }

    /// Squeezing parameters must stay strictly inside the unit interval.
    fn needs_unit_bound(self) -> bool {
        matches!(self, InputState::Squeezed | InputState::Tmsv)
    }
}

impl fmt::Display for InputState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InputState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "coherent" => Ok(InputState::Coherent),
            "cat" => Ok(InputState::Cat),
            "squeezed" | "squeezed_vacuum" => Ok(InputState::Squeezed),
            "tmsv" => Ok(InputState::Tmsv),
            other => Err(Error::invalid("state", format!("unknown input state `{other}`"))),
        }
    }
}

/// Evenly spaced grid of `steps` points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        Self { min, max, steps }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::invalid("param", "grid bounds must be finite"));
        }
        if self.min > self.max {
            return Err(Error::invalid(
                "param",
                format!("param_min {} > param_max {}", self.min, self.max),
            ));
        }
        if self.steps == 0 {
            return Err(Error::invalid("steps", "need at least one grid point"));
        }
        Ok(())
    }

    /// Grid points, each rounded to the 12 significant digits used in the CSV
    /// so that a parsed row re-evaluates at exactly the same parameter.
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![canonical(self.min)];
        }
        let span = self.max - self.min;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| canonical(self.min + span * i as f64 / last))
            .collect()
    }
}

/// Round-trip a value through its CSV representation.
pub fn canonical(x: f64) -> f64 {
    format_sig12(x).parse().expect("formatted float parses")
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed,
/// scientific notation outside `1e-5 ..= 1e12`.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        trim_zeros(&fixed)
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Everything a sweep needs; see [`SweepSpec::defaults`] for the default grids.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub mode: Mode,
    pub state: InputState,
    pub dims: Vec<ChannelDim>,
    pub arms: Vec<usize>,
    pub grid: Grid,
    pub noise: Vec<NoiseKind>,
    pub p_list: Vec<f64>,
}

/// Noise probabilities `0, step, …, max` rounded to CSV precision.
pub fn p_range(max: f64, step: f64) -> Vec<f64> {
    let count = (max / step).round() as usize;
    (0..=count).map(|i| canonical(i as f64 * step)).collect()
}

impl SweepSpec {
    /// Defaults per mode and input family:
    ///
    /// - amplitude `α ∈ [0, 3]` in steps of 0.05 for coherent and cat inputs,
    ///   `ξ, λ ∈ [0, 0.9]` in steps of 0.02 for the squeezed families;
    /// - ideal: `N = 3, 10` for both channel dimensions;
    /// - noisy: `N = 3`, every noise kind, `p ∈ {0, 0.1, 0.2, 0.3}`;
    /// - negativity: every noise kind, `p ∈ [0, 0.2]` in steps of 0.005.
    pub fn defaults(mode: Mode, state: InputState) -> Self {
        let grid = if state.needs_unit_bound() {
            Grid::new(0.0, 0.9, 46)
        } else {
            Grid::new(0.0, 3.0, 61)
        };
        let (dims, arms, p_list) = match mode {
            Mode::Ideal | Mode::Verify => (vec![ChannelDim::Qubit, ChannelDim::Qutrit], vec![3, 10], vec![0.0]),
            Mode::Noisy => (vec![ChannelDim::Qutrit], vec![3], vec![0.0, 0.1, 0.2, 0.3]),
            Mode::Negativity => (vec![ChannelDim::Qutrit], vec![1], p_range(0.2, 0.005)),
        };
        Self {
            mode,
            state,
            dims,
            arms,
            grid,
            noise: NoiseKind::ALL.to_vec(),
            p_list,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode != Mode::Negativity {
            self.grid.validate()?;
            if self.state.needs_unit_bound() && !(self.grid.min.abs() < 1.0 && self.grid.max.abs() < 1.0) {
                return Err(Error::invalid(
                    "param",
                    format!(
                        "{} sweeps need |param| < 1, got [{}, {}]",
                        self.state, self.grid.min, self.grid.max
                    ),
                ));
            }
            if self.arms.is_empty() {
                return Err(Error::invalid("N", "empty arm list"));
            }
            if let Some(&bad) = self.arms.iter().find(|&&n| n == 0 || n > MAX_ARMS) {
                return Err(Error::invalid(
                    "N",
                    format!("arm count must be in 1..={MAX_ARMS}, got {bad}"),
                ));
            }
            if self.dims.is_empty() {
                return Err(Error::invalid("channel_dim", "empty dimension list"));
            }
        }
        if self.mode != Mode::Ideal {
            if self.noise.is_empty() {
                return Err(Error::invalid("noise", "empty noise list"));
            }
            if self.p_list.is_empty() {
                return Err(Error::invalid("p", "empty noise-probability list"));
            }
            if let Some(&bad) = self.p_list.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(Error::invalid(
                    "p",
                    format!("noise probability must lie in [0, 1], got {bad}"),
                ));
            }
        }
        if self.mode == Mode::Noisy {
            if self.state != InputState::Coherent {
                return Err(Error::Unsupported(format!(
                    "noisy teleportation is only defined for coherent inputs, not {}",
                    self.state
                )));
            }
            if self.dims.iter().any(|&d| d != ChannelDim::Qutrit) {
                return Err(Error::Unsupported(
                    "noisy teleportation uses qutrit channels only (--dim 3)".into(),
                ));
            }
        }
        Ok(())
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub param: f64,
    pub arms: usize,
    pub channel_dim: usize,
    pub noise_kind: Option<NoiseKind>,
    pub p_noise: f64,
    pub fidelity: f64,
    pub success_prob: f64,
}

impl SweepRecord {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            format_sig12(self.param),
            self.arms,
            self.channel_dim,
            self.noise_kind.map_or("none", NoiseKind::name),
            format_sig12(self.p_noise),
            format_sig12(self.fidelity),
            format_sig12(self.success_prob),
        )
    }

    pub fn parse_csv_line(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.trim_end_matches('\r').split(',').collect();
        if fields.len() != 7 {
            return Err(Error::invalid(
                "csv",
                format!("expected 7 fields, got {}: `{line}`", fields.len()),
            ));
        }
        let num = |i: usize, name: &'static str| -> Result<f64> {
            fields[i]
                .parse()
                .map_err(|_| Error::invalid(name, format!("not a number: `{}`", fields[i])))
        };
        let int = |i: usize, name: &'static str| -> Result<usize> {
            fields[i]
                .parse()
                .map_err(|_| Error::invalid(name, format!("not an integer: `{}`", fields[i])))
        };
        let noise_kind = match fields[3] {
            "none" => None,
            other => Some(other.parse()?),
        };
        Ok(Self {
            param: num(0, "param")?,
            arms: int(1, "N")?,
            channel_dim: int(2, "channel_dim")?,
            noise_kind,
            p_noise: num(4, "p_noise")?,
            fidelity: num(5, "fidelity")?,
            success_prob: num(6, "success_prob")?,
        })
    }
}

pub fn write_csv<W: Write>(records: &[SweepRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.to_csv_line())?;
    }
    out.flush()
}

pub fn to_csv_string(records: &[SweepRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end_matches('\r') == CSV_HEADER => {}
        other => return Err(Error::invalid("csv", format!("unexpected header {other:?}"))),
    }
    lines
        .filter(|l| !l.is_empty())
        .map(SweepRecord::parse_csv_line)
        .collect()
}

/// `(fidelity, success_prob)` for one ideal grid point.
pub fn ideal_point(state: InputState, dim: ChannelDim, arms: usize, param: f64) -> Result<(f64, f64)> {
    let profile = transfer_profile(dim, arms)?;
    let cutoff = default_cutoff(param.abs(), arms);
    let input = match state {
        InputState::Coherent => coherent(Complex64::new(param, 0.0), cutoff),
        InputState::Cat => cat(param, cutoff),
        InputState::Squeezed => squeezed_vacuum(param, cutoff)?,
        InputState::Tmsv => {
            let (ps, f) = teleport_tmsv(param, &profile)?;
            return Ok((f, ps));
        }
    };
    let out = teleport_pure(&input, &profile)?;
    Ok((out.fidelity, out.success_prob))
}

pub fn run_ideal(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    if spec.mode != Mode::Ideal {
        return Err(Error::Unsupported("run_ideal needs mode = ideal".into()));
    }
    spec.validate()?;
    let mut dims = spec.dims.clone();
    dims.sort();
    dims.dedup();
    let mut arms = spec.arms.clone();
    arms.sort_unstable();
    arms.dedup();
    let grid = spec.grid.points();

    let mut jobs = Vec::with_capacity(dims.len() * arms.len() * grid.len());
    for &d in &dims {
        for &n in &arms {
            for &x in &grid {
                jobs.push((d, n, x));
            }
        }
    }
    jobs.par_iter()
        .map(|&(dim, n, param)| {
            let (fidelity, success_prob) = ideal_point(spec.state, dim, n, param)?;
            Ok(SweepRecord {
                param,
                arms: n,
                channel_dim: dim.dim(),
                noise_kind: None,
                p_noise: 0.0,
                fidelity,
                success_prob,
            })
        })
        .collect()
}

/// Kinds in canonical order without duplicates.
fn sorted_kinds(kinds: &[NoiseKind]) -> Vec<NoiseKind> {
    let mut k = kinds.to_vec();
    k.sort();
    k.dedup();
    k
}

fn sorted_probs(p: &[f64]) -> Vec<f64> {
    let mut p: Vec<f64> = p.iter().map(|&x| canonical(x)).collect();
    p.sort_by(|a, b| a.total_cmp(b));
    p.dedup();
    p
}

/// Noisy coherent-state sweep. Rows are ordered by (noise kind, N, p, α).
pub fn run_noisy(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    if spec.mode != Mode::Noisy {
        return Err(Error::Unsupported("run_noisy needs mode = noisy".into()));
    }
    spec.validate()?;
    let kinds = sorted_kinds(&spec.noise);
    let mut arms = spec.arms.clone();
    arms.sort_unstable();
    arms.dedup();
    let probs = sorted_probs(&spec.p_list);
    let grid = spec.grid.points();

    let mut jobs = Vec::new();
    for &kind in &kinds {
        for &n in &arms {
            for &p in &probs {
                for &alpha in &grid {
                    jobs.push((kind, n, p, alpha));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|&(kind, n, p, alpha)| {
            let out = noisy_metrics(Complex64::new(alpha, 0.0), n, kind, p)?;
            Ok(SweepRecord {
                param: alpha,
                arms: n,
                channel_dim: 3,
                noise_kind: Some(kind),
                p_noise: p,
                fidelity: out.fidelity,
                success_prob: out.success_prob,
            })
        })
        .collect()
}

/// Log-negativity of the noisy resource. The `fidelity` column carries `E_N`,
/// `param` repeats `p`, and `success_prob` is 0.
pub fn run_negativity(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    if spec.mode != Mode::Negativity {
        return Err(Error::Unsupported("run_negativity needs mode = negativity".into()));
    }
    spec.validate()?;
    let kinds = sorted_kinds(&spec.noise);
    let probs = sorted_probs(&spec.p_list);
    let jobs: Vec<(NoiseKind, f64)> = kinds.iter().flat_map(|&k| probs.iter().map(move |&p| (k, p))).collect();
    jobs.par_iter()
        .map(|&(kind, p)| {
            Ok(SweepRecord {
                param: p,
                arms: 1,
                channel_dim: 3,
                noise_kind: Some(kind),
                p_noise: p,
                fidelity: log_negativity(kind, p)?,
                success_prob: 0.0,
            })
        })
        .collect()
}

pub fn run(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    match spec.mode {
        Mode::Ideal => run_ideal(spec),
        Mode::Noisy => run_noisy(spec),
        Mode::Negativity => run_negativity(spec),
        Mode::Verify => Err(Error::Unsupported("verify is not a sweep".into())),
    }
}

/// Recompute a parsed row from its own coordinates.
pub fn reevaluate(mode: Mode, state: InputState, row: &SweepRecord) -> Result<SweepRecord> {
    let (fidelity, success_prob) = match mode {
        Mode::Ideal => ideal_point(state, ChannelDim::from_dim(row.channel_dim)?, row.arms, row.param)?,
        Mode::Noisy => {
            let kind = row
                .noise_kind
                .ok_or_else(|| Error::invalid("noise_kind", "noisy row without a noise kind"))?;
            let out = noisy_metrics(Complex64::new(row.param, 0.0), row.arms, kind, row.p_noise)?;
            (out.fidelity, out.success_prob)
        }
        Mode::Negativity => {
            let kind = row
                .noise_kind
                .ok_or_else(|| Error::invalid("noise_kind", "negativity row without a noise kind"))?;
            (log_negativity(kind, row.p_noise)?, 0.0)
        }
        Mode::Verify => return Err(Error::Unsupported("verify rows do not exist".into())),
    };
    Ok(SweepRecord {
        fidelity,
        success_prob,
        ..row.clone()
    })
}
