//! Merging of config-file entries and command-line flags into a sweep spec.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use qtele::ideal::ChannelDim;
use qtele::noise::NoiseKind;
use qtele::sweep::{canonical, p_range, Grid, InputState, Mode, SweepSpec};

/// Raw string settings keyed by long flag name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<&'static str, String>,
}

pub const KEYS: [&str; 11] = [
    "mode",
    "state",
    "dim",
    "n",
    "noise",
    "p",
    "param-min",
    "param-max",
    "steps",
    "out",
    "printed-eq8",
];

fn canonical_key(key: &str) -> Option<&'static str> {
    let key = key.trim().replace('_', "-");
    KEYS.iter().copied().find(|k| *k == key)
}

impl Settings {
    /// `key=value` lines; `#` starts a comment, blank lines are ignored.
    pub fn parse_config(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected key=value, got `{line}`", i + 1))?;
            let key =
                canonical_key(key).ok_or_else(|| anyhow!("config line {}: unknown key `{}`", i + 1, key.trim()))?;
            s.values.insert(key, value.trim().to_string());
        }
        Ok(s)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        let key = canonical_key(key).unwrap_or_else(|| panic!("unknown settings key `{key}`"));
        self.values.insert(key, value.into());
    }

    /// Entries of `other` win.
    pub fn overlay(mut self, other: &Settings) -> Self {
        for (k, v) in &other.values {
            self.values.insert(k, v.clone());
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn mode(&self) -> Result<Mode> {
        Ok(self.get("mode").unwrap_or("ideal").parse()?)
    }

    pub fn out(&self) -> Option<PathBuf> {
        self.get("out")
            .filter(|s| !s.is_empty() && *s != "-")
            .map(PathBuf::from)
    }

    pub fn printed_eq8(&self) -> Result<bool> {
        match self.get("printed-eq8") {
            None => Ok(false),
            Some(v) => parse_bool(v).with_context(|| "printed-eq8"),
        }
    }

    pub fn spec(&self) -> Result<SweepSpec> {
        let mode = self.mode()?;
        let state: InputState = self.get("state").unwrap_or("coherent").parse()?;
        let mut spec = SweepSpec::defaults(mode, state);

        if let Some(v) = self.get("dim") {
            spec.dims = parse_list(v, "dim", |s| {
                let d: usize = s.parse().map_err(|_| anyhow!("not an integer"))?;
                Ok(ChannelDim::from_dim(d)?)
            })?;
        }
        if let Some(v) = self.get("n") {
            spec.arms = parse_list(v, "n", |s| s.parse::<usize>().map_err(|_| anyhow!("not an integer")))?;
        }
        if let Some(v) = self.get("noise") {
            spec.noise = if v.trim() == "all" {
                NoiseKind::ALL.to_vec()
            } else {
                parse_list(v, "noise", |s| Ok(s.parse::<NoiseKind>()?))?
            };
        }
        if let Some(v) = self.get("param-min") {
            spec.grid.min = parse_f64(v, "param-min")?;
        }
        if let Some(v) = self.get("param-max") {
            spec.grid.max = parse_f64(v, "param-max")?;
        }
        if let Some(v) = self.get("steps") {
            spec.grid.steps = v
                .trim()
                .parse()
                .map_err(|_| anyhow!("steps: not a non-negative integer: `{v}`"))?;
        }
        match self.get("p") {
            Some(v) => spec.p_list = parse_p(v)?,
            // A single α with no explicit p list sweeps the noise axis.
            None if mode == Mode::Noisy && is_single_point(&spec.grid) => spec.p_list = p_range(0.5, 0.01),
            None => {}
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn is_single_point(g: &Grid) -> bool {
    g.steps == 1 || g.min == g.max
}

fn parse_bool(v: &str) -> Result<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => bail!("not a boolean: `{other}`"),
    }
}

fn parse_f64(v: &str, what: &str) -> Result<f64> {
    let x: f64 = v.trim().parse().map_err(|_| anyhow!("{what}: not a number: `{v}`"))?;
    if !x.is_finite() {
        bail!("{what}: must be finite, got `{v}`");
    }
    Ok(x)
}

fn parse_list<T>(v: &str, what: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| item(s).with_context(|| format!("{what}: bad entry `{s}`")))
        .collect()
}

/// Either a comma list or `start:stop:step`.
pub fn parse_p(v: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = v.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (parse_f64(start, "p")?, parse_f64(stop, "p")?, parse_f64(step, "p")?);
            if !(step > 0.0) || stop < start {
                bail!("p: range `{v}` needs start <= stop and a positive step");
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|i| canonical(start + i as f64 * step)).collect())
        }
        [_] => parse_list(v, "p", |s| parse_f64(s, "p")),
        _ => bail!("p: expected a comma list or start:stop:step, got `{v}`"),
    }
}
