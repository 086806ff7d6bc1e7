use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::DEFAULT_SEARCH_ITERATIONS;
use crate::temporal::DEFAULT_FIDELITY_TRIALS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Similarity and `P_S` versus `m` and `η_f` with ideal switches.
    LossSimilarity,
    /// Similarity and `P_S` versus `η_f` and `η_s` at fixed `m`.
    LossSwitch,
    /// Fidelity versus loop-length error `δ`.
    MismatchDelta,
    /// Fidelity versus source jitter `σ`.
    JitterSigma,
    /// Serialised maps for one switching program.
    MapDump,
}

impl Experiment {
    pub fn is_loss(self) -> bool {
        matches!(self, Experiment::LossSimilarity | Experiment::LossSwitch)
    }

    pub fn is_mismatch(self) -> bool {
        matches!(self, Experiment::MismatchDelta | Experiment::JitterSigma)
    }

    pub fn name(self) -> &'static str {
        match self {
            Experiment::LossSimilarity => "loss-similarity",
            Experiment::LossSwitch => "loss-switch",
            Experiment::MismatchDelta => "mismatch-delta",
            Experiment::JitterSigma => "jitter-sigma",
            Experiment::MapDump => "map-dump",
        }
    }

    /// 1750 searches per point for loss sweeps, 250 sequences for fidelity sweeps.
    pub fn default_iterations(self) -> usize {
        if self.is_mismatch() {
            DEFAULT_FIDELITY_TRIALS
        } else {
            DEFAULT_SEARCH_ITERATIONS
        }
    }

    fn default_grid(self, axis: Axis) -> Grid {
        use Experiment::*;
        let range = |s: &str| Grid::Range(s.to_string());
        match (self, axis) {
            (LossSimilarity, Axis::M) => range("2:6:1"),
            (LossSwitch, Axis::M) | (MapDump, Axis::M) => Grid::Values(vec![3.0]),
            (MismatchDelta, Axis::M) | (JitterSigma, Axis::M) => range("1:4:1"),
            (LossSimilarity, Axis::EtaF) | (LossSwitch, Axis::EtaF) => range("0.7:1:0.05"),
            (LossSwitch, Axis::EtaS) => range("0.7:1:0.05"),
            (MapDump, Axis::EtaF) => Grid::Values(vec![0.9]),
            (MapDump, Axis::EtaS) => Grid::Values(vec![0.95]),
            (MismatchDelta, Axis::Delta) => range("0:1:0.25"),
            (JitterSigma, Axis::Sigma) => range("0:1:0.25"),
            (_, Axis::EtaF) | (_, Axis::EtaS) => Grid::Values(vec![1.0]),
            (_, Axis::Delta) | (_, Axis::Sigma) => Grid::Values(vec![0.0]),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Config(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    M,
    EtaF,
    EtaS,
    Delta,
    Sigma,
}

/// One sweep axis: an explicit list, a single value, or an inclusive `start:stop:step` range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Single(f64),
    Range(String),
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>> {
        let values = match self {
            Grid::Values(v) => v.clone(),
            Grid::Single(x) => vec![*x],
            Grid::Range(spec) => expand_range(spec)?,
        };
        if values.is_empty() {
            return Err(Error::Config("empty grid".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("non-finite grid value {bad}")));
        }
        Ok(values)
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `start:stop:step`, a comma-separated list, or a single number.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains(':') {
            let grid = Grid::Range(s.to_string());
            grid.values()?;
            return Ok(grid);
        }
        let values = s
            .split(',')
            .filter(|part| !part.trim().is_empty())
            .map(|part| {
                part.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad grid value '{part}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        match values.as_slice() {
            [] => Err(Error::Config("empty grid".into())),
            [x] => Ok(Grid::Single(*x)),
            _ => Ok(Grid::Values(values)),
        }
    }
}

/// Values are `start + k·step` rounded to 12 decimals, so `0.7:1:0.1` ends exactly at 1.
fn expand_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(Error::Config(format!(
            "range '{spec}' is not start:stop:step"
        )));
    };
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::Config(format!("bad number '{s}' in range '{spec}'")))
    };
    let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
    if step == 0.0 || !step.is_finite() {
        return Err(Error::Config(format!("range '{spec}' has a zero step")));
    }
    let span = (stop - start) / step;
    if span < -1e-9 {
        return Err(Error::Config(format!("range '{spec}' is empty")));
    }
    let count = (span + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(Error::Config(format!("range '{spec}' has too many points")));
    }
    Ok((0..count)
        .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

/// Interior beamsplitter angles for an explicit switching program.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Angles {
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub lambda: f64,
}

/// A sweep description, loadable from JSON. Missing grids fall back to per-experiment defaults.
///
/// `delta`, `sigma` and `tau` are in units of the wave-packet width `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub experiment: Experiment,
    pub m: Option<Grid>,
    pub eta_f: Option<Grid>,
    pub eta_s: Option<Grid>,
    pub delta: Option<Grid>,
    pub sigma: Option<Grid>,
    /// Random draws per grid point.
    pub iterations: Option<usize>,
    pub master_seed: u64,
    /// Bin separation in units of `c`.
    pub tau: f64,
    /// Jitter draws averaged per sequence.
    pub jitter_repeats: usize,
    /// Apply outer-loop attenuation to the reported map and `P_S`.
    pub include_outer: bool,
    /// Input photons per bin; defaults to one per bin.
    pub occupation: Option<Vec<usize>>,
    /// Inner-loop passes for `map-dump` (default `m - 1`, at least 1).
    pub loops: Option<usize>,
    /// Explicit interior angles per pass for `map-dump`; otherwise drawn from the seed.
    pub sequence: Option<Vec<Vec<Angles>>>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self::for_experiment(Experiment::LossSimilarity)
    }
}

impl SweepConfig {
    pub fn for_experiment(experiment: Experiment) -> Self {
        Self {
            experiment,
            m: None,
            eta_f: None,
            eta_s: None,
            delta: None,
            sigma: None,
            iterations: None,
            master_seed: 0,
            tau: 100.0,
            jitter_repeats: 1,
            include_outer: true,
            occupation: None,
            loops: None,
            sequence: None,
            output: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Copy with every optional grid and the iteration count filled in.
    pub fn resolved(&self) -> Self {
        let exp = self.experiment;
        Self {
            m: Some(self.m.clone().unwrap_or_else(|| exp.default_grid(Axis::M))),
            eta_f: Some(
                self.eta_f
                    .clone()
                    .unwrap_or_else(|| exp.default_grid(Axis::EtaF)),
            ),
            eta_s: Some(
                self.eta_s
                    .clone()
                    .unwrap_or_else(|| exp.default_grid(Axis::EtaS)),
            ),
            delta: Some(
                self.delta
                    .clone()
                    .unwrap_or_else(|| exp.default_grid(Axis::Delta)),
            ),
            sigma: Some(
                self.sigma
                    .clone()
                    .unwrap_or_else(|| exp.default_grid(Axis::Sigma)),
            ),
            iterations: Some(self.iterations.unwrap_or_else(|| exp.default_iterations())),
            ..self.clone()
        }
    }

    pub fn iteration_count(&self) -> Result<usize> {
        let n = self
            .iterations
            .unwrap_or_else(|| self.experiment.default_iterations());
        if n == 0 {
            return Err(Error::ZeroIterations);
        }
        Ok(n)
    }

    pub fn modes(&self) -> Result<Vec<usize>> {
        let grid = self.grid(&self.m, Axis::M);
        grid.values()?
            .into_iter()
            .map(|v| {
                if v >= 1.0 && v.fract() == 0.0 && v <= 64.0 {
                    Ok(v as usize)
                } else {
                    Err(Error::Config(format!(
                        "mode count {v} is not an integer in 1..=64"
                    )))
                }
            })
            .collect()
    }

    pub fn eta_f_values(&self) -> Result<Vec<f64>> {
        self.grid(&self.eta_f, Axis::EtaF).values()
    }

    pub fn eta_s_values(&self) -> Result<Vec<f64>> {
        self.grid(&self.eta_s, Axis::EtaS).values()
    }

    pub fn delta_values(&self) -> Result<Vec<f64>> {
        self.grid(&self.delta, Axis::Delta).values()
    }

    pub fn sigma_values(&self) -> Result<Vec<f64>> {
        self.grid(&self.sigma, Axis::Sigma).values()
    }

    fn grid(&self, grid: &Option<Grid>, axis: Axis) -> Grid {
        grid.clone()
            .unwrap_or_else(|| self.experiment.default_grid(axis))
    }

    /// Occupation for `m` bins: the configured one, or one photon per bin.
    pub fn occupation_for(&self, m: usize) -> Result<Vec<usize>> {
        match &self.occupation {
            None => Ok(vec![1; m]),
            Some(k) if k.len() == m => Ok(k.clone()),
            Some(k) => Err(Error::OccupationLength {
                expected: m,
                found: k.len(),
            }),
        }
    }
}
