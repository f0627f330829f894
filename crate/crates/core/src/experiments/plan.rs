//! Sweep configuration: a chain template, swept axes, times and partitions.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::{build_chain_spec, ChainConfig, ChainSpec, ScalarOrSeq};
use crate::entanglement::{Bipartition, PartitionLabel};
use crate::error::Result as LibResult;
use crate::scan::linspace;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AxisName {
    #[serde(rename = "g")]
    G,
    #[serde(rename = "J")]
    J,
    #[serde(rename = "eta")]
    Eta,
    #[serde(rename = "phi")]
    Phi,
    #[serde(rename = "g1")]
    G1,
    #[serde(rename = "g2")]
    G2,
    #[serde(rename = "J1")]
    J1,
    #[serde(rename = "J2")]
    J2,
    #[serde(rename = "t")]
    T,
    #[serde(rename = "N")]
    N,
}

impl AxisName {
    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::G => "g",
            AxisName::J => "J",
            AxisName::Eta => "eta",
            AxisName::Phi => "phi",
            AxisName::G1 => "g1",
            AxisName::G2 => "g2",
            AxisName::J1 => "J1",
            AxisName::J2 => "J2",
            AxisName::T => "t",
            AxisName::N => "N",
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A list of values, either explicit or `{start, stop, steps}` (inclusive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Values { values: Vec<f64> },
    Linear { start: f64, stop: f64, steps: usize },
}

impl Grid {
    pub fn linear(start: f64, stop: f64, steps: usize) -> Self {
        Grid::Linear { start, stop, steps }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::List(v) | Grid::Values { values: v } => v.clone(),
            Grid::Linear { start, stop, steps } => linspace(*start, *stop, *steps),
        }
    }

    fn validate(&self, what: &str) -> Result<(), CliError> {
        if let Grid::Linear { start, stop, steps } = self {
            if *steps < 1 {
                return Err(CliError::config(format!("{what}: steps must be at least 1")));
            }
            if !start.is_finite() || !stop.is_finite() {
                return Err(CliError::config(format!("{what}: range must be finite")));
            }
        }
        let v = self.values();
        if v.is_empty() {
            return Err(CliError::config(format!("{what}: no values")));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::config(format!("{what}: values must be finite")));
        }
        Ok(())
    }
}

/// Axis values: `{"values": [...]}` or `{start, stop, steps}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisGrid {
    Values { values: Vec<f64> },
    Linear { start: f64, stop: f64, steps: usize },
}

impl AxisGrid {
    pub fn values(&self) -> Vec<f64> {
        Grid::from(self.clone()).values()
    }

    fn validate(&self, what: &str) -> Result<(), CliError> {
        Grid::from(self.clone()).validate(what)
    }
}

impl From<AxisGrid> for Grid {
    fn from(g: AxisGrid) -> Self {
        match g {
            AxisGrid::Values { values } => Grid::Values { values },
            AxisGrid::Linear { start, stop, steps } => Grid::Linear { start, stop, steps },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub name: AxisName,
    #[serde(flatten)]
    pub grid: AxisGrid,
}

impl SweepAxis {
    pub fn linear(name: AxisName, start: f64, stop: f64, steps: usize) -> Self {
        Self {
            name,
            grid: AxisGrid::Linear { start, stop, steps },
        }
    }

    pub fn list(name: AxisName, values: Vec<f64>) -> Self {
        Self {
            name,
            grid: AxisGrid::Values { values },
        }
    }
}

/// Knobs used only by the figure commands.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureOptions {
    /// Line cuts in the swept coupling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cuts: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut_times: Option<Grid>,
    /// Times for the enhancement-ratio table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_times: Option<Grid>,
    /// Largest chain in the enhancement-ratio fit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_n_max: Option<usize>,
    /// Points along the exceptional-surface line cut.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line_cut_points: Option<usize>,
}

/// A sweep plan as read from `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    #[serde(flatten)]
    pub chain: ChainConfig,
    #[serde(default)]
    pub sweep: Vec<SweepAxis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Grid>,
    #[serde(default)]
    pub partitions: Vec<PartitionLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Export the covariance (upper triangle) alongside the witnesses.
    #[serde(default)]
    pub covariance: bool,
    #[serde(default = "default_true")]
    pub detect_eps: bool,
    #[serde(default)]
    pub figure: FigureOptions,
}

fn default_true() -> bool {
    true
}

/// One cell of the sweep: the swept values in axis order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub values: Vec<(AxisName, f64)>,
}

impl SweepPoint {
    pub fn get(&self, name: AxisName) -> Option<f64> {
        self.values.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}

impl SweepPlan {
    pub fn new(chain: ChainConfig) -> Self {
        Self {
            chain,
            sweep: Vec::new(),
            times: None,
            partitions: Vec::new(),
            output: None,
            format: None,
            covariance: false,
            detect_eps: true,
            figure: FigureOptions::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let plan: SweepPlan =
            serde_json::from_str(text).map_err(|e| CliError::config(format!("malformed config: {e}")))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let mut seen = BTreeSet::new();
        for axis in &self.sweep {
            if !seen.insert(axis.name) {
                return Err(CliError::config(format!("axis {} appears twice", axis.name)));
            }
            axis.grid.validate(axis.name.as_str())?;
            if axis.name == AxisName::N
                && axis.grid.values().iter().any(|&v| v < 1.0 || v.fract() != 0.0)
            {
                return Err(CliError::config("axis N takes positive integers"));
            }
        }
        if seen.contains(&AxisName::T) && self.times.is_some() {
            return Err(CliError::config("give times either as `times` or as a `t` axis"));
        }
        if let Some(times) = &self.times {
            times.validate("times")?;
        }
        for p in &self.partitions {
            if p.0.split_once('|').is_none() {
                return Err(CliError::config(format!("partition {:?} lacks '|'", p.0)));
            }
        }
        // catch template errors early when nothing overrides them
        if !seen.contains(&AxisName::N) {
            self.spec_at(&SweepPoint { values: Vec::new() }).map_err(CliError::from_lib)?;
        }
        Ok(())
    }

    /// Swept axes other than time, in declaration order.
    pub fn parameter_axes(&self) -> Vec<&SweepAxis> {
        self.sweep.iter().filter(|a| a.name != AxisName::T).collect()
    }

    pub fn axis(&self, name: AxisName) -> Option<&SweepAxis> {
        self.sweep.iter().find(|a| a.name == name)
    }

    /// Times from `times` or a `t` axis.
    pub fn time_values(&self) -> Option<Vec<f64>> {
        self.times
            .as_ref()
            .map(Grid::values)
            .or_else(|| self.axis(AxisName::T).map(|a| a.grid.values()))
    }

    /// Cartesian product of the parameter axes; the last axis varies fastest.
    pub fn points(&self) -> Vec<SweepPoint> {
        let axes: Vec<(AxisName, Vec<f64>)> = self
            .parameter_axes()
            .into_iter()
            .map(|a| (a.name, a.grid.values()))
            .collect();
        let mut out = vec![SweepPoint { values: Vec::new() }];
        for (name, values) in &axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.values.push((*name, v));
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// The chain document with a sweep point applied.
    pub fn chain_at(&self, point: &SweepPoint) -> LibResult<ChainConfig> {
        let mut c = self.chain.clone();
        if let Some(n) = point.get(AxisName::N) {
            c.n = n as i64;
        }
        for &(name, v) in &point.values {
            match name {
                AxisName::G => c.g = v.into(),
                AxisName::J => c.j = v.into(),
                AxisName::Eta => c.eta = v.into(),
                AxisName::Phi => c.phi = v.into(),
                _ => {}
            }
        }
        let bonds = (c.n.max(1) - 1) as usize;
        for &(name, v) in &point.values {
            let (field, idx) = match name {
                AxisName::G1 => (&mut c.g, 0),
                AxisName::G2 => (&mut c.g, 1),
                AxisName::J1 => (&mut c.j, 0),
                AxisName::J2 => (&mut c.j, 1),
                _ => continue,
            };
            let label = if matches!(name, AxisName::G1 | AxisName::G2) { "g" } else { "J" };
            let mut seq = field.expand(label, bonds)?;
            if idx >= seq.len() {
                return Err(crate::Error::TooFewModes {
                    min: idx + 2,
                    got: c.n.max(0) as usize,
                });
            }
            seq[idx] = v;
            *field = ScalarOrSeq::Seq(seq);
        }
        Ok(c)
    }

    pub fn spec_at(&self, point: &SweepPoint) -> LibResult<ChainSpec> {
        build_chain_spec(&self.chain_at(point)?)
    }

    /// Partitions for an `n`-mode chain; `(1|N-1)` when none are given.
    pub fn bipartitions(&self, n_modes: usize) -> LibResult<Vec<Bipartition>> {
        if self.partitions.is_empty() {
            return Ok(vec![Bipartition::first_vs_rest(n_modes)?]);
        }
        self.partitions.iter().map(|p| p.resolve(n_modes)).collect()
    }
}
