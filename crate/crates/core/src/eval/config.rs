// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Flat `key = value` experiment configuration and the end-to-end `eval`
//! pipeline built on it.
//!
//! ```text
//! # PA testbed
//! synth = pa:n=5000,m0=3
//! h = 4
//! beta = 0.025
//! runs = 200
//! ```
//!
//! Recognized keys: `graph` (edge-list path) or `synth` (generator spec),
//! `h`, `beta`, `runs`, `rescale_budget`, `starts` (comma-separated original
//! labels), `taus`, `coverage_runs`, `crossing_c`, `crossing_delta`. The seed
//! is deliberately not a config key.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use super::experiment::{
    coverage_validation, crossing_rate, run_experiment, CoverageValidationRow, CrossingReport, CrossingSettings,
    ExperimentConfig, ExperimentResult, StartPolicy,
};
use crate::error::{Error, Result};
use crate::graph::{load_edge_list, Graph, GraphStats};
use crate::seed::derive_seed;
use crate::synth::SynthSpec;

const GRAPH_STREAM: u64 = 0x6752_6170;
const STRETCH_STREAM: u64 = 1;
const COVERAGE_STREAM: u64 = 2;
const CROSSING_STREAM: u64 = 3;

#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    Synth { spec: SynthSpec, text: String },
}

impl GraphSource {
    pub fn synth(text: &str) -> Result<Self> {
        Ok(GraphSource::Synth { spec: text.parse()?, text: text.to_string() })
    }

    /// Generated graphs are keyed by the master seed.
    pub fn load(&self, seed: u64) -> Result<Graph> {
        match self {
            GraphSource::File(path) => load_edge_list(path),
            GraphSource::Synth { spec, .. } => spec.generate(derive_seed(seed, GRAPH_STREAM)),
        }
    }
}

impl fmt::Display for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSource::File(path) => write!(f, "file:{}", path.display()),
            GraphSource::Synth { text, .. } => write!(f, "synth:{text}"),
        }
    }
}

impl Serialize for GraphSource {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalConfig {
    pub graph: GraphSource,
    pub h: usize,
    pub beta: f64,
    pub runs: usize,
    pub rescale_budget: bool,
    pub starts: Option<Vec<u64>>,
    pub taus: Vec<f64>,
    pub coverage_runs: usize,
    pub crossing: CrossingSettings,
}

impl EvalConfig {
    pub fn new(graph: GraphSource) -> Self {
        EvalConfig {
            graph,
            h: 4,
            beta: 0.025,
            runs: 200,
            rescale_budget: false,
            starts: None,
            taus: (1..=10).map(|k| k as f64 / 100.0).collect(),
            coverage_runs: 50,
            crossing: CrossingSettings::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut graph = None;
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected key = value, got `{line}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "graph" => graph = Some(GraphSource::File(PathBuf::from(value))),
                "synth" => graph = Some(GraphSource::synth(value)?),
                _ => pairs.push((i + 1, key.to_string(), value.to_string())),
            }
        }
        let graph = graph.ok_or_else(|| Error::invalid("config needs a `graph` or `synth` entry"))?;
        let mut cfg = EvalConfig::new(graph);
        for (line, key, value) in pairs {
            cfg.set(&key, &value).map_err(|e| Error::Parse { line, message: e.to_string() })?;
        }
        Ok(cfg)
    }

    /// Applies one setting; used by the parser and for command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().map_err(|_| Error::invalid(format!("bad value `{value}` for `{key}`")))
        }
        fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
            value.split(',').map(|v| num(key, v.trim())).collect()
        }
        match key {
            "graph" => self.graph = GraphSource::File(PathBuf::from(value)),
            "synth" => self.graph = GraphSource::synth(value)?,
            "h" => self.h = num(key, value)?,
            "beta" => self.beta = num(key, value)?,
            "runs" => self.runs = num(key, value)?,
            "rescale_budget" => self.rescale_budget = num(key, value)?,
            "starts" => self.starts = Some(list(key, value)?),
            "taus" => self.taus = list(key, value)?,
            "coverage_runs" => self.coverage_runs = num(key, value)?,
            "crossing_c" => self.crossing.c = num(key, value)?,
            "crossing_delta" => self.crossing.delta = Some(num(key, value)?),
            "seed" => return Err(Error::invalid("the seed is passed with --seed, not in the config")),
            other => return Err(Error::invalid(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// The stretch-sweep settings, with labelled starts resolved on `g`.
    pub fn experiment(&self, g: &Graph, seed: u64) -> Result<ExperimentConfig> {
        let starts = match &self.starts {
            None => StartPolicy::UniformGiant,
            Some(labels) => StartPolicy::Fixed(
                labels
                    .iter()
                    .map(|&l| g.node_by_label(l).ok_or_else(|| Error::invalid(format!("start label {l} not in graph"))))
                    .collect::<Result<_>>()?,
            ),
        };
        let cfg = ExperimentConfig {
            h: self.h,
            beta: self.beta,
            runs: self.runs,
            seed,
            rescale_budget: self.rescale_budget,
            starts,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunMetadata {
    pub version: String,
    pub seed: u64,
    pub budget: usize,
    pub config: EvalConfig,
    pub graph: GraphStats,
}

#[derive(Clone, Debug)]
pub struct EvalResults {
    pub metadata: RunMetadata,
    pub experiment: ExperimentResult,
    pub coverage: Vec<CoverageValidationRow>,
    pub crossing: CrossingReport,
}

pub fn version_string() -> String {
    match option_env!("RWSP_GIT_REV") {
        Some(rev) => format!("v{}-g{rev}", env!("CARGO_PKG_VERSION")),
        None => format!("v{}", env!("CARGO_PKG_VERSION")),
    }
}

/// Loads the graph and runs the stretch sweep, the coverage validation and
/// the two-walker crossing measurement, each on its own seed stream.
pub fn run_eval(cfg: &EvalConfig, seed: u64) -> Result<EvalResults> {
    let g = cfg.graph.load(seed)?;
    let experiment_cfg = cfg.experiment(&g, derive_seed(seed, STRETCH_STREAM))?;
    let experiment = run_experiment(&g, &experiment_cfg)?;
    let coverage = coverage_validation(&g, &cfg.taus, cfg.coverage_runs, derive_seed(seed, COVERAGE_STREAM))?;
    let crossing_cfg = ExperimentConfig::new(2, cfg.beta, cfg.runs, derive_seed(seed, CROSSING_STREAM));
    let crossing = crossing_rate(&g, &crossing_cfg, cfg.crossing)?;
    Ok(EvalResults {
        metadata: RunMetadata {
            version: version_string(),
            seed,
            budget: experiment.budget,
            config: cfg.clone(),
            graph: GraphStats::of(&g)?,
        },
        experiment,
        coverage,
        crossing,
    })
}
