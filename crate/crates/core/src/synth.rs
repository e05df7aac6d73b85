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

//! Synthetic graph generators: erased configuration model over power-law
//! degrees, preferential attachment, and a few small deterministic shapes
//! used as fixtures and controls.

use std::collections::HashMap;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed::rng_from_seed;

/// Discrete power law `p_k ∝ k^-alpha` on `[k_min, k_cap]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawParams {
    pub alpha: f64,
    pub k_min: usize,
    pub n: usize,
}

impl PowerLawParams {
    pub fn new(alpha: f64, k_min: usize, n: usize) -> Result<Self> {
        let p = PowerLawParams { alpha, k_min, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        // alpha = +inf is allowed: all mass sits on k_min.
        if !(self.alpha > 1.0) {
            return Err(Error::invalid(format!("power-law exponent must exceed 1, got {}", self.alpha)));
        }
        if self.k_min < 1 {
            return Err(Error::invalid("k_min must be at least 1"));
        }
        if self.n < 2 {
            return Err(Error::invalid("power-law graphs need at least 2 nodes"));
        }
        Ok(())
    }

    /// Structural cutoff `floor(sqrt(n * k_min))`, never below `k_min`.
    pub fn degree_cap(&self) -> usize {
        (((self.n * self.k_min) as f64).sqrt().floor() as usize).max(self.k_min)
    }
}

/// Requested degree per node; the sum is always even.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSequence(Vec<usize>);

impl DegreeSequence {
    /// An odd total is fixed by incrementing the last entry.
    pub fn new(mut degrees: Vec<usize>) -> Self {
        if degrees.iter().sum::<usize>() % 2 == 1 {
            *degrees.last_mut().expect("odd sum implies non-empty") += 1;
        }
        DegreeSequence(degrees)
    }

    pub fn degrees(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn stub_count(&self) -> usize {
        self.0.iter().sum()
    }
}

pub fn power_law_degrees(p: &PowerLawParams, seed: u64) -> Result<DegreeSequence> {
    p.validate()?;
    let cap = p.degree_cap();
    let support: Vec<usize> = (p.k_min..=cap).collect();
    // Weights relative to k_min keep large exponents from underflowing to
    // an all-zero table.
    let weights = support.iter().map(|&k| (k as f64 / p.k_min as f64).powf(-p.alpha));
    let dist = WeightedIndex::new(weights).map_err(|e| Error::invalid(format!("degree pmf: {e}")))?;
    let mut rng = rng_from_seed(seed);
    let mut degrees: Vec<usize> = (0..p.n).map(|_| support[dist.sample(&mut rng)]).collect();

    if degrees.iter().sum::<usize>() % 2 == 1 {
        // Parity fix on the last entry that still has room under the cap.
        let slot = degrees.iter().rposition(|&d| d < cap).unwrap_or(p.n - 1);
        degrees[slot] += 1;
    }
    Ok(DegreeSequence::new(degrees))
}

/// Uniform stub matching with self-loops and multi-edges erased.
pub fn configuration_model(d: &DegreeSequence, seed: u64) -> Graph {
    let mut stubs: Vec<usize> = d
        .degrees()
        .iter()
        .enumerate()
        .flat_map(|(v, &k)| std::iter::repeat_n(v, k))
        .collect();
    let mut rng = rng_from_seed(seed);
    stubs.shuffle(&mut rng);
    let edges = stubs.chunks_exact(2).map(|pair| (pair[0], pair[1]));
    Graph::from_edges(d.len(), edges).expect("stubs reference valid nodes")
}

/// Growth from an `(m0 + 1)`-clique; each new node links to `m0` distinct
/// existing nodes picked with probability proportional to degree.
pub fn preferential_attachment(n: usize, m0: usize, seed: u64) -> Result<Graph> {
    if m0 < 1 || n <= m0 {
        return Err(Error::invalid(format!("preferential attachment needs n > m0 >= 1, got n={n}, m0={m0}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::with_capacity(m0 * (m0 + 1) / 2 + (n - m0 - 1) * m0);
    // every node appears once per incident edge
    let mut endpoints = Vec::with_capacity(2 * edges.capacity());
    for u in 0..=m0 {
        for v in (u + 1)..=m0 {
            edges.push((u, v));
            endpoints.extend([u, v]);
        }
    }
    let mut chosen = Vec::with_capacity(m0);
    for v in (m0 + 1)..n {
        chosen.clear();
        while chosen.len() < m0 {
            let target = endpoints[rng.random_range(0..endpoints.len())];
            if !chosen.contains(&target) {
                chosen.push(target);
            }
        }
        for &t in &chosen {
            edges.push((v, t));
            endpoints.extend([v, t]);
        }
    }
    Graph::from_edges(n, edges)
}

pub fn grid_2d(rows: usize, cols: usize) -> Graph {
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Graph::from_edges(rows * cols, edges).expect("grid ids in range")
}

pub fn cycle(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle ids in range")
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path ids in range")
}

pub fn star(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (0, i))).expect("star ids in range")
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))).expect("clique ids in range")
}

/// Textual generator description, e.g. `pa:n=5000,m0=3`,
/// `cm:n=10000,alpha=2.5,kmin=2`, `grid:rows=70,cols=70`.
#[derive(Clone, Debug, PartialEq)]
pub enum SynthSpec {
    PowerLawConfiguration(PowerLawParams),
    PreferentialAttachment { n: usize, m0: usize },
    Grid { rows: usize, cols: usize },
    Cycle(usize),
    Path(usize),
    Star(usize),
    Complete(usize),
}

impl SynthSpec {
    pub fn generate(&self, seed: u64) -> Result<Graph> {
        match *self {
            SynthSpec::PowerLawConfiguration(p) => {
                let degrees = power_law_degrees(&p, seed)?;
                Ok(configuration_model(&degrees, crate::seed::derive_seed(seed, 1)))
            }
            SynthSpec::PreferentialAttachment { n, m0 } => preferential_attachment(n, m0, seed),
            SynthSpec::Grid { rows, cols } => Ok(grid_2d(rows, cols)),
            SynthSpec::Cycle(n) => Ok(cycle(n)),
            SynthSpec::Path(n) => Ok(path(n)),
            SynthSpec::Star(n) => Ok(star(n)),
            SynthSpec::Complete(n) => Ok(complete(n)),
        }
    }
}

impl FromStr for SynthSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params: HashMap<&str, &str> = HashMap::new();
        for kv in rest.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected key=value in synth spec, got `{kv}`")))?;
            params.insert(k.trim(), v.trim());
        }
        fn get<T: FromStr>(params: &HashMap<&str, &str>, key: &str) -> Result<T> {
            let raw = params.get(key).ok_or_else(|| Error::invalid(format!("synth spec is missing `{key}`")))?;
            raw.parse().map_err(|_| Error::invalid(format!("bad value `{raw}` for `{key}`")))
        }
        let spec = match kind.trim() {
            "cm" | "powerlaw" => SynthSpec::PowerLawConfiguration(PowerLawParams::new(
                get(&params, "alpha")?,
                get(&params, "kmin")?,
                get(&params, "n")?,
            )?),
            "pa" => SynthSpec::PreferentialAttachment { n: get(&params, "n")?, m0: get(&params, "m0")? },
            "grid" => SynthSpec::Grid { rows: get(&params, "rows")?, cols: get(&params, "cols")? },
            "cycle" => SynthSpec::Cycle(get(&params, "n")?),
            "path" => SynthSpec::Path(get(&params, "n")?),
            "star" => SynthSpec::Star(get(&params, "n")?),
            "complete" => SynthSpec::Complete(get(&params, "n")?),
            other => return Err(Error::invalid(format!("unknown generator `{other}`"))),
        };
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{degree_moments, NodeId};

    #[test]
    fn infinite_exponent_collapses_to_k_min() {
        let p = PowerLawParams::new(f64::INFINITY, 3, 1000).unwrap();
        let d = power_law_degrees(&p, 1).unwrap();
        assert!(d.degrees().iter().all(|&k| k == 3));
        let p = PowerLawParams::new(500.0, 2, 1000).unwrap();
        assert!(power_law_degrees(&p, 1).unwrap().degrees().iter().all(|&k| k == 2));
    }

    #[test]
    fn power_law_mean_matches_truncated_pmf() {
        let p = PowerLawParams::new(2.5, 2, 10_000).unwrap();
        let cap = (20_000f64).sqrt().floor() as usize;
        // oracle: direct summation of the truncated pmf
        let z: f64 = (2..=cap).map(|k| (k as f64).powf(-2.5)).sum();
        let mean: f64 = (2..=cap).map(|k| k as f64 * (k as f64).powf(-2.5)).sum::<f64>() / z;
        let d = power_law_degrees(&p, 42).unwrap();
        let empirical = d.stub_count() as f64 / d.len() as f64;
        assert!((empirical - mean).abs() / mean < 0.10, "empirical {empirical} vs analytic {mean}");
        assert!(d.degrees().iter().all(|&k| (2..=cap).contains(&k)));
        assert_eq!(d.stub_count() % 2, 0);
    }

    #[test]
    fn invalid_power_law_params() {
        assert!(PowerLawParams::new(1.0, 2, 10).is_err());
        assert!(PowerLawParams::new(2.5, 0, 10).is_err());
        assert!(PowerLawParams::new(2.5, 2, 1).is_err());
        assert!(PowerLawParams::new(f64::NAN, 2, 10).is_err());
    }

    #[test]
    fn degree_sequence_parity() {
        assert_eq!(DegreeSequence::new(vec![1, 2]).degrees(), &[1, 3]);
        assert_eq!(DegreeSequence::new(vec![1, 1]).degrees(), &[1, 1]);
    }

    #[test]
    fn configuration_model_single_edge() {
        let g = configuration_model(&DegreeSequence::new(vec![1, 1]), 9);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn configuration_model_three_twos() {
        // Of the 15 perfect matchings of six stubs, 8 pair every node with
        // both others (a triangle); the rest contain a self-loop.
        let d = DegreeSequence::new(vec![2, 2, 2]);
        let mut triangles = 0;
        for seed in 0..3000 {
            let g = configuration_model(&d, seed);
            g.validate().unwrap();
            assert!(g.nodes().all(|v| g.degree(v) <= 2));
            assert!(g.edge_count() <= 3);
            if g.edge_count() == 3 {
                triangles += 1;
            }
        }
        let rate = triangles as f64 / 3000.0;
        assert!((rate - 8.0 / 15.0).abs() < 0.04, "triangle rate {rate}");
    }

    #[test]
    fn configuration_model_never_exceeds_requested() {
        let p = PowerLawParams::new(2.2, 1, 2000).unwrap();
        let d = power_law_degrees(&p, 3).unwrap();
        let g = configuration_model(&d, 4);
        g.validate().unwrap();
        assert!(g.edge_count() <= d.stub_count() / 2);
        assert!(g.nodes().all(|v| g.degree(v) <= d.degrees()[v.index()]));
    }

    #[test]
    fn preferential_attachment_edge_count() {
        let g = preferential_attachment(4, 3, 0).unwrap();
        assert_eq!(g, complete(4));
        let g = preferential_attachment(1000, 3, 17).unwrap();
        g.validate().unwrap();
        assert_eq!(g.edge_count(), 6 + (1000 - 4) * 3);
        assert!(preferential_attachment(3, 3, 0).is_err());
        assert!(preferential_attachment(10, 0, 0).is_err());
    }

    #[test]
    fn preferential_attachment_q_grows_with_n() {
        let q = |n| degree_moments(&preferential_attachment(n, 3, 5).unwrap()).unwrap().q;
        let (a, b, c) = (q(1_000), q(10_000), q(100_000));
        assert!(a < b && b < c, "q: {a} {b} {c}");
    }

    #[test]
    fn generators_are_deterministic() {
        let p = PowerLawParams::new(2.5, 2, 500).unwrap();
        let spec = SynthSpec::PowerLawConfiguration(p);
        assert_eq!(spec.generate(11).unwrap(), spec.generate(11).unwrap());
        assert_eq!(preferential_attachment(300, 2, 1).unwrap(), preferential_attachment(300, 2, 1).unwrap());
    }

    #[test]
    fn small_shapes() {
        let g = grid_2d(3, 4);
        assert_eq!((g.node_count(), g.edge_count()), (12, 17));
        assert_eq!(cycle(5).edge_count(), 5);
        assert_eq!(path(5).edge_count(), 4);
        assert_eq!(star(5).degree(NodeId(0)), 4);
        assert_eq!(complete(5).edge_count(), 10);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!("pa:n=50,m0=2".parse::<SynthSpec>().unwrap(), SynthSpec::PreferentialAttachment { n: 50, m0: 2 });
        assert_eq!(
            "cm:n=100, alpha=2.5, kmin=2".parse::<SynthSpec>().unwrap(),
            SynthSpec::PowerLawConfiguration(PowerLawParams { alpha: 2.5, k_min: 2, n: 100 })
        );
        assert!("grid:rows=3".parse::<SynthSpec>().is_err());
        assert!("mystery:n=3".parse::<SynthSpec>().is_err());
        assert!("cm:n=100,alpha=0.5,kmin=2".parse::<SynthSpec>().is_err());
    }
}
