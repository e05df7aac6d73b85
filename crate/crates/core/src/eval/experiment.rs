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

//! Seeded Monte-Carlo experiments: RWSP stretch sweeps, single-walker
//! coverage against the mean-field curve, and two-walker crossing rates.
//!
//! Run `r` draws everything from `derive_seed(master, r)`, and runs execute
//! on the rayon pool. Results are merged in run order, so output never
//! depends on thread count.

use fixedbitset::FixedBitSet;
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::stretch::{StretchMatrix, StretchSummary};
use crate::error::{Error, Result};
use crate::graph::{bfs_distances, degree_moments, giant_component_nodes, Graph, NodeId};
use crate::meanfield::{self, CrossingBound, CrossingBoundParams};
use crate::rwsp::{rwsp_path_length, run_rwsp};
use crate::seed::{derive_seed, rng_from_seed, walker_rng};
use crate::walker::{budget_from_fraction, crossing_time, CrossingTime, Walk};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StartPolicy {
    /// `h` distinct nodes drawn uniformly from the giant component per run.
    UniformGiant,
    /// The same starts every run.
    Fixed(Vec<NodeId>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub h: usize,
    pub beta: f64,
    pub runs: usize,
    pub seed: u64,
    /// Use `B = floor(beta * n / h)` instead of `floor(beta * n)`.
    pub rescale_budget: bool,
    pub starts: StartPolicy,
}

impl ExperimentConfig {
    pub fn new(h: usize, beta: f64, runs: usize, seed: u64) -> Self {
        ExperimentConfig { h, beta, runs, seed, rescale_budget: false, starts: StartPolicy::UniformGiant }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(Error::invalid("runs must be at least 1"));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::invalid(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        if self.h < 2 {
            return Err(Error::invalid(format!("h must be at least 2, got {}", self.h)));
        }
        if let StartPolicy::Fixed(starts) = &self.starts {
            if starts.len() != self.h {
                return Err(Error::invalid(format!("{} fixed starts given for h = {}", starts.len(), self.h)));
            }
        }
        Ok(())
    }

    pub fn budget(&self, n: usize) -> usize {
        if self.rescale_budget {
            budget_from_fraction(self.beta / self.h as f64, n)
        } else {
            budget_from_fraction(self.beta, n)
        }
    }
}

/// Draws per-run start nodes.
struct StartSampler<'a> {
    policy: &'a StartPolicy,
    giant: Vec<NodeId>,
}

impl<'a> StartSampler<'a> {
    fn new(g: &Graph, policy: &'a StartPolicy, h: usize) -> Result<Self> {
        let giant = match policy {
            StartPolicy::UniformGiant => giant_component_nodes(g),
            StartPolicy::Fixed(starts) => {
                if let Some(&bad) = starts.iter().find(|&&s| !g.contains(s)) {
                    return Err(Error::UnknownNode(bad));
                }
                Vec::new()
            }
        };
        if matches!(policy, StartPolicy::UniformGiant) && giant.len() < h.max(2) {
            return Err(Error::invalid(format!(
                "giant component has {} nodes, fewer than the {h} walkers",
                giant.len()
            )));
        }
        Ok(StartSampler { policy, giant })
    }

    fn draw<R: Rng>(&self, rng: &mut R, h: usize) -> Vec<NodeId> {
        match self.policy {
            StartPolicy::Fixed(starts) => starts.clone(),
            StartPolicy::UniformGiant => sample(rng, self.giant.len(), h).into_iter().map(|k| self.giant[k]).collect(),
        }
    }
}

/// Draws `h` distinct start nodes uniformly from the giant component.
pub fn sample_starts(g: &Graph, h: usize, seed: u64) -> Result<Vec<NodeId>> {
    let policy = StartPolicy::UniformGiant;
    let sampler = StartSampler::new(g, &policy, h)?;
    Ok(sampler.draw(&mut rng_from_seed(seed), h))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MessagingTotals {
    pub advertise_hops: u64,
    pub transfer_hops: u64,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub budget: usize,
    pub runs: usize,
    /// RWSP routes on `G*`.
    pub matrix: StretchMatrix,
    /// Breadcrumb-retracing routes; INF when the two walks never crossed.
    pub naive_matrix: StretchMatrix,
    pub messaging: MessagingTotals,
}

impl ExperimentResult {
    pub fn summary(&self) -> StretchSummary {
        self.matrix.summary()
    }
}

struct RunTally {
    matrix: StretchMatrix,
    naive: StretchMatrix,
    messaging: MessagingTotals,
}

/// Runs `cfg.runs` RWSP executions and records every ordered walker pair.
pub fn run_experiment(g: &Graph, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let sampler = StartSampler::new(g, &cfg.starts, cfg.h)?;
    let budget = cfg.budget(g.node_count());
    if budget < 1 {
        return Err(Error::invalid(format!("beta = {} gives an empty budget on {} nodes", cfg.beta, g.node_count())));
    }

    let tallies = (0..cfg.runs)
        .into_par_iter()
        .map(|run| -> Result<RunTally> {
            let run_seed = derive_seed(cfg.seed, run as u64);
            let starts = sampler.draw(&mut rng_from_seed(run_seed), cfg.h);
            let outcome = run_rwsp(g, &starts, budget, derive_seed(run_seed, 1))?;
            let mut tally = RunTally { matrix: StretchMatrix::new(), naive: StretchMatrix::new(), messaging: Default::default() };
            for (i, &u) in starts.iter().enumerate() {
                let truth = bfs_distances(g, u);
                for (j, &v) in starts.iter().enumerate().filter(|&(j, _)| j != i) {
                    let d_true = truth[v.index()];
                    tally.matrix.record(d_true, rwsp_path_length(&outcome, i, j)?)?;
                    let naive = outcome
                        .naive_route(i, j)
                        .map_or(crate::graph::Distance::Unreachable, |r| crate::graph::Distance::Hops(r.len() as u32 - 1));
                    tally.naive.record(d_true, naive)?;
                }
            }
            for w in outcome.walkers() {
                tally.messaging.advertise_hops += w.cost.advertise_hops;
                tally.messaging.transfer_hops += w.cost.transfer_hops;
            }
            Ok(tally)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut result = ExperimentResult {
        budget,
        runs: cfg.runs,
        matrix: StretchMatrix::new(),
        naive_matrix: StretchMatrix::new(),
        messaging: MessagingTotals::default(),
    };
    for t in tallies {
        result.matrix.merge(&t.matrix);
        result.naive_matrix.merge(&t.naive);
        result.messaging.advertise_hops += t.messaging.advertise_hops;
        result.messaging.transfer_hops += t.messaging.transfer_hops;
    }
    Ok(result)
}

/// Empirical `|E(τn)| / 2m` next to the mean-field prediction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageValidationRow {
    pub tau: f64,
    pub steps: usize,
    pub empirical_mean: f64,
    pub empirical_std: f64,
    pub predicted: f64,
    pub outside_validity: bool,
}

/// Single walkers from uniform giant-component starts; `|E(t)|` is sampled
/// at `t = round(τn)` for each grid point (`t = 0` means no walk at all).
pub fn coverage_validation(g: &Graph, taus: &[f64], runs: usize, seed: u64) -> Result<Vec<CoverageValidationRow>> {
    if runs < 1 {
        return Err(Error::invalid("runs must be at least 1"));
    }
    if let Some(bad) = taus.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::invalid(format!("tau grid entries must be finite and non-negative, got {bad}")));
    }
    let n = g.node_count();
    let m = g.edge_count();
    let moments = degree_moments(g)?;
    let sampler = StartSampler::new(g, &StartPolicy::UniformGiant, 1)?;
    let steps: Vec<usize> = taus.iter().map(|t| (t * n as f64).round() as usize).collect();
    let longest = steps.iter().copied().max().unwrap_or(0).max(1);
    let mut order: Vec<usize> = (0..taus.len()).collect();
    order.sort_by_key(|&k| steps[k]);

    let samples: Vec<Vec<f64>> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let run_seed = derive_seed(seed, run as u64);
            let start = sampler.draw(&mut rng_from_seed(run_seed), 1)[0];
            let mut rng = walker_rng(derive_seed(run_seed, 1), 0);
            let mut walk = Walk::new(g, 0, start, longest)?;
            let mut fractions = vec![0.0; taus.len()];
            for &k in &order {
                if steps[k] == 0 {
                    continue;
                }
                while walk.trace().steps().len() < steps[k] {
                    walk.step(&mut rng);
                }
                fractions[k] = walk.trace().covered_edge_count() as f64 / (2 * m) as f64;
            }
            Ok(fractions)
        })
        .collect::<Result<_>>()?;

    taus.iter()
        .enumerate()
        .map(|(k, &tau)| {
            let column: Vec<f64> = samples.iter().map(|s| s[k]).collect();
            let mean = column.iter().sum::<f64>() / runs as f64;
            let var = if runs > 1 {
                column.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (runs - 1) as f64
            } else {
                0.0
            };
            let predicted = meanfield::edge_coverage(&moments, m, tau)?;
            Ok(CoverageValidationRow {
                tau,
                steps: steps[k],
                empirical_mean: mean,
                empirical_std: var.sqrt(),
                predicted: predicted.value / (2 * m) as f64,
                outside_validity: predicted.outside_validity,
            })
        })
        .collect()
}

/// `c` and `Δ` for the non-crossing bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossingSettings {
    pub c: f64,
    /// Defaults to `ceil(n / 100)`.
    pub delta: Option<usize>,
}

impl Default for CrossingSettings {
    fn default() -> Self {
        CrossingSettings { c: 1.0, delta: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossingReport {
    pub runs: usize,
    pub budget: usize,
    pub never_crossed: usize,
    pub non_crossing_rate: f64,
    /// Mean-field `γ̄(β) = n_e(β) / 2m`.
    pub gamma_bar: f64,
    /// Mean of `|E(B, i)| / 2m` over the first walkers.
    pub gamma_empirical: f64,
    pub c: f64,
    pub delta: usize,
    pub bound: CrossingBound,
    /// Estimate of `P[X_{w+Δ} ∈ S(B,i) | X_w ∉ S(B,i)]` pooled over runs and
    /// `w = 1..=B-Δ`; `None` when no such `w` exists.
    pub conditional_hit_rate: Option<f64>,
    /// Whether the estimate reaches `c·γ̄`.
    pub condition_holds: bool,
}

/// Walker 0 finishes its budget, then walker 1 walks; counts how often
/// walker 1 never touches walker 0's visited set.
pub fn crossing_rate(g: &Graph, cfg: &ExperimentConfig, settings: CrossingSettings) -> Result<CrossingReport> {
    cfg.validate()?;
    if cfg.h != 2 {
        return Err(Error::invalid(format!("crossing rate is defined for h = 2, got {}", cfg.h)));
    }
    let n = g.node_count();
    let m = g.edge_count();
    let sampler = StartSampler::new(g, &cfg.starts, 2)?;
    let budget = cfg.budget(n);
    let delta = settings.delta.unwrap_or_else(|| CrossingBoundParams::default_delta(n));
    if budget < 1 || delta < 1 {
        return Err(Error::invalid("budget and delta must both be at least one step"));
    }

    struct RunCrossing {
        never: bool,
        gamma: f64,
        observed: u64,
        hits: u64,
    }

    let per_run = (0..cfg.runs)
        .into_par_iter()
        .map(|run| -> Result<RunCrossing> {
            let run_seed = derive_seed(cfg.seed, run as u64);
            let starts = sampler.draw(&mut rng_from_seed(run_seed), 2);
            let walk_seed = derive_seed(run_seed, 1);
            let (first, _) = Walk::new(g, 0, starts[0], budget)?.finish(&mut walker_rng(walk_seed, 0));
            let (second, _) = Walk::new(g, 1, starts[1], budget)?.finish(&mut walker_rng(walk_seed, 1));
            let territory: &FixedBitSet = first.visited_set();
            let inside = |v: NodeId| territory.contains(v.index());
            let xs = second.steps();
            let mut observed = 0;
            let mut hits = 0;
            for w in 0..xs.len().saturating_sub(delta) {
                if !inside(xs[w]) {
                    observed += 1;
                    hits += inside(xs[w + delta]) as u64;
                }
            }
            Ok(RunCrossing {
                never: crossing_time(&second, territory) == CrossingTime::Never,
                gamma: first.covered_edge_count() as f64 / (2 * m) as f64,
                observed,
                hits,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let never_crossed = per_run.iter().filter(|r| r.never).count();
    let observed: u64 = per_run.iter().map(|r| r.observed).sum();
    let hits: u64 = per_run.iter().map(|r| r.hits).sum();
    let moments = degree_moments(g)?;
    let beta_effective = budget as f64 / n as f64;
    let gamma_bar = meanfield::gamma_bar(&moments, m, beta_effective)?;
    let bound = meanfield::crossing_probability_bound(&CrossingBoundParams {
        beta: beta_effective,
        n,
        delta,
        c: settings.c,
        gamma_bar,
    })?;
    let conditional_hit_rate = (observed > 0).then(|| hits as f64 / observed as f64);
    Ok(CrossingReport {
        runs: cfg.runs,
        budget,
        never_crossed,
        non_crossing_rate: never_crossed as f64 / cfg.runs as f64,
        gamma_bar,
        gamma_empirical: per_run.iter().map(|r| r.gamma).sum::<f64>() / cfg.runs as f64,
        c: settings.c,
        delta,
        bound,
        conditional_hit_rate,
        condition_holds: conditional_hit_rate.is_some_and(|p| p >= settings.c * gamma_bar),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Distance;
    use crate::synth::{complete, cycle, preferential_attachment};

    fn two_triangles() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::new(1, 0.1, 10, 0).validate().is_err());
        assert!(ExperimentConfig::new(2, 0.0, 10, 0).validate().is_err());
        assert!(ExperimentConfig::new(2, 1.0, 10, 0).validate().is_err());
        assert!(ExperimentConfig::new(2, 0.1, 0, 0).validate().is_err());
        let mut cfg = ExperimentConfig::new(3, 0.1, 1, 0);
        cfg.starts = StartPolicy::Fixed(vec![NodeId(0)]);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn budget_rescaling() {
        let mut cfg = ExperimentConfig::new(4, 0.025, 1, 0);
        assert_eq!(cfg.budget(10_000), 250);
        cfg.rescale_budget = true;
        assert_eq!(cfg.budget(10_000), 62);
    }

    #[test]
    fn complete_graph_is_always_optimal() {
        let g = complete(5);
        let result = run_experiment(&g, &ExperimentConfig::new(2, 0.99, 50, 3)).unwrap();
        assert_eq!(result.matrix.total(), 100);
        // Walkers that never cross leave their pair in the INF column.
        let met = result.matrix.count(Distance::Hops(1), Distance::Hops(1));
        let unmet = result.matrix.count(Distance::Hops(1), Distance::Unreachable);
        assert_eq!(met + unmet, 100);
        assert!(met >= 90, "{met}");
        assert_eq!(result.summary().fraction_optimal, 1.0);
    }

    #[test]
    fn cross_component_starts_are_all_inf() {
        let g = two_triangles();
        let mut cfg = ExperimentConfig::new(2, 0.5, 20, 1);
        cfg.starts = StartPolicy::Fixed(vec![NodeId(0), NodeId(4)]);
        let result = run_experiment(&g, &cfg).unwrap();
        assert_eq!(result.matrix.count(Distance::Unreachable, Distance::Unreachable), 40);
        assert_eq!(result.summary().inf_fraction, 1.0);
    }

    #[test]
    fn giant_component_too_small() {
        let g = two_triangles();
        assert!(run_experiment(&g, &ExperimentConfig::new(4, 0.5, 5, 1)).is_err());
    }

    #[test]
    fn experiment_is_deterministic_and_sound() {
        let g = preferential_attachment(400, 2, 9).unwrap();
        let cfg = ExperimentConfig::new(4, 0.05, 30, 77);
        let a = run_experiment(&g, &cfg).unwrap();
        let b = run_experiment(&g, &cfg).unwrap();
        assert_eq!(a.matrix, b.matrix);
        assert_eq!(a.naive_matrix, b.naive_matrix);
        assert_eq!(a.matrix.total(), 30 * 12);
        // RWSP never does worse than the naive route on crossed pairs
        assert!(a.summary().fraction_optimal >= a.naive_matrix.summary().fraction_optimal);
    }

    #[test]
    fn true_distance_histogram_matches_bfs() {
        let g = preferential_attachment(300, 2, 4).unwrap();
        let cfg = ExperimentConfig::new(3, 0.05, 25, 12);
        let result = run_experiment(&g, &cfg).unwrap();
        // independent recomputation over the same sampled starts
        let giant = giant_component_nodes(&g);
        let mut expected = std::collections::BTreeMap::new();
        for run in 0..cfg.runs {
            let starts: Vec<NodeId> = sample(&mut rng_from_seed(derive_seed(cfg.seed, run as u64)), giant.len(), 3)
                .into_iter()
                .map(|k| giant[k])
                .collect();
            for &u in &starts {
                let d = bfs_distances(&g, u);
                for &v in starts.iter().filter(|&&v| v != u) {
                    *expected.entry(d[v.index()]).or_insert(0u64) += 1;
                }
            }
        }
        for (d, count) in result.matrix.true_distance_histogram() {
            assert_eq!(count, expected.get(&d).copied().unwrap_or(0), "bin {d}");
        }
    }

    #[test]
    fn coverage_rows() {
        let g = preferential_attachment(2000, 3, 1).unwrap();
        let rows = coverage_validation(&g, &[0.0, 0.01, 0.05, 0.1], 20, 5).unwrap();
        assert_eq!(rows[0].empirical_mean, 0.0);
        assert_eq!(rows[0].predicted, 0.0);
        for w in rows.windows(2) {
            assert!(w[0].empirical_mean <= w[1].empirical_mean);
            assert!(w[0].predicted <= w[1].predicted);
        }
        assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.empirical_mean)));
        assert_eq!(rows, coverage_validation(&g, &[0.0, 0.01, 0.05, 0.1], 20, 5).unwrap());
        assert!(coverage_validation(&g, &[-0.1], 2, 0).is_err());
    }

    #[test]
    fn coverage_is_monotone_per_seed() {
        let g = preferential_attachment(500, 2, 2).unwrap();
        let taus: Vec<f64> = (0..20).map(|k| k as f64 * 0.02).collect();
        for seed in 0..5 {
            let rows = coverage_validation(&g, &taus, 1, seed).unwrap();
            assert!(rows.windows(2).all(|w| w[0].empirical_mean <= w[1].empirical_mean));
        }
    }

    #[test]
    fn crossing_trivial_cases() {
        let g = cycle(12);
        let mut cfg = ExperimentConfig::new(2, 0.2, 10, 0);
        cfg.starts = StartPolicy::Fixed(vec![NodeId(3), NodeId(3)]);
        let report = crossing_rate(&g, &cfg, CrossingSettings::default()).unwrap();
        assert_eq!(report.non_crossing_rate, 0.0);

        let g = two_triangles();
        let mut cfg = ExperimentConfig::new(2, 0.5, 10, 0);
        cfg.starts = StartPolicy::Fixed(vec![NodeId(0), NodeId(5)]);
        let report = crossing_rate(&g, &cfg, CrossingSettings::default()).unwrap();
        assert_eq!(report.non_crossing_rate, 1.0);
        assert!(crossing_rate(&g, &ExperimentConfig::new(3, 0.5, 10, 0), CrossingSettings::default()).is_err());
    }
}
