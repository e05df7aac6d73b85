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

//! Joint distribution of (true shortest-path length, discovered length).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Distance;

/// Counts keyed by `(true, discovered)` distance. Finite distances start at
/// one hop; `Distance::Unreachable` is the INF bucket on either axis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StretchMatrix {
    counts: BTreeMap<(Distance, Distance), u64>,
}

/// Per-true-distance row, normalized over every pair in the row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowSummary {
    pub true_distance: Distance,
    pub pairs: u64,
    pub fraction_optimal: f64,
    pub fraction_within_one_hop: f64,
    pub fraction_within_two_hops: f64,
    pub fraction_inf: f64,
}

/// Overall fractions are over pairs where both distances are finite;
/// `inf_fraction` is the INF-column mass over all pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StretchSummary {
    pub pairs: u64,
    pub finite_pairs: u64,
    pub inf_fraction: f64,
    pub fraction_optimal: f64,
    pub fraction_within_one_hop: f64,
    pub fraction_within_two_hops: f64,
    pub mean_stretch: f64,
    pub rows: Vec<RowSummary>,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl StretchMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one ordered pair. A discovered route shorter than the true
    /// shortest path is reported as an invariant violation.
    pub fn record(&mut self, truth: Distance, found: Distance) -> Result<()> {
        if truth == Distance::Hops(0) || found == Distance::Hops(0) {
            return Err(Error::ZeroDistance);
        }
        if found < truth {
            return Err(Error::InvariantViolation(format!(
                "discovered route of length {found} beats the true distance {truth}"
            )));
        }
        *self.counts.entry((truth, found)).or_default() += 1;
        Ok(())
    }

    /// Cell-wise addition.
    pub fn merge(&mut self, other: &StretchMatrix) {
        for (&key, &c) in &other.counts {
            *self.counts.entry(key).or_default() += c;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    pub fn count(&self, truth: Distance, found: Distance) -> u64 {
        self.counts.get(&(truth, found)).copied().unwrap_or(0)
    }

    pub fn cells(&self) -> impl Iterator<Item = ((Distance, Distance), u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    /// Largest finite distance on either axis (at least 1).
    pub fn max_hops(&self) -> u32 {
        self.counts
            .keys()
            .flat_map(|&(a, b)| [a.hops(), b.hops()])
            .flatten()
            .max()
            .unwrap_or(1)
            .max(1)
    }

    /// Axis labels: `1..=max_hops` followed by INF. Shared by rows and columns.
    pub fn bins(&self) -> Vec<Distance> {
        (1..=self.max_hops()).map(Distance::Hops).chain([Distance::Unreachable]).collect()
    }

    pub fn row_total(&self, truth: Distance) -> u64 {
        self.counts.range((truth, Distance::Hops(0))..=(truth, Distance::Unreachable)).map(|(_, &c)| c).sum()
    }

    /// Row normalized to sum to one; an empty row is all zeros.
    pub fn row_fractions(&self, truth: Distance) -> Vec<f64> {
        let total = self.row_total(truth);
        self.bins().into_iter().map(|found| ratio(self.count(truth, found), total)).collect()
    }

    /// Marginal histogram of true distances over [`bins`](Self::bins).
    pub fn true_distance_histogram(&self) -> Vec<(Distance, u64)> {
        self.bins().into_iter().map(|d| (d, self.row_total(d))).collect()
    }

    pub fn summary(&self) -> StretchSummary {
        let mut finite = 0;
        let mut optimal = 0;
        let mut within_one = 0;
        let mut within_two = 0;
        let mut inf_column = 0;
        let mut stretch_sum = 0.0;
        for (&(truth, found), &c) in &self.counts {
            match (truth.hops(), found.hops()) {
                (Some(t), Some(f)) => {
                    finite += c;
                    let excess = f - t;
                    optimal += if excess == 0 { c } else { 0 };
                    within_one += if excess <= 1 { c } else { 0 };
                    within_two += if excess <= 2 { c } else { 0 };
                    stretch_sum += c as f64 * f as f64 / t as f64;
                }
                (_, None) => inf_column += c,
                (None, Some(_)) => unreachable!("rejected by record"),
            }
        }
        let rows = self
            .bins()
            .into_iter()
            .map(|truth| {
                let pairs = self.row_total(truth);
                let within = |slack: u32| {
                    let hits = match truth.hops() {
                        Some(t) => (t..=t + slack).map(|f| self.count(truth, Distance::Hops(f))).sum(),
                        None => 0,
                    };
                    ratio(hits, pairs)
                };
                RowSummary {
                    true_distance: truth,
                    pairs,
                    fraction_optimal: within(0),
                    fraction_within_one_hop: within(1),
                    fraction_within_two_hops: within(2),
                    fraction_inf: ratio(self.count(truth, Distance::Unreachable), pairs),
                }
            })
            .collect();
        StretchSummary {
            pairs: self.total(),
            finite_pairs: finite,
            inf_fraction: ratio(inf_column, self.total()),
            fraction_optimal: ratio(optimal, finite),
            fraction_within_one_hop: ratio(within_one, finite),
            fraction_within_two_hops: ratio(within_two, finite),
            mean_stretch: if finite == 0 { 0.0 } else { stretch_sum / finite as f64 },
            rows,
        }
    }
}
