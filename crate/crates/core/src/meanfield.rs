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

//! Closed-form coverage predictions for a single random walker and the
//! upper bound on the probability that two walkers never cross.
//!
//! With `τ = t/n`, the expected number of distinct edges incident to the
//! nodes a walker has visited is
//!
//! ```text
//! n_e(τ) = 2m (1 - exp(-(<k²> - <k>) / <k>² · τ))
//! ```
//!
//! and the expected number of visited nodes is `n_e(τ) / q`. Both are
//! mean-field results valid for `τ ≪ <k>²/<k²>`; evaluations past
//! [`VALIDITY_FRACTION`] of that scale carry a warning flag.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DegreeMoments;
use crate::synth::PowerLawParams;
use crate::walker::budget_from_fraction;

/// `τ` above `VALIDITY_FRACTION · <k>²/<k²>` is flagged as outside the
/// small-budget regime.
pub const VALIDITY_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    pub value: f64,
    pub outside_validity: bool,
}

/// One row of a predicted coverage curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveragePoint {
    pub tau: f64,
    pub expected_edges: f64,
    pub expected_nodes: f64,
    pub gamma_bar: f64,
    pub outside_validity: bool,
}

pub fn validity_scale(moments: &DegreeMoments) -> f64 {
    moments.mean_degree * moments.mean_degree / moments.second_moment
}

fn check_tau(tau: f64) -> Result<()> {
    if tau >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("tau must be non-negative, got {tau}")))
    }
}

pub fn edge_coverage(moments: &DegreeMoments, m: usize, tau: f64) -> Result<CoverageEstimate> {
    check_tau(tau)?;
    let rate = (moments.second_moment - moments.mean_degree) / (moments.mean_degree * moments.mean_degree);
    // -expm1(-x) keeps full precision for tiny x where 1 - e^-x cancels
    let value = 2.0 * m as f64 * -(-rate * tau).exp_m1();
    Ok(CoverageEstimate {
        value,
        outside_validity: tau > VALIDITY_FRACTION * validity_scale(moments),
    })
}

pub fn node_coverage(moments: &DegreeMoments, m: usize, tau: f64) -> Result<CoverageEstimate> {
    if !(moments.q > 0.0) {
        return Err(Error::invalid("node coverage needs q > 0 (some node of degree >= 2)"));
    }
    let edges = edge_coverage(moments, m, tau)?;
    Ok(CoverageEstimate { value: edges.value / moments.q, ..edges })
}

/// First-order (small budget) edge coverage `q·β·n`.
pub fn linear_edge_coverage(moments: &DegreeMoments, beta: f64, n: usize) -> f64 {
    moments.q * beta * n as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PowerLawCoverage {
    Diverges,
    Edges(f64),
}

/// Asymptotic linear-regime coverage for an ideal power law: diverges for
/// `alpha <= 3`, `βn/(alpha - 3)` otherwise.
pub fn powerlaw_edge_coverage(p: &PowerLawParams, beta: f64) -> Result<PowerLawCoverage> {
    p.validate()?;
    if !(beta > 0.0) {
        return Err(Error::invalid(format!("beta must be positive, got {beta}")));
    }
    if p.alpha <= 3.0 {
        Ok(PowerLawCoverage::Diverges)
    } else {
        Ok(PowerLawCoverage::Edges(beta * p.n as f64 / (p.alpha - 3.0)))
    }
}

/// Expected fraction of edge endpoints owned by one finished walker,
/// `n_e(β) / 2m`.
pub fn gamma_bar(moments: &DegreeMoments, m: usize, beta: f64) -> Result<f64> {
    Ok(edge_coverage(moments, m, beta)?.value / (2.0 * m as f64))
}

pub fn coverage_curve(moments: &DegreeMoments, m: usize, taus: &[f64]) -> Result<Vec<CoveragePoint>> {
    taus.iter()
        .map(|&tau| {
            let edges = edge_coverage(moments, m, tau)?;
            let nodes = node_coverage(moments, m, tau)?;
            Ok(CoveragePoint {
                tau,
                expected_edges: edges.value,
                expected_nodes: nodes.value,
                gamma_bar: edges.value / (2.0 * m as f64),
                outside_validity: edges.outside_validity,
            })
        })
        .collect()
}

/// Inputs to the non-crossing bound. `c` and `delta` have no estimation
/// procedure; callers supply them (defaults: `c = 1`, `delta = ceil(n/100)`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingBoundParams {
    pub beta: f64,
    pub n: usize,
    pub delta: usize,
    pub c: f64,
    pub gamma_bar: f64,
}

impl CrossingBoundParams {
    pub fn default_delta(n: usize) -> usize {
        n.div_ceil(100).max(1)
    }

    fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::invalid(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        if self.delta < 1 {
            return Err(Error::invalid("delta must be at least one step"));
        }
        let attraction = self.c * self.gamma_bar;
        if !(attraction >= 0.0) {
            return Err(Error::invalid(format!("c * gamma_bar must be non-negative, got {attraction}")));
        }
        if attraction > 1.0 {
            return Err(Error::invalid(format!("c * gamma_bar = {attraction} exceeds 1; the bound is ill-formed")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingBound {
    pub probability: f64,
    /// `floor(βn / Δ)`, the number of spaced observation points.
    pub exponent: u64,
}

/// `P[walker j never enters S(B,i)] <= (1 - c·γ̄)^floor(βn/Δ)`.
pub fn crossing_probability_bound(params: &CrossingBoundParams) -> Result<CrossingBound> {
    params.validate()?;
    let exponent = (budget_from_fraction(params.beta, params.n) / params.delta) as u64;
    let probability = (1.0 - params.c * params.gamma_bar).powf(exponent as f64);
    Ok(CrossingBound { probability, exponent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spot() -> DegreeMoments {
        DegreeMoments::from_moments(2.0, 6.0).unwrap()
    }

    #[test]
    fn edge_coverage_spot_value() {
        // 600 (1 - e^-0.1), mpmath at 30 digits
        let v = edge_coverage(&spot(), 300, 0.1).unwrap().value;
        assert_relative_eq!(v, 57.097_549_178_424_26, max_relative = 1e-12);
        assert_eq!(edge_coverage(&spot(), 300, 0.0).unwrap().value, 0.0);
        assert_relative_eq!(edge_coverage(&spot(), 300, 1e6).unwrap().value, 600.0);
        assert!(edge_coverage(&spot(), 300, -0.1).is_err());
    }

    #[test]
    fn node_coverage_spot_value() {
        let v = node_coverage(&spot(), 300, 0.1).unwrap().value;
        assert_relative_eq!(v, 28.548_774_589_212_13, max_relative = 1e-12);
        assert_eq!(node_coverage(&spot(), 300, 0.0).unwrap().value, 0.0);
        let matching = DegreeMoments::from_moments(1.0, 1.0).unwrap();
        assert!(node_coverage(&matching, 10, 0.1).is_err());
    }

    #[test]
    fn node_coverage_is_linear_for_small_tau() {
        // n = 300 nodes with <k> = 2 gives m = 300
        let moments = spot();
        let n = 300.0;
        let limit = 0.01 * validity_scale(&moments);
        for tau in [limit, limit / 10.0, limit / 1000.0] {
            let ratio = node_coverage(&moments, 300, tau).unwrap().value / (tau * n);
            assert!((0.9..=1.0).contains(&ratio), "ratio {ratio} at tau {tau}");
        }
    }

    #[test]
    fn node_coverage_matches_direct_form() {
        // n_e / q written out with 2m = n<k>.
        let moments = DegreeMoments::from_moments(3.4, 41.0).unwrap();
        let (n, m) = (10_000usize, 17_000usize);
        let direct = |tau: f64| {
            let (k, k2) = (moments.mean_degree, moments.second_moment);
            n as f64 * k * k / (k2 - k) * (1.0 - (-(k2 - k) / (k * k) * tau).exp())
        };
        for tau in [0.001, 0.05, 0.3] {
            assert_relative_eq!(node_coverage(&moments, m, tau).unwrap().value, direct(tau), max_relative = 1e-9);
        }
    }

    #[test]
    fn validity_flag() {
        let moments = spot();
        // <k>^2/<k^2> = 2/3
        assert!(!edge_coverage(&moments, 300, 0.06).unwrap().outside_validity);
        assert!(edge_coverage(&moments, 300, 0.07).unwrap().outside_validity);
    }

    #[test]
    fn linear_coverage_values() {
        let gnutella = DegreeMoments { mean_degree: 4.7, second_moment: 0.0, q: 10.6 };
        assert_relative_eq!(linear_edge_coverage(&gnutella, 0.05, 62_500), 33_125.0, max_relative = 1e-12);
        assert_eq!(linear_edge_coverage(&gnutella, 0.0, 62_500), 0.0);
        let flickr = DegreeMoments { mean_degree: 18.1, second_moment: 0.0, q: 943.4 };
        assert_relative_eq!(
            linear_edge_coverage(&flickr, 0.01, 1_700_000),
            943.4 * 1_700_000.0 * 0.01,
            max_relative = 1e-12
        );
    }

    #[test]
    fn linear_coverage_is_first_order_term() {
        let moments = DegreeMoments::from_moments(3.0, 20.0).unwrap();
        let n = 10_000;
        let m = (moments.mean_degree * n as f64 / 2.0) as usize;
        let beta = 1e-4 * moments.mean_degree.powi(2) / moments.q;
        let exact = edge_coverage(&moments, m, beta).unwrap().value;
        let linear = linear_edge_coverage(&moments, beta, n);
        assert!((exact - linear).abs() / linear < 0.01);
    }

    #[test]
    fn power_law_regimes() {
        let p = |alpha| PowerLawParams::new(alpha, 2, 10_000).unwrap();
        assert_eq!(powerlaw_edge_coverage(&p(2.5), 0.01).unwrap(), PowerLawCoverage::Diverges);
        assert_eq!(powerlaw_edge_coverage(&p(3.0), 0.01).unwrap(), PowerLawCoverage::Diverges);
        assert_eq!(powerlaw_edge_coverage(&p(4.0), 0.01).unwrap(), PowerLawCoverage::Edges(100.0));
        match powerlaw_edge_coverage(&p(1e9), 0.01).unwrap() {
            PowerLawCoverage::Edges(e) => assert!(e > 0.0 && e < 1e-6),
            other => panic!("{other:?}"),
        }
        assert!(powerlaw_edge_coverage(&p(4.0), 0.0).is_err());
    }

    #[test]
    fn crossing_bound_values() {
        let params = CrossingBoundParams { beta: 0.02, n: 100, delta: 1, c: 1.0, gamma_bar: 0.5 };
        let bound = crossing_probability_bound(&params).unwrap();
        assert_eq!(bound.exponent, 2);
        assert_relative_eq!(bound.probability, 0.25);

        let vanishing = CrossingBoundParams { gamma_bar: 1e-300, ..params };
        assert_relative_eq!(crossing_probability_bound(&vanishing).unwrap().probability, 1.0);

        let too_strong = CrossingBoundParams { c: 3.0, ..params };
        assert!(crossing_probability_bound(&too_strong).is_err());
        assert!(crossing_probability_bound(&CrossingBoundParams { beta: 1.0, ..params }).is_err());
        assert!(crossing_probability_bound(&CrossingBoundParams { delta: 0, ..params }).is_err());
    }

    #[test]
    fn crossing_bound_vanishes_with_n() {
        let mut last = 1.0;
        for n in [1_000, 10_000, 100_000, 1_000_000] {
            let params = CrossingBoundParams { beta: 0.025, n, delta: 10, c: 1.0, gamma_bar: 0.05 };
            let p = crossing_probability_bound(&params).unwrap().probability;
            assert!(p < last);
            last = p;
        }
        assert!(last < 1e-10);
    }

    #[test]
    fn default_delta_is_one_percent() {
        assert_eq!(CrossingBoundParams::default_delta(10_000), 100);
        assert_eq!(CrossingBoundParams::default_delta(10_001), 101);
        assert_eq!(CrossingBoundParams::default_delta(5), 1);
    }

    #[test]
    fn coverage_curve_rows() {
        let rows = coverage_curve(&spot(), 300, &[0.0, 0.1]).unwrap();
        assert_eq!(rows[0].expected_edges, 0.0);
        assert_relative_eq!(rows[1].gamma_bar, rows[1].expected_edges / 600.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn moments() -> impl Strategy<Value = DegreeMoments> {
            (1.0f64..20.0, 1.0f64..50.0)
                .prop_map(|(k, spread)| DegreeMoments::from_moments(k, k * k * spread).unwrap())
        }

        proptest! {
            #[test]
            fn edge_coverage_monotone_concave_bounded(mo in moments(), m in 1usize..100_000, tau in 0.0f64..5.0, h in 1e-4f64..0.5) {
                let f = |t| edge_coverage(&mo, m, t).unwrap().value;
                let (a, b, c) = (f(tau), f(tau + h), f(tau + 2.0 * h));
                prop_assert!(a <= b && b <= c);
                prop_assert!(c <= 2.0 * m as f64 * (1.0 + 1e-12));
                prop_assert!(b - a >= c - b - 1e-9 * c.max(1.0));
            }

            #[test]
            fn node_coverage_below_edge_coverage(mo in moments(), m in 1usize..100_000, tau in 0.0f64..5.0) {
                prop_assume!(mo.q >= 1.0);
                let e = edge_coverage(&mo, m, tau).unwrap().value;
                let v = node_coverage(&mo, m, tau).unwrap().value;
                prop_assert!(v <= e * (1.0 + 1e-12));
            }

            #[test]
            fn crossing_bound_monotone(c in 0.01f64..1.0, g in 0.01f64..1.0, n in 100usize..100_000, dc in 0.0f64..0.5, dg in 0.0f64..0.5) {
                let base = CrossingBoundParams { beta: 0.05, n, delta: 3, c, gamma_bar: g };
                let p0 = crossing_probability_bound(&base).unwrap().probability;
                let more_c = CrossingBoundParams { c: (c + dc).min(1.0), ..base };
                let more_g = CrossingBoundParams { gamma_bar: (g + dg).min(1.0), ..base };
                let longer = CrossingBoundParams { n: n * 2, ..base };
                prop_assert!(crossing_probability_bound(&more_c).unwrap().probability <= p0);
                prop_assert!(crossing_probability_bound(&more_g).unwrap().probability <= p0);
                prop_assert!(crossing_probability_bound(&longer).unwrap().probability <= p0);
            }
        }
    }
}
