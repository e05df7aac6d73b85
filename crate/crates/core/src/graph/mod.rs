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

//! Simple undirected graphs in compressed adjacency form, plus the
//! ground-truth queries (degree moments, components, BFS distances) that
//! the walkers and the evaluation harness are checked against.

mod edge_list;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use edge_list::{load_edge_list, read_edge_list, write_edge_list};

/// Dense node identifier, `0 <= index < n` for the graph it came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index exceeds u32"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Hop distance between two nodes. `Unreachable` sorts after every finite
/// distance and is never encoded as a large number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Hops(u32),
    Unreachable,
}

impl Distance {
    pub fn hops(self) -> Option<u32> {
        match self {
            Distance::Hops(h) => Some(h),
            Distance::Unreachable => None,
        }
    }

    pub fn is_reachable(self) -> bool {
        matches!(self, Distance::Hops(_))
    }
}

/// Serialized as the hop count, or the string `"INF"`.
impl Serialize for Distance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Distance::Hops(h) => s.serialize_u32(*h),
            Distance::Unreachable => s.serialize_str("INF"),
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Hops(h) => write!(f, "{h}"),
            Distance::Unreachable => f.write_str("INF"),
        }
    }
}

/// Immutable simple undirected graph.
///
/// Neighbor lists are sorted, so edge membership is a binary search. Each
/// node also carries the label it had in the source data (identity for
/// generated graphs) so reports can refer back to original ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    labels: Vec<u64>,
}

impl Graph {
    /// Builds a graph on `n` nodes. Self-loops and repeated edges (in either
    /// orientation) are dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::with_labels((0..n as u64).collect(), edges)
    }

    pub fn with_labels<I>(labels: Vec<u64>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = labels.len();
        if n > u32::MAX as usize {
            return Err(Error::invalid("graphs are limited to u32::MAX nodes"));
        }
        let mut adjacency: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u}, {v}) out of range for {n} nodes")));
            }
            if u == v {
                continue;
            }
            adjacency[u].push(NodeId::from(v));
            adjacency[v].push(NodeId::from(u));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for mut list in adjacency {
            list.sort_unstable();
            list.dedup();
            targets.extend(list);
            offsets.push(targets.len());
        }
        Ok(Graph { offsets, targets, labels })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.index() < self.node_count()
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v.index() + 1] - self.offsets[v.index()]
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[v.index()]..self.offsets[v.index() + 1]]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.contains(u) && self.contains(v) && self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count()).map(NodeId::from)
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |u| {
            self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v))
        })
    }

    pub fn label(&self, v: NodeId) -> u64 {
        self.labels[v.index()]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn node_by_label(&self, label: u64) -> Option<NodeId> {
        self.labels.iter().position(|&l| l == label).map(NodeId::from)
    }

    /// Checks the structural invariants: symmetry, no self-loops, no
    /// duplicates, and the handshake identity.
    pub fn validate(&self) -> Result<()> {
        let violation = |msg: String| Err(Error::InvariantViolation(msg));
        let mut degree_sum = 0usize;
        for u in self.nodes() {
            let list = self.neighbors(u);
            degree_sum += list.len();
            for w in list.windows(2) {
                if w[0] >= w[1] {
                    return violation(format!("adjacency of {u} is not strictly sorted"));
                }
            }
            for &v in list {
                if v == u {
                    return violation(format!("self-loop at {u}"));
                }
                if !self.has_edge(v, u) {
                    return violation(format!("edge {u}-{v} is not symmetric"));
                }
            }
        }
        if degree_sum != 2 * self.edge_count() || !self.targets.len().is_multiple_of(2) {
            return violation("degree sum differs from 2m".into());
        }
        Ok(())
    }

    /// Induced subgraph on `nodes` (in the given order) together with the
    /// old-to-new id map.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> (Graph, Vec<Option<NodeId>>) {
        let mut mapping = vec![None; self.node_count()];
        for (new, &old) in nodes.iter().enumerate() {
            mapping[old.index()] = Some(NodeId::from(new));
        }
        let labels = nodes.iter().map(|&v| self.label(v)).collect();
        let edges = self.edges().filter_map(|(u, v)| match (mapping[u.index()], mapping[v.index()]) {
            (Some(a), Some(b)) => Some((a.index(), b.index())),
            _ => None,
        });
        let sub = Graph::with_labels(labels, edges).expect("induced edges are in range");
        (sub, mapping)
    }
}

/// First and second moments of the degree distribution and the ratio
/// `q = (<k^2> - <k>) / <k>`, the expected number of fresh edges a walker
/// picks up per newly visited node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeMoments {
    pub mean_degree: f64,
    pub second_moment: f64,
    pub q: f64,
}

impl DegreeMoments {
    /// Moments given directly, e.g. from a published table.
    pub fn from_moments(mean_degree: f64, second_moment: f64) -> Result<Self> {
        if !(mean_degree > 0.0) || !(second_moment >= mean_degree * mean_degree) {
            return Err(Error::invalid(format!(
                "moments <k>={mean_degree}, <k^2>={second_moment} are not a degree distribution"
            )));
        }
        Ok(DegreeMoments {
            mean_degree,
            second_moment,
            q: (second_moment - mean_degree) / mean_degree,
        })
    }
}

pub fn degree_moments(g: &Graph) -> Result<DegreeMoments> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::invalid("degree moments of an empty graph"));
    }
    let sum_sq: u128 = g.nodes().map(|v| (g.degree(v) as u128).pow(2)).sum();
    let mean_degree = (2 * g.edge_count()) as f64 / n as f64;
    let second_moment = sum_sq as f64 / n as f64;
    let q = if mean_degree > 0.0 { (second_moment - mean_degree) / mean_degree } else { 0.0 };
    Ok(DegreeMoments { mean_degree, second_moment, q })
}

/// Component index per node; components are numbered in order of their
/// smallest node id.
pub fn connected_components(g: &Graph) -> (Vec<u32>, usize) {
    const UNSET: u32 = u32::MAX;
    let mut component = vec![UNSET; g.node_count()];
    let mut count = 0u32;
    let mut queue = VecDeque::new();
    for s in g.nodes() {
        if component[s.index()] != UNSET {
            continue;
        }
        component[s.index()] = count;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if component[v.index()] == UNSET {
                    component[v.index()] = count;
                    queue.push_back(v);
                }
            }
        }
        count += 1;
    }
    (component, count as usize)
}

/// Nodes of the largest connected component, ascending. Ties go to the
/// component holding the smallest original label.
pub fn giant_component_nodes(g: &Graph) -> Vec<NodeId> {
    let (component, count) = connected_components(g);
    let mut size = vec![0usize; count];
    let mut min_label = vec![u64::MAX; count];
    for v in g.nodes() {
        let c = component[v.index()] as usize;
        size[c] += 1;
        min_label[c] = min_label[c].min(g.label(v));
    }
    let Some(best) = (0..count).max_by(|&a, &b| size[a].cmp(&size[b]).then(min_label[b].cmp(&min_label[a])))
    else {
        return Vec::new();
    };
    g.nodes().filter(|v| component[v.index()] as usize == best).collect()
}

/// Induced subgraph on the largest connected component and the old-to-new
/// id map.
pub fn giant_component(g: &Graph) -> (Graph, Vec<Option<NodeId>>) {
    g.induced_subgraph(&giant_component_nodes(g))
}

pub fn bfs_distances(g: &Graph, source: NodeId) -> Vec<Distance> {
    let mut dist = vec![Distance::Unreachable; g.node_count()];
    dist[source.index()] = Distance::Hops(0);
    let mut queue = VecDeque::from([(source, 0u32)]);
    while let Some((u, d)) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if dist[v.index()] == Distance::Unreachable {
                dist[v.index()] = Distance::Hops(d + 1);
                queue.push_back((v, d + 1));
            }
        }
    }
    dist
}

/// Ratio of a discovered route length to the true shortest-path length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stretch {
    Finite(f64),
    Infinite,
}

pub fn path_stretch(discovered: Distance, true_hops: u32) -> Result<Stretch> {
    if true_hops == 0 {
        return Err(Error::ZeroDistance);
    }
    Ok(match discovered {
        Distance::Hops(h) => Stretch::Finite(h as f64 / true_hops as f64),
        Distance::Unreachable => Stretch::Infinite,
    })
}

/// Summary emitted by `rwsp stats`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub mean_degree: f64,
    pub second_moment: f64,
    pub q: f64,
    pub giant_component_fraction: f64,
}

impl GraphStats {
    pub fn of(g: &Graph) -> Result<Self> {
        let moments = degree_moments(g)?;
        Ok(GraphStats {
            n: g.node_count(),
            m: g.edge_count(),
            mean_degree: moments.mean_degree,
            second_moment: moments.second_moment,
            q: moments.q,
            giant_component_fraction: giant_component_nodes(g).len() as f64 / g.node_count() as f64,
        })
    }
}
