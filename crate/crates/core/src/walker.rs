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

//! Budgeted simple random walks with first-visit breadcrumbs.
//!
//! A walk's budget counts entries of the node sequence, start included, so
//! a walk with budget `B` makes `B - 1` moves. Every visited node exposes its
//! full neighbor list, which is how a walker covers edges it never traverses.

use fixedbitset::FixedBitSet;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::seed::walker_rng;

/// `floor(beta * n)`, tolerant of representation error in `beta`.
pub fn budget_from_fraction(beta: f64, n: usize) -> usize {
    (beta * n as f64 * (1.0 + 8.0 * f64::EPSILON)).floor() as usize
}

/// Predecessor recorded at each node's first visit. Following predecessors
/// from any visited node reaches the start along a tree path.
#[derive(Clone, Debug)]
pub struct BreadcrumbTable {
    start: NodeId,
    predecessor: Vec<Option<NodeId>>,
    visited: FixedBitSet,
}

impl BreadcrumbTable {
    fn new(n: usize, start: NodeId) -> Self {
        let mut visited = FixedBitSet::with_capacity(n);
        visited.insert(start.index());
        BreadcrumbTable { start, predecessor: vec![None; n], visited }
    }

    pub fn start(&self) -> NodeId {
        self.start
    }

    pub fn predecessor(&self, v: NodeId) -> Option<NodeId> {
        self.predecessor.get(v.index()).copied().flatten()
    }

    pub fn is_visited(&self, v: NodeId) -> bool {
        self.visited.contains(v.index())
    }

    /// Hops from `v` back to the start, or `None` if `v` was never visited.
    pub fn depth(&self, v: NodeId) -> Option<usize> {
        if !self.is_visited(v) {
            return None;
        }
        let mut hops = 0;
        let mut at = v;
        while let Some(p) = self.predecessor(at) {
            at = p;
            hops += 1;
        }
        Some(hops)
    }
}

/// Node sequence `X`, visited set `S` and covered-edge tally of one walker.
#[derive(Clone, Debug)]
pub struct WalkTrace {
    walker_id: usize,
    budget: usize,
    steps: Vec<NodeId>,
    visited: FixedBitSet,
    unique_nodes: usize,
    covered_edges: usize,
}

impl WalkTrace {
    pub fn walker_id(&self) -> usize {
        self.walker_id
    }

    pub fn start(&self) -> NodeId {
        self.steps[0]
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn steps(&self) -> &[NodeId] {
        &self.steps
    }

    pub fn visited_set(&self) -> &FixedBitSet {
        &self.visited
    }

    pub fn is_visited(&self, v: NodeId) -> bool {
        self.visited.contains(v.index())
    }

    pub fn visited_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.visited.ones().map(NodeId::from)
    }

    pub fn unique_nodes(&self) -> usize {
        self.unique_nodes
    }

    /// `|E(t, i)|`: edges of the graph with at least one visited endpoint.
    pub fn covered_edge_count(&self) -> usize {
        self.covered_edges
    }

    /// The covered edges themselves, each as `(u, v)` with `u < v`.
    pub fn covered_edges(&self, g: &Graph) -> Vec<(NodeId, NodeId)> {
        let mut edges: Vec<_> = self
            .visited_nodes()
            .flat_map(|u| g.neighbors(u).iter().map(move |&v| (u.min(v), u.max(v))))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub node: NodeId,
    pub first_visit: bool,
}

/// A walk in progress. Used directly when walkers must advance in lockstep;
/// [`run_walk`] drives one to completion.
#[derive(Clone, Debug)]
pub struct Walk<'g> {
    graph: &'g Graph,
    trace: WalkTrace,
    crumbs: BreadcrumbTable,
}

impl<'g> Walk<'g> {
    pub fn new(graph: &'g Graph, walker_id: usize, start: NodeId, budget: usize) -> Result<Self> {
        if !graph.contains(start) {
            return Err(Error::UnknownNode(start));
        }
        if graph.degree(start) == 0 {
            return Err(Error::IsolatedStart(start));
        }
        if budget == 0 {
            return Err(Error::invalid("walk budget must be at least 1"));
        }
        let crumbs = BreadcrumbTable::new(graph.node_count(), start);
        let mut steps = Vec::with_capacity(budget);
        steps.push(start);
        let trace = WalkTrace {
            walker_id,
            budget,
            steps,
            visited: crumbs.visited.clone(),
            unique_nodes: 1,
            covered_edges: graph.degree(start),
        };
        Ok(Walk { graph, trace, crumbs })
    }

    pub fn current(&self) -> NodeId {
        *self.trace.steps.last().expect("walks always hold their start")
    }

    pub fn is_finished(&self) -> bool {
        self.trace.steps.len() >= self.trace.budget
    }

    pub fn trace(&self) -> &WalkTrace {
        &self.trace
    }

    pub fn breadcrumbs(&self) -> &BreadcrumbTable {
        &self.crumbs
    }

    /// Moves to a uniformly chosen neighbor; `None` once the budget is spent.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<Step> {
        if self.is_finished() {
            return None;
        }
        let from = self.current();
        let neighbors = self.graph.neighbors(from);
        let next = neighbors[rng.random_range(0..neighbors.len())];
        let first_visit = !self.trace.visited.contains(next.index());
        if first_visit {
            let already = self
                .graph
                .neighbors(next)
                .iter()
                .filter(|w| self.trace.visited.contains(w.index()))
                .count();
            self.trace.covered_edges += self.graph.degree(next) - already;
            self.trace.unique_nodes += 1;
            self.trace.visited.insert(next.index());
            self.crumbs.visited.insert(next.index());
            self.crumbs.predecessor[next.index()] = Some(from);
        }
        self.trace.steps.push(next);
        Some(Step { node: next, first_visit })
    }

    pub fn finish<R: Rng + ?Sized>(mut self, rng: &mut R) -> (WalkTrace, BreadcrumbTable) {
        while self.step(rng).is_some() {}
        (self.trace, self.crumbs)
    }

    pub fn into_parts(self) -> (WalkTrace, BreadcrumbTable) {
        (self.trace, self.crumbs)
    }
}

/// Runs one walk of `budget` nodes from `start` on the stream `(seed, 0)`.
pub fn run_walk(g: &Graph, start: NodeId, budget: usize, seed: u64) -> Result<(WalkTrace, BreadcrumbTable)> {
    let walk = Walk::new(g, 0, start, budget)?;
    Ok(walk.finish(&mut walker_rng(seed, 0)))
}

/// Loop-free path from `from` back to the walk's start, following
/// first-visit predecessors.
pub fn retrace_to_start(bc: &BreadcrumbTable, from: NodeId) -> Result<Vec<NodeId>> {
    if !bc.is_visited(from) {
        return Err(Error::NotVisited(from));
    }
    let mut path = vec![from];
    let mut at = from;
    while let Some(p) = bc.predecessor(at) {
        path.push(p);
        at = p;
    }
    Ok(path)
}

/// Route from `u_i` to `u_j` by retracing breadcrumbs through the first node
/// of walker i's sequence that walker j also visited. `None` when the two
/// visited sets are disjoint.
pub fn naive_route(
    trace_i: &WalkTrace,
    bc_i: &BreadcrumbTable,
    trace_j: &WalkTrace,
    bc_j: &BreadcrumbTable,
) -> Option<Vec<NodeId>> {
    let meet = trace_i.steps().iter().copied().find(|&v| trace_j.is_visited(v))?;
    let mut route = retrace_to_start(bc_i, meet).expect("meeting node is on i's walk");
    route.reverse();
    let back = retrace_to_start(bc_j, meet).expect("meeting node is on j's walk");
    route.extend_from_slice(&back[1..]);
    Some(route)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossingTime {
    /// 1-based index into walker j's node sequence.
    At(usize),
    Never,
}

/// First step at which walker j stands on a node in `visited_i`.
pub fn crossing_time(trace_j: &WalkTrace, visited_i: &FixedBitSet) -> CrossingTime {
    trace_j
        .steps()
        .iter()
        .position(|v| visited_i.contains(v.index()))
        .map_or(CrossingTime::Never, |t| CrossingTime::At(t + 1))
}
