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

//! Random Walk Short Path (RWSP): `h` walkers crawl in lockstep, detect
//! each other's breadcrumbs, exchange discovered subgraphs through the
//! crossing points, and route on the union of what their group saw.
//!
//! Protocol, per walker `i` with start `u_i` and budget `B`:
//!
//! 1. Walk `B` nodes. At each step, if the current node was already visited
//!    by a set `W` of other walkers, add `W` to the known peers `W(i)` and the
//!    node to the contact points `C(i)`. Each walker in `W` is told through an
//!    advertisement that retraces its breadcrumbs, and records the same.
//! 2. When budgets run out, each walker ships its discovered subgraph `G'(i)`
//!    (visited nodes plus all their incident edges) to every known peer
//!    through a shared contact point.
//! 3. Peers forward what they received until every meeting-connected group
//!    knows the same set of walkers.
//! 4. `G*(i)` is the union of the group's subgraphs; routes follow the
//!    breadth-first tree of `G*(i)` rooted at `u_i`.
//!
//! Walkers advance in rounds: all take step `t` before any takes `t + 1`,
//! and within a round lower walker ids register first. Two walkers reaching
//! a fresh node in the same round therefore resolve as "higher id finds
//! lower id".

use std::collections::{BTreeSet, VecDeque};
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Distance, Graph, NodeId};
use crate::seed::walker_rng;
use crate::walker::{naive_route, BreadcrumbTable, Walk, WalkTrace};

/// Walker `finder` stood on `at` at step `t` and found breadcrumbs of `found`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeetingEvent {
    pub t: usize,
    pub finder: usize,
    pub found: Vec<usize>,
    pub at: NodeId,
}

/// Hop accounting for one walker: advertisements it sent, and hops spent
/// delivering other walkers' subgraphs to it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MessagingCost {
    pub advertise_hops: u64,
    pub transfer_hops: u64,
}

#[derive(Clone, Debug)]
pub struct WalkerState {
    pub walker_id: usize,
    pub known_peers: BTreeSet<usize>,
    pub contact_points: BTreeSet<NodeId>,
    /// Events where this walker was the finder.
    pub meetings: Vec<MeetingEvent>,
    pub cost: MessagingCost,
    direct_peers: BTreeSet<usize>,
    trace: WalkTrace,
    breadcrumbs: BreadcrumbTable,
}

impl WalkerState {
    pub fn start(&self) -> NodeId {
        self.trace.start()
    }

    /// Peers met in person, as opposed to learned through forwarding.
    pub fn direct_peers(&self) -> &BTreeSet<usize> {
        &self.direct_peers
    }

    /// The walk behind `G'(B, i)`.
    pub fn trace(&self) -> &WalkTrace {
        &self.trace
    }

    pub fn breadcrumbs(&self) -> &BreadcrumbTable {
        &self.breadcrumbs
    }
}

/// `G*`: every edge of the host graph with an endpoint visited by one of the
/// member walkers, together with those endpoints.
#[derive(Clone, Debug)]
pub struct UnionSubgraph<'g> {
    graph: &'g Graph,
    members: Vec<usize>,
    core: FixedBitSet,
}

impl<'g> UnionSubgraph<'g> {
    pub fn from_traces<'a>(graph: &'g Graph, members: Vec<usize>, traces: impl IntoIterator<Item = &'a WalkTrace>) -> Self {
        let mut core = FixedBitSet::with_capacity(graph.node_count());
        for t in traces {
            core.union_with(t.visited_set());
        }
        UnionSubgraph { graph, members, core }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn host(&self) -> &'g Graph {
        self.graph
    }

    /// Nodes visited by some member.
    pub fn is_visited(&self, v: NodeId) -> bool {
        self.core.contains(v.index())
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        self.graph.contains(v)
            && (self.is_visited(v) || self.graph.neighbors(v).iter().any(|w| self.is_visited(*w)))
    }

    pub fn contains_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.graph.has_edge(u, v) && (self.is_visited(u) || self.is_visited(v))
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let all = self.is_visited(v);
        self.graph.neighbors(v).iter().copied().filter(move |w| all || self.is_visited(*w))
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edges().filter(|&(u, v)| self.is_visited(u) || self.is_visited(v)).count()
    }

    /// Materializes `G*` as a standalone graph (labels carried over) plus
    /// the host-to-subgraph id map.
    pub fn to_graph(&self) -> (Graph, Vec<Option<NodeId>>) {
        let nodes: Vec<NodeId> = self.graph.nodes().filter(|&v| self.contains_node(v)).collect();
        let mut mapping = vec![None; self.graph.node_count()];
        for (new, &old) in nodes.iter().enumerate() {
            mapping[old.index()] = Some(NodeId::from(new));
        }
        let labels = nodes.iter().map(|&v| self.graph.label(v)).collect();
        let edges = self
            .graph
            .edges()
            .filter(|&(u, v)| self.is_visited(u) || self.is_visited(v))
            .map(|(u, v)| (mapping[u.index()].unwrap().index(), mapping[v.index()].unwrap().index()));
        (Graph::with_labels(labels, edges).expect("subgraph ids in range"), mapping)
    }
}

/// Breadth-first shortest-path tree over a [`UnionSubgraph`], in host ids.
#[derive(Clone, Debug)]
pub struct RoutingTree {
    root: NodeId,
    parent: Vec<Option<NodeId>>,
    depth: Vec<Distance>,
}

impl RoutingTree {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v.index()]
    }

    pub fn depth(&self, v: NodeId) -> Distance {
        self.depth[v.index()]
    }

    /// Tree path from the root to `v`.
    pub fn path_to(&self, v: NodeId) -> Option<Vec<NodeId>> {
        if !self.depth(v).is_reachable() {
            return None;
        }
        let mut path = vec![v];
        let mut at = v;
        while let Some(p) = self.parent(at) {
            path.push(p);
            at = p;
        }
        path.reverse();
        Some(path)
    }
}

pub fn routing_tree(u: &UnionSubgraph<'_>, root: NodeId) -> Result<RoutingTree> {
    if !u.contains_node(root) {
        return Err(Error::UnknownNode(root));
    }
    let n = u.host().node_count();
    let mut parent = vec![None; n];
    let mut depth = vec![Distance::Unreachable; n];
    depth[root.index()] = Distance::Hops(0);
    let mut queue = VecDeque::from([(root, 0u32)]);
    while let Some((x, d)) = queue.pop_front() {
        for y in u.neighbors(x) {
            if depth[y.index()] == Distance::Unreachable {
                depth[y.index()] = Distance::Hops(d + 1);
                parent[y.index()] = Some(x);
                queue.push_back((y, d + 1));
            }
        }
    }
    Ok(RoutingTree { root, parent, depth })
}

/// Everything one RWSP execution produced.
#[derive(Debug)]
pub struct RwspOutcome<'g> {
    graph: &'g Graph,
    budget: usize,
    walkers: Vec<WalkerState>,
    group_of: Vec<usize>,
    unions: Vec<UnionSubgraph<'g>>,
    advertise: Vec<Vec<u64>>,
    transfer: Vec<Vec<u64>>,
    trees: Vec<OnceLock<RoutingTree>>,
}

impl<'g> RwspOutcome<'g> {
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn walker_count(&self) -> usize {
        self.walkers.len()
    }

    pub fn walker(&self, i: usize) -> &WalkerState {
        &self.walkers[i]
    }

    pub fn walkers(&self) -> &[WalkerState] {
        &self.walkers
    }

    /// `G*(i)`. Walkers of one meeting-connected group share the same union.
    pub fn union_for(&self, i: usize) -> &UnionSubgraph<'g> {
        &self.unions[self.group_of[i]]
    }

    pub fn routing_tree_for(&self, i: usize) -> &RoutingTree {
        self.trees[i].get_or_init(|| {
            routing_tree(self.union_for(i), self.walkers[i].start()).expect("start lies in its own union")
        })
    }

    /// Hops of advertisements walker `i` sent to walker `j`.
    pub fn advertise_hops(&self, i: usize, j: usize) -> u64 {
        self.advertise[i][j]
    }

    /// Hops spent delivering `G'(j)` to walker `i`, including forwarding.
    pub fn transfer_hops(&self, i: usize, j: usize) -> u64 {
        self.transfer[i][j]
    }

    pub fn knows(&self, i: usize, j: usize) -> bool {
        self.walkers[i].known_peers.contains(&j)
    }

    /// Route from `u_i` to `u_j` along `T(i)`.
    pub fn route(&self, i: usize, j: usize) -> Option<Vec<NodeId>> {
        if !self.knows(i, j) {
            return None;
        }
        self.routing_tree_for(i).path_to(self.walkers[j].start())
    }

    /// Breadcrumb-retracing route from `u_i` to `u_j`, if their walks crossed.
    pub fn naive_route(&self, i: usize, j: usize) -> Option<Vec<NodeId>> {
        let (a, b) = (&self.walkers[i], &self.walkers[j]);
        naive_route(&a.trace, &a.breadcrumbs, &b.trace, &b.breadcrumbs)
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        let h = self.walkers.len();
        if i >= h || j >= h || i == j {
            return Err(Error::invalid(format!("walker pair ({i}, {j}) is not a distinct pair below {h}")));
        }
        Ok(())
    }
}

pub fn run_rwsp<'g>(g: &'g Graph, starts: &[NodeId], budget: usize, seed: u64) -> Result<RwspOutcome<'g>> {
    let h = starts.len();
    if h < 2 {
        return Err(Error::invalid(format!("RWSP needs at least two walkers, got {h}")));
    }
    let distinct: BTreeSet<_> = starts.iter().collect();
    if distinct.len() != h {
        return Err(Error::invalid("RWSP start nodes must be distinct"));
    }
    let mut walks = starts
        .iter()
        .enumerate()
        .map(|(i, &s)| Walk::new(g, i, s, budget))
        .collect::<Result<Vec<_>>>()?;
    let mut rngs: Vec<_> = (0..h).map(|i| walker_rng(seed, i)).collect();

    let mut visitors: Vec<Vec<usize>> = vec![Vec::new(); g.node_count()];
    let mut known: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); h];
    let mut contacts: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); h];
    let mut meetings: Vec<Vec<MeetingEvent>> = vec![Vec::new(); h];
    let mut advertise = vec![vec![0u64; h]; h];

    for t in 1..=budget {
        for i in 0..h {
            let (at, first_visit) = if t == 1 {
                (starts[i], true)
            } else {
                let step = walks[i].step(&mut rngs[i]).expect("budget not yet spent");
                (step.node, step.first_visit)
            };
            let found: Vec<usize> = visitors[at.index()].iter().copied().filter(|&j| j != i).collect();
            if !found.is_empty() {
                known[i].extend(found.iter().copied());
                contacts[i].insert(at);
                for &j in &found {
                    known[j].insert(i);
                    contacts[j].insert(at);
                    let hops = walks[j].breadcrumbs().depth(at).expect("found walker visited this node");
                    advertise[i][j] += hops as u64;
                }
                meetings[i].push(MeetingEvent { t, finder: i, found, at });
            }
            if first_visit {
                visitors[at.index()].push(i);
            }
        }
    }

    let (traces, crumbs): (Vec<_>, Vec<_>) = walks.into_iter().map(Walk::into_parts).unzip();
    let direct = known.clone();

    // Direct delivery of G'(j) to u_i: out along j's breadcrumbs to the
    // cheapest shared contact point, then back along i's.
    let mut transfer = vec![vec![0u64; h]; h];
    for i in 0..h {
        for &j in &direct[i] {
            transfer[i][j] = contacts[j]
                .iter()
                .filter_map(|&v| Some(crumbs[j].depth(v)? + crumbs[i].depth(v)?))
                .min()
                .expect("direct peers share a contact point") as u64;
        }
    }

    // Forwarding to fixpoint: every walker learns its whole meeting-connected
    // group. Forwarded subgraphs pay the direct-delivery cost of each relay
    // hop along a shortest chain of meetings.
    let mut group_of = vec![usize::MAX; h];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for s in 0..h {
        if group_of[s] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let mut members = vec![s];
        group_of[s] = id;
        let mut k = 0;
        while k < members.len() {
            for &j in &direct[members[k]] {
                if group_of[j] == usize::MAX {
                    group_of[j] = id;
                    members.push(j);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        groups.push(members);
    }
    for i in 0..h {
        let mut cost = vec![None; h];
        cost[i] = Some(0u64);
        let mut queue = VecDeque::from([i]);
        while let Some(x) = queue.pop_front() {
            for &y in &direct[x] {
                if cost[y].is_none() {
                    cost[y] = Some(cost[x].unwrap() + transfer[x][y]);
                    queue.push_back(y);
                }
            }
        }
        for &j in &groups[group_of[i]] {
            if j != i && !direct[i].contains(&j) {
                transfer[i][j] = cost[j].expect("same group is reachable");
                known[i].insert(j);
            }
        }
    }

    let unions = groups
        .iter()
        .map(|members| UnionSubgraph::from_traces(g, members.clone(), members.iter().map(|&r| &traces[r])))
        .collect();

    let walkers = traces
        .into_iter()
        .zip(crumbs)
        .enumerate()
        .map(|(i, (trace, breadcrumbs))| WalkerState {
            walker_id: i,
            cost: MessagingCost {
                advertise_hops: advertise[i].iter().sum(),
                transfer_hops: transfer[i].iter().sum(),
            },
            known_peers: std::mem::take(&mut known[i]),
            contact_points: std::mem::take(&mut contacts[i]),
            meetings: std::mem::take(&mut meetings[i]),
            direct_peers: direct[i].clone(),
            trace,
            breadcrumbs,
        })
        .collect();

    Ok(RwspOutcome {
        graph: g,
        budget,
        walkers,
        group_of,
        unions,
        advertise,
        transfer,
        trees: (0..h).map(|_| OnceLock::new()).collect(),
    })
}

/// Depth of `u_j` in `T(i)`; unreachable when `j` is not a known peer of `i`.
pub fn rwsp_path_length(outcome: &RwspOutcome<'_>, i: usize, j: usize) -> Result<Distance> {
    outcome.check_pair(i, j)?;
    if !outcome.knows(i, j) {
        return Ok(Distance::Unreachable);
    }
    Ok(outcome.routing_tree_for(i).depth(outcome.walker(j).start()))
}

/// Naive breadcrumb route length next to the RWSP length for a pair whose
/// walks crossed.
pub fn naive_vs_rwsp(outcome: &RwspOutcome<'_>, i: usize, j: usize) -> Result<(usize, Distance)> {
    outcome.check_pair(i, j)?;
    let naive = outcome.naive_route(i, j).ok_or(Error::NoMeeting(i, j))?;
    Ok((naive.len() - 1, rwsp_path_length(outcome, i, j)?))
}
