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

//! Multi-random-walk topology discovery on large graphs.
//!
//! A handful of nodes each launch a budgeted random walker. Walkers that
//! cross pool what they saw (every visited node plus its full neighbor
//! list), and routes are computed on the pooled subgraph. The crate provides
//! the graph substrate and generators, the walker engine, the RWSP protocol,
//! closed-form coverage predictions, and a seeded experiment harness that
//! scores discovered routes against true shortest paths.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod eval;
pub mod graph;
pub mod meanfield;
pub mod rwsp;
pub mod seed;
pub mod synth;
pub mod walker;

pub use error::{Error, Result};
pub use fixedbitset::FixedBitSet;
pub use graph::{
    bfs_distances, degree_moments, giant_component, load_edge_list, path_stretch, read_edge_list, write_edge_list,
    DegreeMoments, Distance, Graph, GraphStats, NodeId, Stretch,
};
pub use rwsp::{naive_vs_rwsp, routing_tree, run_rwsp, rwsp_path_length, RwspOutcome, UnionSubgraph};
pub use synth::{DegreeSequence, PowerLawParams, SynthSpec};
pub use walker::{crossing_time, naive_route, retrace_to_start, run_walk, BreadcrumbTable, CrossingTime, WalkTrace};
