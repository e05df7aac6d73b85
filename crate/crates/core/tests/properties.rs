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


use std::collections::HashSet;

use proptest::prelude::*;
use rwsp_core::eval::StretchMatrix;
use rwsp_core::{
    bfs_distances, read_edge_list, retrace_to_start, run_rwsp, run_walk, write_edge_list, Distance, Graph, NodeId,
};

fn edge_lists() -> impl Strategy<Value = Vec<(u64, u64)>> {
    prop::collection::vec((0u64..40, 0u64..40), 1..120)
}

fn graph_from(edges: &[(u64, u64)]) -> Option<Graph> {
    let text: String = edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect();
    read_edge_list(text.as_bytes()).ok().filter(|g| g.edge_count() > 0)
}

fn first_non_isolated(g: &Graph) -> NodeId {
    g.nodes().find(|&v| g.degree(v) > 0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parsed_graphs_are_simple_and_symmetric(edges in edge_lists()) {
        if let Some(g) = graph_from(&edges) {
            prop_assert!(g.validate().is_ok());
            let distinct: HashSet<(u64, u64)> = edges
                .iter()
                .filter(|(u, v)| u != v)
                .map(|&(u, v)| (u.min(v), u.max(v)))
                .collect();
            prop_assert_eq!(g.edge_count(), distinct.len());
            let mut buf = Vec::new();
            write_edge_list(&g, &mut buf).unwrap();
            let again = read_edge_list(buf.as_slice()).unwrap();
            prop_assert_eq!(again.edge_count(), g.edge_count());
        }
    }

    #[test]
    fn walk_bookkeeping(edges in edge_lists(), budget in 1usize..60, seed in any::<u64>()) {
        if let Some(g) = graph_from(&edges) {
            let start = first_non_isolated(&g);
            let (trace, bc) = run_walk(&g, start, budget, seed).unwrap();
            prop_assert_eq!(trace.steps().len(), budget);
            prop_assert!(trace.unique_nodes() <= budget);
            prop_assert!(trace.steps().windows(2).all(|w| g.has_edge(w[0], w[1])));
            let visited: HashSet<NodeId> = trace.steps().iter().copied().collect();
            prop_assert_eq!(visited.len(), trace.unique_nodes());
            let brute = g.edges().filter(|(u, v)| visited.contains(u) || visited.contains(v)).count();
            prop_assert_eq!(trace.covered_edge_count(), brute);
            let dist = bfs_distances(&g, start);
            for &v in &visited {
                let back = retrace_to_start(&bc, v).unwrap();
                prop_assert_eq!(back.last().copied(), Some(start));
                prop_assert!(Distance::Hops(back.len() as u32 - 1) >= dist[v.index()]);
                let distinct: HashSet<_> = back.iter().collect();
                prop_assert_eq!(distinct.len(), back.len());
            }
        }
    }

    #[test]
    fn peer_knowledge_is_symmetric(n in 6usize..60, budget in 2usize..40, seed in any::<u64>()) {
        let g = rwsp_core::synth::preferential_attachment(n, 2, seed).unwrap();
        let starts = [NodeId(0), NodeId(1), NodeId((n - 1) as u32)];
        let out = run_rwsp(&g, &starts, budget, seed).unwrap();
        for i in 0..3 {
            prop_assert!(!out.walker(i).known_peers.contains(&i));
            for j in 0..3 {
                if i != j {
                    prop_assert_eq!(out.knows(i, j), out.knows(j, i));
                }
            }
        }
    }

    #[test]
    fn stretch_merge_is_commutative(
        a in prop::collection::vec((1u32..6, 0u32..4), 0..40),
        b in prop::collection::vec((1u32..6, 0u32..4), 0..40),
    ) {
        let fill = |cells: &[(u32, u32)]| {
            let mut m = StretchMatrix::new();
            for &(t, extra) in cells {
                let found = if extra == 3 { Distance::Unreachable } else { Distance::Hops(t + extra) };
                m.record(Distance::Hops(t), found).unwrap();
            }
            m
        };
        let (mut ab, mut ba) = (fill(&a), fill(&b));
        ab.merge(&fill(&b));
        ba.merge(&fill(&a));
        prop_assert_eq!(&ab, &ba);
        for t in ab.bins() {
            let row: f64 = ab.row_fractions(t).iter().sum();
            prop_assert!(row == 0.0 || (row - 1.0).abs() < 1e-12);
        }
    }
}
