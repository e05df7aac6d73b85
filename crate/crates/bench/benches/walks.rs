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


use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rwsp_bench::pa_graph;
use rwsp_core::eval::{run_experiment, ExperimentConfig};
use rwsp_core::synth::{configuration_model, power_law_degrees, PowerLawParams};
use rwsp_core::{bfs_distances, run_rwsp, run_walk, NodeId};

fn bfs(c: &mut Criterion) {
    let mut group = c.benchmark_group("bfs");
    for n in [10_000, 100_000] {
        let g = pa_graph(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| b.iter(|| bfs_distances(g, NodeId(0))));
    }
    group.finish();
}

fn walks(c: &mut Criterion) {
    let g = pa_graph(100_000);
    c.bench_function("walk/budget_2500", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            run_walk(&g, NodeId(7), 2500, seed).unwrap()
        })
    });
    let starts = [NodeId(1), NodeId(500), NodeId(5_000), NodeId(50_000)];
    c.bench_function("rwsp/h4_budget_2500", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            run_rwsp(&g, &starts, 2500, seed).unwrap().walker_count()
        })
    });
}

fn generators(c: &mut Criterion) {
    let params = PowerLawParams::new(2.5, 2, 100_000).unwrap();
    let degrees = power_law_degrees(&params, 1).unwrap();
    c.bench_function("configuration_model/100k", |b| b.iter(|| configuration_model(&degrees, 2)));
    c.bench_function("preferential_attachment/100k", |b| b.iter(|| pa_graph(100_000)));
}

fn sweep(c: &mut Criterion) {
    let g = pa_graph(5_000);
    let mut group = c.benchmark_group("experiment");
    group.sample_size(10);
    group.bench_function("pa5000_h4_runs20", |b| {
        b.iter(|| run_experiment(&g, &ExperimentConfig::new(4, 0.025, 20, 3)).unwrap().matrix.total())
    });
    group.finish();
}

criterion_group!(benches, bfs, walks, generators, sweep);
criterion_main!(benches);
