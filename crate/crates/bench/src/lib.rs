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

//! Shared fixtures for the benchmarks.

use rwsp_core::synth::SynthSpec;
use rwsp_core::Graph;

/// Preferential-attachment graph used across the benchmark groups.
pub fn pa_graph(n: usize) -> Graph {
    SynthSpec::PreferentialAttachment { n, m0: 3 }.generate(7).expect("valid generator")
}
