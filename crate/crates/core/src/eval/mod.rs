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

//! Experiment harness: stretch matrices, coverage validation, crossing
//! rates, configuration and report emission.

mod config;
mod experiment;
mod report;
mod stretch;

pub use config::{run_eval, version_string, EvalConfig, EvalResults, GraphSource, RunMetadata};
pub use experiment::{
    coverage_validation, crossing_rate, run_experiment, sample_starts, CoverageValidationRow, CrossingReport, CrossingSettings,
    ExperimentConfig, ExperimentResult, MessagingTotals, StartPolicy,
};
pub use report::{emit_reports, read_stretch_csv, write_stretch_csv, ReportFormat};
pub use stretch::{RowSummary, StretchMatrix, StretchSummary};
