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

//! Report files for an evaluation: plot-ready CSV tables (or one JSON
//! document) plus run metadata.
//!
//! Every file is a pure function of configuration and seed. Wall-clock time
//! is the caller's to record elsewhere.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::json;

use super::config::EvalResults;
use super::stretch::StretchMatrix;
use crate::error::{Error, Result};
use crate::graph::Distance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::invalid(format!("unknown report format `{other}`"))),
        }
    }
}

/// Row-normalized matrix: header `d_true,1,..,D,INF`, one row per true
/// distance including INF. Empty rows are written as zeros.
pub fn write_stretch_csv<W: Write>(matrix: &StretchMatrix, out: W) -> Result<()> {
    let bins = matrix.bins();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(std::iter::once("d_true".to_string()).chain(bins.iter().map(Distance::to_string)))?;
    for &truth in &bins {
        let row = matrix.row_fractions(truth);
        w.write_record(std::iter::once(truth.to_string()).chain(row.iter().map(f64::to_string)))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a matrix written by [`write_stretch_csv`] back as labelled rows.
pub fn read_stretch_csv<R: Read>(input: R) -> Result<Vec<(String, Vec<f64>)>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let label = record.get(0).unwrap_or_default().to_string();
        let values = record
            .iter()
            .skip(1)
            .map(|v| v.parse::<f64>().map_err(|_| Error::invalid(format!("bad matrix entry `{v}`"))))
            .collect::<Result<_>>()?;
        rows.push((label, values));
    }
    Ok(rows)
}

fn write_histogram_csv<W: Write>(matrix: &StretchMatrix, out: W) -> Result<()> {
    let total = matrix.total() as f64;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["d_true", "count", "fraction"])?;
    for (d, count) in matrix.true_distance_histogram() {
        w.write_record([d.to_string(), count.to_string(), (count as f64 / total).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn write_coverage_csv<W: Write>(results: &EvalResults, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in &results.coverage {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct MatrixJson {
    bins: Vec<Distance>,
    counts: Vec<Vec<u64>>,
    fractions: Vec<Vec<f64>>,
}

fn matrix_json(matrix: &StretchMatrix) -> MatrixJson {
    let bins = matrix.bins();
    MatrixJson {
        counts: bins.iter().map(|&t| bins.iter().map(|&f| matrix.count(t, f)).collect()).collect(),
        fractions: bins.iter().map(|&t| matrix.row_fractions(t)).collect(),
        bins,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn summary_json(results: &EvalResults) -> serde_json::Value {
    json!({
        "budget": results.experiment.budget,
        "runs": results.experiment.runs,
        "rwsp": results.experiment.matrix.summary(),
        "naive": results.experiment.naive_matrix.summary(),
        "messaging": results.experiment.messaging,
        "crossing": results.crossing,
    })
}

/// Writes the report set into `dir` (created if missing) and returns the
/// paths written.
pub fn emit_reports(results: &EvalResults, format: ReportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    if results.experiment.matrix.is_empty() {
        return Err(Error::EmptyReport);
    }
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut create = |name: &str| -> Result<(PathBuf, BufWriter<File>)> {
        let path = dir.join(name);
        let file = BufWriter::new(File::create(&path)?);
        written.push(path.clone());
        Ok((path, file))
    };

    match format {
        ReportFormat::Csv => {
            write_stretch_csv(&results.experiment.matrix, create("stretch_matrix.csv")?.1)?;
            write_stretch_csv(&results.experiment.naive_matrix, create("naive_matrix.csv")?.1)?;
            write_histogram_csv(&results.experiment.matrix, create("true_distance_histogram.csv")?.1)?;
            write_coverage_csv(results, create("coverage.csv")?.1)?;
            let (path, _) = create("summary.json")?;
            write_json(&path, &summary_json(results))?;
        }
        ReportFormat::Json => {
            let (path, _) = create("report.json")?;
            let hist: Vec<_> = results
                .experiment
                .matrix
                .true_distance_histogram()
                .into_iter()
                .map(|(d, c)| json!({ "d_true": d.to_string(), "count": c }))
                .collect();
            write_json(
                &path,
                &json!({
                    "summary": summary_json(results),
                    "stretch_matrix": matrix_json(&results.experiment.matrix),
                    "naive_matrix": matrix_json(&results.experiment.naive_matrix),
                    "true_distance_histogram": hist,
                    "coverage": results.coverage,
                }),
            )?;
        }
    }
    let (path, _) = create("metadata.json")?;
    write_json(&path, &results.metadata)?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{run_eval, EvalConfig, GraphSource};

    fn k5_results() -> EvalResults {
        let mut cfg = EvalConfig::new(GraphSource::synth("complete:n=5").unwrap());
        cfg.h = 2;
        cfg.beta = 0.99;
        cfg.runs = 10;
        cfg.coverage_runs = 3;
        run_eval(&cfg, 1).unwrap()
    }

    #[test]
    fn k5_matrix_csv() {
        let results = k5_results();
        let mut buf = Vec::new();
        write_stretch_csv(&results.experiment.matrix, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("d_true,1,INF\n1,"));
        assert!(text.ends_with("\nINF,0,0\n"));
        let rows = read_stretch_csv(text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 2);
        assert!((rows[0].1.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn empty_matrix_is_refused() {
        let mut results = k5_results();
        results.experiment.matrix = StretchMatrix::new();
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(emit_reports(&results, ReportFormat::Csv, dir.path()), Err(Error::EmptyReport)));
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn both_formats_write_metadata() {
        let results = k5_results();
        for format in [ReportFormat::Csv, ReportFormat::Json] {
            let dir = tempfile::tempdir().unwrap();
            let files = emit_reports(&results, format, dir.path()).unwrap();
            assert!(files.iter().any(|p| p.ends_with("metadata.json")));
            let meta: serde_json::Value =
                serde_json::from_reader(File::open(dir.path().join("metadata.json")).unwrap()).unwrap();
            assert_eq!(meta["seed"], 1);
            assert_eq!(meta["config"]["graph"], "synth:complete:n=5");
            assert!(meta["version"].as_str().unwrap().starts_with('v'));
        }
    }

    #[test]
    fn unwritable_destination() {
        let results = k5_results();
        let file = tempfile::NamedTempFile::new().unwrap();
        assert!(emit_reports(&results, ReportFormat::Csv, &file.path().join("sub")).is_err());
    }

    #[test]
    fn format_parsing() {
        assert_eq!("CSV".parse::<ReportFormat>().unwrap(), ReportFormat::Csv);
        assert!("xml".parse::<ReportFormat>().is_err());
    }
}
