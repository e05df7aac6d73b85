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

//! `rwsp` command-line tool.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use rwsp_core::eval::{emit_reports, run_eval, sample_starts, EvalConfig, ReportFormat};
use rwsp_core::meanfield::coverage_curve;
use rwsp_core::walker::budget_from_fraction;
use rwsp_core::{
    bfs_distances, degree_moments, load_edge_list, run_rwsp, run_walk, rwsp_path_length, write_edge_list,
    DegreeMoments, Graph, GraphStats, NodeId, SynthSpec,
};

#[derive(Debug, Parser)]
#[command(name = "rwsp", version, about = "Random-walk topology discovery simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print node/edge counts, degree moments and giant-component share.
    Stats { graph: PathBuf },
    /// Generate a synthetic graph, e.g. `pa:n=5000,m0=3` or `cm:n=10000,alpha=2.5,kmin=2`.
    Synth {
        spec: String,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run one budgeted walker and summarize its trace.
    Walk {
        graph: PathBuf,
        /// Start node label as it appears in the edge list.
        #[arg(long)]
        start: u64,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Mean-field coverage predictions over a tau grid, as CSV.
    Predict(PredictArgs),
    /// Simulate one RWSP run and report every ordered walker pair.
    Rwsp(RwspArgs),
    /// Run a full seeded evaluation and write report files.
    Eval {
        /// Flat key = value config file.
        config: Option<PathBuf>,
        /// Extra `key=value` settings applied after the file.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
}

#[derive(Debug, Args)]
struct PredictArgs {
    graph: Option<PathBuf>,
    #[arg(long, requires_all = ["second_moment", "nodes"], conflicts_with = "graph")]
    mean_degree: Option<f64>,
    #[arg(long)]
    second_moment: Option<f64>,
    #[arg(long)]
    nodes: Option<usize>,
    /// Comma-separated tau values.
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.02,0.05,0.1,0.2,0.5,1")]
    taus: Vec<f64>,
}

#[derive(Debug, Args)]
struct RwspArgs {
    graph: PathBuf,
    /// Comma-separated start labels.
    #[arg(long, value_delimiter = ',', conflicts_with = "random_starts")]
    starts: Vec<u64>,
    /// Draw `--h` distinct starts from the giant component.
    #[arg(long)]
    random_starts: bool,
    #[arg(long, default_value_t = 4)]
    h: usize,
    #[arg(long, default_value_t = 0.025)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn print_json(out: &mut dyn Write, value: &serde_json::Value) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn node_for(g: &Graph, label: u64) -> anyhow::Result<NodeId> {
    g.node_by_label(label).with_context(|| format!("node {label} is not in the graph"))
}

fn predict(args: PredictArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let (moments, n) = match (&args.graph, args.mean_degree, args.second_moment, args.nodes) {
        (Some(path), ..) => {
            let g = load_edge_list(path)?;
            (degree_moments(&g)?, g.node_count())
        }
        (None, Some(k), Some(k2), Some(n)) => (DegreeMoments::from_moments(k, k2)?, n),
        _ => bail!("give a graph file or --mean-degree, --second-moment and --nodes"),
    };
    let m = (n as f64 * moments.mean_degree / 2.0).round() as usize;
    writeln!(out, "tau,n_e_pred,n_nodes_pred,gamma_bar,warning_flag")?;
    for p in coverage_curve(&moments, m, &args.taus)? {
        writeln!(
            out,
            "{},{},{},{},{}",
            p.tau, p.expected_edges, p.expected_nodes, p.gamma_bar, p.outside_validity
        )?;
    }
    Ok(())
}

fn rwsp(args: RwspArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let g = load_edge_list(&args.graph)?;
    let starts = if args.random_starts {
        sample_starts(&g, args.h, args.seed)?
    } else if args.starts.is_empty() {
        bail!("give --starts or --random-starts");
    } else {
        args.starts.iter().map(|&l| node_for(&g, l)).collect::<anyhow::Result<_>>()?
    };
    if !(args.beta > 0.0 && args.beta < 1.0) {
        bail!("--beta must lie in (0, 1)");
    }
    let budget = budget_from_fraction(args.beta, g.node_count()).max(1);
    let outcome = run_rwsp(&g, &starts, budget, args.seed)?;
    let mut pairs = Vec::new();
    for (i, &si) in starts.iter().enumerate() {
        let truth = bfs_distances(&g, si);
        for (j, &sj) in starts.iter().enumerate() {
            if i == j {
                continue;
            }
            let naive = outcome.naive_route(i, j).map(|p| p.len() - 1);
            pairs.push(json!({
                "i": i,
                "j": j,
                "source": g.label(si),
                "target": g.label(sj),
                "true_spl": truth[sj.index()],
                "rwsp_spl": rwsp_path_length(&outcome, i, j)?,
                "naive_spl": naive,
                "met": outcome.knows(i, j),
                "advertise_hops": outcome.advertise_hops(i, j),
                "transfer_hops": outcome.transfer_hops(i, j),
            }));
        }
    }
    let labels: Vec<u64> = starts.iter().map(|&s| g.label(s)).collect();
    print_json(out, &json!({ "budget": budget, "seed": args.seed, "starts": labels, "pairs": pairs }))
}

fn eval(
    config: Option<PathBuf>,
    set: Vec<String>,
    seed: u64,
    output: PathBuf,
    format: String,
    out: &mut dyn Write,
) -> anyhow::Result<()> {
    let clock = Instant::now();
    let format: ReportFormat = format.parse()?;
    let mut text = match &config {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        None => String::new(),
    };
    for kv in &set {
        if !kv.contains('=') {
            bail!("--set expects key=value, got `{kv}`");
        }
        text.push('\n');
        text.push_str(kv);
    }
    let cfg = EvalConfig::parse(&text)?;
    let results = run_eval(&cfg, seed)?;
    let written = emit_reports(&results, format, &output)?;
    let timing = output.join("timing.json");
    fs::write(&timing, format!("{{\"wall_seconds\": {}}}\n", clock.elapsed().as_secs_f64()))?;
    for path in written.iter().chain([&timing]) {
        writeln!(out, "{}", path.display())?;
    }
    Ok(())
}

fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    match cli.command {
        Command::Stats { graph } => {
            let g = load_edge_list(&graph)?;
            print_json(out, &serde_json::to_value(GraphStats::of(&g)?)?)
        }
        Command::Synth { spec, output, seed } => {
            let g = spec.parse::<SynthSpec>()?.generate(seed)?;
            let mut w = BufWriter::new(
                fs::File::create(&output).with_context(|| format!("creating {}", output.display()))?,
            );
            write_edge_list(&g, &mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::Walk { graph, start, budget, seed } => {
            let g = load_edge_list(&graph)?;
            let (trace, _) = run_walk(&g, node_for(&g, start)?, budget, seed)?;
            let covered = trace.covered_edge_count();
            print_json(out, &json!({
                "steps_taken": trace.steps().len(),
                "unique_nodes": trace.unique_nodes(),
                "covered_edges": covered,
                "covered_edge_fraction": covered as f64 / g.edge_count() as f64,
            }))
        }
        Command::Predict(args) => predict(args, out),
        Command::Rwsp(args) => rwsp(args, out),
        Command::Eval { config, set, seed, output, format } => eval(config, set, seed, output, format, out),
    }
}

/// 1 for bad input, 2 for an internal invariant violation.
fn exit_code(e: &anyhow::Error) -> u8 {
    let internal = e.downcast_ref::<rwsp_core::Error>().is_some_and(rwsp_core::Error::is_invariant_violation);
    if internal {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let mut out = BufWriter::new(io::stdout().lock());
    let result = run(cli, &mut out).and_then(|()| Ok(out.flush()?));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
