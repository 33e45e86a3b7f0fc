//! `ccs`: conductance-based community search from the command line.

mod output;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use ccs_core::{
    brute_force_ccs, evaluate_query, load_ground_truth, planted_partition, sample_subgraph,
    select_queries, Algorithm, EvalReport, EvalSummary, Graph, GroundTruth, PprParams, QuerySpec,
    SamplingParams, SccsParams, VertexId,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use output::{Format, Sink};

#[derive(Parser)]
#[command(name = "ccs", version, about = "Conductance-based community search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one search and print its report.
    Query(QueryArgs),
    /// Run a search for each of a set of queries and print reports plus a summary.
    Batch(BatchArgs),
    /// Report how much of each query's ground-truth community the sample covers.
    SampleStats(SampleStatsArgs),
    /// Write a planted-partition graph and its blocks.
    Generate(GenerateArgs),
    /// Exhaustive minimum-conductance search on a small graph.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmName {
    Pprcs,
    Sccs,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum RMax {
    Auto,
    Value(f64),
}

fn parse_r_max(s: &str) -> Result<RMax, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(RMax::Auto);
    }
    s.parse::<f64>()
        .map(RMax::Value)
        .map_err(|_| format!("expected a number or \"auto\", got {s:?}"))
}

#[derive(Args)]
struct InputArgs {
    /// Edge list, one `u v` pair per line.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct SamplingArgs {
    /// BFS depth admitted unconditionally.
    #[arg(long, default_value_t = 3)]
    dp: u32,
    /// Keep sampling whole levels until this many vertices are in.
    #[arg(long, default_value_t = 300)]
    l: usize,
    /// Hard cap on sampled vertices.
    #[arg(long, default_value_t = 5000)]
    h: usize,
}

impl SamplingArgs {
    fn params(&self) -> SamplingParams {
        SamplingParams {
            dp: self.dp,
            l: self.l,
            h: self.h,
        }
    }
}

#[derive(Args)]
struct AlgorithmArgs {
    #[arg(long, value_enum, default_value_t = AlgorithmName::Sccs)]
    algorithm: AlgorithmName,
    /// PPR jump probability.
    #[arg(long, default_value_t = 0.15)]
    alpha: f64,
    /// Push threshold, or `auto` for 1/n.
    #[arg(long, default_value = "auto", value_parser = parse_r_max)]
    r_max: RMax,
    #[command(flatten)]
    sampling: SamplingArgs,
    /// Longest run of tentative additions per expansion.
    #[arg(long, default_value_t = 2)]
    count: usize,
    /// Cap on expansion/verification rounds.
    #[arg(long, default_value_t = 100)]
    max_rounds: usize,
}

impl AlgorithmArgs {
    fn resolve(&self, g: &Graph) -> Result<Algorithm> {
        let algorithm = match self.algorithm {
            AlgorithmName::Pprcs => Algorithm::Pprcs(PprParams {
                alpha: self.alpha,
                r_max: match self.r_max {
                    RMax::Auto => 1.0 / g.n() as f64,
                    RMax::Value(r) => r,
                },
            }),
            AlgorithmName::Sccs => Algorithm::Sccs(SccsParams {
                sampling: self.sampling.params(),
                count: self.count,
                max_rounds: self.max_rounds,
            }),
        };
        algorithm.validate()?;
        Ok(algorithm)
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report `runtime_ms` as 0 so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Ground-truth communities, one per line; enables precision, recall and F1.
    #[arg(long)]
    ground_truth: Option<PathBuf>,
    /// External id of the query vertex.
    #[arg(long)]
    query: u64,
    #[command(flatten)]
    algorithm: AlgorithmArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct QuerySelection {
    /// Explicit external query ids, comma separated.
    #[arg(long, value_delimiter = ',', required_unless_present = "k", conflicts_with = "k")]
    queries: Vec<u64>,
    /// Number of ground-truth communities to draw one query from each.
    #[arg(long)]
    k: Option<usize>,
    /// Seed for drawing queries.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl QuerySelection {
    fn resolve(&self, g: &Graph, gt: &GroundTruth) -> Result<Vec<QuerySpec>> {
        match self.k {
            Some(k) => Ok(select_queries(gt, k, self.seed)?),
            None => self
                .queries
                .iter()
                .map(|&id| {
                    Ok(QuerySpec {
                        vertex: vertex_of(g, id)?,
                        community: None,
                    })
                })
                .collect(),
        }
    }
}

#[derive(Args)]
struct BatchArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    ground_truth: PathBuf,
    #[command(flatten)]
    selection: QuerySelection,
    #[command(flatten)]
    algorithm: AlgorithmArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Evaluate queries on all cores; output order is unchanged.
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct SampleStatsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    ground_truth: PathBuf,
    #[command(flatten)]
    selection: QuerySelection,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    blocks: usize,
    #[arg(long)]
    block_size: usize,
    #[arg(long)]
    p_in: f64,
    #[arg(long)]
    p_out: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge-list output path.
    #[arg(long)]
    edges: PathBuf,
    /// Ground-truth output path, one block per line.
    #[arg(long)]
    communities: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    query: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Query(args) => cmd_query(args),
        Command::Batch(args) => cmd_batch(args),
        Command::SampleStats(args) => cmd_sample_stats(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(file))
}

fn load_graph(path: &Path) -> Result<Graph> {
    Graph::load(open(path)?).with_context(|| format!("cannot load graph {}", path.display()))
}

fn load_truth(path: &Path, g: &Graph) -> Result<GroundTruth> {
    let gt = load_ground_truth(open(path)?, g)
        .with_context(|| format!("cannot load ground truth {}", path.display()))?;
    if gt.skipped_members > 0 {
        eprintln!(
            "warning: {} ground-truth members are not in the graph and were skipped",
            gt.skipped_members
        );
    }
    Ok(gt)
}

fn vertex_of(g: &Graph, id: u64) -> Result<VertexId> {
    match g.vertex_of(id) {
        Some(v) => Ok(v),
        None => bail!("unknown vertex id {id}"),
    }
}

fn finish(mut reports: Vec<EvalReport>, out: &OutputArgs) -> Vec<EvalReport> {
    if out.no_timing {
        for r in &mut reports {
            r.runtime_ms = 0.0;
        }
    }
    reports
}

fn cmd_query(args: QueryArgs) -> Result<()> {
    let g = load_graph(&args.input.graph)?;
    let gt = args.ground_truth.as_deref().map(|p| load_truth(p, &g)).transpose()?;
    let algorithm = args.algorithm.resolve(&g)?;
    let query = QuerySpec {
        vertex: vertex_of(&g, args.query)?,
        community: None,
    };
    let report = evaluate_query(&g, gt.as_ref(), &algorithm, query)?;
    let reports = finish(vec![report], &args.output);
    let mut sink = Sink::new(args.output.format, args.output.output.as_deref());
    sink.records(&reports)?;
    sink.finish()
}

fn cmd_batch(args: BatchArgs) -> Result<()> {
    let g = load_graph(&args.input.graph)?;
    let gt = load_truth(&args.ground_truth, &g)?;
    let algorithm = args.algorithm.resolve(&g)?;
    let queries = args.selection.resolve(&g, &gt)?;
    let run = |q: &QuerySpec| evaluate_query(&g, Some(&gt), &algorithm, *q);
    let reports: Vec<EvalReport> = if args.parallel {
        queries.par_iter().map(run).collect::<Result<_, _>>()?
    } else {
        queries.iter().map(run).collect::<Result<_, _>>()?
    };
    let reports = finish(reports, &args.output);
    let summary = EvalSummary::of(&reports);
    let mut sink = Sink::new(args.output.format, args.output.output.as_deref());
    sink.records(&reports)?;
    sink.summary(&summary)?;
    sink.finish()
}

#[derive(Debug, Serialize)]
struct SampleStat {
    query: u64,
    community: usize,
    coverage: f64,
    rate: f64,
    sample_size: usize,
    sample_ms: f64,
}

#[derive(Debug, Serialize)]
struct SampleSummary {
    queries: usize,
    mean_coverage: f64,
    mean_rate: f64,
    mean_sample_ms: f64,
}

fn cmd_sample_stats(args: SampleStatsArgs) -> Result<()> {
    let g = load_graph(&args.input.graph)?;
    let gt = load_truth(&args.ground_truth, &g)?;
    let params = args.sampling.params();
    params.validate()?;
    let queries = args.selection.resolve(&g, &gt)?;
    let mut stats = Vec::with_capacity(queries.len());
    for q in queries {
        let community = match q.community {
            Some(c) => c,
            None => match gt.communities_of(q.vertex).first() {
                Some(&c) => c,
                None => bail!("query vertex {} is not in any ground-truth community", g.external_id(q.vertex)),
            },
        };
        let start = Instant::now();
        let sample = sample_subgraph(&g, q.vertex, &params)?;
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let truth = &gt.communities[community];
        let covered = truth.iter().filter(|&&v| sample.local_of(v).is_some()).count();
        stats.push(SampleStat {
            query: g.external_id(q.vertex),
            community,
            coverage: covered as f64 / truth.len() as f64,
            rate: sample.len() as f64 / g.n() as f64,
            sample_size: sample.len(),
            sample_ms: if args.output.no_timing { 0.0 } else { elapsed },
        });
    }
    let n = stats.len().max(1) as f64;
    let summary = SampleSummary {
        queries: stats.len(),
        mean_coverage: stats.iter().map(|s| s.coverage).sum::<f64>() / n,
        mean_rate: stats.iter().map(|s| s.rate).sum::<f64>() / n,
        mean_sample_ms: stats.iter().map(|s| s.sample_ms).sum::<f64>() / n,
    };
    let mut sink = Sink::new(args.output.format, args.output.output.as_deref());
    sink.records(&stats)?;
    sink.summary(&summary)?;
    sink.finish()
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let pp = planted_partition(args.blocks, args.block_size, args.p_in, args.p_out, args.seed)?;
    // reject an edgeless result before touching the output files
    if pp.edges.is_empty() {
        bail!("generated graph has no edges");
    }
    let write = |path: &Path, f: &dyn Fn(&mut BufWriter<File>) -> io::Result<()>| -> Result<()> {
        let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut out = BufWriter::new(file);
        f(&mut out)?;
        out.flush()?;
        Ok(())
    };
    write(&args.edges, &|out| pp.write_edges(out))?;
    write(&args.communities, &|out| pp.write_blocks(out))?;
    let isolated = (args.blocks * args.block_size) as u64
        - {
            let mut ids: Vec<u64> = pp.edges.iter().flat_map(|&(u, v)| [u, v]).collect();
            ids.sort_unstable();
            ids.dedup();
            ids.len() as u64
        };
    eprintln!(
        "wrote {} edges over {} blocks ({} vertices without edges)",
        pp.edges.len(),
        pp.blocks.len(),
        isolated
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct OracleReport {
    query: u64,
    community: Vec<u64>,
    conductance: f64,
    conductance_exact: String,
    optima_count: usize,
    runtime_ms: f64,
}

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let g = load_graph(&args.input.graph)?;
    let q = vertex_of(&g, args.query)?;
    let start = Instant::now();
    let result = brute_force_ccs(&g, q)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let phi = result.best_conductance;
    let report = OracleReport {
        query: args.query,
        community: result.best_set.iter().map(|&v| g.external_id(v)).collect(),
        conductance: *phi.numer() as f64 / *phi.denom() as f64,
        conductance_exact: phi.to_string(),
        optima_count: result.optima_count,
        runtime_ms: if args.output.no_timing { 0.0 } else { elapsed },
    };
    let mut sink = Sink::new(args.output.format, args.output.output.as_deref());
    sink.records(&[report])?;
    sink.finish()
}
