//! File formats and subcommand entry points.
//!
//! Graph files are plain text: a `nodes <n>` header, one `u v w` line per
//! edge with `u < v`, and an optional trailing `partition <labels...>` line
//! carrying planted community labels. Detection results are JSON. All output
//! is deterministic for fixed flags and seed; nothing timestamped goes into
//! files.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 input/validation error,
//! 3 precondition violation (e.g. disconnected input).

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detector::{detect_communities, DetectorConfig, PruneSide, Termination};
use crate::error::{Error, Result};
use crate::flow::{run_flow, FlowConfig};
use crate::graph::{Partition, WeightedGraph};
use crate::sbm::{adjusted_rand_index, benchmark_runtime, generate_sbm, Method, SbmParams, BENCHMARK_CSV_HEADER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

/// Serializes a graph (and optional planted partition) to the text format.
pub fn write_graph_text(g: &WeightedGraph, partition: Option<&Partition>) -> String {
    let mut out = String::new();
    writeln!(out, "nodes {}", g.node_count()).unwrap();
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.u, e.v, e.w).unwrap();
    }
    if let Some(p) = partition {
        let labels: Vec<String> = p.labels().iter().map(|l| l.to_string()).collect();
        writeln!(out, "partition {}", labels.join(" ")).unwrap();
    }
    out
}

/// Parses the graph text format. Duplicate edges, self-loops, and malformed
/// lines are all rejected.
pub fn parse_graph_text(text: &str) -> Result<(WeightedGraph, Option<Partition>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty graph file".into()))?;
    let n: usize = header
        .strip_prefix("nodes ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Parse(format!("expected 'nodes <n>' header, got '{header}'")))?;

    let mut edges = Vec::new();
    let mut partition = None;
    for line in lines {
        if let Some(rest) = line.strip_prefix("partition ") {
            let labels: std::result::Result<Vec<i64>, _> =
                rest.split_whitespace().map(str::parse).collect();
            let labels = labels.map_err(|e| Error::Parse(format!("bad partition labels: {e}")))?;
            if labels.len() != n {
                return Err(Error::Parse(format!(
                    "partition has {} labels for {} nodes",
                    labels.len(),
                    n
                )));
            }
            partition = Some(Partition::new(labels));
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("expected 'u v w', got '{line}'")));
        }
        let u: usize = fields[0].parse().map_err(|e| Error::Parse(format!("bad node id '{}': {e}", fields[0])))?;
        let v: usize = fields[1].parse().map_err(|e| Error::Parse(format!("bad node id '{}': {e}", fields[1])))?;
        let w: f64 = fields[2].parse().map_err(|e| Error::Parse(format!("bad weight '{}': {e}", fields[2])))?;
        edges.push((u, v, w));
    }
    let g = WeightedGraph::new(n, edges).map_err(|e| Error::Parse(e.to_string()))?;
    Ok((g, partition))
}

/// Per-cycle slice of a detection result, carrying the fitted mixture and
/// separation statistics for external plotting.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CycleRecord {
    pub cycle_index: usize,
    pub gmm_means: (f64, f64),
    pub gmm_variances: (f64, f64),
    pub gmm_mixture_weights: (f64, f64),
    pub t_statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub removed_edge_count: usize,
    pub component_count_after: usize,
}

/// JSON document written by `detect`. Round-trips through serde.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ResultFile {
    pub partition: Vec<i64>,
    pub termination: Termination,
    pub cycles: Vec<CycleRecord>,
    pub config: DetectorConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ari: Option<f64>,
}

fn build_result_file(
    result: &crate::detector::DetectionResult,
    cfg: &DetectorConfig,
    planted: Option<&Partition>,
) -> Result<ResultFile> {
    let cycles = result
        .cycles
        .iter()
        .map(|c| CycleRecord {
            cycle_index: c.cycle_index,
            gmm_means: c.gmm.means,
            gmm_variances: c.gmm.variances,
            gmm_mixture_weights: c.gmm.mixture_weights,
            t_statistic: c.separation.map(|s| s.t_statistic),
            p_value: c.separation.map(|s| s.p_value),
            removed_edge_count: c.removed_edges.len(),
            component_count_after: c.component_count_after,
        })
        .collect();
    let ari = match planted {
        Some(p) => Some(adjusted_rand_index(&result.partition, p)?),
        None => None,
    };
    Ok(ResultFile {
        partition: result.partition.labels().to_vec(),
        termination: result.termination,
        cycles,
        config: *cfg,
        ari,
    })
}

fn fail(code: i32, msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    code
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(Error::Io)
}

/// `generate`: write an SBM instance (with its planted partition) to a file.
pub fn cmd_generate(n: usize, k: usize, p_in: f64, p_out: f64, seed: u64, out_path: &Path) -> i32 {
    let params = SbmParams { n, k, p_in, p_out, seed };
    if let Err(e) = params.validate() {
        return fail(EXIT_INVALID_INPUT, e);
    }
    let (g, planted) = match generate_sbm(&params) {
        Ok(x) => x,
        Err(e) => return fail(EXIT_RUNTIME, e),
    };
    match write_file(out_path, &write_graph_text(&g, Some(&planted))) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(EXIT_INVALID_INPUT, e),
    }
}

/// `detect`: run the full pipeline on a graph file and write a JSON result.
#[allow(clippy::too_many_arguments)]
pub fn cmd_detect(
    in_path: &Path,
    out_path: &Path,
    eta: f64,
    epsilon: f64,
    flow_iters: usize,
    max_cycles: usize,
    prune_side: PruneSide,
    seed: u64,
) -> i32 {
    let text = match std::fs::read_to_string(in_path) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_INVALID_INPUT, e),
    };
    let (g, planted) = match parse_graph_text(&text) {
        Ok(x) => x,
        Err(e) => return fail(EXIT_INVALID_INPUT, e),
    };
    let cfg = DetectorConfig {
        flow: FlowConfig { eta, epsilon, iterations: flow_iters },
        max_cycles,
        prune_side,
        gmm_tol: 1e-8,
        gmm_max_iter: 500,
        seed,
    };
    if let Err(e) = cfg.validate() {
        return fail(EXIT_INVALID_INPUT, e);
    }
    if !g.is_connected() {
        return fail(EXIT_PRECONDITION, "input graph is disconnected; split by components first");
    }
    let result = match detect_communities(&g, &cfg) {
        Ok(r) => r,
        Err(e @ Error::InvalidArgument(_)) => return fail(EXIT_PRECONDITION, e),
        Err(e) => return fail(EXIT_RUNTIME, e),
    };
    let file = match build_result_file(&result, &cfg, planted.as_ref()) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_RUNTIME, e),
    };
    let json = match serde_json::to_string_pretty(&file) {
        Ok(j) => j,
        Err(e) => return fail(EXIT_RUNTIME, e),
    };
    match write_file(out_path, &(json + "\n")) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(EXIT_INVALID_INPUT, e),
    }
}

/// `histogram`: run the flow only (no pruning) and dump per-edge before/after
/// weights plus final curvature as CSV.
pub fn cmd_histogram(in_path: &Path, out_path: &Path, flow_iters: usize, eta: f64, epsilon: f64) -> i32 {
    let text = match std::fs::read_to_string(in_path) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_INVALID_INPUT, e),
    };
    let (g, _) = match parse_graph_text(&text) {
        Ok(x) => x,
        Err(e) => return fail(EXIT_INVALID_INPUT, e),
    };
    let cfg = FlowConfig { eta, epsilon, iterations: flow_iters };
    if let Err(e) = cfg.validate() {
        return fail(EXIT_INVALID_INPUT, e);
    }
    if !g.is_connected() {
        return fail(EXIT_PRECONDITION, "input graph is disconnected");
    }
    let (after, trace) = match run_flow(&g, &cfg, true) {
        Ok(x) => x,
        Err(e) => return fail(EXIT_RUNTIME, e),
    };
    let final_curvature = trace.last().expect("iterations >= 1");
    let mut csv = String::from("edge_u,edge_v,weight_before,weight_after,curvature_final\n");
    for ((before, evolved), kappa) in g.edges().iter().zip(after.edges()).zip(final_curvature.values()) {
        writeln!(csv, "{},{},{},{},{}", before.u, before.v, before.w, evolved.w, kappa).unwrap();
    }
    match write_file(out_path, &csv) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(EXIT_INVALID_INPUT, e),
    }
}

/// `benchmark`: sweep SBM sizes and methods, write the timing CSV.
#[allow(clippy::too_many_arguments)]
pub fn cmd_benchmark(
    n_values: &[usize],
    k: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
    methods: &[Method],
    reps: usize,
    out_path: &Path,
) -> i32 {
    let grid: Vec<SbmParams> = n_values
        .iter()
        .map(|&n| SbmParams { n, k, p_in, p_out, seed })
        .collect();
    for params in &grid {
        if let Err(e) = params.validate() {
            return fail(EXIT_INVALID_INPUT, e);
        }
    }
    let records = match benchmark_runtime(&grid, methods, reps) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_INVALID_INPUT, e),
    };
    let failures = records.iter().filter(|r| r.error.is_some()).count();
    for r in records.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "warning: {} on n={} seed={} failed: {}",
            r.method.as_str(),
            r.params.n,
            r.seed,
            r.error.as_deref().unwrap_or("")
        );
    }
    if failures == records.len() {
        return fail(EXIT_RUNTIME, "every benchmark cell failed");
    }
    let mut csv = String::from(BENCHMARK_CSV_HEADER);
    csv.push('\n');
    for r in &records {
        csv.push_str(&r.to_csv_row());
        csv.push('\n');
    }
    match write_file(out_path, &csv) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(EXIT_INVALID_INPUT, e),
    }
}
