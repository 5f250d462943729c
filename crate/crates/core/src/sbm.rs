//! Stochastic block model generation, ARI scoring, a spectral-clustering
//! baseline, and the runtime benchmark harness.
//!
//! All randomness flows through `ChaCha8Rng` seeded from the caller-supplied
//! seed, so every instance and every k-means run is reproducible.

use std::collections::HashMap;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::detector::{detect_communities, DetectorConfig};
use crate::error::{Error, Result};
use crate::graph::{Partition, WeightedGraph};

/// SBM instance parameters: `k` near-equal blocks over `n` nodes, intra-block
/// edge probability `p_in`, inter-block `p_out`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbmParams {
    pub n: usize,
    pub k: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub seed: u64,
}

impl SbmParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.n < self.k {
            return Err(Error::InvalidArgument(format!(
                "need k >= 1 and n >= k, got n={} k={}",
                self.n, self.k
            )));
        }
        for (name, p) in [("p_in", self.p_in), ("p_out", self.p_out)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("{name} must be in [0,1], got {p}")));
            }
        }
        Ok(())
    }
}

/// Generates an SBM instance with unit edge weights and returns the planted
/// partition. Block sizes differ by at most one (the first `n mod k` blocks
/// get the extra node).
pub fn generate_sbm(params: &SbmParams) -> Result<(WeightedGraph, Partition)> {
    params.validate()?;
    let SbmParams { n, k, p_in, p_out, seed } = *params;
    let base = n / k;
    let extra = n % k;
    let mut labels = Vec::with_capacity(n);
    for block in 0..k {
        let size = base + usize::from(block < extra);
        labels.extend(std::iter::repeat_n(block as i64, size));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                edges.push((u, v, 1.0));
            }
        }
    }
    Ok((WeightedGraph::new(n, edges)?, Partition::new(labels)))
}

/// Binomial coefficient C(x, 2) in exact integers.
fn choose2(x: i128) -> i128 {
    x * (x - 1) / 2
}

/// Pair-counting sums (S, A, B, N) underlying the ARI: pairs together in
/// both partitions, in `a`, in `b`, and total pairs.
fn ari_from_pair_sums(s: i128, a: i128, b: i128, n_pairs: i128) -> f64 {
    let num = 2 * (n_pairs * s - a * b);
    let den = n_pairs * (a + b) - 2 * a * b;
    if den == 0 {
        // Both all-singleton or both single-block: identical by convention.
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Adjusted Rand Index between two partitions of the same node set.
/// Computed in exact integer arithmetic from the contingency table, with a
/// single final division.
pub fn adjusted_rand_index(a: &Partition, b: &Partition) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "partition lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len() as i128;
    let mut contingency: HashMap<(i64, i64), i128> = HashMap::new();
    let mut row: HashMap<i64, i128> = HashMap::new();
    let mut col: HashMap<i64, i128> = HashMap::new();
    for (&la, &lb) in a.labels().iter().zip(b.labels()) {
        *contingency.entry((la, lb)).or_default() += 1;
        *row.entry(la).or_default() += 1;
        *col.entry(lb).or_default() += 1;
    }
    let s: i128 = contingency.values().map(|&c| choose2(c)).sum();
    let ra: i128 = row.values().map(|&c| choose2(c)).sum();
    let cb: i128 = col.values().map(|&c| choose2(c)).sum();
    Ok(ari_from_pair_sums(s, ra, cb, choose2(n)))
}

const KMEANS_RESTARTS: usize = 10;
const KMEANS_MAX_ITER: usize = 300;
const KMEANS_TOL: f64 = 1e-8;

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Nearest centroid by squared distance; ties go to the lowest index.
fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centroids.iter().enumerate() {
        let d = squared_distance(point, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn kmeans_pp_seed(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[rng.gen_range(0..points.len())].clone()];
    let mut dists: Vec<f64> = points.iter().map(|p| squared_distance(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = dists.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = points.len() - 1;
            for (i, &d) in dists.iter().enumerate() {
                target -= d;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.gen_range(0..points.len())
        };
        centroids.push(points[idx].clone());
        for (i, p) in points.iter().enumerate() {
            dists[i] = dists[i].min(squared_distance(p, centroids.last().unwrap()));
        }
    }
    centroids
}

fn kmeans_once(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64) {
    let dim = points[0].len();
    let mut centroids = kmeans_pp_seed(points, k, rng);
    let mut assignment = vec![0usize; points.len()];
    for _ in 0..KMEANS_MAX_ITER {
        for (i, p) in points.iter().enumerate() {
            assignment[i] = nearest(p, &centroids).0;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(&assignment) {
            counts[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(p) {
                *s += x;
            }
        }
        let mut movement = 0.0f64;
        for c in 0..k {
            if counts[c] == 0 {
                // Re-seed an empty cluster on the point farthest from its
                // centroid (lowest index on ties).
                let far = points
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (i, nearest(p, &centroids).1))
                    .fold((0usize, -1.0f64), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
                centroids[c] = points[far.0].clone();
                movement = f64::INFINITY;
                continue;
            }
            let new: Vec<f64> = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            movement = movement.max(squared_distance(&new, &centroids[c]).sqrt());
            centroids[c] = new;
        }
        if movement < KMEANS_TOL {
            break;
        }
    }
    for (i, p) in points.iter().enumerate() {
        assignment[i] = nearest(p, &centroids).0;
    }
    let inertia = points.iter().zip(&assignment).map(|(p, &c)| squared_distance(p, &centroids[c])).sum();
    (assignment, inertia)
}

/// Spectral clustering baseline: row-normalized bottom-k eigenvectors of the
/// symmetric normalized Laplacian, clustered by k-means with k-means++
/// seeding, 10 restarts, best inertia wins.
pub fn spectral_clustering(g: &WeightedGraph, k: usize, seed: u64) -> Result<Partition> {
    let n = g.node_count();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= n, got k={k} n={n}")));
    }
    let degrees = g.weighted_degrees();
    let inv_sqrt: Vec<f64> = degrees.iter().map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 }).collect();
    let mut lsym = DMatrix::identity(n, n);
    for e in g.edges() {
        let v = e.w * inv_sqrt[e.u] * inv_sqrt[e.v];
        lsym[(e.u, e.v)] -= v;
        lsym[(e.v, e.u)] -= v;
    }
    let eig = lsym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let (a, b): (f64, f64) = (eig.eigenvalues[i], eig.eigenvalues[j]);
        a.partial_cmp(&b).unwrap()
    });

    // n x k embedding from the k smallest eigenvalues, rows normalized;
    // all-zero rows (isolated nodes) stay zero.
    let mut points = vec![vec![0.0; k]; n];
    for (col, &ev_idx) in order.iter().take(k).enumerate() {
        for (i, row) in points.iter_mut().enumerate() {
            row[col] = eig.eigenvectors[(i, ev_idx)];
        }
    }
    for row in &mut points {
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for x in row.iter_mut() {
                *x /= norm;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<usize>, f64)> = None;
    for _ in 0..KMEANS_RESTARTS {
        let (assignment, inertia) = kmeans_once(&points, k, &mut rng);
        if best.as_ref().is_none_or(|b| inertia < b.1) {
            best = Some((assignment, inertia));
        }
    }
    let labels = best.unwrap().0.into_iter().map(|c| c as i64).collect();
    Ok(Partition::new(labels))
}

/// Which end-to-end method a benchmark record timed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FosterFlow,
    Spectral,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::FosterFlow => "foster_flow",
            Method::Spectral => "spectral",
        }
    }
}

/// One timed benchmark cell. `error` is set (and `ari` is NaN) when the
/// method failed on that instance.
#[derive(Debug, Clone)]
pub struct BenchmarkRecord {
    pub method: Method,
    pub params: SbmParams,
    pub edge_count: usize,
    pub wall_time_seconds: f64,
    pub ari: f64,
    pub seed: u64,
    pub error: Option<String>,
}

pub const BENCHMARK_CSV_HEADER: &str = "method,n,k,p_in,p_out,seed,edge_count,wall_time_seconds,ari";

impl BenchmarkRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.method.as_str(),
            self.params.n,
            self.params.k,
            self.params.p_in,
            self.params.p_out,
            self.seed,
            self.edge_count,
            self.wall_time_seconds,
            self.ari
        )
    }
}

/// Draws a connected instance, resampling with shifted seeds up to 10 times
/// (the detector refuses disconnected input).
fn connected_instance(params: &SbmParams, base_seed: u64) -> Result<(WeightedGraph, Partition, u64)> {
    for attempt in 0..10u64 {
        let seed = base_seed + attempt * 10_000;
        let (g, planted) = generate_sbm(&SbmParams { seed, ..*params })?;
        if g.is_connected() {
            return Ok((g, planted, seed));
        }
    }
    Err(Error::Computation(format!(
        "no connected instance after 10 resamples from seed {base_seed}"
    )))
}

fn run_method(method: Method, g: &WeightedGraph, k: usize, seed: u64) -> Result<Partition> {
    match method {
        Method::FosterFlow => {
            let cfg = DetectorConfig { seed, ..DetectorConfig::default() };
            Ok(detect_communities(g, &cfg)?.partition)
        }
        Method::Spectral => spectral_clustering(g, k, seed),
    }
}

/// Runs every (params, method, repetition) cell: generate, time the method
/// end to end, score against the planted partition. Per-cell failures are
/// recorded in-band and the sweep continues. Each cell runs single-threaded
/// so wall times are honest.
pub fn benchmark_runtime(param_grid: &[SbmParams], methods: &[Method], repetitions: usize) -> Result<Vec<BenchmarkRecord>> {
    if param_grid.is_empty() || methods.is_empty() || repetitions == 0 {
        return Err(Error::InvalidArgument("benchmark needs a nonempty grid, methods, and reps >= 1".into()));
    }
    let mut records = Vec::new();
    for params in param_grid {
        for &method in methods {
            for rep in 0..repetitions {
                let base_seed = params.seed + rep as u64;
                let record = match connected_instance(params, base_seed) {
                    Ok((g, planted, seed)) => {
                        let start = Instant::now();
                        let outcome = run_method(method, &g, params.k, seed);
                        let wall = start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
                        match outcome.and_then(|p| adjusted_rand_index(&p, &planted)) {
                            Ok(ari) => BenchmarkRecord {
                                method,
                                params: *params,
                                edge_count: g.edge_count(),
                                wall_time_seconds: wall,
                                ari,
                                seed,
                                error: None,
                            },
                            Err(e) => BenchmarkRecord {
                                method,
                                params: *params,
                                edge_count: g.edge_count(),
                                wall_time_seconds: wall,
                                ari: f64::NAN,
                                seed,
                                error: Some(e.to_string()),
                            },
                        }
                    }
                    Err(e) => BenchmarkRecord {
                        method,
                        params: *params,
                        edge_count: 0,
                        wall_time_seconds: f64::MIN_POSITIVE,
                        ari: f64::NAN,
                        seed: base_seed,
                        error: Some(e.to_string()),
                    },
                };
                records.push(record);
            }
        }
    }
    Ok(records)
}
