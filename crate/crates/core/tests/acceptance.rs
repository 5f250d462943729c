//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the per-criterion lines.

use std::time::Instant;

use foster_flow::cli::{cmd_detect, cmd_generate, EXIT_OK};
use foster_flow::detector::{detect_communities, DetectorConfig, PruneSide, Termination};
use foster_flow::flow::{flow_step, foster_curvature, run_flow, FlowConfig};
use foster_flow::gmm::{assign_components, fit_gmm_1d, welch_t_test, Component};
use foster_flow::graph::{Partition, WeightedGraph};
use foster_flow::resistance::{build_laplacian, effective_resistances, pseudoinverse};
use foster_flow::sbm::{adjusted_rand_index, benchmark_runtime, generate_sbm, Method, SbmParams};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

const SBM_REFERENCE: SbmParams = SbmParams { n: 60, k: 3, p_in: 0.7, p_out: 0.07, seed: 0 };
const SEED_COUNT: u64 = 20;

struct Criterion {
    index: usize,
    name: &'static str,
}

impl Criterion {
    fn new(index: usize, name: &'static str) -> Self {
        Self { index, name }
    }

    fn check(&self, ok: bool, detail: &str) {
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {:02}: {} ({detail})", self.index, self.name);
        assert!(ok, "criterion {:02} {} failed: {detail}", self.index, self.name);
    }
}

fn sbm_instance(seed: u64) -> (WeightedGraph, Partition) {
    let (g, planted) = generate_sbm(&SbmParams { seed, ..SBM_REFERENCE }).unwrap();
    assert!(g.is_connected(), "reference SBM instance seed {seed} disconnected");
    (g, planted)
}

fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize) -> WeightedGraph {
    let mut edges = Vec::new();
    let mut present = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v, rng.gen_range(0.1..3.0)));
        present.insert((u, v));
    }
    for _ in 0..2 * n {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if present.insert(key) {
            edges.push((key.0, key.1, rng.gen_range(0.1..3.0)));
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}

#[test]
fn criterion_01_sbm_recovery() {
    let c = Criterion::new(1, "SBM recovery: ARI >= 0.9 on >= 80% of 20 seeds, mean >= 0.9");
    let mut aris = Vec::new();
    let mut max_seconds = 0.0f64;
    for seed in 0..SEED_COUNT {
        let (g, planted) = sbm_instance(seed);
        let cfg = DetectorConfig { seed, ..DetectorConfig::default() };
        let start = Instant::now();
        let result = detect_communities(&g, &cfg).unwrap();
        max_seconds = max_seconds.max(start.elapsed().as_secs_f64());
        aris.push(adjusted_rand_index(&result.partition, &planted).unwrap());
    }
    let hits = aris.iter().filter(|&&a| a >= 0.9).count();
    let mean = aris.iter().sum::<f64>() / aris.len() as f64;
    let ok = hits * 5 >= aris.len() * 4 && mean >= 0.9 && max_seconds < 10.0;
    c.check(ok, &format!("hits {hits}/{}, mean ARI {mean:.3}, max {max_seconds:.2}s", aris.len()));
}

#[test]
fn criterion_02_weight_group_separation() {
    let c = Criterion::new(2, "Welch p < 1e-6 between GMM weight groups on >= 90% of 20 seeds");
    let mut hits = 0usize;
    let mut total = 0usize;
    for seed in 0..SEED_COUNT {
        let (g, _) = sbm_instance(seed);
        let (flowed, _) = run_flow(&g, &FlowConfig::default(), false).unwrap();
        let weights = flowed.weights();
        let fit = fit_gmm_1d(&weights, 1e-8, 500, seed).unwrap();
        total += 1;
        if fit.degenerate {
            continue;
        }
        let labels = assign_components(&fit, &weights).unwrap();
        let low: Vec<f64> = weights.iter().zip(&labels).filter(|(_, &l)| l == Component::Low).map(|(w, _)| *w).collect();
        let high: Vec<f64> = weights.iter().zip(&labels).filter(|(_, &l)| l == Component::High).map(|(w, _)| *w).collect();
        if let Ok(test) = welch_t_test(&low, &high) {
            if test.p_value < 1e-6 {
                hits += 1;
            }
        }
    }
    let ok = hits * 10 >= total * 9;
    c.check(ok, &format!("separated on {hits}/{total} seeds"));
}

#[test]
fn criterion_03_pruning_direction() {
    let c = Criterion::new(3, "post-flow inter-community mean weight exceeds intra on >= 90% of 20 seeds");
    let mut hits = 0usize;
    for seed in 0..SEED_COUNT {
        let (g, planted) = sbm_instance(seed);
        let (flowed, _) = run_flow(&g, &FlowConfig::default(), false).unwrap();
        let (mut intra, mut inter) = (Vec::new(), Vec::new());
        for e in flowed.edges() {
            if planted.labels()[e.u] == planted.labels()[e.v] {
                intra.push(e.w);
            } else {
                inter.push(e.w);
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        if mean(&inter) > mean(&intra) {
            hits += 1;
        }
    }
    let ok = hits * 10 >= SEED_COUNT as usize * 9;
    c.check(ok, &format!("direction held on {hits}/{SEED_COUNT} seeds"));
}

#[test]
fn criterion_04_foster_theorem() {
    let c = Criterion::new(4, "Foster's theorem: sum of w*R equals n-1 within 1e-8 on 50 random graphs");
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.gen_range(4..=60);
        let g = random_connected_graph(&mut rng, n);
        let report = effective_resistances(&g).unwrap();
        worst = worst.max((report.foster_sum - (n as f64 - 1.0)).abs());
    }
    c.check(worst < 1e-8, &format!("worst deviation {worst:.2e}"));
}

#[test]
fn criterion_05_penrose_conditions() {
    let c = Criterion::new(5, "Penrose conditions within 1e-8 max-norm on every test graph");
    let mut rng = ChaCha8Rng::seed_from_u64(4096);
    let mut graphs: Vec<WeightedGraph> = (0..20)
        .map(|_| {
            let n = rng.gen_range(4..=40);
            random_connected_graph(&mut rng, n)
        })
        .collect();
    graphs.push(WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap());
    graphs.push(WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap());
    graphs.push(WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 2.0)]).unwrap()); // disconnected
    let (sbm, _) = sbm_instance(0);
    graphs.push(sbm);
    let mut worst = 0.0f64;
    for g in &graphs {
        let l = build_laplacian(g);
        let p = pseudoinverse(&l).unwrap();
        worst = worst.max((&l * &p * &l - &l).amax());
        worst = worst.max((&p * &l * &p - &p).amax());
    }
    c.check(worst < 1e-8, &format!("worst residual {worst:.2e} over {} graphs", graphs.len()));
}

#[test]
fn criterion_06_flow_conservation() {
    let c = Criterion::new(6, "after every flow step the weight sum equals |E| within 1e-9 and weights stay positive");
    let mut worst_rel = 0.0f64;
    let mut min_weight = f64::INFINITY;
    let cfg = FlowConfig::default();
    for seed in 0..5u64 {
        let (mut g, _) = sbm_instance(seed);
        for _ in 0..cfg.iterations {
            let kappa = foster_curvature(&g).unwrap();
            g = flow_step(&g, &kappa, &cfg).unwrap();
            let expect = g.edge_count() as f64;
            worst_rel = worst_rel.max((g.total_weight() - expect).abs() / expect);
            min_weight = min_weight.min(g.weights().iter().cloned().fold(f64::INFINITY, f64::min));
        }
    }
    let ok = worst_rel < 1e-9 && min_weight > 0.0;
    c.check(ok, &format!("worst relative drift {worst_rel:.2e}, min weight {min_weight:.3e}"));
}

#[test]
fn criterion_07_curvature_clipping_and_symmetry() {
    let c = Criterion::new(7, "curvature in [-1,1]; edge-transitive graphs symmetric within 1e-10 and flow fixed points within 1e-9");
    let cycle8 = WeightedGraph::new(8, (0..8).map(|i| (i, (i + 1) % 8, 1.0))).unwrap();
    let mut k5_edges = Vec::new();
    for i in 0..5usize {
        for j in (i + 1)..5 {
            k5_edges.push((i, j, 1.0));
        }
    }
    let k5 = WeightedGraph::new(5, k5_edges).unwrap();
    let mut k33_edges = Vec::new();
    for i in 0..3usize {
        for j in 3..6 {
            k33_edges.push((i, j, 1.0));
        }
    }
    let k33 = WeightedGraph::new(6, k33_edges).unwrap();

    let mut ok = true;
    let mut detail = String::new();
    for (name, g) in [("C8", &cycle8), ("K5", &k5), ("K33", &k33)] {
        let kappa = foster_curvature(g).unwrap();
        let first = kappa.values()[0];
        for &v in kappa.values() {
            if !(-1.0..=1.0).contains(&v) || (v - first).abs() > 1e-10 {
                ok = false;
                detail = format!("{name}: asymmetric or unclipped curvature {v}");
            }
        }
        let (out, trace) = run_flow(g, &FlowConfig::default(), true).unwrap();
        for e in out.edges() {
            if (e.w - 1.0).abs() > 1e-9 {
                ok = false;
                detail = format!("{name}: not a fixed point, weight {}", e.w);
            }
        }
        for map in &trace {
            for &v in map.values() {
                if !(-1.0..=1.0).contains(&v) {
                    ok = false;
                    detail = format!("{name}: curvature {v} outside [-1,1]");
                }
            }
        }
    }
    if detail.is_empty() {
        detail = "C8, K5, K33 all symmetric fixed points".into();
    }
    c.check(ok, &detail);
}

#[test]
fn criterion_08_em_monotonicity() {
    let c = Criterion::new(8, "EM log-likelihood non-decreasing within 1e-10 on 100 random datasets");
    let mut rng = ChaCha8Rng::seed_from_u64(555);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(8..120);
        let bimodal = rng.gen_bool(0.5);
        let values: Vec<f64> = (0..n)
            .map(|i| {
                let (mu, sigma) = if bimodal && i % 2 == 0 { (4.0, 0.5) } else { (0.0, 1.0) };
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen();
                mu + sigma * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        let fit = fit_gmm_1d(&values, 1e-8, 300, 0).unwrap();
        for pair in fit.log_likelihood_trace.windows(2) {
            worst = worst.max(pair[0] - pair[1]);
        }
    }
    c.check(worst <= 1e-10, &format!("worst decrease {worst:.2e}"));
}

#[test]
fn criterion_09_ari_oracle_equivalence() {
    let c = Criterion::new(9, "closed-form ARI matches brute-force pair counting exactly on 100 random pairs");
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    let mut checked = 0usize;
    for _ in 0..100 {
        let n = rng.gen_range(2..=30);
        let ka = rng.gen_range(1..=n);
        let kb = rng.gen_range(1..=n);
        let a = Partition::new((0..n).map(|_| rng.gen_range(0..ka) as i64).collect());
        let b = Partition::new((0..n).map(|_| rng.gen_range(0..kb) as i64).collect());
        let closed = adjusted_rand_index(&a, &b).unwrap();
        let oracle = ari_pair_counting_oracle(&a, &b);
        assert_eq!(closed, oracle, "mismatch on a={:?} b={:?}", a.labels(), b.labels());
        checked += 1;
    }
    c.check(checked == 100, &format!("{checked} pairs matched exactly"));
}

/// Independent ARI oracle: enumerate node pairs, count co-assignments, and
/// apply the pair-counting form of the index.
fn ari_pair_counting_oracle(a: &Partition, b: &Partition) -> f64 {
    let n = a.len();
    let (mut together_both, mut together_a, mut together_b) = (0i128, 0i128, 0i128);
    for i in 0..n {
        for j in (i + 1)..n {
            let same_a = a.labels()[i] == a.labels()[j];
            let same_b = b.labels()[i] == b.labels()[j];
            if same_a && same_b {
                together_both += 1;
            }
            if same_a {
                together_a += 1;
            }
            if same_b {
                together_b += 1;
            }
        }
    }
    let pairs = (n as i128) * (n as i128 - 1) / 2;
    let num = 2 * (pairs * together_both - together_a * together_b);
    let den = pairs * (together_a + together_b) - 2 * together_a * together_b;
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

#[test]
fn criterion_10_runtime_trend() {
    let c = Criterion::new(10, "foster_flow median wall time monotone nondecreasing over n in {30,60,120}; grid < 5 min");
    let grid = [
        SbmParams { n: 30, ..SBM_REFERENCE },
        SbmParams { n: 60, ..SBM_REFERENCE },
        SbmParams { n: 120, ..SBM_REFERENCE },
    ];
    let start = Instant::now();
    let records = benchmark_runtime(&grid, &[Method::FosterFlow, Method::Spectral], 5).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let median_for = |n: usize| {
        let mut times: Vec<f64> = records
            .iter()
            .filter(|r| r.method == Method::FosterFlow && r.params.n == n && r.error.is_none())
            .map(|r| r.wall_time_seconds)
            .collect();
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times[times.len() / 2]
    };
    let (m30, m60, m120) = (median_for(30), median_for(60), median_for(120));
    let ok = m30 <= m60 && m60 <= m120 && elapsed < 300.0;
    c.check(ok, &format!("medians {m30:.4}s <= {m60:.4}s <= {m120:.4}s, grid took {elapsed:.1}s"));
}

#[test]
fn criterion_11_detect_determinism() {
    let c = Criterion::new(11, "repeated detect runs with identical flags produce byte-identical result files");
    let dir = tempfile::tempdir().unwrap();
    let graph_path = dir.path().join("sbm.graph");
    assert_eq!(cmd_generate(SBM_REFERENCE.n, SBM_REFERENCE.k, SBM_REFERENCE.p_in, SBM_REFERENCE.p_out, 3, &graph_path), EXIT_OK);
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    assert_eq!(cmd_detect(&graph_path, &out_a, 0.3, 1e-6, 15, 10, PruneSide::High, 9), EXIT_OK);
    assert_eq!(cmd_detect(&graph_path, &out_b, 0.3, 1e-6, 15, 10, PruneSide::High, 9), EXIT_OK);
    let bytes_a = std::fs::read(&out_a).unwrap();
    let bytes_b = std::fs::read(&out_b).unwrap();
    c.check(bytes_a == bytes_b, &format!("{} bytes identical", bytes_a.len()));
}

#[test]
fn detection_terminates_by_disconnection_on_reference_instance() {
    // Sanity companion to criterion 1: the reference instance splits into
    // exactly the planted three communities.
    let (g, planted) = sbm_instance(0);
    let result = detect_communities(&g, &DetectorConfig::default()).unwrap();
    assert_eq!(result.termination, Termination::Disconnected);
    assert_eq!(result.partition.community_count(), 3);
    assert_eq!(adjusted_rand_index(&result.partition, &planted).unwrap(), 1.0);
}
