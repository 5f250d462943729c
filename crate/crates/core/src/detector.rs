//! The full detection pipeline: flow stabilization, iterative GMM pruning
//! cycles, and connectivity-based termination.
//!
//! Each cycle fits a two-component mixture to the current edge weights,
//! removes every edge assigned to the configured side (default: the
//! higher-mean component, which the flow drives inter-community edges into),
//! and stops as soon as the graph disconnects. The connected components of
//! the final graph are the communities. If the weight distribution never
//! turns bimodal the run ends with a degenerate-GMM or max-cycles flag and a
//! single community rather than a fabricated split.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{run_flow, FlowConfig};
use crate::gmm::{assign_components, fit_gmm_1d, welch_t_test, Component, GmmFit, SeparationTest};
use crate::graph::{Partition, WeightedGraph};

/// Which GMM component to prune each cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PruneSide {
    High,
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub flow: FlowConfig,
    pub max_cycles: usize,
    pub prune_side: PruneSide,
    pub gmm_tol: f64,
    pub gmm_max_iter: usize,
    pub seed: u64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            flow: FlowConfig::default(),
            max_cycles: 10,
            prune_side: PruneSide::High,
            gmm_tol: 1e-8,
            gmm_max_iter: 500,
            seed: 0,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        self.flow.validate()?;
        if self.max_cycles == 0 {
            return Err(Error::InvalidArgument("max_cycles must be >= 1".into()));
        }
        if self.gmm_tol.is_nan() || self.gmm_tol <= 0.0 || self.gmm_max_iter == 0 {
            return Err(Error::InvalidArgument("gmm_tol must be positive and gmm_max_iter >= 1".into()));
        }
        Ok(())
    }
}

/// Why a detection run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Disconnected,
    MaxCyclesReached,
    DegenerateGmm,
}

/// Everything recorded about one pruning cycle; carries the per-cycle weight
/// histogram data.
#[derive(Debug, Clone)]
pub struct CycleDiagnostics {
    pub cycle_index: usize,
    pub edge_weights_before: Vec<f64>,
    pub gmm: GmmFit,
    pub separation: Option<SeparationTest>,
    pub removed_edges: Vec<(usize, usize)>,
    pub component_count_after: usize,
}

#[derive(Debug, Clone)]
pub struct DetectionResult {
    pub partition: Partition,
    pub cycles: Vec<CycleDiagnostics>,
    pub termination: Termination,
    pub final_graph: WeightedGraph,
}

/// One pruning cycle on an already-flowed graph. A degenerate GMM (or a
/// selection that would remove every edge, or none) leaves the graph
/// unchanged and comes back with an empty `removed_edges`; the caller reads
/// that as the stop signal.
pub fn prune_cycle(
    g: &WeightedGraph,
    cfg: &DetectorConfig,
    cycle_index: usize,
) -> Result<(WeightedGraph, CycleDiagnostics)> {
    if !g.is_connected() {
        return Err(Error::Precondition("prune_cycle requires a connected graph".into()));
    }
    if g.edge_count() < 4 {
        return Err(Error::Precondition(format!(
            "prune_cycle needs at least 4 edges, got {}",
            g.edge_count()
        )));
    }
    let weights = g.weights();
    let fit = fit_gmm_1d(&weights, cfg.gmm_tol, cfg.gmm_max_iter, cfg.seed)?;

    let mut removed: Vec<(usize, usize)> = Vec::new();
    let mut separation = None;
    if !fit.degenerate {
        let labels = assign_components(&fit, &weights)?;
        let target = match cfg.prune_side {
            PruneSide::High => Component::High,
            PruneSide::Low => Component::Low,
        };
        let selected: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .zip(&labels)
            .filter(|(_, &l)| l == target)
            .map(|(e, _)| (e.u, e.v))
            .collect();
        // Removing every edge would destroy the graph; treat as degenerate.
        if !selected.is_empty() && selected.len() < g.edge_count() {
            removed = selected;
        }

        let low: Vec<f64> = weights.iter().zip(&labels).filter(|(_, &l)| l == Component::Low).map(|(w, _)| *w).collect();
        let high: Vec<f64> = weights.iter().zip(&labels).filter(|(_, &l)| l == Component::High).map(|(w, _)| *w).collect();
        separation = welch_t_test(&low, &high).ok();
    }

    let pruned = if removed.is_empty() { g.clone() } else { g.remove_edges(&removed)? };
    let diagnostics = CycleDiagnostics {
        cycle_index,
        edge_weights_before: weights,
        gmm: fit,
        separation,
        removed_edges: removed,
        component_count_after: pruned.connected_components().community_count(),
    };
    Ok((pruned, diagnostics))
}

/// Rescale weights so their sum equals the edge count.
fn renormalize(g: &WeightedGraph) -> WeightedGraph {
    let scale = g.edge_count() as f64 / g.total_weight();
    let weights: Vec<f64> = g.weights().iter().map(|w| w * scale).collect();
    g.with_weights(&weights)
}

/// Runs the full pipeline on a connected graph with at least 4 edges.
pub fn detect_communities(g: &WeightedGraph, cfg: &DetectorConfig) -> Result<DetectionResult> {
    cfg.validate()?;
    if !g.is_connected() {
        return Err(Error::InvalidArgument(
            "detect_communities requires a connected graph; split by components first".into(),
        ));
    }
    if g.edge_count() < 4 {
        return Err(Error::InvalidArgument(format!(
            "detect_communities needs at least 4 edges, got {}",
            g.edge_count()
        )));
    }

    let (mut current, _) = run_flow(g, &cfg.flow, false)?;
    let mut cycles = Vec::new();
    let mut termination = Termination::MaxCyclesReached;

    for cycle_index in 0..cfg.max_cycles {
        if current.edge_count() < 4 {
            termination = Termination::DegenerateGmm;
            break;
        }
        let (pruned, diagnostics) = prune_cycle(&current, cfg, cycle_index)?;
        let removed_any = !diagnostics.removed_edges.is_empty();
        cycles.push(diagnostics);
        if !removed_any {
            termination = Termination::DegenerateGmm;
            break;
        }
        current = pruned;
        if !current.is_connected() {
            termination = Termination::Disconnected;
            break;
        }
        // Still connected: reapply the flow to the pruned graph and go again.
        let (flowed, _) = run_flow(&renormalize(&current), &cfg.flow, false)?;
        current = flowed;
    }

    Ok(DetectionResult {
        partition: current.connected_components(),
        cycles,
        termination,
        final_graph: current,
    })
}
