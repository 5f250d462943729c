//! Foster-Ricci curvature and the normalized discrete Ricci flow.
//!
//! Curvature per edge is `1/d_u + 1/d_v - R_uv/w_uv`, clipped to `[-1, 1]`
//! for numerical stability. One flow step multiplies each weight by
//! `1 - eta * kappa`, floors at `epsilon`, then rescales all weights so their
//! sum equals the edge count. The floor is not re-applied after rescaling.
//!
//! With the `parallel` feature the per-edge maps run on rayon; the reduction
//! (weight sum) stays sequential so results are identical to the sequential
//! build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::resistance::{build_laplacian, pseudoinverse};

/// Per-edge clipped curvature values, parallel to `graph.edges()`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureMap {
    values: Vec<f64>,
}

impl CurvatureMap {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Flow hyperparameters. Defaults: eta 0.3, epsilon 1e-6, 15 iterations.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FlowConfig {
    pub eta: f64,
    pub epsilon: f64,
    pub iterations: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { eta: 0.3, epsilon: 1e-6, iterations: 15 }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eta.is_nan() || self.eta <= 0.0 || self.eta > 1.0 {
            return Err(Error::InvalidArgument(format!("eta must be in (0, 1], got {}", self.eta)));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidArgument("iterations must be >= 1".into()));
        }
        Ok(())
    }
}

fn curvature_one(g: &WeightedGraph, degrees: &[f64], pinv: &nalgebra::DMatrix<f64>, idx: usize) -> f64 {
    let e = &g.edges()[idx];
    let r = pinv[(e.u, e.u)] + pinv[(e.v, e.v)] - 2.0 * pinv[(e.u, e.v)];
    let raw = 1.0 / degrees[e.u] + 1.0 / degrees[e.v] - r / e.w;
    raw.clamp(-1.0, 1.0)
}

fn curvature_values_seq(g: &WeightedGraph, degrees: &[f64], pinv: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    (0..g.edge_count()).map(|i| curvature_one(g, degrees, pinv, i)).collect()
}

#[cfg(feature = "parallel")]
fn curvature_values(g: &WeightedGraph, degrees: &[f64], pinv: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    (0..g.edge_count())
        .into_par_iter()
        .map(|i| curvature_one(g, degrees, pinv, i))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn curvature_values(g: &WeightedGraph, degrees: &[f64], pinv: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    curvature_values_seq(g, degrees, pinv)
}

fn foster_curvature_impl(g: &WeightedGraph, sequential: bool) -> Result<CurvatureMap> {
    let components = g.connected_components().community_count();
    if components != 1 {
        return Err(Error::Precondition(format!(
            "curvature requires a connected graph; input has {components} components"
        )));
    }
    let degrees = g.weighted_degrees();
    let pinv = pseudoinverse(&build_laplacian(g))?;
    let values = if sequential {
        curvature_values_seq(g, &degrees, &pinv)
    } else {
        curvature_values(g, &degrees, &pinv)
    };
    Ok(CurvatureMap { values })
}

/// Clipped Foster-Ricci curvature for every edge of a connected graph.
pub fn foster_curvature(g: &WeightedGraph) -> Result<CurvatureMap> {
    foster_curvature_impl(g, false)
}

/// Sequential variant, kept for the bench suite comparing both paths.
pub fn foster_curvature_seq(g: &WeightedGraph) -> Result<CurvatureMap> {
    foster_curvature_impl(g, true)
}

fn flow_step_impl(g: &WeightedGraph, kappa: &CurvatureMap, cfg: &FlowConfig, sequential: bool) -> Result<WeightedGraph> {
    if kappa.len() != g.edge_count() {
        return Err(Error::InvalidArgument(format!(
            "curvature map covers {} edges, graph has {}",
            kappa.len(),
            g.edge_count()
        )));
    }
    cfg.validate()?;
    let update = |(e, &k): (&crate::graph::Edge, &f64)| (e.w * (1.0 - cfg.eta * k)).max(cfg.epsilon);
    #[cfg(feature = "parallel")]
    let raw: Vec<f64> = if sequential {
        g.edges().iter().zip(kappa.values()).map(update).collect()
    } else {
        g.edges().par_iter().zip(kappa.values()).map(update).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let raw: Vec<f64> = {
        let _ = sequential;
        g.edges().iter().zip(kappa.values()).map(update).collect()
    };
    let total: f64 = raw.iter().sum();
    let scale = g.edge_count() as f64 / total;
    let rescaled: Vec<f64> = raw.iter().map(|w| w * scale).collect();
    Ok(g.with_weights(&rescaled))
}

/// One flow update: per-edge multiplicative step, epsilon floor, then global
/// rescale so the weight sum equals the edge count.
pub fn flow_step(g: &WeightedGraph, kappa: &CurvatureMap, cfg: &FlowConfig) -> Result<WeightedGraph> {
    flow_step_impl(g, kappa, cfg, false)
}

/// Sequential variant, kept for the bench suite comparing both paths.
pub fn flow_step_seq(g: &WeightedGraph, kappa: &CurvatureMap, cfg: &FlowConfig) -> Result<WeightedGraph> {
    flow_step_impl(g, kappa, cfg, true)
}

/// Runs `cfg.iterations` rounds of curvature + flow step. Deterministic.
/// `record_trace` keeps the per-iteration curvature maps (diagnostics);
/// benchmarks pass false to skip the allocation.
pub fn run_flow(g: &WeightedGraph, cfg: &FlowConfig, record_trace: bool) -> Result<(WeightedGraph, Vec<CurvatureMap>)> {
    cfg.validate()?;
    let mut current = g.clone();
    let mut trace = Vec::new();
    for _ in 0..cfg.iterations {
        let kappa = foster_curvature(&current)?;
        current = flow_step(&current, &kappa, cfg)?;
        if record_trace {
            trace.push(kappa);
        }
    }
    Ok((current, trace))
}
