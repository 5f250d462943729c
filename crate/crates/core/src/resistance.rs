//! Combinatorial Laplacian, Moore-Penrose pseudoinverse, and per-edge
//! effective resistance distances.
//!
//! Weights enter the Laplacian directly as conductances: `L_ii` is the
//! weighted degree and `L_ij = -w_ij` for edges. For connected graphs the
//! pseudoinverse comes from the rank-one corrected solve
//! `(L + J/n) X = I`, `L^+ = X - J/n`, which is exact because the correction
//! spans exactly the kernel of a connected Laplacian. Rank-deficient inputs
//! fall back to a symmetric eigendecomposition with a relative eigenvalue
//! cutoff.
//!
//! Everything here is dense; the intended scale is n up to a couple of
//! thousand nodes.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Relative eigenvalue cutoff for the eigendecomposition fallback.
const RANK_CUTOFF: f64 = 1e-10;

/// Per-edge effective resistances, parallel to `graph.edges()`, plus the
/// Foster sum used as an independent validity check
/// (for connected graphs it must equal n - 1).
#[derive(Debug, Clone)]
pub struct ResistanceReport {
    pub per_edge: Vec<f64>,
    pub foster_sum: f64,
}

/// Dense combinatorial Laplacian `L = D - W`.
pub fn build_laplacian(g: &WeightedGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut l = DMatrix::zeros(n, n);
    for e in g.edges() {
        l[(e.u, e.v)] -= e.w;
        l[(e.v, e.u)] -= e.w;
        l[(e.u, e.u)] += e.w;
        l[(e.v, e.v)] += e.w;
    }
    l
}

/// Moore-Penrose pseudoinverse of a graph Laplacian.
pub fn pseudoinverse(l: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = l.nrows();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    // Rank-one correction path: exact when the kernel is spanned by the
    // all-ones vector, i.e. the graph is connected. A disconnected graph
    // leaves L + J/n singular and Cholesky fails.
    let jn = DMatrix::from_element(n, n, 1.0 / n as f64);
    let shifted = l + &jn;
    if let Some(chol) = shifted.clone().cholesky() {
        let candidate = chol.solve(&DMatrix::identity(n, n)) - jn;
        // Cholesky can run to completion on the (singular) shifted matrix of
        // a disconnected Laplacian; accept the fast path only if the first
        // Penrose condition actually holds.
        let residual = (l * &candidate * l - l).amax();
        let scale = l.amax().max(1.0);
        if residual <= 1e-8 * scale {
            return Ok(candidate);
        }
    }
    pseudoinverse_eig(l)
}

/// Eigendecomposition fallback with relative cutoff; handles disconnected and
/// edgeless graphs.
fn pseudoinverse_eig(l: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = l.nrows();
    let eig = l.clone().symmetric_eigen();
    let max_ev = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    if !max_ev.is_finite() {
        return Err(Error::Computation("eigendecomposition produced non-finite eigenvalues".into()));
    }
    let cutoff = RANK_CUTOFF * max_ev;
    let mut pinv = DMatrix::zeros(n, n);
    for k in 0..n {
        let ev = eig.eigenvalues[k];
        if ev > cutoff {
            let v = eig.eigenvectors.column(k);
            pinv += v * v.transpose() / ev;
        }
    }
    Ok(pinv)
}

/// Effective resistance `R_uv = L+_uu + L+_vv - 2 L+_uv` for every edge.
/// Refuses disconnected graphs (cross-component resistance is infinite).
pub fn effective_resistances(g: &WeightedGraph) -> Result<ResistanceReport> {
    let components = g.connected_components().community_count();
    if components != 1 {
        return Err(Error::Precondition(format!(
            "effective resistance requires a connected graph; input has {components} components"
        )));
    }
    let pinv = pseudoinverse(&build_laplacian(g))?;
    Ok(resistances_from_pinv(g, &pinv))
}

/// Resistance report given an already-computed pseudoinverse. Used by the
/// flow loop, which needs the pseudoinverse for curvature anyway.
pub(crate) fn resistances_from_pinv(g: &WeightedGraph, pinv: &DMatrix<f64>) -> ResistanceReport {
    let per_edge: Vec<f64> = g
        .edges()
        .iter()
        .map(|e| pinv[(e.u, e.u)] + pinv[(e.v, e.v)] - 2.0 * pinv[(e.u, e.v)])
        .collect();
    let foster_sum = g
        .edges()
        .iter()
        .zip(&per_edge)
        .map(|(e, r)| e.w * r)
        .sum();
    ResistanceReport { per_edge, foster_sum }
}

/// Resistance between an arbitrary node pair (not restricted to edges).
pub fn pair_resistance(pinv: &DMatrix<f64>, u: usize, v: usize) -> f64 {
    pinv[(u, u)] + pinv[(v, v)] - 2.0 * pinv[(u, v)]
}
