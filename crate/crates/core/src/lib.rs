//! Community detection on weighted graphs via Foster-Ricci curvature flow.
//!
//! The pipeline evolves edge weights under a discrete Ricci flow driven by
//! effective-resistance curvature, fits a two-component Gaussian mixture to the
//! resulting weight distribution, prunes the heavy component, and reads the
//! communities off the connected components once the graph disconnects.
//!
//! Modules follow the pipeline stages:
//! - [`graph`]: weighted undirected graphs and partitions
//! - [`resistance`]: Laplacian pseudoinverse and effective resistances
//! - [`flow`]: Foster-Ricci curvature and the normalized weight flow
//! - [`gmm`]: 1-D two-component EM fitting and Welch's t-test
//! - [`detector`]: the full prune-until-disconnected loop
//! - [`sbm`]: SBM instance generation, ARI scoring, spectral baseline, benchmarks
//! - [`cli`]: file formats and subcommand entry points
//!
//! The `parallel` feature (on by default) runs the per-edge and per-datum inner
//! loops on rayon; disabling it gives a fully sequential build with identical
//! results.

pub mod cli;
pub mod detector;
pub mod error;
pub mod flow;
pub mod gmm;
pub mod graph;
pub mod resistance;
pub mod sbm;

pub use error::{Error, Result};
pub use graph::{Partition, WeightedGraph};
