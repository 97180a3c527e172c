//! Tropical and Gromov–Hausdorff boundary geometry of moduli of curves and
//! principally polarized abelian varieties.
//!
//! The crate is organized bottom-up:
//!
//! - [`metric_graph`]: metrized multigraphs, exact diameters, contraction,
//!   suppression of 2-valent vertices, isomorphism.
//! - [`graph_moduli`]: the cell structure of the boundary spaces `S_g`, their
//!   cellular rational homology, and the open-stratum perturbation.
//! - [`curve_collapse`]: collapse limits of degenerating curves on a
//!   pinching-rate model.
//! - [`lattice_torus`]: flat tori `R^n / Z^n` given by Gram matrices.
//! - [`siegel_av`]: period points, Siegel sets, reduction, and the collapse
//!   limits of degenerating abelian varieties.
//! - [`tropical_jacobian`]: tropical Jacobians and the tropical Torelli map.
//! - [`gh_metric`]: certified Gromov–Hausdorff distance intervals.
//! - [`homotopy_joins`]: the contracting homotopies and stratum bookkeeping.

// Negated float comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod curve_collapse;
pub mod gh_metric;
pub mod graph_moduli;
pub mod homotopy_joins;
pub mod lattice_torus;
pub mod metric_graph;
pub mod siegel_av;
pub mod tropical_jacobian;

pub use gh_metric::{GhInterval, Space};
pub use lattice_torus::FlatTorus;
pub use metric_graph::{MetricGraph, Multigraph, PointSpace};
