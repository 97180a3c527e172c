//! Certified Gromov–Hausdorff intervals between metric graphs, flat tori and
//! the point, computed on finite nets.

mod lower;
mod net;
mod upper;

use serde::Serialize;
use thiserror::Error;

use crate::lattice_torus::{FlatTorus, TorusError};
use crate::metric_graph::{GraphError, MetricGraph, PointSpace};

pub use lower::gh_lower;
pub use net::{net_of_graph, net_of_torus, FiniteNet, NetJson};
pub use upper::gh_upper;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GhError {
    #[error("a net needs at least one point")]
    EmptyNet,
    #[error("invalid distance matrix: {0}")]
    BadDistances(&'static str),
    #[error("invalid parameter: {0}")]
    BadParameter(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

/// A compact metric space the GH routines can sample.
#[derive(Debug, Clone, PartialEq)]
pub enum Space {
    Graph(MetricGraph),
    Torus(FlatTorus),
    Point(PointSpace),
}

impl From<MetricGraph> for Space {
    fn from(g: MetricGraph) -> Self {
        Space::Graph(g)
    }
}

impl From<FlatTorus> for Space {
    fn from(t: FlatTorus) -> Self {
        Space::Torus(t)
    }
}

impl From<PointSpace> for Space {
    fn from(p: PointSpace) -> Self {
        Space::Point(p)
    }
}

impl Space {
    pub fn net(&self, spacing: f64) -> Result<FiniteNet, GhError> {
        match self {
            Space::Graph(g) => net_of_graph(g, spacing),
            Space::Torus(t) => net_of_torus(t, spacing),
            Space::Point(_) => Ok(FiniteNet::point()),
        }
    }
}

/// `lb ≤ d_GH ≤ ub`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GhInterval {
    pub lb: f64,
    pub ub: f64,
}

impl GhInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lb <= x && x <= self.ub
    }

    pub fn width(&self) -> f64 {
        self.ub - self.lb
    }
}

/// Bounds between two nets.
pub fn net_interval(a: &FiniteNet, b: &FiniteNet, budget: usize, seed: u64) -> GhInterval {
    let ub = gh_upper(a, b, budget, seed);
    let lb = gh_lower(a, b).min(ub);
    GhInterval { lb, ub }
}

pub fn gh_interval(a: &Space, b: &Space, spacing: f64, budget: usize, seed: u64) -> Result<GhInterval, GhError> {
    if budget == 0 {
        return Err(GhError::BadParameter("budget must be at least 1"));
    }
    let na = a.net(spacing)?;
    let nb = b.net(spacing)?;
    Ok(net_interval(&na, &nb, budget, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_examples() {
        let seg = Space::from(MetricGraph::segment(1.0).unwrap());
        let i = gh_interval(&Space::Point(PointSpace), &seg, 0.05, 1000, 0).unwrap();
        assert!(i.contains(0.5) && i.width() < 0.1);

        let circle_t = Space::from(FlatTorus::circle(2.0).unwrap());
        let circle_g = Space::from(MetricGraph::circle(2.0).unwrap());
        let i = gh_interval(&circle_t, &circle_g, 0.1, 1000, 0).unwrap();
        assert!(i.ub <= 0.2, "{i:?}");

        let theta = Space::from(MetricGraph::theta(1.0, 1.0, 1.0).unwrap());
        let dumbbell = Space::from(MetricGraph::dumbbell(0.5, 0.5, 0.5).unwrap());
        let i = gh_interval(&theta, &dumbbell, 0.02, 1000, 0).unwrap();
        assert!(i.lb > 0.0, "{i:?}");
    }
}
