//! Contractions of the boundary spaces: `phi` deforms every diameter-1
//! metric graph to the unit interval and `psi` every diameter-1 flat torus to
//! the circle of diameter 1. Also the stratum bookkeeping of the joins.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::graph_moduli::minimal_stratum;
use crate::lattice_torus::{FlatTorus, TorusError, TorusNormalization};
use crate::metric_graph::{GraphError, GraphNormalization, MetricGraph, Multigraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomotopyError {
    #[error("time parameter {0} is outside [0, 1]")]
    BadParameter(f64),
    #[error("input must have diameter 1, got {0}")]
    NotNormalized(f64),
    #[error("a star tree needs at least two positive legs")]
    BadStar,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

const DIAMETER_TOL: f64 = 1e-9;

fn check_time(t: f64) -> Result<(), HomotopyError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(HomotopyError::BadParameter(t));
    }
    Ok(())
}

/// A star: one center and `m ≥ 2` legs, lengths sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct StarTree {
    legs: Vec<f64>,
}

impl StarTree {
    pub fn new(mut legs: Vec<f64>) -> Result<Self, HomotopyError> {
        if legs.len() < 2 || legs.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(HomotopyError::BadStar);
        }
        legs.sort_by(f64::total_cmp);
        Ok(Self { legs })
    }

    pub fn legs(&self) -> &[f64] {
        &self.legs
    }

    /// Leg lengths scaled to total length 1.
    pub fn simplex_point(&self) -> Vec<f64> {
        let total: f64 = self.legs.iter().sum();
        self.legs.iter().map(|l| l / total).collect()
    }

    /// The point at parameter `s` on the segment from this star's simplex
    /// point to `(0, …, 0, 1/2, 1/2)`. Legs that reach zero are dropped.
    pub fn towards_interval(&self, s: f64) -> Self {
        let x = self.simplex_point();
        let m = x.len();
        let legs = x
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let target = if i + 2 >= m { 0.5 } else { 0.0 };
                (1.0 - s) * v + s * target
            })
            .filter(|&v| v > 0.0)
            .collect();
        Self { legs }
    }

    pub fn to_graph(&self) -> MetricGraph {
        let m = self.legs.len();
        let mut vertices = vec!["center".to_string()];
        vertices.extend((0..m).map(|i| format!("tip{i}")));
        let edges = (0..m).map(|i| (format!("leg{i}"), 0, i + 1)).collect();
        let graph = Multigraph::new(vertices, edges).expect("a star is a valid graph");
        MetricGraph::new(graph, self.legs.clone()).expect("legs are positive")
    }
}

fn normalized(g: &MetricGraph) -> Result<(), HomotopyError> {
    let d = g.diameter();
    if (d - 1.0).abs() > DIAMETER_TOL {
        return Err(HomotopyError::NotNormalized(d));
    }
    Ok(())
}

/// Old edges scaled by `old`, plus two leaves of length `leaf·l(e)` per edge
/// at its endpoints (both at the vertex for a loop).
fn with_leaves(g: &MetricGraph, old: f64, leaf: f64) -> MetricGraph {
    let graph = g.graph();
    let mut vertices = graph.vertex_ids().to_vec();
    let mut edges: Vec<(String, usize, usize)> = graph.edges().iter().map(|e| (e.id.clone(), e.u, e.v)).collect();
    let mut lengths: Vec<f64> = g.lengths().iter().map(|l| l * old).collect();
    for (i, e) in graph.edges().iter().enumerate() {
        for (end, at) in [("u", e.u), ("v", e.v)] {
            let tip = vertices.len();
            vertices.push(format!("tip:{}:{end}", e.id));
            edges.push((format!("leaf:{}:{end}", e.id), at, tip));
            lengths.push(leaf * g.length(i));
        }
    }
    let out = Multigraph::new(vertices, edges).expect("fresh ids");
    MetricGraph::new(out, lengths).expect("positive lengths")
}

/// The star left after contracting every old edge: two legs of length
/// `l(e)` per edge.
fn star_of(g: &MetricGraph) -> StarTree {
    let legs = g.lengths().iter().flat_map(|&l| [l, l]).collect();
    StarTree::new(legs).expect("a graph has at least one edge")
}

/// The contraction of `S_g` to the unit interval, at time `t`.
///
/// On `[0, 1/3]` leaves of length `3t·l(e)` grow at both ends of each edge;
/// on `[1/3, 2/3]` the old edges shrink by the factor `2 - 3t` and vanish at
/// `2/3`; on `[2/3, 1]` the resulting star moves linearly to the two-legged
/// star. Every stage is rescaled to diameter 1.
pub fn phi(g: &MetricGraph, t: f64) -> Result<MetricGraph, HomotopyError> {
    check_time(t)?;
    normalized(g)?;
    if t == 0.0 {
        return Ok(g.clone());
    }
    if t == 1.0 {
        return Ok(MetricGraph::segment(1.0)?);
    }
    let out = if t <= 1.0 / 3.0 {
        with_leaves(g, 1.0, 3.0 * t)
    } else if t < 2.0 / 3.0 {
        with_leaves(g, 2.0 - 3.0 * t, 1.0)
    } else {
        star_of(g).towards_interval(3.0 * t - 2.0).to_graph().suppress()
    };
    Ok(out.rescale(GraphNormalization::Diameter))
}

/// The contraction of `T_g` to the circle of diameter 1, at time `s`:
/// the diameter-1 rescale of `((1 - s)·T) × S¹` with the circle of length
/// `2πs`.
pub fn psi(t: &FlatTorus, s: f64) -> Result<FlatTorus, HomotopyError> {
    check_time(s)?;
    let d = t.diameter(DIAMETER_TOL)?;
    if (d.mid() - 1.0).abs() > 10.0 * DIAMETER_TOL {
        return Err(HomotopyError::NotNormalized(d.mid()));
    }
    if s == 0.0 {
        return Ok(t.clone());
    }
    if s == 1.0 {
        return Ok(FlatTorus::circle(2.0)?);
    }
    let n = t.dim();
    let mut g = DMatrix::zeros(n + 1, n + 1);
    g.view_mut((0, 0), (n, n)).copy_from(&(t.gram() * (1.0 - s).powi(2)));
    g[(n, n)] = (std::f64::consts::TAU * s).powi(2);
    Ok(FlatTorus::new(g)?.rescale(TorusNormalization::Diameter)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Curves,
    Av,
}

/// A boundary point of either join.
#[derive(Debug, Clone)]
pub enum BoundaryPoint {
    Graph(MetricGraph),
    Torus(FlatTorus),
}

/// Which join the point belongs to and the least `g` whose stratum holds it.
pub fn join_stratum(p: &BoundaryPoint) -> (Family, usize) {
    match p {
        BoundaryPoint::Graph(g) => (Family::Curves, minimal_stratum(g)),
        BoundaryPoint::Torus(t) => (Family::Av, t.dim()),
    }
}
