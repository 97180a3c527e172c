//! Metrized finite graphs and exact metric computations on their geometric
//! realizations.

mod io;
pub mod iso;
mod multigraph;

use thiserror::Error;

use crate::config::ISO_MAX_EDGES;

pub use io::{GraphJson, GraphJsonEdge};
pub use iso::{CanonicalForm, GraphIsomorphism, LengthMatch};
pub use multigraph::{Contraction, Edge, Multigraph, Suppression};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("graph has no vertices")]
    NoVertices,
    #[error("metric graph needs at least one edge")]
    NoEdges,
    #[error("graph is not connected")]
    Disconnected,
    #[error("edge `{edge}` has invalid length {length}")]
    BadLength { edge: String, length: f64 },
    #[error("expected {expected} lengths, got {got}")]
    LengthCount { expected: usize, got: usize },
    #[error("contraction would remove every edge")]
    ContractAll,
    #[error("graph has {edges} edges, more than the supported {max}")]
    TooLarge { edges: usize, max: usize },
    #[error("invalid graph JSON: {0}")]
    Json(String),
}

/// The one-point metric space. Kept distinct from [`MetricGraph`], which
/// always has at least one edge of positive length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PointSpace;

/// Outcome of a contraction that is allowed to collapse to a point.
#[derive(Debug, Clone, PartialEq)]
pub enum Contracted {
    Graph(MetricGraph),
    Point(PointSpace),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub v1: usize,
    pub b1: usize,
    pub total_length: f64,
    pub diameter: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphNormalization {
    Diameter,
    TotalLength,
}

/// A point on the realization: edge index and distance from the edge's `u`
/// end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePoint {
    pub edge: usize,
    pub s: f64,
}

/// Connected multigraph with positive finite edge lengths and at least one
/// edge.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    graph: Multigraph,
    lengths: Vec<f64>,
}

impl MetricGraph {
    pub fn new(graph: Multigraph, lengths: Vec<f64>) -> Result<Self, GraphError> {
        if graph.edge_count() == 0 {
            return Err(GraphError::NoEdges);
        }
        if lengths.len() != graph.edge_count() {
            return Err(GraphError::LengthCount { expected: graph.edge_count(), got: lengths.len() });
        }
        for (e, &l) in graph.edges().iter().zip(&lengths) {
            if !(l.is_finite() && l > 0.0) {
                return Err(GraphError::BadLength { edge: e.id.clone(), length: l });
            }
        }
        Ok(Self { graph, lengths })
    }

    /// Graph on vertices `v0..` with edges `e0..` given as `(a, b, length)`.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let pairs: Vec<(usize, usize)> = edges.iter().map(|&(a, b, _)| (a, b)).collect();
        let graph = Multigraph::from_pairs(n, &pairs)?;
        Self::new(graph, edges.iter().map(|e| e.2).collect())
    }

    pub fn segment(l: f64) -> Result<Self, GraphError> {
        Self::from_edges(2, &[(0, 1, l)])
    }

    /// One vertex carrying one loop of the given circumference.
    pub fn circle(l: f64) -> Result<Self, GraphError> {
        Self::from_edges(1, &[(0, 0, l)])
    }

    pub fn theta(l1: f64, l2: f64, l3: f64) -> Result<Self, GraphError> {
        Self::from_edges(2, &[(0, 1, l1), (0, 1, l2), (0, 1, l3)])
    }

    pub fn figure_eight(l1: f64, l2: f64) -> Result<Self, GraphError> {
        Self::from_edges(1, &[(0, 0, l1), (0, 0, l2)])
    }

    /// Two loops joined by a bridge; edges are `loop1, bridge, loop2`.
    pub fn dumbbell(loop1: f64, bridge: f64, loop2: f64) -> Result<Self, GraphError> {
        Self::from_edges(2, &[(0, 0, loop1), (0, 1, bridge), (1, 1, loop2)])
    }

    /// A loop with a pendant edge; edges are `loop, stick`.
    pub fn lollipop(loop_len: f64, stick: f64) -> Result<Self, GraphError> {
        Self::from_edges(2, &[(0, 0, loop_len), (0, 1, stick)])
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn length(&self, e: usize) -> f64 {
        self.lengths[e]
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            v1: self.graph.v1(),
            b1: self.graph.b1(),
            total_length: self.total_length(),
            diameter: self.diameter(),
        }
    }

    /// All-pairs shortest distances between vertices (Floyd–Warshall).
    pub fn vertex_distances(&self) -> Vec<Vec<f64>> {
        let n = self.graph.vertex_count();
        let mut d = vec![vec![f64::INFINITY; n]; n];
        for (x, row) in d.iter_mut().enumerate() {
            row[x] = 0.0;
        }
        for (e, &l) in self.graph.edges().iter().zip(&self.lengths) {
            if l < d[e.u][e.v] {
                d[e.u][e.v] = l;
                d[e.v][e.u] = l;
            }
        }
        for k in 0..n {
            for i in 0..n {
                let dik = d[i][k];
                if !dik.is_finite() {
                    continue;
                }
                for j in 0..n {
                    let c = dik + d[k][j];
                    if c < d[i][j] {
                        d[i][j] = c;
                    }
                }
            }
        }
        d
    }

    /// Distance between two points of the realization, given the vertex
    /// distance table.
    pub fn point_distance(&self, dist: &[Vec<f64>], p: EdgePoint, q: EdgePoint) -> f64 {
        let ep = self.graph.edge(p.edge);
        let eq = self.graph.edge(q.edge);
        let (lp, lq) = (self.lengths[p.edge], self.lengths[q.edge]);
        let from_p = [(ep.u, p.s), (ep.v, lp - p.s)];
        let from_q = [(eq.u, q.s), (eq.v, lq - q.s)];
        let mut best = if p.edge == q.edge { (p.s - q.s).abs() } else { f64::INFINITY };
        for &(a, da) in &from_p {
            for &(b, db) in &from_q {
                best = best.min(da + dist[a][b] + db);
            }
        }
        best
    }

    /// Exact diameter of the geometric realization.
    ///
    /// For two distinct edges, the farthest point of the second edge from a
    /// point at offset `s` on the first lies at distance `(A(s) + B(s) + L2)/2`
    /// where `A`, `B` are the distances to its endpoints. That function is
    /// concave and piecewise linear in `s`, so it is maximized at an endpoint
    /// or at one of the two breakpoints of `A` and `B`.
    pub fn diameter(&self) -> f64 {
        let d = self.vertex_distances();
        let edges = self.graph.edges();
        let mut best: f64 = 0.0;
        for (i, e1) in edges.iter().enumerate() {
            let l1 = self.lengths[i];
            best = best.max(if e1.is_loop() { l1 / 2.0 } else { (l1 + d[e1.u][e1.v]) / 2.0 });
            for (j, e2) in edges.iter().enumerate() {
                if i == j {
                    continue;
                }
                let l2 = self.lengths[j];
                let to = |x: usize, s: f64| (s + d[e1.u][x]).min(l1 - s + d[e1.v][x]);
                let f = |s: f64| (to(e2.u, s) + to(e2.v, s) + l2) / 2.0;
                let sa = (l1 + d[e1.v][e2.u] - d[e1.u][e2.u]) / 2.0;
                let sb = (l1 + d[e1.v][e2.v] - d[e1.u][e2.v]) / 2.0;
                for s in [0.0, l1, sa.clamp(0.0, l1), sb.clamp(0.0, l1)] {
                    best = best.max(f(s));
                }
            }
        }
        best
    }

    /// Contracts the given edges (by index). Fails with `ContractAll` when
    /// nothing would remain.
    pub fn contract(&self, edges: &[usize]) -> Result<Self, GraphError> {
        match self.contract_or_point(edges)? {
            Contracted::Graph(g) => Ok(g),
            Contracted::Point(_) => Err(GraphError::ContractAll),
        }
    }

    /// Like [`contract`](Self::contract) but returns the point space when
    /// every edge is contracted.
    pub fn contract_or_point(&self, edges: &[usize]) -> Result<Contracted, GraphError> {
        let mut set = vec![false; self.graph.edge_count()];
        for &e in edges {
            if e >= set.len() {
                return Err(GraphError::UnknownEdge(format!("index {e}")));
            }
            set[e] = true;
        }
        Ok(match self.graph.contract(&set) {
            None => Contracted::Point(PointSpace),
            Some(c) => {
                let lengths = c.kept.iter().map(|&i| self.lengths[i]).collect();
                Contracted::Graph(Self { graph: c.graph, lengths })
            }
        })
    }

    /// Contracts edges given by id.
    pub fn contract_ids(&self, ids: &[&str]) -> Result<Self, GraphError> {
        let idx = ids
            .iter()
            .map(|id| self.graph.edge_index(id).ok_or_else(|| GraphError::UnknownEdge(id.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        self.contract(&idx)
    }

    /// Removes 2-valent vertices, summing the lengths of merged edges.
    pub fn suppress(&self) -> Self {
        self.suppress_with_chains().0
    }

    /// Suppression together with the chain of original edges behind each new
    /// edge.
    pub fn suppress_with_chains(&self) -> (Self, Vec<Vec<usize>>) {
        let Suppression { graph, chains } = self.graph.suppress();
        let lengths = chains.iter().map(|c| c.iter().map(|&i| self.lengths[i]).sum()).collect();
        (Self { graph, lengths }, chains)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { graph: self.graph.clone(), lengths: self.lengths.iter().map(|l| l * factor).collect() }
    }

    pub fn rescale(&self, mode: GraphNormalization) -> Self {
        let current = match mode {
            GraphNormalization::Diameter => self.diameter(),
            GraphNormalization::TotalLength => self.total_length(),
        };
        self.scaled(1.0 / current)
    }

    pub fn with_lengths(&self, lengths: Vec<f64>) -> Result<Self, GraphError> {
        Self::new(self.graph.clone(), lengths)
    }

    /// Graph isomorphism test, optionally matching edge lengths within `tol`.
    pub fn isomorphic(&self, other: &Self, respect_lengths: bool, tol: f64) -> Result<bool, GraphError> {
        Ok(self.find_isomorphism(other, respect_lengths, tol)?.is_some())
    }

    pub fn find_isomorphism(
        &self,
        other: &Self,
        respect_lengths: bool,
        tol: f64,
    ) -> Result<Option<GraphIsomorphism>, GraphError> {
        for g in [self, other] {
            if g.graph.edge_count() > ISO_MAX_EDGES {
                return Err(GraphError::TooLarge { edges: g.graph.edge_count(), max: ISO_MAX_EDGES });
            }
        }
        let lengths = respect_lengths.then_some(LengthMatch { a: &self.lengths, b: &other.lengths, tol });
        Ok(iso::find_isomorphism(&self.graph, &other.graph, lengths))
    }
}
