//! Tropical Jacobians of metric graphs and the tropical Torelli map.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::lattice_torus::{FlatTorus, TorusError, TorusNormalization};
use crate::metric_graph::{GraphError, MetricGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JacobianError {
    #[error("graph is a tree: its Jacobian is a point and cannot be rescaled")]
    TreeInput,
    #[error("graph must have diameter 1, got {0}")]
    NotNormalized(f64),
    #[error("edge order must be a permutation of the edges")]
    BadEdgeOrder,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

/// Fundamental cycles as signed edge coefficient vectors. Edge `e` is
/// oriented from `edge.u` to `edge.v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleBasis {
    pub cycles: Vec<Vec<i64>>,
}

impl CycleBasis {
    pub fn rank(&self) -> usize {
        self.cycles.len()
    }
}

/// Diameter tolerance accepted by [`torelli`].
pub const DIAMETER_TOL: f64 = 1e-9;

/// Fundamental cycles of the spanning tree built greedily from the edges
/// sorted by id.
pub fn cycle_basis(g: &MetricGraph) -> Result<CycleBasis, JacobianError> {
    let graph = g.graph();
    let mut order: Vec<usize> = (0..graph.edge_count()).collect();
    order.sort_by(|&a, &b| graph.edge(a).id.cmp(&graph.edge(b).id));
    cycle_basis_with_order(g, &order)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Like [`cycle_basis`], with the tree grown greedily in the given edge
/// order.
pub fn cycle_basis_with_order(g: &MetricGraph, order: &[usize]) -> Result<CycleBasis, JacobianError> {
    let graph = g.graph();
    let (n, m) = (graph.vertex_count(), graph.edge_count());
    let mut seen = vec![false; m];
    if order.len() != m || order.iter().any(|&e| e >= m || std::mem::replace(&mut seen[e], true)) {
        return Err(JacobianError::BadEdgeOrder);
    }
    if graph.b1() == 0 {
        return Err(JacobianError::TreeInput);
    }
    let mut parent: Vec<usize> = (0..n).collect();
    let mut in_tree = vec![false; m];
    let mut extra = Vec::new();
    for &e in order {
        let edge = graph.edge(e);
        let (a, b) = (find(&mut parent, edge.u), find(&mut parent, edge.v));
        if a == b {
            extra.push(e);
        } else {
            parent[a] = b;
            in_tree[e] = true;
        }
    }
    // root the tree at vertex 0: parent edge and depth of every vertex
    let mut up: Vec<Option<usize>> = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut stack = vec![0];
    visited[0] = true;
    let incidence = graph.incidence();
    while let Some(x) = stack.pop() {
        for &e in &incidence[x] {
            if !in_tree[e] {
                continue;
            }
            let y = graph.edge(e).other(x);
            if !visited[y] {
                visited[y] = true;
                up[y] = Some(e);
                depth[y] = depth[x] + 1;
                stack.push(y);
            }
        }
    }
    let cycles = extra
        .into_iter()
        .map(|e| {
            let mut c = vec![0i64; m];
            let edge = graph.edge(e);
            c[e] = 1;
            // close the cycle with the tree path from edge.v back to edge.u
            let (mut a, mut b) = (edge.v, edge.u);
            let mut tail = Vec::new();
            while a != b {
                if depth[a] >= depth[b] {
                    let t = up[a].expect("non-root has a parent edge");
                    let te = graph.edge(t);
                    // walking a -> parent(a)
                    c[t] += if te.u == a { 1 } else { -1 };
                    a = te.other(a);
                } else {
                    let t = up[b].expect("non-root has a parent edge");
                    tail.push((t, b));
                    b = graph.edge(t).other(b);
                }
            }
            // the b-side path is walked from the meeting point down to edge.u
            for (t, child) in tail {
                let te = graph.edge(t);
                c[t] += if te.v == child { 1 } else { -1 };
            }
            c
        })
        .collect();
    Ok(CycleBasis { cycles })
}

/// Gram matrix `Σ_e α_e(c_a)·α_e(c_b)·l(e)` of a cycle basis.
pub fn period_matrix(g: &MetricGraph, basis: &CycleBasis) -> DMatrix<f64> {
    let k = basis.rank();
    DMatrix::from_fn(k, k, |a, b| {
        g.lengths().iter().enumerate().map(|(e, l)| (basis.cycles[a][e] * basis.cycles[b][e]) as f64 * l).sum()
    })
}

pub fn jacobian(g: &MetricGraph) -> Result<FlatTorus, JacobianError> {
    let basis = cycle_basis(g)?;
    Ok(FlatTorus::new(period_matrix(g, &basis))?)
}

/// Diameter-1 rescale of the Jacobian of a diameter-1 graph.
pub fn torelli(g: &MetricGraph) -> Result<FlatTorus, JacobianError> {
    let d = g.diameter();
    if (d - 1.0).abs() > DIAMETER_TOL {
        return Err(JacobianError::NotNormalized(d));
    }
    Ok(jacobian(g)?.rescale(TorusNormalization::Diameter)?)
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub first: MetricGraph,
    pub second: MetricGraph,
    pub image: FlatTorus,
}

/// Two non-isometric diameter-1 dumbbells with the same Torelli image.
pub fn noninjectivity_witness() -> Witness {
    let first = MetricGraph::dumbbell(0.8, 0.2, 0.8).expect("valid lengths");
    let second = MetricGraph::dumbbell(0.6, 0.4, 0.6).expect("valid lengths");
    let image = torelli(&first).expect("dumbbell has b1 = 2");
    Witness { first, second, image }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cycle_examples() {
        let c = cycle_basis(&MetricGraph::circle(3.0).unwrap()).unwrap();
        assert_eq!(c.cycles, vec![vec![1]]);
        let d = MetricGraph::dumbbell(1.0, 2.0, 3.0).unwrap();
        let c = cycle_basis(&d).unwrap();
        let bridge = d.lengths().iter().position(|&l| l == 2.0).unwrap();
        assert_eq!(c.rank(), 2);
        assert!(c.cycles.iter().all(|cy| cy[bridge] == 0));
        assert!(matches!(cycle_basis(&MetricGraph::segment(1.0).unwrap()), Err(JacobianError::TreeInput)));
    }

    #[test]
    fn cycles_are_closed() {
        let g =
            MetricGraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0), (0, 2, 1.0), (1, 3, 1.0)])
                .unwrap();
        let basis = cycle_basis(&g).unwrap();
        assert_eq!(basis.rank(), 3);
        for c in &basis.cycles {
            let mut boundary = [0i64; 4];
            for (e, &a) in c.iter().enumerate() {
                let edge = g.graph().edge(e);
                boundary[edge.v] += a;
                boundary[edge.u] -= a;
            }
            assert_eq!(boundary, [0; 4]);
        }
    }

    #[test]
    fn jacobian_examples() {
        let j = jacobian(&MetricGraph::circle(2.5).unwrap()).unwrap();
        assert_abs_diff_eq!(j.gram()[(0, 0)], 2.5);

        let j = jacobian(&MetricGraph::theta(1.0, 2.0, 3.0).unwrap()).unwrap();
        let want = FlatTorus::from_rows(&[vec![3.0, -2.0], vec![-2.0, 5.0]]).unwrap();
        assert!(j.isometric(&want, 1e-12).unwrap());

        let j = jacobian(&MetricGraph::dumbbell(1.0, 7.0, 2.0).unwrap()).unwrap();
        let want = FlatTorus::diagonal(&[1.0, 2.0]).unwrap();
        assert!(j.isometric(&want, 1e-12).unwrap());
    }

    #[test]
    fn torelli_examples() {
        let t = torelli(&MetricGraph::circle(2.0).unwrap()).unwrap();
        assert_abs_diff_eq!(t.gram()[(0, 0)], 4.0, epsilon = 1e-8);
        assert!(matches!(torelli(&MetricGraph::segment(1.0).unwrap()), Err(JacobianError::TreeInput)));
        assert!(matches!(torelli(&MetricGraph::circle(5.0).unwrap()), Err(JacobianError::NotNormalized(_))));
    }

    #[test]
    fn witness() {
        let w = noninjectivity_witness();
        assert!(!w.first.isomorphic(&w.second, true, 1e-9).unwrap());
        assert!(w.first.isomorphic(&w.second, false, 0.0).unwrap());
        let second = torelli(&w.second).unwrap();
        assert!(second.isometric(&w.image, 1e-7).unwrap());
        let want = FlatTorus::diagonal(&[2.0, 2.0]).unwrap();
        assert!(w.image.isometric(&want, 1e-7).unwrap());
    }
}
