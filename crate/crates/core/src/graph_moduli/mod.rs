//! Combinatorial cell structure of the spaces `S_g` of diameter-one metric
//! graphs with `v1 + b1 <= g`, their rational cellular homology, and the
//! inclusions `S_g ⊂ S_{g+1}`.

mod census;
mod complex;
pub mod homology;

use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::config::CENSUS_MAX_GENUS;
use crate::metric_graph::iso::canonical_form;
use crate::metric_graph::{GraphError, GraphNormalization, MetricGraph, Multigraph};

pub use complex::{Cell, CellComplex, Face, FaceTarget};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModuliError {
    #[error("genus must be at least 1")]
    ZeroGenus,
    #[error("genus {genus} exceeds the supported bound {max}")]
    TooLarge { genus: usize, max: usize },
    #[error("genus {genus} is below v1 + b1 = {needed}")]
    BadGenus { genus: usize, needed: usize },
    #[error("epsilon must be positive and finite, got {0}")]
    BadEpsilon(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// An isomorphism class of multigraphs, stored as a canonical representative
/// with vertices `v0..` and edges `e0..` sorted by endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CombinatorialType {
    pub name: String,
    #[serde(serialize_with = "serialize_graph")]
    pub graph: Multigraph,
    pub v1: usize,
    pub b1: usize,
    #[serde(skip)]
    pub code: Vec<u32>,
}

fn serialize_graph<S: serde::Serializer>(g: &Multigraph, s: S) -> Result<S::Ok, S::Error> {
    crate::metric_graph::GraphJson::from_multigraph(g, None).serialize(s)
}

fn named_codes() -> &'static [(Vec<u32>, &'static str)] {
    static NAMES: OnceLock<Vec<(Vec<u32>, &'static str)>> = OnceLock::new();
    NAMES.get_or_init(|| {
        #[allow(clippy::type_complexity)]
        let table: [(&str, usize, &[(usize, usize)]); 7] = [
            ("circle", 1, &[(0, 0)]),
            ("segment", 2, &[(0, 1)]),
            ("lollipop", 2, &[(0, 0), (0, 1)]),
            ("figure-eight", 1, &[(0, 0), (0, 0)]),
            ("theta", 2, &[(0, 1), (0, 1), (0, 1)]),
            ("dumbbell", 2, &[(0, 0), (0, 1), (1, 1)]),
            ("tripod", 4, &[(0, 1), (0, 2), (0, 3)]),
        ];
        table
            .iter()
            .map(|&(name, n, pairs)| {
                let g = Multigraph::from_pairs(n, pairs).expect("valid named graph");
                (canonical_form(&g).code, name)
            })
            .collect()
    })
}

impl CombinatorialType {
    pub(crate) fn from_canonical(graph: Multigraph, code: Vec<u32>) -> Self {
        let name = match named_codes().iter().find(|(c, _)| *c == code) {
            Some((_, n)) => n.to_string(),
            None => generic_name(&graph, &code),
        };
        Self { v1: graph.v1(), b1: graph.b1(), name, graph, code }
    }

    /// The type of an arbitrary multigraph (after suppressing 2-valent
    /// vertices).
    pub fn of(graph: &Multigraph) -> Self {
        let s = graph.suppress().graph;
        let cf = canonical_form(&s);
        let perm = census::invert(&cf.order);
        Self::from_canonical(census::canonical_graph(&s, &perm), cf.code)
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Cell dimension under the total-length-one normalization.
    pub fn dim(&self) -> usize {
        self.graph.edge_count() - 1
    }

    pub fn is_tree(&self) -> bool {
        self.b1 == 0
    }

    /// Whether the type lies in the open stratum of `S_g`.
    pub fn is_open_in(&self, genus: usize) -> bool {
        self.v1 + self.b1 == genus
    }
}

fn generic_name(g: &Multigraph, code: &[u32]) -> String {
    let body: Vec<String> = code[1..].iter().map(u32::to_string).collect();
    format!("V{}E{}:{}", g.vertex_count(), g.edge_count(), body.join(","))
}

fn check_genus(g: usize) -> Result<(), ModuliError> {
    if g == 0 {
        return Err(ModuliError::ZeroGenus);
    }
    if g > CENSUS_MAX_GENUS {
        return Err(ModuliError::TooLarge { genus: g, max: CENSUS_MAX_GENUS });
    }
    Ok(())
}

/// All combinatorial types of `S_g`.
pub fn census(g: usize) -> Result<Vec<CombinatorialType>, ModuliError> {
    check_genus(g)?;
    Ok(census::enumerate(g))
}

pub fn cell_complex(g: usize) -> Result<CellComplex, ModuliError> {
    Ok(CellComplex::build(g, census(g)?))
}

/// Unreduced rational cellular Betti numbers `H_0..=H_max_degree` of `S_g`.
pub fn rational_betti(g: usize, max_degree: usize) -> Result<Vec<usize>, ModuliError> {
    Ok(cell_complex(g)?.betti(max_degree))
}

/// The least `g` with the graph's class in `S_g`.
pub fn minimal_stratum(g: &MetricGraph) -> usize {
    let s = g.suppress();
    s.graph().v1() + s.graph().b1()
}

fn fresh_id(taken: &mut Vec<String>, stem: &str) -> String {
    let mut k = 0;
    loop {
        let id = format!("{stem}{k}");
        if !taken.contains(&id) {
            taken.push(id.clone());
            return id;
        }
        k += 1;
    }
}

/// Moves a graph into the open stratum of `S_genus`: a loop of length
/// `eps * l(vw)` at every leaf `v` and a bouquet of `genus - v1 - b1` loops of
/// length `eps` at the first vertex, then rescaled to diameter 1.
pub fn perturb_into_open_stratum(g: &MetricGraph, genus: usize, eps: f64) -> Result<MetricGraph, ModuliError> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(ModuliError::BadEpsilon(eps));
    }
    let graph = g.graph();
    let needed = graph.v1() + graph.b1();
    if genus < needed {
        return Err(ModuliError::BadGenus { genus, needed });
    }
    let vertices = graph.vertex_ids().to_vec();
    let mut taken: Vec<String> = graph.edges().iter().map(|e| e.id.clone()).collect();
    let mut edges: Vec<(String, usize, usize)> = graph.edges().iter().map(|e| (e.id.clone(), e.u, e.v)).collect();
    let mut lengths = g.lengths().to_vec();
    let deg = graph.degrees();
    let inc = graph.incidence();
    for (v, &d) in deg.iter().enumerate() {
        if d == 1 {
            let e = inc[v][0];
            edges.push((fresh_id(&mut taken, "leaf-loop-"), v, v));
            lengths.push(eps * g.length(e));
        }
    }
    for _ in 0..genus - needed {
        edges.push((fresh_id(&mut taken, "bouquet-"), 0, 0));
        lengths.push(eps);
    }
    let out = MetricGraph::new(Multigraph::new(vertices, edges)?, lengths)?;
    Ok(out.rescale(GraphNormalization::Diameter))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(g: usize) -> Vec<String> {
        census(g).unwrap().into_iter().map(|t| t.name).collect()
    }

    #[test]
    fn small_censuses() {
        assert_eq!(names(1), vec!["circle"]);
        let mut two = names(2);
        two.sort();
        assert_eq!(two, vec!["circle", "dumbbell", "figure-eight", "lollipop", "segment", "theta"]);
    }

    #[test]
    fn genus_two_faces() {
        let cx = cell_complex(2).unwrap();
        let find = |n: &str| cx.cells.iter().position(|c| c.ty.name == n).unwrap();
        let fig8 = find("figure-eight");
        let lolli = find("lollipop");
        let theta = &cx.cells[find("theta")];
        assert_eq!(theta.faces.len(), 3);
        assert!(theta.faces.iter().all(|f| f.target == FaceTarget::Cell(fig8)));
        let mut db: Vec<FaceTarget> = cx.cells[find("dumbbell")].faces.iter().map(|f| f.target).collect();
        db.sort_by_key(|t| format!("{t:?}"));
        let mut want = vec![FaceTarget::Cell(fig8), FaceTarget::Cell(lolli), FaceTarget::Cell(lolli)];
        want.sort_by_key(|t| format!("{t:?}"));
        assert_eq!(db, want);
    }

    #[test]
    fn betti_low_genus() {
        assert_eq!(rational_betti(1, 0).unwrap(), vec![1]);
        assert_eq!(rational_betti(2, 2).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn minimal_strata() {
        assert_eq!(minimal_stratum(&MetricGraph::circle(1.0).unwrap()), 1);
        assert_eq!(minimal_stratum(&MetricGraph::dumbbell(1.0, 1.0, 1.0).unwrap()), 2);
        let tripod = MetricGraph::from_edges(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        assert_eq!(minimal_stratum(&tripod), 3);
    }

    #[test]
    fn perturbation() {
        let seg = MetricGraph::segment(1.0).unwrap();
        let p = perturb_into_open_stratum(&seg, 2, 0.1).unwrap();
        assert_eq!((p.graph().v1(), p.graph().b1()), (0, 2));
        assert!((p.diameter() - 1.0).abs() < 1e-12);
        let theta = MetricGraph::theta(1.0, 1.0, 1.0).unwrap();
        let q = perturb_into_open_stratum(&theta, 2, 0.3).unwrap();
        assert!(q.isomorphic(&theta, true, 1e-12).unwrap());
        assert!(matches!(
            perturb_into_open_stratum(&theta, 1, 0.1),
            Err(ModuliError::BadGenus { genus: 1, needed: 2 })
        ));
    }

    #[test]
    fn rejects_out_of_range_genus() {
        assert_eq!(census(0), Err(ModuliError::ZeroGenus));
        assert!(matches!(census(CENSUS_MAX_GENUS + 1), Err(ModuliError::TooLarge { .. })));
    }
}
