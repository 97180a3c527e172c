//! The cell structure of `S_g` and its cellular chain complex.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::homology::{permutation_sign, rank};
use super::CombinatorialType;
use crate::metric_graph::iso::{canonical_form, edge_map_for, find_isomorphism, vertex_automorphisms};
use crate::metric_graph::Multigraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "index")]
pub enum FaceTarget {
    /// The (-1)-dimensional empty cell; faces of one-edge graphs.
    Empty,
    Cell(usize),
}

/// A codimension-one face obtained by contracting edge `edge` (or deleting
/// it, for a loop) and suppressing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Face {
    pub target: FaceTarget,
    pub edge: usize,
    /// Incidence sign relative to the canonical edge orderings of both cells.
    pub sign: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    #[serde(rename = "type")]
    pub ty: CombinatorialType,
    pub dim: usize,
    pub faces: Vec<Face>,
    /// Order of the group of edge permutations induced by automorphisms.
    pub automorphism_order: usize,
    /// False when some automorphism reverses the orientation; such cells
    /// contribute nothing to rational homology.
    pub orientable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellComplex {
    pub genus: usize,
    pub cells: Vec<Cell>,
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Edge permutations induced by vertex automorphisms (pairing parallel
/// classes in index order), the product of parallel-class factorials, and
/// whether any automorphism acts oddly.
fn symmetry(g: &Multigraph) -> (usize, bool) {
    let m = g.multiplicities();
    let n = g.vertex_count();
    let mut parallel = 1usize;
    let mut has_parallel = false;
    for i in 0..n {
        for j in i..n {
            parallel *= factorial(m[i][j]);
            has_parallel |= m[i][j] >= 2;
        }
    }
    let mut perms = BTreeSet::new();
    let mut odd = has_parallel;
    for vm in vertex_automorphisms(g) {
        let em = edge_map_for(g, g, &vm, None);
        odd |= permutation_sign(&em) < 0;
        perms.insert(em);
    }
    (perms.len() * parallel, !odd)
}

fn face_of(g: &Multigraph, edge: usize, index: &HashMap<Vec<u32>, usize>, types: &[CombinatorialType]) -> Option<Face> {
    let mut set = vec![false; g.edge_count()];
    set[edge] = true;
    let Some(c) = g.contract(&set) else {
        return Some(Face { target: FaceTarget::Empty, edge, sign: 1 });
    };
    let s = c.graph.suppress();
    if s.graph.edge_count() + 1 != g.edge_count() {
        return None;
    }
    let code = canonical_form(&s.graph).code;
    let target = *index.get(&code).expect("faces stay inside the census");
    let iso = find_isomorphism(&s.graph, &types[target].graph, None).expect("same canonical code");
    let sign = if edge.is_multiple_of(2) { 1 } else { -1 } * permutation_sign(&iso.edge_map);
    Some(Face { target: FaceTarget::Cell(target), edge, sign })
}

impl CellComplex {
    pub fn build(genus: usize, types: Vec<CombinatorialType>) -> Self {
        let index: HashMap<Vec<u32>, usize> = types.iter().enumerate().map(|(i, t)| (t.code.clone(), i)).collect();
        let cells = types
            .par_iter()
            .map(|t| {
                let faces = (0..t.graph.edge_count()).filter_map(|e| face_of(&t.graph, e, &index, &types)).collect();
                let (automorphism_order, orientable) = symmetry(&t.graph);
                Cell { ty: t.clone(), dim: t.dim(), faces, automorphism_order, orientable }
            })
            .collect();
        Self { genus, cells }
    }

    pub fn max_dim(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    /// Orientable cells of dimension `k` (`k = -1` is the empty cell).
    fn generators(&self, k: isize) -> Vec<Option<usize>> {
        if k == -1 {
            return vec![None];
        }
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.orientable && c.dim as isize == k)
            .map(|(i, _)| Some(i))
            .collect()
    }

    /// Boundary matrix `C_k -> C_{k-1}` with rows indexed by `(k-1)`-cells.
    pub fn boundary_matrix(&self, k: isize) -> Vec<Vec<i64>> {
        let cols = self.generators(k);
        let rows = self.generators(k - 1);
        let row_of: HashMap<Option<usize>, usize> = rows.iter().enumerate().map(|(r, &c)| (c, r)).collect();
        let mut mat = vec![vec![0i64; cols.len()]; rows.len()];
        for (j, col) in cols.iter().enumerate() {
            let Some(ci) = col else { continue };
            for f in &self.cells[*ci].faces {
                let key = match f.target {
                    FaceTarget::Empty => None,
                    FaceTarget::Cell(t) => Some(t),
                };
                if let Some(&r) = row_of.get(&key) {
                    mat[r][j] += f.sign;
                }
            }
        }
        mat
    }

    /// Whether every composite `∂_{k-1} ∘ ∂_k` vanishes.
    pub fn boundary_squared_is_zero(&self) -> bool {
        (1..=self.max_dim() as isize).all(|k| {
            let a = self.boundary_matrix(k - 1);
            let b = self.boundary_matrix(k);
            let inner = b.len();
            a.iter().all(|row| {
                (0..b.first().map_or(0, Vec::len)).all(|j| (0..inner).map(|t| row[t] * b[t][j]).sum::<i64>() == 0)
            })
        })
    }

    /// Ranks of rational cellular homology `H_0..=H_max_degree`.
    pub fn betti(&self, max_degree: usize) -> Vec<usize> {
        let top = self.max_dim();
        let dims: Vec<usize> = (0..=max_degree.max(top)).map(|k| self.generators(k as isize).len()).collect();
        let ranks: Vec<usize> = (0..=max_degree.max(top) + 1)
            .map(|k| if k > top { 0 } else { rank(&self.boundary_matrix(k as isize)) })
            .collect();
        (0..=max_degree)
            .map(|k| {
                let reduced = dims[k] - ranks[k] - ranks[k + 1];
                if k == 0 {
                    reduced + 1
                } else {
                    reduced
                }
            })
            .collect()
    }
}
