use std::collections::HashSet;

use super::GraphError;

/// One edge of a multigraph. Endpoints are stored with `u <= v`; a loop has
/// `u == v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: String,
    pub u: usize,
    pub v: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint opposite to `x`. For a loop this is `x` itself.
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// A finite connected undirected multigraph with loops, without lengths.
///
/// The edge set may be empty only when there is exactly one vertex (used for
/// the dual graph of a smooth curve).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

/// Result of contracting an edge set: the quotient graph and, for each of its
/// edges, the index of the edge it came from.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub graph: Multigraph,
    pub kept: Vec<usize>,
}

/// Result of suppressing 2-valent vertices: the new graph and, for each of
/// its edges, the chain of original edge indices that were merged into it.
#[derive(Debug, Clone)]
pub struct Suppression {
    pub graph: Multigraph,
    pub chains: Vec<Vec<usize>>,
}

impl Multigraph {
    /// Builds a multigraph from vertex ids and `(edge id, end, end)` triples.
    pub fn new(vertices: Vec<String>, edges: Vec<(String, usize, usize)>) -> Result<Self, GraphError> {
        let mut seen = HashSet::new();
        for v in &vertices {
            if !seen.insert(v.as_str()) {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (id, a, b) in edges {
            if a >= vertices.len() || b >= vertices.len() {
                return Err(GraphError::UnknownVertex(format!("index {}", a.max(b))));
            }
            if !seen.insert(id.clone()) {
                return Err(GraphError::DuplicateEdge(id));
            }
            out.push(Edge { id, u: a.min(b), v: a.max(b) });
        }
        let g = Self { vertices, edges: out };
        if g.vertices.is_empty() {
            return Err(GraphError::NoVertices);
        }
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    /// Builds a multigraph on vertices `v0, v1, ...` with edges `e0, e1, ...`.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let vertices = (0..n).map(|i| format!("v{i}")).collect();
        let edges = pairs.iter().enumerate().map(|(i, &(a, b))| (format!("e{i}"), a, b)).collect();
        Self::new(vertices, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Degrees, with a loop contributing 2 to its vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    pub fn loop_counts(&self) -> Vec<usize> {
        let mut loops = vec![0; self.vertices.len()];
        for e in self.edges.iter().filter(|e| e.is_loop()) {
            loops[e.u] += 1;
        }
        loops
    }

    /// Number of 1-valent vertices.
    pub fn v1(&self) -> usize {
        self.degrees().iter().filter(|&&d| d == 1).count()
    }

    /// First Betti number `|E| - |V| + 1`.
    pub fn b1(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    /// Symmetric matrix of edge multiplicities; the diagonal counts loops.
    pub fn multiplicities(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut m = vec![vec![0; n]; n];
        for e in &self.edges {
            m[e.u][e.v] += 1;
            if e.u != e.v {
                m[e.v][e.u] += 1;
            }
        }
        m
    }

    /// Edge indices incident to each vertex (a loop appears once).
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.u].push(i);
            if e.v != e.u {
                inc[e.v].push(i);
            }
        }
        inc
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return false;
        }
        let inc = self.incidence();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &e in &inc[x] {
                let y = self.edges[e].other(x);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Contracts every edge in `set`: endpoints of non-loop edges are
    /// identified and edges that are (or become) loops are deleted. Returns
    /// `None` when no edge survives.
    pub fn contract(&self, set: &[bool]) -> Option<Contraction> {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (i, e) in self.edges.iter().enumerate() {
            if set.get(i).copied().unwrap_or(false) {
                let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
                if a != b {
                    // keep the smaller index as representative
                    let (lo, hi) = (a.min(b), a.max(b));
                    parent[hi] = lo;
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
        let mut new_index = vec![usize::MAX; n];
        let mut vertices = Vec::new();
        for x in 0..n {
            if roots[x] == x {
                new_index[x] = vertices.len();
                vertices.push(self.vertices[x].clone());
            }
        }
        let mut edges = Vec::new();
        let mut kept = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if set.get(i).copied().unwrap_or(false) {
                continue;
            }
            let a = new_index[roots[e.u]];
            let b = new_index[roots[e.v]];
            edges.push(Edge { id: e.id.clone(), u: a.min(b), v: a.max(b) });
            kept.push(i);
        }
        if edges.is_empty() {
            return None;
        }
        Some(Contraction { graph: Self { vertices, edges }, kept })
    }

    /// Removes every 2-valent vertex by merging its two incident edges. A pure
    /// cycle ends as a single vertex carrying one loop.
    pub fn suppress(&self) -> Suppression {
        let mut alive = vec![true; self.vertices.len()];
        let mut edges: Vec<Option<Edge>> = self.edges.iter().cloned().map(Some).collect();
        let mut chains: Vec<Vec<usize>> = (0..self.edges.len()).map(|i| vec![i]).collect();
        loop {
            let mut deg = vec![0usize; self.vertices.len()];
            let mut inc: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
            for (i, e) in edges.iter().enumerate() {
                if let Some(e) = e {
                    deg[e.u] += 1;
                    deg[e.v] += 1;
                    inc[e.u].push(i);
                    if e.v != e.u {
                        inc[e.v].push(i);
                    }
                }
            }
            let target = (0..self.vertices.len()).find(|&w| alive[w] && deg[w] == 2 && inc[w].len() == 2);
            let Some(w) = target else { break };
            let (i1, i2) = (inc[w][0].min(inc[w][1]), inc[w][0].max(inc[w][1]));
            let e1 = edges[i1].take().expect("live edge");
            let e2 = edges[i2].take().expect("live edge");
            let a = e1.other(w);
            let b = e2.other(w);
            edges[i1] = Some(Edge { id: e1.id, u: a.min(b), v: a.max(b) });
            let tail = std::mem::take(&mut chains[i2]);
            chains[i1].extend(tail);
            alive[w] = false;
        }
        let mut new_index = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        for (x, &ok) in alive.iter().enumerate() {
            if ok {
                new_index[x] = vertices.len();
                vertices.push(self.vertices[x].clone());
            }
        }
        let mut out_edges = Vec::new();
        let mut out_chains = Vec::new();
        for (i, e) in edges.into_iter().enumerate() {
            if let Some(e) = e {
                let (a, b) = (new_index[e.u], new_index[e.v]);
                out_edges.push(Edge { id: e.id, u: a.min(b), v: a.max(b) });
                out_chains.push(std::mem::take(&mut chains[i]));
            }
        }
        Suppression { graph: Self { vertices, edges: out_edges }, chains: out_chains }
    }

    /// Same graph with vertices permuted: vertex `x` becomes `perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.vertices.len();
        let mut vertices = vec![String::new(); n];
        for x in 0..n {
            vertices[perm[x]] = self.vertices[x].clone();
        }
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (perm[e.u], perm[e.v]);
                Edge { id: e.id.clone(), u: a.min(b), v: a.max(b) }
            })
            .collect();
        Self { vertices, edges }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> Multigraph {
        Multigraph::from_pairs(2, &[(0, 1), (0, 1), (0, 1)]).unwrap()
    }

    #[test]
    fn rejects_disconnected() {
        assert!(matches!(Multigraph::from_pairs(3, &[(0, 1)]), Err(GraphError::Disconnected)));
    }

    #[test]
    fn contract_parallel_edges_deletes_the_new_loop() {
        let c = theta().contract(&[true, true, false]).unwrap();
        assert_eq!(c.graph.vertex_count(), 1);
        assert_eq!(c.graph.edge_count(), 1);
        assert_eq!(c.kept, vec![2]);
    }

    #[test]
    fn contract_everything_is_none() {
        assert!(theta().contract(&[true, true, true]).is_none());
    }

    #[test]
    fn suppress_cycle_gives_one_loop() {
        let sq = Multigraph::from_pairs(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let s = sq.suppress();
        assert_eq!(s.graph.vertex_count(), 1);
        assert_eq!(s.graph.edge_count(), 1);
        assert!(s.graph.edge(0).is_loop());
        let mut all: Vec<usize> = s.chains[0].clone();
        all.sort();
        assert_eq!(all, vec![0, 1, 2, 3]);
    }

    #[test]
    fn suppress_keeps_single_loop() {
        let c = Multigraph::from_pairs(1, &[(0, 0)]).unwrap();
        assert_eq!(c.suppress().graph, c);
    }
}
