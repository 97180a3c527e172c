//! Exhaustive enumeration of the combinatorial types in `S_g`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::CombinatorialType;
use crate::metric_graph::iso::canonical_form;
use crate::metric_graph::Multigraph;

/// Every connected multigraph on `n` vertices with vertex degrees in
/// `{1} ∪ {3, 4, ...}` and `v1 + b1 <= g`, one per isomorphism class, keyed by
/// canonical code.
///
/// Degree sequences are enumerated first (nonincreasing, so leaves come
/// last); for each one the multiplicity matrix is filled row by row with the
/// exact row sums, which prunes almost every dead branch.
fn types_on(n: usize, g: usize, out: &mut BTreeMap<Vec<u32>, Multigraph>) {
    let mut seq = Vec::with_capacity(n);
    degree_sequences(n, g, &mut seq, &mut |deg| graphs_with_degrees(deg, g, out));
}

/// Nonincreasing sequences of length `n` with entries in `{1} ∪ {3, 4, ...}`,
/// even sum, and `v1 + b1 <= g`, `b1 >= 0`.
fn degree_sequences(n: usize, g: usize, seq: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if seq.len() == n {
        let sum: usize = seq.iter().sum();
        if !sum.is_multiple_of(2) {
            return;
        }
        let e = sum / 2;
        let v1 = seq.iter().filter(|&&d| d == 1).count();
        if e + 1 >= n && v1 + e + 1 - n <= g {
            visit(seq);
        }
        return;
    }
    // every remaining vertex has degree at least 1; E <= n - 1 + g
    let sum: usize = seq.iter().sum();
    let remaining = n - seq.len();
    let budget = 2 * (n - 1 + g);
    let top = seq.last().copied().unwrap_or(usize::MAX);
    let mut d = 1;
    while d <= top && sum + d + (remaining - 1) <= budget {
        if d != 2 {
            seq.push(d);
            degree_sequences(n, g, seq, visit);
            seq.pop();
        }
        d += 1;
    }
}

fn graphs_with_degrees(deg: &[usize], g: usize, out: &mut BTreeMap<Vec<u32>, Multigraph>) {
    struct State<'a> {
        deg: &'a [usize],
        left: Vec<usize>,
        mult: Vec<Vec<usize>>,
        edges: Vec<(usize, usize)>,
        g: usize,
    }

    fn row(i: usize, st: &mut State<'_>, out: &mut BTreeMap<Vec<u32>, Multigraph>) {
        let n = st.left.len();
        if i == n {
            finish(n, &st.edges, st.g, out);
            return;
        }
        let need = st.left[i];
        for l in (0..=need / 2).rev() {
            let rest = need - 2 * l;
            for _ in 0..l {
                st.edges.push((i, i));
            }
            st.left[i] = 0;
            spread(i, i + 1, rest, st, out);
            st.left[i] = need;
            st.edges.truncate(st.edges.len() - l);
        }
    }

    /// Distributes `rest` edge ends of vertex `i` over vertices `j..`.
    fn spread(i: usize, j: usize, rest: usize, st: &mut State<'_>, out: &mut BTreeMap<Vec<u32>, Multigraph>) {
        let n = st.left.len();
        if rest == 0 {
            row(i + 1, st, out);
            return;
        }
        if j == n {
            return;
        }
        let capacity: usize = st.left[j..].iter().sum();
        if capacity < rest {
            return;
        }
        let mut cap = rest.min(st.left[j]);
        // Columns j-1 and j agree on every earlier row, so swapping the two
        // labels is a symmetry of the partial fill; keep the larger first.
        // (The lexicographically largest labeling always passes this test.)
        if j > i + 1 && st.deg[j] == st.deg[j - 1] && (0..i).all(|r| st.mult[r][j] == st.mult[r][j - 1]) {
            cap = cap.min(st.mult[i][j - 1]);
        }
        for m in (0..=cap).rev() {
            st.mult[i][j] = m;
            st.left[j] -= m;
            for _ in 0..m {
                st.edges.push((i, j));
            }
            spread(i, j + 1, rest - m, st, out);
            st.edges.truncate(st.edges.len() - m);
            st.left[j] += m;
        }
        st.mult[i][j] = 0;
    }

    fn finish(n: usize, edges: &[(usize, usize)], g: usize, out: &mut BTreeMap<Vec<u32>, Multigraph>) {
        if edges.is_empty() {
            return;
        }
        let Ok(graph) = Multigraph::from_pairs(n, edges) else {
            return;
        };
        if graph.v1() + graph.b1() > g {
            return;
        }
        let cf = canonical_form(&graph);
        if out.contains_key(&cf.code) {
            return;
        }
        let inverse = invert(&cf.order);
        out.insert(cf.code, canonical_graph(&graph, &inverse));
    }

    let mult = vec![vec![0; deg.len()]; deg.len()];
    let mut st = State { deg, left: deg.to_vec(), mult, edges: Vec::new(), g };
    row(0, &mut st, out);
}

pub(crate) fn invert(order: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; order.len()];
    for (k, &v) in order.iter().enumerate() {
        inv[v] = k;
    }
    inv
}

/// Relabels `g` by `perm` and renames vertices `v0..`, edges `e0..` in sorted
/// endpoint order.
pub(crate) fn canonical_graph(g: &Multigraph, perm: &[usize]) -> Multigraph {
    let mut pairs: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (perm[e.u], perm[e.v]);
            (a.min(b), a.max(b))
        })
        .collect();
    pairs.sort_unstable();
    Multigraph::from_pairs(g.vertex_count(), &pairs).expect("relabeling preserves validity")
}

/// All combinatorial types with `v1 + b1 <= g`, sorted by edge count, vertex
/// count, then canonical code.
pub(crate) fn enumerate(g: usize) -> Vec<CombinatorialType> {
    let max_vertices = (2 * g).saturating_sub(2);
    let found: Vec<BTreeMap<Vec<u32>, Multigraph>> = (1..=max_vertices)
        .into_par_iter()
        .map(|n| {
            let mut out = BTreeMap::new();
            types_on(n, g, &mut out);
            out
        })
        .collect();
    let mut all: Vec<(Vec<u32>, Multigraph)> = found.into_iter().flatten().collect();
    if g >= 1 {
        let circle = Multigraph::from_pairs(1, &[(0, 0)]).expect("circle");
        all.push((canonical_form(&circle).code, circle));
    }
    let mut types: Vec<CombinatorialType> =
        all.into_iter().map(|(code, graph)| CombinatorialType::from_canonical(graph, code)).collect();
    types.sort_by(|a, b| (a.edge_count(), a.vertex_count(), &a.code).cmp(&(b.edge_count(), b.vertex_count(), &b.code)));
    types
}
