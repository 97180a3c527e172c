//! Isomorphism search and canonical labeling for small multigraphs.
//!
//! Both are exhaustive backtracking searches; they are meant for graphs with
//! at most a dozen edges, which covers every census the crate builds.

use super::Multigraph;

/// Optional length data for a length-respecting isomorphism search.
#[derive(Debug, Clone, Copy)]
pub struct LengthMatch<'a> {
    pub a: &'a [f64],
    pub b: &'a [f64],
    pub tol: f64,
}

/// A vertex and edge bijection from one multigraph onto another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphIsomorphism {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
}

struct Prepared {
    deg: Vec<usize>,
    /// `pairs[x][y]`: edge indices between x and y, sorted by length.
    pairs: Vec<Vec<Vec<usize>>>,
}

fn prepare(g: &Multigraph, lengths: Option<&[f64]>) -> Prepared {
    let n = g.vertex_count();
    let mut pairs = vec![vec![Vec::new(); n]; n];
    for (i, e) in g.edges().iter().enumerate() {
        pairs[e.u][e.v].push(i);
        if e.u != e.v {
            pairs[e.v][e.u].push(i);
        }
    }
    if let Some(len) = lengths {
        for row in pairs.iter_mut() {
            for list in row.iter_mut() {
                list.sort_by(|&p, &q| len[p].total_cmp(&len[q]).then(p.cmp(&q)));
            }
        }
    }
    Prepared { deg: g.degrees(), pairs }
}

fn lists_match(la: &[usize], lb: &[usize], lengths: Option<LengthMatch<'_>>) -> bool {
    if la.len() != lb.len() {
        return false;
    }
    match lengths {
        None => true,
        // both lists are sorted by length, so the sorted pairing is optimal
        Some(m) => la.iter().zip(lb).all(|(&p, &q)| (m.a[p] - m.b[q]).abs() <= m.tol),
    }
}

fn search_order(g: &Multigraph, deg: &[usize]) -> Vec<usize> {
    let n = g.vertex_count();
    let start = (0..n).max_by_key(|&x| (deg[x], std::cmp::Reverse(x))).unwrap_or(0);
    let inc = g.incidence();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::from([start]);
    seen[start] = true;
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for &e in &inc[x] {
            let y = g.edge(e).other(x);
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    order
}

/// Visits every vertex bijection `a -> b` compatible with edge multiplicities
/// (and lengths, when given). The visitor returns `false` to stop the search.
pub(crate) fn for_each_vertex_isomorphism(
    a: &Multigraph,
    b: &Multigraph,
    lengths: Option<LengthMatch<'_>>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) {
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return;
    }
    let pa = prepare(a, lengths.map(|m| m.a));
    let pb = prepare(b, lengths.map(|m| m.b));
    let mut da = pa.deg.clone();
    let mut db = pb.deg.clone();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return;
    }
    if let Some(m) = lengths {
        let mut la: Vec<f64> = m.a.to_vec();
        let mut lb: Vec<f64> = m.b.to_vec();
        la.sort_by(f64::total_cmp);
        lb.sort_by(f64::total_cmp);
        if la.iter().zip(&lb).any(|(x, y)| (x - y).abs() > m.tol) {
            return;
        }
    }
    let order = search_order(a, &pa.deg);
    let n = a.vertex_count();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    #[allow(clippy::too_many_arguments)]
    fn rec(
        k: usize,
        order: &[usize],
        pa: &Prepared,
        pb: &Prepared,
        lengths: Option<LengthMatch<'_>>,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if k == order.len() {
            return visit(map);
        }
        let x = order[k];
        for y in 0..used.len() {
            if used[y] || pa.deg[x] != pb.deg[y] {
                continue;
            }
            if !lists_match(&pa.pairs[x][x], &pb.pairs[y][y], lengths) {
                continue;
            }
            let ok = order[..k].iter().all(|&w| lists_match(&pa.pairs[x][w], &pb.pairs[y][map[w]], lengths));
            if !ok {
                continue;
            }
            map[x] = y;
            used[y] = true;
            let go_on = rec(k + 1, order, pa, pb, lengths, map, used, visit);
            used[y] = false;
            map[x] = usize::MAX;
            if !go_on {
                return false;
            }
        }
        true
    }
    rec(0, &order, &pa, &pb, lengths, &mut map, &mut used, visit);
}

/// Extends a vertex bijection to an edge bijection by pairing the (length
/// sorted) parallel classes.
pub(crate) fn edge_map_for(
    a: &Multigraph,
    b: &Multigraph,
    vertex_map: &[usize],
    lengths: Option<LengthMatch<'_>>,
) -> Vec<usize> {
    let pa = prepare(a, lengths.map(|m| m.a));
    let pb = prepare(b, lengths.map(|m| m.b));
    let mut edge_map = vec![usize::MAX; a.edge_count()];
    for (i, e) in a.edges().iter().enumerate() {
        if edge_map[i] != usize::MAX {
            continue;
        }
        let la = &pa.pairs[e.u][e.v];
        let lb = &pb.pairs[vertex_map[e.u]][vertex_map[e.v]];
        for (&p, &q) in la.iter().zip(lb) {
            edge_map[p] = q;
        }
    }
    edge_map
}

/// Finds one isomorphism `a -> b`, if any.
pub fn find_isomorphism(a: &Multigraph, b: &Multigraph, lengths: Option<LengthMatch<'_>>) -> Option<GraphIsomorphism> {
    let mut found: Option<Vec<usize>> = None;
    for_each_vertex_isomorphism(a, b, lengths, &mut |m| {
        found = Some(m.to_vec());
        false
    });
    found.map(|vertex_map| {
        let edge_map = edge_map_for(a, b, &vertex_map, lengths);
        GraphIsomorphism { vertex_map, edge_map }
    })
}

/// All vertex permutations preserving edge multiplicities.
pub fn vertex_automorphisms(g: &Multigraph) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_vertex_isomorphism(g, g, None, &mut |m| {
        out.push(m.to_vec());
        true
    });
    out
}

/// Canonical labeling: `order[k]` is the original vertex placed at canonical
/// position `k`; `code` is the canonical multiplicity matrix (upper triangle,
/// row major, prefixed by the vertex count). Two multigraphs are isomorphic
/// iff their codes agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub code: Vec<u32>,
    pub order: Vec<usize>,
}

fn refine(m: &[Vec<usize>], colors: &mut [u32]) {
    let n = colors.len();
    let mut classes = {
        let mut c = colors.to_vec();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    loop {
        let sigs: Vec<(u32, Vec<(u32, usize)>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<(u32, usize)> =
                    (0..n).filter(|&w| w != v && m[v][w] > 0).map(|w| (colors[w], m[v][w])).collect();
                nb.push((u32::MAX, m[v][v]));
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut uniq = sigs.clone();
        uniq.sort();
        uniq.dedup();
        for v in 0..n {
            colors[v] = uniq.binary_search(&sigs[v]).expect("present") as u32;
        }
        if uniq.len() == classes {
            break;
        }
        classes = uniq.len();
    }
}

fn code_for(m: &[Vec<usize>], order: &[usize]) -> Vec<u32> {
    let n = order.len();
    let mut code = Vec::with_capacity(1 + n * (n + 1) / 2);
    code.push(n as u32);
    for i in 0..n {
        for j in i..n {
            code.push(m[order[i]][order[j]] as u32);
        }
    }
    code
}

pub fn canonical_form(g: &Multigraph) -> CanonicalForm {
    let m = g.multiplicities();
    let deg = g.degrees();
    let n = g.vertex_count();
    let mut colors: Vec<u32> = {
        let keys: Vec<(usize, usize)> = (0..n).map(|v| (deg[v], m[v][v])).collect();
        let mut uniq = keys.clone();
        uniq.sort_unstable();
        uniq.dedup();
        keys.iter().map(|k| uniq.binary_search(k).unwrap() as u32).collect()
    };
    refine(&m, &mut colors);
    let mut best: Option<CanonicalForm> = None;

    fn search(m: &[Vec<usize>], colors: Vec<u32>, best: &mut Option<CanonicalForm>) {
        let n = colors.len();
        let mut counts = std::collections::BTreeMap::new();
        for &c in &colors {
            *counts.entry(c).or_insert(0usize) += 1;
        }
        match counts.iter().find(|(_, &k)| k > 1).map(|(&c, _)| c) {
            None => {
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by_key(|&v| colors[v]);
                let code = code_for(m, &order);
                if best.as_ref().is_none_or(|b| code < b.code) {
                    *best = Some(CanonicalForm { code, order });
                }
            }
            Some(target) => {
                for v in (0..n).filter(|&v| colors[v] == target) {
                    let mut next: Vec<u32> =
                        colors.iter().enumerate().map(|(w, &c)| 2 * c + u32::from(c == target && w != v)).collect();
                    refine(m, &mut next);
                    search(m, next, best);
                }
            }
        }
    }
    search(&m, colors, &mut best);
    best.expect("at least one leaf")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, pairs: &[(usize, usize)]) -> Multigraph {
        Multigraph::from_pairs(n, pairs).unwrap()
    }

    #[test]
    fn canonical_code_is_label_invariant() {
        let a = g(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 1)]);
        let b = a.relabel(&[2, 0, 3, 1]);
        assert_eq!(canonical_form(&a).code, canonical_form(&b).code);
    }

    #[test]
    fn canonical_code_separates_theta_and_dumbbell() {
        let theta = g(2, &[(0, 1), (0, 1), (0, 1)]);
        let dumbbell = g(2, &[(0, 0), (0, 1), (1, 1)]);
        assert_ne!(canonical_form(&theta).code, canonical_form(&dumbbell).code);
    }

    #[test]
    fn k4_has_24_automorphisms() {
        let k4 = g(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(vertex_automorphisms(&k4).len(), 24);
    }

    #[test]
    fn length_respecting_search_finds_edge_map() {
        let a = g(2, &[(0, 1), (0, 1), (0, 1)]);
        let la = [1.0, 2.0, 3.0];
        let lb = [3.0, 1.0, 2.0];
        let iso = find_isomorphism(&a, &a, Some(LengthMatch { a: &la, b: &lb, tol: 1e-9 })).unwrap();
        for (i, &j) in iso.edge_map.iter().enumerate() {
            assert_eq!(la[i], lb[j]);
        }
    }
}
