use std::cmp::Ordering;
use std::collections::BinaryHeap;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use tropi_core::graph_moduli::{minimal_stratum, perturb_into_open_stratum};
use tropi_core::metric_graph::{EdgePoint, GraphNormalization};
use tropi_core::MetricGraph;

/// Random connected multigraph: a random spanning tree plus extra edges,
/// loops allowed.
fn arb_graph() -> impl Strategy<Value = MetricGraph> {
    (1usize..6)
        .prop_flat_map(|n| {
            let tree = proptest::collection::vec((any::<prop::sample::Index>(), 0.1f64..3.0), n - 1);
            let extra = proptest::collection::vec((0..n, 0..n, 0.1f64..3.0), usize::from(n == 1)..4);
            (Just(n), tree, extra)
        })
        .prop_map(|(n, tree, extra)| {
            let mut edges = Vec::new();
            for (k, (parent, l)) in tree.into_iter().enumerate() {
                edges.push((parent.index(k + 1), k + 1, l));
            }
            edges.extend(extra);
            MetricGraph::from_edges(n, &edges).unwrap()
        })
}

#[derive(PartialEq)]
struct Item(f64, usize);
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0)
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], s: usize) -> Vec<f64> {
    let mut d = vec![f64::INFINITY; adj.len()];
    d[s] = 0.0;
    let mut heap = BinaryHeap::from([Item(0.0, s)]);
    while let Some(Item(du, u)) = heap.pop() {
        if du > d[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            if du + w < d[v] {
                d[v] = du + w;
                heap.push(Item(d[v], v));
            }
        }
    }
    d
}

/// Subdivides every edge into `k` equal pieces; returns the adjacency and,
/// for each new node, its position as an edge point.
fn subdivide(g: &MetricGraph, k: usize) -> (Vec<Vec<(usize, f64)>>, Vec<EdgePoint>) {
    let n = g.graph().vertex_count();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut pts: Vec<EdgePoint> = (0..n)
        .map(|v| {
            let (e, at_u) = g
                .graph()
                .edges()
                .iter()
                .enumerate()
                .find_map(|(i, e)| (e.u == v).then_some((i, true)).or((e.v == v).then_some((i, false))))
                .unwrap();
            EdgePoint { edge: e, s: if at_u { 0.0 } else { g.length(e) } }
        })
        .collect();
    for (i, e) in g.graph().edges().iter().enumerate() {
        let h = g.length(i) / k as f64;
        let mut prev = e.u;
        for j in 1..k {
            let id = adj.len();
            adj.push(Vec::new());
            pts.push(EdgePoint { edge: i, s: h * j as f64 });
            adj[prev].push((id, h));
            adj[id].push((prev, h));
            prev = id;
        }
        adj[prev].push((e.v, h));
        adj[e.v].push((prev, h));
    }
    (adj, pts)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diameter_brackets_subdivision(g in arb_graph()) {
        let k = 24;
        let (adj, _) = subdivide(&g, k);
        let mut sampled: f64 = 0.0;
        for s in 0..adj.len() {
            sampled = sampled.max(dijkstra(&adj, s).into_iter().fold(0.0, f64::max));
        }
        let h = g.lengths().iter().fold(0.0f64, |a, &l| a.max(l)) / k as f64;
        let d = g.diameter();
        prop_assert!(d >= sampled - 1e-9, "{d} < {sampled}");
        prop_assert!(d <= sampled + h + 1e-9, "{d} > {sampled} + {h}");
    }

    #[test]
    fn point_distance_matches_dijkstra(g in arb_graph()) {
        let (adj, pts) = subdivide(&g, 5);
        let dist = g.vertex_distances();
        for s in (0..adj.len()).step_by(3) {
            let d = dijkstra(&adj, s);
            for t in 0..adj.len() {
                let ours = g.point_distance(&dist, pts[s], pts[t]);
                prop_assert!((ours - d[t]).abs() < 1e-9, "{ours} vs {}", d[t]);
            }
        }
    }

    #[test]
    fn suppression_is_an_isometry(g in arb_graph()) {
        let s = g.suppress();
        prop_assert!((s.diameter() - g.diameter()).abs() < 1e-9);
        prop_assert!((s.total_length() - g.total_length()).abs() < 1e-9);
        prop_assert_eq!(s.graph().b1(), g.graph().b1());
        prop_assert_eq!(s.suppress().graph().edge_count(), s.graph().edge_count());
    }

    #[test]
    fn relabeling_is_an_isomorphism(g in arb_graph(), seed in any::<u64>()) {
        let n = g.graph().vertex_count();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut x = seed;
        for i in (1..n).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (x >> 33) as usize % (i + 1));
        }
        let h = MetricGraph::new(g.graph().relabel(&perm), g.lengths().to_vec()).unwrap();
        prop_assume!(g.graph().edge_count() <= 8);
        prop_assert!(g.isomorphic(&h, true, 1e-12).unwrap());
        prop_assert!((h.diameter() - g.diameter()).abs() < 1e-12);
    }

    #[test]
    fn diameter_scales_linearly(g in arb_graph(), c in 0.1f64..10.0) {
        prop_assert!((g.scaled(c).diameter() - c * g.diameter()).abs() < 1e-9 * c.max(1.0) * g.diameter().max(1.0));
        let r = g.rescale(GraphNormalization::Diameter);
        prop_assert!((r.diameter() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contraction_keeps_genus_of_nonloops(g in arb_graph(), pick in any::<prop::sample::Index>()) {
        let e = pick.index(g.graph().edge_count());
        prop_assume!(g.graph().edge_count() > 1);
        let c = g.contract(&[e]).unwrap();
        let lost = usize::from(g.graph().edge(e).is_loop());
        prop_assert_eq!(c.graph().b1() + lost, g.graph().b1());
        prop_assert!(c.diameter() <= g.diameter() + 1e-9);
    }

    #[test]
    fn perturbation_lands_in_open_stratum(g in arb_graph(), extra in 0usize..2) {
        let need = minimal_stratum(&g);
        prop_assume!(need >= 1);
        let genus = need + extra;
        let p = perturb_into_open_stratum(&g, genus, 1e-3).unwrap();
        let s = p.suppress();
        prop_assert_eq!(s.graph().v1(), 0);
        prop_assert_eq!(s.graph().b1(), genus);
        prop_assert!((p.diameter() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn named_diameters() {
    assert_abs_diff_eq!(MetricGraph::circle(2.0).unwrap().diameter(), 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(MetricGraph::theta(1.0, 1.0, 1.0).unwrap().diameter(), 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(MetricGraph::dumbbell(1.0, 1.0, 1.0).unwrap().diameter(), 2.0, epsilon = 1e-15);
    assert_abs_diff_eq!(MetricGraph::lollipop(2.0, 1.0).unwrap().diameter(), 2.0, epsilon = 1e-15);
}
