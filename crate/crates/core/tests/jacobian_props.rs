use proptest::prelude::*;
use tropi_core::graph_moduli::census;
use tropi_core::metric_graph::GraphNormalization;
use tropi_core::tropical_jacobian::{
    cycle_basis, cycle_basis_with_order, jacobian, noninjectivity_witness, period_matrix, torelli,
};
use tropi_core::{FlatTorus, MetricGraph};

/// Connected graph with `1 ≤ b1 ≤ 3` on up to 4 vertices.
fn arb_cyclic_graph() -> impl Strategy<Value = MetricGraph> {
    (1usize..5)
        .prop_flat_map(|n| {
            let tree = proptest::collection::vec((any::<prop::sample::Index>(), 0.2f64..2.0), n - 1);
            let extra = proptest::collection::vec((0..n, 0..n, 0.2f64..2.0), 1..4);
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

/// `Σ_T Π_{e ∉ T} l(e)` over spanning trees `T`, by brute force over edge
/// subsets.
fn spanning_tree_sum(g: &MetricGraph) -> f64 {
    let n = g.graph().vertex_count();
    let m = g.graph().edge_count();
    let mut total = 0.0;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(p: &mut [usize], x: usize) -> usize {
            if p[x] == x {
                x
            } else {
                let r = root(p, p[x]);
                p[x] = r;
                r
            }
        }
        let mut acyclic = true;
        for e in 0..m {
            if mask & (1 << e) != 0 {
                let edge = g.graph().edge(e);
                let (a, b) = (root(&mut parent, edge.u), root(&mut parent, edge.v));
                if a == b {
                    acyclic = false;
                    break;
                }
                parent[a] = b;
            }
        }
        if acyclic {
            total += (0..m).filter(|e| mask & (1 << e) == 0).map(|e| g.length(e)).product::<f64>();
        }
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn volume_is_the_weighted_tree_count(g in arb_cyclic_graph()) {
        let j = jacobian(&g).unwrap();
        let det = j.gram().determinant();
        let want = spanning_tree_sum(&g);
        prop_assert!((det - want).abs() < 1e-9 * want.max(1.0), "{det} vs {want}");
    }

    #[test]
    fn basis_choice_does_not_matter(g in arb_cyclic_graph(), shuffle in any::<u64>()) {
        let m = g.graph().edge_count();
        let mut order: Vec<usize> = (0..m).collect();
        let mut x = shuffle;
        for i in (1..m).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (x >> 33) as usize % (i + 1));
        }
        let a = FlatTorus::new(period_matrix(&g, &cycle_basis(&g).unwrap())).unwrap();
        let b = FlatTorus::new(period_matrix(&g, &cycle_basis_with_order(&g, &order).unwrap())).unwrap();
        prop_assert!(a.isometric(&b, 1e-9).unwrap());
    }

    #[test]
    fn subdividing_an_edge_changes_nothing(g in arb_cyclic_graph(), pick in any::<prop::sample::Index>(), t in 0.1f64..0.9) {
        let e = pick.index(g.graph().edge_count());
        let n = g.graph().vertex_count();
        let mut edges: Vec<(usize, usize, f64)> = g
            .graph()
            .edges()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != e)
            .map(|(i, x)| (x.u, x.v, g.length(i)))
            .collect();
        let old = g.graph().edge(e);
        edges.push((old.u, n, t * g.length(e)));
        edges.push((n, old.v, (1.0 - t) * g.length(e)));
        let h = MetricGraph::from_edges(n + 1, &edges).unwrap();
        prop_assert!(jacobian(&g).unwrap().isometric(&jacobian(&h).unwrap(), 1e-9).unwrap());
    }

    #[test]
    fn torelli_is_diameter_normalized(g in arb_cyclic_graph()) {
        let g = g.rescale(GraphNormalization::Diameter);
        let t = torelli(&g).unwrap();
        prop_assert!((t.diameter(1e-10).unwrap().mid() - 1.0).abs() < 1e-8);
        prop_assert!(torelli(&g.scaled(2.0)).is_err());
    }
}

#[test]
fn theta_period_matrix() {
    let g = MetricGraph::theta(1.0, 2.0, 3.0).unwrap();
    let want = FlatTorus::from_rows(&[vec![3.0, -2.0], vec![-2.0, 5.0]]).unwrap();
    assert!(jacobian(&g).unwrap().isometric(&want, 1e-12).unwrap());
}

#[test]
fn positive_definite_on_every_type() {
    for genus in 1..=3 {
        for ty in census(genus).unwrap().into_iter().filter(|t| t.b1 > 0) {
            let lengths: Vec<f64> = (0..ty.edge_count()).map(|i| 1.0 + 0.1 * i as f64).collect();
            let g = MetricGraph::new(ty.graph.clone(), lengths).unwrap();
            let j = jacobian(&g).unwrap();
            assert_eq!(j.dim(), ty.b1, "{}", ty.name);
        }
    }
}

#[test]
fn witness_collides() {
    let w = noninjectivity_witness();
    assert!(!w.first.isomorphic(&w.second, true, 1e-9).unwrap());
    assert!((w.first.diameter() - 1.0).abs() < 1e-12);
    assert!((w.second.diameter() - 1.0).abs() < 1e-12);
    let a = torelli(&w.first).unwrap();
    let b = torelli(&w.second).unwrap();
    assert!(a.isometric(&b, 1e-9).unwrap());
    assert!(a.isometric(&w.image, 1e-9).unwrap());
}
