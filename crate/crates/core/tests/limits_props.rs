use proptest::prelude::*;
use tropi_core::curve_collapse::{collapse_curve, elliptic_collapse, schedule_for_target, GhLimit, StableDualGraph};
use tropi_core::graph_moduli::{census, minimal_stratum};
use tropi_core::homotopy_joins::{phi, psi};
use tropi_core::lattice_torus::TorusNormalization;
use tropi_core::metric_graph::GraphNormalization;
use tropi_core::{FlatTorus, MetricGraph};

fn leafless(genus: usize) -> Vec<tropi_core::graph_moduli::CombinatorialType> {
    census(genus).unwrap().into_iter().filter(|t| t.v1 == 0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn schedules_reach_their_targets(pick in any::<prop::sample::Index>(), raw in proptest::collection::vec(0.1f64..1.0, 6)) {
        let types = leafless(3);
        let ty = &types[pick.index(types.len())];
        let target = MetricGraph::new(ty.graph.clone(), raw[..ty.edge_count()].to_vec())
            .unwrap()
            .rescale(GraphNormalization::Diameter);
        // every trivalent genus-3 type as the dual graph
        for dual in leafless(3).into_iter().filter(|t| t.edge_count() == 6) {
            let dual = StableDualGraph::unweighted(dual.graph);
            let Ok(schedule) = schedule_for_target(&dual, &target) else { continue };
            let out = collapse_curve(&dual, &schedule).unwrap();
            let GhLimit::Graph(limit) = out.gh_limit else { panic!("something pinches") };
            prop_assert!(limit.isomorphic(&target, true, 1e-9).unwrap());
            prop_assert!(minimal_stratum(&limit) <= 3);
        }
    }

    #[test]
    fn collapse_limits_live_in_the_boundary(pick in any::<prop::sample::Index>(), p in proptest::collection::vec(0.0f64..2.0, 6)) {
        let types = leafless(3);
        let ty = &types[pick.index(types.len())];
        let dual = StableDualGraph::unweighted(ty.graph.clone());
        prop_assume!(dual.validate().is_ok());
        let schedule = tropi_core::curve_collapse::PinchingSchedule::from_exponents(&p[..ty.edge_count()]);
        let out = collapse_curve(&dual, &schedule).unwrap();
        match out.gh_limit {
            GhLimit::Smooth => prop_assert!(out.dm_limit.pinched.is_empty()),
            GhLimit::Graph(g) => {
                prop_assert!((g.diameter() - 1.0).abs() < 1e-9);
                prop_assert!(minimal_stratum(&g) <= 3);
                prop_assert!(g.graph().b1() <= ty.b1);
            }
        }
    }

    #[test]
    fn phi_stays_normalized(pick in any::<prop::sample::Index>(), raw in proptest::collection::vec(0.1f64..1.0, 6), t in 0.0f64..1.0) {
        let types = census(3).unwrap();
        let ty = &types[pick.index(types.len())];
        let g = MetricGraph::new(ty.graph.clone(), raw[..ty.edge_count()].to_vec())
            .unwrap()
            .rescale(GraphNormalization::Diameter);
        let out = phi(&g, t).unwrap();
        prop_assert!((out.diameter() - 1.0).abs() < 1e-9);
        // continuity in t, seen through the total length
        let dt = 1e-7;
        let next = phi(&g, (t + dt).min(1.0 - 1e-12)).unwrap();
        if (t - 2.0 / 3.0).abs() > 1e-6 {
            prop_assert!((next.total_length() - out.total_length()).abs() < 1e-4);
        }
    }

    #[test]
    fn psi_stays_normalized(a in 0.3f64..3.0, b in -0.5f64..0.5, s in 0.0f64..1.0) {
        let t = FlatTorus::from_rows(&[vec![1.0, b], vec![b, a + b * b]])
            .unwrap()
            .rescale(TorusNormalization::Diameter)
            .unwrap();
        let out = psi(&t, s).unwrap();
        prop_assert_eq!(out.dim(), if s == 0.0 { 2 } else { 3 });
        prop_assert!((out.diameter(1e-10).unwrap().mid() - 1.0).abs() < 1e-7);
    }
}

#[test]
fn phi_ends_at_the_segment() {
    let segment = MetricGraph::segment(1.0).unwrap();
    for genus in 2..=3 {
        for ty in census(genus).unwrap() {
            let lengths: Vec<f64> = (0..ty.edge_count()).map(|i| 1.0 + 0.25 * i as f64).collect();
            let g = MetricGraph::new(ty.graph.clone(), lengths).unwrap().rescale(GraphNormalization::Diameter);
            let end = phi(&g, 1.0).unwrap();
            assert!(end.isomorphic(&segment, true, 1e-12).unwrap(), "{}", ty.name);
            // just before the end the star has almost only two legs
            let near = phi(&g, 1.0 - 1e-9).unwrap().suppress();
            assert!((near.total_length() - 1.0).abs() < 1e-6, "{}", ty.name);
        }
    }
}

#[test]
fn psi_ends_at_the_circle() {
    let t = FlatTorus::diagonal(&[1.0, 2.0, 3.0]).unwrap().rescale(TorusNormalization::Diameter).unwrap();
    let end = psi(&t, 1.0).unwrap();
    assert!(end.isometric(&FlatTorus::circle(2.0).unwrap(), 1e-12).unwrap());
    let near = psi(&t, 1.0 - 1e-9).unwrap();
    assert_eq!(near.dim(), 4);
}

#[test]
fn elliptic_curves_collapse_to_the_circle() {
    for k in [1u64, 10, 100, 1000] {
        let t = elliptic_collapse(1.5, k).unwrap();
        assert!((t.diameter(1e-10).unwrap().mid() - 1.0).abs() < 1e-8);
        // the short direction shrinks like 1/k
        let short = t.shortest_vector().unwrap().0;
        assert!(short <= 2.0 / (1.5 * k as f64) + 1e-9, "k = {k}: {short}");
        assert_eq!(t.dim(), 2);
    }
}
