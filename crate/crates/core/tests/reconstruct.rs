mod common;

use std::collections::BTreeSet;

use common::{check_forest, grid_complex, max_finite_persistence, random_field, rng};
use morse_graph::morse_oracle::{self, cancel_all, cancel_all_checked, GradientField};
use morse_graph::persistence::compute_pairs;
use morse_graph::reconstruct::{build_forest, reconstruct_with_pairs, trace_path, PathStep};
use morse_graph::{reconstruct, Filtration, ScalarField, SimplicialComplex};
use proptest::prelude::*;

fn extents_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop_oneof![
        prop::collection::vec(3usize..10, 2),
        prop::collection::vec(2usize..5, 3),
    ]
}

fn setup(extents: &[usize], seed: u64) -> (SimplicialComplex, Filtration, morse_graph::PairingSet) {
    let (_, k) = grid_complex(extents);
    let field = random_field(&mut rng(seed), k.vertex_count());
    let f = Filtration::lower_star(&k, &field, true).unwrap();
    let p = compute_pairs(&k, &f).unwrap();
    (k, f, p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn forest_route_matches_cancellation(extents in extents_strategy(), seed in any::<u64>(), frac in 0.0f64..=1.0) {
        let (k, f, p) = setup(&extents, seed);
        let delta = frac * max_finite_persistence(&p);
        let fast = reconstruct_with_pairs(&k, &f, &p, delta).unwrap();
        let slow = morse_oracle::oracle_reconstruct_with_pairs(&k, &f, &p, delta).unwrap();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn forest_invariants(extents in extents_strategy(), seed in any::<u64>(), frac in 0.0f64..=1.0) {
        let (k, f, p) = setup(&extents, seed);
        let delta = frac * max_finite_persistence(&p);
        let forest = build_forest(&k, &f, &p, delta).unwrap();
        if let Err(msg) = check_forest(&k, &f, &p, &forest, delta) {
            prop_assert!(false, "{}", msg);
        }
    }

    #[test]
    fn gradient_vectors_point_along_the_forest(extents in extents_strategy(), seed in any::<u64>(), frac in 0.0f64..=1.0) {
        let (k, f, p) = setup(&extents, seed);
        let delta = frac * max_finite_persistence(&p);
        let forest = build_forest(&k, &f, &p, delta).unwrap();
        let field = cancel_all(&k, &f, &p, delta).unwrap();
        for v in 0..k.vertex_count() {
            prop_assert_eq!(field.vector_from(v), forest.parent(v).map(|(_, e)| e));
        }
        prop_assert_eq!(field.critical_vertices(), forest.sinks());
    }

    #[test]
    fn output_shrinks_as_delta_grows(extents in extents_strategy(), seed in any::<u64>(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (k, f, p) = setup(&extents, seed);
        let m = max_finite_persistence(&p);
        let (lo, hi) = (a.min(b) * m, a.max(b) * m);
        let g_lo = reconstruct_with_pairs(&k, &f, &p, lo).unwrap();
        let g_hi = reconstruct_with_pairs(&k, &f, &p, hi).unwrap();
        let gens_lo: BTreeSet<_> = g_lo.generator_edges.iter().collect();
        prop_assert!(g_hi.generator_edges.iter().all(|e| gens_lo.contains(e)));
    }

    #[test]
    fn every_cancellation_keeps_the_field_acyclic(extents in prop::collection::vec(3usize..7, 2), seed in any::<u64>()) {
        let (k, f, p) = setup(&extents, seed);
        let delta = max_finite_persistence(&p);
        let mut before = GradientField::trivial(&k).critical_count();
        let field = cancel_all_checked(&k, &f, &p, delta, |g| {
            g.check_acyclic(&k)?;
            assert_eq!(g.critical_count() + 2, before);
            before = g.critical_count();
            Ok(())
        }).unwrap();
        prop_assert_eq!(field.critical_vertices().len(), 1);
    }
}

#[test]
fn generators_have_persistence_above_delta() {
    for seed in 0..20 {
        let (k, f, p) = setup(&[8, 8], seed);
        let delta = 0.5 * max_finite_persistence(&p);
        let g = reconstruct_with_pairs(&k, &f, &p, delta).unwrap();
        let nv = k.vertex_count();
        let expected: Vec<usize> = (0..k.edge_count())
            .filter(|&e| p.persistence_global(nv + e) > delta)
            .collect();
        assert_eq!(g.generator_edges, expected);
        let edges: BTreeSet<_> = g.edges.iter().copied().collect();
        let verts: BTreeSet<_> = g.vertices.iter().copied().collect();
        for &e in &g.edges {
            let [a, b] = k.edge(e);
            assert!(verts.contains(&a) && verts.contains(&b));
        }
        assert!(g.generator_edges.iter().all(|e| edges.contains(e)));
    }
}

#[test]
fn traced_path_ends_at_sink() {
    let (k, f, p) = setup(&[9, 7], 3);
    let forest = build_forest(&k, &f, &p, 2.0).unwrap();
    for v in 0..k.vertex_count() {
        let path = trace_path(&forest, v);
        assert_eq!(path.first(), Some(&PathStep::Vertex(v)));
        assert_eq!(path.last(), Some(&PathStep::Vertex(forest.sink_of(v))));
        assert_eq!(path.len() % 2, 1);
    }
}

#[test]
fn ridge_between_two_peaks() {
    // Two density peaks joined by a lower saddle on a 5x3 grid.
    let values = vec![
        0.0, 0.0, 0.0, 0.0, 0.0, //
        9.0, 5.0, 4.0, 5.0, 8.0, //
        0.0, 0.0, 0.0, 0.0, 0.0,
    ];
    let (_, k) = grid_complex(&[5, 3]);
    let rho = ScalarField::new(values).unwrap();
    let g = reconstruct(&k, &rho, 0.5).unwrap();
    let slow = morse_oracle::oracle_reconstruct(&k, &rho, 0.5).unwrap();
    assert_eq!(g, slow);
    // The top ridge row is part of the output and no cycle forms.
    for v in 5..10 {
        assert!(g.vertices.contains(&v), "v{v} missing from {:?}", g.vertices);
    }
    assert_eq!(g.betti1(), 0);
    assert_eq!(g.component_count(), 1);
}

#[test]
fn negative_or_nan_delta_is_rejected() {
    let (_, k) = grid_complex(&[3, 3]);
    let rho = ScalarField::new(vec![1.0; 9]).unwrap();
    assert!(reconstruct(&k, &rho, -1.0).is_err());
    assert!(reconstruct(&k, &rho, f64::NAN).is_err());
    assert!(morse_oracle::oracle_reconstruct(&k, &rho, -0.1).is_err());
}

#[test]
fn path_forest_by_hand() {
    let k = SimplicialComplex::from_simplices(3, None, &[[0, 1], [1, 2]], &[]).unwrap();
    let field = ScalarField::new(vec![0.0, 2.0, 1.0]).unwrap();
    let f = Filtration::lower_star(&k, &field, false).unwrap();
    let p = compute_pairs(&k, &f).unwrap();

    let forest = build_forest(&k, &f, &p, 0.5).unwrap();
    assert_eq!(forest.tree_edges(), &[0]);
    assert_eq!(forest.sinks(), vec![0, 2]);
    assert_eq!(forest.sink_of(1), 0);

    let forest = build_forest(&k, &f, &p, 1.0).unwrap();
    assert_eq!(forest.tree_edges(), &[0, 1]);
    assert_eq!(forest.sinks(), vec![0]);
    assert_eq!(
        trace_path(&forest, 2),
        vec![PathStep::Vertex(2), PathStep::Edge(1), PathStep::Vertex(1), PathStep::Edge(0), PathStep::Vertex(0)]
    );
}
