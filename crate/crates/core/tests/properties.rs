use proptest::prelude::*;

use swapedge::gen::{generate, GenParams};
use swapedge::oracle::{all_pairs_graph, forest_all_pairs, phi, Oracle};
use swapedge::{
    reduce_to_binary, solve, solve_all, EngineOptions, Envelope, ForestBackend, Line, Payload, Ratio, ValidatedInstance,
};

fn instance() -> impl Strategy<Value = ValidatedInstance> {
    (
        4usize..28,
        any::<u64>(),
        0.0f64..1.0,
        any::<bool>(),
        prop_oneof![Just(1i64), Just(5), Just(1000)],
    )
        .prop_map(|(n, seed, density, mst, wmax)| {
            let max_m = n * (n - 1) / 2;
            let m = n + ((max_m - n) as f64 * density) as usize;
            generate(&GenParams { n, m, wmax, seed, mst }).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_matches_oracle_on_both_backends(inst in instance()) {
        let o = Oracle::new(&inst);
        for backend in [ForestBackend::Dynamic, ForestBackend::Scan] {
            let sol = solve(&inst, &EngineOptions { backend, ..Default::default() }).unwrap();
            for e in inst.tree_edge_ids() {
                prop_assert_eq!(sol.get(e), o.brute_bce(e), "edge {} backend {:?}", e, backend);
            }
        }
    }

    #[test]
    fn every_subphase_matches_its_vertex_oracle(inst in instance()) {
        let (red, _) = reduce_to_binary(&inst);
        let out = solve_all(&red, &EngineOptions { trace: true, ..Default::default() }).unwrap();
        let o = Oracle::new(&red);
        prop_assert!(!out.trace.is_empty());
        for t in &out.trace {
            let want = o.brute_v_bce(t.e, t.v);
            let got = t.found.map(|(f, _, r)| (f, r));
            prop_assert_eq!(got, want, "e {} v {}", t.e, t.v);
            if let Some((f, g, r)) = t.found {
                // the witness attains the maximum
                prop_assert_eq!(phi(&red, t.e, f, g), r);
            }
        }
    }

    #[test]
    fn recursion_stays_within_decomposition_height(inst in instance()) {
        let (red, _) = reduce_to_binary(&inst);
        let out = solve_all(&red, &EngineOptions::default()).unwrap();
        prop_assert!(out.depths.find_bce <= out.height);
        prop_assert!(out.depths.find_critical <= out.height);
        prop_assert!(out.depths.find_candidate <= out.height);
    }

    #[test]
    fn stretch_is_one_exactly_when_distances_survive(inst in instance()) {
        let o = Oracle::new(&inst);
        let tree: Vec<_> = inst.tree_edge_ids();
        for &e in tree.iter().take(4) {
            let dg = all_pairs_graph(&inst.graph, Some(e));
            for f in inst.swap_edges(e).into_iter().take(3) {
                let s = o.true_stretch(e, f);
                prop_assert!(s >= Ratio::from_integer(1));
                let edges: Vec<_> = tree.iter().copied().filter(|&x| x != e).chain([f]).collect();
                let dt = forest_all_pairs(&inst.graph, &edges);
                let preserved = dg == dt;
                prop_assert_eq!(s == Ratio::from_integer(1), preserved, "e {} f {}", e, f);
            }
        }
    }

    #[test]
    fn envelope_winner_slope_never_increases_with_den(
        lines in prop::collection::vec((0i64..200, 1i64..40), 1..30),
    ) {
        // the maximum of (t + a) / den switches to smaller den as t grows
        let t_max = 1000;
        let mut env = Envelope::new(t_max);
        for (i, &(a, den)) in lines.iter().enumerate() {
            env.insert(Line::new(a, den, Payload { edge: i, down: 0 })).unwrap();
        }
        let mut last_den = i64::MAX;
        for t in (0..=t_max).step_by(7) {
            let best = env.query_max(t).unwrap();
            prop_assert!(best.den <= last_den, "t {}: den {} after {}", t, best.den, last_den);
            last_den = best.den;
        }
    }
}
