//! Property tests for the criteria and the search engine.

mod common;

use commex::criteria::{
    adjusted_score, extraction_score, subset_stats, switch_delta, ExtractionCriterion,
    TwoWayLabeling,
};
use commex::graph::{load_edge_list, write_edge_list, DirectedMode};
use commex::seed::derive_seed;
use commex::tabu::{multi_start, TabuConfig, TabuCriterion};
use commex::Graph64;

use proptest::prelude::*;

fn arbitrary_graph() -> impl Strategy<Value = (Graph64, u64)> {
    (3usize..12, any::<u64>()).prop_map(|(n, seed)| {
        let g = common::erdos_renyi(n, 0.45, seed);
        (g, seed)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adjusted_is_sizes_times_original((g, seed) in arbitrary_graph()) {
        let n = g.node_count();
        let size = 1 + (seed as usize % (n - 1));
        let members: Vec<usize> = (0..size).collect();
        let s = TwoWayLabeling::from_members(n, &members);
        let stats = subset_stats(&g, &s);
        let w = extraction_score(&stats, n).unwrap();
        let wa = adjusted_score(&stats, n).unwrap();
        let factor = (size * (n - size)) as f64;
        prop_assert!((wa - factor * w).abs() <= 1e-10 * factor.max(1.0));
    }

    #[test]
    fn switching_twice_restores_score((g, seed) in arbitrary_graph()) {
        let n = g.node_count();
        // Entering a set of size n-1 is infeasible; need room to switch back
        // and forth.
        prop_assume!(n >= 4);
        let mut s = TwoWayLabeling::from_members(n, &[0, 1]);
        let stats = subset_stats(&g, &s);
        let node = 2 + (seed as usize % (n - 2));
        let before = adjusted_score(&stats, n).unwrap();
        let (_, mid) = switch_delta(&g, &s, &stats, node, ExtractionCriterion::Adjusted).unwrap();
        s.flip(node);
        let (after, restored) =
            switch_delta(&g, &s, &mid, node, ExtractionCriterion::Adjusted).unwrap();
        prop_assert!((after - before).abs() < 1e-10);
        prop_assert_eq!(restored.size, stats.size);
        prop_assert!((restored.internal - stats.internal).abs() < 1e-10);
        prop_assert!((restored.boundary - stats.boundary).abs() < 1e-10);
    }

    #[test]
    fn search_is_deterministic_and_trace_monotone((g, seed) in arbitrary_graph()) {
        let cfg = TabuConfig {
            tenure: 2,
            max_iters: 60,
            restarts: 3,
            seed,
            min_side: 1,
        };
        let a = multi_start(&g, TabuCriterion::Adjusted, &cfg).unwrap();
        let b = multi_start(&g, TabuCriterion::Adjusted, &cfg).unwrap();
        prop_assert_eq!(a.best_labeling.as_slice(), b.best_labeling.as_slice());
        prop_assert_eq!(a.moves.clone(), b.moves.clone());
        for pair in a.trace.windows(2) {
            prop_assert!(pair[1] >= pair[0]);
        }
        // The claimed score must match a from-scratch evaluation.
        let stats = subset_stats(&g, &a.best_labeling);
        let scratch = adjusted_score(&stats, g.node_count()).unwrap();
        prop_assert!((a.best_score - scratch).abs() < 1e-10);
    }

    #[test]
    fn edge_list_round_trip((g, _) in arbitrary_graph()) {
        let mut buf = Vec::new();
        write_edge_list(&g, None, &mut buf).unwrap();
        let reloaded = load_edge_list::<f64, _>(std::io::Cursor::new(buf), DirectedMode::Undirected)
            .unwrap();
        prop_assert_eq!(reloaded.graph.node_count(), g.node_count());
        for i in 0..g.node_count() {
            for j in 0..g.node_count() {
                let a = g.weight(i, j);
                let bi = reloaded.index_of(&i.to_string()).unwrap();
                let bj = reloaded.index_of(&j.to_string()).unwrap();
                prop_assert_eq!(a, reloaded.graph.weight(bi, bj));
            }
        }
    }
}

#[test]
fn tabu_discipline_over_many_runs() {
    for seed in 0..10u64 {
        let g = common::erdos_renyi(9, 0.5, derive_seed(55, seed));
        let cfg = TabuConfig {
            tenure: 3,
            max_iters: 120,
            restarts: 2,
            seed,
            min_side: 1,
        };
        let res = multi_start(&g, TabuCriterion::Original, &cfg).unwrap();
        let mut last = std::collections::HashMap::new();
        for &(iter, node) in &res.moves {
            if let Some(&prev) = last.get(&node) {
                assert!(iter > prev + cfg.tenure, "tenure violated for node {node}");
            }
            last.insert(node, iter);
        }
    }
}

/// Enumeration oracle agreement for the original criterion too.
#[test]
fn small_graph_original_criterion_optima() {
    let mut matched = 0;
    for i in 0..20u64 {
        let g = common::erdos_renyi(7, 0.5, derive_seed(321, i));
        let (oracle, _) = common::enumerate_max_original(&g);
        let cfg = TabuConfig {
            tenure: 2,
            max_iters: 150,
            restarts: 15,
            seed: i,
            min_side: 1,
        };
        let res = multi_start(&g, TabuCriterion::Original, &cfg).unwrap();
        assert!(res.best_score <= oracle + 1e-9);
        if (res.best_score - oracle).abs() < 1e-9 {
            matched += 1;
        }
    }
    assert!(matched >= 18, "only {matched}/20 matched");
}
