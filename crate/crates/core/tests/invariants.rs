use proptest::prelude::*;

use mfbc::costmodel::{
    cost_1d, cost_2d, enumerate_configurations, mfbc_bound, optimize_grid, replication_tradeoff, tradeoff_minimizer, w_mm,
    Operand, ProcGrid, Variant2D,
};
use mfbc::graphgen::{assign_weights, remove_disconnected, uniform_random, Density, Graph};
use mfbc::mfbc::{mfbc, mfbc_with_order};
use mfbc::oracle::{brandes, hop_eccentricity, max_relative_error, shortest_path_dag_depth};

fn graph() -> impl Strategy<Value = Graph> {
    (2usize..40, 0.5f64..5.0, any::<bool>(), any::<bool>(), any::<u64>()).prop_map(|(n, k, directed, weighted, seed)| {
        let g = uniform_random(n, Density::Degree(k), directed, seed).unwrap();
        if weighted {
            assign_weights(&g, 1, 6, seed ^ 1).unwrap()
        } else {
            g
        }
    })
}

fn p_value() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![1usize, 2, 6, 8, 12, 16, 30, 64])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scores_match_reference(g in graph(), n_b in 1usize..50) {
        let run = mfbc(&g.adjacency(), n_b.min(g.n())).unwrap();
        prop_assert!(max_relative_error(run.scores.as_slice(), &brandes(&g)) <= 1e-9);
        prop_assert!(run.scores.as_slice().iter().all(|&s| s >= 0.0));
    }

    #[test]
    fn source_order_is_irrelevant(g in graph(), n_b in 1usize..50, seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let n_b = n_b.min(g.n());
        let a = mfbc(&g.adjacency(), n_b).unwrap();
        let b = mfbc_with_order(&g.adjacency(), n_b, &order).unwrap();
        prop_assert!(max_relative_error(b.scores.as_slice(), a.scores.as_slice()) <= 1e-9);
    }

    #[test]
    fn iteration_counts_follow_graph_structure(g in graph()) {
        let run = mfbc(&g.adjacency(), 1).unwrap();
        for (s, batch) in run.batches.iter().enumerate() {
            if !g.is_weighted() {
                prop_assert_eq!(batch.forward.iterations(), hop_eccentricity(&g, s));
            }
            prop_assert_eq!(batch.backward.iterations(), shortest_path_dag_depth(&g, s));
        }
    }

    #[test]
    fn isolates_score_zero(g in graph()) {
        let (reduced, map) = remove_disconnected(&g);
        let full = brandes(&g);
        let expanded = map.expand(&brandes(&reduced));
        prop_assert!(max_relative_error(&expanded, &full) <= 1e-9);
    }

    #[test]
    fn optimizer_is_a_lower_bound(a in 1.0f64..1e7, b in 1.0f64..1e7, c in 1.0f64..1e7, p in p_value(),
                                  alpha in 0.0f64..1e4, beta in 0.0f64..10.0) {
        let best = optimize_grid(a, b, c, p, alpha, beta).unwrap();
        for choice in enumerate_configurations(a, b, c, p, alpha, beta) {
            prop_assert!(best.seconds <= choice.seconds);
        }
        let one = Operand::ALL.iter().map(|&x| cost_1d(x, [a, b, c][x as usize], p).seconds(alpha, beta));
        prop_assert!(one.into_iter().all(|s| best.seconds <= s + 1e-9 * s.abs()));
        for r in 1..=p {
            if p % r == 0 {
                let s = cost_2d(Variant2D::AB, a, b, r, p / r).seconds(alpha, beta);
                prop_assert!(best.seconds <= s + 1e-9 * s.abs());
            }
        }
        let (grid, w) = w_mm(a, b, c, p, alpha, beta);
        prop_assert_eq!(grid.p(), p);
        prop_assert!(w.messages >= 0.0 && w.words >= 0.0);
    }

    #[test]
    fn factorizations_cover_p(p in 1usize..200) {
        let grids = ProcGrid::factorizations(p);
        prop_assert!(grids.iter().all(|g| g.p() == p));
        let divisors = (1..=p).filter(|d| p % d == 0).count();
        let expected: usize = (1..=p).filter(|d| p % d == 0).map(|d| (1..=p / d).filter(|e| (p / d) % e == 0).count()).sum();
        prop_assert_eq!(grids.len(), expected);
        prop_assert!(grids.len() >= divisors);
    }

    #[test]
    fn bound_decreases_with_replication(n in 16.0f64..1e5, k in 1.0f64..64.0, e in 0u32..12, d in 1.0f64..30.0) {
        let p = 1usize << e;
        let m = n * k;
        let mut last = f64::INFINITY;
        let mut c = 1.0;
        while c <= p as f64 {
            let w = mfbc_bound(n, m, p, c, d).unwrap();
            prop_assert!(w.words <= last * (1.0 + 1e-12));
            last = w.words;
            c *= 2.0;
        }
    }

    #[test]
    fn stationary_point_minimizes_tradeoff(n in 16.0f64..1e5, k in 1.0f64..64.0, e in 0u32..16, scale in 0.1f64..10.0) {
        let p = 1usize << e;
        let m = n * k;
        let c_star = tradeoff_minimizer(n, m, p);
        let other = c_star * scale;
        let at_star = replication_tradeoff(n, m, p, c_star);
        prop_assert!(at_star <= replication_tradeoff(n, m, p, other) * (1.0 + 1e-12));
    }
}
