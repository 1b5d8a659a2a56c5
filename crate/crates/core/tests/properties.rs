//! Randomized invariants tying the independent analysis routes together.
//!
//! Each property pits two implementations against each other (exact walk
//! counts vs floating-point ranks, eigenvector tests vs Kalman ranks,
//! combinatorial reachability vs numeric certificates) so that a bug in
//! either side surfaces as a disagreement.

use netctrl::adjust::{adjust_weights, apply_plan, verify_plan, AdjustOptions};
use netctrl::graph::DirectedGraph;
use netctrl::leaders::{
    controllability_matrix, input_matrix, kalman_verdict, min_leader_bounds, minimal_leader_sets,
    pbh_verdict, slc_candidates, LeaderSearchOptions, LeaderSet,
};
use netctrl::regular::{regular_leader_lower_bound, regular_slc_by_agent1, regular_structural};
use netctrl::spectral::{eigen_decompose, numerical_rank};
use netctrl::structural::{
    certify_by_random_weights, min_structural_leaders, structurally_controllable,
    tree_eig_matrix, tree_weight_controllable,
};
use netctrl::{Matrix, Tolerances};
use proptest::prelude::*;

/// Random digraph on `1..=max_n` nodes: each ordered pair becomes an edge
/// with probability ~0.4, weights uniform in `[0.5, 1.5)`.
fn arb_graph(max_n: usize) -> impl Strategy<Value = DirectedGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (1..=n)
            .flat_map(|s| (1..=n).filter(move |&d| d != s).map(move |d| (s, d)))
            .collect();
        let len = pairs.len();
        (
            prop::collection::vec(prop::bool::weighted(0.4), len),
            prop::collection::vec(0.5f64..1.5, len),
        )
            .prop_map(move |(mask, ws)| {
                let edges = pairs
                    .iter()
                    .zip(&mask)
                    .zip(&ws)
                    .filter(|((_, &keep), _)| keep)
                    .map(|((&(s, d), _), &w)| (s, d, w));
                DirectedGraph::new(n, edges).unwrap()
            })
    })
}

/// Random rooted tree on `2..=max_n` nodes: node `i` hangs below a parent
/// drawn from `1..i`, edge weights drawn from the given pool.
fn arb_tree(max_n: usize, weights: Vec<f64>) -> impl Strategy<Value = DirectedGraph> {
    (2..=max_n).prop_flat_map(move |n| {
        let parents = prop::collection::vec(any::<prop::sample::Index>(), n - 1);
        let ws = prop::collection::vec(prop::sample::select(weights.clone()), n - 1);
        (parents, ws).prop_map(move |(ps, ws)| {
            let edges = ps.iter().zip(&ws).enumerate().map(|(k, (p, &w))| {
                let child = k + 2;
                (p.index(child - 1) + 1, child, w)
            });
            DirectedGraph::new(n, edges).unwrap()
        })
    })
}

/// Circulant digraph: node `v` points to `v + d` (mod n) for each chosen
/// offset `d`; always in-degree regular with unit weights.
fn arb_circulant(max_n: usize) -> impl Strategy<Value = DirectedGraph> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n - 1).prop_map(move |mask| {
            let mut offsets: Vec<usize> = (1..n).filter(|&d| mask[d - 1]).collect();
            if offsets.is_empty() {
                offsets.push(1);
            }
            let edges = (1..=n)
                .flat_map(|v| offsets.iter().map(move |&d| (v, (v + d - 1) % n + 1)));
            DirectedGraph::unit(n, edges).unwrap()
        })
    })
}

/// Leader set derived from a free-form selector, never empty.
fn pick_leaders(n: usize, sel: &[bool]) -> LeaderSet {
    let chosen: Vec<usize> = (1..=n).filter(|&a| sel[(a - 1) % sel.len()]).collect();
    if chosen.is_empty() {
        LeaderSet::single(n, 1).unwrap()
    } else {
        LeaderSet::new(n, chosen).unwrap()
    }
}

fn relabel(g: &DirectedGraph, perm: &[usize]) -> DirectedGraph {
    // perm[old - 1] = new
    let edges = g.edges().iter().map(|e| (perm[e.src - 1], perm[e.dst - 1], e.weight));
    DirectedGraph::new(g.n(), edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn laplacian_rows_sum_to_zero(g in arb_graph(7)) {
        let l = g.laplacian();
        let scale = l.iter().fold(1.0f64, |m, &x| m.max(x.abs()));
        let ones = Matrix::from_element(g.n(), 1, 1.0);
        let r = &l * &ones;
        prop_assert!(r.iter().all(|&x| x.abs() <= 1e-12 * scale * g.n() as f64));
    }

    #[test]
    fn zero_eigenvalue_counts_source_components(g in arb_graph(7)) {
        let tol = Tolerances::default();
        let s = eigen_decompose(&g.laplacian(), &tol).unwrap();
        let zero = s.find(num_complex::Complex64::new(0.0, 0.0));
        prop_assert!(zero.is_some());
        let zero = zero.unwrap();
        // The zero eigenvalue of a weighted digraph Laplacian is semisimple
        // with multiplicity = number of source components.
        let k = g.min_forest_root_count();
        prop_assert_eq!(zero.alg_mult, k);
        prop_assert_eq!(zero.geo_mult, k);
        // Every other eigenvalue lies strictly in the right half plane.
        for e in &s.eigs {
            if e.lambda.norm() > s.cluster_radius {
                prop_assert!(e.lambda.re > 0.0, "lambda = {}", e.lambda);
            }
        }
        prop_assert!(numerical_rank(&g.laplacian(), None) < g.n());
    }

    #[test]
    fn eigenvector_test_agrees_with_kalman(g in arb_graph(7), sel in prop::collection::vec(any::<bool>(), 7)) {
        let tol = Tolerances::default();
        let leaders = pick_leaders(g.n(), &sel);
        let l = g.laplacian();
        let s = eigen_decompose(&l, &tol).unwrap();
        let k = kalman_verdict(&l, &leaders, &tol);
        let p = pbh_verdict(&l, &leaders, &s, &tol).unwrap();
        prop_assert_eq!(k.controllable, p.controllable, "leaders {:?}", leaders.agents());
        prop_assert_eq!(k.controllable, k.rank == g.n());
        prop_assert_eq!(p.controllable, p.rank == g.n());
    }

    #[test]
    fn controllability_is_monotone_in_leaders(g in arb_graph(6), sel in prop::collection::vec(any::<bool>(), 6), extra in 1usize..=6) {
        let tol = Tolerances::default();
        let leaders = pick_leaders(g.n(), &sel);
        let l = g.laplacian();
        if kalman_verdict(&l, &leaders, &tol).controllable {
            let extra = (extra - 1) % g.n() + 1;
            let mut agents = leaders.agents().to_vec();
            if !agents.contains(&extra) {
                agents.push(extra);
            }
            let bigger = LeaderSet::new(g.n(), agents).unwrap();
            prop_assert!(kalman_verdict(&l, &bigger, &tol).controllable);
        }
    }

    #[test]
    fn controllability_matrix_rank_ignores_sign(g in arb_graph(6), sel in prop::collection::vec(any::<bool>(), 6)) {
        let leaders = pick_leaders(g.n(), &sel);
        let l = g.laplacian();
        let b = input_matrix(g.n(), &leaders);
        let c_plus = controllability_matrix(&l, &b);
        let c_minus = controllability_matrix(&(-&l), &b);
        prop_assert_eq!(numerical_rank(&c_plus, None), numerical_rank(&c_minus, None));
    }

    #[test]
    fn relabeling_preserves_spectrum(g in arb_graph(6), salt in any::<u64>()) {
        let n = g.n();
        let mut perm: Vec<usize> = (1..=n).collect();
        // Cheap deterministic shuffle driven by the salt.
        for i in (1..n).rev() {
            perm.swap(i, (salt as usize).wrapping_mul(i).wrapping_add(i) % (i + 1));
        }
        let h = relabel(&g, &perm);
        let tol = Tolerances::default();
        let sg = eigen_decompose(&g.laplacian(), &tol).unwrap();
        let sh = eigen_decompose(&h.laplacian(), &tol).unwrap();
        let expand = |s: &netctrl::spectral::Spectrum| {
            let mut v: Vec<(f64, f64)> = s
                .eigs
                .iter()
                .flat_map(|e| std::iter::repeat_n((e.lambda.re, e.lambda.im), e.alg_mult))
                .collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        };
        let (vg, vh) = (expand(&sg), expand(&sh));
        prop_assert_eq!(vg.len(), vh.len());
        for (a, b) in vg.iter().zip(&vh) {
            prop_assert!((a.0 - b.0).abs() < 1e-6 && (a.1 - b.1).abs() < 1e-6,
                "{:?} vs {:?}", a, b);
        }
        prop_assert_eq!(sg.is_cyclic(), sh.is_cyclic());
    }

    #[test]
    fn single_leader_candidates_can_span(g in arb_graph(7)) {
        let tol = Tolerances::default();
        let l = g.laplacian();
        let s = eigen_decompose(&l, &tol).unwrap();
        let roots = g.spanning_tree_roots();
        for a in slc_candidates(&l, &s, &tol) {
            prop_assert!(roots.contains(&a), "agent {} is not a spanning root", a);
        }
    }

    #[test]
    fn bfs_relabeling_is_a_permutation(g in arb_graph(7)) {
        let roots = g.spanning_tree_roots();
        prop_assume!(!roots.is_empty());
        let root = roots[0];
        let (perm, h) = g.bfs_relabel(root).unwrap();
        prop_assert_eq!(perm[root - 1], 1);
        prop_assert_eq!(h.n(), g.n());
        prop_assert_eq!(h.edge_count(), g.edge_count());
        let lg = g.laplacian();
        let lh = h.laplacian();
        for i in 0..g.n() {
            for j in 0..g.n() {
                let (a, b) = (lh[(perm[i] - 1, perm[j] - 1)], lg[(i, j)]);
                if i == j {
                    // In-degree sums may round differently once the edge
                    // order changes under the relabeling.
                    prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
                } else {
                    prop_assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn minimum_search_respects_eigen_bounds(g in arb_graph(6)) {
        let tol = Tolerances::default();
        let l = g.laplacian();
        let s = eigen_decompose(&l, &tol).unwrap();
        let (lo, hi) = min_leader_bounds(&s);
        let r = minimal_leader_sets(&l, &s, &LeaderSearchOptions::default(), &tol).unwrap();
        prop_assert!(r.cardinality >= lo && r.cardinality <= hi,
            "found {} outside [{}, {}]", r.cardinality, lo, hi);
        for set in &r.sets {
            prop_assert!(kalman_verdict(&l, set, &tol).controllable);
        }
    }

    #[test]
    fn structural_verdict_matches_reachability(g in arb_graph(7), sel in prop::collection::vec(any::<bool>(), 7)) {
        let leaders = pick_leaders(g.n(), &sel);
        let ok = structurally_controllable(&g, &leaders).unwrap();
        let reach = g.reachable_set(leaders.agents()).unwrap();
        prop_assert_eq!(ok, reach.len() == g.n());

        let (k, witness) = min_structural_leaders(&g);
        prop_assert_eq!(witness.len(), k);
        prop_assert_eq!(k, g.min_forest_root_count());
        prop_assert!(structurally_controllable(&g, &witness).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tree_rule_matches_kalman(t in arb_tree(7, vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0])) {
        let tol = Tolerances::default();
        let by_rule = tree_weight_controllable(&t, 1).unwrap();
        let by_rank = kalman_verdict(&t.laplacian(), &LeaderSet::single(t.n(), 1).unwrap(), &tol);
        prop_assert_eq!(by_rule, by_rank.controllable);
    }

    #[test]
    fn tree_eigenbasis_diagonalizes(t in arb_tree(7, vec![0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0])) {
        match tree_eig_matrix(&t, 1) {
            Ok((p, d)) => {
                let (perm, h) = t.bfs_relabel(1).unwrap();
                prop_assert_eq!(perm.len(), t.n());
                let l = h.laplacian();
                let residual = &l * &p - &p * &d;
                let scale = l.iter().fold(1.0f64, |m, &x| m.max(x.abs()));
                prop_assert!(residual.iter().all(|&x| x.abs() <= 1e-9 * scale),
                    "residual {:?}", residual.amax());
                // Unit lower triangular: always invertible.
                for i in 0..p.nrows() {
                    prop_assert_eq!(p[(i, i)], 1.0);
                    for j in i + 1..p.ncols() {
                        prop_assert_eq!(p[(i, j)], 0.0);
                    }
                }
            }
            Err(netctrl::Error::RepeatedTreeWeights { ancestor, descendant, weight }) => {
                // The reported pair must really carry equal incoming weights
                // (in a tree the weighted in-degree is the one in-edge).
                prop_assert_eq!(t.weighted_in_degree(descendant), weight);
                prop_assert_eq!(t.weighted_in_degree(ancestor), weight);
            }
            Err(e) => prop_assert!(false, "unexpected error {e:?}"),
        }
    }

    #[test]
    fn adjustment_plans_are_minimal_and_verified(
        t in arb_tree(6, vec![1.0]),
        sel in prop::collection::vec(any::<bool>(), 30),
    ) {
        // Rooted tree plus a few extra unit edges: a spanning tree from node 1
        // always exists, so planning must succeed or hit the iteration cap.
        let n = t.n();
        let pairs: Vec<(usize, usize)> = (1..=n)
            .flat_map(|s| (1..=n).filter(move |&d| d != s).map(move |d| (s, d)))
            .collect();
        let mut edges: Vec<(usize, usize, f64)> =
            t.edges().iter().map(|e| (e.src, e.dst, e.weight)).collect();
        for (k, &(s, d)) in pairs.iter().enumerate() {
            if sel[k % sel.len()] && t.weight(s, d).is_none() {
                edges.push((s, d, 1.0));
            }
        }
        let g = DirectedGraph::new(n, edges).unwrap();
        let tol = Tolerances::default();
        // A single-edge-per-row perturbation cannot always restore
        // controllability; in that case the iteration limit fires and the
        // partial plan must still be internally consistent.
        let plan = match adjust_weights(&g, &AdjustOptions::default(), &tol) {
            Ok(plan) => {
                prop_assert_eq!(plan.final_rank, n);
                let verdict = verify_plan(&g, &plan, &tol).unwrap();
                prop_assert!(verdict.controllable);

                let adjusted = apply_plan(&g, &plan).unwrap();
                let l = adjusted.laplacian();
                let scale = l.iter().fold(1.0f64, |m, &x| m.max(x.abs()));
                let ones = Matrix::from_element(n, 1, 1.0);
                prop_assert!((&l * &ones).iter().all(|&x| x.abs() <= 1e-12 * scale * n as f64));
                plan
            }
            Err(netctrl::Error::IterationLimitExceeded { limit, partial }) => {
                prop_assert_eq!(limit, AdjustOptions::default().max_iterations);
                prop_assert_eq!(partial.iterations, limit);
                prop_assert!(partial.final_rank < n);
                *partial
            }
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e:?}"))),
        };

        prop_assert_eq!(plan.adjusted_edges.len(), n - plan.initial_rank);
        let mut seen = std::collections::BTreeSet::new();
        for e in &plan.adjusted_edges {
            prop_assert!(seen.insert((e.src, e.dst)), "edge adjusted twice");
            prop_assert!(g.weight(e.src, e.dst).is_some());
        }
    }

    #[test]
    fn certification_is_sound(g in arb_graph(6), sel in prop::collection::vec(any::<bool>(), 6), seed in any::<u64>()) {
        let tol = Tolerances::default();
        let leaders = pick_leaders(g.n(), &sel);
        let witness = certify_by_random_weights(&g, &leaders, 10, seed, &tol).unwrap();
        if !structurally_controllable(&g, &leaders).unwrap() {
            prop_assert!(witness.is_none());
        }
        if let Some(h) = witness {
            prop_assert!(kalman_verdict(&h.laplacian(), &leaders, &tol).controllable);
            prop_assert_eq!(h.edge_count(), g.edge_count());
            for (a, b) in h.edges().iter().zip(g.edges()) {
                prop_assert_eq!((a.src, a.dst), (b.src, b.dst));
                prop_assert!(a.weight >= 0.5 && a.weight < 1.5);
            }
        }
    }

    #[test]
    fn walk_count_tests_match_numeric_ranks(g in arb_circulant(6)) {
        let tol = Tolerances::default();
        let l = g.laplacian();
        let exact = regular_slc_by_agent1(&g).unwrap();
        let numeric = kalman_verdict(&l, &LeaderSet::single(g.n(), 1).unwrap(), &tol);
        prop_assert_eq!(exact, numeric.controllable);

        prop_assert_eq!(regular_structural(&g).unwrap(), !g.spanning_tree_roots().is_empty());

        let s = eigen_decompose(&l, &tol).unwrap();
        let found = minimal_leader_sets(&l, &s, &LeaderSearchOptions::default(), &tol).unwrap();
        let bound = regular_leader_lower_bound(&g).unwrap();
        prop_assert!(bound <= found.cardinality,
            "lower bound {} exceeds minimum {}", bound, found.cardinality);
    }
}
