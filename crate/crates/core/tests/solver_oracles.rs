//! The tree DP and the uniqueness analysis against exhaustive subset search.

use goa_core::enumeration::enumerate_trees;
use goa_core::graph::{Tree, VertexSet};
use goa_core::solver::{
    analyze, is_goa_set, min_goa_bruteforce, min_goa_dp, min_goa_dp_forced, Membership,
};

fn all_trees(max_n: usize) -> impl Iterator<Item = Tree> {
    (1..=max_n).flat_map(|n| enumerate_trees(n).unwrap())
}

/// Independent alliance test straight from the closed-neighborhood
/// definition: every outsider has at least as many closed neighbors inside
/// as outside.
fn alliance_by_definition(t: &Tree, s: &VertexSet) -> bool {
    t.vertices().filter(|&v| !s.contains(v)).all(|v| {
        let inside = t.neighbors(v).iter().filter(|&&u| s.contains(u)).count();
        let outside = 1 + t.neighbors(v).len() - inside;
        inside >= 1 && inside >= outside
    })
}

#[test]
fn dp_matches_brute_force_through_order_twelve() {
    let mut count = 0;
    for t in all_trees(12) {
        count += 1;
        let brute = min_goa_bruteforce(&t).unwrap();
        let (gamma, witness) = min_goa_dp(&t);
        assert_eq!(gamma, brute.gamma, "{}", t.to_edge_list());
        assert_eq!(witness.len(), gamma);
        assert!(alliance_by_definition(&t, &witness), "{}", t.to_edge_list());
        let report = analyze(&t);
        assert_eq!(report.gamma, gamma);
        assert_eq!(
            report.unique,
            brute.all_min_sets.len() == 1,
            "{}",
            t.to_edge_list()
        );
        if report.unique {
            assert_eq!(report.witness, brute.all_min_sets[0]);
        }
    }
    assert_eq!(count, 987);
}

#[test]
fn forced_minima_agree_with_minimum_sets() {
    for t in all_trees(10) {
        let brute = min_goa_bruteforce(&t).unwrap();
        let report = analyze(&t);
        for v in t.vertices() {
            let in_some = brute.all_min_sets.iter().any(|s| s.contains(v));
            let out_some = brute.all_min_sets.iter().any(|s| !s.contains(v));
            assert_eq!(report.forced_in_min[v] == brute.gamma, in_some);
            assert_eq!(report.forced_out_min[v] == Some(brute.gamma), out_some);
            assert_eq!(
                min_goa_dp_forced(&t, v, Membership::In),
                Some(report.forced_in_min[v])
            );
            assert_eq!(
                min_goa_dp_forced(&t, v, Membership::Out),
                report.forced_out_min[v]
            );
        }
        assert_eq!(
            report.core(),
            brute
                .all_min_sets
                .iter()
                .skip(1)
                .fold(brute.all_min_sets[0].clone(), |acc, s| {
                    VertexSet::from_iter(t.n(), acc.iter().filter(|&v| s.contains(v)))
                })
        );
    }
}

#[test]
fn membership_test_agrees_with_definition() {
    for t in all_trees(7) {
        let n = t.n();
        for mask in 0u64..1 << n {
            let s = VertexSet::from_mask(n, mask);
            assert_eq!(is_goa_set(&t, &s).unwrap(), alliance_by_definition(&t, &s));
        }
    }
}

#[test]
fn gamma_bounds() {
    // the non-leaves form an alliance once n >= 3
    for t in all_trees(11) {
        let (gamma, _) = min_goa_dp(&t);
        assert!(gamma >= 1);
        assert!(gamma <= t.n());
        if t.n() >= 2 {
            assert!(gamma <= t.n() - t.leaves().len() + usize::from(t.n() == 2));
        }
    }
}

#[test]
fn supports_and_leaves() {
    for t in all_trees(10).filter(|t| t.n() >= 3) {
        let brute = min_goa_bruteforce(&t).unwrap();
        let supports = t.supports();
        // some minimum set holds every support
        assert!(
            brute.all_min_sets.iter().any(|s| supports.is_subset(s)),
            "{}",
            t.to_edge_list()
        );
        // a support with two or more leaves is in every minimum set
        for u in supports.iter().filter(|&u| t.leaf_count_at(u) >= 2) {
            assert!(
                brute.all_min_sets.iter().all(|s| s.contains(u)),
                "{}",
                t.to_edge_list()
            );
        }
    }
}

#[test]
fn small_attachments() {
    for t in all_trees(9).filter(|t| t.n() >= 2) {
        let (gamma, _) = min_goa_dp(&t);
        let n = t.n();
        for u in t.supports().iter() {
            let mut edges = t.edges().to_vec();
            edges.push((u, n));
            let leafed = Tree::from_edges(n + 1, &edges).unwrap();
            assert_eq!(min_goa_bruteforce(&leafed).unwrap().gamma, gamma);
            if n >= 3 {
                let mut edges = t.edges().to_vec();
                edges.extend([(u, n), (n, n + 1), (n, n + 2)]);
                let grown = Tree::from_edges(n + 3, &edges).unwrap();
                assert_eq!(min_goa_bruteforce(&grown).unwrap().gamma, gamma + 1);
            }
        }
    }
}
