use goa_core::graph::{parse_edge_list, Tree, VertexSet};
use proptest::prelude::*;

fn prufer_tree() -> impl Strategy<Value = Tree> {
    (2usize..30).prop_flat_map(|n| {
        prop::collection::vec(0..n, n - 2).prop_map(|seq| Tree::from_prufer(&seq).unwrap())
    })
}

fn tree_and_permutation() -> impl Strategy<Value = (Tree, Vec<usize>)> {
    prufer_tree().prop_flat_map(|t| {
        let n = t.n();
        (Just(t), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_code_ignores_labels((t, perm) in tree_and_permutation()) {
        let moved = t.relabel(&perm);
        prop_assert_eq!(moved.canonical_code(), t.canonical_code());
    }

    #[test]
    fn degree_sum_and_leaves(t in prufer_tree()) {
        let total: usize = t.vertices().map(|v| t.degree(v)).sum();
        prop_assert_eq!(total, 2 * (t.n() - 1));
        prop_assert!(t.leaves().len() >= 2);
        for u in t.supports().iter() {
            prop_assert!(t.leaf_count_at(u) >= 1);
        }
    }

    #[test]
    fn rooting_round_trips(t in prufer_tree(), pick in any::<prop::sample::Index>()) {
        let root = pick.index(t.n());
        let rooted = t.root_at(root);
        prop_assert_eq!(rooted.unroot(), t.clone());
        prop_assert_eq!(rooted.subtree_vertices(root).len(), t.n());
        for v in t.vertices().filter(|&v| v != root) {
            let p = rooted.parent(v).unwrap();
            prop_assert_eq!(rooted.depth(v), rooted.depth(p) + 1);
        }
    }

    #[test]
    fn edge_list_round_trips(t in prufer_tree()) {
        prop_assert_eq!(parse_edge_list(&t.to_edge_list()).unwrap(), t);
    }

    #[test]
    fn centers_minimize_eccentricity(t in prufer_tree()) {
        let ecc = t.eccentricities();
        let low = *ecc.iter().min().unwrap();
        let expected: Vec<usize> = t.vertices().filter(|&v| ecc[v] == low).collect();
        prop_assert_eq!(t.centers(), expected);
        prop_assert_eq!(ecc[t.max_eccentricity_vertex()], *ecc.iter().max().unwrap());
    }
}

#[test]
fn distinct_shapes_get_distinct_codes() {
    assert_ne!(
        Tree::path(4).canonical_code(),
        Tree::star(3).canonical_code()
    );
    let spider = parse_edge_list("0 1\n1 2\n0 3\n3 4\n0 5\n5 6").unwrap();
    let caterpillar = parse_edge_list("0 1\n1 2\n2 3\n3 4\n4 5\n2 6").unwrap();
    assert_ne!(spider.canonical_code(), caterpillar.canonical_code());
}

#[test]
fn induced_keeps_labels_in_order() {
    let t = Tree::path(5);
    let (sub, labels) = t.induced(&VertexSet::from_iter(5, [1, 2, 3])).unwrap();
    assert_eq!(sub, Tree::path(3));
    assert_eq!(labels, vec![1, 2, 3]);
    assert!(t.induced(&VertexSet::from_iter(5, [0, 2])).is_err());
}
