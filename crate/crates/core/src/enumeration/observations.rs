//! Sampled checks of how the alliance number and uniqueness react to the
//! four local attachments that the family operations undo.
//!
//! Each check draws a random base tree `T'`, a random attachment site and
//! random sizes, builds the larger tree `T`, and keeps the configuration when
//! it meets the attachment's hypotheses. On qualifying configurations the
//! change in alliance number must equal the expected delta, and a unique
//! minimum set in `T` must imply one in `T'`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::graph::{Tree, Vertex};
use crate::solver::{analyze, min_goa_dp_constrained, AllianceReport, Membership};

/// Draws per qualifying sample before a kind gives up.
const ATTEMPTS_PER_SAMPLE: usize = 200;
const MAX_K: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ObservationKind {
    /// A leaf joined at a support; delta 0.
    LeafAtSupport,
    /// A `P3` joined by its center at a support; delta 1.
    P3AtSupport,
    /// `k` copies of `P2` joined by one end at a leaf; delta `k`.
    PathsAtLeaf,
    /// `p` subdivided stars joined by their centers at a vertex outside a
    /// minimum set; delta is the total star size.
    SubdividedStars,
}

impl ObservationKind {
    pub const ALL: [ObservationKind; 4] = [
        ObservationKind::LeafAtSupport,
        ObservationKind::P3AtSupport,
        ObservationKind::PathsAtLeaf,
        ObservationKind::SubdividedStars,
    ];
}

impl fmt::Display for ObservationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ObservationKind::LeafAtSupport => "leaf_at_support",
            ObservationKind::P3AtSupport => "p3_at_support",
            ObservationKind::PathsAtLeaf => "paths_at_leaf",
            ObservationKind::SubdividedStars => "subdivided_stars",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ObservationStats {
    pub attempts: usize,
    pub qualifying: usize,
    pub identity_failures: usize,
    /// Qualifying configurations whose larger tree has a unique minimum set.
    pub preservation_checked: usize,
    pub preservation_failures: usize,
    /// Edge list of the first failing base tree and the attachment, if any.
    pub first_failure: Option<String>,
}

impl ObservationStats {
    pub fn identities_hold(&self) -> bool {
        self.identity_failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObservationReport {
    pub leaf_at_support: ObservationStats,
    pub p3_at_support: ObservationStats,
    pub paths_at_leaf: ObservationStats,
    pub subdivided_stars: ObservationStats,
}

impl ObservationReport {
    pub fn get(&self, kind: ObservationKind) -> &ObservationStats {
        match kind {
            ObservationKind::LeafAtSupport => &self.leaf_at_support,
            ObservationKind::P3AtSupport => &self.p3_at_support,
            ObservationKind::PathsAtLeaf => &self.paths_at_leaf,
            ObservationKind::SubdividedStars => &self.subdivided_stars,
        }
    }
}

/// One built configuration: the larger tree, the expected delta, and
/// whether it meets the attachment's hypotheses.
struct Attachment {
    tree: Tree,
    delta: usize,
    label: String,
    /// Extra requirement for the uniqueness check beyond `T` being unique.
    preservation_applies: bool,
}

/// Samples up to `samples` qualifying configurations per kind from random
/// base trees of order `2..=n_max` (at least 3).
pub fn verify_observations(n_max: usize, samples: usize, seed: u64) -> ObservationReport {
    let n_max = n_max.max(3);
    let run = |kind: ObservationKind| {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ (kind as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        sample_kind(kind, n_max, samples, &mut rng)
    };
    ObservationReport {
        leaf_at_support: run(ObservationKind::LeafAtSupport),
        p3_at_support: run(ObservationKind::P3AtSupport),
        paths_at_leaf: run(ObservationKind::PathsAtLeaf),
        subdivided_stars: run(ObservationKind::SubdividedStars),
    }
}

fn sample_kind(
    kind: ObservationKind,
    n_max: usize,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> ObservationStats {
    let mut stats = ObservationStats::default();
    while stats.qualifying < samples && stats.attempts < samples * ATTEMPTS_PER_SAMPLE {
        stats.attempts += 1;
        let base = random_tree(rng, n_max);
        let base_report = analyze(&base);
        let Some(att) = attach(kind, &base, &base_report, rng) else {
            continue;
        };
        stats.qualifying += 1;
        let report = analyze(&att.tree);
        let mut failed = false;
        if report.gamma != base_report.gamma + att.delta {
            stats.identity_failures += 1;
            failed = true;
        }
        if report.unique && att.preservation_applies {
            stats.preservation_checked += 1;
            if !base_report.unique {
                stats.preservation_failures += 1;
                failed = true;
            }
        }
        if failed && stats.first_failure.is_none() {
            stats.first_failure = Some(format!("{}# {}\n", base.to_edge_list(), att.label));
        }
    }
    stats
}

fn random_tree(rng: &mut ChaCha8Rng, n_max: usize) -> Tree {
    let n = rng.gen_range(2..=n_max);
    let seq: Vec<Vertex> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    Tree::from_prufer(&seq).expect("entries lie in range")
}

/// Builds a random attachment of `kind` onto `base`, or `None` when the draw
/// misses the hypotheses.
fn attach(
    kind: ObservationKind,
    base: &Tree,
    base_report: &AllianceReport,
    rng: &mut ChaCha8Rng,
) -> Option<Attachment> {
    let n = base.n();
    let gamma = base_report.gamma;
    match kind {
        ObservationKind::LeafAtSupport => {
            let u = *base.supports().to_vec().choose(rng)?;
            let in_every_set = base_report.forced_out_min[u].is_none_or(|x| x > gamma);
            Some(Attachment {
                tree: base.extended(1, &[(u, n)]),
                delta: 0,
                label: format!("leaf at {u}"),
                preservation_applies: in_every_set,
            })
        }
        ObservationKind::P3AtSupport => {
            if n < 3 {
                return None;
            }
            let v = *base.supports().to_vec().choose(rng)?;
            Some(Attachment {
                tree: base.extended(3, &[(v, n), (n, n + 1), (n, n + 2)]),
                delta: 1,
                label: format!("P3 center at {v}"),
                preservation_applies: true,
            })
        }
        ObservationKind::PathsAtLeaf => {
            let v = *base.leaves().to_vec().choose(rng)?;
            let w = base.neighbors(v)[0];
            let k = rng.gen_range(1..=MAX_K);
            let mut edges = Vec::with_capacity(2 * k);
            for i in 0..k {
                let y = n + 2 * i;
                edges.extend([(v, y), (y, y + 1)]);
            }
            let tree = base.extended(2 * k, &edges);
            let report = analyze(&tree);
            (base_report.forced_in_min[w] == gamma && report.forced_in_min[w] == report.gamma).then(
                || Attachment {
                    tree,
                    delta: k,
                    label: format!("{k} copies of P2 at leaf {v}"),
                    preservation_applies: true,
                },
            )
        }
        ObservationKind::SubdividedStars => {
            let w = rng.gen_range(0..n);
            let q = base.degree(w);
            let bound = o5_bound(base, gamma, w)?;
            let p = rng.gen_range(1..=bound);
            let sizes: Vec<usize> = (0..p).map(|_| rng.gen_range(2..=MAX_K)).collect();
            let added: usize = sizes.iter().map(|k| 2 * k + 1).sum();
            let mut edges = Vec::with_capacity(added);
            let mut centers = Vec::with_capacity(p);
            let mut next = n;
            for &k in &sizes {
                let x = next;
                centers.push(x);
                edges.push((w, x));
                for j in 0..k {
                    let s = x + 1 + j;
                    edges.extend([(x, s), (s, x + 1 + k + j)]);
                }
                next += 2 * k + 1;
            }
            let tree = base.extended(added, &edges);
            let report = analyze(&tree);
            let mut fixed = vec![None; tree.n()];
            for &x in centers.iter().chain([&w]) {
                fixed[x] = Some(Membership::Out);
            }
            let avoiding = min_goa_dp_constrained(&tree.root_at(0), &fixed);
            (avoiding == Some(report.gamma)).then(|| Attachment {
                tree,
                delta: sizes.iter().sum(),
                label: format!("stars {sizes:?} at {w} (degree {q})"),
                preservation_applies: true,
            })
        }
    }
}

/// Largest star count allowed at `w`: some minimum set of `base` must avoid
/// `w` and all but at most one of its neighbors. With none outside the set
/// the bound is `deg(w) - 1`, with one it is `deg(w) - 3`. `None` when no
/// positive count is allowed.
fn o5_bound(base: &Tree, gamma: usize, w: Vertex) -> Option<usize> {
    let q = base.degree(w);
    if q < 2 {
        return None;
    }
    let rooted = base.root_at(0);
    let mut fixed = vec![None; base.n()];
    fixed[w] = Some(Membership::Out);
    for &y in base.neighbors(w) {
        fixed[y] = Some(Membership::In);
    }
    if min_goa_dp_constrained(&rooted, &fixed) == Some(gamma) {
        return Some(q - 1);
    }
    if q < 4 {
        return None;
    }
    base.neighbors(w)
        .iter()
        .any(|&y| {
            fixed[y] = Some(Membership::Out);
            let hit = min_goa_dp_constrained(&rooted, &fixed) == Some(gamma);
            fixed[y] = Some(Membership::In);
            hit
        })
        .then_some(q - 3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_attachments_on_small_trees() {
        let claw = Tree::star(3);
        let gamma = analyze(&claw).gamma;
        assert_eq!(analyze(&claw.extended(1, &[(0, 4)])).gamma, gamma);
        assert_eq!(
            analyze(&claw.extended(3, &[(0, 4), (4, 5), (4, 6)])).gamma,
            gamma + 1
        );
    }

    #[test]
    fn single_star_on_p5_center() {
        let p5 = Tree::path(5);
        assert_eq!(o5_bound(&p5, 2, 2), Some(1));
        let t = p5.extended(5, &[(2, 5), (5, 6), (5, 7), (6, 8), (7, 9)]);
        assert_eq!(analyze(&t).gamma, 4);
    }

    #[test]
    fn sampled_identities_hold() {
        let report = verify_observations(9, 60, 3);
        for kind in ObservationKind::ALL {
            let stats = report.get(kind);
            assert_eq!(stats.qualifying, 60, "{kind}");
            assert!(stats.identities_hold(), "{kind}: {stats:?}");
        }
    }

    /// A unique tree whose subdivided star meets every hypothesis, yet the
    /// base left after removing it has two minimum sets.
    #[test]
    fn star_removal_can_break_uniqueness() {
        let base = Tree::from_edges(
            10,
            &[
                (0, 1),
                (0, 6),
                (0, 8),
                (1, 2),
                (1, 5),
                (2, 3),
                (2, 4),
                (6, 7),
                (8, 9),
            ],
        )
        .unwrap();
        let base_report = analyze(&base);
        assert_eq!(base_report.gamma, 4);
        assert!(!base_report.unique);
        assert_eq!(o5_bound(&base, 4, 0), Some(2));
        let t = base.extended(5, &[(0, 10), (10, 11), (10, 12), (11, 13), (12, 14)]);
        let report = analyze(&t);
        assert_eq!(report.gamma, 6);
        assert!(report.unique);
        let mut fixed = vec![None; 15];
        fixed[0] = Some(Membership::Out);
        fixed[10] = Some(Membership::Out);
        assert_eq!(min_goa_dp_constrained(&t.root_at(0), &fixed), Some(6));
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(
            verify_observations(8, 20, 11),
            verify_observations(8, 20, 11)
        );
    }
}
