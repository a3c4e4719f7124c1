//! Global offensive alliances on trees.
//!
//! A set `S` is a global offensive alliance (GOA) when it is dominating and
//! every vertex `v` outside `S` has at least as many closed neighbors inside
//! `S` as outside it. For `v ∉ S` that is the same as having at least
//! `⌈(d(v)+1)/2⌉` neighbors in `S`, which is what the solvers work with.
//!
//! Two exact solvers are provided: an exhaustive bitmask search that lists
//! every minimum set, and a linear-ish tree DP. Uniqueness of the minimum set
//! is decided by re-running the DP with each vertex forced in and forced out.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{canonical_set_order, RootedTree, Tree, Vertex, VertexSet};

/// Default vertex cap for [`min_goa_bruteforce`].
pub const BRUTE_FORCE_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("vertex set over {set} vertices does not match tree on {tree} vertices")]
    UniverseMismatch { set: usize, tree: usize },
    #[error("tree has {n} vertices, brute force is capped at {cap}")]
    TooLarge { n: usize, cap: usize },
}

/// Fixed membership for one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    In,
    Out,
}

/// Per-vertex number of neighbors that must lie in `S` when the vertex is
/// outside `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Threshold(Vec<usize>);

impl Threshold {
    pub fn for_tree(t: &Tree) -> Self {
        Threshold(
            t.vertices()
                .map(|v| required_neighbors(t.degree(v)))
                .collect(),
        )
    }

    pub fn required(&self, v: Vertex) -> usize {
        self.0[v]
    }
}

/// `⌈(d+1)/2⌉`. For `d = 0` this is 1, which no isolated vertex can meet, so
/// an isolated vertex always has to be in the alliance.
pub fn required_neighbors(degree: usize) -> usize {
    degree / 2 + 1
}

/// Checks the alliance condition directly from the closed-neighborhood
/// inequality, plus domination and non-emptiness.
pub fn is_goa_set(t: &Tree, s: &VertexSet) -> Result<bool, SolverError> {
    if s.universe() != t.n() {
        return Err(SolverError::UniverseMismatch {
            set: s.universe(),
            tree: t.n(),
        });
    }
    if s.is_empty() {
        return Ok(false);
    }
    for v in t.vertices().filter(|&v| !s.contains(v)) {
        let inside = t.neighbors(v).iter().filter(|&&u| s.contains(u)).count();
        let dominated = inside > 0;
        // |N[v] ∩ S| = inside, |N[v] - S| = 1 + (d(v) - inside)
        let outside = 1 + t.degree(v) - inside;
        if !dominated || inside < outside {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Result of the exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForce {
    pub gamma: usize,
    /// Every minimum GOA set, in lexicographic order of member lists.
    pub all_min_sets: Vec<VertexSet>,
}

pub fn min_goa_bruteforce(t: &Tree) -> Result<BruteForce, SolverError> {
    min_goa_bruteforce_capped(t, BRUTE_FORCE_CAP)
}

/// Enumerates subsets by increasing size, stopping at the first size that
/// admits an alliance and collecting all alliances of that size.
pub fn min_goa_bruteforce_capped(t: &Tree, cap: usize) -> Result<BruteForce, SolverError> {
    let n = t.n();
    if n > cap.min(63) {
        return Err(SolverError::TooLarge {
            n,
            cap: cap.min(63),
        });
    }
    let neighbor_mask: Vec<u64> = t
        .vertices()
        .map(|v| t.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u))
        .collect();
    let need: Vec<u32> = t
        .vertices()
        .map(|v| required_neighbors(t.degree(v)) as u32)
        .collect();
    let feasible = |mask: u64| {
        (0..n).all(|v| mask >> v & 1 == 1 || (neighbor_mask[v] & mask).count_ones() >= need[v])
    };
    for size in 1..=n {
        let found: Vec<u64> = Combinations::new(n, size)
            .filter(|&m| feasible(m))
            .collect();
        if !found.is_empty() {
            let mut sets: Vec<VertexSet> = found
                .into_iter()
                .map(|m| VertexSet::from_mask(n, m))
                .collect();
            sets.sort_by(canonical_set_order);
            return Ok(BruteForce {
                gamma: size,
                all_min_sets: sets,
            });
        }
    }
    unreachable!("the full vertex set is always an alliance")
}

/// `size`-subsets of `0..n` as bitmasks, via Gosper's hack.
struct Combinations {
    next: Option<u64>,
    limit: u64,
}

impl Combinations {
    fn new(n: usize, size: usize) -> Self {
        let next = if size == 0 || size > n {
            None
        } else {
            Some((1u64 << size) - 1)
        };
        Combinations {
            next,
            limit: 1u64 << n,
        }
    }
}

impl Iterator for Combinations {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        let low = cur & cur.wrapping_neg();
        let ripple = cur + low;
        let succ = (((ripple ^ cur) >> 2) / low) | ripple;
        self.next = (succ < self.limit && ripple != 0).then_some(succ);
        Some(cur)
    }
}

/// Saturating cost with a sentinel larger than any feasible size.
type Cost = u32;
const INF: Cost = Cost::MAX;

fn add(a: Cost, b: Cost) -> Cost {
    a.saturating_add(b)
}

const OUT: usize = 0;
const IN: usize = 1;

/// Bottom-up tables for one DP run.
///
/// `table[v][s][p]` is the least `|S ∩ D[v]|` with `v` in state `s`, its
/// parent in state `p`, every proper descendant of `v` satisfied, and `v`'s
/// own condition met when `v` is out. The root uses `root_cost` instead,
/// since it has no parent to lean on.
struct Dp<'a> {
    rooted: &'a RootedTree,
    threshold: Threshold,
    fixed: &'a [Option<Membership>],
    table: Vec<[[Cost; 2]; 2]>,
    root_cost: [Cost; 2],
}

impl<'a> Dp<'a> {
    fn run(rooted: &'a RootedTree, fixed: &'a [Option<Membership>]) -> Self {
        let n = rooted.base().n();
        let mut dp = Dp {
            rooted,
            threshold: Threshold::for_tree(rooted.base()),
            fixed,
            table: vec![[[INF; 2]; 2]; n],
            root_cost: [INF; 2],
        };
        for &v in rooted.bfs_order().iter().rev() {
            for parent_state in [OUT, IN] {
                dp.table[v][IN][parent_state] = dp.in_cost(v);
                dp.table[v][OUT][parent_state] = dp.out_cost(v, Some(parent_state)).0;
            }
        }
        let root = rooted.root();
        dp.root_cost = [dp.out_cost(root, None).0, dp.in_cost(root)];
        dp
    }

    fn allowed(&self, v: Vertex, state: usize) -> bool {
        match self.fixed[v] {
            None => true,
            Some(Membership::In) => state == IN,
            Some(Membership::Out) => state == OUT,
        }
    }

    fn in_cost(&self, v: Vertex) -> Cost {
        if !self.allowed(v, IN) {
            return INF;
        }
        self.rooted.children(v).iter().fold(1, |acc, &c| {
            add(acc, self.table[c][OUT][IN].min(self.table[c][IN][IN]))
        })
    }

    /// Cost of `v` out, and the children placed in `S` by the cheapest
    /// choice. Ties prefer leaving children out, then smaller indices in.
    fn out_cost(&self, v: Vertex, parent_state: Option<usize>) -> (Cost, Vec<Vertex>) {
        if !self.allowed(v, OUT) {
            return (INF, Vec::new());
        }
        let mut need = self.threshold.required(v);
        if parent_state == Some(IN) {
            need -= 1;
        }
        let mut total: Cost = 0;
        let mut chosen = Vec::new();
        let mut optional: Vec<(i64, Vertex)> = Vec::new();
        for &c in self.rooted.children(v) {
            let in_c = self.table[c][IN][OUT];
            let out_c = self.table[c][OUT][OUT];
            match (in_c == INF, out_c == INF) {
                (true, true) => return (INF, Vec::new()),
                (false, true) => {
                    total = add(total, in_c);
                    chosen.push(c);
                }
                (true, false) => total = add(total, out_c),
                (false, false) => {
                    total = add(total, out_c);
                    optional.push((in_c as i64 - out_c as i64, c));
                }
            }
        }
        optional.sort_unstable();
        for (delta, c) in optional {
            if delta >= 0 && chosen.len() >= need {
                break;
            }
            total = (total as i64 + delta) as Cost;
            chosen.push(c);
        }
        if chosen.len() < need {
            return (INF, Vec::new());
        }
        chosen.sort_unstable();
        (total, chosen)
    }

    fn best(&self) -> Cost {
        self.root_cost[OUT].min(self.root_cost[IN])
    }

    /// Top-down reconstruction of one optimal set.
    fn witness(&self) -> VertexSet {
        let n = self.rooted.base().n();
        let mut state = vec![OUT; n];
        let root = self.rooted.root();
        state[root] = if self.root_cost[OUT] <= self.root_cost[IN] {
            OUT
        } else {
            IN
        };
        for &v in self.rooted.bfs_order() {
            let children = self.rooted.children(v);
            if state[v] == IN {
                for &c in children {
                    state[c] = if self.table[c][OUT][IN] <= self.table[c][IN][IN] {
                        OUT
                    } else {
                        IN
                    };
                }
            } else {
                let parent_state = self.rooted.parent(v).map(|p| state[p]);
                let (_, chosen) = self.out_cost(v, parent_state);
                for &c in children {
                    state[c] = if chosen.binary_search(&c).is_ok() {
                        IN
                    } else {
                        OUT
                    };
                }
            }
        }
        VertexSet::from_iter(n, (0..n).filter(|&v| state[v] == IN))
    }
}

/// Minimum alliance size and one deterministic minimum set.
pub fn min_goa_dp(t: &Tree) -> (usize, VertexSet) {
    let rooted = t.root_at(0);
    let fixed = vec![None; t.n()];
    let dp = Dp::run(&rooted, &fixed);
    (dp.best() as usize, dp.witness())
}

/// Minimum alliance size with `v` fixed in or out, or `None` when no
/// alliance satisfies the constraint.
pub fn min_goa_dp_forced(t: &Tree, v: Vertex, state: Membership) -> Option<usize> {
    let rooted = t.root_at(0);
    let mut fixed = vec![None; t.n()];
    fixed[v] = Some(state);
    min_goa_dp_constrained(&rooted, &fixed)
}

/// Minimum alliance size under an arbitrary per-vertex membership pattern.
pub fn min_goa_dp_constrained(rooted: &RootedTree, fixed: &[Option<Membership>]) -> Option<usize> {
    assert_eq!(
        fixed.len(),
        rooted.base().n(),
        "one constraint slot per vertex"
    );
    let best = Dp::run(rooted, fixed).best();
    (best != INF).then_some(best as usize)
}

/// Minimum size, a witness, and whether the minimum set is unique.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AllianceReport {
    pub gamma: usize,
    pub witness: VertexSet,
    pub unique: bool,
    /// Minimum size over alliances containing `v`.
    pub forced_in_min: Vec<usize>,
    /// Minimum size over alliances avoiding `v`; `None` if there are none.
    pub forced_out_min: Vec<Option<usize>>,
}

impl AllianceReport {
    /// Vertices lying in every minimum set.
    pub fn core(&self) -> VertexSet {
        let n = self.forced_in_min.len();
        VertexSet::from_iter(
            n,
            (0..n).filter(|&v| self.forced_out_min[v].is_none_or(|x| x > self.gamma)),
        )
    }
}

/// Decides uniqueness by solving with each vertex forced in and forced out.
/// The minimum set is unique exactly when no vertex can go either way at
/// minimum cost.
pub fn analyze(t: &Tree) -> AllianceReport {
    let (gamma, witness) = min_goa_dp(t);
    let rooted = t.root_at(0);
    let mut fixed = vec![None; t.n()];
    let mut forced_in_min = Vec::with_capacity(t.n());
    let mut forced_out_min = Vec::with_capacity(t.n());
    for v in t.vertices() {
        fixed[v] = Some(Membership::In);
        forced_in_min
            .push(min_goa_dp_constrained(&rooted, &fixed).expect("the full vertex set contains v"));
        fixed[v] = Some(Membership::Out);
        forced_out_min.push(min_goa_dp_constrained(&rooted, &fixed));
        fixed[v] = None;
    }
    let unique = t
        .vertices()
        .all(|v| !(forced_in_min[v] == gamma && forced_out_min[v] == Some(gamma)));
    AllianceReport {
        gamma,
        witness,
        unique,
        forced_in_min,
        forced_out_min,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;

    fn set(n: usize, items: &[Vertex]) -> VertexSet {
        VertexSet::from_iter(n, items.iter().copied())
    }

    #[test]
    fn threshold_values() {
        assert_eq!(required_neighbors(0), 1);
        assert_eq!(required_neighbors(1), 1);
        assert_eq!(required_neighbors(2), 2);
        assert_eq!(required_neighbors(3), 2);
        assert_eq!(required_neighbors(4), 3);
        let th = Threshold::for_tree(&Tree::star(4));
        assert_eq!(th.required(0), 3);
        assert_eq!(th.required(1), 1);
    }

    #[test]
    fn alliance_membership_checks() {
        let p4 = Tree::path(4);
        assert_eq!(is_goa_set(&p4, &set(4, &[1, 2])), Ok(true));
        assert_eq!(is_goa_set(&p4, &VertexSet::full(4)), Ok(true));
        assert_eq!(is_goa_set(&Tree::path(3), &set(3, &[0])), Ok(false));
        assert_eq!(is_goa_set(&Tree::path(3), &VertexSet::empty(3)), Ok(false));
        assert_eq!(is_goa_set(&Tree::k1(), &VertexSet::empty(1)), Ok(false));
        assert_eq!(is_goa_set(&Tree::k1(), &VertexSet::full(1)), Ok(true));
        assert_eq!(
            is_goa_set(&p4, &set(3, &[1])),
            Err(SolverError::UniverseMismatch { set: 3, tree: 4 })
        );
    }

    #[test]
    fn brute_force_small_cases() {
        let p2 = min_goa_bruteforce(&Tree::path(2)).unwrap();
        assert_eq!(p2.gamma, 1);
        assert_eq!(p2.all_min_sets, vec![set(2, &[0]), set(2, &[1])]);
        let p3 = min_goa_bruteforce(&Tree::path(3)).unwrap();
        assert_eq!((p3.gamma, p3.all_min_sets), (1, vec![set(3, &[1])]));
        let p4 = min_goa_bruteforce(&Tree::path(4)).unwrap();
        assert_eq!(p4.gamma, 2);
        assert!(p4.all_min_sets.len() >= 2);
        assert_eq!(
            min_goa_bruteforce(&Tree::path(21)),
            Err(SolverError::TooLarge { n: 21, cap: 20 })
        );
    }

    #[test]
    fn combinations_count() {
        assert_eq!(Combinations::new(6, 3).count(), 20);
        assert_eq!(Combinations::new(5, 5).count(), 1);
        assert_eq!(Combinations::new(63, 1).count(), 63);
        assert_eq!(Combinations::new(3, 0).count(), 0);
    }

    #[test]
    fn dp_small_cases() {
        assert_eq!(min_goa_dp(&Tree::path(5)), (2, set(5, &[1, 3])));
        assert_eq!(min_goa_dp(&Tree::star(4)), (1, set(5, &[0])));
        assert_eq!(min_goa_dp(&Tree::k1()), (1, set(1, &[0])));
    }

    #[test]
    fn forced_solves() {
        let p3 = Tree::path(3);
        assert_eq!(min_goa_dp_forced(&p3, 1, Membership::Out), Some(2));
        assert_eq!(min_goa_dp_forced(&p3, 1, Membership::In), Some(1));
        assert_eq!(min_goa_dp_forced(&Tree::k1(), 0, Membership::Out), None);
        assert_eq!(min_goa_dp_forced(&Tree::k1(), 0, Membership::In), Some(1));
    }

    #[test]
    fn analyze_small_cases() {
        let p5 = analyze(&Tree::path(5));
        assert_eq!((p5.gamma, p5.unique), (2, true));
        assert_eq!(p5.witness, set(5, &[1, 3]));
        let s12 = parse_edge_list("0 1\n0 2\n1 3\n1 4").unwrap();
        assert!(!analyze(&s12).unique);
        let k13 = analyze(&Tree::star(3));
        assert_eq!((k13.gamma, k13.unique), (1, true));
        assert_eq!(k13.witness, set(4, &[0]));
        assert!(!analyze(&Tree::path(2)).unique);
        assert!(analyze(&Tree::k1()).unique);
        assert_eq!(analyze(&Tree::star(3)).core(), set(4, &[0]));
    }
}
