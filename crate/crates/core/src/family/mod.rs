//! The constructive family of trees with a unique minimum global offensive
//! alliance.
//!
//! Every member is grown from a `P3` by four attachment operations, each of
//! which also grows a tracked vertex set `A`. The tracked set of a member is
//! its unique minimum alliance. [`decompose`] runs the construction
//! backwards on an arbitrary tree.
//!
//! New vertices are always appended at the next free labels, in a fixed
//! order per operation, so a trace replays to an identically labeled tree:
//!
//! - `O1`: the new leaf.
//! - `O2`: the center, then its two leaves.
//! - `O3`: for each copy, the attached endpoint, then its leaf.
//! - `O4`: for each star, the center, then its supports, then their leaves
//!   (the `j`-th leaf hangs off the `j`-th support).

mod decompose;
mod random;
mod trace;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Tree, Vertex, VertexSet};

pub use decompose::{decompose, Certificate, NotInFamily, RecognitionResult, ShapeCase};
pub use random::{random_trace, RandomTraceConfig};
pub use trace::{Base, ConstructionTrace, Operation, TraceParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("vertex {vertex} out of range for a tree on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("vertex {0} is not a support vertex")]
    NotASupport(Vertex),
    #[error("vertex {leaf} is not a leaf adjacent to {support}")]
    NotAdjacentLeaf { support: Vertex, leaf: Vertex },
    #[error("vertex {0} is already in the tracked set")]
    WInA(Vertex),
    #[error("{op} precondition failed: {reason}")]
    PreconditionFailed { op: &'static str, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid trace at step {step}: {cause}")]
pub struct InvalidTrace {
    /// Index into `ConstructionTrace::steps`.
    pub step: usize,
    pub cause: FamilyError,
}

/// A member of the family together with its tracked set and the trace that
/// built it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FTree {
    tree: Tree,
    a_set: VertexSet,
    trace: ConstructionTrace,
}

impl FTree {
    /// `P3` labeled `0-1-2` with tracked set `{1}`.
    pub fn base_p3() -> Self {
        FTree {
            tree: Tree::path(3),
            a_set: VertexSet::from_iter(3, [1]),
            trace: ConstructionTrace::default(),
        }
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn a_set(&self) -> &VertexSet {
        &self.a_set
    }

    pub fn trace(&self) -> &ConstructionTrace {
        &self.trace
    }

    pub fn into_parts(self) -> (Tree, VertexSet, ConstructionTrace) {
        (self.tree, self.a_set, self.trace)
    }

    pub fn apply(&self, op: &Operation) -> Result<FTree, FamilyError> {
        match op {
            Operation::O1 { support } => self.apply_o1(*support),
            Operation::O2 { support } => self.apply_o2(*support),
            Operation::O3 {
                support_w,
                leaf_v,
                k,
            } => self.apply_o3(*support_w, *leaf_v, *k),
            Operation::O4 { w, star_sizes } => self.apply_o4(*w, star_sizes),
        }
    }

    /// Attach a new leaf at support vertex `u`. The tracked set is unchanged.
    pub fn apply_o1(&self, u: Vertex) -> Result<FTree, FamilyError> {
        self.check_support(u)?;
        let n = self.tree.n();
        Ok(self.grow(Operation::O1 { support: u }, 1, &[(u, n)], &[]))
    }

    /// Attach a `P3` by its center at support vertex `u`; the center joins
    /// the tracked set.
    pub fn apply_o2(&self, u: Vertex) -> Result<FTree, FamilyError> {
        self.check_support(u)?;
        let c = self.tree.n();
        let edges = [(u, c), (c, c + 1), (c, c + 2)];
        Ok(self.grow(Operation::O2 { support: u }, 3, &edges, &[c]))
    }

    /// Attach `k ≥ 1` disjoint edges at the leaf `leaf_v` of support `w`,
    /// each joined by one endpoint; those endpoints join the tracked set.
    pub fn apply_o3(&self, w: Vertex, leaf_v: Vertex, k: usize) -> Result<FTree, FamilyError> {
        self.check_support(w)?;
        self.check_vertex(leaf_v)?;
        if !self.tree.is_leaf(leaf_v) || !self.tree.is_adjacent(w, leaf_v) {
            return Err(FamilyError::NotAdjacentLeaf {
                support: w,
                leaf: leaf_v,
            });
        }
        if k == 0 {
            return Err(precondition("O3", "k must be at least 1".into()));
        }
        if !o3_condition_holds(&self.tree, &self.a_set, w) {
            return Err(precondition(
                "O3",
                format!("support {w} meets neither condition"),
            ));
        }
        let n = self.tree.n();
        let mut edges = Vec::with_capacity(2 * k);
        let mut endpoints = Vec::with_capacity(k);
        for i in 0..k {
            let (end, leaf) = (n + 2 * i, n + 2 * i + 1);
            edges.push((leaf_v, end));
            edges.push((end, leaf));
            endpoints.push(end);
        }
        Ok(self.grow(
            Operation::O3 {
                support_w: w,
                leaf_v,
                k,
            },
            2 * k,
            &edges,
            &endpoints,
        ))
    }

    /// Attach subdivided stars `SS_{k_i}` (`k_i ≥ 2`) by their centers at
    /// `w`; all new support vertices join the tracked set.
    pub fn apply_o4(&self, w: Vertex, star_sizes: &[usize]) -> Result<FTree, FamilyError> {
        self.check_vertex(w)?;
        if self.a_set.contains(w) {
            return Err(FamilyError::WInA(w));
        }
        let bound = o4_bound(&self.tree, &self.a_set, w).map_err(|r| precondition("O4", r))?;
        let p = star_sizes.len();
        if p == 0 || p > bound {
            return Err(precondition(
                "O4",
                format!("need 1 <= p <= {bound}, got p = {p}"),
            ));
        }
        if let Some(&k) = star_sizes.iter().find(|&&k| k < 2) {
            return Err(precondition("O4", format!("star size {k} below 2")));
        }
        let mut next = self.tree.n();
        let mut edges = Vec::new();
        let mut supports = Vec::new();
        for &k in star_sizes {
            let center = next;
            edges.push((w, center));
            for j in 0..k {
                let (support, leaf) = (center + 1 + j, center + 1 + k + j);
                edges.push((center, support));
                edges.push((support, leaf));
                supports.push(support);
            }
            next += 2 * k + 1;
        }
        let added = next - self.tree.n();
        let op = Operation::O4 {
            w,
            star_sizes: star_sizes.to_vec(),
        };
        Ok(self.grow(op, added, &edges, &supports))
    }

    fn check_vertex(&self, v: Vertex) -> Result<(), FamilyError> {
        if v >= self.tree.n() {
            return Err(FamilyError::VertexOutOfRange {
                vertex: v,
                n: self.tree.n(),
            });
        }
        Ok(())
    }

    fn check_support(&self, v: Vertex) -> Result<(), FamilyError> {
        self.check_vertex(v)?;
        if !self.tree.is_support(v) {
            return Err(FamilyError::NotASupport(v));
        }
        Ok(())
    }

    fn grow(
        &self,
        op: Operation,
        added: usize,
        edges: &[(Vertex, Vertex)],
        into_a: &[Vertex],
    ) -> FTree {
        let tree = self.tree.extended(added, edges);
        let mut a_set = self.a_set.grown(tree.n());
        for &v in into_a {
            a_set.insert(v);
        }
        let mut trace = self.trace.clone();
        trace.steps.push(op);
        FTree { tree, a_set, trace }
    }
}

fn precondition(op: &'static str, reason: String) -> FamilyError {
    FamilyError::PreconditionFailed { op, reason }
}

/// O3's eligibility test for support `w`, read literally: `w` has at least
/// three leaves, or one of the three clauses of the second condition holds.
pub fn o3_condition_holds(t: &Tree, a: &VertexSet, w: Vertex) -> bool {
    let leaves = t.leaf_count_at(w);
    if leaves >= 3 {
        return true;
    }
    let neighbors = t.neighbors(w);
    let closed_in_a =
        usize::from(a.contains(w)) + neighbors.iter().filter(|&&x| a.contains(x)).count();
    let open_outside_a = neighbors.iter().filter(|&&x| !a.contains(x)).count();
    if closed_in_a < open_outside_a {
        return true;
    }
    // |N(x) ∩ A| <= |N[x] ∩ (V - A)| + 1, with x itself outside A
    let loose = |x: Vertex| {
        let in_a = t.neighbors(x).iter().filter(|&&y| a.contains(y)).count();
        let out_a = 1 + t.neighbors(x).iter().filter(|&&y| !a.contains(y)).count();
        in_a <= out_a + 1
    };
    let loose_neighbors = neighbors
        .iter()
        .filter(|&&x| !a.contains(x) && loose(x))
        .count();
    match leaves {
        2 => loose_neighbors >= 1,
        1 => loose_neighbors >= 2,
        _ => false,
    }
}

/// Largest number of stars O4 may attach at `w`, or why none can be.
fn o4_bound(t: &Tree, a: &VertexSet, w: Vertex) -> Result<usize, String> {
    let q = t.degree(w);
    if q < 2 {
        return Err(format!("deg({w}) = {q} < 2"));
    }
    let outside = t.neighbors(w).iter().filter(|&&x| !a.contains(x)).count();
    match outside {
        0 => Ok(q - 1),
        1 => Ok(q.saturating_sub(3)),
        _ => Err(format!(
            "{w} has {outside} neighbors outside the tracked set"
        )),
    }
}

/// Rebuilds a member from its trace, validating every step.
pub fn replay(trace: &ConstructionTrace) -> Result<FTree, InvalidTrace> {
    trace
        .steps
        .iter()
        .enumerate()
        .try_fold(FTree::base_p3(), |f, (step, op)| {
            f.apply(op).map_err(|cause| InvalidTrace { step, cause })
        })
}

/// All operations applicable to `f`, with `k`, `p` and every `k_i` capped at
/// `cap`. Used by exhaustive small-family tests.
pub fn applicable_operations(f: &FTree, cap: usize) -> Vec<Operation> {
    let t = f.tree();
    let mut ops = Vec::new();
    for s in t.vertices().filter(|&v| t.is_support(v)) {
        ops.push(Operation::O1 { support: s });
        ops.push(Operation::O2 { support: s });
        if o3_condition_holds(t, f.a_set(), s) {
            for leaf in t.leaves_at(s) {
                for k in 1..=cap {
                    ops.push(Operation::O3 {
                        support_w: s,
                        leaf_v: leaf,
                        k,
                    });
                }
            }
        }
    }
    for w in t.vertices().filter(|&w| !f.a_set().contains(w)) {
        if let Ok(bound) = o4_bound(t, f.a_set(), w) {
            for p in 1..=bound.min(cap) {
                for sizes in size_vectors(p, cap) {
                    ops.push(Operation::O4 {
                        w,
                        star_sizes: sizes,
                    });
                }
            }
        }
    }
    ops
}

/// Non-decreasing vectors of length `p` over `2..=cap`.
fn size_vectors(p: usize, cap: usize) -> Vec<Vec<usize>> {
    fn rec(p: usize, min: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for k in min..=cap {
            cur.push(k);
            rec(p, k, cap, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(p, 2, cap, &mut Vec::new(), &mut out);
    out
}
