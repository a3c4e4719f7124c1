//! Recognition by peeling: undo one operation at a time until a `P3` is
//! left, then replay the undone operations forward to obtain a certificate.
//!
//! Each step looks at the unique minimum alliance `D` of the current tree:
//!
//! 1. a support with three or more leaves loses one leaf (undo O1);
//! 2. otherwise root at a vertex of maximum eccentricity, take a deepest
//!    support `u` with parent `v` and grandparent `w`, and
//!    - `v ∈ D`: drop `u` with its two leaves (undo O2);
//!    - `v ∉ D` and a child of `v` has two leaves: drop one (undo O1);
//!    - `v ∉ D`, `w ∈ D`: drop the pendant edges below `v` (undo O3);
//!    - `v ∉ D`, `w ∉ D`: drop every subdivided star hanging from `w`
//!      (undo O4).
//!
//! Every vertex of maximum eccentricity is tried as the root until the
//! remainder keeps a unique minimum alliance. Any shape that the case
//! analysis rules out is reported rather than patched over.

use std::fmt;

use serde::Serialize;

use super::{ConstructionTrace, Operation};
use crate::graph::{Tree, Vertex, VertexSet};
use crate::solver::{analyze, AllianceReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RecognitionResult {
    /// The single vertex, which has the trivially unique alliance `{0}`.
    TrivialK1,
    Certificate(Certificate),
    NotInFamily(NotInFamily),
}

impl RecognitionResult {
    pub fn is_member(&self) -> bool {
        matches!(self, RecognitionResult::Certificate(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            RecognitionResult::Certificate(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub trace: ConstructionTrace,
    /// The unique minimum alliance, in the input tree's labels.
    pub a_set: VertexSet,
    /// `embedding[x]` is the input vertex that replay vertex `x` stands for.
    pub embedding: Vec<Vertex>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum NotInFamily {
    /// The minimum alliance is not unique.
    NotUnique,
    IsP2,
    /// A peeling step met a shape its case analysis excludes.
    ShapeAssertionFailed(ShapeCase),
}

impl fmt::Display for NotInFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotInFamily::NotUnique => write!(f, "NotUnique"),
            NotInFamily::IsP2 => write!(f, "IsP2"),
            NotInFamily::ShapeAssertionFailed(case) => write!(f, "ShapeAssertionFailed({case:?})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ShapeCase {
    /// A peeled remainder had a non-unique minimum alliance.
    RemainderNotUnique,
    /// A peeled remainder was `P2`.
    RemainderIsP2,
    /// The deepest support has no grandparent.
    NoGrandparent,
    /// `v ∈ D` but `u` does not carry exactly two leaves, or `v` is not a
    /// support.
    Case1,
    /// `v ∉ D` but `v` is a support, or a child of `v` is not a support
    /// carrying only leaves.
    Case2,
    /// A vertex of `C(w) - S(T)` does not root a subdivided star outside `D`.
    Case22,
}

/// One undone operation, in the labels of the input tree.
enum Peel {
    O1 {
        support: Vertex,
        leaf: Vertex,
    },
    O2 {
        support: Vertex,
        center: Vertex,
        leaves: [Vertex; 2],
    },
    O3 {
        w: Vertex,
        leaf_v: Vertex,
        pairs: Vec<(Vertex, Vertex)>,
    },
    O4 {
        w: Vertex,
        stars: Vec<(Vertex, Vec<(Vertex, Vertex)>)>,
    },
}

impl Peel {
    fn removed(&self) -> Vec<Vertex> {
        match self {
            Peel::O1 { leaf, .. } => vec![*leaf],
            Peel::O2 { center, leaves, .. } => vec![*center, leaves[0], leaves[1]],
            Peel::O3 { pairs, .. } => pairs.iter().flat_map(|&(a, b)| [a, b]).collect(),
            Peel::O4 { stars, .. } => stars
                .iter()
                .flat_map(|(c, arms)| {
                    std::iter::once(*c).chain(arms.iter().flat_map(|&(s, l)| [s, l]))
                })
                .collect(),
        }
    }
}

/// Decides membership in the family; members come with a certificate.
pub fn decompose(t: &Tree) -> RecognitionResult {
    match t.n() {
        1 => return RecognitionResult::TrivialK1,
        2 => return RecognitionResult::NotInFamily(NotInFamily::IsP2),
        _ => {}
    }
    let mut alive = VertexSet::full(t.n());
    let mut peels = Vec::new();
    let mut report = analyze(t);
    if !report.unique {
        return RecognitionResult::NotInFamily(NotInFamily::NotUnique);
    }
    let a_set = report.witness.clone();
    loop {
        let (cur, labels) = t
            .induced(&alive)
            .expect("peeling keeps the remainder connected");
        if cur.n() == 3 {
            break;
        }
        let (peel, next) = match choose_peel(&cur, &report) {
            Ok(found) => found,
            Err(case) => return shape_failure(case),
        };
        let peel = relabel_peel(peel, &labels);
        for v in peel.removed() {
            alive.remove(v);
        }
        peels.push(peel);
        report = next;
    }
    let (trace, embedding) = build_trace(t, &alive, &peels);
    RecognitionResult::Certificate(Certificate {
        trace,
        a_set,
        embedding,
    })
}

/// Tries each vertex of maximum eccentricity as the root, in index order,
/// and keeps the first peel whose remainder still has a unique minimum
/// alliance. Which end of a longest path the case analysis starts from
/// matters: from one end the deepest support can sit in a subdivided star
/// whose removal leaves two minimum sets, while from the other it is the
/// operation actually applied last. On failure the first root's reason is
/// reported.
fn choose_peel(t: &Tree, report: &AllianceReport) -> Result<(Peel, AllianceReport), ShapeCase> {
    let ecc = t.eccentricities();
    let top = ecc.iter().copied().max().unwrap_or(0);
    let mut first_failure = None;
    for root in t.vertices().filter(|&r| ecc[r] == top) {
        let outcome = peel_step(t, &report.witness, root).and_then(|peel| {
            let mut keep = VertexSet::full(t.n());
            for v in peel.removed() {
                keep.remove(v);
            }
            if keep.len() == 2 {
                return Err(ShapeCase::RemainderIsP2);
            }
            let (rest, _) = t
                .induced(&keep)
                .expect("peeling keeps the remainder connected");
            let next = analyze(&rest);
            if !next.unique {
                return Err(ShapeCase::RemainderNotUnique);
            }
            Ok((peel, next))
        });
        match outcome {
            Ok(found) => return Ok(found),
            Err(case) => {
                first_failure.get_or_insert(case);
            }
        }
    }
    Err(first_failure.expect("every tree has a vertex of maximum eccentricity"))
}

fn shape_failure(case: ShapeCase) -> RecognitionResult {
    RecognitionResult::NotInFamily(NotInFamily::ShapeAssertionFailed(case))
}

fn relabel_peel(p: Peel, labels: &[Vertex]) -> Peel {
    let m = |v: Vertex| labels[v];
    match p {
        Peel::O1 { support, leaf } => Peel::O1 {
            support: m(support),
            leaf: m(leaf),
        },
        Peel::O2 {
            support,
            center,
            leaves,
        } => Peel::O2 {
            support: m(support),
            center: m(center),
            leaves: leaves.map(m),
        },
        Peel::O3 { w, leaf_v, pairs } => Peel::O3 {
            w: m(w),
            leaf_v: m(leaf_v),
            pairs: pairs.into_iter().map(|(a, b)| (m(a), m(b))).collect(),
        },
        Peel::O4 { w, stars } => Peel::O4 {
            w: m(w),
            stars: stars
                .into_iter()
                .map(|(c, arms)| (m(c), arms.into_iter().map(|(s, l)| (m(s), m(l))).collect()))
                .collect(),
        },
    }
}

/// Chooses the operation to undo on `t`, whose unique minimum alliance is
/// `d`.
fn peel_step(t: &Tree, d: &VertexSet, root: Vertex) -> Result<Peel, ShapeCase> {
    if let Some(s) = t.vertices().find(|&s| t.leaf_count_at(s) >= 3) {
        let leaf = t.leaves_at(s).last().expect("support has leaves");
        return Ok(Peel::O1 { support: s, leaf });
    }
    let rooted = t.root_at(root);
    let u = t
        .vertices()
        .filter(|&x| t.is_support(x))
        .max_by_key(|&x| (rooted.depth(x), std::cmp::Reverse(x)))
        .expect("a tree on three or more vertices has a support");
    let v = rooted.parent(u).ok_or(ShapeCase::NoGrandparent)?;
    let w = rooted.parent(v).ok_or(ShapeCase::NoGrandparent)?;

    // children of a deepest support are all leaves
    let pendant_leaves = |x: Vertex| -> Option<Vec<Vertex>> {
        let kids = rooted.children(x);
        kids.iter().all(|&c| t.is_leaf(c)).then(|| kids.to_vec())
    };

    if d.contains(v) {
        let leaves = pendant_leaves(u).ok_or(ShapeCase::Case1)?;
        if leaves.len() != 2 || !t.is_support(v) {
            return Err(ShapeCase::Case1);
        }
        return Ok(Peel::O2 {
            support: v,
            center: u,
            leaves: [leaves[0], leaves[1]],
        });
    }

    if t.is_support(v) {
        return Err(ShapeCase::Case2);
    }
    let mut arms = Vec::new();
    for &c in rooted.children(v) {
        let leaves = pendant_leaves(c).ok_or(ShapeCase::Case2)?;
        match leaves.len() {
            1 => arms.push((c, leaves[0])),
            2 => {
                return Ok(Peel::O1 {
                    support: c,
                    leaf: leaves[1],
                })
            }
            _ => return Err(ShapeCase::Case2),
        }
    }

    if d.contains(w) {
        return Ok(Peel::O3 {
            w,
            leaf_v: v,
            pairs: arms,
        });
    }

    let mut stars = Vec::new();
    for &x in rooted.children(w).iter().filter(|&&x| !t.is_support(x)) {
        if d.contains(x) {
            return Err(ShapeCase::Case22);
        }
        let mut arms = Vec::new();
        for &c in rooted.children(x) {
            match pendant_leaves(c).as_deref() {
                Some(&[leaf]) => arms.push((c, leaf)),
                _ => return Err(ShapeCase::Case22),
            }
        }
        if arms.len() < 2 {
            return Err(ShapeCase::Case22);
        }
        stars.push((x, arms));
    }
    Ok(Peel::O4 { w, stars })
}

/// Replays the peels forward from the remaining `P3`, translating input
/// labels into the labels replay will assign.
fn build_trace(t: &Tree, base: &VertexSet, peels: &[Peel]) -> (ConstructionTrace, Vec<Vertex>) {
    let base: Vec<Vertex> = base.iter().collect();
    let center = *base
        .iter()
        .find(|&&x| base.iter().filter(|&&y| t.is_adjacent(x, y)).count() == 2)
        .expect("remainder is a P3");
    let ends: Vec<Vertex> = base.iter().copied().filter(|&x| x != center).collect();
    let mut embedding = vec![ends[0], center, ends[1]];
    let mut label_of = vec![usize::MAX; t.n()];
    for (label, &v) in embedding.iter().enumerate() {
        label_of[v] = label;
    }
    fn assign(v: Vertex, embedding: &mut Vec<Vertex>, label_of: &mut [Vertex]) {
        label_of[v] = embedding.len();
        embedding.push(v);
    }
    let mut steps = Vec::with_capacity(peels.len());
    for peel in peels.iter().rev() {
        match peel {
            Peel::O1 { support, leaf } => {
                steps.push(Operation::O1 {
                    support: label_of[*support],
                });
                assign(*leaf, &mut embedding, &mut label_of);
            }
            Peel::O2 {
                support,
                center,
                leaves,
            } => {
                steps.push(Operation::O2 {
                    support: label_of[*support],
                });
                for v in [*center, leaves[0], leaves[1]] {
                    assign(v, &mut embedding, &mut label_of);
                }
            }
            Peel::O3 { w, leaf_v, pairs } => {
                steps.push(Operation::O3 {
                    support_w: label_of[*w],
                    leaf_v: label_of[*leaf_v],
                    k: pairs.len(),
                });
                for &(end, leaf) in pairs {
                    assign(end, &mut embedding, &mut label_of);
                    assign(leaf, &mut embedding, &mut label_of);
                }
            }
            Peel::O4 { w, stars } => {
                steps.push(Operation::O4 {
                    w: label_of[*w],
                    star_sizes: stars.iter().map(|(_, arms)| arms.len()).collect(),
                });
                for (c, arms) in stars {
                    assign(*c, &mut embedding, &mut label_of);
                    for &(s, _) in arms {
                        assign(s, &mut embedding, &mut label_of);
                    }
                    for &(_, l) in arms {
                        assign(l, &mut embedding, &mut label_of);
                    }
                }
            }
        }
    }
    (ConstructionTrace::new(steps), embedding)
}
