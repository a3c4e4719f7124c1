//! Constant-amortized-time generation of free trees by level sequences.
//!
//! Each free tree is represented by the level sequence of a canonical rooting
//! at its center (or a canonical end of its central edge). Successors are
//! produced in reverse lexicographic order of level sequences, skipping runs
//! of rooted trees whose rooting is not canonical.

use thiserror::Error;

use crate::graph::Tree;

/// Largest order accepted by [`enumerate_trees`].
pub const MAX_ORDER: usize = 18;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("order {n} outside supported range 1..={cap}")]
    TooLarge { n: usize, cap: usize },
}

/// Streams one representative per isomorphism class of trees on `n`
/// vertices, always in the same order.
pub fn enumerate_trees(n: usize) -> Result<FreeTrees, EnumerationError> {
    enumerate_trees_capped(n, MAX_ORDER)
}

pub fn enumerate_trees_capped(n: usize, cap: usize) -> Result<FreeTrees, EnumerationError> {
    if n == 0 || n > cap {
        return Err(EnumerationError::TooLarge { n, cap });
    }
    Ok(FreeTrees::new(n))
}

#[derive(Debug, Clone)]
pub struct FreeTrees {
    n: usize,
    next: Option<Vec<usize>>,
}

impl FreeTrees {
    fn new(n: usize) -> Self {
        if n == 1 {
            return FreeTrees {
                n,
                next: Some(vec![0]),
            };
        }
        // path rooted at its center
        let mut start: Vec<usize> = (0..=n / 2).collect();
        start.extend(1..n.div_ceil(2));
        FreeTrees {
            n,
            next: canonical_successor(start),
        }
    }
}

impl Iterator for FreeTrees {
    type Item = Tree;

    fn next(&mut self) -> Option<Tree> {
        let layout = self.next.take()?;
        let tree = layout_to_tree(&layout);
        if self.n > 1 {
            self.next = next_rooted_tree(&layout, None).and_then(canonical_successor);
        }
        Some(tree)
    }
}

/// Splits a level sequence into the first subtree of the root (levels
/// shifted up by one) and the rest of the tree (with the root kept).
fn split(layout: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let m = layout
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d == 1)
        .nth(1)
        .map_or(layout.len(), |(i, _)| i);
    let left = layout[1..m].iter().map(|&d| d - 1).collect();
    let mut rest = vec![0];
    rest.extend_from_slice(&layout[m..]);
    (left, rest)
}

/// Next rooted tree in reverse lexicographic level-sequence order, changing
/// positions from `p` on (by default, the last position not at level 1).
fn next_rooted_tree(pred: &[usize], p: Option<usize>) -> Option<Vec<usize>> {
    let p = match p {
        Some(p) => p,
        None => {
            let mut p = pred.len() - 1;
            while pred[p] == 1 {
                p -= 1;
            }
            p
        }
    };
    if p == 0 {
        return None;
    }
    let mut q = p - 1;
    while pred[q] + 1 != pred[p] {
        q -= 1;
    }
    let mut result = pred.to_vec();
    for i in p..result.len() {
        result[i] = result[i - p + q];
    }
    Some(result)
}

/// Returns `candidate` if it is the canonical rooting of its free tree,
/// otherwise jumps to the next canonical sequence.
fn canonical_successor(candidate: Vec<usize>) -> Option<Vec<usize>> {
    let (left, rest) = split(&candidate);
    let left_height = left.iter().copied().max().unwrap_or(0);
    let rest_height = rest.iter().copied().max().unwrap_or(0);
    let mut valid = rest_height >= left_height;
    if valid
        && rest_height == left_height
        && (left.len() > rest.len() || (left.len() == rest.len() && left > rest))
    {
        valid = false;
    }
    if valid {
        return Some(candidate);
    }
    let p = left.len();
    let mut jumped = next_rooted_tree(&candidate, Some(p))?;
    if candidate[p] > 2 {
        let (new_left, _) = split(&jumped);
        let new_left_height = new_left.iter().copied().max().unwrap_or(0);
        let len = jumped.len();
        let suffix = new_left_height + 1;
        for (offset, level) in (1..=suffix).enumerate() {
            jumped[len - suffix + offset] = level;
        }
    }
    Some(jumped)
}

fn layout_to_tree(layout: &[usize]) -> Tree {
    let mut last_at_level: Vec<usize> = Vec::new();
    let mut edges = Vec::with_capacity(layout.len().saturating_sub(1));
    for (v, &level) in layout.iter().enumerate() {
        if level > 0 {
            edges.push((last_at_level[level - 1], v));
        }
        last_at_level.truncate(level);
        last_at_level.push(v);
    }
    Tree::from_edges(layout.len(), &edges).expect("level sequence encodes a tree")
}
