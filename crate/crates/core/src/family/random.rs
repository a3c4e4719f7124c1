use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{o3_condition_holds, o4_bound, FTree, Operation};
use crate::graph::Vertex;

/// Sampling caps for [`random_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomTraceConfig {
    /// Largest `k` drawn for O3.
    pub max_k: usize,
    /// Largest star size drawn for O4.
    pub max_star: usize,
    /// Draws per step before the step is skipped.
    pub retries: usize,
}

impl Default for RandomTraceConfig {
    fn default() -> Self {
        RandomTraceConfig {
            max_k: 4,
            max_star: 4,
            retries: 50,
        }
    }
}

/// Grows a random member from `P3` by `steps` operations, drawing the
/// operation type uniformly and its parameters uniformly, and rejecting
/// draws whose preconditions fail.
pub fn random_trace(seed: u64, steps: usize) -> FTree {
    random_trace_with(seed, steps, RandomTraceConfig::default())
}

pub fn random_trace_with(seed: u64, steps: usize, config: RandomTraceConfig) -> FTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = FTree::base_p3();
    for _ in 0..steps {
        for _ in 0..config.retries {
            if let Some(op) = draw(&f, &mut rng, config) {
                f = f
                    .apply(&op)
                    .expect("drawn operation satisfies its preconditions");
                break;
            }
        }
    }
    f
}

fn draw(f: &FTree, rng: &mut ChaCha8Rng, config: RandomTraceConfig) -> Option<Operation> {
    let t = f.tree();
    let supports: Vec<Vertex> = t.supports().to_vec();
    match rng.gen_range(0..4) {
        0 => Some(Operation::O1 {
            support: *supports.choose(rng)?,
        }),
        1 => Some(Operation::O2 {
            support: *supports.choose(rng)?,
        }),
        2 => {
            let w = *supports.choose(rng)?;
            let leaves: Vec<Vertex> = t.leaves_at(w).collect();
            let leaf_v = *leaves.choose(rng)?;
            let k = rng.gen_range(1..=config.max_k);
            o3_condition_holds(t, f.a_set(), w).then_some(Operation::O3 {
                support_w: w,
                leaf_v,
                k,
            })
        }
        _ => {
            let w = rng.gen_range(0..t.n());
            if f.a_set().contains(w) {
                return None;
            }
            let bound = o4_bound(t, f.a_set(), w).ok().filter(|&b| b >= 1)?;
            let p = rng.gen_range(1..=bound);
            let star_sizes = (0..p).map(|_| rng.gen_range(2..=config.max_star)).collect();
            Some(Operation::O4 { w, star_sizes })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::replay;
    use crate::solver::{analyze, is_goa_set};

    #[test]
    fn zero_steps_is_base() {
        assert_eq!(random_trace(7, 0), FTree::base_p3());
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(random_trace(42, 10), random_trace(42, 10));
        let distinct: std::collections::HashSet<_> = (0..20)
            .map(|s| random_trace(s, 6).tree().canonical_code())
            .collect();
        assert!(distinct.len() > 10);
    }

    #[test]
    fn generated_members_track_a_minimum_set() {
        for seed in 0..40 {
            let f = random_trace(seed, 8);
            let t = f.tree();
            assert!(t.supports().is_subset(f.a_set()), "seed {seed}");
            assert!(t.leaves().is_disjoint(f.a_set()), "seed {seed}");
            assert_eq!(is_goa_set(t, f.a_set()), Ok(true), "seed {seed}");
            assert_eq!(analyze(t).gamma, f.a_set().len(), "seed {seed}");
            assert_eq!(replay(f.trace()).unwrap(), f);
        }
    }
}
