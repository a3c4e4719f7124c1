//! Exhaustive check that the solver's uniqueness verdict and the peeling
//! recognizer agree on every tree of each order, with every certificate
//! replayed and matched back onto its tree.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use serde::Serialize;

use super::free_trees::{enumerate_trees, EnumerationError, MAX_ORDER};
use crate::family::{decompose, replay, Certificate, RecognitionResult};
use crate::graph::Tree;
use crate::solver::{analyze, AllianceReport};

/// Aggregate over all trees of one order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationRow {
    pub n: usize,
    pub trees_total: usize,
    pub ugoa_count: usize,
    /// Trees where uniqueness and recognition disagree.
    pub mismatches: usize,
    /// Certificates that fail to replay onto their tree, or unique trees
    /// whose minimum set misses a support or contains a leaf.
    pub certificate_failures: usize,
    #[serde(serialize_with = "as_millis")]
    pub elapsed: Duration,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u128(d.as_millis())
}

impl VerificationRow {
    fn empty(n: usize) -> Self {
        VerificationRow {
            n,
            trees_total: 0,
            ugoa_count: 0,
            mismatches: 0,
            certificate_failures: 0,
            elapsed: Duration::ZERO,
        }
    }

    /// Row fields without timing, as `key=value` pairs.
    pub fn summary(&self) -> String {
        format!(
            "n={} trees_total={} ugoa_count={} mismatches={} certificate_failures={}",
            self.n, self.trees_total, self.ugoa_count, self.mismatches, self.certificate_failures
        )
    }
}

pub const CSV_HEADER: &str = "n,trees_total,ugoa_count,mismatches,certificate_failures,elapsed_ms";

pub fn rows_to_csv(rows: &[VerificationRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            r.trees_total,
            r.ugoa_count,
            r.mismatches,
            r.certificate_failures,
            r.elapsed.as_millis()
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FailureKind {
    /// `unique` is the solver's verdict; `recognition` what peeling said.
    Mismatch {
        unique: bool,
        recognition: String,
    },
    CertificateFailure {
        detail: String,
    },
}

/// A tree on which the harness found a disagreement, with enough context to
/// reproduce it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationFailure {
    pub n: usize,
    /// Position of the tree in the enumeration order for `n`.
    pub index: usize,
    pub tree: Tree,
    pub kind: FailureKind,
    pub report: AllianceReport,
}

impl fmt::Display for VerificationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "verification failure at n={} index={}: {:?}",
            self.n, self.index, self.kind
        )?;
        writeln!(
            f,
            "gamma={} unique={} witness={}",
            self.report.gamma, self.report.unique, self.report.witness
        )?;
        writeln!(f, "forced_in_min={:?}", self.report.forced_in_min)?;
        writeln!(f, "forced_out_min={:?}", self.report.forced_out_min)?;
        write!(f, "{}", self.tree.to_edge_list())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Range(#[from] EnumerationError),
    #[error("{0}")]
    Failed(Box<VerificationFailure>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub max_n: usize,
    pub jobs: usize,
    /// Stop at the first failing tree of the first failing order.
    pub fail_fast: bool,
}

impl VerifyOptions {
    pub fn new(max_n: usize) -> Self {
        VerifyOptions {
            max_n,
            jobs: 1,
            fail_fast: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub rows: Vec<VerificationRow>,
    /// Failures in enumeration order. With `fail_fast` at most one.
    pub failures: Vec<VerificationFailure>,
}

/// Checks every tree of order `1..=n_max` and fails on the first
/// disagreement.
pub fn verify_theorem(n_max: usize) -> Result<Vec<VerificationRow>, VerifyError> {
    let outcome = verify_theorem_with(VerifyOptions::new(n_max))?;
    match outcome.failures.into_iter().next() {
        Some(failure) => Err(VerifyError::Failed(Box::new(failure))),
        None => Ok(outcome.rows),
    }
}

pub fn verify_theorem_with(options: VerifyOptions) -> Result<VerifyOutcome, EnumerationError> {
    if options.max_n == 0 || options.max_n > MAX_ORDER {
        return Err(EnumerationError::TooLarge {
            n: options.max_n,
            cap: MAX_ORDER,
        });
    }
    let jobs = options.jobs.max(1);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for n in 1..=options.max_n {
        let start = Instant::now();
        let (mut row, mut found) = verify_order(n, jobs, options.fail_fast)?;
        row.elapsed = start.elapsed();
        rows.push(row);
        if options.fail_fast && !found.is_empty() {
            failures.push(found.swap_remove(0));
            break;
        }
        failures.extend(found);
    }
    Ok(VerifyOutcome { rows, failures })
}

/// Trees are striped over workers by enumeration index; each worker runs its
/// own enumerator and keeps every `jobs`-th tree. Under `fail_fast` the row
/// counts trees up to and including the first failure, whatever the
/// schedule.
fn verify_order(
    n: usize,
    jobs: usize,
    fail_fast: bool,
) -> Result<(VerificationRow, Vec<VerificationFailure>), EnumerationError> {
    enumerate_trees(n)?;
    let lowest_failure = AtomicUsize::new(usize::MAX);
    let mut outcomes: Vec<(usize, bool, Option<VerificationFailure>)> =
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|stripe| {
                    let lowest_failure = &lowest_failure;
                    scope.spawn(move || {
                        let mut outcomes = Vec::new();
                        let trees = enumerate_trees(n).expect("order checked above");
                        for (index, tree) in trees.enumerate().skip(stripe).step_by(jobs) {
                            if fail_fast && index > lowest_failure.load(Ordering::Relaxed) {
                                break;
                            }
                            let report = analyze(&tree);
                            let unique = report.unique;
                            let failure = check_tree(&tree, &report).err().map(|kind| {
                                lowest_failure.fetch_min(index, Ordering::Relaxed);
                                VerificationFailure {
                                    n,
                                    index,
                                    tree,
                                    kind,
                                    report,
                                }
                            });
                            let stop = fail_fast && failure.is_some();
                            outcomes.push((index, unique, failure));
                            if stop {
                                break;
                            }
                        }
                        outcomes
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("verification worker panicked"))
                .collect()
        });
    outcomes.sort_by_key(|o| o.0);
    if fail_fast {
        if let Some(cut) = outcomes.iter().position(|o| o.2.is_some()) {
            outcomes.truncate(cut + 1);
        }
    }
    let mut row = VerificationRow::empty(n);
    let mut failures = Vec::new();
    for (_, unique, failure) in outcomes {
        row.trees_total += 1;
        row.ugoa_count += usize::from(unique);
        if let Some(f) = failure {
            match f.kind {
                FailureKind::Mismatch { .. } => row.mismatches += 1,
                FailureKind::CertificateFailure { .. } => row.certificate_failures += 1,
            }
            failures.push(f);
        }
    }
    Ok((row, failures))
}

/// Recognition must succeed exactly on trees with a unique minimum set, and
/// every certificate must map back onto the tree.
pub fn check_tree(t: &Tree, report: &AllianceReport) -> Result<(), FailureKind> {
    let recognition = decompose(t);
    let member = matches!(
        recognition,
        RecognitionResult::Certificate(_) | RecognitionResult::TrivialK1
    );
    if member != report.unique {
        let recognition = match &recognition {
            RecognitionResult::NotInFamily(reason) => reason.to_string(),
            RecognitionResult::Certificate(c) => format!("certificate {}", c.trace.to_inline()),
            RecognitionResult::TrivialK1 => "K1".into(),
        };
        return Err(FailureKind::Mismatch {
            unique: report.unique,
            recognition,
        });
    }
    if !report.unique {
        return Ok(());
    }
    let fail = |detail: String| Err(FailureKind::CertificateFailure { detail });
    if t.n() >= 3
        && !(t.supports().is_subset(&report.witness) && t.leaves().is_disjoint(&report.witness))
    {
        return fail(format!(
            "unique minimum set {} misses a support or holds a leaf",
            report.witness
        ));
    }
    match &recognition {
        RecognitionResult::Certificate(c) => check_certificate(t, report, c).or_else(fail),
        _ => Ok(()),
    }
}

fn check_certificate(t: &Tree, report: &AllianceReport, c: &Certificate) -> Result<(), String> {
    let rebuilt = replay(&c.trace).map_err(|e| format!("replay rejected: {e}"))?;
    let r = rebuilt.tree();
    if r.n() != t.n() || r.canonical_code() != t.canonical_code() {
        return Err("replayed tree is not isomorphic to the input".into());
    }
    let mut hit = vec![false; t.n()];
    if c.embedding.len() != t.n()
        || c.embedding
            .iter()
            .any(|&v| v >= t.n() || std::mem::replace(&mut hit[v], true))
    {
        return Err("embedding is not a bijection".into());
    }
    if let Some(&(a, b)) = r
        .edges()
        .iter()
        .find(|&&(a, b)| !t.is_adjacent(c.embedding[a], c.embedding[b]))
    {
        return Err(format!("embedding does not preserve edge {a}-{b}"));
    }
    let mapped = rebuilt.a_set().mapped(&c.embedding, t.n());
    if mapped != report.witness || c.a_set != report.witness {
        return Err(format!(
            "tracked set {mapped} differs from unique minimum set {}",
            report.witness
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_orders_census() {
        let rows = verify_theorem(6).unwrap();
        let census: Vec<usize> = rows.iter().map(|r| r.ugoa_count).collect();
        assert_eq!(&census[..5], &[1, 0, 1, 1, 2]);
        assert!(rows
            .iter()
            .all(|r| r.mismatches == 0 && r.certificate_failures == 0));
        assert_eq!(
            rows.iter().map(|r| r.trees_total).collect::<Vec<_>>(),
            vec![1, 1, 1, 2, 3, 6]
        );
    }

    #[test]
    fn csv_layout() {
        let mut row = VerificationRow::empty(3);
        row.trees_total = 1;
        row.ugoa_count = 1;
        row.elapsed = Duration::from_millis(12);
        assert_eq!(
            rows_to_csv(&[row.clone()]),
            "n,trees_total,ugoa_count,mismatches,certificate_failures,elapsed_ms\n3,1,1,0,0,12\n"
        );
        assert_eq!(
            row.summary(),
            "n=3 trees_total=1 ugoa_count=1 mismatches=0 certificate_failures=0"
        );
    }

    #[test]
    fn worker_count_does_not_change_rows() {
        let strip = |rows: Vec<VerificationRow>| -> Vec<String> {
            rows.iter().map(VerificationRow::summary).collect()
        };
        let one = verify_theorem_with(VerifyOptions {
            max_n: 9,
            jobs: 1,
            fail_fast: true,
        })
        .unwrap();
        let four = verify_theorem_with(VerifyOptions {
            max_n: 9,
            jobs: 4,
            fail_fast: true,
        })
        .unwrap();
        assert_eq!(strip(one.rows), strip(four.rows));
    }

    #[test]
    fn rejects_out_of_range_orders() {
        assert!(verify_theorem_with(VerifyOptions::new(0)).is_err());
        assert!(verify_theorem_with(VerifyOptions::new(19)).is_err());
    }
}
