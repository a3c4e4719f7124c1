//! Exhaustive enumeration of free trees and the verification harnesses built
//! on it.

mod free_trees;
mod observations;
mod verify;

pub use free_trees::{
    enumerate_trees, enumerate_trees_capped, EnumerationError, FreeTrees, MAX_ORDER,
};
pub use observations::{verify_observations, ObservationKind, ObservationReport, ObservationStats};
pub use verify::{
    check_tree, rows_to_csv, verify_theorem, verify_theorem_with, FailureKind, VerificationFailure,
    VerificationRow, VerifyError, VerifyOptions, VerifyOutcome, CSV_HEADER,
};
