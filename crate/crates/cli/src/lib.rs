//! Library side of the `curverewire` command-line tool.
//!
//! The binary in `main.rs` is a thin argument-parsing shell; everything it
//! does is implemented here so integration tests can drive the exact same
//! code paths in-process:
//!
//! - [`jsonfmt`] — JSON serialization with full-precision floats,
//! - [`stats`] — rank correlation and bootstrap confidence intervals,
//! - [`record`] — experiment records and output-file helpers,
//! - [`experiments`] — the command bodies (trajectories, benches, training
//!   runs, hyper-parameter sweeps).

use std::fmt;

pub mod experiments;
pub mod jsonfmt;
pub mod record;
pub mod stats;

/// Marker error for inputs (graph files, dataset directories) that could not
/// be read or parsed. The binary maps any error chain containing this type to
/// exit code 2, keeping "your input is bad" distinct from "the computation
/// failed" (exit 1) and "model/graph fingerprint mismatch" (exit 3).
#[derive(Debug)]
pub struct InputUnreadable(pub String);

impl fmt::Display for InputUnreadable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unreadable input: {}", self.0)
    }
}

impl std::error::Error for InputUnreadable {}

/// Exit code for errors whose chain contains [`InputUnreadable`].
pub const EXIT_UNREADABLE_INPUT: u8 = 2;
/// Exit code for graph-fingerprint mismatches (stale model or curvature
/// vector applied to a different graph).
pub const EXIT_FINGERPRINT_MISMATCH: u8 = 3;

/// Walk an error chain and pick the process exit code.
pub fn exit_code_for(err: &anyhow::Error) -> u8 {
    use curverewire_core::curvature::CurvatureError;
    use curverewire_core::rewiring::RewiringError;
    use curverewire_core::sgc::SgcError;

    for cause in err.chain() {
        if cause.downcast_ref::<InputUnreadable>().is_some() {
            return EXIT_UNREADABLE_INPUT;
        }
        if matches!(
            cause.downcast_ref::<SgcError>(),
            Some(SgcError::FingerprintMismatch { .. })
        ) || matches!(
            cause.downcast_ref::<RewiringError>(),
            Some(RewiringError::FingerprintMismatch { .. })
        ) || matches!(
            cause.downcast_ref::<CurvatureError>(),
            Some(CurvatureError::FingerprintMismatch { .. })
        ) {
            return EXIT_FINGERPRINT_MISMATCH;
        }
    }
    1
}
