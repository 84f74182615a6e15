//! Small dense linear-algebra layer for the consensus simulator.

// `!(x > 0.0)` is how NaN gets rejected here
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod lyap;
pub mod passivity;
pub mod tol;
pub mod trigger;

pub use error::{MatError, Result};
pub use linalg::{
    block_diag, controllable, eig_extrema, is_hurwitz, kron, max_real_eig, observable, pinv, rank,
    spectral_norm, Mat,
};
pub use lyap::{lyap_residual, solve_lyapunov, LyapunovPair};
pub use passivity::{
    check_positive_real, default_grid, freq_response, log_grid, PassivityCertificate,
};
pub use trigger::{trigger_constants, TriggerConstants, TriggerParams};

/// Row-major literal helper for tests and built-in scenarios.
pub fn mat(rows: usize, cols: usize, data: &[f64]) -> Mat {
    Mat::from_row_slice(rows, cols, data)
}
