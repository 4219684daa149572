//! Numerical tolerances shared by every module.

use serde::{Deserialize, Serialize};

/// Tolerance record. Every threshold used by the library lives here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Generic equality tolerance (means, normalization checks).
    pub equality: f64,
    /// Target width for bracketing root finders.
    pub root: f64,
    /// A stop-loss slack counts as satisfied when it is at least `-feasibility`.
    pub feasibility: f64,
    /// Two ratios closer than this are considered equal when merging antennas.
    pub merge: f64,
    /// Stopping threshold on the projected-gradient norm of the entropy dual.
    pub dual_gradient: f64,
    /// Iteration cap for the entropy dual solver.
    pub max_iterations: usize,
    /// Number of coarse cells scanned before bisecting for the smallest root.
    pub scan_cells: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            equality: 1e-9,
            root: 1e-12,
            feasibility: 1e-9,
            merge: 1e-12,
            dual_gradient: 1e-9,
            max_iterations: 10_000,
            scan_cells: 256,
        }
    }
}
