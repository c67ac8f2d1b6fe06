//! Numerical tolerances and optimizer settings.

use serde::{Deserialize, Serialize};

/// Tolerances shared by every decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Hermiticity tolerance, relative to the Frobenius norm of the matrix.
    pub herm_rel: f64,
    /// Smallest eigenvalue still accepted as non-negative.
    pub psd: f64,
    /// Singular values below `rank * sigma_max` do not count toward a rank.
    pub rank: f64,
    /// Minimal violation required before a refutation is certified.
    pub cert_margin: f64,
    /// Tolerance for `<y, C y> = 0` in the witness preconditions.
    pub ortho: f64,
    /// Minimal norm of the part of `C y` outside `X (x) Y`.
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm_rel: 1e-10,
            psd: 1e-9,
            rank: 1e-9,
            cert_margin: 1e-7,
            ortho: 1e-9,
            residual: 1e-9,
        }
    }
}

/// Settings for the projected power iteration over Schmidt-class vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    pub restarts: usize,
    pub max_iter: usize,
    /// A run stops once one iteration improves the objective by less than this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iter: 500,
            tol: 1e-11,
            seed: 0x5eed,
        }
    }
}

/// Settings for the projected gradient ascent over PPT states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PptConfig {
    pub max_iter: usize,
    /// Cap on alternating-projection sweeps per ascent step.
    pub inner_max_iter: usize,
    pub tol: f64,
    /// Number of consecutive small changes required to declare convergence.
    pub window: usize,
}

impl Default for PptConfig {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            inner_max_iter: 200,
            tol: 1e-9,
            window: 20,
        }
    }
}

/// Everything an analysis run needs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub tol: Tolerances,
    pub opt: OptConfig,
    pub ppt: PptConfig,
}
