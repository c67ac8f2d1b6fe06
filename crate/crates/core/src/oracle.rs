//! Brute-force k-positivity check straight from the definition: sample pure
//! states `a = v v^*` on `K (x) C^k` and look for a negative eigenvalue of
//! `(phi (x) id_k)(a)`. It can only refute, never certify.

use crate::config::Tolerances;
use crate::error::{invalid, Result};
use crate::linalg::jacobi_eig;
use crate::linmap::LinMap;
use crate::matrix::{CMatrix, C64};
use crate::random::{random_unit, rng};

/// Largest `dim_k * dim_h * k^2` accepted by the oracle.
pub const ORACLE_MAX_SIZE: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub samples: usize,
    /// Samples whose image had an eigenvalue below `-psd`.
    pub violations: usize,
    pub min_eigenvalue: f64,
}

impl OracleReport {
    pub fn found_violation(&self) -> bool {
        self.violations > 0
    }
}

pub fn kpos_bruteforce_oracle(
    phi: &LinMap,
    k: usize,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<OracleReport> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    let size = phi.dim_k() * phi.dim_h() * k * k;
    if size > ORACLE_MAX_SIZE {
        return invalid(format!("oracle size {size} exceeds {ORACLE_MAX_SIZE}"));
    }
    let mut g = rng(seed, 0xac1e);
    let mut violations = 0;
    let mut min_eigenvalue = f64::INFINITY;
    for _ in 0..samples {
        let v = random_unit(&mut g, phi.dim_k() * k);
        let m = jacobi_eig(extended_image(phi, k, &v)).min();
        min_eigenvalue = min_eigenvalue.min(m);
        if m < -tol.psd {
            violations += 1;
        }
    }
    Ok(OracleReport {
        samples,
        violations,
        min_eigenvalue,
    })
}

/// `(phi (x) id_k)(v v^*)` with `v` indexed `i * k + l` on `K (x) C^k`:
/// entry `[(r, l), (s, m)] = sum_ij C[(i, r), (j, s)] v_il conj(v_jm)`.
fn extended_image(phi: &LinMap, k: usize, v: &[C64]) -> CMatrix {
    let (dk, dh) = (phi.dim_k(), phi.dim_h());
    let c = phi.choi();
    let n = dh * k;
    let mut out = CMatrix::zeros(n, n);
    for i in 0..dk {
        for j in 0..dk {
            for r in 0..dh {
                for s in 0..dh {
                    let w = c[(i * dh + r, j * dh + s)];
                    if w == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for l in 0..k {
                        let a = w * v[i * k + l];
                        for m in 0..k {
                            out[(r * k + l, s * k + m)] += a * v[j * k + m].conj();
                        }
                    }
                }
            }
        }
    }
    out.hermitian_part()
}
