//! The canonical split of a self-adjoint map: with `c = ||C_phi^+||`,
//! `c^-1 phi = Tr - phi_cp` where `C_{phi_cp} = 1 - c^-1 C_phi >= 0`.

use crate::config::Tolerances;
use crate::error::{MapError, Result};
use crate::linalg::jacobi_eig;
use crate::linmap::LinMap;
use crate::matrix::CMatrix;

/// The pair `(c, phi_cp)` together with the map it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct CpSplit {
    /// Operator norm of the positive part of `C_phi`, i.e. `lambda_max(C_phi)`.
    pub c: f64,
    pub phi_cp: LinMap,
    pub source: LinMap,
}

impl CpSplit {
    /// `lambda_max(C_{phi_cp})`; at most 1 exactly when the source is
    /// completely positive.
    pub fn cp_max_eigenvalue(&self) -> f64 {
        jacobi_eig(self.phi_cp.choi().clone()).max()
    }
}

/// Compute the split. `c` is taken as `lambda_max(C_phi)`, which equals the
/// norm of the positive part because the parts have orthogonal supports.
pub fn cp_split(phi: &LinMap, tol: &Tolerances) -> Result<CpSplit> {
    phi.require_self_adjoint(tol)?;
    let choi = phi.choi().hermitian_part();
    let c = jacobi_eig(choi.clone()).max();
    let has_positive_part = c > tol.psd * choi.frobenius_norm() && c > 0.0;
    if !has_positive_part {
        return Err(MapError::NegativeOfCpMap);
    }
    let n = choi.rows();
    let cp = (&CMatrix::identity(n) - &choi.scale(1.0 / c)).hermitian_part();
    Ok(CpSplit {
        c,
        phi_cp: LinMap::from_choi(phi.dim_k(), phi.dim_h(), cp)?,
        source: phi.clone(),
    })
}

/// `max_ij || c^-1 phi(e_ij) - (Tr(e_ij) 1 - phi_cp(e_ij)) ||_F`.
pub fn verify_split(s: &CpSplit) -> f64 {
    let (dk, dh) = (s.source.dim_k(), s.source.dim_h());
    let mut worst: f64 = 0.0;
    for i in 0..dk {
        for j in 0..dk {
            let e = CMatrix::unit(dk, i, j);
            let lhs = s
                .source
                .apply(&e)
                .expect("unit has the input dimension")
                .scale(1.0 / s.c);
            let mut rhs = -&s.phi_cp.apply(&e).expect("unit has the input dimension");
            if i == j {
                rhs = &rhs + &CMatrix::identity(dh);
            }
            worst = worst.max((&lhs - &rhs).frobenius_norm());
        }
    }
    worst
}
