//! Linear maps `B(K) -> B(H)` represented by their Choi matrices
//! `C_phi = sum_ij e_ij (x) phi(e_ij)`.

use crate::config::Tolerances;
use crate::error::{invalid, MapError, Result};
use crate::linalg::jacobi_eig;
use crate::matrix::{kron, CMatrix, Subsystem, C64, ZERO};

/// A linear map from `B(K)` to `B(H)`, stored only through its Choi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LinMap {
    dim_k: usize,
    dim_h: usize,
    choi: CMatrix,
}

impl LinMap {
    pub fn from_choi(dim_k: usize, dim_h: usize, choi: CMatrix) -> Result<Self> {
        if dim_k == 0 || dim_h == 0 {
            return invalid("dimensions must be positive");
        }
        if !choi.is_square() || choi.rows() != dim_k * dim_h {
            return invalid(format!(
                "Choi matrix is {}x{}, expected {n}x{n}",
                choi.rows(),
                choi.cols(),
                n = dim_k * dim_h
            ));
        }
        Ok(Self { dim_k, dim_h, choi })
    }

    /// Build a map from the images of the matrix units, `images[i * dim_k + j] = phi(e_ij)`.
    pub fn from_action(dim_k: usize, dim_h: usize, images: &[CMatrix]) -> Result<Self> {
        if images.len() != dim_k * dim_k {
            return invalid(format!("expected {} basis images, got {}", dim_k * dim_k, images.len()));
        }
        if let Some(bad) = images.iter().find(|m| m.rows() != dim_h || m.cols() != dim_h) {
            return invalid(format!(
                "basis image is {}x{}, expected {dim_h}x{dim_h}",
                bad.rows(),
                bad.cols()
            ));
        }
        let n = dim_k * dim_h;
        let choi = CMatrix::from_fn(n, n, |r, c| {
            images[(r / dim_h) * dim_k + c / dim_h][(r % dim_h, c % dim_h)]
        });
        Self::from_choi(dim_k, dim_h, choi)
    }

    /// Build a map from a closure evaluated on every matrix unit.
    pub fn from_fn(dim_k: usize, dim_h: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Result<Self> {
        let images: Vec<CMatrix> = (0..dim_k * dim_k)
            .map(|u| f(&CMatrix::unit(dim_k, u / dim_k, u % dim_k)))
            .collect();
        Self::from_action(dim_k, dim_h, &images)
    }

    pub fn dim_k(&self) -> usize {
        self.dim_k
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    pub fn min_dim(&self) -> usize {
        self.dim_k.min(self.dim_h)
    }

    /// Self-adjoint maps (`phi(a)^* = phi(a^*)`) are exactly those with a
    /// Hermitian Choi matrix.
    pub fn is_self_adjoint(&self, tol: &Tolerances) -> bool {
        self.choi.is_hermitian(tol.herm_rel)
    }

    pub(crate) fn require_self_adjoint(&self, tol: &Tolerances) -> Result<()> {
        if self.is_self_adjoint(tol) {
            Ok(())
        } else {
            Err(MapError::NotSelfAdjoint(self.choi.hermitian_error()))
        }
    }

    /// `phi(a) = Tr_K[(a^t (x) 1) C_phi]`.
    pub fn apply(&self, a: &CMatrix) -> Result<CMatrix> {
        let (dk, dh) = (self.dim_k, self.dim_h);
        if a.rows() != dk || a.cols() != dk {
            return invalid(format!("argument is {}x{}, expected {dk}x{dk}", a.rows(), a.cols()));
        }
        let mut out = CMatrix::zeros(dh, dh);
        for i in 0..dk {
            for j in 0..dk {
                let w = a[(i, j)];
                if w == ZERO {
                    continue;
                }
                for r in 0..dh {
                    for s in 0..dh {
                        out[(r, s)] += w * self.choi[(i * dh + r, j * dh + s)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// The functional `a (x) b -> Tr(phi(a) b^t)`, unnormalized.
    pub fn functional_pair(&self, a: &CMatrix, b: &CMatrix) -> Result<C64> {
        let image = self.apply(a)?;
        if b.rows() != self.dim_h || b.cols() != self.dim_h {
            return invalid(format!(
                "second argument is {}x{}, expected {d}x{d}",
                b.rows(),
                b.cols(),
                d = self.dim_h
            ));
        }
        Ok(image.trace_product(&b.transpose()))
    }

    /// `Tr(C_phi C_psi)` for two self-adjoint maps with equal dimensions.
    pub fn pairing(&self, other: &LinMap, tol: &Tolerances) -> Result<f64> {
        self.same_dims(other)?;
        self.require_self_adjoint(tol)?;
        other.require_self_adjoint(tol)?;
        Ok(self.choi.trace_product(&other.choi).re)
    }

    fn same_dims(&self, other: &LinMap) -> Result<()> {
        if (self.dim_k, self.dim_h) != (other.dim_k, other.dim_h) {
            return invalid(format!(
                "dimension mismatch: {}x{} vs {}x{}",
                self.dim_k, self.dim_h, other.dim_k, other.dim_h
            ));
        }
        Ok(())
    }

    /// `self o inner`: apply `inner` first.
    pub fn compose(&self, inner: &LinMap) -> Result<LinMap> {
        if inner.dim_h != self.dim_k {
            return invalid(format!(
                "cannot compose: inner map lands in dimension {}, outer expects {}",
                inner.dim_h, self.dim_k
            ));
        }
        let images = (0..inner.dim_k * inner.dim_k)
            .map(|u| {
                let e = CMatrix::unit(inner.dim_k, u / inner.dim_k, u % inner.dim_k);
                self.apply(&inner.apply(&e)?)
            })
            .collect::<Result<Vec<_>>>()?;
        LinMap::from_action(inner.dim_k, self.dim_h, &images)
    }

    /// `t o phi`, whose Choi matrix is the partial transpose of `C_phi` on
    /// the second factor.
    pub fn transpose_compose(&self) -> LinMap {
        let choi = self
            .choi
            .partial_transpose(self.dim_k, self.dim_h, Subsystem::Second)
            .expect("Choi matrix dimensions are validated at construction");
        LinMap {
            dim_k: self.dim_k,
            dim_h: self.dim_h,
            choi,
        }
    }

    /// `phi (x) id_k : B(K (x) C^k) -> B(H (x) C^k)`, ancilla as the second factor.
    pub fn tensor_id(&self, k: usize) -> Result<LinMap> {
        if k == 0 {
            return invalid("ancilla dimension must be positive");
        }
        let dk = self.dim_k * k;
        let images = (0..dk * dk)
            .map(|u| {
                let (r, c) = (u / dk, u % dk);
                let (i, l) = (r / k, r % k);
                let (j, m) = (c / k, c % k);
                Ok(kron(
                    &self.apply(&CMatrix::unit(self.dim_k, i, j))?,
                    &CMatrix::unit(k, l, m),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        LinMap::from_action(dk, self.dim_h * k, &images)
    }

    pub fn scale(&self, s: f64) -> LinMap {
        LinMap {
            dim_k: self.dim_k,
            dim_h: self.dim_h,
            choi: self.choi.scale(s),
        }
    }

    pub fn add(&self, other: &LinMap) -> Result<LinMap> {
        self.same_dims(other)?;
        Ok(LinMap {
            dim_k: self.dim_k,
            dim_h: self.dim_h,
            choi: &self.choi + &other.choi,
        })
    }
}

/// A density matrix on `K (x) H`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDensity {
    dim_k: usize,
    dim_h: usize,
    rho: CMatrix,
    is_ppt: bool,
}

impl StateDensity {
    /// Validates positivity (within `psd`) and unit trace (within 1e-10),
    /// and records whether the partial transpose is positive.
    pub fn new(dim_k: usize, dim_h: usize, rho: CMatrix, tol: &Tolerances) -> Result<Self> {
        if !rho.is_square() || rho.rows() != dim_k * dim_h {
            return invalid(format!(
                "state is {}x{}, expected {n}x{n}",
                rho.rows(),
                rho.cols(),
                n = dim_k * dim_h
            ));
        }
        if !rho.is_hermitian(tol.herm_rel) {
            return invalid("state is not Hermitian");
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return invalid(format!("state trace is {tr}, expected 1"));
        }
        let rho = rho.hermitian_part();
        let min = jacobi_eig(rho.clone()).min();
        if min < -tol.psd {
            return invalid(format!("state has negative eigenvalue {min:.3e}"));
        }
        let pt = rho.partial_transpose(dim_k, dim_h, Subsystem::Second)?;
        let is_ppt = jacobi_eig(pt).min() >= -tol.psd;
        Ok(Self {
            dim_k,
            dim_h,
            rho,
            is_ppt,
        })
    }

    pub fn dim_k(&self) -> usize {
        self.dim_k
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn is_ppt(&self) -> bool {
        self.is_ppt
    }

    /// `Tr(rho C)`.
    pub fn expectation(&self, c: &CMatrix) -> f64 {
        self.rho.trace_product(c).re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::GalleryMap;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn trace_map_has_identity_choi() {
        let tr = LinMap::from_fn(3, 3, |x| CMatrix::identity(3).scale_c(x.trace())).unwrap();
        assert_eq!(tr.choi(), &CMatrix::identity(9));
        let a = CMatrix::diag_real(&[1.0, 2.0, 3.0]);
        assert_eq!(tr.apply(&a).unwrap(), CMatrix::identity(3).scale(6.0));
    }

    #[test]
    fn identity_map_choi_spectrum() {
        let id = LinMap::from_fn(2, 2, |x| x.clone()).unwrap();
        let e = jacobi_eig(id.choi().clone());
        for (got, want) in e.values.iter().zip([2.0, 0.0, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        let zero = LinMap::from_fn(2, 3, |_| CMatrix::zeros(3, 3)).unwrap();
        assert_eq!(zero.choi(), &CMatrix::zeros(6, 6));
    }

    #[test]
    fn from_action_rejects_mismatch() {
        assert!(LinMap::from_action(2, 2, &vec![CMatrix::identity(2); 3]).is_err());
        assert!(LinMap::from_action(2, 2, &vec![CMatrix::identity(3); 4]).is_err());
        let id = LinMap::from_fn(2, 2, |x| x.clone()).unwrap();
        assert!(id.apply(&CMatrix::identity(3)).is_err());
    }

    #[test]
    fn apply_inverts_choi() {
        let id = GalleryMap::Identity { n: 3 }.build().unwrap();
        let a = CMatrix::from_fn(3, 3, |i, j| C64::new(i as f64 - j as f64, (i * j) as f64));
        assert!((&id.apply(&a).unwrap() - &a).max_abs() < 1e-12);
        let choi = GalleryMap::Choi3.build().unwrap();
        assert_eq!(
            choi.apply(&CMatrix::unit(3, 0, 0)).unwrap(),
            CMatrix::diag_real(&[1.0, 1.0, 0.0])
        );
    }

    #[test]
    fn functional_pair_examples() {
        let id = GalleryMap::Identity { n: 2 }.build().unwrap();
        let e11 = CMatrix::unit(2, 0, 0);
        assert_eq!(id.functional_pair(&e11, &e11).unwrap(), C64::new(1.0, 0.0));

        let tr = GalleryMap::Trace { dim_k: 2, dim_h: 3 }.build().unwrap();
        let v = tr
            .functional_pair(&CMatrix::identity(2), &CMatrix::identity(3))
            .unwrap();
        assert_eq!(v, C64::new(6.0, 0.0));

        // t(e12) = e21, so Tr(t(e12) e12^t) = Tr(e21 e21) = 0 and
        // Tr(t(e12) e21^t) = Tr(e21 e12) = 1.
        let t = GalleryMap::Transpose { n: 2 }.build().unwrap();
        let e12 = CMatrix::unit(2, 0, 1);
        let e21 = CMatrix::unit(2, 1, 0);
        assert_eq!(t.functional_pair(&e12, &e12).unwrap(), ZERO);
        assert_eq!(t.functional_pair(&e12, &e21).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn pairing_examples() {
        let tr = GalleryMap::Trace { dim_k: 2, dim_h: 3 }.build().unwrap();
        assert_eq!(tr.pairing(&tr, &tol()).unwrap(), 6.0);
        let id = GalleryMap::Identity { n: 2 }.build().unwrap();
        assert!((id.pairing(&id, &tol()).unwrap() - 4.0).abs() < 1e-14);
        let bad = LinMap::from_choi(1, 2, CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])).unwrap();
        assert!(matches!(bad.pairing(&bad, &tol()), Err(MapError::NotSelfAdjoint(_))));
        assert!(tr.pairing(&id, &tol()).is_err());
    }

    #[test]
    fn transpose_compositions() {
        let t = GalleryMap::Transpose { n: 2 }.build().unwrap();
        let id = GalleryMap::Identity { n: 2 }.build().unwrap();
        assert_eq!(t.compose(&t).unwrap(), id);
        assert_eq!(t.transpose_compose().transpose_compose(), t);
        // C_{t o id} is the swap.
        let swap = CMatrix::from_fn(4, 4, |r, c| {
            if r == (c % 2) * 2 + c / 2 {
                C64::new(1.0, 0.0)
            } else {
                ZERO
            }
        });
        assert_eq!(id.transpose_compose().choi(), &swap);
        assert_eq!(id.transpose_compose(), t);
    }

    #[test]
    fn transpose_compose_agrees_with_composition() {
        let choi3 = GalleryMap::Choi3.build().unwrap();
        let t = GalleryMap::Transpose { n: 3 }.build().unwrap();
        assert_eq!(choi3.transpose_compose(), t.compose(&choi3).unwrap());
    }

    #[test]
    fn tensor_id_acts_on_product_basis() {
        let tr = GalleryMap::Trace { dim_k: 2, dim_h: 2 }.build().unwrap();
        let big = tr.tensor_id(3).unwrap();
        assert_eq!((big.dim_k(), big.dim_h()), (6, 6));
        for (i, j, l, m) in [(0, 0, 1, 2), (0, 1, 0, 0), (1, 1, 2, 2)] {
            let input = kron(&CMatrix::unit(2, i, j), &CMatrix::unit(3, l, m));
            let expect = kron(&tr.apply(&CMatrix::unit(2, i, j)).unwrap(), &CMatrix::unit(3, l, m));
            assert_eq!(big.apply(&input).unwrap(), expect);
        }
    }

    #[test]
    fn compose_checks_dims() {
        let a = GalleryMap::Trace { dim_k: 2, dim_h: 3 }.build().unwrap();
        assert!(a.compose(&a).is_err());
        let b = GalleryMap::Trace { dim_k: 3, dim_h: 2 }.build().unwrap();
        let ab = a.compose(&b).unwrap();
        assert_eq!((ab.dim_k(), ab.dim_h()), (3, 3));
    }

    #[test]
    fn state_density_validation() {
        let mixed = CMatrix::identity(4).scale(0.25);
        let s = StateDensity::new(2, 2, mixed, &tol()).unwrap();
        assert!(s.is_ppt());
        let bell = CMatrix::from_real_rows(&[
            &[0.5, 0.0, 0.0, 0.5],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.5, 0.0, 0.0, 0.5],
        ]);
        assert!(!StateDensity::new(2, 2, bell, &tol()).unwrap().is_ppt());
        assert!(StateDensity::new(2, 2, CMatrix::identity(4), &tol()).is_err());
        assert!(StateDensity::new(2, 2, CMatrix::diag_real(&[1.5, -0.5, 0.0, 0.0]), &tol()).is_err());
    }
}
