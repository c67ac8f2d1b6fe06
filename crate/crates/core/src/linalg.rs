//! Hermitian eigendecomposition and singular value decomposition by cyclic
//! Jacobi rotations, plus the Schmidt decomposition built on top of them.

use crate::config::Tolerances;
use crate::error::{invalid, Result};
use crate::matrix::{BipartiteVector, CMatrix, C64, ZERO};

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    /// Eigenvector `i` is column `i`.
    pub vectors: CMatrix,
}

impl HermitianEig {
    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i)
    }

    /// `sum f(lambda_i) v_i v_i^*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        self.reconstruct_from(&weights)
    }

    /// `sum w_i v_i v_i^*` for replacement eigenvalues `w`.
    pub fn reconstruct_from(&self, weights: &[f64]) -> CMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let mut out = CMatrix::zeros(n, n);
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = v[(i, k)] * w;
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|l| l)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must be Hermitian within `herm_rel * ||M||_F`; it is
/// symmetrized before the rotations start.
pub fn hermitian_eig(m: &CMatrix, tol: &Tolerances) -> Result<HermitianEig> {
    if !m.is_square() {
        return invalid(format!(
            "eigendecomposition of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        ));
    }
    if !m.is_hermitian(tol.herm_rel) {
        return invalid(format!("matrix is not Hermitian (error {:.3e})", m.hermitian_error()));
    }
    Ok(jacobi_eig(m.hermitian_part()))
}

/// Cyclic Jacobi on an already Hermitian matrix.
pub(crate) fn jacobi_eig(mut a: CMatrix) -> HermitianEig {
    let n = a.rows();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate_eig(&mut a, &mut v, p, q, scale);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]).then(i.cmp(&j)));
    HermitianEig {
        values: order.iter().map(|&i| diag[i]).collect(),
        vectors: CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]),
    }
}

fn rotate_eig(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, scale: f64) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g <= 1e-300 || g <= 1e-18 * scale {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let n = a.rows();
    let e = apq / g;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ec = e.conj();
    // J = D R with D = diag(1, conj(e)) on (p, q); A <- J^* A J, V <- V J.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ec * s;
        a[(k, q)] = akp * s + akq * ec * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * e * s;
        a[(q, k)] = apk * s + aqk * e * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ec * s;
        v[(k, q)] = vkp * s + vkq * ec * c;
    }
}

/// Split a Hermitian matrix into positive operators with orthogonal
/// supports, `M = M_plus - M_minus`.
pub fn positive_part(m: &CMatrix, tol: &Tolerances) -> Result<(CMatrix, CMatrix)> {
    let eig = hermitian_eig(m, tol)?;
    Ok((
        eig.reconstruct_with(|l| l.max(0.0)),
        eig.reconstruct_with(|l| (-l).max(0.0)),
    ))
}

/// Thin singular value decomposition `M = U diag(s) V^*`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Descending.
    pub values: Vec<f64>,
    /// `rows x r` with `r = min(rows, cols)`.
    pub u: CMatrix,
    /// `cols x r`.
    pub v: CMatrix,
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(m: &CMatrix) -> Svd {
    if m.rows() < m.cols() {
        let t = svd(&m.adjoint());
        return Svd {
            values: t.values,
            u: t.v,
            v: t.u,
        };
    }
    let (rows, cols) = (m.rows(), m.cols());
    // Work on columns of W = M V.
    let mut w: Vec<Vec<C64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..cols)
        .map(|j| {
            (0..cols)
                .map(|i| if i == j { C64::new(1.0, 0.0) } else { ZERO })
                .collect()
        })
        .collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = w[p].iter().zip(&w[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let ec = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (zeta * zeta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for cols_vec in [&mut w, &mut v] {
                    let (head, tail) = cols_vec.split_at_mut(q);
                    let (wp, wq) = (&mut head[p], &mut tail[0]);
                    for (x, y) in wp.iter_mut().zip(wq.iter_mut()) {
                        let (a, b) = (*x, *y * ec);
                        *x = a * c - b * s;
                        *y = a * s + b * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = w.iter().map(|col| crate::matrix::norm(col)).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let mut u = CMatrix::zeros(rows, cols);
    let mut vm = CMatrix::zeros(cols, cols);
    let mut values = Vec::with_capacity(cols);
    for (c, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        values.push(sigma);
        for i in 0..rows {
            u[(i, c)] = if sigma > 0.0 { w[j][i] / sigma } else { ZERO };
        }
        for i in 0..cols {
            vm[(i, c)] = v[j][i];
        }
    }
    complete_orthonormal_columns(&mut u, &values);
    Svd { values, u, v: vm }
}

/// Replace columns belonging to zero singular values with vectors that
/// complete the orthonormal set.
fn complete_orthonormal_columns(u: &mut CMatrix, values: &[f64]) {
    let rows = u.rows();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut candidates = (0..rows).map(|i| {
        let mut e = vec![ZERO; rows];
        e[i] = C64::new(1.0, 0.0);
        e
    });
    for (c, &sigma) in values.iter().enumerate() {
        if sigma > 0.0 {
            basis.push(u.column(c));
            continue;
        }
        let fresh = loop {
            let Some(mut e) = candidates.next() else { return };
            for b in &basis {
                let proj = crate::matrix::inner(b, &e);
                for (x, y) in e.iter_mut().zip(b) {
                    *x -= proj * y;
                }
            }
            let n = crate::matrix::norm(&e);
            if n > 1e-8 {
                break e.into_iter().map(|z| z / n).collect::<Vec<_>>();
            }
        };
        for i in 0..rows {
            u[(i, c)] = fresh[i];
        }
        basis.push(fresh);
    }
}

/// `v = sum_i sigma_i left_i (x) right_i` with orthonormal factors.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub values: Vec<f64>,
    pub left: Vec<Vec<C64>>,
    pub right: Vec<Vec<C64>>,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.values.len()
    }
}

/// Schmidt decomposition, keeping terms with `sigma_i > rank_tol * sigma_1`.
///
/// The zero vector has rank 0 and empty factor lists.
pub fn schmidt_decompose(v: &BipartiteVector, tol: &Tolerances) -> SchmidtDecomposition {
    let d = svd(&v.coefficients());
    let top = d.values.first().copied().unwrap_or(0.0);
    let keep = d
        .values
        .iter()
        .take_while(|&&s| top > 0.0 && s > tol.rank * top)
        .count();
    SchmidtDecomposition {
        values: d.values[..keep].to_vec(),
        left: (0..keep).map(|c| d.u.column(c)).collect(),
        // Y = U S V^* gives right factors conj(v_c).
        right: (0..keep)
            .map(|c| d.v.column(c).iter().map(|z| z.conj()).collect())
            .collect(),
    }
}
