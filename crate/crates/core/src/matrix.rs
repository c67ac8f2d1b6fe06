//! Dense complex matrices and bipartite vectors.
//!
//! Tensor index convention, used everywhere in the crate: the basis vector
//! `e_i (x) f_j` of `K (x) H` has index `i * dim_h + j`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{invalid, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Real matrix from nested rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| {
            assert_eq!(rows[i].len(), c, "ragged rows");
            C64::new(rows[i][j], 0.0)
        })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    /// Matrix unit `e_ij` in an `n x n` algebra.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    /// Rank-one operator `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation `|M_ij - conj(M_ji)|`.
    pub fn hermitian_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut err: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                err = err.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        err
    }

    /// Hermitian within `rel_tol * ||M||_F`.
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.is_square() && self.hermitian_error() <= rel_tol * self.frobenius_norm()
    }

    /// `(M + M^*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(v.len(), self.cols);
        self.data
            .chunks_exact(self.cols.max(1))
            .take(self.rows)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[l * other.cols..(l + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `<v, M v>` with the inner product antilinear in the first slot.
    pub fn quadratic_form(&self, v: &[C64]) -> C64 {
        inner(v, &self.matvec(v))
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for i in 0..self.rows {
            for l in 0..self.cols {
                acc += self[(i, l)] * other[(l, i)];
            }
        }
        acc
    }

    /// Partial transpose on `K (x) H` with `dim_k * dim_h = rows`.
    ///
    /// `Subsystem::Second` transposes each `dim_h x dim_h` block in place;
    /// `Subsystem::First` swaps the block indices.
    pub fn partial_transpose(&self, dim_k: usize, dim_h: usize, which: Subsystem) -> Result<Self> {
        check_bipartite(self, dim_k, dim_h)?;
        Ok(Self::from_fn(self.rows, self.cols, |r, c| {
            let (i, a) = (r / dim_h, r % dim_h);
            let (j, b) = (c / dim_h, c % dim_h);
            match which {
                Subsystem::Second => self[(i * dim_h + b, j * dim_h + a)],
                Subsystem::First => self[(j * dim_h + a, i * dim_h + b)],
            }
        }))
    }

    /// Partial trace over the first factor of `K (x) H`.
    pub fn partial_trace_first(&self, dim_k: usize, dim_h: usize) -> Result<Self> {
        check_bipartite(self, dim_k, dim_h)?;
        Ok(Self::from_fn(dim_h, dim_h, |a, b| {
            (0..dim_k).map(|i| self[(i * dim_h + a, i * dim_h + b)]).sum()
        }))
    }

    /// Partial trace over the second factor of `K (x) H`.
    pub fn partial_trace_second(&self, dim_k: usize, dim_h: usize) -> Result<Self> {
        check_bipartite(self, dim_k, dim_h)?;
        Ok(Self::from_fn(dim_k, dim_k, |i, j| {
            (0..dim_h).map(|a| self[(i * dim_h + a, j * dim_h + a)]).sum()
        }))
    }
}

/// Which tensor factor an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

fn check_bipartite(m: &CMatrix, dim_k: usize, dim_h: usize) -> Result<()> {
    if !m.is_square() || m.rows != dim_k * dim_h {
        return invalid(format!(
            "a {}x{} matrix does not act on a {dim_k}x{dim_h} tensor product",
            m.rows, m.cols
        ));
    }
    Ok(())
}

/// Kronecker product `A (x) B`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix::from_fn(a.rows * b.rows, a.cols * b.cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    })
}

/// `<u, v> = sum conj(u_i) v_i`.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn kron_vec(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().flat_map(|a| y.iter().map(move |b| a * b)).collect()
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        self.map(|z| -z)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// A vector in `K (x) H`, amplitude of `e_i (x) f_j` at `i * dim_h + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteVector {
    dim_k: usize,
    dim_h: usize,
    amps: Vec<C64>,
}

impl BipartiteVector {
    pub fn new(dim_k: usize, dim_h: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != dim_k * dim_h {
            return invalid(format!(
                "expected {} amplitudes for {dim_k}x{dim_h}, got {}",
                dim_k * dim_h,
                amps.len()
            ));
        }
        Ok(Self { dim_k, dim_h, amps })
    }

    pub fn product(x: &[C64], y: &[C64]) -> Self {
        Self {
            dim_k: x.len(),
            dim_h: y.len(),
            amps: kron_vec(x, y),
        }
    }

    /// Reshape a `dim_k x dim_h` coefficient matrix into a vector.
    pub fn from_coefficients(m: &CMatrix) -> Self {
        Self {
            dim_k: m.rows(),
            dim_h: m.cols(),
            amps: m.as_slice().to_vec(),
        }
    }

    pub fn dim_k(&self) -> usize {
        self.dim_k
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// The `dim_k x dim_h` coefficient matrix `Y` with `y = sum Y_ij e_i (x) f_j`.
    pub fn coefficients(&self) -> CMatrix {
        CMatrix {
            rows: self.dim_k,
            cols: self.dim_h,
            data: self.amps.clone(),
        }
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        let s = if n > 0.0 { 1.0 / n } else { 0.0 };
        Self {
            dim_k: self.dim_k,
            dim_h: self.dim_h,
            amps: self.amps.iter().map(|z| z * s).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap(n: usize) -> CMatrix {
        CMatrix::from_fn(n * n, n * n, |r, c| if r == (c % n) * n + c / n { ONE } else { ZERO })
    }

    #[test]
    fn kron_examples() {
        assert_eq!(kron(&CMatrix::identity(2), &CMatrix::identity(3)), CMatrix::identity(6));
        assert_eq!(
            kron(&CMatrix::unit(2, 0, 0), &CMatrix::unit(2, 0, 0)),
            CMatrix::unit(4, 0, 0)
        );
        let d = kron(&CMatrix::diag_real(&[1.0, 2.0]), &CMatrix::diag_real(&[3.0, 4.0]));
        assert_eq!(d, CMatrix::diag_real(&[3.0, 4.0, 6.0, 8.0]));
    }

    #[test]
    fn kron_matches_index_convention() {
        let x = [C64::new(1.0, 0.0), C64::new(0.0, 2.0)];
        let y = [C64::new(3.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 1.0)];
        let v = kron_vec(&x, &y);
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(v[i * 3 + j], x[i] * y[j]);
            }
        }
    }

    #[test]
    fn partial_transpose_of_identity() {
        let id = CMatrix::identity(6);
        assert_eq!(id.partial_transpose(2, 3, Subsystem::Second).unwrap(), id);
        assert_eq!(id.partial_transpose(2, 3, Subsystem::First).unwrap(), id);
    }

    #[test]
    fn partial_transpose_of_unnormalized_max_entangled_is_swap() {
        let mut omega = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                omega = &omega + &kron(&CMatrix::unit(2, i, j), &CMatrix::unit(2, i, j));
            }
        }
        assert_eq!(omega.partial_transpose(2, 2, Subsystem::Second).unwrap(), swap(2));
        assert_eq!(omega.partial_transpose(2, 2, Subsystem::First).unwrap(), swap(2));
    }

    #[test]
    fn partial_transpose_is_involutive_and_blockwise() {
        let m = CMatrix::from_fn(6, 6, |i, j| C64::new((i * 7 + j) as f64, (i as f64) - (j as f64) * 0.5));
        for which in [Subsystem::First, Subsystem::Second] {
            let once = m.partial_transpose(2, 3, which).unwrap();
            assert_eq!(once.partial_transpose(2, 3, which).unwrap(), m);
            assert_eq!(once.trace(), m.trace());
        }
        let a = CMatrix::from_fn(2, 2, |i, j| C64::new(i as f64 + 1.0, j as f64));
        let b = CMatrix::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64, 1.0));
        let pt = kron(&a, &b).partial_transpose(2, 3, Subsystem::Second).unwrap();
        assert_eq!(pt, kron(&a, &b.transpose()));
        let pt = kron(&a, &b).partial_transpose(2, 3, Subsystem::First).unwrap();
        assert_eq!(pt, kron(&a.transpose(), &b));
    }

    #[test]
    fn partial_transpose_rejects_bad_dims() {
        assert!(CMatrix::identity(6).partial_transpose(4, 2, Subsystem::Second).is_err());
        assert!(CMatrix::zeros(6, 5).partial_transpose(2, 3, Subsystem::Second).is_err());
    }

    #[test]
    fn partial_traces() {
        let a = CMatrix::diag_real(&[1.0, 2.0]);
        let b = CMatrix::diag_real(&[3.0, 4.0, 5.0]);
        let ab = kron(&a, &b);
        assert_eq!(ab.partial_trace_first(2, 3).unwrap(), b.scale(3.0));
        assert_eq!(ab.partial_trace_second(2, 3).unwrap(), a.scale(12.0));
    }

    #[test]
    fn hermitian_checks() {
        let mut m = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, -1.0]]);
        assert!(m.is_hermitian(1e-10));
        m[(0, 1)] = C64::new(2.0, 1.0);
        assert!(!m.is_hermitian(1e-10));
        m[(1, 0)] = C64::new(2.0, -1.0);
        assert!(m.is_hermitian(1e-10));
    }
}
