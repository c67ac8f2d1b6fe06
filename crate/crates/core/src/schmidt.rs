//! Maximization of `<y, A y>` over unit vectors of Schmidt rank at most `k`,
//! the k-positivity decision built on it, and the constructive extension of
//! a boundary vector `<y, A y> = 1` into a rank `k + 1` violation.
//!
//! The optimizer is a lower-bound method. A refutation (`CertifiedNo`) is a
//! concrete vector and is re-checked in plain arithmetic; a `HeuristicYes`
//! only says that no violation was found. The sup is exact when `k` reaches
//! the smaller tensor dimension, where it becomes the largest eigenvalue.

use rayon::prelude::*;

use crate::config::{OptConfig, Tolerances};
use crate::error::{invalid, MapError, Result};
use crate::linalg::{hermitian_eig, jacobi_eig, schmidt_decompose, svd};
use crate::linmap::{LinMap, StateDensity};
use crate::matrix::{inner, kron_vec, norm, BipartiteVector, CMatrix, C64, ZERO};
use crate::random::{gaussian_vec, rng};
use crate::split::cp_split;

/// `y = sum_i left_i (x) right_i` with at most `k` terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtVector {
    k: usize,
    left: Vec<Vec<C64>>,
    right: Vec<Vec<C64>>,
    dense: BipartiteVector,
}

impl SchmidtVector {
    pub fn new(dim_k: usize, dim_h: usize, k: usize, left: Vec<Vec<C64>>, right: Vec<Vec<C64>>) -> Result<Self> {
        if left.len() != right.len() {
            return invalid("left and right factor lists differ in length");
        }
        if left.len() > k {
            return invalid(format!("{} terms exceed the Schmidt bound {k}", left.len()));
        }
        if left.iter().any(|x| x.len() != dim_k) || right.iter().any(|y| y.len() != dim_h) {
            return invalid("factor vector has the wrong dimension");
        }
        let mut amps = vec![ZERO; dim_k * dim_h];
        for (x, y) in left.iter().zip(&right) {
            for (a, z) in amps.iter_mut().zip(kron_vec(x, y)) {
                *a += z;
            }
        }
        Ok(Self {
            k,
            left,
            right,
            dense: BipartiteVector::new(dim_k, dim_h, amps)?,
        })
    }

    pub fn product(x: &[C64], y: &[C64]) -> Self {
        Self::new(x.len(), y.len(), 1, vec![x.to_vec()], vec![y.to_vec()]).expect("single term")
    }

    /// Factor a dense vector, failing if its Schmidt rank exceeds `k`.
    pub fn from_dense(v: &BipartiteVector, k: usize, tol: &Tolerances) -> Result<Self> {
        let d = schmidt_decompose(v, tol);
        if d.rank() > k {
            return invalid(format!("vector has Schmidt rank {} > {k}", d.rank()));
        }
        let left = d
            .values
            .iter()
            .zip(&d.left)
            .map(|(s, u)| u.iter().map(|z| z * s).collect())
            .collect();
        Self::new(v.dim_k(), v.dim_h(), k, left, d.right)
    }

    pub fn dim_k(&self) -> usize {
        self.dense.dim_k()
    }

    pub fn dim_h(&self) -> usize {
        self.dense.dim_h()
    }

    /// The Schmidt bound this vector was built for.
    pub fn bound(&self) -> usize {
        self.k
    }

    pub fn left(&self) -> &[Vec<C64>] {
        &self.left
    }

    pub fn right(&self) -> &[Vec<C64>] {
        &self.right
    }

    pub fn dense(&self) -> &BipartiteVector {
        &self.dense
    }

    pub fn norm(&self) -> f64 {
        self.dense.norm()
    }

    pub fn schmidt_rank(&self, tol: &Tolerances) -> usize {
        schmidt_decompose(&self.dense, tol).rank()
    }

    /// `Re <y, A y> / <y, y>`, evaluated from the dense amplitudes.
    pub fn objective(&self, a: &CMatrix) -> f64 {
        let y = self.dense.amplitudes();
        a.quadratic_form(y).re / inner(y, y).re
    }
}

/// Result of a maximization over Schmidt-class unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct OptReport {
    pub value: f64,
    pub argmax: SchmidtVector,
    /// `lambda_max(A)`.
    pub upper_bound: f64,
    pub restarts: usize,
    pub iterations: usize,
    pub converged: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    CertifiedYes,
    CertifiedNo,
    /// No violation found by a lower-bound search; not a proof.
    HeuristicYes,
}

impl VerdictKind {
    pub fn is_yes(self) -> bool {
        !matches!(self, Self::CertifiedNo)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Vector(SchmidtVector),
    State(StateDensity),
}

/// A three-valued cone-membership decision.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub witness: Option<Witness>,
    pub value: f64,
    pub detail: String,
}

impl Verdict {
    fn new(kind: VerdictKind, value: f64, detail: impl Into<String>) -> Self {
        Self {
            kind,
            witness: None,
            value,
            detail: detail.into(),
        }
    }

    fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }
}

/// Maximize `<y, A y>` over unit `y` with Schmidt rank at most `k`.
///
/// Each restart runs a projected power iteration
/// `Y <- normalize(truncate_r((A + sigma) vec Y))` on the coefficient matrix,
/// for ranks `r = 1..=k` in turn, every rank starting from the best point of
/// the previous one (so the value is nondecreasing in `k` for a fixed seed).
/// The shift `sigma = max(0, -lambda_min) + 0.1 ||A||` makes `A + sigma`
/// positive definite, which makes every iteration nondecreasing. Restart 0
/// starts from truncations of the top eigenvector, so the result is exact
/// once `k >= min(dim_k, dim_h)`.
pub fn sup_schmidt(
    a: &CMatrix,
    dim_k: usize,
    dim_h: usize,
    k: usize,
    cfg: &OptConfig,
    tol: &Tolerances,
) -> Result<OptReport> {
    if k < 1 {
        return invalid("Schmidt rank bound must be at least 1");
    }
    if !a.is_square() || a.rows() != dim_k * dim_h {
        return invalid(format!(
            "operator is {}x{}, expected {n}x{n}",
            a.rows(),
            a.cols(),
            n = dim_k * dim_h
        ));
    }
    let eig = hermitian_eig(a, tol)?;
    let a = a.hermitian_part();
    let spectral = eig.max().abs().max(eig.min().abs());
    let shift = (-eig.min()).max(0.0) + 0.1 * spectral;
    let shifted = &a + &CMatrix::identity(a.rows()).scale(shift);
    let k_eff = k.min(dim_k).min(dim_h);
    let top = CMatrix::from_vec(dim_k, dim_h, eig.vector(0))?;

    let problem = Problem {
        shifted: &shifted,
        shift,
        dim_k,
        dim_h,
        max_iter: cfg.max_iter,
        gain_tol: cfg.tol * shift.max(1.0),
    };
    let chains: Vec<Chain> = (0..=cfg.restarts)
        .into_par_iter()
        .map(|r| {
            if r == 0 {
                problem.chain(k_eff, |rank| truncate(&top, rank).0)
            } else {
                let mut g = rng(cfg.seed, r as u64);
                problem.chain(k_eff, |rank| {
                    let m = CMatrix::from_vec(dim_k, dim_h, gaussian_vec(&mut g, dim_k * dim_h)).expect("sizes match");
                    truncate(&m, rank).0
                })
            }
        })
        .collect();

    let iterations = chains.iter().map(|c| c.iterations).sum();
    let best = chains
        .into_iter()
        .reduce(|best, c| if c.value > best.value { c } else { best })
        .expect("at least one chain");
    let (_, left, right) = truncate(&best.coeffs, k_eff);
    let argmax = SchmidtVector::new(dim_k, dim_h, k, left, right)?;
    let value = argmax.objective(&a);
    Ok(OptReport {
        value,
        argmax,
        upper_bound: eig.max(),
        restarts: cfg.restarts,
        iterations,
        converged: best.converged,
        seed: cfg.seed,
    })
}

struct Problem<'a> {
    shifted: &'a CMatrix,
    shift: f64,
    dim_k: usize,
    dim_h: usize,
    max_iter: usize,
    gain_tol: f64,
}

struct Chain {
    coeffs: CMatrix,
    value: f64,
    iterations: usize,
    converged: bool,
}

/// One projected power run: final point, objective trace (unshifted) and
/// whether it stopped on the gain tolerance.
pub(crate) struct Run {
    pub coeffs: CMatrix,
    pub trace: Vec<f64>,
    pub converged: bool,
}

impl Problem<'_> {
    fn objective(&self, y: &CMatrix) -> f64 {
        self.shifted.quadratic_form(y.as_slice()).re - self.shift
    }

    fn chain(&self, k: usize, mut fresh: impl FnMut(usize) -> CMatrix) -> Chain {
        let mut best: Option<Chain> = None;
        let mut iterations = 0;
        for rank in 1..=k {
            let mut starts = vec![fresh(rank)];
            if let Some(prev) = &best {
                starts.push(prev.coeffs.clone());
            }
            for start in starts {
                let run = self.run(start, rank);
                iterations += run.trace.len();
                let value = *run.trace.last().expect("trace holds the start value");
                if best.as_ref().is_none_or(|b| value > b.value) {
                    best = Some(Chain {
                        coeffs: run.coeffs,
                        value,
                        iterations: 0,
                        converged: run.converged,
                    });
                }
            }
        }
        let mut best = best.expect("k >= 1");
        best.iterations = iterations;
        best
    }

    pub(crate) fn run(&self, start: CMatrix, rank: usize) -> Run {
        let mut y = start;
        let mut value = self.objective(&y);
        let mut trace = vec![value];
        let mut converged = false;
        for _ in 0..self.max_iter {
            let z = self.shifted.matvec(y.as_slice());
            let z = CMatrix::from_vec(self.dim_k, self.dim_h, z).expect("sizes match");
            let (next, _, _) = truncate(&z, rank);
            let next_value = self.objective(&next);
            let gain = next_value - value;
            debug_assert!(
                gain >= -1e-10 * self.shift.max(1.0),
                "power step decreased the objective by {gain}"
            );
            if gain < 0.0 {
                converged = true;
                break;
            }
            y = next;
            value = next_value;
            trace.push(value);
            if gain < self.gain_tol {
                converged = true;
                break;
            }
        }
        Run {
            coeffs: y,
            trace,
            converged,
        }
    }
}

/// Best rank-`rank` approximation scaled to unit Frobenius norm, returned
/// densely and as factor lists (`left` carries the singular values).
fn truncate(m: &CMatrix, rank: usize) -> (CMatrix, Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let d = svd(m);
    let keep = rank.min(d.values.len());
    let scale = d.values[..keep].iter().map(|s| s * s).sum::<f64>().sqrt();
    let mut left = Vec::with_capacity(keep);
    let mut right = Vec::with_capacity(keep);
    for c in 0..keep {
        let s = if scale > 0.0 { d.values[c] / scale } else { 0.0 };
        if s == 0.0 && c > 0 {
            break;
        }
        left.push(d.u.column(c).into_iter().map(|z| z * s).collect::<Vec<_>>());
        right.push(d.v.column(c).into_iter().map(|z| z.conj()).collect::<Vec<_>>());
    }
    if scale == 0.0 {
        // Degenerate input: fall back to a unit product vector.
        let mut x = vec![ZERO; m.rows()];
        x[0] = C64::new(1.0, 0.0);
        let mut y = vec![ZERO; m.cols()];
        y[0] = C64::new(1.0, 0.0);
        left = vec![x];
        right = vec![y];
    }
    let mut dense = CMatrix::zeros(m.rows(), m.cols());
    for (x, y) in left.iter().zip(&right) {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                dense[(i, j)] += x[i] * y[j];
            }
        }
    }
    (dense, left, right)
}

/// Decide k-positivity of a self-adjoint map through its split
/// `c^-1 phi = Tr - phi_cp`: phi is k-positive iff
/// `sup_{y in S(k), |y| = 1} <y, C_{phi_cp} y> <= 1`.
pub fn is_k_positive(phi: &LinMap, k: usize, cfg: &OptConfig, tol: &Tolerances) -> Result<Verdict> {
    if k < 1 {
        return invalid("k must be at least 1");
    }
    phi.require_self_adjoint(tol)?;
    let (dk, dh) = (phi.dim_k(), phi.dim_h());
    let choi = phi.choi().hermitian_part();
    let min_eig = jacobi_eig(choi.clone()).min();

    let split = match cp_split(phi, tol) {
        Ok(s) => s,
        Err(MapError::NegativeOfCpMap) => return negative_of_cp_verdict(&choi, dk, dh, k, cfg, tol),
        Err(e) => return Err(e),
    };
    if min_eig >= -tol.psd {
        return Ok(Verdict::new(
            VerdictKind::CertifiedYes,
            split.cp_max_eigenvalue(),
            "completely positive (Choi matrix is positive), hence k-positive for every k",
        ));
    }
    let cp = split.phi_cp.choi();
    let report = sup_schmidt(cp, dk, dh, k, cfg, tol)?;
    let exact = k >= dk.min(dh);
    if report.value > 1.0 + tol.cert_margin {
        let witness = report.argmax.dense().normalized();
        let recheck = cp.quadratic_form(witness.amplitudes()).re;
        if recheck > 1.0 + tol.cert_margin {
            return Ok(Verdict::new(
                VerdictKind::CertifiedNo,
                recheck,
                format!("unit vector of Schmidt rank <= {k} gives <y, C_cp y> = {recheck:.12} > 1"),
            )
            .with_witness(Witness::Vector(report.argmax)));
        }
    }
    let detail = if report.value > 1.0 - tol.cert_margin {
        format!(
            "best value {:.12} lies within the certification margin of 1; no violation certified",
            report.value
        )
    } else if exact {
        format!("largest eigenvalue of C_cp is {:.12} <= 1", report.value)
    } else {
        format!(
            "no violation found: best <y, C_cp y> = {:.12} over {} restarts (lower bound on the sup)",
            report.value, report.restarts
        )
    };
    Ok(Verdict::new(VerdictKind::HeuristicYes, report.value, detail))
}

/// `C_phi` has no positive part, so `-phi` is completely positive. Then phi
/// is k-positive only if it is zero; any unit `y` with `<y, C_phi y> < 0`
/// refutes it.
fn negative_of_cp_verdict(
    choi: &CMatrix,
    dk: usize,
    dh: usize,
    k: usize,
    cfg: &OptConfig,
    tol: &Tolerances,
) -> Result<Verdict> {
    let scale = choi.frobenius_norm();
    if scale <= tol.psd {
        return Ok(Verdict::new(VerdictKind::CertifiedYes, 0.0, "zero map"));
    }
    let report = sup_schmidt(&-choi, dk, dh, k, cfg, tol)?;
    let value = report.argmax.objective(choi);
    if value < -tol.cert_margin * scale.max(1.0) {
        return Ok(Verdict::new(
            VerdictKind::CertifiedNo,
            value,
            format!("-phi is completely positive and <y, C_phi y> = {value:.12} < 0"),
        )
        .with_witness(Witness::Vector(report.argmax)));
    }
    Ok(Verdict::new(
        VerdictKind::HeuristicYes,
        value,
        "-phi is completely positive; no negative direction found",
    ))
}

/// Outcome of [`check_witness_preconditions`].
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCheck {
    pub ok: bool,
    pub reasons: Vec<String>,
    /// `<y, C_phi y>`.
    pub overlap: f64,
    /// Norm of the component of `C_phi y` orthogonal to `X (x) Y`.
    pub residual: f64,
}

/// Check `<y, C_phi y> = 0` and `C_phi y` not in `X (x) Y`, with
/// `X = span(left)` and `Y = span(right)`.
pub fn check_witness_preconditions(phi: &LinMap, y: &SchmidtVector, tol: &Tolerances) -> Result<WitnessCheck> {
    phi.require_self_adjoint(tol)?;
    if (phi.dim_k(), phi.dim_h()) != (y.dim_k(), y.dim_h()) {
        return invalid("vector and map dimensions differ");
    }
    let c = phi.choi();
    let cy = c.matvec(y.dense().amplitudes());
    let overlap = inner(y.dense().amplitudes(), &cy).re;
    let residual = outside_span_parts(&cy, y, tol)
        .iter()
        .map(|r| norm(r.as_slice()).powi(2))
        .sum::<f64>()
        .sqrt();
    let mut reasons = Vec::new();
    if overlap.abs() > tol.ortho {
        reasons.push(format!("<y, C_phi y> = {overlap:.3e} is not zero"));
    }
    if residual <= tol.residual {
        reasons.push(format!("C_phi y lies in X (x) Y (residual {residual:.3e})"));
    }
    Ok(WitnessCheck {
        ok: reasons.is_empty(),
        reasons,
        overlap,
        residual,
    })
}

/// Split the part of `v` outside `X (x) Y` into its components in
/// `X^perp (x) H` and `X (x) Y^perp`, as coefficient matrices.
fn outside_span_parts(v: &[C64], y: &SchmidtVector, tol: &Tolerances) -> [CMatrix; 2] {
    let (dk, dh) = (y.dim_k(), y.dim_h());
    let px = span_projector(y.left(), dk, tol);
    let py = span_projector(y.right(), dh, tol);
    let m = CMatrix::from_vec(dk, dh, v.to_vec()).expect("sizes match");
    let px_perp = &CMatrix::identity(dk) - &px;
    let py_perp_conj = (&CMatrix::identity(dh) - &py).map(|z| z.conj());
    // (P (x) Q) v has coefficient matrix P M Q^t = P M conj(Q).
    [&px_perp * &m, &(&px * &m) * &py_perp_conj]
}

/// Orthogonal projector onto the span of `vectors`.
fn span_projector(vectors: &[Vec<C64>], dim: usize, tol: &Tolerances) -> CMatrix {
    let scale = vectors.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        // Two Gram-Schmidt passes for stability.
        for _ in 0..2 {
            for b in &basis {
                let p = inner(b, &w);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= p * y;
                }
            }
        }
        let n = norm(&w);
        if n > tol.rank.sqrt() * scale.max(f64::MIN_POSITIVE) {
            basis.push(w.into_iter().map(|z| z / n).collect());
        }
    }
    let mut p = CMatrix::zeros(dim, dim);
    for b in &basis {
        p = &p + &CMatrix::outer(b, b);
    }
    p
}

/// Given `<y, A y> = 1` with `A y` not in `X (x) Y`, build a unit vector
/// `z = s x + sqrt(1 - s^2) y` with `x` a unit product vector orthogonal to
/// `X (x) Y` and `s` in (0, 1), such that `<z, A z> > 1`. `z` has Schmidt
/// rank at most `k + 1`.
///
/// `x` is the leading Schmidt pair of the larger of the two components of
/// `A y` in `X^perp (x) H` and `X (x) Y^perp`, phased so `<x, A y> > 0`;
/// `s` maximizes `<z, A z>` on the quarter circle, a 2x2 eigenproblem.
pub fn extend_witness(a: &CMatrix, y: &SchmidtVector, tol: &Tolerances) -> Result<SchmidtVector> {
    let (dk, dh) = (y.dim_k(), y.dim_h());
    if !a.is_square() || a.rows() != dk * dh {
        return invalid("operator and vector dimensions differ");
    }
    if !a.is_hermitian(tol.herm_rel) {
        return invalid("operator is not Hermitian");
    }
    let a = a.hermitian_part();
    let mut reasons = Vec::new();
    let yv = y.dense().amplitudes();
    if (y.norm() - 1.0).abs() > 1e-10 {
        reasons.push(format!("y is not a unit vector (norm {:.12})", y.norm()));
    }
    let ay = a.matvec(yv);
    let level = inner(yv, &ay).re;
    if (level - 1.0).abs() > tol.ortho {
        reasons.push(format!("<y, A y> = {level:.12} is not 1"));
    }
    let parts = outside_span_parts(&ay, y, tol);
    let norms = [norm(parts[0].as_slice()), norm(parts[1].as_slice())];
    if norms[0].hypot(norms[1]) <= tol.residual {
        reasons.push("A y lies in X (x) Y".to_string());
    }
    if !reasons.is_empty() {
        return Err(MapError::WitnessInapplicable(reasons));
    }

    let part = if norms[0] >= norms[1] { &parts[0] } else { &parts[1] };
    let lead = schmidt_decompose(&BipartiteVector::from_coefficients(part), tol);
    let (mut u, w) = (lead.left[0].clone(), lead.right[0].clone());
    let x = kron_vec(&u, &w);
    let b = inner(&x, &ay);
    let phase = b / b.norm();
    for z in u.iter_mut() {
        *z *= phase;
    }
    let x = kron_vec(&u, &w);
    let b = inner(&x, &ay).re;
    let axx = a.quadratic_form(&x).re;
    let (s, t) = best_mix(axx, b, level);

    let mut left = vec![u.iter().map(|z| z * s).collect::<Vec<_>>()];
    let mut right = vec![w];
    for (xi, yi) in y.left().iter().zip(y.right()) {
        left.push(xi.iter().map(|z| z * t).collect());
        right.push(yi.clone());
    }
    let z = SchmidtVector::new(dk, dh, y.bound() + 1, left, right)?;
    let value = a.quadratic_form(z.dense().amplitudes()).re;
    let improved = value > 1.0 + tol.cert_margin && s > 0.0 && s < 1.0;
    if !improved {
        return Err(MapError::WitnessInapplicable(vec![format!(
            "extension only reaches <z, A z> = {value:.15} (s = {s:.3e})"
        )]));
    }
    Ok(z)
}

/// Maximizer `(s, t)`, `s^2 + t^2 = 1`, `s, t >= 0`, of
/// `f(s) = s^2 a + t^2 d + 2 s t b` with `b > 0`.
fn best_mix(a: f64, b: f64, d: f64) -> (f64, f64) {
    let lambda = 0.5 * (a + d) + (0.25 * (a - d).powi(2) + b * b).sqrt();
    let (s, t) = (b, lambda - a);
    let n = s.hypot(t);
    if n.is_finite() && n > 0.0 && t > 0.0 {
        return (s / n, t / n);
    }
    golden_section(|s| {
        let t = (1.0 - s * s).max(0.0).sqrt();
        s * s * a + t * t * d + 2.0 * s * t * b
    })
}

fn golden_section(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let s = 0.5 * (lo + hi);
    (s, (1.0 - s * s).max(0.0).sqrt())
}
