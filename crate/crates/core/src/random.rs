//! Seeded random generators: Gaussian vectors, Hermitian matrices,
//! separable and PPT states, and superpositive maps.
//!
//! Every generator takes an explicit seed and uses ChaCha8, so results are
//! reproducible across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::Tolerances;
use crate::error::{invalid, Result};
use crate::linalg::jacobi_eig;
use crate::linmap::{LinMap, StateDensity};
use crate::matrix::{kron, norm, CMatrix, Subsystem, C64};

/// RNG for `stream` under `seed`; distinct streams are independent.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        })
        .collect()
}

pub fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    loop {
        let v = gaussian_vec(rng, n);
        let nv = norm(&v);
        if nv > 1e-12 {
            return v.into_iter().map(|z| z / nv).collect();
        }
    }
}

/// Hermitian matrix with i.i.d. Gaussian entries (GUE-like).
pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let g = CMatrix::from_vec(n, n, gaussian_vec(rng, n * n)).expect("length matches");
    g.hermitian_part()
}

/// Self-adjoint map with a random Hermitian Choi matrix.
pub fn random_self_adjoint_map(dim_k: usize, dim_h: usize, seed: u64) -> LinMap {
    let mut r = rng(seed, 0);
    LinMap::from_choi(dim_k, dim_h, random_hermitian(&mut r, dim_k * dim_h)).expect("dimensions match")
}

/// Convex mixture of `terms` random pure product states.
pub fn random_separable_state(
    dim_k: usize,
    dim_h: usize,
    terms: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<StateDensity> {
    if terms == 0 {
        return invalid("a separable state needs at least one term");
    }
    let mut r = rng(seed, 1);
    let weights: Vec<f64> = (0..terms).map(|_| rand::Rng::gen_range(&mut r, 0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = CMatrix::zeros(dim_k * dim_h, dim_k * dim_h);
    for w in weights {
        let x = random_unit(&mut r, dim_k);
        let y = random_unit(&mut r, dim_h);
        let p = kron(&CMatrix::outer(&x, &x), &CMatrix::outer(&y, &y));
        rho = &rho + &p.scale(w / total);
    }
    StateDensity::new(dim_k, dim_h, rho.hermitian_part(), tol)
}

/// A random PPT state: a random rank-two state mixed with the maximally
/// mixed state just enough to make its partial transpose positive.
pub fn random_ppt_state(dim_k: usize, dim_h: usize, seed: u64, tol: &Tolerances) -> Result<StateDensity> {
    let d = dim_k * dim_h;
    let mut r = rng(seed, 2);
    let mut rho = CMatrix::zeros(d, d);
    for _ in 0..2 {
        let v = random_unit(&mut r, d);
        rho = &rho + &CMatrix::outer(&v, &v).scale(0.5);
    }
    let pt_min = jacobi_eig(rho.partial_transpose(dim_k, dim_h, Subsystem::Second)?).min();
    let rho = if pt_min < 0.0 {
        // (1 - p) rho + p 1/d has partial-transpose minimum (1 - p) pt_min + p / d.
        let p = -pt_min / (1.0 / d as f64 - pt_min);
        // Nudge p up so the result is strictly inside the PPT cone.
        let p = (p * (1.0 + 1e-9)).min(1.0);
        &rho.scale(1.0 - p) + &CMatrix::identity(d).scale(p / d as f64)
    } else {
        rho
    };
    StateDensity::new(dim_k, dim_h, rho.hermitian_part(), tol)
}

/// Trace-normalized sum of `terms` maps `x -> V x V^*` with `rank V <= k`.
pub fn random_superpositive(dim_k: usize, dim_h: usize, k: usize, terms: usize, seed: u64) -> Result<LinMap> {
    if k == 0 || terms == 0 {
        return invalid("rank bound and term count must be positive");
    }
    let mut r = rng(seed, 3);
    let d = dim_k * dim_h;
    let mut choi = CMatrix::zeros(d, d);
    for _ in 0..terms {
        // V = sum_l w_l z_l^*; the Choi matrix of AdV is |v><v| with v = sum_i e_i (x) V e_i.
        let rank = k.min(dim_k).min(dim_h);
        let mut v = CMatrix::zeros(dim_h, dim_k);
        for _ in 0..rank {
            let w = gaussian_vec(&mut r, dim_h);
            let z = gaussian_vec(&mut r, dim_k);
            v = &v + &CMatrix::outer(&w, &z);
        }
        let vec: Vec<C64> = (0..dim_k)
            .flat_map(|i| (0..dim_h).map(move |a| (i, a)))
            .map(|(i, a)| v[(a, i)])
            .collect();
        choi = &choi + &CMatrix::outer(&vec, &vec);
    }
    let tr = choi.trace().re;
    LinMap::from_choi(dim_k, dim_h, choi.scale(1.0 / tr).hermitian_part())
}
