#![allow(dead_code)]

use mapcone::random::{random_self_adjoint_map, random_superpositive, rng};
use mapcone::{CMatrix, GalleryMap, LinMap, C64};
use rand::Rng;

/// Every gallery map at a spread of sizes and parameters.
pub fn full_gallery() -> Vec<(String, LinMap)> {
    let mut out = Vec::new();
    let mut push = |label: String, g: GalleryMap| out.push((label, g.build().unwrap()));
    for n in 1..=4 {
        push(format!("identity({n})"), GalleryMap::Identity { n });
        push(format!("transpose({n})"), GalleryMap::Transpose { n });
    }
    for (dk, dh) in [(1, 1), (2, 2), (2, 3), (3, 2), (3, 3), (4, 4)] {
        push(format!("trace({dk}x{dh})"), GalleryMap::Trace { dim_k: dk, dim_h: dh });
    }
    push("choi3".into(), GalleryMap::Choi3);
    for n in [2, 3, 4] {
        for lambda in [0.2, 0.5, 1.0, 1.5] {
            push(format!("reduction({lambda}, {n})"), GalleryMap::Reduction { lambda, n });
        }
    }
    let v = CMatrix::from_fn(2, 3, |i, j| C64::new((i + 2 * j) as f64 - 1.5, i as f64 * 0.5));
    push("adv(2x3)".into(), GalleryMap::AdV { v });
    for r in 1..=3 {
        push(
            format!("adv(3, r={r})"),
            GalleryMap::parse("adv", Some(3), Some(r as f64)).unwrap(),
        );
    }
    out
}

/// Gallery maps on B(C^3).
pub fn gallery_3x3() -> Vec<(String, LinMap)> {
    full_gallery()
        .into_iter()
        .filter(|(_, m)| m.dim_k() == 3 && m.dim_h() == 3)
        .collect()
}

/// Random self-adjoint map with factor dimensions in 1..=max_dim.
pub fn random_map(seed: u64, max_dim: usize) -> LinMap {
    let mut r = rng(seed, 77);
    let dk = r.gen_range(1..=max_dim);
    let dh = r.gen_range(1..=max_dim);
    random_self_adjoint_map(dk, dh, seed)
}

/// A mix of generic maps, completely positive maps and maps whose Choi
/// matrix sits just on either side of the PSD boundary.
pub fn random_mixed_map(seed: u64, max_dim: usize) -> LinMap {
    let mut r = rng(seed, 78);
    let dk = r.gen_range(2..=max_dim);
    let dh = r.gen_range(2..=max_dim);
    match seed % 3 {
        0 => random_self_adjoint_map(dk, dh, seed),
        1 => random_superpositive(dk, dh, dk.min(dh), 3, seed).unwrap(),
        _ => {
            let m = random_self_adjoint_map(dk, dh, seed);
            let min = mapcone::hermitian_eig(m.choi(), &Default::default()).unwrap().min();
            let delta = if r.gen_bool(0.5) { 1e-4 } else { -1e-4 };
            let n = dk * dh;
            LinMap::from_choi(dk, dh, m.choi() - &CMatrix::identity(n).scale(min - delta)).unwrap()
        }
    }
}
