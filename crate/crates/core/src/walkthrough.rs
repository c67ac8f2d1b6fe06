//! End-to-end treatment of the Choi map of `B(C^3)`: at the product vector
//! `y = x (x) x`, `x = 3^{-1/2}(1, 1, 1)`, both `C_phi` and `C_{t o phi}` are
//! orthogonal to `y` without mapping it into `span(x) (x) span(x)`, so the
//! witness extension produces rank-2 vectors refuting 2-positivity of phi
//! and of `t o phi`.

use crate::config::Tolerances;
use crate::error::Result;
use crate::gallery::GalleryMap;
use crate::linmap::LinMap;
use crate::matrix::{norm, C64};
use crate::schmidt::{check_witness_preconditions, extend_witness, SchmidtVector, WitnessCheck};
use crate::split::cp_split;

/// Bound on `|<y, C y>|` required by the walkthrough.
pub const OVERLAP_TOL: f64 = 1e-12;
/// Lower bound on `||C y||`.
pub const IMAGE_MIN_NORM: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Side {
    pub label: &'static str,
    pub map: LinMap,
    /// `<y, C y>`.
    pub overlap: f64,
    /// `||C y||`.
    pub image_norm: f64,
    pub preconditions: WitnessCheck,
    pub c: f64,
    /// Rank-2 vector with `<z, C_cp z> > 1`, when the extension succeeded.
    pub witness: Option<SchmidtVector>,
    pub witness_value: f64,
    pub witness_rank: usize,
}

impl Side {
    pub fn passes(&self, tol: &Tolerances) -> bool {
        self.overlap.abs() <= OVERLAP_TOL
            && self.image_norm > IMAGE_MIN_NORM
            && self.preconditions.ok
            && self.witness.is_some()
            && self.witness_rank <= 2
            && self.witness_value > 1.0 + tol.cert_margin
    }
}

#[derive(Debug, Clone)]
pub struct Walkthrough {
    pub y: SchmidtVector,
    pub phi: Side,
    pub transposed: Side,
}

impl Walkthrough {
    pub fn passes(&self, tol: &Tolerances) -> bool {
        self.phi.passes(tol) && self.transposed.passes(tol)
    }
}

/// The uniform product vector `x (x) x` in `C^n (x) C^n`.
pub fn uniform_product(n: usize) -> SchmidtVector {
    let x = vec![C64::new(1.0 / (n as f64).sqrt(), 0.0); n];
    SchmidtVector::product(&x, &x)
}

pub fn choi_map_walkthrough(tol: &Tolerances) -> Result<Walkthrough> {
    let phi = GalleryMap::Choi3.build()?;
    let y = uniform_product(3);
    let transposed = phi.transpose_compose();
    Ok(Walkthrough {
        phi: side("phi", phi, &y, tol)?,
        transposed: side("t o phi", transposed, &y, tol)?,
        y,
    })
}

fn side(label: &'static str, map: LinMap, y: &SchmidtVector, tol: &Tolerances) -> Result<Side> {
    let amps = y.dense().amplitudes();
    let cy = map.choi().matvec(amps);
    let overlap = crate::matrix::inner(amps, &cy).re;
    let preconditions = check_witness_preconditions(&map, y, tol)?;
    let split = cp_split(&map, tol)?;
    let (witness, witness_value, witness_rank) = match extend_witness(split.phi_cp.choi(), y, tol) {
        Ok(z) => {
            let value = z.objective(split.phi_cp.choi());
            let rank = z.schmidt_rank(tol);
            (Some(z), value, rank)
        }
        Err(_) => (None, f64::NAN, 0),
    };
    Ok(Side {
        label,
        overlap,
        image_norm: norm(&cy),
        preconditions,
        c: split.c,
        witness,
        witness_value,
        witness_rank,
        map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walkthrough_passes() {
        let tol = Tolerances::default();
        let w = choi_map_walkthrough(&tol).unwrap();
        assert!(w.passes(&tol), "{w:#?}");
        assert!((w.phi.c - 2.0).abs() < 1e-12);
    }
}
