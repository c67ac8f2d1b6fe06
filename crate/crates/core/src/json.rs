//! JSON exchange formats. Complex numbers are `[re, im]` pairs and matrices
//! are flattened row-major.
//!
//! Choi matrix file:
//!
//! ```json
//! { "dim_k": 2, "dim_h": 2, "choi": [[1.0, 0.0], [0.0, 0.0], ...] }
//! ```

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{invalid, MapError, Result};
use crate::linmap::{LinMap, StateDensity};
use crate::matrix::{CMatrix, C64};
use crate::schmidt::SchmidtVector;

pub type Complex = [f64; 2];

pub fn complex_to_json(z: C64) -> Complex {
    [z.re, z.im]
}

pub fn complex_from_json(z: Complex) -> C64 {
    C64::new(z[0], z[1])
}

pub fn vec_to_json(v: &[C64]) -> Vec<Complex> {
    v.iter().copied().map(complex_to_json).collect()
}

pub fn vec_from_json(v: &[Complex]) -> Vec<C64> {
    v.iter().copied().map(complex_from_json).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiJson {
    pub dim_k: usize,
    pub dim_h: usize,
    pub choi: Vec<Complex>,
}

impl ChoiJson {
    pub fn from_map(map: &LinMap) -> Self {
        Self {
            dim_k: map.dim_k(),
            dim_h: map.dim_h(),
            choi: vec_to_json(map.choi().as_slice()),
        }
    }

    pub fn to_map(&self) -> Result<LinMap> {
        let n = self.dim_k * self.dim_h;
        if self.choi.len() != n * n {
            return invalid(format!(
                "choi has {} entries, expected ({}*{})^2 = {}",
                self.choi.len(),
                self.dim_k,
                self.dim_h,
                n * n
            ));
        }
        if self.choi.iter().flatten().any(|x| !x.is_finite()) {
            return invalid("choi contains non-finite entries");
        }
        LinMap::from_choi(
            self.dim_k,
            self.dim_h,
            CMatrix::from_vec(n, n, vec_from_json(&self.choi))?,
        )
    }
}

pub fn parse_choi(text: &str) -> Result<LinMap> {
    let raw: ChoiJson =
        serde_json::from_str(text).map_err(|e| MapError::InvalidInput(format!("malformed Choi JSON: {e}")))?;
    raw.to_map()
}

pub fn choi_to_string(map: &LinMap) -> String {
    serde_json::to_string(&ChoiJson::from_map(map)).expect("plain data serializes")
}

/// Serialized [`SchmidtVector`]: factor lists plus the dense amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtVectorJson {
    pub dim_k: usize,
    pub dim_h: usize,
    pub k: usize,
    pub left: Vec<Vec<Complex>>,
    pub right: Vec<Vec<Complex>>,
    pub dense: Vec<Complex>,
}

impl SchmidtVectorJson {
    pub fn from_vector(v: &SchmidtVector) -> Self {
        Self {
            dim_k: v.dim_k(),
            dim_h: v.dim_h(),
            k: v.bound(),
            left: v.left().iter().map(|x| vec_to_json(x)).collect(),
            right: v.right().iter().map(|y| vec_to_json(y)).collect(),
            dense: vec_to_json(v.dense().amplitudes()),
        }
    }

    /// Rebuild from the factors; the stored dense amplitudes must agree.
    pub fn to_vector(&self) -> Result<SchmidtVector> {
        let v = SchmidtVector::new(
            self.dim_k,
            self.dim_h,
            self.k,
            self.left.iter().map(|x| vec_from_json(x)).collect(),
            self.right.iter().map(|y| vec_from_json(y)).collect(),
        )?;
        let dense = vec_from_json(&self.dense);
        if dense.len() != v.dense().amplitudes().len() {
            return invalid("dense amplitudes have the wrong length");
        }
        let err = dense
            .iter()
            .zip(v.dense().amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if err > 1e-12 {
            return invalid(format!("dense amplitudes disagree with the factors by {err:.3e}"));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub dim_k: usize,
    pub dim_h: usize,
    pub rho: Vec<Complex>,
}

impl StateJson {
    pub fn from_state(s: &StateDensity) -> Self {
        Self {
            dim_k: s.dim_k(),
            dim_h: s.dim_h(),
            rho: vec_to_json(s.rho().as_slice()),
        }
    }

    pub fn to_state(&self, tol: &Tolerances) -> Result<StateDensity> {
        let n = self.dim_k * self.dim_h;
        StateDensity::new(
            self.dim_k,
            self.dim_h,
            CMatrix::from_vec(n, n, vec_from_json(&self.rho))?,
            tol,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::GalleryMap;
    use proptest::prelude::*;

    #[test]
    fn choi_round_trip() {
        let m = GalleryMap::Choi3.build().unwrap();
        assert_eq!(parse_choi(&choi_to_string(&m)).unwrap(), m);
    }

    #[test]
    fn choi_rejects_bad_input() {
        assert!(parse_choi("{").is_err());
        assert!(parse_choi(r#"{"dim_k": 2, "dim_h": 2, "choi": [[1.0, 0.0]]}"#).is_err());
        assert!(parse_choi(r#"{"dim_k": 1, "dim_h": 1, "choi": [[1.0]]}"#).is_err());
        let ok = parse_choi(r#"{"dim_k": 1, "dim_h": 1, "choi": [[2.5, 0.0]]}"#).unwrap();
        assert_eq!(ok.choi()[(0, 0)], C64::new(2.5, 0.0));
    }

    proptest! {
        #[test]
        fn schmidt_vector_json_is_lossless(
            re in proptest::collection::vec(-10.0f64..10.0, 12),
            im in proptest::collection::vec(-10.0f64..10.0, 12),
        ) {
            let x: Vec<C64> = (0..2).map(|i| C64::new(re[i], im[i])).collect();
            let y: Vec<C64> = (2..5).map(|i| C64::new(re[i], im[i])).collect();
            let x2: Vec<C64> = (5..7).map(|i| C64::new(re[i], im[i])).collect();
            let y2: Vec<C64> = (7..10).map(|i| C64::new(re[i], im[i])).collect();
            let v = SchmidtVector::new(2, 3, 2, vec![x, x2], vec![y, y2]).unwrap();
            let text = serde_json::to_string(&SchmidtVectorJson::from_vector(&v)).unwrap();
            let back: SchmidtVectorJson = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back.to_vector().unwrap(), v);
        }
    }
}
