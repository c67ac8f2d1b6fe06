//! Canonical maps used as test subjects and CLI inputs.

use crate::error::{invalid, MapError, Result};
use crate::linmap::LinMap;
use crate::matrix::{CMatrix, C64};

/// A named map with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum GalleryMap {
    /// `x -> x` on `B(C^n)`.
    Identity { n: usize },
    /// `x -> x^t` on `B(C^n)`.
    Transpose { n: usize },
    /// `x -> Tr(x) 1_H`.
    Trace { dim_k: usize, dim_h: usize },
    /// The Choi map of `B(C^3)`:
    ///
    /// ```text
    /// [ x11 + x33   -x12        -x13      ]
    /// [ -x21        x11 + x22   -x23      ]
    /// [ -x31        -x32        x22 + x33 ]
    /// ```
    Choi3,
    /// `Tr - lambda * id` on `B(C^n)`; k-positive exactly when `lambda <= 1/k`.
    Reduction { lambda: f64, n: usize },
    /// `x -> V x V^*` for a `dim_h x dim_k` matrix `V`.
    AdV { v: CMatrix },
}

/// Names accepted by [`GalleryMap::parse`].
pub const GALLERY_NAMES: [&str; 6] = ["identity", "transpose", "trace", "choi3", "reduction", "adv"];

impl GalleryMap {
    /// Resolve a CLI-style name. `dim` defaults to 3 and `param` to 1.
    ///
    /// For `adv`, `param` is the rank `r` of `V`, the projector onto the
    /// first `r` basis vectors (defaults to `dim`).
    pub fn parse(name: &str, dim: Option<usize>, param: Option<f64>) -> Result<Self> {
        let n = dim.unwrap_or(3);
        if n == 0 {
            return invalid("dimension must be positive");
        }
        Ok(match name {
            "identity" => Self::Identity { n },
            "transpose" => Self::Transpose { n },
            "trace" => Self::Trace { dim_k: n, dim_h: n },
            "choi3" => {
                if dim.is_some_and(|d| d != 3) {
                    return invalid("choi3 acts on B(C^3) only");
                }
                Self::Choi3
            }
            "reduction" => Self::Reduction {
                lambda: param.unwrap_or(1.0),
                n,
            },
            "adv" => {
                let r = param.map_or(n, |p| p.round().max(0.0) as usize).min(n);
                let v = CMatrix::from_fn(n, n, |i, j| {
                    if i == j && i < r {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                Self::AdV { v }
            }
            other => return Err(MapError::UnknownGallery(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity { .. } => "identity",
            Self::Transpose { .. } => "transpose",
            Self::Trace { .. } => "trace",
            Self::Choi3 => "choi3",
            Self::Reduction { .. } => "reduction",
            Self::AdV { .. } => "adv",
        }
    }

    pub fn build(&self) -> Result<LinMap> {
        match self {
            Self::Identity { n } => LinMap::from_fn(*n, *n, |x| x.clone()),
            Self::Transpose { n } => LinMap::from_fn(*n, *n, |x| x.transpose()),
            Self::Trace { dim_k, dim_h } => LinMap::from_choi(*dim_k, *dim_h, CMatrix::identity(dim_k * dim_h)),
            Self::Choi3 => LinMap::from_fn(3, 3, choi_map),
            Self::Reduction { lambda, n } => {
                let n = *n;
                LinMap::from_fn(n, n, |x| &CMatrix::identity(n).scale_c(x.trace()) - &x.scale(*lambda))
            }
            Self::AdV { v } => {
                let (dh, dk) = (v.rows(), v.cols());
                if dh == 0 || dk == 0 {
                    return invalid("AdV needs a non-empty matrix");
                }
                let va = v.adjoint();
                LinMap::from_fn(dk, dh, |x| &(v * x) * &va)
            }
        }
    }
}

fn choi_map(x: &CMatrix) -> CMatrix {
    CMatrix::from_fn(3, 3, |i, j| {
        if i == j {
            // Diagonal entry i is x_ii + x_{i-1,i-1} (cyclically).
            x[(i, i)] + x[((i + 2) % 3, (i + 2) % 3)]
        } else {
            -x[(i, j)]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn choi_map_matches_displayed_formula() {
        let x = CMatrix::from_fn(3, 3, |i, j| C64::new((3 * i + j + 1) as f64, (i as f64) - (j as f64)));
        let y = choi_map(&x);
        assert_eq!(y[(0, 0)], x[(0, 0)] + x[(2, 2)]);
        assert_eq!(y[(1, 1)], x[(0, 0)] + x[(1, 1)]);
        assert_eq!(y[(2, 2)], x[(1, 1)] + x[(2, 2)]);
        for (i, j) in [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)] {
            assert_eq!(y[(i, j)], -x[(i, j)]);
        }
        let phi = GalleryMap::Choi3.build().unwrap();
        assert_eq!(
            phi.apply(&CMatrix::unit(3, 1, 1)).unwrap(),
            CMatrix::diag_real(&[0.0, 1.0, 1.0])
        );
    }

    #[test]
    fn reduction_at_one_is_trace_minus_identity() {
        let r = GalleryMap::Reduction { lambda: 1.0, n: 3 }.build().unwrap();
        let tr = GalleryMap::Trace { dim_k: 3, dim_h: 3 }.build().unwrap();
        let id = GalleryMap::Identity { n: 3 }.build().unwrap();
        assert_eq!(r, tr.add(&id.scale(-1.0)).unwrap());
    }

    #[test]
    fn adv_with_identity_is_identity_map() {
        let m = GalleryMap::AdV {
            v: CMatrix::identity(3),
        }
        .build()
        .unwrap();
        assert_eq!(m, GalleryMap::Identity { n: 3 }.build().unwrap());
        let rect = CMatrix::from_fn(2, 3, |i, j| C64::new((i + j) as f64, 0.0));
        let m = GalleryMap::AdV { v: rect }.build().unwrap();
        assert_eq!((m.dim_k(), m.dim_h()), (3, 2));
    }

    #[test]
    fn parse_names() {
        for name in GALLERY_NAMES {
            let g = GalleryMap::parse(name, None, None).unwrap();
            assert_eq!(g.name(), name);
            g.build().unwrap();
        }
        assert!(matches!(
            GalleryMap::parse("choy", None, None),
            Err(MapError::UnknownGallery(_))
        ));
        assert!(GalleryMap::parse("choi3", Some(4), None).is_err());
        let g = GalleryMap::parse("reduction", Some(4), Some(0.25)).unwrap();
        assert_eq!(g, GalleryMap::Reduction { lambda: 0.25, n: 4 });
    }
}
