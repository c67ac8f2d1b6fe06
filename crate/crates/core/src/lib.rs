//! Analysis of linear maps between full matrix algebras `B(K) -> B(H)`.
//!
//! Every map is stored through its Choi matrix `C_phi = sum e_ij (x) phi(e_ij)`.
//! A self-adjoint map whose Choi matrix has a nonzero positive part splits as
//! `c^-1 phi = Tr - phi_cp` with `c = lambda_max(C_phi)` and `phi_cp`
//! completely positive ([`split`]). Membership of phi in the positive,
//! k-positive, completely positive and decomposable cones then reduces to
//! bounding `rho(C_{phi_cp}) <= 1` over the matching class of states
//! ([`schmidt`], [`cones`]).
//!
//! Tensor index convention: `e_i (x) f_j` of `K (x) H` has index `i * dim_h + j`.
//! Transposes are plain transposes in the standard basis.

pub mod cones;
pub mod config;
pub mod error;
pub mod gallery;
pub mod json;
pub mod linalg;
pub mod linmap;
pub mod matrix;
pub mod oracle;
pub mod random;
pub mod schmidt;
pub mod split;
pub mod walkthrough;

pub use cones::{
    cone_norm, decide, is_completely_positive, is_decomposable, is_positive, ppt_sup, ConeId, PptOptReport,
};
pub use config::{OptConfig, PptConfig, Settings, Tolerances};
pub use error::{MapError, Result};
pub use gallery::GalleryMap;
pub use linalg::{hermitian_eig, positive_part, schmidt_decompose, svd, HermitianEig, SchmidtDecomposition};
pub use linmap::{LinMap, StateDensity};
pub use matrix::{kron, BipartiteVector, CMatrix, Subsystem, C64};
pub use oracle::{kpos_bruteforce_oracle, OracleReport};
pub use schmidt::{
    check_witness_preconditions, extend_witness, is_k_positive, sup_schmidt, OptReport, SchmidtVector, Verdict,
    VerdictKind, Witness, WitnessCheck,
};
pub use split::{cp_split, verify_split, CpSplit};
