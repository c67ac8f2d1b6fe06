//! Machine-readable reports. Every report carries `"schema": 1`; complex
//! numbers are `[re, im]` pairs and floats are written in shortest
//! round-trip form, so a reload reproduces every value bit for bit.

use std::collections::BTreeMap;

use mapcone::json::{ChoiJson, SchmidtVectorJson, StateJson};
use mapcone::{cp_split, LinMap, MapError, Tolerances, Verdict, VerdictKind, Witness};
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;
pub const TOOL: &str = "mapcone";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Agreement required when a witness objective is recomputed from a report.
pub const REVALIDATE_TOL: f64 = 1e-9;

/// Where the analysed map came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum MapIdentity {
    Gallery {
        name: String,
        dim: Option<usize>,
        param: Option<f64>,
    },
    File {
        path: String,
        sha256: String,
    },
}

impl MapIdentity {
    pub fn label(&self) -> String {
        match self {
            Self::Gallery { name, dim, param } => {
                let mut s = format!("gallery:{name}");
                if let Some(d) = dim {
                    s += &format!(" dim={d}");
                }
                if let Some(p) = param {
                    s += &format!(" param={p}");
                }
                s
            }
            Self::File { path, sha256 } => format!("{path} (sha256 {})", &sha256[..12.min(sha256.len())]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub exists: bool,
    pub c: Option<f64>,
    pub residual: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindJson {
    CertifiedYes,
    CertifiedNo,
    HeuristicYes,
}

impl From<VerdictKind> for KindJson {
    fn from(k: VerdictKind) -> Self {
        match k {
            VerdictKind::CertifiedYes => Self::CertifiedYes,
            VerdictKind::CertifiedNo => Self::CertifiedNo,
            VerdictKind::HeuristicYes => Self::HeuristicYes,
        }
    }
}

impl KindJson {
    pub fn label(self) -> &'static str {
        match self {
            Self::CertifiedYes => "yes (certified)",
            Self::CertifiedNo => "no (certified)",
            Self::HeuristicYes => "yes (heuristic)",
        }
    }
}

/// The operator a witness objective is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    /// `C_phi`.
    Choi,
    /// `C_{phi_cp}` of the split.
    ChoiCp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WitnessJson {
    Vector {
        operator: Operator,
        vector: SchmidtVectorJson,
    },
    State {
        operator: Operator,
        state: StateJson,
    },
}

impl WitnessJson {
    pub fn from_witness(w: &Witness, operator: Operator) -> Self {
        match w {
            Witness::Vector(v) => Self::Vector {
                operator,
                vector: SchmidtVectorJson::from_vector(v),
            },
            Witness::State(s) => Self::State {
                operator,
                state: StateJson::from_state(s),
            },
        }
    }

    pub fn operator(&self) -> Operator {
        match self {
            Self::Vector { operator, .. } | Self::State { operator, .. } => *operator,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictEntry {
    pub cone: String,
    pub k: Option<usize>,
    pub kind: KindJson,
    pub value: f64,
    pub detail: String,
    pub witness: Option<WitnessJson>,
}

impl VerdictEntry {
    pub fn new(cone: String, k: Option<usize>, v: &Verdict, operator: Operator) -> Self {
        Self {
            cone,
            k,
            kind: v.kind.into(),
            value: v.value,
            detail: v.detail.clone(),
            witness: v.witness.as_ref().map(|w| WitnessJson::from_witness(w, operator)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub map: MapIdentity,
    pub dim_k: usize,
    pub dim_h: usize,
    pub choi: ChoiJson,
    pub self_adjoint: bool,
    pub split: SplitSummary,
    pub settings: RunSettings,
    pub verdicts: Vec<VerdictEntry>,
    /// Tests not run, with the reason.
    pub skipped: Vec<String>,
    /// Wall-clock milliseconds per stage; only present when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

/// Recompute the objective of a serialized witness against the map.
pub fn witness_objective(map: &LinMap, w: &WitnessJson, tol: &Tolerances) -> Result<f64, MapError> {
    let op = match w.operator() {
        Operator::Choi => map.choi().hermitian_part(),
        Operator::ChoiCp => cp_split(map, tol)?.phi_cp.choi().clone(),
    };
    match w {
        WitnessJson::Vector { vector, .. } => Ok(vector.to_vector()?.objective(&op)),
        WitnessJson::State { state, .. } => Ok(state.to_state(tol)?.expectation(&op)),
    }
}

/// Reload every witness of the report and check that its objective matches
/// the recorded verdict value. Returns one message per failure.
pub fn revalidate(report: &AnalysisReport, tol: &Tolerances) -> Vec<String> {
    let map = match report.choi.to_map() {
        Ok(m) => m,
        Err(e) => return vec![format!("embedded Choi matrix: {e}")],
    };
    let mut failures = Vec::new();
    for entry in &report.verdicts {
        if entry.kind == KindJson::CertifiedNo && entry.witness.is_none() && entry.cone != "cp" {
            failures.push(format!("{}: certified refutation without witness", entry.cone));
        }
        let Some(w) = &entry.witness else { continue };
        match witness_objective(&map, w, tol) {
            Ok(v) if (v - entry.value).abs() <= REVALIDATE_TOL => {}
            Ok(v) => failures.push(format!(
                "{}: witness gives {v}, report says {}",
                entry.cone, entry.value
            )),
            Err(e) => failures.push(format!("{}: {e}", entry.cone)),
        }
    }
    failures
}
