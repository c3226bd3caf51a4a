//! JSON documents: check reports and R-matrix exports. Complex numbers are [re, im] pairs,
//! matrices are row-major lists of rows.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, TensorOperator};
use crate::qnum::QMode;
use crate::repspace::{Rep, RepKind};

pub const SCHEMA_VERSION: u32 = 1;

/// What a check expects: `Hold` passes when residual <= tolerance, `Detect` (negative control)
/// passes when residual > tolerance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    #[default]
    Hold,
    Detect,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(default)]
    pub expect: Expectation,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(check: impl Into<String>, residual: f64, tolerance: f64, expect: Expectation) -> Self {
        let pass = match expect {
            Expectation::Hold => residual <= tolerance,
            Expectation::Detect => residual > tolerance,
        };
        CheckRecord { check: check.into(), params: BTreeMap::new(), residual, tolerance, expect, pass }
    }

    pub fn hold(check: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self::new(check, residual, tolerance, Expectation::Hold)
    }

    pub fn detect(check: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self::new(check, residual, tolerance, Expectation::Detect)
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), serde_json::to_value(value).expect("serializable parameter"));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub seed: Option<u64>,
    pub records: Vec<CheckRecord>,
    pub all_pass: bool,
}

impl Report {
    pub fn new(suite: impl Into<String>, seed: Option<u64>, records: Vec<CheckRecord>) -> Self {
        let all_pass = records.iter().all(|r| r.pass);
        Report { schema_version: SCHEMA_VERSION, suite: suite.into(), seed, records, all_pass }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepDescriptor {
    pub lambda: C64,
    #[serde(flatten)]
    pub kind: RepKind,
    pub dim: usize,
}

impl From<&Rep> for RepDescriptor {
    fn from(rep: &Rep) -> Self {
        RepDescriptor { lambda: rep.lambda, kind: rep.kind, dim: rep.dim() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RMatrixDocument {
    pub schema_version: u32,
    pub kind: String,
    pub q: QMode,
    pub reps: Vec<RepDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<C64>,
    pub include_cartan_factor: bool,
    pub dims: [usize; 2],
    /// Coefficient of v0⊗v0 in R(v0⊗v0).
    pub normalization: C64,
    /// Image of v0⊗v0 equals v0⊗v0 to 1e-12.
    pub normalized: bool,
    pub matrix: Vec<Vec<C64>>,
}

/// Several R-matrices sharing modules, keyed by their spectral parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RMatrixFamily {
    pub schema_version: u32,
    pub matrices: Vec<RMatrixDocument>,
}

impl RMatrixFamily {
    pub fn new(matrices: Vec<RMatrixDocument>) -> Self {
        RMatrixFamily { schema_version: SCHEMA_VERSION, matrices }
    }
}

pub fn matrix_rows(m: &CMat) -> Vec<Vec<C64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<C64>]) -> Result<CMat> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Format("ragged matrix rows".into()));
    }
    Ok(CMat::from_fn(n, m, |i, j| rows[i][j]))
}

impl RMatrixDocument {
    pub fn new(
        kind: &str,
        q: QMode,
        reps: &[&Rep],
        z: Option<C64>,
        include_cartan_factor: bool,
        r: &TensorOperator,
    ) -> Self {
        let col0 = r.matrix.column(0);
        let normalized =
            (col0[0] - 1.0).norm() <= 1e-12 && col0.iter().skip(1).all(|v| v.norm() <= 1e-12);
        RMatrixDocument {
            schema_version: SCHEMA_VERSION,
            kind: kind.into(),
            q,
            reps: reps.iter().map(|r| RepDescriptor::from(*r)).collect(),
            z,
            include_cartan_factor,
            dims: [r.dims.0, r.dims.1],
            normalization: col0[0],
            normalized,
            matrix: matrix_rows(&r.matrix),
        }
    }

    pub fn operator(&self) -> Result<TensorOperator> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Format(format!("unsupported schema_version {}", self.schema_version)));
        }
        TensorOperator::new((self.dims[0], self.dims[1]), matrix_from_rows(&self.matrix)?)
    }
}
