//! JSON documents read and written by the command-line tool.
//!
//! Complex scalars are `[re, im]` pairs and matrices are row-major nested
//! arrays of them. Floats are written in shortest round-trip form, so
//! `save(load(x))` reproduces `x` byte for byte for any document this tool
//! produced.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use pndil::tuples::{make_tuple, CertError};
use pndil::{CMatrix, OperatorTuple, PnCertificate, Tolerances, TransferRealization};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateDoc {
    #[serde(rename = "G")]
    pub g: Vec<CMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TupleDoc {
    pub dim: usize,
    pub n: usize,
    pub operators: Vec<CMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateDoc>,
}

impl TupleDoc {
    pub fn from_tuple(tuple: &OperatorTuple, cert: Option<&PnCertificate>) -> Self {
        Self {
            dim: tuple.dim(),
            n: tuple.n(),
            operators: tuple.ops().to_vec(),
            certificate: cert.map(|c| CertificateDoc { g: c.g.clone() }),
        }
    }

    /// Checks the declared shape, then commutativity and contractivity.
    pub fn to_tuple(&self, tols: &Tolerances) -> Result<OperatorTuple, CliError> {
        if self.operators.len() != self.n {
            return Err(CliError::Parse(format!(
                "n = {} but {} operators given",
                self.n,
                self.operators.len()
            )));
        }
        if let Some(k) = self.operators.iter().position(|t| t.shape() != (self.dim, self.dim)) {
            return Err(CliError::Parse(format!(
                "operator {} has shape {:?}, expected {d}×{d}",
                k + 1,
                self.operators[k].shape(),
                d = self.dim
            )));
        }
        if let Some(cert) = &self.certificate {
            if let Some(k) = cert.g.iter().position(|g| g.shape() != (self.dim, self.dim)) {
                return Err(CliError::Parse(format!("certificate G_{} has the wrong shape", k + 1)));
            }
        }
        make_tuple(self.operators.clone(), tols.commute, tols.contract)
            .map_err(|e| CliError::Certification(CertError::Tuple(e).to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationDoc {
    #[serde(rename = "A")]
    pub a: CMatrix,
    #[serde(rename = "B")]
    pub b: CMatrix,
    #[serde(rename = "C")]
    pub c: CMatrix,
    #[serde(rename = "D")]
    pub d: CMatrix,
    pub partition: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect_rank: Option<usize>,
    /// `(e, f)`: dimensions of the two sides of the completed unitary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion_dims: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generating_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitarity_residual: Option<f64>,
}

impl RealizationDoc {
    pub fn to_realization(&self) -> Result<TransferRealization, CliError> {
        let f: usize = self.partition.iter().sum();
        // An empty row list loses the column count.
        let b = if self.b.rows() == 0 {
            CMatrix::zeros(0, f)
        } else {
            self.b.clone()
        };
        TransferRealization::from_blocks(
            self.a.clone(),
            b,
            self.c.clone(),
            self.d.clone(),
            self.partition.clone(),
        )
        .map_err(|e| CliError::Parse(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub condition: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub message: String,
}

impl Failure {
    pub fn from_cert_error(e: &CertError) -> Self {
        let (condition, index, value) = match e {
            CertError::TooFewOperators { n } => ("too_few_operators", None, Some(*n as f64)),
            CertError::WrongCount { got, .. } => ("wrong_count", None, Some(*got as f64)),
            CertError::Shape { index } => ("shape", Some(*index), None),
            CertError::NotSzego { min_eigenvalue } => ("not_szego", None, Some(*min_eigenvalue)),
            CertError::NotPure { index, radius } => ("not_pure", Some(*index), Some(*radius)),
            CertError::GNotPsd { index, min_eigenvalue } => ("g_not_psd", Some(*index), Some(*min_eigenvalue)),
            CertError::SumMismatch { residual } => ("sum_mismatch", None, Some(*residual)),
            CertError::ProductNotPsd { index, min_eigenvalue } => {
                ("product_not_psd", Some(*index), Some(*min_eigenvalue))
            }
            CertError::HypothesisFailed(_) => ("hypothesis_failed", None, None),
            CertError::Tuple(_) => ("tuple", None, None),
            CertError::Mat(_) => ("numerics", None, None),
        };
        Self {
            condition: condition.into(),
            index,
            value,
            message: e.to_string(),
        }
    }
}

/// Output of `certify`: the input tuple (with the checked certificate when
/// accepted) plus diagnostics. It loads as a tuple document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    #[serde(flatten)]
    pub tuple: TupleDoc,
    pub accepted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<CertDiagnostics>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertDiagnostics {
    pub sum_residual: f64,
    pub szego_min_eigenvalue: f64,
    pub g_min_eigenvalues: Vec<f64>,
    pub product_min_eigenvalues: Vec<f64>,
    pub defect_rank: usize,
    pub partition: Vec<usize>,
}

impl CertDiagnostics {
    pub fn new(cert: &PnCertificate) -> Self {
        Self {
            sum_residual: cert.sum_residual,
            szego_min_eigenvalue: cert.szego_min_eigenvalue,
            g_min_eigenvalues: cert.g_min_eigenvalues.clone(),
            product_min_eigenvalues: cert.product_min_eigenvalues.clone(),
            defect_rank: cert.defect_rank(),
            partition: cert.partition(),
        }
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents contain only finite numbers");
    s.push('\n');
    s
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    from_json(&read_text(path)?)
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}
