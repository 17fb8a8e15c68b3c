//! JSON document formats for tensors, problems and solver reports.
//!
//! Complex scalars are two-element `[re, im]` arrays. Dense tensor data is
//! stored in the canonical flat order, which equals the in-memory layout:
//! the column-major unfolding with multi-indices linearized first-index
//! fastest. For a `2x2x2x2` tensor the entry at (i1, j1, i2, j2) (1-based)
//! sits at flat position `(i1-1) + 2*(i2-1) + 4*((j1-1) + 2*(j2-1))`.

use serde::{Deserialize, Serialize};

use rtk_core::control::MltiSystem;
use rtk_core::dense::Mat;
use rtk_core::equations::{ArteMethod, ArteProblem, ArteReport, LinearSolver};
use rtk_core::structured::GcpdTensor;
use rtk_core::tensor::PairedTensor;
use rtk_core::{Shape, C64};

use crate::error::CliError;

/// A dense or structured (generalized CPD) tensor on disk.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TensorDocument {
    pub format: TensorFormat,
    pub order: usize,
    pub row_dims: Vec<usize>,
    pub col_dims: Vec<usize>,
    /// Dense entries in canonical flat order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<Vec<[f64; 2]>>,
    /// Number of generalized-CPD terms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// `terms[r][n]` is the mode-n factor of term r, row-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum TensorFormat {
    Dense,
    Gcpd,
}

fn pack(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpack(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

impl TensorDocument {
    pub fn from_tensor(t: &PairedTensor) -> TensorDocument {
        TensorDocument {
            format: TensorFormat::Dense,
            order: t.order(),
            row_dims: t.shape().row_dims().to_vec(),
            col_dims: t.shape().col_dims().to_vec(),
            data: Some(t.unfold().data().iter().map(|&z| pack(z)).collect()),
            rank: None,
            terms: None,
        }
    }

    pub fn from_gcpd(t: &GcpdTensor) -> TensorDocument {
        let shape = t.shape();
        let terms = (0..t.terms())
            .map(|r| {
                (1..=t.order())
                    .map(|n| {
                        let f = t.factor(r, n);
                        let mut out = Vec::with_capacity(f.nrows() * f.ncols());
                        for i in 0..f.nrows() {
                            for j in 0..f.ncols() {
                                out.push(pack(f[(i, j)]));
                            }
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        TensorDocument {
            format: TensorFormat::Gcpd,
            order: shape.order(),
            row_dims: shape.row_dims().to_vec(),
            col_dims: shape.col_dims().to_vec(),
            data: None,
            rank: Some(t.terms()),
            terms: Some(terms),
        }
    }

    fn shape(&self, field: &str) -> Result<Shape, CliError> {
        if self.row_dims.len() != self.order || self.col_dims.len() != self.order {
            return Err(CliError::validation(format!(
                "{field}: order {} does not match {} row dims / {} col dims",
                self.order,
                self.row_dims.len(),
                self.col_dims.len()
            )));
        }
        Shape::new(self.row_dims.clone(), self.col_dims.clone())
            .map_err(|e| CliError::validation(format!("{field}: {e}")))
    }

    /// Validates and densifies the document into a paired tensor.
    pub fn to_tensor(&self, field: &str) -> Result<PairedTensor, CliError> {
        match self.format {
            TensorFormat::Dense => {
                let shape = self.shape(field)?;
                let expected = shape.row_len() * shape.col_len();
                let data = self.data.as_ref().ok_or_else(|| {
                    CliError::validation(format!("{field}: dense tensor without data"))
                })?;
                if data.len() != expected {
                    return Err(CliError::validation(format!(
                        "{field}: data has {} entries, shape needs {expected}",
                        data.len()
                    )));
                }
                let values: Vec<C64> = data.iter().map(|&v| unpack(v)).collect();
                let mat = Mat::from_col_major(shape.row_len(), shape.col_len(), values)
                    .map_err(|e| CliError::validation(format!("{field}: {e}")))?;
                PairedTensor::fold(shape, mat)
                    .map_err(|e| CliError::validation(format!("{field}: {e}")))
            }
            TensorFormat::Gcpd => Ok(self.to_gcpd(field)?.densify()),
        }
    }

    /// Validates the document as a generalized CPD representation.
    pub fn to_gcpd(&self, field: &str) -> Result<GcpdTensor, CliError> {
        if self.format != TensorFormat::Gcpd {
            return Err(CliError::validation(format!(
                "{field}: expected a gcpd tensor"
            )));
        }
        let shape = self.shape(field)?;
        let terms = self
            .terms
            .as_ref()
            .ok_or_else(|| CliError::validation(format!("{field}: gcpd tensor without terms")))?;
        if let Some(rank) = self.rank {
            if rank != terms.len() {
                return Err(CliError::validation(format!(
                    "{field}: rank {rank} does not match {} terms",
                    terms.len()
                )));
            }
        }
        let mut factors = Vec::with_capacity(terms.len());
        for (r, term) in terms.iter().enumerate() {
            if term.len() != self.order {
                return Err(CliError::validation(format!(
                    "{field}: term {r} has {} modes, expected {}",
                    term.len(),
                    self.order
                )));
            }
            let mut mats = Vec::with_capacity(term.len());
            for (n, flat) in term.iter().enumerate() {
                let (rows, cols) = (self.row_dims[n], self.col_dims[n]);
                if flat.len() != rows * cols {
                    return Err(CliError::validation(format!(
                        "{field}: term {r} mode {} has {} entries, expected {}",
                        n + 1,
                        flat.len(),
                        rows * cols
                    )));
                }
                let mat = Mat::from_fn(rows, cols, |i, j| unpack(flat[i * cols + j]));
                mats.push(mat);
            }
            factors.push(mats);
        }
        let _ = shape;
        GcpdTensor::new(factors).map_err(|e| CliError::validation(format!("{field}: {e}")))
    }
}

/// Problem kinds accepted by the solver commands.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Arte,
    Lyapunov,
    Sylvester,
    System,
}

/// Solver options carried inside a problem file; command-line flags win
/// over these.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverOptionsDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A problem instance on disk: the tensors named by `kind` plus options.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub kind: ProblemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<TensorDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<TensorDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<TensorDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<TensorDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<TensorDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<TensorDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<TensorDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e0: Option<TensorDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<SolverOptionsDocument>,
}

fn require<'a>(
    field: &'a Option<TensorDocument>,
    kind: &str,
    name: &str,
) -> Result<&'a TensorDocument, CliError> {
    field
        .as_ref()
        .ok_or_else(|| CliError::validation(format!("{kind} problem requires the field `{name}`")))
}

impl ProblemDocument {
    pub fn parse_str(text: &str) -> Result<ProblemDocument, CliError> {
        serde_json::from_str(text).map_err(CliError::Parse)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serialization cannot fail")
    }

    fn expect_kind(&self, kind: ProblemKind, name: &str) -> Result<(), CliError> {
        if self.kind != kind {
            return Err(CliError::validation(format!(
                "problem kind is {:?}, the command needs a {name} problem",
                self.kind
            )));
        }
        Ok(())
    }

    /// The ARTE coefficients: either `(a, g, k)` directly or derived from
    /// `(a, b, c)` system factors.
    pub fn arte_problem(&self) -> Result<ArteProblem, CliError> {
        self.expect_kind(ProblemKind::Arte, "arte")?;
        let a = require(&self.a, "arte", "a")?.to_tensor("a")?;
        let problem = if self.g.is_some() || self.k.is_some() {
            let g = require(&self.g, "arte", "g")?.to_tensor("g")?;
            let k = require(&self.k, "arte", "k")?.to_tensor("k")?;
            let mut p = ArteProblem::new(a, g, k).map_err(CliError::precondition)?;
            if let Some(b) = &self.b {
                p.b = Some(b.to_tensor("b")?);
            }
            if let Some(c) = &self.c {
                p.c = Some(c.to_tensor("c")?);
            }
            p
        } else {
            let b = require(&self.b, "arte", "b (or g, k)")?.to_tensor("b")?;
            let c = require(&self.c, "arte", "c (or g, k)")?.to_tensor("c")?;
            ArteProblem::from_system(a, b, c).map_err(CliError::precondition)?
        };
        Ok(problem)
    }

    pub fn lyapunov_pair(&self) -> Result<(PairedTensor, PairedTensor), CliError> {
        self.expect_kind(ProblemKind::Lyapunov, "lyapunov")?;
        let a = require(&self.a, "lyapunov", "a")?.to_tensor("a")?;
        let q = require(&self.q, "lyapunov", "q")?.to_tensor("q")?;
        Ok((a, q))
    }

    pub fn sylvester_triple(&self) -> Result<(PairedTensor, PairedTensor, PairedTensor), CliError> {
        self.expect_kind(ProblemKind::Sylvester, "sylvester")?;
        let a = require(&self.a, "sylvester", "a")?.to_tensor("a")?;
        let b = require(&self.b, "sylvester", "b")?.to_tensor("b")?;
        let k = require(&self.k, "sylvester", "k")?.to_tensor("k")?;
        Ok((a, b, k))
    }

    pub fn system(&self) -> Result<MltiSystem, CliError> {
        self.expect_kind(ProblemKind::System, "system")?;
        let a = require(&self.a, "system", "a")?.to_tensor("a")?;
        let b = require(&self.b, "system", "b")?.to_tensor("b")?;
        let c = require(&self.c, "system", "c")?.to_tensor("c")?;
        let d = require(&self.d, "system", "d")?.to_tensor("d")?;
        MltiSystem::new(a, b, c, d).map_err(CliError::precondition)
    }

    pub fn starting_value(&self) -> Result<Option<PairedTensor>, CliError> {
        self.e0.as_ref().map(|doc| doc.to_tensor("e0")).transpose()
    }
}

/// Serialized ARTE solver outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArteReportDocument {
    pub method: String,
    pub iterations: usize,
    pub final_residual: f64,
    pub residual_history: Vec<f64>,
    pub closed_loop_eigenvalues: Vec<[f64; 2]>,
    pub psd_certificate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stabilizing_start: Option<bool>,
    pub solution: TensorDocument,
}

impl ArteReportDocument {
    pub fn from_report(report: &ArteReport) -> ArteReportDocument {
        ArteReportDocument {
            method: match report.method {
                ArteMethod::Newton => "newton".into(),
                ArteMethod::Schur => "schur".into(),
            },
            iterations: report.iterations,
            final_residual: report.residual_history.last().copied().unwrap_or(0.0),
            residual_history: report.residual_history.clone(),
            closed_loop_eigenvalues: report
                .closed_loop_eigenvalues
                .iter()
                .map(|&z| pack(z))
                .collect(),
            psd_certificate: report.psd_certificate,
            stabilizing_start: report.stabilizing_start,
            solution: TensorDocument::from_tensor(&report.e),
        }
    }
}

/// Parses an inner-solver name; `auto` picks by problem size
/// (direct up to a 64-dimensional unfolding, BiCG above).
pub fn parse_linear_solver(name: &str, unfolding_dim: usize) -> Result<LinearSolver, CliError> {
    match name {
        "auto" => Ok(rtk_core::equations::default_solver(unfolding_dim)),
        "direct" => Ok(LinearSolver::Direct),
        "bicg-tensor" => Ok(LinearSolver::BicgTensor),
        "bicg-vec" => Ok(LinearSolver::BicgVec),
        other => Err(CliError::validation(format!(
            "unknown inner solver `{other}` (expected auto, direct, bicg-tensor or bicg-vec)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;

    #[test]
    fn dense_round_trip_is_byte_identical() {
        let t = fixture::e0();
        let doc = TensorDocument::from_tensor(&t);
        let json = serde_json::to_string_pretty(&doc).unwrap();
        let parsed: TensorDocument = serde_json::from_str(&json).unwrap();
        let json_again = serde_json::to_string_pretty(&parsed).unwrap();
        assert_eq!(json, json_again);
        let back = parsed.to_tensor("t").unwrap();
        assert_eq!(back.unfold().data(), t.unfold().data());
    }

    #[test]
    fn identity_document_parses() {
        let id = PairedTensor::identity(&[2, 2]);
        let doc = TensorDocument::from_tensor(&id);
        let back = doc.to_tensor("identity").unwrap();
        assert!(back.sub(&id).frobenius_norm() == 0.0);
    }

    #[test]
    fn gcpd_document_round_trips_and_densifies() {
        let g = fixture::gcpd_a();
        let doc = TensorDocument::from_gcpd(&g);
        let back = doc.to_gcpd("a").unwrap();
        assert_eq!(back.terms(), 1);
        let dense = doc.to_tensor("a").unwrap();
        assert!(dense.sub(&g.densify()).frobenius_norm() < 1e-15);
    }

    #[test]
    fn truncated_data_is_rejected_with_field_name() {
        let t = PairedTensor::identity(&[2, 2]);
        let mut doc = TensorDocument::from_tensor(&t);
        doc.data.as_mut().unwrap().pop();
        let err = doc.to_tensor("a").unwrap_err();
        let message = format!("{err}");
        assert!(message.contains("a:"), "message: {message}");
        assert!(message.contains("15"), "message: {message}");
        assert!(message.contains("16"), "message: {message}");
    }

    #[test]
    fn problem_document_dispatches_by_kind() {
        let sys = fixture::system();
        let doc = ProblemDocument {
            kind: ProblemKind::System,
            a: Some(TensorDocument::from_tensor(&sys.a)),
            b: Some(TensorDocument::from_tensor(&sys.b)),
            c: Some(TensorDocument::from_tensor(&sys.c)),
            d: Some(TensorDocument::from_tensor(&sys.d)),
            g: None,
            k: None,
            q: None,
            e0: None,
            options: None,
        };
        let parsed = ProblemDocument::parse_str(&doc.to_json()).unwrap();
        assert!(parsed.system().is_ok());
        assert!(matches!(
            parsed.arte_problem(),
            Err(CliError::Validation(_))
        ));
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        let err = ProblemDocument::parse_str("{ not json").unwrap_err();
        assert!(matches!(err, CliError::Parse(_)));
    }
}
