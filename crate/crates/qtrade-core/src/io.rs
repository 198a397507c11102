//! Serialization: the JSON schemas for states, ensembles, measurements and
//! reports, CSV export for plot data, and atomic file writes.
//!
//! Vectors serialize as `{dims, re: [f64], im: [f64]}` and matrices as
//! `{dims, re: [[f64]], im: [[f64]]}` (row-major). JSON floats round-trip
//! bit-exactly through serde_json's shortest representation.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ensemble::{Ensemble, RankOnePovm};
use crate::error::{Error, Result};
use crate::measures::{Certificate, MeasureReport};
use crate::qstate::{CMat, CVec, DensityMatrix, PureState};
use crate::theorems::TheoremReport;

/// Wire form of a complex vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorJson {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// Wire form of a complex matrix (row-major).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&PureState> for VectorJson {
    fn from(s: &PureState) -> Self {
        Self {
            dims: s.dims().to_vec(),
            re: s.amplitudes().iter().map(|z| z.re).collect(),
            im: s.amplitudes().iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<VectorJson> for PureState {
    type Error = Error;
    fn try_from(v: VectorJson) -> Result<Self> {
        if v.re.len() != v.im.len() {
            return Err(Error::InvalidState(format!(
                "re has {} entries, im has {}",
                v.re.len(),
                v.im.len()
            )));
        }
        let amps = CVec::from_iterator(
            v.re.len(),
            v.re.iter()
                .zip(&v.im)
                .map(|(&re, &im)| Complex64::new(re, im)),
        );
        PureState::new(amps, v.dims)
    }
}

impl From<&DensityMatrix> for MatrixJson {
    fn from(m: &DensityMatrix) -> Self {
        let mat = m.matrix();
        let n = mat.nrows();
        let row = |r: usize, f: fn(&Complex64) -> f64| -> Vec<f64> {
            (0..n).map(|c| f(&mat[(r, c)])).collect()
        };
        Self {
            dims: m.dims().to_vec(),
            re: (0..n).map(|r| row(r, |z| z.re)).collect(),
            im: (0..n).map(|r| row(r, |z| z.im)).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for DensityMatrix {
    type Error = Error;
    fn try_from(m: MatrixJson) -> Result<Self> {
        let n = m.re.len();
        if m.im.len() != n || m.re.iter().any(|r| r.len() != n) || m.im.iter().any(|r| r.len() != n)
        {
            return Err(Error::InvalidState("matrix rows are ragged".into()));
        }
        let mat = CMat::from_fn(n, n, |r, c| Complex64::new(m.re[r][c], m.im[r][c]));
        DensityMatrix::new(mat, m.dims)
    }
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VectorJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        PureState::try_from(VectorJson::deserialize(d)?).map_err(D::Error::custom)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        DensityMatrix::try_from(MatrixJson::deserialize(d)?).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct EnsembleJson {
    weights: Vec<f64>,
    states: Vec<VectorJson>,
    target: MatrixJson,
}

impl Serialize for Ensemble {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EnsembleJson {
            weights: self.weights().to_vec(),
            states: self.states().iter().map(VectorJson::from).collect(),
            target: MatrixJson::from(self.target()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ensemble {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = EnsembleJson::deserialize(d)?;
        let states: Result<Vec<PureState>> =
            j.states.into_iter().map(PureState::try_from).collect();
        let target = DensityMatrix::try_from(j.target).map_err(D::Error::custom)?;
        Ensemble::new(j.weights, states.map_err(D::Error::custom)?, target)
            .map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct PovmJson {
    vectors: Vec<VectorJson>,
}

impl Serialize for RankOnePovm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PovmJson {
            vectors: self
                .vectors()
                .iter()
                .map(|v| VectorJson {
                    dims: vec![self.dim()],
                    re: v.iter().map(|z| z.re).collect(),
                    im: v.iter().map(|z| z.im).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RankOnePovm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PovmJson::deserialize(d)?;
        let vectors: Vec<CVec> = j
            .vectors
            .into_iter()
            .map(|v| {
                CVec::from_iterator(
                    v.re.len(),
                    v.re.iter()
                        .zip(&v.im)
                        .map(|(&re, &im)| Complex64::new(re, im)),
                )
            })
            .collect();
        RankOnePovm::new(vectors).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum CertificateJson {
    Ensemble(EnsembleJson),
    Povm(PovmJson),
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Certificate::None => s.serialize_none(),
            Certificate::Ensemble(e) => {
                #[derive(Serialize)]
                struct Tagged<'a> {
                    kind: &'static str,
                    weights: &'a [f64],
                    states: Vec<VectorJson>,
                    target: MatrixJson,
                }
                Tagged {
                    kind: "ensemble",
                    weights: e.weights(),
                    states: e.states().iter().map(VectorJson::from).collect(),
                    target: MatrixJson::from(e.target()),
                }
                .serialize(s)
            }
            Certificate::Povm(p) => {
                #[derive(Serialize)]
                struct Tagged {
                    kind: &'static str,
                    vectors: Vec<VectorJson>,
                }
                Tagged {
                    kind: "povm",
                    vectors: p
                        .vectors()
                        .iter()
                        .map(|v| VectorJson {
                            dims: vec![p.dim()],
                            re: v.iter().map(|z| z.re).collect(),
                            im: v.iter().map(|z| z.im).collect(),
                        })
                        .collect(),
                }
                .serialize(s)
            }
        }
    }
}

impl<'de> Deserialize<'de> for Certificate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let opt = Option::<CertificateJson>::deserialize(d)?;
        Ok(match opt {
            None => Certificate::None,
            Some(CertificateJson::Ensemble(e)) => {
                let states: Result<Vec<PureState>> =
                    e.states.into_iter().map(PureState::try_from).collect();
                let target = DensityMatrix::try_from(e.target).map_err(D::Error::custom)?;
                Certificate::Ensemble(
                    Ensemble::new(e.weights, states.map_err(D::Error::custom)?, target)
                        .map_err(D::Error::custom)?,
                )
            }
            Some(CertificateJson::Povm(p)) => {
                let vectors: Vec<CVec> = p
                    .vectors
                    .into_iter()
                    .map(|v| {
                        CVec::from_iterator(
                            v.re.len(),
                            v.re.iter()
                                .zip(&v.im)
                                .map(|(&re, &im)| Complex64::new(re, im)),
                        )
                    })
                    .collect();
                Certificate::Povm(RankOnePovm::new(vectors).map_err(D::Error::custom)?)
            }
        })
    }
}

/// A state file holding either a pure-state vector or a density matrix.
#[derive(Debug, Clone)]
pub enum LoadedState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl LoadedState {
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            LoadedState::Pure(p) => p.to_density(),
            LoadedState::Mixed(m) => m.clone(),
        }
    }
}

/// Parse a state file, accepting both the vector and the matrix schema.
pub fn parse_state_json(text: &str) -> Result<LoadedState> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Vector(VectorJson),
        Matrix(MatrixJson),
    }
    let raw: Raw = serde_json::from_str(text)?;
    Ok(match raw {
        Raw::Vector(v) => LoadedState::Pure(PureState::try_from(v)?),
        Raw::Matrix(m) => LoadedState::Mixed(DensityMatrix::try_from(m)?),
    })
}

/// Write a file atomically (temp file in the same directory, then rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_file_name(format!(
        "{}.tmp",
        path.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into())
    ));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Plot-ready CSV of theorem reports.
pub fn theorem_reports_csv(reports: &[TheoremReport]) -> String {
    let mut out = String::from("state_id,theorem,q,lhs,rhs,residual,converged\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.state_id,
            r.theorem.as_str(),
            r.q,
            r.lhs,
            r.rhs,
            r.residual,
            r.converged
        );
    }
    out
}

/// Single-line CSV form of measure reports.
pub fn measure_reports_csv(reports: &[MeasureReport]) -> String {
    let mut out = String::from("measure,q,value,bound_side,m_outcomes\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.measure.as_str(),
            r.q,
            r.value,
            match r.bound_side {
                crate::measures::BoundSide::Upper => "upper",
                crate::measures::BoundSide::Lower => "lower",
                crate::measures::BoundSide::Exact => "exact",
            },
            r.m_outcomes.map(|m| m.to_string()).unwrap_or_default(),
        );
    }
    out
}
