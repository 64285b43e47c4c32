//! JSON state files and machine-readable reports.
//!
//! A state file looks like
//!
//! ```json
//! {
//!   "format_version": "1.0",
//!   "dims": [2, 2],
//!   "kind": "pure",
//!   "amplitudes": [
//!     {"index": [0, 0], "re": 0.7071067811865476, "im": 0.0},
//!     {"index": [1, 1], "re": 0.7071067811865476, "im": 0.0}
//!   ]
//! }
//! ```
//!
//! Amplitudes are keyed by per-particle digit vectors and unlisted ones are
//! zero. A `"mixture"` file carries `"terms": [{"weight": w, "amplitudes": [...]}]`
//! and a `"dense"` file carries `"entries"`, the D×D matrix in row-major order.
//! An optional `"metadata"` object records how the file was generated.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ZERO};
use crate::state::{mix, DensityMatrix, DimVector, MixtureSpec, PureState, State, STATE_TOL};

pub const FORMAT_VERSION: &str = "1.0";

/// Default tolerance applied to norms, traces and PSD checks on load.
pub const DEFAULT_LOAD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexEntry {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexEntry> for Complex64 {
    fn from(e: ComplexEntry) -> Self {
        Complex64::new(e.re, e.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeEntry {
    pub index: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureTerm {
    pub weight: f64,
    pub amplitudes: Vec<AmplitudeEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixture,
    Dense,
}

/// On-disk representation of a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub format_version: String,
    pub dims: Vec<usize>,
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<AmplitudeEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<MixtureTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<ComplexEntry>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

fn sparse_amplitudes(dims: &DimVector, amplitudes: &[Complex64]) -> Vec<AmplitudeEntry> {
    amplitudes
        .iter()
        .enumerate()
        .filter(|(_, z)| **z != ZERO)
        .map(|(i, z)| AmplitudeEntry {
            index: dims.digits(i),
            re: z.re,
            im: z.im,
        })
        .collect()
}

impl StateFile {
    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            dims: psi.dims().as_slice().to_vec(),
            kind: StateKind::Pure,
            amplitudes: Some(sparse_amplitudes(psi.dims(), psi.amplitudes())),
            terms: None,
            entries: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn from_mixture(spec: &MixtureSpec) -> Self {
        let dims = spec.terms()[0].1.dims();
        Self {
            format_version: FORMAT_VERSION.into(),
            dims: dims.as_slice().to_vec(),
            kind: StateKind::Mixture,
            amplitudes: None,
            terms: Some(
                spec.terms()
                    .iter()
                    .map(|(w, psi)| MixtureTerm {
                        weight: *w,
                        amplitudes: sparse_amplitudes(dims, psi.amplitudes()),
                    })
                    .collect(),
            ),
            entries: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            dims: rho.dims().as_slice().to_vec(),
            kind: StateKind::Dense,
            amplitudes: None,
            terms: None,
            entries: Some(rho.matrix().as_slice().iter().map(|&z| z.into()).collect()),
            metadata: BTreeMap::new(),
        }
    }

    pub fn from_state(state: &State) -> Self {
        match state {
            State::Pure(psi) => Self::from_pure(psi),
            State::Mixed(rho) => Self::from_density(rho),
        }
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    /// Validates the payload and materializes the state.
    pub fn to_state(&self, max_dim: usize, load_tol: f64) -> Result<State> {
        if self.format_version.split('.').next() != Some("1") {
            return Err(Error::Parse(format!(
                "unsupported format_version {:?}",
                self.format_version
            )));
        }
        let dims = DimVector::with_limit(self.dims.clone(), max_dim)?;
        let field = |present: bool, name: &str| {
            if present {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "{:?} state file needs a {name:?} field",
                    self.kind
                )))
            }
        };
        match self.kind {
            StateKind::Pure => {
                field(self.amplitudes.is_some(), "amplitudes")?;
                let amps = dense_amplitudes(&dims, self.amplitudes.as_deref().unwrap_or_default())?;
                Ok(State::Pure(load_pure(dims, amps, load_tol)?))
            }
            StateKind::Mixture => {
                field(self.terms.is_some(), "terms")?;
                let terms = self.terms.as_deref().unwrap_or_default();
                let total: f64 = terms.iter().map(|t| t.weight).sum();
                if terms.is_empty() || !total.is_finite() || (total - 1.0).abs() > load_tol {
                    return Err(Error::Normalization(format!(
                        "mixture weights sum to {total}, expected 1"
                    )));
                }
                let scale = if (total - 1.0).abs() > STATE_TOL {
                    1.0 / total
                } else {
                    1.0
                };
                let parsed = terms
                    .iter()
                    .map(|t| {
                        let amps = dense_amplitudes(&dims, &t.amplitudes)?;
                        Ok((t.weight * scale, load_pure(dims.clone(), amps, load_tol)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(State::Mixed(mix(&MixtureSpec::new(parsed)?)))
            }
            StateKind::Dense => {
                field(self.entries.is_some(), "entries")?;
                let d = dims.total();
                let entries = self.entries.as_deref().unwrap_or_default();
                if entries.len() != d * d {
                    return Err(Error::DimensionMismatch(format!(
                        "dims {dims} need {} matrix entries, got {}",
                        d * d,
                        entries.len()
                    )));
                }
                let m = ComplexMatrix::new(d, d, entries.iter().map(|&e| e.into()).collect())?;
                Ok(State::Mixed(DensityMatrix::with_tolerance(dims, m, load_tol)?))
            }
        }
    }
}

fn dense_amplitudes(dims: &DimVector, entries: &[AmplitudeEntry]) -> Result<Vec<Complex64>> {
    let mut amps = vec![ZERO; dims.total()];
    let mut seen = vec![false; dims.total()];
    for e in entries {
        let idx = dims.index_of(&e.index).ok_or_else(|| {
            Error::DimensionMismatch(format!("amplitude index {:?} does not fit dims {dims}", e.index))
        })?;
        if std::mem::replace(&mut seen[idx], true) {
            return Err(Error::Parse(format!("amplitude index {:?} listed twice", e.index)));
        }
        amps[idx] = Complex64::new(e.re, e.im);
    }
    Ok(amps)
}

fn load_pure(dims: DimVector, amps: Vec<Complex64>, load_tol: f64) -> Result<PureState> {
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > load_tol {
        return Err(Error::Normalization(format!("state norm is {norm}, expected 1")));
    }
    if (norm - 1.0).abs() > STATE_TOL {
        PureState::normalized(dims, amps)
    } else {
        PureState::new(dims, amps)
    }
}

pub(crate) fn map_json_error(e: serde_json::Error) -> Error {
    use serde_json::error::Category;
    match e.classify() {
        Category::Syntax | Category::Eof => Error::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
        _ => Error::Parse(e.to_string()),
    }
}

pub fn parse_state_str(text: &str, max_dim: usize, load_tol: f64) -> Result<State> {
    let file: StateFile = serde_json::from_str(text).map_err(map_json_error)?;
    file.to_state(max_dim, load_tol)
}

/// Reads and validates a state file.
pub fn parse_state_file(path: &Path, max_dim: usize, load_tol: f64) -> Result<State> {
    let text = read_text(path)?;
    parse_state_str(&text, max_dim, load_tol)
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_state_file(path: &Path, file: &StateFile) -> Result<()> {
    fs::write(path, to_pretty_json(file)?).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// `sha256:<hex>` of the given bytes.
pub fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceReport {
    pub rtol: f64,
    pub atol: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeEntry {
    /// Traced-out particles, 1-based.
    pub traced: Vec<usize>,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub child: Vec<usize>,
    /// Empty for the full state.
    pub parent: Vec<usize>,
    pub child_rank: usize,
    pub parent_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PptEntry {
    pub part: Vec<usize>,
    pub min_eigenvalue: f64,
}

/// Machine-readable result of `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub format_version: String,
    pub input_digest: String,
    pub dims: Vec<usize>,
    pub input_kind: String,
    pub tolerance: ToleranceReport,
    pub depth: usize,
    pub state_rank: usize,
    pub lattice: Vec<LatticeEntry>,
    pub violations: Vec<ViolationReport>,
    pub verdict: crate::criteria::VerdictTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ppt: Option<Vec<PptEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestedSubset {
    pub subset: Vec<usize>,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStepReport {
    pub k: usize,
    pub remainder: Vec<usize>,
    pub tested: Vec<TestedSubset>,
    pub accepted: Vec<Vec<usize>>,
}

/// Machine-readable result of `factorize`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub format_version: String,
    pub input_digest: String,
    pub dims: Vec<usize>,
    pub tolerance: ToleranceReport,
    pub partition: Vec<Vec<usize>>,
    pub fully_entangled_parts: Vec<Vec<usize>>,
    pub residual: f64,
    pub trace_log: Vec<TraceStepReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub u: Vec<usize>,
    pub v: Vec<usize>,
    pub rank_u: usize,
    pub rank_v: usize,
    pub rank_uv: usize,
    pub verdict: crate::criteria::VerdictTag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionCheckReport {
    pub format_version: String,
    pub input_digest: String,
    pub tolerance: ToleranceReport,
    pub partition: Vec<Vec<usize>>,
    pub pairs: Vec<PairReport>,
    pub overall: crate::criteria::VerdictTag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PptReport {
    pub format_version: String,
    pub input_digest: String,
    pub part: Vec<usize>,
    pub min_eigenvalue: f64,
    pub tolerance: f64,
    /// `ENTANGLED` or `NOT_DETECTED`.
    pub verdict: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{bell, qutrit_phase_mixture_spec};

    #[test]
    fn bell_file_parses_to_two_amplitudes() {
        let text = to_pretty_json(&StateFile::from_pure(&bell())).unwrap();
        let State::Pure(psi) = parse_state_str(&text, 4096, DEFAULT_LOAD_TOL).unwrap() else {
            panic!("expected a pure state");
        };
        assert_eq!(psi.amplitudes().iter().filter(|z| **z != ZERO).count(), 2);
    }

    #[test]
    fn mixture_file_materializes() {
        let text = r#"{"format_version":"1.0","dims":[2,2],"kind":"mixture","terms":[
            {"weight":0.5,"amplitudes":[{"index":[0,0],"re":1.0,"im":0.0}]},
            {"weight":0.5,"amplitudes":[{"index":[1,1],"re":1.0,"im":0.0}]}]}"#;
        let state = parse_state_str(text, 4096, DEFAULT_LOAD_TOL).unwrap();
        assert_eq!(
            state.to_density().matrix(),
            &ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5])
        );
        let round = StateFile::from_mixture(&qutrit_phase_mixture_spec());
        assert!(parse_state_str(&to_pretty_json(&round).unwrap(), 4096, DEFAULT_LOAD_TOL).is_ok());
    }

    #[test]
    fn error_classes_are_distinct() {
        let syntax = parse_state_str("{\n  \"dims\": [2,\n", 4096, 1e-6).unwrap_err();
        assert!(matches!(syntax, Error::Syntax { line: 3, .. }), "{syntax:?}");

        let mismatch =
            r#"{"format_version":"1.0","dims":[2,2],"kind":"pure","amplitudes":[{"index":[0,2],"re":1.0,"im":0.0}]}"#;
        assert!(matches!(
            parse_state_str(mismatch, 4096, 1e-6),
            Err(Error::DimensionMismatch(_))
        ));

        let unnormalized =
            r#"{"format_version":"1.0","dims":[2],"kind":"pure","amplitudes":[{"index":[0],"re":0.9,"im":0.0}]}"#;
        assert!(matches!(
            parse_state_str(unnormalized, 4096, 1e-6),
            Err(Error::Normalization(_))
        ));

        let not_psd = r#"{"format_version":"1.0","dims":[2],"kind":"dense","entries":[
            {"re":1.5,"im":0.0},{"re":0.0,"im":0.0},{"re":0.0,"im":0.0},{"re":-0.5,"im":0.0}]}"#;
        assert!(matches!(
            parse_state_str(not_psd, 4096, 1e-6),
            Err(Error::NotPsd { .. })
        ));

        let missing = r#"{"format_version":"1.0","dims":[2],"kind":"pure"}"#;
        assert!(matches!(parse_state_str(missing, 4096, 1e-6), Err(Error::Parse(_))));

        let too_big = r#"{"format_version":"1.0","dims":[2,2,2],"kind":"pure","amplitudes":[]}"#;
        assert!(matches!(
            parse_state_str(too_big, 4, 1e-6),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn slightly_off_norm_is_renormalized() {
        let text =
            r#"{"format_version":"1.0","dims":[2],"kind":"pure","amplitudes":[{"index":[1],"re":1.0000001,"im":0.0}]}"#;
        let State::Pure(psi) = parse_state_str(text, 4096, 1e-6).unwrap() else {
            panic!("expected a pure state");
        };
        assert_eq!(psi.amplitudes()[1].re, 1.0);
    }

    #[test]
    fn digest_format() {
        assert_eq!(
            digest(b"abc"),
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
