//! JSON interchange formats.
//!
//! A state file looks like
//!
//! ```json
//! {"dims":[3,4,5],"amplitudes":[{"index":[0,0,0],"re":0.447,"im":0.0,
//!   "exact":{"radicand":"1/5","phase":"0"}}]}
//! ```
//!
//! with amplitudes listed in lexicographic index order and the optional
//! `exact` annotation meaning `sqrt(radicand) * exp(2*pi*i*phase)`.
//!
//! A magic solution array file looks like
//!
//! ```json
//! {"l":3,"m":4,"n":5,"y":[["3/10","3/5","1/10","0"], ...]}
//! ```
//!
//! with entries as rational strings. Emitted rationals are always reduced;
//! parsers accept unreduced input. [`to_canonical_json`] renders any
//! serializable value with sorted object keys, which fixes the output bytes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, ExactForm};
use crate::msa::MagicSolutionArray;
use crate::shape::SystemShape;
use crate::state::{Amplitude, PureState};

/// Serialized exact annotation of one amplitude.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactDto {
    pub radicand: String,
    pub phase: String,
}

/// Serialized amplitude.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmplitudeDto {
    pub index: Vec<usize>,
    pub re: f64,
    pub im: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactDto>,
}

/// Serialized sparse state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateDto {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<AmplitudeDto>,
}

impl StateDto {
    pub fn from_state(state: &PureState) -> Self {
        let amplitudes = state
            .terms()
            .map(|(index, amp)| AmplitudeDto {
                index: index.clone(),
                re: amp.value().re,
                im: amp.value().im,
                exact: amp.exact_form().map(|f| ExactDto {
                    radicand: format_rational(f.radicand()),
                    phase: format_rational(f.phase()),
                }),
            })
            .collect();
        StateDto {
            dims: state.shape().dims().to_vec(),
            amplitudes,
        }
    }

    /// Rebuilds the state. Input amplitude order is not required to be
    /// canonical; the result is always stored canonically. Normalization is
    /// not enforced here, so unnormalized coefficient tables round-trip.
    pub fn into_state(self) -> Result<PureState> {
        let shape = SystemShape::new(self.dims)?;
        let mut terms = Vec::with_capacity(self.amplitudes.len());
        for a in self.amplitudes {
            let value = Complex64::new(a.re, a.im);
            let amp = match a.exact {
                Some(e) => {
                    let radicand = parse_rational(&e.radicand)?;
                    let phase = parse_rational(&e.phase)?;
                    let form = ExactForm::new(radicand, phase)?;
                    Amplitude::annotated(value, form).map_err(|_| Error::ExactMismatch {
                        index: a.index.clone(),
                        re: a.re,
                        im: a.im,
                    })?
                }
                None => Amplitude::numeric(value),
            };
            terms.push((a.index, amp));
        }
        PureState::new_unnormalized(shape, terms)
    }
}

/// Serialized magic solution array.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MsaDto {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub y: Vec<Vec<String>>,
}

impl MsaDto {
    pub fn from_array(arr: &MagicSolutionArray) -> Self {
        MsaDto {
            l: arr.l(),
            m: arr.m(),
            n: arr.n(),
            y: arr
                .rows()
                .map(|row| row.iter().map(format_rational).collect())
                .collect(),
        }
    }

    pub fn into_array(self) -> Result<MagicSolutionArray> {
        let mut rows = Vec::with_capacity(self.y.len());
        for row in &self.y {
            let mut parsed = Vec::with_capacity(row.len());
            for s in row {
                parsed.push(parse_rational(s)?);
            }
            rows.push(parsed);
        }
        MagicSolutionArray::new(self.l, self.m, self.n, rows)
    }
}

/// Serialized infeasibility certificate for a solvable-array query.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InfeasibleDto {
    pub infeasible: bool,
    pub farkas: Vec<String>,
}

/// Renders any serializable value as JSON with sorted object keys.
///
/// Going through `serde_json::Value` sorts keys (its map is a BTreeMap), so
/// equal inputs always produce byte-identical output.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)
        .map_err(|e| Error::Internal(format!("serialization failed: {e}")))?;
    serde_json::to_string(&v).map_err(|e| Error::Internal(format!("serialization failed: {e}")))
}

/// Parses a state from its JSON form.
pub fn state_from_json(json: &str) -> Result<PureState> {
    let dto: StateDto =
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("invalid state JSON: {e}")))?;
    dto.into_state()
}

/// Renders a state to canonical JSON.
pub fn state_to_json(state: &PureState) -> Result<String> {
    to_canonical_json(&StateDto::from_state(state))
}

/// Parses a magic solution array from its JSON form.
pub fn msa_from_json(json: &str) -> Result<MagicSolutionArray> {
    let dto: MsaDto =
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("invalid array JSON: {e}")))?;
    dto.into_array()
}

/// Renders a magic solution array to canonical JSON.
pub fn msa_to_json(arr: &MagicSolutionArray) -> Result<String> {
    to_canonical_json(&MsaDto::from_array(arr))
}
