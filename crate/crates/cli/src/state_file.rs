//! JSON state files: `kind`, a `payload` of `[re, im]` pairs, and free-form
//! string `metadata`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use slocc::algebra::{CMatrix, DensityMatrix2Q, Filter2, Ket8, Mat2, Mat4, ThreeQubitPure};
use slocc::C64;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Density2q,
    Pure3q,
    FilterTriple,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub kind: StateKind,
    pub payload: Value,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

/// A validated state file.
#[derive(Debug, Clone)]
pub enum State {
    Density(DensityMatrix2Q),
    Pure3(ThreeQubitPure),
    Filters([Filter2; 3]),
}

pub fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}

/// Row-major array of rows of `[re, im]` pairs.
pub fn matrix_json<const R: usize, const C: usize>(m: &CMatrix<R, C>) -> Value {
    Value::Array((0..R).map(|i| Value::Array((0..C).map(|j| complex_json(m[(i, j)])).collect())).collect())
}

fn parse_complex(v: &Value, at: &str) -> Result<C64, CliError> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => Err(CliError::Validation(format!("{at}: entries must be numbers"))),
        },
        _ => Err(CliError::Validation(format!("{at}: expected a [re, im] pair"))),
    }
}

fn parse_vector(v: &Value, len: usize, at: &str) -> Result<Vec<C64>, CliError> {
    let items = v.as_array().ok_or_else(|| CliError::Validation(format!("{at}: expected an array")))?;
    if items.len() != len {
        return Err(CliError::Validation(format!("{at}: expected {len} entries, found {}", items.len())));
    }
    items.iter().enumerate().map(|(i, z)| parse_complex(z, &format!("{at}[{i}]"))).collect()
}

fn parse_square<const N: usize>(v: &Value, at: &str) -> Result<CMatrix<N, N>, CliError> {
    let rows = v.as_array().ok_or_else(|| CliError::Validation(format!("{at}: expected an array of rows")))?;
    if rows.len() != N {
        return Err(CliError::Validation(format!("{at}: expected {N} rows, found {}", rows.len())));
    }
    let mut m = CMatrix::<N, N>::zeros();
    for (i, row) in rows.iter().enumerate() {
        for (j, z) in parse_vector(row, N, &format!("{at}[{i}]"))?.into_iter().enumerate() {
            m[(i, j)] = z;
        }
    }
    Ok(m)
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("malformed state file: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("state files serialize");
        s.push('\n');
        s
    }

    /// Checks dimensions and the domain invariants of the payload.
    pub fn validate(&self) -> Result<State, CliError> {
        match self.kind {
            StateKind::Density2q => {
                let m: Mat4 = parse_square::<4>(&self.payload, "payload")?;
                Ok(State::Density(DensityMatrix2Q::new(m)?))
            }
            StateKind::Pure3q => {
                let v = parse_vector(&self.payload, 8, "payload")?;
                Ok(State::Pure3(ThreeQubitPure::new(Ket8::from_iterator(v))?))
            }
            StateKind::FilterTriple => {
                let items = self
                    .payload
                    .as_array()
                    .filter(|a| a.len() == 3)
                    .ok_or_else(|| CliError::Validation("payload: expected three 2×2 matrices".into()))?;
                let mut out = Vec::with_capacity(3);
                for (k, item) in items.iter().enumerate() {
                    let m: Mat2 = parse_square::<2>(item, &format!("payload[{k}]"))?;
                    out.push(Filter2::unit(m)?);
                }
                let [a, b, c]: [Filter2; 3] = out.try_into().expect("three filters");
                Ok(State::Filters([a, b, c]))
            }
        }
    }

    pub fn density(&self) -> Result<DensityMatrix2Q, CliError> {
        match self.validate()? {
            State::Density(rho) => Ok(rho),
            _ => Err(CliError::Validation(format!("expected a density2q file, found {:?}", self.kind))),
        }
    }

    pub fn pure3(&self) -> Result<ThreeQubitPure, CliError> {
        match self.validate()? {
            State::Pure3(psi) => Ok(psi),
            _ => Err(CliError::Validation(format!("expected a pure3q file, found {:?}", self.kind))),
        }
    }

    pub fn from_density(rho: &DensityMatrix2Q, metadata: BTreeMap<String, String>) -> Self {
        Self { kind: StateKind::Density2q, payload: matrix_json(rho.matrix()), metadata }
    }

    pub fn from_pure3(psi: &ThreeQubitPure, metadata: BTreeMap<String, String>) -> Self {
        Self {
            kind: StateKind::Pure3q,
            payload: Value::Array(psi.amplitudes().iter().map(|z| complex_json(*z)).collect()),
            metadata,
        }
    }

    pub fn from_filters(m: &[Mat2; 3], metadata: BTreeMap<String, String>) -> Self {
        Self { kind: StateKind::FilterTriple, payload: Value::Array(m.iter().map(matrix_json).collect()), metadata }
    }
}
