//! Logical-error-rate models and qubit layouts for the surface code and
//! the bivariate-bicycle LDPC family.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("invalid code parameter: {0}")]
    InvalidParameter(String),
    #[error("LDPC family: {0}")]
    Family(String),
    #[error("LDPC family parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("LDPC code {label}: coefficient `{field}` must be supplied explicitly")]
    MissingCoefficient { label: String, field: &'static str },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Surface-code error model `p_L = O·(p/p_th)^{(d+1)/2}` with a distance cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceCodeParams {
    p_th: f64,
    overhead: f64,
    d_max: u32,
}

impl Default for SurfaceCodeParams {
    fn default() -> Self {
        Self {
            p_th: 0.01,
            overhead: 0.1,
            d_max: 100,
        }
    }
}

impl SurfaceCodeParams {
    pub fn new(p_th: f64, overhead: f64, d_max: u32) -> Result<Self, CodeError> {
        if !(p_th > 0.0 && p_th < 1.0) {
            return Err(CodeError::InvalidParameter(format!(
                "threshold must lie in (0, 1), got {p_th}"
            )));
        }
        if !(overhead > 0.0 && overhead <= 1.0) {
            return Err(CodeError::InvalidParameter(format!(
                "overhead must lie in (0, 1], got {overhead}"
            )));
        }
        if d_max == 0 {
            return Err(CodeError::InvalidParameter("distance cap must be at least 1".into()));
        }
        Ok(Self { p_th, overhead, d_max })
    }

    pub fn threshold(&self) -> f64 {
        self.p_th
    }

    pub fn overhead(&self) -> f64 {
        self.overhead
    }

    pub fn d_max(&self) -> u32 {
        self.d_max
    }

    /// `ln p_L`, used by feasibility checks to avoid underflow.
    pub fn ln_logical_error_rate(&self, p_phys: f64, d: u32) -> f64 {
        self.overhead.ln() + 0.5 * (d as f64 + 1.0) * (p_phys / self.p_th).ln()
    }
}

/// Surface-code logical error rate at distance `d`. Values above 1 are
/// returned unchanged.
pub fn surface_logical_error_rate(params: &SurfaceCodeParams, p_phys: f64, d: u32) -> f64 {
    params.overhead * (p_phys / params.p_th).powf(0.5 * (d as f64 + 1.0))
}

/// Physical qubits for `k` surface-code patches of distance `d`: `2(d+1)²k`.
pub fn surface_physical_qubits(d: u32, k: u64) -> u64 {
    let side = d as u64 + 1;
    2 * side * side * k
}

/// One member of an LDPC code family with its fitted error model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdpcCodeSpec {
    pub label: String,
    pub n_data: u64,
    pub k_log: u64,
    pub d_circ: u32,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl LdpcCodeSpec {
    fn validate(&self) -> Result<(), CodeError> {
        if self.n_data == 0 || self.k_log == 0 || self.k_log > self.n_data {
            return Err(CodeError::Family(format!(
                "code {}: need 1 <= k_log <= n_data (k_log = {}, n_data = {})",
                self.label, self.k_log, self.n_data
            )));
        }
        if self.d_circ == 0 {
            return Err(CodeError::Family(format!(
                "code {}: d_circ must be at least 1",
                self.label
            )));
        }
        if ![self.c0, self.c1, self.c2].iter().all(|c| c.is_finite()) {
            return Err(CodeError::Family(format!(
                "code {}: coefficients must be finite",
                self.label
            )));
        }
        Ok(())
    }
}

/// `p^{d_circ/2} · exp(c0 + c1·p + c2·p²)`.
pub fn ldpc_logical_error_rate(spec: &LdpcCodeSpec, p_phys: f64) -> f64 {
    let fit = spec.c0 + spec.c1 * p_phys + spec.c2 * p_phys * p_phys;
    (0.5 * spec.d_circ as f64 * p_phys.ln() + fit).exp()
}

/// Physical qubits for `k` logical qubits packed into whole code blocks,
/// counting one check qubit per data qubit.
pub fn ldpc_physical_qubits(spec: &LdpcCodeSpec, k: u64) -> u64 {
    2 * spec.n_data * k.div_ceil(spec.k_log)
}

/// LDPC codes ordered by block length (ties broken by label).
#[derive(Debug, Clone, PartialEq)]
pub struct LdpcFamily {
    codes: Vec<LdpcCodeSpec>,
}

#[derive(Deserialize)]
struct RawFamily {
    #[serde(default)]
    code: Vec<RawCode>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCode {
    label: String,
    n_data: u64,
    k_log: u64,
    d_circ: u32,
    c0: Option<f64>,
    c1: Option<f64>,
    c2: Option<f64>,
}

#[derive(Serialize)]
struct FamilyOut<'a> {
    code: &'a [LdpcCodeSpec],
}

impl LdpcFamily {
    pub fn new(mut codes: Vec<LdpcCodeSpec>) -> Result<Self, CodeError> {
        if codes.is_empty() {
            return Err(CodeError::Family("family must contain at least one code".into()));
        }
        for c in &codes {
            c.validate()?;
        }
        codes.sort_by(|a, b| a.n_data.cmp(&b.n_data).then_with(|| a.label.cmp(&b.label)));
        if let Some(w) = codes
            .windows(2)
            .find(|w| w[0].n_data == w[1].n_data && w[0].label == w[1].label)
        {
            return Err(CodeError::Family(format!("duplicate code {}", w[0].label)));
        }
        Ok(Self { codes })
    }

    pub fn codes(&self) -> &[LdpcCodeSpec] {
        &self.codes
    }

    /// Parses a family from TOML text (`[[code]]` tables).
    pub fn from_toml_str(text: &str) -> Result<Self, CodeError> {
        let raw: RawFamily = toml::from_str(text).map_err(|e| CodeError::Parse {
            line: e.span().map_or(0, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        let codes = raw
            .code
            .into_iter()
            .map(|c| {
                let need = |v: Option<f64>, field| {
                    v.ok_or_else(|| CodeError::MissingCoefficient {
                        label: c.label.clone(),
                        field,
                    })
                };
                Ok(LdpcCodeSpec {
                    c0: need(c.c0, "c0")?,
                    c1: need(c.c1, "c1")?,
                    c2: need(c.c2, "c2")?,
                    label: c.label,
                    n_data: c.n_data,
                    k_log: c.k_log,
                    d_circ: c.d_circ,
                })
            })
            .collect::<Result<Vec<_>, CodeError>>()?;
        Self::new(codes)
    }

    pub fn from_reader(mut source: impl Read) -> Result<Self, CodeError> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        Self::from_toml_str(&text)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CodeError> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&FamilyOut { code: &self.codes }).expect("family serializes")
    }
}

pub(crate) fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Chosen LDPC code together with the logical error rate it achieves.
#[derive(Debug, Clone, PartialEq)]
pub struct LdpcSelection<'a> {
    pub code: &'a LdpcCodeSpec,
    pub n_phys: u64,
    pub p_phys: f64,
    pub p_logical: f64,
}

/// Picks the smallest family member whose logical error rate meets
/// `target`, with the physical rate evaluated at that code's total qubit
/// count for `k` logical qubits. `rate_at` returns `None` when the device
/// cannot operate at the given size.
pub fn select_ldpc_code<'a, F>(family: &'a LdpcFamily, target: f64, k: u64, mut rate_at: F) -> Option<LdpcSelection<'a>>
where
    F: FnMut(u64) -> Option<f64>,
{
    family.codes.iter().find_map(|code| {
        let n_phys = ldpc_physical_qubits(code, k);
        let p_phys = rate_at(n_phys)?;
        let p_logical = ldpc_logical_error_rate(code, p_phys);
        (p_logical <= target).then_some(LdpcSelection {
            code,
            n_phys,
            p_phys,
            p_logical,
        })
    })
}
