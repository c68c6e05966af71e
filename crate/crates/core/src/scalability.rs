//! Finite-scalability error laws and baseline circuit-success bounds.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalabilityError {
    #[error("physical error rate saturated: p_phys = {rate} >= 1 at n = {n}")]
    RateSaturated { rate: f64, n: u64 },
    #[error("physical error rate {p_phys} is not below threshold {p_th}")]
    AboveThreshold { p_phys: f64, p_th: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Functional form of the size dependence, without its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Infinite,
    PowerLaw,
    Logarithmic,
}

impl ModelKind {
    /// Builds a model of this kind with scalability `s` (ignored for `Infinite`).
    pub fn with_scalability(self, s: f64) -> Result<ScalabilityModel, ScalabilityError> {
        match self {
            ModelKind::Infinite => Ok(ScalabilityModel::Infinite),
            ModelKind::PowerLaw => ScalabilityModel::power_law(s),
            ModelKind::Logarithmic => ScalabilityModel::logarithmic(s),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Infinite => "infinite",
            ModelKind::PowerLaw => "power",
            ModelKind::Logarithmic => "log",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the physical error rate of a device grows with its qubit count `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalabilityModel {
    /// Size-independent errors: `p = p0`.
    Infinite,
    /// `p = p0 · n^{1/s}`.
    PowerLaw { s: f64 },
    /// `p = p0 · (1 + ln(n)/s)`.
    Logarithmic { s: f64 },
}

fn check_s(s: f64) -> Result<f64, ScalabilityError> {
    if s > 0.0 && !s.is_nan() {
        Ok(s)
    } else {
        Err(ScalabilityError::InvalidParameter(format!(
            "scalability must be positive, got {s}"
        )))
    }
}

impl ScalabilityModel {
    pub fn power_law(s: f64) -> Result<Self, ScalabilityError> {
        check_s(s).map(|s| ScalabilityModel::PowerLaw { s })
    }

    pub fn logarithmic(s: f64) -> Result<Self, ScalabilityError> {
        check_s(s).map(|s| ScalabilityModel::Logarithmic { s })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ScalabilityModel::Infinite => ModelKind::Infinite,
            ScalabilityModel::PowerLaw { .. } => ModelKind::PowerLaw,
            ScalabilityModel::Logarithmic { .. } => ModelKind::Logarithmic,
        }
    }

    /// Scalability parameter; `None` for the infinite model.
    pub fn scalability(&self) -> Option<f64> {
        match *self {
            ScalabilityModel::Infinite => None,
            ScalabilityModel::PowerLaw { s } | ScalabilityModel::Logarithmic { s } => Some(s),
        }
    }

    /// Multiplicative growth `p(n)/p0` of the error rate at size `n`.
    pub fn growth_factor(&self, n: u64) -> f64 {
        let ln_n = (n as f64).ln();
        match *self {
            ScalabilityModel::Infinite => 1.0,
            ScalabilityModel::PowerLaw { s } => (ln_n / s).exp(),
            ScalabilityModel::Logarithmic { s } => 1.0 + ln_n / s,
        }
    }
}

impl fmt::Display for ScalabilityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.scalability() {
            None => write!(f, "{}", self.kind()),
            Some(s) => write!(f, "{}(s={})", self.kind(), s),
        }
    }
}

/// A device class: base single-qubit error rate and gate time.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareArchetype {
    pub name: String,
    p0: f64,
    gate_time: f64,
}

impl HardwareArchetype {
    pub fn new(name: impl Into<String>, p0: f64, gate_time: f64) -> Result<Self, ScalabilityError> {
        if !(p0 > 0.0 && p0 < 1.0) {
            return Err(ScalabilityError::InvalidParameter(format!(
                "base error rate must lie in (0, 1), got {p0}"
            )));
        }
        if !(gate_time > 0.0 && gate_time.is_finite()) {
            return Err(ScalabilityError::InvalidParameter(format!(
                "gate time must be positive, got {gate_time}"
            )));
        }
        Ok(Self {
            name: name.into(),
            p0,
            gate_time,
        })
    }

    /// High-fidelity, slow device: `p0 = 1e-4`, `t = 1e-4 s`.
    pub fn type_a() -> Self {
        Self {
            name: "A".into(),
            p0: 1e-4,
            gate_time: 1e-4,
        }
    }

    /// Fast, lower-fidelity device: `p0 = 1e-3`, `t = 1e-7 s`.
    pub fn type_b() -> Self {
        Self {
            name: "B".into(),
            p0: 1e-3,
            gate_time: 1e-7,
        }
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn gate_time(&self) -> f64 {
        self.gate_time
    }

    pub fn error_rate(&self, model: &ScalabilityModel, n: u64) -> Result<f64, ScalabilityError> {
        physical_error_rate(model, self.p0, n)
    }
}

/// Physical error rate of an `n`-qubit device with base rate `p0`.
///
/// Fails with [`ScalabilityError::RateSaturated`] when the law yields a
/// rate of 1 or more.
pub fn physical_error_rate(model: &ScalabilityModel, p0: f64, n: u64) -> Result<f64, ScalabilityError> {
    if n == 0 {
        return Err(ScalabilityError::InvalidParameter(
            "qubit count must be at least 1".into(),
        ));
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(ScalabilityError::InvalidParameter(format!(
            "base error rate must lie in (0, 1), got {p0}"
        )));
    }
    let rate = p0 * model.growth_factor(n);
    if rate >= 1.0 || rate.is_nan() {
        return Err(ScalabilityError::RateSaturated { rate, n });
    }
    Ok(rate)
}

/// Failure probability of an unprotected `m`-gate circuit: the exact value
/// `1 - (1-p)^m` and its union bound `min(1, m·p)`.
pub fn circuit_success_bound(p_phys: f64, m: u64) -> (f64, f64) {
    let m_f = m as f64;
    // -expm1(m·ln(1-p)) keeps precision for small m·p
    let exact = -(m_f * (-p_phys).ln_1p()).exp_m1();
    let union = (m_f * p_phys).min(1.0);
    (exact, union)
}

/// Relative circuit-depth budget `(p_th/p)^{sqrt(n/(8k))}` gained by encoding
/// `k` logical qubits into `n` physical ones. The proportionality constant
/// is 1, so only ratios of this factor are meaningful.
pub fn depth_tradeoff_factor(p_phys: f64, p_th: f64, n: u64, k: u64) -> Result<f64, ScalabilityError> {
    if !(p_phys > 0.0) || !(p_th > 0.0 && p_th < 1.0) {
        return Err(ScalabilityError::InvalidParameter(format!(
            "rates must be positive probabilities (p_phys = {p_phys}, p_th = {p_th})"
        )));
    }
    if p_phys >= p_th {
        return Err(ScalabilityError::AboveThreshold { p_phys, p_th });
    }
    if k == 0 || n < 8 * k {
        return Err(ScalabilityError::InvalidParameter(format!(
            "need n >= 8k, got n = {n}, k = {k}"
        )));
    }
    let exponent = (n as f64 / (8.0 * k as f64)).sqrt();
    Ok((exponent * (p_th / p_phys).ln()).exp())
}
