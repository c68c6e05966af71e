//! Problem-instance catalog: chemistry metadata plus the logical workload
//! (`k`, `V`) of each instance, stored as TOML `[[instance]]` tables.

use std::collections::HashSet;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::line_of;
use crate::estimator::ProblemResources;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("record {record}: {rule}")]
    Validation { record: String, rule: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MrType {
    #[serde(rename = "SR")]
    SingleReference,
    #[serde(rename = "SR/MR")]
    Intermediate,
    #[serde(rename = "MR")]
    MultiReference,
}

/// A spin quantum number, an exact multiple of 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub fn from_halves(twice: u32) -> Self {
        Self { twice }
    }

    pub fn halves(&self) -> u32 {
        self.twice
    }

    pub fn value(&self) -> f64 {
        self.twice as f64 / 2.0
    }
}

impl FromStr for Spin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("spin `{s}` is not a non-negative multiple of 1/2");
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let num: u32 = num.parse().map_err(|_| bad())?;
        let den: u32 = den.parse().map_err(|_| bad())?;
        if den == 0 || !(2 * num).is_multiple_of(den) {
            return Err(bad());
        }
        Ok(Self { twice: 2 * num / den })
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl Serialize for Spin {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceRecord {
    pub instance_id: String,
    pub mr_type: MrType,
    pub charge_initial: i32,
    pub charge_oxidized: i32,
    pub spin_initial: Spin,
    pub spin_oxidized: Spin,
    pub n_electrons_initial: u32,
    pub n_electrons_oxidized: u32,
    pub n_orbitals: u32,
    pub k: u64,
    #[serde(rename = "V")]
    pub volume: f64,
}

impl InstanceRecord {
    pub fn validate(&self) -> Result<(), CatalogError> {
        let fail = |rule: String| {
            Err(CatalogError::Validation {
                record: self.instance_id.clone(),
                rule,
            })
        };
        if self.instance_id.trim().is_empty() {
            return fail("instance_id must not be empty".into());
        }
        if self.n_electrons_oxidized + 1 != self.n_electrons_initial {
            return fail(format!(
                "oxidation removes one electron: n_electrons_oxidized = {} but n_electrons_initial = {}",
                self.n_electrons_oxidized, self.n_electrons_initial
            ));
        }
        if self.n_orbitals == 0 {
            return fail("n_orbitals must be at least 1".into());
        }
        if self.k == 0 {
            return fail("k must be at least 1".into());
        }
        if !(self.volume.is_finite() && self.volume >= self.k as f64) {
            return fail(format!(
                "V must be finite and at least k (V = {}, k = {})",
                self.volume, self.k
            ));
        }
        Ok(())
    }

    pub fn resources(&self) -> ProblemResources {
        ProblemResources::new(self.k, self.volume).expect("validated record")
    }
}

#[derive(Deserialize)]
struct RawCatalog {
    #[serde(default)]
    instance: Vec<InstanceRecord>,
}

#[derive(Serialize)]
struct CatalogOut<'a> {
    instance: &'a [InstanceRecord],
}

fn parse(text: &str) -> Result<Vec<InstanceRecord>, CatalogError> {
    toml::from_str::<RawCatalog>(text)
        .map(|c| c.instance)
        .map_err(|e| CatalogError::Parse {
            line: e.span().map_or(0, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })
}

/// Reads and validates a catalog; duplicate ids are rejected.
pub fn load_catalog(mut source: impl Read) -> Result<Vec<InstanceRecord>, CatalogError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let records = parse(&text)?;
    let mut seen = HashSet::new();
    for r in &records {
        r.validate()?;
        if !seen.insert(r.instance_id.as_str()) {
            return Err(CatalogError::Validation {
                record: r.instance_id.clone(),
                rule: "duplicate instance_id".into(),
            });
        }
    }
    Ok(records)
}

/// `(instance_id, verdict)` for each record, in file order.
pub type CatalogReport = Vec<(String, Result<(), CatalogError>)>;

/// Per-record verdicts, for reporting. Only a syntax error fails outright.
pub fn validate_catalog(mut source: impl Read) -> Result<CatalogReport, CatalogError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let records = parse(&text)?;
    let mut seen = HashSet::new();
    Ok(records
        .iter()
        .map(|r| {
            let verdict = r.validate().and_then(|()| {
                if seen.insert(r.instance_id.clone()) {
                    Ok(())
                } else {
                    Err(CatalogError::Validation {
                        record: r.instance_id.clone(),
                        rule: "duplicate instance_id".into(),
                    })
                }
            });
            (r.instance_id.clone(), verdict)
        })
        .collect())
}

pub fn catalog_to_toml(records: &[InstanceRecord]) -> String {
    toml::to_string(&CatalogOut { instance: records }).expect("catalog serializes")
}

/// Instance 14 in its initial charge state, the largest workload.
pub fn canonical_instance() -> InstanceRecord {
    InstanceRecord {
        instance_id: "14_in".into(),
        mr_type: MrType::Intermediate,
        charge_initial: 0,
        charge_oxidized: 1,
        spin_initial: Spin::from_halves(2),
        spin_oxidized: Spin::from_halves(1),
        n_electrons_initial: 30,
        n_electrons_oxidized: 29,
        n_orbitals: 43,
        k: 1000,
        volume: 1e10,
    }
}
