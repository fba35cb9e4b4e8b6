//! The assembled dissipation / precision trade-off for one configuration.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Outcome of comparing a trade-off product with its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    Violated,
    /// Nothing was encoded (zero displacement); the bound is vacuous.
    NoProcess,
    /// Real and ideal encodings coincide; the chain degenerates.
    Ideal,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Satisfied => "true",
            Verdict::Violated => "false",
            Verdict::NoProcess => "no-process",
            Verdict::Ideal => "ideal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "true" => Some(Verdict::Satisfied),
            "false" => Some(Verdict::Violated),
            "no-process" => Some(Verdict::NoProcess),
            "ideal" => Some(Verdict::Ideal),
            _ => None,
        }
    }

    /// Whether the row counts as a failed check.
    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::Violated)
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Verdict::Satisfied => serializer.serialize_bool(true),
            Verdict::Violated => serializer.serialize_bool(false),
            other => serializer.serialize_str(other.as_str()),
        }
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Bool(bool),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Bool(true) => Ok(Verdict::Satisfied),
            Raw::Bool(false) => Ok(Verdict::Violated),
            Raw::Text(s) => Verdict::parse(&s)
                .ok_or_else(|| serde::de::Error::custom(format!("unknown verdict {s:?}"))),
        }
    }
}

/// Serde adapter for floats: finite values as numbers, infinities as the
/// strings `"inf"` / `"-inf"`, NaN rejected.
pub mod finite_or_inf {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
        if value.is_nan() {
            return Err(serde::ser::Error::custom("refusing to serialise NaN"));
        }
        if value.is_infinite() {
            return serializer.serialize_str(if *value > 0.0 { "inf" } else { "-inf" });
        }
        serializer.serialize_f64(*value)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(x) => Ok(x),
            Raw::Text(s) if s == "inf" => Ok(f64::INFINITY),
            Raw::Text(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
            Raw::Text(s) => Err(de::Error::custom(format!("expected a number, got {s:?}"))),
        }
    }
}

/// A configuration value echoed into a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputValue {
    Integer(i64),
    #[serde(with = "finite_or_inf")]
    Number(f64),
    Text(String),
}

impl From<f64> for InputValue {
    fn from(x: f64) -> Self {
        InputValue::Number(x)
    }
}

impl From<u64> for InputValue {
    fn from(x: u64) -> Self {
        InputValue::Integer(x as i64)
    }
}

impl From<usize> for InputValue {
    fn from(x: usize) -> Self {
        InputValue::Integer(x as i64)
    }
}

impl From<&str> for InputValue {
    fn from(s: &str) -> Self {
        InputValue::Text(s.to_owned())
    }
}

impl From<String> for InputValue {
    fn from(s: String) -> Self {
        InputValue::Text(s)
    }
}

/// `Δ$ = ⟨W_D⟩/T`, `ΔI_φ = (Δφ/δ_φ)²` and their product against `k_B/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffReport {
    pub model: String,
    #[serde(with = "finite_or_inf")]
    pub delta_dollar: f64,
    #[serde(with = "finite_or_inf")]
    pub delta_info: f64,
    #[serde(with = "finite_or_inf")]
    pub product: f64,
    #[serde(with = "finite_or_inf")]
    pub bound: f64,
    /// `(⟨W_D⟩/⟨E₀⟩) (Δφ/δ_φ)²` with `⟨E₀⟩ = k_B T / 2`.
    #[serde(with = "finite_or_inf")]
    pub dimensionless_value: f64,
    /// Relative slack allowed below the bound before a violation is declared.
    #[serde(with = "finite_or_inf")]
    pub tolerance: f64,
    pub satisfied: Verdict,
    pub inputs: BTreeMap<String, InputValue>,
}

impl TradeoffReport {
    /// Assembles a report from `Δ$` and `ΔI_φ`.
    pub fn new(
        model: impl Into<String>,
        delta_dollar: f64,
        delta_info: f64,
        kb: f64,
        tolerance: f64,
        inputs: BTreeMap<String, InputValue>,
    ) -> Self {
        let bound = 0.5 * kb;
        let product = delta_dollar * delta_info;
        let satisfied = if product >= bound * (1.0 - tolerance) {
            Verdict::Satisfied
        } else {
            Verdict::Violated
        };
        Self {
            model: model.into(),
            delta_dollar,
            delta_info,
            product,
            bound,
            dimensionless_value: 2.0 * product / kb,
            tolerance,
            satisfied,
            inputs,
        }
    }

    /// Report for a configuration where the product is undefined
    /// ([`Verdict::NoProcess`] or [`Verdict::Ideal`]); numbers are zeroed.
    pub fn degenerate(
        model: impl Into<String>,
        verdict: Verdict,
        kb: f64,
        inputs: BTreeMap<String, InputValue>,
    ) -> Self {
        Self {
            model: model.into(),
            delta_dollar: 0.0,
            delta_info: 0.0,
            product: 0.0,
            bound: 0.5 * kb,
            dimensionless_value: 0.0,
            tolerance: 0.0,
            satisfied: verdict,
            inputs,
        }
    }

    pub fn product_over_kb(&self) -> f64 {
        self.product / (2.0 * self.bound)
    }
}
