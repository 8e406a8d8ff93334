use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A metric value that may be legitimately infinite (unfloored cross
/// entropy with vanishing hypothesis mass). JSON cannot carry IEEE
/// infinities as numbers, so non-finite values serialize as the strings
/// `"Infinity"`, `"-Infinity"`, `"NaN"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValue(pub f64);

impl Serialize for MetricValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            serializer.serialize_f64(self.0)
        } else if self.0.is_nan() {
            serializer.serialize_str("NaN")
        } else if self.0 > 0.0 {
            serializer.serialize_str("Infinity")
        } else {
            serializer.serialize_str("-Infinity")
        }
    }
}

impl<'de> Deserialize<'de> for MetricValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        match value {
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(MetricValue)
                .ok_or_else(|| D::Error::custom("metric value out of f64 range")),
            serde_json::Value::String(s) => match s.as_str() {
                "Infinity" => Ok(MetricValue(f64::INFINITY)),
                "-Infinity" => Ok(MetricValue(f64::NEG_INFINITY)),
                "NaN" => Ok(MetricValue(f64::NAN)),
                other => Err(D::Error::custom(format!(
                    "expected a number or Infinity/-Infinity/NaN, got `{other}`"
                ))),
            },
            other => Err(D::Error::custom(format!(
                "expected a metric value, got {other}"
            ))),
        }
    }
}

impl From<f64> for MetricValue {
    fn from(v: f64) -> Self {
        MetricValue(v)
    }
}

/// The configuration a report was produced under, echoed for
/// reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub distance: String,
    /// Logarithm base for entropies; always natural log here.
    pub log_base: String,
    pub floor: Option<f64>,
    pub mc_pairs: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialBreakdown {
    pub trial_id: String,
    pub metrics: BTreeMap<String, MetricValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Aggregate metric values plus the per-trial breakdown they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub trial_count: usize,
    pub failed_trials: usize,
    pub config: ConfigEcho,
    pub metrics: BTreeMap<String, MetricValue>,
    pub per_trial: Vec<TrialBreakdown>,
}

impl MetricReport {
    /// Aggregate value by metric name, when present and finite or not.
    pub fn value(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).map(|v| v.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_round_trips_as_string() {
        let v = MetricValue(f64::INFINITY);
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(text, "\"Infinity\"");
        let back: MetricValue = serde_json::from_str(&text).unwrap();
        assert!(back.0.is_infinite() && back.0 > 0.0);
        let finite: MetricValue = serde_json::from_str("1.25").unwrap();
        assert_eq!(finite.0, 1.25);
    }
}
