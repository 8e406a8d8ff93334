use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probability mass balance tolerance.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// A probability distribution over named regions, with the mass falling
/// outside every region kept explicit rather than silently renormalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDiscrete")]
pub struct DiscreteDistribution {
    entries: BTreeMap<String, f64>,
    outside_mass: f64,
}

#[derive(Deserialize)]
struct RawDiscrete {
    entries: BTreeMap<String, f64>,
    #[serde(default)]
    outside_mass: f64,
}

impl TryFrom<RawDiscrete> for DiscreteDistribution {
    type Error = Error;
    fn try_from(raw: RawDiscrete) -> Result<Self> {
        DiscreteDistribution::new(raw.entries, raw.outside_mass)
    }
}

impl DiscreteDistribution {
    pub fn new(entries: BTreeMap<String, f64>, outside_mass: f64) -> Result<Self> {
        for (id, p) in &entries {
            if !(p.is_finite() && *p >= 0.0) {
                return Err(Error::Schema(format!(
                    "probability for region `{id}` must be finite and ≥ 0, got {p}"
                )));
            }
        }
        if !(outside_mass.is_finite() && outside_mass >= 0.0) {
            return Err(Error::Schema(format!(
                "outside mass must be finite and ≥ 0, got {outside_mass}"
            )));
        }
        let total = entries.values().sum::<f64>() + outside_mass;
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Schema(format!(
                "probabilities plus outside mass must sum to 1 (±{MASS_TOLERANCE}), got {total}"
            )));
        }
        Ok(DiscreteDistribution {
            entries,
            outside_mass,
        })
    }

    /// One-hot distribution on a single region.
    pub fn one_hot(region_id: impl Into<String>) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(region_id.into(), 1.0);
        DiscreteDistribution {
            entries,
            outside_mass: 0.0,
        }
    }

    /// Uniform distribution over the given region ids.
    pub fn uniform<I, S>(ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        if ids.is_empty() {
            return Err(Error::Schema("uniform distribution over no regions".into()));
        }
        let p = 1.0 / ids.len() as f64;
        Ok(DiscreteDistribution {
            entries: ids.into_iter().map(|id| (id, p)).collect(),
            outside_mass: 0.0,
        })
    }

    pub(crate) fn from_parts_unchecked(
        entries: BTreeMap<String, f64>,
        outside_mass: f64,
    ) -> Self {
        let d = DiscreteDistribution {
            entries,
            outside_mass,
        };
        debug_assert!(
            (d.entries.values().sum::<f64>() + d.outside_mass - 1.0).abs() <= 1e-6,
            "unchecked discrete distribution out of balance"
        );
        d
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(id, p)| (id.as_str(), *p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn region_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Probability of a region, 0 when absent.
    pub fn prob(&self, region_id: &str) -> f64 {
        self.entries.get(region_id).copied().unwrap_or(0.0)
    }

    pub fn outside_mass(&self) -> f64 {
        self.outside_mass
    }

    /// Shannon entropy in nats, over regions plus the outside class,
    /// with 0·ln 0 = 0.
    pub fn entropy(&self) -> f64 {
        let term = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
        self.entries.values().map(|&p| term(p)).sum::<f64>() + term(self.outside_mass)
    }

    /// The most probable region; ties resolve to the lexicographically
    /// smallest id. Outside mass is not a candidate.
    pub fn argmax(&self) -> Result<&str> {
        let mut best: Option<(&str, f64)> = None;
        for (id, p) in self.entries() {
            match best {
                Some((_, bp)) if p <= bp => {}
                _ => best = Some((id, p)),
            }
        }
        best.map(|(id, _)| id)
            .ok_or_else(|| Error::Schema("distribution has no regions".into()))
    }

    /// Fold the outside mass proportionally into the regions.
    pub fn renormalized_inside(&self) -> Result<Self> {
        let inside: f64 = self.entries.values().sum();
        if inside <= 0.0 {
            return Err(Error::DegenerateDensity(
                "all probability mass lies outside the tessellation".into(),
            ));
        }
        Ok(DiscreteDistribution {
            entries: self
                .entries
                .iter()
                .map(|(id, p)| (id.clone(), p / inside))
                .collect(),
            outside_mass: 0.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_balance() {
        let mut entries = BTreeMap::new();
        entries.insert("A".to_string(), 0.6);
        entries.insert("B".to_string(), 0.3);
        assert!(DiscreteDistribution::new(entries.clone(), 0.1).is_ok());
        assert!(DiscreteDistribution::new(entries, 0.2).is_err());
    }

    #[test]
    fn argmax_tiebreak() {
        let d = DiscreteDistribution::uniform(["B", "A"]).unwrap();
        assert_eq!(d.argmax().unwrap(), "A");
    }

    #[test]
    fn entropy_uniform_and_onehot() {
        let u = DiscreteDistribution::uniform(["A", "B", "C", "D"]).unwrap();
        assert!((u.entropy() - 4.0f64.ln()).abs() < 1e-12);
        assert_eq!(DiscreteDistribution::one_hot("A").entropy(), 0.0);
    }

    #[test]
    fn renormalize_folds_outside() {
        let mut entries = BTreeMap::new();
        entries.insert("A".to_string(), 0.3);
        entries.insert("B".to_string(), 0.1);
        let d = DiscreteDistribution::new(entries, 0.6).unwrap();
        let r = d.renormalized_inside().unwrap();
        assert!((r.prob("A") - 0.75).abs() < 1e-12);
        assert!((r.prob("B") - 0.25).abs() < 1e-12);
        assert_eq!(r.outside_mass(), 0.0);
    }
}
