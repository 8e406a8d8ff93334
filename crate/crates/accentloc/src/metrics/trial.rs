use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::density::{DiscreteDistribution, SpatialDensity};
use crate::error::{Error, Result};
use crate::geom::Location;

/// One side of a trial: a point estimate, a distribution over regions,
/// or a full spatial density.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialElement {
    Point(Location),
    Discrete(DiscreteDistribution),
    Density(SpatialDensity),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialFamily {
    Point,
    Discrete,
    Density,
}

impl fmt::Display for TrialFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TrialFamily::Point => "point",
            TrialFamily::Discrete => "discrete",
            TrialFamily::Density => "density",
        };
        f.write_str(s)
    }
}

impl TrialElement {
    pub fn family(&self) -> TrialFamily {
        match self {
            TrialElement::Point(_) => TrialFamily::Point,
            TrialElement::Discrete(_) => TrialFamily::Discrete,
            TrialElement::Density(_) => TrialFamily::Density,
        }
    }
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    #[serde(rename = "type")]
    kind: &'static str,
    #[serde(flatten)]
    inner: &'a T,
}

impl Serialize for TrialElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TrialElement::Point(loc) => Tagged {
                kind: "point",
                inner: loc,
            }
            .serialize(serializer),
            TrialElement::Discrete(d) => Tagged {
                kind: "discrete",
                inner: d,
            }
            .serialize(serializer),
            // densities already carry their own type tag (delta/grid/gmm)
            TrialElement::Density(d) => d.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for TrialElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        let kind = value
            .get("type")
            .and_then(|v| v.as_str())
            .ok_or_else(|| D::Error::missing_field("type"))?
            .to_owned();
        match kind.as_str() {
            "point" => serde_json::from_value::<Location>(value)
                .map(TrialElement::Point)
                .map_err(D::Error::custom),
            "discrete" => serde_json::from_value::<DiscreteDistribution>(value)
                .map(TrialElement::Discrete)
                .map_err(D::Error::custom),
            "delta" | "grid" | "gmm" => serde_json::from_value::<SpatialDensity>(value)
                .map(TrialElement::Density)
                .map_err(D::Error::custom),
            other => Err(D::Error::custom(format!(
                "unknown element type `{other}` (expected point, discrete, delta, grid, or gmm)"
            ))),
        }
    }
}

/// One evaluation unit: a reference and a hypothesis of the same family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrial")]
pub struct Trial {
    trial_id: String,
    reference: TrialElement,
    hypothesis: TrialElement,
}

#[derive(Deserialize)]
struct RawTrial {
    trial_id: String,
    reference: TrialElement,
    hypothesis: TrialElement,
}

impl TryFrom<RawTrial> for Trial {
    type Error = Error;
    fn try_from(raw: RawTrial) -> Result<Self> {
        Trial::new(raw.trial_id, raw.reference, raw.hypothesis)
    }
}

impl Trial {
    pub fn new(
        trial_id: impl Into<String>,
        reference: TrialElement,
        hypothesis: TrialElement,
    ) -> Result<Self> {
        let trial_id = trial_id.into();
        if reference.family() != hypothesis.family() {
            return Err(Error::Schema(format!(
                "trial `{trial_id}`: reference family {} does not match hypothesis family {}",
                reference.family(),
                hypothesis.family()
            )));
        }
        Ok(Trial {
            trial_id,
            reference,
            hypothesis,
        })
    }

    pub fn trial_id(&self) -> &str {
        &self.trial_id
    }

    pub fn reference(&self) -> &TrialElement {
        &self.reference
    }

    pub fn hypothesis(&self) -> &TrialElement {
        &self.hypothesis
    }

    pub fn family(&self) -> TrialFamily {
        self.reference.family()
    }
}

/// Read a trial file: JSON lines, one trial per line. Parse failures
/// name the offending line.
pub fn read_trials(path: impl AsRef<Path>) -> Result<Vec<Trial>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))?;
    parse_trials(&text).map_err(|e| match e {
        Error::Parse { line, source, .. } => Error::Parse {
            path: path.display().to_string(),
            line,
            source,
        },
        other => other,
    })
}

pub fn parse_trials(text: &str) -> Result<Vec<Trial>> {
    let mut trials = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let trial: Trial = serde_json::from_str(line)
            .map_err(|e| Error::parse_line("<trials>", idx + 1, e))?;
        trials.push(trial);
    }
    Ok(trials)
}

pub fn write_trials(path: impl AsRef<Path>, trials: &[Trial]) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    for t in trials {
        serde_json::to_writer(&mut out, t).expect("trial serialization cannot fail");
        out.push(b'\n');
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path.display(), e))?;
    file.write_all(&out).map_err(|e| Error::io(path.display(), e))
}
