use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Location;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    #[serde(flatten)]
    pub location: Location,
    pub weight: f64,
}

/// A purely atomic density: mass sits on a finite set of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDeltaSet")]
pub struct DeltaSet {
    points: Vec<WeightedPoint>,
}

#[derive(Deserialize)]
struct RawDeltaSet {
    points: Vec<WeightedPoint>,
}

impl TryFrom<RawDeltaSet> for DeltaSet {
    type Error = Error;
    fn try_from(raw: RawDeltaSet) -> Result<Self> {
        DeltaSet::new(raw.points)
    }
}

impl DeltaSet {
    pub fn new(points: Vec<WeightedPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::DegenerateDensity("delta set has no points".into()));
        }
        for p in &points {
            if !p.location.is_finite() {
                return Err(Error::InvalidGeometry(
                    "delta point has non-finite coordinates".into(),
                ));
            }
            if !(p.weight.is_finite() && p.weight >= 0.0) {
                return Err(Error::DegenerateDensity(format!(
                    "delta weight must be finite and ≥ 0, got {}",
                    p.weight
                )));
            }
        }
        Ok(DeltaSet { points })
    }

    /// Single unit-mass atom.
    pub fn singleton(location: Location) -> Self {
        DeltaSet {
            points: vec![WeightedPoint {
                location,
                weight: 1.0,
            }],
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Location, f64)>) -> Result<Self> {
        DeltaSet::new(
            pairs
                .into_iter()
                .map(|(location, weight)| WeightedPoint { location, weight })
                .collect(),
        )
    }

    pub fn points(&self) -> &[WeightedPoint] {
        &self.points
    }

    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|p| p.weight).sum()
    }

    pub fn normalize(&self) -> Result<Self> {
        let mass = self.total_weight();
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::DegenerateDensity(format!(
                "cannot normalize delta set with total weight {mass}"
            )));
        }
        Ok(DeltaSet {
            points: self
                .points
                .iter()
                .map(|p| WeightedPoint {
                    location: p.location,
                    weight: p.weight / mass,
                })
                .collect(),
        })
    }

    pub fn mean(&self) -> Location {
        let mass = self.total_weight();
        let (mut x, mut y) = (0.0, 0.0);
        for p in &self.points {
            x += p.weight * p.location.x;
            y += p.weight * p.location.y;
        }
        Location::new(x / mass, y / mass)
    }

    /// Heaviest atom; ties go to the lexicographically smallest (x, y).
    pub fn mode(&self) -> Location {
        let mut best = &self.points[0];
        for p in &self.points[1..] {
            if p.weight > best.weight
                || (p.weight == best.weight
                    && p.location.lex_cmp(&best.location) == std::cmp::Ordering::Less)
            {
                best = p;
            }
        }
        best.location
    }
}
