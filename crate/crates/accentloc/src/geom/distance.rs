use super::location::Location;
use crate::density::SpatialDensity;
use crate::error::{Error, Result};

/// A distance function `D(x, y)` over planar locations.
///
/// All variants are symmetric, non-negative, and zero at `x == y`.
#[derive(Debug, Clone)]
pub enum DistanceFunction {
    /// Plain straight-line distance.
    Euclidean,
    /// Euclidean distance clamped at `tau_km`; errors past a certain
    /// radius all look alike.
    Saturated { tau_km: f64 },
    /// Euclidean length times the mean of a population-density field
    /// sampled along the segment between the endpoints. The field keeps
    /// the scale it was supplied with.
    PopulationWeighted {
        density: SpatialDensity,
        samples: usize,
    },
}

impl DistanceFunction {
    pub fn euclidean() -> Self {
        DistanceFunction::Euclidean
    }

    pub fn saturated(tau_km: f64) -> Result<Self> {
        if !(tau_km.is_finite() && tau_km > 0.0) {
            return Err(Error::Domain(format!(
                "saturation radius must be positive and finite, got {tau_km}"
            )));
        }
        Ok(DistanceFunction::Saturated { tau_km })
    }

    /// The density must have positive finite total mass; its values are
    /// used as-is (no renormalization), so a field of 1s weights like
    /// plain Euclidean distance.
    pub fn population_weighted(density: SpatialDensity, samples: usize) -> Result<Self> {
        if samples == 0 {
            return Err(Error::Domain(
                "population-weighted distance needs at least 1 sample".into(),
            ));
        }
        let mass = density.total_mass();
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::DegenerateDensity(format!(
                "population field is not normalizable (total mass {mass})"
            )));
        }
        Ok(DistanceFunction::PopulationWeighted { density, samples })
    }

    pub fn distance(&self, a: Location, b: Location) -> f64 {
        match self {
            DistanceFunction::Euclidean => a.distance_to(b),
            DistanceFunction::Saturated { tau_km } => a.distance_to(b).min(*tau_km),
            DistanceFunction::PopulationWeighted { density, samples } => {
                let len = a.distance_to(b);
                if len == 0.0 {
                    return 0.0;
                }
                len * mean_on_segment(density, a, b, *samples)
            }
        }
    }

    /// Short form for report configuration echoes.
    pub fn describe(&self) -> String {
        match self {
            DistanceFunction::Euclidean => "euclidean".into(),
            DistanceFunction::Saturated { tau_km } => format!("saturated:{tau_km}"),
            DistanceFunction::PopulationWeighted { samples, .. } => {
                format!("population:{samples}")
            }
        }
    }
}

/// Mean field value over `samples` equally spaced points on the segment,
/// endpoints included (the single-sample case takes the midpoint). The
/// sample set is symmetric in the endpoints, so the distance is too.
fn mean_on_segment(density: &SpatialDensity, a: Location, b: Location, samples: usize) -> f64 {
    if samples == 1 {
        return density.pdf(Location::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y)));
    }
    let mut acc = 0.0;
    for k in 0..samples {
        let t = k as f64 / (samples - 1) as f64;
        acc += density.pdf(Location::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
    }
    acc / samples as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::GridDensity;
    use crate::geom::BBox;

    #[test]
    fn euclidean_and_saturated() {
        let (a, b) = (Location::new(0.0, 0.0), Location::new(3.0, 4.0));
        assert_eq!(DistanceFunction::Euclidean.distance(a, b), 5.0);
        let sat = DistanceFunction::saturated(2.0).unwrap();
        assert_eq!(sat.distance(a, b), 2.0);
        assert_eq!(sat.distance(a, a), 0.0);
    }

    #[test]
    fn saturated_rejects_bad_tau() {
        assert!(DistanceFunction::saturated(0.0).is_err());
        assert!(DistanceFunction::saturated(f64::NAN).is_err());
    }

    #[test]
    fn population_over_unit_field_matches_euclidean() {
        // field value 1 everywhere the segment goes
        let grid = GridDensity::new(
            BBox::new(-1.0, -1.0, 5.0, 5.0),
            6,
            6,
            vec![1.0; 36],
        )
        .unwrap();
        let d =
            DistanceFunction::population_weighted(SpatialDensity::Grid(grid), 101).unwrap();
        let got = d.distance(Location::new(0.0, 0.0), Location::new(3.0, 4.0));
        assert!((got - 5.0).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn population_rejects_zero_mass() {
        let grid = GridDensity::new(BBox::new(0.0, 0.0, 1.0, 1.0), 2, 2, vec![0.0; 4]).unwrap();
        let r = DistanceFunction::population_weighted(SpatialDensity::Grid(grid), 10);
        assert!(matches!(r, Err(Error::DegenerateDensity(_))));
    }
}
