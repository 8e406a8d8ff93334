//! Origin-location modelling over a life span.
//!
//! A speaker's origin can be described at increasing levels of richness:
//! a single point, a density around a residence, a density indexed by age
//! over a whole residence history, that history integrated into one
//! density under an age-susceptibility weight, and finally a single
//! weighted-centroid point that also accounts for how strongly each
//! place's accent imprints. This module implements the chain and its
//! collapses: a single-episode point history reduces back to the plain
//! point under every operation.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::density::{self, GridDensity, RasterOptions, SpatialDensity};
use crate::error::{Error, Result};
use crate::geom::Location;

/// Tolerance for comparing ages (years) at episode seams.
const AGE_EPS: f64 = 1e-9;

/// One residence episode: where somebody lived from `start_age` to
/// `end_age`. The place is a normalized density, typically an atom or a
/// small Gaussian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEpisode")]
pub struct Episode {
    start_age: f64,
    end_age: f64,
    place: SpatialDensity,
}

#[derive(Deserialize)]
struct RawEpisode {
    start_age: f64,
    end_age: f64,
    place: SpatialDensity,
}

impl TryFrom<RawEpisode> for Episode {
    type Error = Error;
    fn try_from(raw: RawEpisode) -> Result<Self> {
        Episode::new(raw.start_age, raw.end_age, raw.place)
    }
}

impl Episode {
    /// The place density is normalized here, so downstream mixtures get
    /// proper per-episode probability components.
    pub fn new(start_age: f64, end_age: f64, place: SpatialDensity) -> Result<Self> {
        if !(start_age.is_finite() && end_age.is_finite() && start_age >= 0.0) {
            return Err(Error::OutOfRange(format!(
                "episode ages must be finite and non-negative, got [{start_age}, {end_age}]"
            )));
        }
        if start_age >= end_age {
            return Err(Error::OutOfRange(format!(
                "episode must have start < end, got [{start_age}, {end_age}]"
            )));
        }
        Ok(Episode {
            start_age,
            end_age,
            place: place.normalize()?,
        })
    }

    /// Episode residing at a single point.
    pub fn at_point(start_age: f64, end_age: f64, location: Location) -> Result<Self> {
        Episode::new(start_age, end_age, SpatialDensity::delta_at(location))
    }

    pub fn start_age(&self) -> f64 {
        self.start_age
    }

    pub fn end_age(&self) -> f64 {
        self.end_age
    }

    pub fn place(&self) -> &SpatialDensity {
        &self.place
    }
}

/// A gap-free residence record over `[0, current_age]`.
///
/// Episodes are kept ordered by start age; consecutive episodes must
/// meet exactly (gaps and overlaps are rejected at construction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Episode>", into = "Vec<Episode>")]
pub struct LocationHistory {
    episodes: Vec<Episode>,
}

impl TryFrom<Vec<Episode>> for LocationHistory {
    type Error = Error;
    fn try_from(episodes: Vec<Episode>) -> Result<Self> {
        LocationHistory::new(episodes)
    }
}

impl From<LocationHistory> for Vec<Episode> {
    fn from(h: LocationHistory) -> Self {
        h.episodes
    }
}

impl LocationHistory {
    pub fn new(mut episodes: Vec<Episode>) -> Result<Self> {
        if episodes.is_empty() {
            return Err(Error::Schema("history has no episodes".into()));
        }
        episodes.sort_by(|a, b| a.start_age.total_cmp(&b.start_age));
        if episodes[0].start_age.abs() > AGE_EPS {
            return Err(Error::Schema(format!(
                "history must start at age 0, got {}",
                episodes[0].start_age
            )));
        }
        for w in episodes.windows(2) {
            let (prev, next) = (&w[0], &w[1]);
            if next.start_age < prev.end_age - AGE_EPS {
                return Err(Error::Schema(format!(
                    "episodes overlap: [{}, {}] and [{}, {}]",
                    prev.start_age, prev.end_age, next.start_age, next.end_age
                )));
            }
            if next.start_age > prev.end_age + AGE_EPS {
                return Err(Error::Schema(format!(
                    "gap between ages {} and {}",
                    prev.end_age, next.start_age
                )));
            }
        }
        Ok(LocationHistory { episodes })
    }

    /// Whole life at one place.
    pub fn single(current_age: f64, place: SpatialDensity) -> Result<Self> {
        LocationHistory::new(vec![Episode::new(0.0, current_age, place)?])
    }

    pub fn episodes(&self) -> &[Episode] {
        &self.episodes
    }

    pub fn current_age(&self) -> f64 {
        self.episodes.last().expect("non-empty").end_age
    }
}

/// Age-dependent susceptibility to picking up a local accent, `w(t)`.
///
/// The functional form is not empirically pinned down; the default is a
/// unit window over the childhood ages 4–18, and everything is
/// configurable. Scaling by a positive constant never changes results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SusceptibilityWeight {
    Uniform,
    /// Unit weight on `[from_age, to_age)`, zero elsewhere.
    Window { from_age: f64, to_age: f64 },
    /// Piecewise-linear interpolation through `(age, weight)` breakpoints,
    /// constant beyond the first and last.
    Piecewise { breakpoints: Vec<(f64, f64)> },
}

impl Default for SusceptibilityWeight {
    fn default() -> Self {
        SusceptibilityWeight::Window {
            from_age: 4.0,
            to_age: 18.0,
        }
    }
}

impl SusceptibilityWeight {
    pub fn window(from_age: f64, to_age: f64) -> Result<Self> {
        if !(from_age.is_finite() && to_age.is_finite() && from_age < to_age) {
            return Err(Error::Domain(format!(
                "window needs from < to, got [{from_age}, {to_age}]"
            )));
        }
        Ok(SusceptibilityWeight::Window { from_age, to_age })
    }

    pub fn piecewise(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::Domain("piecewise weight needs breakpoints".into()));
        }
        for pair in breakpoints.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::Domain(
                    "piecewise breakpoint ages must be strictly increasing".into(),
                ));
            }
        }
        if breakpoints
            .iter()
            .any(|(a, w)| !(a.is_finite() && w.is_finite() && *w >= 0.0))
        {
            return Err(Error::Domain(
                "piecewise weights must be finite and ≥ 0".into(),
            ));
        }
        Ok(SusceptibilityWeight::Piecewise { breakpoints })
    }

    pub fn weight_at(&self, age: f64) -> f64 {
        match self {
            SusceptibilityWeight::Uniform => 1.0,
            SusceptibilityWeight::Window { from_age, to_age } => {
                if age >= *from_age && age < *to_age {
                    1.0
                } else {
                    0.0
                }
            }
            SusceptibilityWeight::Piecewise { breakpoints } => {
                let first = breakpoints.first().expect("non-empty");
                let last = breakpoints.last().expect("non-empty");
                if age <= first.0 {
                    return first.1;
                }
                if age >= last.0 {
                    return last.1;
                }
                let idx = breakpoints.partition_point(|(a, _)| *a <= age);
                let (a0, w0) = breakpoints[idx - 1];
                let (a1, w1) = breakpoints[idx];
                w0 + (w1 - w0) * (age - a0) / (a1 - a0)
            }
        }
    }

    /// Exact integral of the weight over `[from, to]`.
    pub fn integral(&self, from: f64, to: f64) -> f64 {
        if to <= from {
            return 0.0;
        }
        match self {
            SusceptibilityWeight::Uniform => to - from,
            SusceptibilityWeight::Window { from_age, to_age } => {
                (to.min(*to_age) - from.max(*from_age)).max(0.0)
            }
            SusceptibilityWeight::Piecewise { breakpoints } => {
                // Knots at interval ends and every interior breakpoint;
                // the function is linear between consecutive knots, so the
                // trapezoid rule is exact.
                let mut knots = vec![from];
                knots.extend(
                    breakpoints
                        .iter()
                        .map(|(a, _)| *a)
                        .filter(|a| *a > from && *a < to),
                );
                knots.push(to);
                knots
                    .windows(2)
                    .map(|k| {
                        0.5 * (self.weight_at(k[0]) + self.weight_at(k[1])) * (k[1] - k[0])
                    })
                    .sum()
            }
        }
    }
}

/// Relative strength `v(x)` a local accent imprints on its residents:
/// a non-negative scalar field, not necessarily normalized.
#[derive(Debug, Clone, PartialEq)]
pub enum AccentStrengthField {
    Uniform,
    Raster(GridDensity),
}

impl AccentStrengthField {
    pub fn value_at(&self, loc: Location) -> f64 {
        match self {
            AccentStrengthField::Uniform => 1.0,
            AccentStrengthField::Raster(g) => g.pdf(loc),
        }
    }
}

/// Integrate a residence history over age into one origin density: a
/// mixture over episodes with weights proportional to the susceptibility
/// mass each episode collects.
pub fn origin_density(
    history: &LocationHistory,
    weight: &SusceptibilityWeight,
) -> Result<SpatialDensity> {
    origin_density_with(history, weight, &RasterOptions::default())
}

pub fn origin_density_with(
    history: &LocationHistory,
    weight: &SusceptibilityWeight,
    raster: &RasterOptions,
) -> Result<SpatialDensity> {
    let parts: Vec<(SpatialDensity, f64)> = history
        .episodes()
        .iter()
        .map(|e| {
            (
                e.place().clone(),
                weight.integral(e.start_age(), e.end_age()),
            )
        })
        .collect();
    if parts.iter().map(|(_, w)| w).sum::<f64>() <= 0.0 {
        return Err(Error::DegenerateDensity(
            "susceptibility weight vanishes over the whole life span".into(),
        ));
    }
    density::mixture(&parts, raster)
}

/// Collapse a history to one point: the accent-strength-weighted
/// centroid of the origin density. The weighted integral is divided by
/// its own mass, so the result is a proper location.
pub fn origin_point(
    history: &LocationHistory,
    weight: &SusceptibilityWeight,
    strength: &AccentStrengthField,
) -> Result<Location> {
    origin_point_with(history, weight, strength, &RasterOptions::default())
}

pub fn origin_point_with(
    history: &LocationHistory,
    weight: &SusceptibilityWeight,
    strength: &AccentStrengthField,
    raster: &RasterOptions,
) -> Result<Location> {
    let (mut num_x, mut num_y, mut den) = (0.0, 0.0, 0.0);
    for e in history.episodes() {
        let omega = weight.integral(e.start_age(), e.end_age());
        if omega <= 0.0 {
            continue;
        }
        match (strength, e.place()) {
            // Uniform strength: each episode contributes its mean with its
            // full susceptibility mass; exact for every representation.
            (AccentStrengthField::Uniform, place) => {
                let m = place.mean();
                num_x += omega * m.x;
                num_y += omega * m.y;
                den += omega;
            }
            (_, SpatialDensity::Delta(d)) => {
                for p in d.points() {
                    let v = strength.value_at(p.location);
                    let c = omega * p.weight * v;
                    num_x += c * p.location.x;
                    num_y += c * p.location.y;
                    den += c;
                }
            }
            (_, SpatialDensity::Grid(g)) => {
                accumulate_grid_centroid(g, strength, omega, &mut num_x, &mut num_y, &mut den);
            }
            (_, SpatialDensity::Gmm(_)) => {
                let g = e.place().rasterize(raster)?;
                accumulate_grid_centroid(&g, strength, omega, &mut num_x, &mut num_y, &mut den);
            }
        }
    }
    if den <= 0.0 {
        return Err(Error::DegenerateDensity(
            "weighted origin integral has zero mass (susceptibility or accent \
             strength vanishes on the history's support)"
                .into(),
        ));
    }
    Ok(Location::new(num_x / den, num_y / den))
}

fn accumulate_grid_centroid(
    g: &GridDensity,
    strength: &AccentStrengthField,
    omega: f64,
    num_x: &mut f64,
    num_y: &mut f64,
    den: &mut f64,
) {
    let area = g.cell_area();
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let mass = g.value(i, j) * area;
            if mass == 0.0 {
                continue;
            }
            let c = g.cell_center(i, j);
            let v = strength.value_at(c);
            let w = omega * mass * v;
            *num_x += w * c.x;
            *num_y += w * c.y;
            *den += w;
        }
    }
}

/// The place density in effect at `age`. Episode seams belong to the
/// later episode; the final age belongs to the last episode.
pub fn density_at_time(history: &LocationHistory, age: f64) -> Result<&SpatialDensity> {
    if !age.is_finite() || age < 0.0 || age > history.current_age() {
        return Err(Error::OutOfRange(format!(
            "age {age} outside the history span [0, {}]",
            history.current_age()
        )));
    }
    for e in history.episodes() {
        if age >= e.start_age() && age < e.end_age() {
            return Ok(e.place());
        }
    }
    Ok(history.episodes().last().expect("non-empty").place())
}

/// Read a history file: a JSON list of episodes.
pub fn read_history(path: impl AsRef<Path>) -> Result<LocationHistory> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path.display(), e))
}

pub fn parse_history(text: &str) -> Result<LocationHistory> {
    serde_json::from_str(text).map_err(|e| Error::parse("<history>", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_episode_history() -> LocationHistory {
        LocationHistory::new(vec![
            Episode::at_point(0.0, 15.0, Location::new(0.0, 0.0)).unwrap(),
            Episode::at_point(15.0, 30.0, Location::new(10.0, 0.0)).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn single_episode_collapses_to_delta() {
        let h = LocationHistory::single(30.0, SpatialDensity::delta_at(Location::new(2.0, 3.0)))
            .unwrap();
        let d = origin_density(&h, &SusceptibilityWeight::Uniform).unwrap();
        assert_eq!(d, SpatialDensity::delta_at(Location::new(2.0, 3.0)));
        let p = origin_point(
            &h,
            &SusceptibilityWeight::Uniform,
            &AccentStrengthField::Uniform,
        )
        .unwrap();
        assert_eq!(p, Location::new(2.0, 3.0));
    }

    #[test]
    fn uniform_weight_splits_by_duration() {
        let d = origin_density(&two_episode_history(), &SusceptibilityWeight::Uniform).unwrap();
        let SpatialDensity::Delta(ds) = d else {
            panic!("expected delta mixture")
        };
        assert!((ds.points()[0].weight - 0.5).abs() < 1e-12);
        assert!((ds.points()[1].weight - 0.5).abs() < 1e-12);
    }

    #[test]
    fn window_weight_shifts_mixture() {
        // window [4, 18] overlaps the episodes for 11 and 3 years
        let w = SusceptibilityWeight::default();
        let d = origin_density(&two_episode_history(), &w).unwrap();
        let SpatialDensity::Delta(ds) = d else {
            panic!("expected delta mixture")
        };
        assert!((ds.points()[0].weight - 11.0 / 14.0).abs() < 1e-12);
        assert!((ds.points()[1].weight - 3.0 / 14.0).abs() < 1e-12);
    }

    #[test]
    fn strength_field_pulls_the_point() {
        // v = 3 around (0,0) and 1 around (10,0): centroid at 10·(1/4)
        let field = GridDensity::new(
            crate::geom::BBox::new(-1.0, -1.0, 11.0, 1.0),
            2,
            1,
            vec![3.0, 1.0],
        )
        .unwrap();
        let p = origin_point(
            &two_episode_history(),
            &SusceptibilityWeight::Uniform,
            &AccentStrengthField::Raster(field),
        )
        .unwrap();
        assert!((p.x - 2.5).abs() < 1e-12, "x = {}", p.x);
        assert_eq!(p.y, 0.0);
    }

    #[test]
    fn density_at_time_boundary_goes_later() {
        let h = two_episode_history();
        let at10 = density_at_time(&h, 10.0).unwrap();
        assert_eq!(*at10, SpatialDensity::delta_at(Location::new(0.0, 0.0)));
        let at15 = density_at_time(&h, 15.0).unwrap();
        assert_eq!(*at15, SpatialDensity::delta_at(Location::new(10.0, 0.0)));
        assert!(matches!(
            density_at_time(&h, 40.0),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn rejects_gaps_and_overlaps() {
        let gap = LocationHistory::new(vec![
            Episode::at_point(0.0, 10.0, Location::new(0.0, 0.0)).unwrap(),
            Episode::at_point(12.0, 20.0, Location::new(1.0, 0.0)).unwrap(),
        ]);
        assert!(matches!(gap, Err(Error::Schema(_))));
        let overlap = LocationHistory::new(vec![
            Episode::at_point(0.0, 10.0, Location::new(0.0, 0.0)).unwrap(),
            Episode::at_point(8.0, 20.0, Location::new(1.0, 0.0)).unwrap(),
        ]);
        assert!(matches!(overlap, Err(Error::Schema(_))));
        let late_start = LocationHistory::new(vec![Episode::at_point(
            2.0,
            10.0,
            Location::new(0.0, 0.0),
        )
        .unwrap()]);
        assert!(matches!(late_start, Err(Error::Schema(_))));
    }

    #[test]
    fn all_zero_susceptibility_is_degenerate() {
        let h = LocationHistory::single(3.0, SpatialDensity::delta_at(Location::new(0.0, 0.0)))
            .unwrap();
        // default window starts at age 4; a 3-year-old history collects none
        let r = origin_density(&h, &SusceptibilityWeight::default());
        assert!(matches!(r, Err(Error::DegenerateDensity(_))));
    }

    #[test]
    fn piecewise_integral_is_exact() {
        let w =
            SusceptibilityWeight::piecewise(vec![(0.0, 0.0), (10.0, 1.0), (20.0, 0.0)]).unwrap();
        // triangle of height 1 over [0, 20]: area 10
        assert!((w.integral(0.0, 20.0) - 10.0).abs() < 1e-12);
        // half of it
        assert!((w.integral(0.0, 10.0) - 5.0).abs() < 1e-12);
        assert_eq!(w.weight_at(5.0), 0.5);
    }

    #[test]
    fn history_json_round_trip() {
        let h = two_episode_history();
        let text = serde_json::to_string(&h).unwrap();
        let back = parse_history(&text).unwrap();
        assert_eq!(h, back);
    }
}
