use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{BBox, Location};

/// A raster density over a bounding box.
///
/// Each cell value is the *average density* over that cell, so a cell's
/// mass is `value × cell_area` and total mass is exactly summable.
/// Values are stored row-major with row 0 at the southern edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GridDensity {
    bbox: BBox,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawGrid {
    bbox: BBox,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl TryFrom<RawGrid> for GridDensity {
    type Error = Error;
    fn try_from(raw: RawGrid) -> Result<Self> {
        GridDensity::new(raw.bbox, raw.nx, raw.ny, raw.values)
    }
}

impl GridDensity {
    pub fn new(bbox: BBox, nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if !bbox.is_valid() {
            return Err(Error::InvalidGeometry(format!(
                "grid bbox must be finite with positive extent, got {bbox:?}"
            )));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::Schema("grid needs nx ≥ 1 and ny ≥ 1".into()));
        }
        if values.len() != nx * ny {
            return Err(Error::Schema(format!(
                "grid expects {} values ({}×{}), got {}",
                nx * ny,
                nx,
                ny,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::DegenerateDensity(format!(
                "grid values must be finite and ≥ 0, found {bad}"
            )));
        }
        Ok(GridDensity {
            bbox,
            nx,
            ny,
            values,
        })
    }

    /// Build from a density function evaluated at cell centers.
    pub fn from_fn(
        bbox: BBox,
        nx: usize,
        ny: usize,
        mut f: impl FnMut(Location) -> f64,
    ) -> Result<Self> {
        let mut proto = GridDensity::new(bbox, nx, ny, vec![0.0; nx * ny])?;
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(proto.cell_center(i, j)));
            }
        }
        proto.values = values;
        if let Some(bad) = proto.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::DegenerateDensity(format!(
                "grid values must be finite and ≥ 0, found {bad}"
            )));
        }
        Ok(proto)
    }

    /// Uniform density of total mass 1 over the box.
    pub fn uniform(bbox: BBox, nx: usize, ny: usize) -> Result<Self> {
        if !bbox.is_valid() {
            return Err(Error::InvalidGeometry("invalid bbox for uniform grid".into()));
        }
        let v = 1.0 / bbox.area();
        GridDensity::new(bbox, nx, ny, vec![v; nx * ny])
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell_width(&self) -> f64 {
        self.bbox.width() / self.nx as f64
    }

    pub fn cell_height(&self) -> f64 {
        self.bbox.height() / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_width() * self.cell_height()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Location {
        Location::new(
            self.bbox.min_x + (i as f64 + 0.5) * self.cell_width(),
            self.bbox.min_y + (j as f64 + 0.5) * self.cell_height(),
        )
    }

    pub fn cell_mass(&self, i: usize, j: usize) -> f64 {
        self.value(i, j) * self.cell_area()
    }

    /// Cell containing `loc`; points on the northern/eastern edge belong
    /// to the last cell, points outside the box to none.
    pub fn locate(&self, loc: Location) -> Option<(usize, usize)> {
        if !self.bbox.contains(loc) {
            return None;
        }
        let i = (((loc.x - self.bbox.min_x) / self.cell_width()) as usize).min(self.nx - 1);
        let j = (((loc.y - self.bbox.min_y) / self.cell_height()) as usize).min(self.ny - 1);
        Some((i, j))
    }

    pub fn pdf(&self, loc: Location) -> f64 {
        match self.locate(loc) {
            Some((i, j)) => self.value(i, j),
            None => 0.0,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area()
    }

    pub fn normalize(&self) -> Result<Self> {
        let mass = self.total_mass();
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::DegenerateDensity(format!(
                "cannot normalize grid with total mass {mass}"
            )));
        }
        Ok(GridDensity {
            bbox: self.bbox,
            nx: self.nx,
            ny: self.ny,
            values: self.values.iter().map(|v| v / mass).collect(),
        })
    }

    pub fn mean(&self) -> Location {
        let (mut x, mut y, mut m) = (0.0, 0.0, 0.0);
        for j in 0..self.ny {
            for i in 0..self.nx {
                let w = self.value(i, j);
                if w == 0.0 {
                    continue;
                }
                let c = self.cell_center(i, j);
                x += w * c.x;
                y += w * c.y;
                m += w;
            }
        }
        Location::new(x / m, y / m)
    }

    /// Center of the heaviest cell; ties go to the lexicographically
    /// smallest (x, y) center.
    pub fn mode(&self) -> Location {
        let mut best_v = f64::NEG_INFINITY;
        let mut best_c = self.cell_center(0, 0);
        for j in 0..self.ny {
            for i in 0..self.nx {
                let v = self.value(i, j);
                let c = self.cell_center(i, j);
                if v > best_v
                    || (v == best_v && c.lex_cmp(&best_c) == std::cmp::Ordering::Less)
                {
                    best_v = v;
                    best_c = c;
                }
            }
        }
        best_c
    }

    /// Pointwise product with another grid of identical geometry,
    /// renormalized. This is Bayes composition on a common grid.
    pub(crate) fn product_normalized(&self, other: &GridDensity) -> Result<GridDensity> {
        debug_assert_eq!((self.nx, self.ny), (other.nx, other.ny));
        // Scale by the larger factor's maximum to dodge underflow; the
        // normalization at the end makes the scale irrelevant.
        let scale = other
            .values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::DegenerateDensity(
                "likelihood is zero everywhere on the grid".into(),
            ));
        }
        let values: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * (b / scale))
            .collect();
        let mass: f64 = values.iter().sum::<f64>() * self.cell_area();
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::DegenerateDensity(
                "posterior product has zero mass on the grid".into(),
            ));
        }
        GridDensity::new(
            self.bbox,
            self.nx,
            self.ny,
            values.into_iter().map(|v| v / mass).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_cell_value_and_mass() {
        let g = GridDensity::uniform(BBox::new(0.0, 0.0, 10.0, 10.0), 10, 10).unwrap();
        assert!((g.value(3, 7) - 0.01).abs() < 1e-15);
        assert!((g.total_mass() - 1.0).abs() < 1e-12);
        let m = g.mean();
        assert!((m.x - 5.0).abs() < 1e-12 && (m.y - 5.0).abs() < 1e-12);
    }

    #[test]
    fn locate_edges() {
        let g = GridDensity::uniform(BBox::new(0.0, 0.0, 10.0, 5.0), 10, 5).unwrap();
        assert_eq!(g.locate(Location::new(0.0, 0.0)), Some((0, 0)));
        assert_eq!(g.locate(Location::new(10.0, 5.0)), Some((9, 4)));
        assert_eq!(g.locate(Location::new(10.1, 2.0)), None);
    }

    #[test]
    fn rejects_wrong_value_count_and_negatives() {
        let b = BBox::new(0.0, 0.0, 1.0, 1.0);
        assert!(GridDensity::new(b, 2, 2, vec![1.0; 3]).is_err());
        assert!(GridDensity::new(b, 2, 2, vec![1.0, 1.0, -0.5, 1.0]).is_err());
        assert!(GridDensity::new(BBox::new(0.0, 0.0, 0.0, 1.0), 1, 1, vec![1.0]).is_err());
    }

    #[test]
    fn mode_tiebreak_lex() {
        let g = GridDensity::new(
            BBox::new(0.0, 0.0, 2.0, 1.0),
            2,
            1,
            vec![0.5, 0.5],
        )
        .unwrap();
        assert_eq!(g.mode(), Location::new(0.5, 0.5));
    }
}
