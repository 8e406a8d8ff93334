use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{BBox, Location};

/// 2×2 symmetric positive-definite covariance, `[[xx, xy], [xy, yy]]` in
/// JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 2]; 2]", into = "[[f64; 2]; 2]")]
pub struct Cov2 {
    xx: f64,
    xy: f64,
    yy: f64,
}

impl Cov2 {
    pub fn new(xx: f64, xy: f64, yy: f64) -> Result<Self> {
        let det = xx * yy - xy * xy;
        let ok = xx.is_finite() && xy.is_finite() && yy.is_finite() && xx > 0.0 && det > 0.0;
        if !ok {
            return Err(Error::Domain(format!(
                "covariance [[{xx}, {xy}], [{xy}, {yy}]] is not symmetric positive definite"
            )));
        }
        Ok(Cov2 { xx, xy, yy })
    }

    pub fn isotropic(sigma_km: f64) -> Result<Self> {
        Cov2::new(sigma_km * sigma_km, 0.0, sigma_km * sigma_km)
    }

    pub fn xx(&self) -> f64 {
        self.xx
    }

    pub fn xy(&self) -> f64 {
        self.xy
    }

    pub fn yy(&self) -> f64 {
        self.yy
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    /// Largest marginal standard deviation direction: √(max eigenvalue).
    pub fn max_std(&self) -> f64 {
        let half_trace = 0.5 * (self.xx + self.yy);
        let half_gap = 0.5 * (self.xx - self.yy);
        (half_trace + (half_gap * half_gap + self.xy * self.xy).sqrt()).sqrt()
    }

    /// Quadratic form (p − μ)ᵀ Σ⁻¹ (p − μ).
    pub fn mahalanobis_sq(&self, dx: f64, dy: f64) -> f64 {
        let det = self.det();
        (self.yy * dx * dx - 2.0 * self.xy * dx * dy + self.xx * dy * dy) / det
    }

    /// Lower-triangular Cholesky factor (l11, l21, l22).
    pub fn cholesky(&self) -> (f64, f64, f64) {
        let l11 = self.xx.sqrt();
        let l21 = self.xy / l11;
        let l22 = (self.yy - l21 * l21).sqrt();
        (l11, l21, l22)
    }
}

impl TryFrom<[[f64; 2]; 2]> for Cov2 {
    type Error = Error;
    fn try_from(m: [[f64; 2]; 2]) -> Result<Self> {
        if m[0][1] != m[1][0] {
            return Err(Error::Domain(format!(
                "covariance matrix is not symmetric: {} != {}",
                m[0][1], m[1][0]
            )));
        }
        Cov2::new(m[0][0], m[0][1], m[1][1])
    }
}

impl From<Cov2> for [[f64; 2]; 2] {
    fn from(c: Cov2) -> Self {
        [[c.xx, c.xy], [c.xy, c.yy]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub mean: Location,
    pub cov: Cov2,
    pub weight: f64,
}

impl GaussianComponent {
    /// Component density including its mixture weight.
    pub fn pdf(&self, at: Location) -> f64 {
        let q = self
            .cov
            .mahalanobis_sq(at.x - self.mean.x, at.y - self.mean.y);
        self.weight * (-0.5 * q).exp() / (TAU * self.cov.det().sqrt())
    }
}

/// A convex combination of bivariate Gaussians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGmm")]
pub struct GaussianMixture {
    components: Vec<GaussianComponent>,
}

#[derive(Deserialize)]
struct RawGmm {
    components: Vec<GaussianComponent>,
}

impl TryFrom<RawGmm> for GaussianMixture {
    type Error = Error;
    fn try_from(raw: RawGmm) -> Result<Self> {
        GaussianMixture::new(raw.components)
    }
}

impl GaussianMixture {
    pub fn new(components: Vec<GaussianComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::DegenerateDensity("mixture has no components".into()));
        }
        for c in &components {
            if !c.mean.is_finite() {
                return Err(Error::InvalidGeometry(
                    "component mean has non-finite coordinates".into(),
                ));
            }
            if !(c.weight.is_finite() && c.weight >= 0.0) {
                return Err(Error::DegenerateDensity(format!(
                    "component weight must be finite and ≥ 0, got {}",
                    c.weight
                )));
            }
        }
        Ok(GaussianMixture { components })
    }

    /// Single Gaussian with unit weight.
    pub fn single(mean: Location, cov: Cov2) -> Self {
        GaussianMixture {
            components: vec![GaussianComponent {
                mean,
                cov,
                weight: 1.0,
            }],
        }
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|c| c.weight).sum()
    }

    pub fn normalize(&self) -> Result<Self> {
        let mass = self.total_weight();
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::DegenerateDensity(format!(
                "cannot normalize mixture with total weight {mass}"
            )));
        }
        Ok(GaussianMixture {
            components: self
                .components
                .iter()
                .map(|c| GaussianComponent {
                    weight: c.weight / mass,
                    ..*c
                })
                .collect(),
        })
    }

    pub fn pdf(&self, at: Location) -> f64 {
        self.components.iter().map(|c| c.pdf(at)).sum()
    }

    pub fn mean(&self) -> Location {
        let mass = self.total_weight();
        let (mut x, mut y) = (0.0, 0.0);
        for c in &self.components {
            x += c.weight * c.mean.x;
            y += c.weight * c.mean.y;
        }
        Location::new(x / mass, y / mass)
    }

    /// Union of per-component boxes mean ± `radius_sigmas`·(max std).
    pub fn auto_bbox(&self, radius_sigmas: f64) -> BBox {
        let mut bbox: Option<BBox> = None;
        for c in &self.components {
            let r = radius_sigmas * c.cov.max_std();
            let b = BBox::new(
                c.mean.x - r,
                c.mean.y - r,
                c.mean.x + r,
                c.mean.y + r,
            );
            bbox = Some(match bbox {
                Some(acc) => acc.union(&b),
                None => b,
            });
        }
        bbox.expect("mixture is non-empty")
    }
}
