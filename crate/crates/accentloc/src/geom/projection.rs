use super::location::Location;

/// Mean Earth radius used by the working projection.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Equirectangular projection onto the planar km frame.
///
/// Longitude/latitude pairs map to `x = R·cos(φ₀)·(λ−λ₀)` and
/// `y = R·(φ−φ₀)` with angles in radians, about a reference point
/// `(λ₀, φ₀)`. Accurate to well under a percent at the couple-hundred-km
/// scale this crate targets; pick the reference near the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub ref_lat_deg: f64,
    pub ref_lon_deg: f64,
}

impl Projection {
    pub fn new(ref_lat_deg: f64, ref_lon_deg: f64) -> Self {
        Projection {
            ref_lat_deg,
            ref_lon_deg,
        }
    }

    pub fn project(&self, lon_deg: f64, lat_deg: f64) -> Location {
        let scale = self.ref_lat_deg.to_radians().cos();
        Location::new(
            EARTH_RADIUS_KM * scale * (lon_deg - self.ref_lon_deg).to_radians(),
            EARTH_RADIUS_KM * (lat_deg - self.ref_lat_deg).to_radians(),
        )
    }
}
