//! Planar geometry: locations, polygons, tessellations, point-in-region
//! queries, and distance functions.

mod distance;
pub mod geojson;
mod location;
mod polygon;
mod projection;
mod tessellation;

pub use distance::DistanceFunction;
pub use location::{BBox, Location};
pub use polygon::Polygon;
pub use projection::{Projection, EARTH_RADIUS_KM};
pub use tessellation::{estimate_interior_overlap, Tessellation};
