//! Tessellation ingestion from a GeoJSON subset.
//!
//! The file is a `FeatureCollection` of `Polygon` features, each carrying a
//! `region_id` property. A top-level `crs` member selects the coordinate
//! interpretation:
//!
//! - `"planar-km"` — coordinates are already in the planar km frame;
//! - `"wgs84"` — coordinates are `[lon, lat]` degrees, converted through an
//!   equirectangular projection about `ref_lat`/`ref_lon` (top-level members;
//!   when absent, the midpoint of the data's lon/lat extent is used).

use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::location::Location;
use super::polygon::Polygon;
use super::projection::Projection;
use super::tessellation::Tessellation;
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
struct FeatureCollection {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default = "default_crs")]
    crs: String,
    ref_lat: Option<f64>,
    ref_lon: Option<f64>,
    features: Vec<Feature>,
}

fn default_crs() -> String {
    "planar-km".into()
}

#[derive(Debug, Deserialize)]
struct Feature {
    #[serde(rename = "type")]
    kind: String,
    properties: Properties,
    geometry: Geometry,
}

#[derive(Debug, Deserialize)]
struct Properties {
    region_id: String,
}

#[derive(Debug, Deserialize)]
struct Geometry {
    #[serde(rename = "type")]
    kind: String,
    coordinates: Vec<Vec<[f64; 2]>>,
}

pub fn read_tessellation(path: impl AsRef<Path>) -> Result<Tessellation> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))?;
    parse_tessellation(&text).map_err(|e| match e {
        Error::Parse { line, source, .. } => Error::Parse {
            path: path.display().to_string(),
            line,
            source,
        },
        other => other,
    })
}

pub fn parse_tessellation(text: &str) -> Result<Tessellation> {
    let fc: FeatureCollection =
        serde_json::from_str(text).map_err(|e| Error::parse("<tessellation>", e))?;
    if fc.kind != "FeatureCollection" {
        return Err(Error::Schema(format!(
            "expected FeatureCollection, got `{}`",
            fc.kind
        )));
    }
    let to_plane: Box<dyn Fn(f64, f64) -> Location> = match fc.crs.as_str() {
        "planar-km" => Box::new(Location::new),
        "wgs84" => {
            let (lat0, lon0) = match (fc.ref_lat, fc.ref_lon) {
                (Some(lat), Some(lon)) => (lat, lon),
                _ => data_midpoint(&fc.features)?,
            };
            let proj = Projection::new(lat0, lon0);
            Box::new(move |lon, lat| proj.project(lon, lat))
        }
        other => {
            return Err(Error::Schema(format!(
                "unknown crs `{other}` (expected `planar-km` or `wgs84`)"
            )))
        }
    };

    let mut regions = Vec::with_capacity(fc.features.len());
    for f in &fc.features {
        if f.kind != "Feature" {
            return Err(Error::Schema(format!(
                "region `{}`: expected Feature, got `{}`",
                f.properties.region_id, f.kind
            )));
        }
        if f.geometry.kind != "Polygon" {
            return Err(Error::Schema(format!(
                "region `{}`: expected Polygon geometry, got `{}`",
                f.properties.region_id, f.geometry.kind
            )));
        }
        let mut rings = f
            .geometry
            .coordinates
            .iter()
            .map(|ring| ring.iter().map(|&[a, b]| to_plane(a, b)).collect::<Vec<_>>());
        let exterior = rings.next().ok_or_else(|| {
            Error::Schema(format!(
                "region `{}`: polygon has no rings",
                f.properties.region_id
            ))
        })?;
        let polygon = Polygon::new(exterior, rings.collect()).map_err(|e| {
            Error::InvalidGeometry(format!("region `{}`: {e}", f.properties.region_id))
        })?;
        regions.push((f.properties.region_id.clone(), polygon));
    }
    Tessellation::new(regions)
}

fn data_midpoint(features: &[Feature]) -> Result<(f64, f64)> {
    let mut lon = (f64::INFINITY, f64::NEG_INFINITY);
    let mut lat = (f64::INFINITY, f64::NEG_INFINITY);
    for f in features {
        for ring in &f.geometry.coordinates {
            for &[x, y] in ring {
                lon = (lon.0.min(x), lon.1.max(x));
                lat = (lat.0.min(y), lat.1.max(y));
            }
        }
    }
    if !lon.0.is_finite() || !lat.0.is_finite() {
        return Err(Error::Schema(
            "wgs84 collection has no coordinates to derive a reference point from".into(),
        ));
    }
    Ok((0.5 * (lat.0 + lat.1), 0.5 * (lon.0 + lon.1)))
}
