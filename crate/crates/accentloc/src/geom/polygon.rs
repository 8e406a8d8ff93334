use serde::Serialize;

use super::location::{BBox, Location};
use crate::error::{Error, Result};

/// Points within this distance of a ring edge count as boundary points.
/// Coordinates are kilometres, so this is one micrometre.
const BOUNDARY_EPS_KM: f64 = 1e-9;

/// A simple polygon with optional holes, in planar km coordinates.
///
/// Rings are stored closed (first vertex repeated at the end). The
/// constructor closes open rings, and rejects rings with fewer than three
/// distinct vertices, self-intersecting rings, non-finite coordinates,
/// and exteriors with zero area. Containment is boundary-inclusive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polygon {
    exterior: Vec<Location>,
    holes: Vec<Vec<Location>>,
    #[serde(skip)]
    bbox: BBox,
}

impl Polygon {
    pub fn new(exterior: Vec<Location>, holes: Vec<Vec<Location>>) -> Result<Self> {
        let exterior = normalize_ring(exterior, "exterior")?;
        let holes = holes
            .into_iter()
            .enumerate()
            .map(|(i, ring)| normalize_ring(ring, &format!("hole {i}")))
            .collect::<Result<Vec<_>>>()?;
        if ring_area(&exterior) <= 0.0 {
            return Err(Error::InvalidGeometry(
                "exterior ring has zero area".into(),
            ));
        }
        let bbox = BBox::of_points(&exterior).expect("ring is non-empty");
        Ok(Polygon {
            exterior,
            holes,
            bbox,
        })
    }

    /// Axis-aligned rectangle, a common special case in tessellations.
    pub fn rectangle(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Result<Self> {
        Polygon::new(
            vec![
                Location::new(min_x, min_y),
                Location::new(max_x, min_y),
                Location::new(max_x, max_y),
                Location::new(min_x, max_y),
            ],
            vec![],
        )
    }

    /// Closed exterior ring (first vertex == last vertex).
    pub fn exterior(&self) -> &[Location] {
        &self.exterior
    }

    pub fn holes(&self) -> &[Vec<Location>] {
        &self.holes
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    /// Signed-area magnitude of the exterior minus the holes, in km².
    pub fn area(&self) -> f64 {
        ring_area(&self.exterior) - self.holes.iter().map(|h| ring_area(h)).sum::<f64>()
    }

    /// Boundary-inclusive containment.
    pub fn contains(&self, p: Location) -> bool {
        if !self.bbox.contains(p) {
            return false;
        }
        if self.on_boundary(p) {
            return true;
        }
        self.strictly_inside(p)
    }

    /// Containment excluding the boundary, used for overlap estimation.
    pub fn contains_interior(&self, p: Location) -> bool {
        self.bbox.contains(p) && !self.on_boundary(p) && self.strictly_inside(p)
    }

    /// True when `p` lies within [`BOUNDARY_EPS_KM`] of any ring edge.
    pub fn on_boundary(&self, p: Location) -> bool {
        on_ring_boundary(&self.exterior, p)
            || self.holes.iter().any(|h| on_ring_boundary(h, p))
    }

    /// Even-odd crossing test over all rings; assumes `p` is off-boundary.
    fn strictly_inside(&self, p: Location) -> bool {
        let mut inside = ray_crossings_odd(&self.exterior, p);
        for hole in &self.holes {
            if ray_crossings_odd(hole, p) {
                inside = !inside;
            }
        }
        inside
    }
}

/// Close the ring if necessary and validate its shape.
fn normalize_ring(mut ring: Vec<Location>, what: &str) -> Result<Vec<Location>> {
    for v in &ring {
        if !v.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "{what} ring contains a non-finite coordinate"
            )));
        }
    }
    if ring.len() >= 2 && ring.first() == ring.last() {
        ring.pop();
    }
    if ring.len() < 3 {
        return Err(Error::InvalidGeometry(format!(
            "{what} ring needs at least 3 distinct vertices, got {}",
            ring.len()
        )));
    }
    if has_self_intersection(&ring) {
        return Err(Error::InvalidGeometry(format!(
            "{what} ring is self-intersecting"
        )));
    }
    let first = ring[0];
    ring.push(first);
    Ok(ring)
}

/// Absolute shoelace area of a closed ring.
fn ring_area(ring: &[Location]) -> f64 {
    let mut acc = 0.0;
    for w in ring.windows(2) {
        acc += w[0].x * w[1].y - w[1].x * w[0].y;
    }
    0.5 * acc.abs()
}

fn on_ring_boundary(ring: &[Location], p: Location) -> bool {
    ring.windows(2)
        .any(|w| point_segment_distance(p, w[0], w[1]) <= BOUNDARY_EPS_KM)
}

fn point_segment_distance(p: Location, a: Location, b: Location) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance_to(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance_to(Location::new(a.x + t * dx, a.y + t * dy))
}

/// W. Randolph Franklin's even-odd crossing count for one ring
/// (open representation: `ring` is closed, windows give its edges).
fn ray_crossings_odd(ring: &[Location], p: Location) -> bool {
    let mut inside = false;
    for w in ring.windows(2) {
        let (a, b) = (w[0], w[1]);
        if (a.y > p.y) != (b.y > p.y) {
            let x_int = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_int {
                inside = !inside;
            }
        }
    }
    inside
}

/// Check an OPEN ring (no repeated last vertex) for self-intersection:
/// any contact between non-adjacent edges, or adjacent edges meeting
/// anywhere but their shared vertex.
fn has_self_intersection(ring: &[Location]) -> bool {
    let n = ring.len();
    let edge = |i: usize| (ring[i], ring[(i + 1) % n]);
    for i in 0..n {
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (a1, a2) = edge(i);
            let (b1, b2) = edge(j);
            if adjacent {
                // Shared vertex is legitimate; anything more is not.
                let shared = if j == i + 1 { a2 } else { a1 };
                if segment_contact_beyond_vertex(a1, a2, b1, b2, shared) {
                    return true;
                }
            } else if segments_intersect(a1, a2, b1, b2) {
                return true;
            }
        }
    }
    false
}

fn cross(o: Location, a: Location, b: Location) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn on_segment(p: Location, a: Location, b: Location) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test (touching counts).
fn segments_intersect(a1: Location, a2: Location, b1: Location, b2: Location) -> bool {
    let d1 = cross(b1, b2, a1);
    let d2 = cross(b1, b2, a2);
    let d3 = cross(a1, a2, b1);
    let d4 = cross(a1, a2, b2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(a1, b1, b2))
        || (d2 == 0.0 && on_segment(a2, b1, b2))
        || (d3 == 0.0 && on_segment(b1, a1, a2))
        || (d4 == 0.0 && on_segment(b2, a1, a2))
}

/// For adjacent edges sharing `shared`: detect overlap past the vertex
/// (collinear spikes and folded edges).
fn segment_contact_beyond_vertex(
    a1: Location,
    a2: Location,
    b1: Location,
    b2: Location,
    shared: Location,
) -> bool {
    if !segments_intersect(a1, a2, b1, b2) {
        return false;
    }
    // Collinear adjacent edges: intersection is a segment iff they overlap
    // beyond the shared point. Test each endpoint other than `shared` for
    // membership in the other edge.
    for (p, s1, s2) in [(a1, b1, b2), (a2, b1, b2), (b1, a1, a2), (b2, a1, a2)] {
        if p != shared && cross(s1, s2, p) == 0.0 && on_segment(p, s1, s2) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Polygon {
        Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn contains_interior_boundary_outside() {
        let p = unit_square();
        assert!(p.contains(Location::new(0.5, 0.5)));
        assert!(p.contains(Location::new(0.0, 0.5))); // boundary inclusive
        assert!(!p.contains(Location::new(1.5, 0.5)));
        assert!(!p.contains_interior(Location::new(0.0, 0.5)));
    }

    #[test]
    fn area_with_hole() {
        let p = Polygon::new(
            vec![
                Location::new(0.0, 0.0),
                Location::new(4.0, 0.0),
                Location::new(4.0, 4.0),
                Location::new(0.0, 4.0),
            ],
            vec![vec![
                Location::new(1.0, 1.0),
                Location::new(2.0, 1.0),
                Location::new(2.0, 2.0),
                Location::new(1.0, 2.0),
            ]],
        )
        .unwrap();
        assert!((p.area() - 15.0).abs() < 1e-12);
        assert!(!p.contains_interior(Location::new(1.5, 1.5)));
        assert!(p.contains(Location::new(1.0, 1.5))); // hole boundary
    }

    #[test]
    fn rejects_bowtie() {
        let r = Polygon::new(
            vec![
                Location::new(0.0, 0.0),
                Location::new(1.0, 1.0),
                Location::new(1.0, 0.0),
                Location::new(0.0, 1.0),
            ],
            vec![],
        );
        assert!(matches!(r, Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn rejects_degenerate_and_nonfinite() {
        assert!(Polygon::new(
            vec![Location::new(0.0, 0.0), Location::new(1.0, 0.0)],
            vec![]
        )
        .is_err());
        assert!(Polygon::new(
            vec![
                Location::new(0.0, 0.0),
                Location::new(1.0, f64::NAN),
                Location::new(1.0, 1.0)
            ],
            vec![]
        )
        .is_err());
        // zero area: three collinear points
        assert!(Polygon::new(
            vec![
                Location::new(0.0, 0.0),
                Location::new(1.0, 0.0),
                Location::new(2.0, 0.0)
            ],
            vec![]
        )
        .is_err());
    }

    #[test]
    fn closes_open_rings() {
        let p = unit_square();
        assert_eq!(p.exterior().first(), p.exterior().last());
        assert_eq!(p.exterior().len(), 5);
    }
}
