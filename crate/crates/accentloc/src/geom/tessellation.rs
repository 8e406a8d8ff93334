use super::location::{BBox, Location};
use super::polygon::Polygon;
use crate::error::{Error, Result};

/// Sampling resolution (per axis) for the pairwise overlap estimate.
const OVERLAP_SAMPLES_PER_AXIS: usize = 32;

/// A set of named, non-overlapping regions covering the evaluation area.
///
/// Region ids are unique; iteration and point queries are deterministic.
/// Points on shared boundaries resolve to the region with the
/// lexicographically smallest id.
#[derive(Debug, Clone)]
pub struct Tessellation {
    /// Sorted by id.
    regions: Vec<(String, Polygon)>,
    bbox: BBox,
    index: RegionIndex,
}

impl Tessellation {
    /// Build with the default overlap tolerance of 1e-9 × total area.
    pub fn new(regions: Vec<(String, Polygon)>) -> Result<Self> {
        let total: f64 = regions.iter().map(|(_, p)| p.area()).sum();
        Self::with_overlap_tolerance(regions, 1e-9 * total)
    }

    /// Build, rejecting any region pair whose estimated interior overlap
    /// area exceeds `tolerance` (km²). The estimate samples the bounding
    /// box shared by a pair on a 32×32 grid, so overlaps thinner than the
    /// sampling resolution pass; shared edges always pass.
    pub fn with_overlap_tolerance(
        mut regions: Vec<(String, Polygon)>,
        tolerance: f64,
    ) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::InvalidGeometry("tessellation has no regions".into()));
        }
        regions.sort_by(|a, b| a.0.cmp(&b.0));
        for w in regions.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidGeometry(format!(
                    "duplicate region id `{}`",
                    w[0].0
                )));
            }
        }
        for i in 0..regions.len() {
            for j in (i + 1)..regions.len() {
                let (ia, ib) = (&regions[i], &regions[j]);
                let overlap = estimate_interior_overlap(&ia.1, &ib.1);
                if overlap > tolerance {
                    return Err(Error::InvalidGeometry(format!(
                        "regions `{}` and `{}` overlap by ≈{overlap:.3e} km²",
                        ia.0, ib.0
                    )));
                }
            }
        }
        let bbox = regions
            .iter()
            .map(|(_, p)| p.bbox())
            .reduce(|a, b| a.union(&b))
            .expect("non-empty");
        let index = RegionIndex::build(&regions, bbox);
        Ok(Tessellation {
            regions,
            bbox,
            index,
        })
    }

    /// Regions in id order.
    pub fn regions(&self) -> impl Iterator<Item = (&str, &Polygon)> {
        self.regions.iter().map(|(id, p)| (id.as_str(), p))
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    pub fn region_ids(&self) -> impl Iterator<Item = &str> {
        self.regions.iter().map(|(id, _)| id.as_str())
    }

    /// The region containing `loc`, or `None` outside the cover.
    /// Boundary points go to the lexicographically smallest id.
    pub fn point_in_region(&self, loc: Location) -> Option<&str> {
        self.point_in_region_index(loc)
            .map(|idx| self.regions[idx].0.as_str())
    }

    /// Index into the id-sorted region list, for mass accumulation.
    pub(crate) fn point_in_region_index(&self, loc: Location) -> Option<usize> {
        self.index
            .candidates(loc)?
            .iter()
            .copied()
            .find(|&idx| self.regions[idx].1.contains(loc))
    }
}

/// Estimate the interior overlap area of two polygons by sampling the
/// intersection of their bounding boxes. Boundary contact contributes
/// nothing (interior-only containment).
pub fn estimate_interior_overlap(a: &Polygon, b: &Polygon) -> f64 {
    let Some(common) = a.bbox().intersection(&b.bbox()) else {
        return 0.0;
    };
    if common.width() <= 0.0 || common.height() <= 0.0 {
        return 0.0;
    }
    let n = OVERLAP_SAMPLES_PER_AXIS;
    let (dx, dy) = (common.width() / n as f64, common.height() / n as f64);
    let mut hits = 0usize;
    for j in 0..n {
        let y = common.min_y + (j as f64 + 0.5) * dy;
        for i in 0..n {
            let p = Location::new(common.min_x + (i as f64 + 0.5) * dx, y);
            if a.contains_interior(p) && b.contains_interior(p) {
                hits += 1;
            }
        }
    }
    common.area() * hits as f64 / (n * n) as f64
}

/// Coarse uniform grid mapping a query point to the regions whose
/// bounding boxes cover it, in id order.
#[derive(Debug, Clone)]
struct RegionIndex {
    bbox: BBox,
    cols: usize,
    rows: usize,
    /// Region indices (into the sorted region vec) per coarse cell.
    cells: Vec<Vec<usize>>,
}

impl RegionIndex {
    fn build(regions: &[(String, Polygon)], bbox: BBox) -> Self {
        let side = ((2 * regions.len()) as f64).sqrt().ceil() as usize;
        let cols = side.clamp(1, 96);
        let rows = cols;
        let mut cells = vec![Vec::new(); cols * rows];
        let w = bbox.width().max(f64::MIN_POSITIVE);
        let h = bbox.height().max(f64::MIN_POSITIVE);
        for (idx, (_, poly)) in regions.iter().enumerate() {
            let rb = poly.bbox();
            let i0 = (((rb.min_x - bbox.min_x) / w * cols as f64).floor() as isize)
                .clamp(0, cols as isize - 1) as usize;
            let i1 = (((rb.max_x - bbox.min_x) / w * cols as f64).floor() as isize)
                .clamp(0, cols as isize - 1) as usize;
            let j0 = (((rb.min_y - bbox.min_y) / h * rows as f64).floor() as isize)
                .clamp(0, rows as isize - 1) as usize;
            let j1 = (((rb.max_y - bbox.min_y) / h * rows as f64).floor() as isize)
                .clamp(0, rows as isize - 1) as usize;
            for j in j0..=j1 {
                for i in i0..=i1 {
                    cells[j * cols + i].push(idx);
                }
            }
        }
        // Region indices are pushed in ascending order, so each cell's
        // candidate list is already sorted by id.
        RegionIndex {
            bbox,
            cols,
            rows,
            cells,
        }
    }

    fn candidates(&self, loc: Location) -> Option<&[usize]> {
        if !self.bbox.contains(loc) {
            return None;
        }
        let w = self.bbox.width().max(f64::MIN_POSITIVE);
        let h = self.bbox.height().max(f64::MIN_POSITIVE);
        let i = (((loc.x - self.bbox.min_x) / w * self.cols as f64).floor() as isize)
            .clamp(0, self.cols as isize - 1) as usize;
        let j = (((loc.y - self.bbox.min_y) / h * self.rows as f64).floor() as isize)
            .clamp(0, self.rows as isize - 1) as usize;
        Some(&self.cells[j * self.cols + i])
    }
}
