//! Spatial probability densities in three representations, with
//! normalization, moments, region integration, Bayes composition, and
//! seeded sampling.
//!
//! The three representations are a weighted point set ([`DeltaSet`]), a
//! raster ([`GridDensity`]), and a Gaussian mixture ([`GaussianMixture`]).
//! Operations that need spatial structure on a mixture (integration,
//! aggregation, posteriors) go through rasterization at a configurable
//! resolution, so there is a single quadrature path to reason about.

mod delta;
mod discrete;
mod grid;
mod gmm;

use std::fs;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use delta::{DeltaSet, WeightedPoint};
pub use discrete::{DiscreteDistribution, MASS_TOLERANCE};
pub use gmm::{Cov2, GaussianComponent, GaussianMixture};
pub use grid::GridDensity;

use crate::error::{Error, Result};
use crate::geom::{BBox, Location, Polygon, Tessellation};

/// How Gaussian mixtures are turned into rasters when an operation needs
/// a grid: resolution, and how many max-stds around each component the
/// automatic bounding box extends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterOptions {
    pub nx: usize,
    pub ny: usize,
    pub sigma_radius: f64,
}

impl Default for RasterOptions {
    fn default() -> Self {
        RasterOptions {
            nx: 512,
            ny: 512,
            sigma_radius: 4.0,
        }
    }
}

impl RasterOptions {
    pub fn with_resolution(nx: usize, ny: usize) -> Self {
        RasterOptions {
            nx,
            ny,
            ..Default::default()
        }
    }
}

/// Controls for region integration and tessellation aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateOptions {
    /// Subcell sampling per grid-cell axis (default 4, i.e. 4×4 centers).
    pub subcells: usize,
    /// Fold outside-tessellation mass proportionally into the regions.
    pub renormalize: bool,
    pub raster: RasterOptions,
}

impl Default for AggregateOptions {
    fn default() -> Self {
        AggregateOptions {
            subcells: 4,
            renormalize: false,
            raster: RasterOptions::default(),
        }
    }
}

/// Mode search controls for mixtures: argmax over a dense evaluation
/// grid, then gradient-free local refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSearch {
    pub nx: usize,
    pub ny: usize,
    pub refine_steps: usize,
    pub sigma_radius: f64,
}

impl Default for ModeSearch {
    fn default() -> Self {
        ModeSearch {
            nx: 512,
            ny: 512,
            refine_steps: 20,
            sigma_radius: 4.0,
        }
    }
}

/// A probability density over planar locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SpatialDensity {
    Delta(DeltaSet),
    Grid(GridDensity),
    Gmm(GaussianMixture),
}

impl SpatialDensity {
    /// Unit-mass atom at a single location.
    pub fn delta_at(location: Location) -> Self {
        SpatialDensity::Delta(DeltaSet::singleton(location))
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            SpatialDensity::Delta(d) => d.total_weight(),
            SpatialDensity::Grid(g) => g.total_mass(),
            SpatialDensity::Gmm(m) => m.total_weight(),
        }
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= MASS_TOLERANCE
    }

    /// Scale to unit total mass, keeping the representation.
    pub fn normalize(&self) -> Result<Self> {
        Ok(match self {
            SpatialDensity::Delta(d) => SpatialDensity::Delta(d.normalize()?),
            SpatialDensity::Grid(g) => SpatialDensity::Grid(g.normalize()?),
            SpatialDensity::Gmm(m) => SpatialDensity::Gmm(m.normalize()?),
        })
    }

    /// Almost-everywhere density value. Delta sets carry their mass on
    /// atoms, so their pointwise value is 0.
    pub fn pdf(&self, at: Location) -> f64 {
        match self {
            SpatialDensity::Delta(_) => 0.0,
            SpatialDensity::Grid(g) => g.pdf(at),
            SpatialDensity::Gmm(m) => m.pdf(at),
        }
    }

    /// Probability-weighted centroid. Expects a normalized density (the
    /// result is scale-invariant regardless).
    pub fn mean(&self) -> Location {
        match self {
            SpatialDensity::Delta(d) => d.mean(),
            SpatialDensity::Grid(g) => g.mean(),
            SpatialDensity::Gmm(m) => m.mean(),
        }
    }

    pub fn mode(&self) -> Location {
        self.mode_with(&ModeSearch::default())
    }

    /// Location of the highest mode. Delta: heaviest atom; grid: heaviest
    /// cell center; mixture: dense-grid argmax refined by compass search.
    /// Ties break to the lexicographically smallest (x, y).
    pub fn mode_with(&self, search: &ModeSearch) -> Location {
        match self {
            SpatialDensity::Delta(d) => d.mode(),
            SpatialDensity::Grid(g) => g.mode(),
            SpatialDensity::Gmm(m) => gmm_mode(m, search),
        }
    }

    /// Probability mass inside a polygon (expects a normalized density).
    pub fn integrate_region(&self, poly: &Polygon) -> f64 {
        self.integrate_region_with(poly, &AggregateOptions::default())
    }

    pub fn integrate_region_with(&self, poly: &Polygon, opts: &AggregateOptions) -> f64 {
        match self {
            SpatialDensity::Delta(d) => d
                .points()
                .iter()
                .filter(|p| poly.contains(p.location))
                .map(|p| p.weight)
                .sum(),
            SpatialDensity::Grid(g) => integrate_grid_region(g, poly, opts.subcells),
            SpatialDensity::Gmm(m) => {
                let raster = rasterize_gmm(m, &opts.raster);
                integrate_grid_region(&raster, poly, opts.subcells)
            }
        }
    }

    /// Discretize onto a tessellation (expects a normalized density).
    ///
    /// Every atom or subcell sample is assigned to at most one region via
    /// the tessellation's tie-broken point query, so the entries plus the
    /// outside mass balance exactly.
    pub fn aggregate(&self, tess: &Tessellation) -> DiscreteDistribution {
        self.aggregate_with(tess, &AggregateOptions::default())
            .expect("aggregate without renormalize cannot fail")
    }

    pub fn aggregate_with(
        &self,
        tess: &Tessellation,
        opts: &AggregateOptions,
    ) -> Result<DiscreteDistribution> {
        let mut masses = vec![0.0f64; tess.len()];
        match self {
            SpatialDensity::Delta(d) => {
                for p in d.points() {
                    if let Some(idx) = tess.point_in_region_index(p.location) {
                        masses[idx] += p.weight;
                    }
                }
            }
            SpatialDensity::Grid(g) => accumulate_grid(g, tess, opts.subcells, &mut masses),
            SpatialDensity::Gmm(m) => {
                let raster = rasterize_gmm(m, &opts.raster);
                accumulate_grid(&raster, tess, opts.subcells, &mut masses);
            }
        }
        let inside: f64 = masses.iter().sum();
        let entries = tess
            .region_ids()
            .map(String::from)
            .zip(masses)
            .collect();
        let dist =
            DiscreteDistribution::from_parts_unchecked(entries, (1.0 - inside).max(0.0));
        if opts.renormalize {
            dist.renormalized_inside()
        } else {
            Ok(dist)
        }
    }

    /// Raster representation on the density's natural bounding box.
    pub fn rasterize(&self, opts: &RasterOptions) -> Result<GridDensity> {
        let bbox = match self {
            SpatialDensity::Delta(d) => {
                let b = BBox::of_points(d.points().iter().map(|p| &p.location))
                    .expect("delta set is non-empty");
                let pad = (0.05 * b.width().max(b.height())).max(0.5);
                b.padded(pad)
            }
            SpatialDensity::Grid(g) => g.bbox(),
            SpatialDensity::Gmm(m) => m.auto_bbox(opts.sigma_radius),
        };
        self.rasterize_onto(bbox, opts.nx, opts.ny)
    }

    /// Raster representation on a caller-chosen grid. Mass outside the
    /// box is clipped, not folded back in.
    pub fn rasterize_onto(&self, bbox: BBox, nx: usize, ny: usize) -> Result<GridDensity> {
        match self {
            SpatialDensity::Delta(d) => {
                let proto = GridDensity::new(bbox, nx, ny, vec![0.0; nx * ny])?;
                let mut values = vec![0.0; nx * ny];
                let cell_area = proto.cell_area();
                for p in d.points() {
                    if let Some((i, j)) = proto.locate(p.location) {
                        values[j * nx + i] += p.weight / cell_area;
                    }
                }
                GridDensity::new(bbox, nx, ny, values)
            }
            SpatialDensity::Grid(g) => GridDensity::from_fn(bbox, nx, ny, |c| g.pdf(c)),
            SpatialDensity::Gmm(m) => GridDensity::from_fn(bbox, nx, ny, |c| m.pdf(c)),
        }
    }

    /// `n` i.i.d. draws, deterministic for a given seed.
    ///
    /// # Panics
    ///
    /// Panics if the density has zero total mass (it cannot be a
    /// probability distribution); normalize first.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<Location> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(n, &mut rng)
    }

    /// Like [`sample`](Self::sample), drawing from a caller-owned
    /// generator.
    pub fn sample_with<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<Location> {
        match self {
            SpatialDensity::Delta(d) => {
                let pick = WeightedIndex::new(d.points().iter().map(|p| p.weight))
                    .expect("delta set with positive mass");
                (0..n)
                    .map(|_| d.points()[pick.sample(rng)].location)
                    .collect()
            }
            SpatialDensity::Grid(g) => {
                let pick = WeightedIndex::new(g.values().iter().copied())
                    .expect("grid with positive mass");
                let (dx, dy) = (g.cell_width(), g.cell_height());
                (0..n)
                    .map(|_| {
                        let cell = pick.sample(rng);
                        let (i, j) = (cell % g.nx(), cell / g.nx());
                        let u: f64 = rng.random();
                        let v: f64 = rng.random();
                        Location::new(
                            g.bbox().min_x + (i as f64 + u) * dx,
                            g.bbox().min_y + (j as f64 + v) * dy,
                        )
                    })
                    .collect()
            }
            SpatialDensity::Gmm(m) => {
                let pick = WeightedIndex::new(m.components().iter().map(|c| c.weight))
                    .expect("mixture with positive mass");
                (0..n)
                    .map(|_| {
                        let c = &m.components()[pick.sample(rng)];
                        let (l11, l21, l22) = c.cov.cholesky();
                        let z1: f64 = rng.sample(rand_distr::StandardNormal);
                        let z2: f64 = rng.sample(rand_distr::StandardNormal);
                        Location::new(
                            c.mean.x + l11 * z1,
                            c.mean.y + l21 * z1 + l22 * z2,
                        )
                    })
                    .collect()
            }
        }
    }
}

/// Bayes composition: pointwise product of a non-negative likelihood grid
/// with a prior, renormalized on the likelihood's grid. The evidence term
/// is exactly the normalizer that gets divided out.
pub fn posterior(likelihood: &GridDensity, prior: &SpatialDensity) -> Result<GridDensity> {
    let prior_raster = prior.rasterize_onto(likelihood.bbox(), likelihood.nx(), likelihood.ny())?;
    prior_raster.product_normalized(likelihood)
}

/// Combine normalized densities into one with the given non-negative
/// part weights. Homogeneous delta or mixture parts stay in their
/// representation; anything else is rasterized onto a shared grid.
pub fn mixture(parts: &[(SpatialDensity, f64)], raster: &RasterOptions) -> Result<SpatialDensity> {
    if parts.is_empty() {
        return Err(Error::DegenerateDensity("mixture of no parts".into()));
    }
    for (_, w) in parts {
        if !(w.is_finite() && *w >= 0.0) {
            return Err(Error::DegenerateDensity(format!(
                "mixture part weight must be finite and ≥ 0, got {w}"
            )));
        }
    }
    let total: f64 = parts.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return Err(Error::DegenerateDensity(
            "mixture part weights sum to zero".into(),
        ));
    }

    if parts
        .iter()
        .all(|(p, _)| matches!(p, SpatialDensity::Delta(_)))
    {
        let mut atoms = Vec::new();
        for (part, w) in parts {
            let SpatialDensity::Delta(d) = part.normalize()? else {
                unreachable!()
            };
            atoms.extend(d.points().iter().map(|p| WeightedPoint {
                location: p.location,
                weight: p.weight * w / total,
            }));
        }
        return Ok(SpatialDensity::Delta(DeltaSet::new(atoms)?));
    }

    if parts
        .iter()
        .all(|(p, _)| matches!(p, SpatialDensity::Gmm(_)))
    {
        let mut comps = Vec::new();
        for (part, w) in parts {
            let SpatialDensity::Gmm(m) = part.normalize()? else {
                unreachable!()
            };
            comps.extend(m.components().iter().map(|c| GaussianComponent {
                weight: c.weight * w / total,
                ..*c
            }));
        }
        return Ok(SpatialDensity::Gmm(GaussianMixture::new(comps)?));
    }

    // Mixed representations: sum on a shared raster.
    let mut bbox: Option<BBox> = None;
    for (part, _) in parts {
        let b = part.rasterize(raster)?.bbox();
        bbox = Some(match bbox {
            Some(acc) => acc.union(&b),
            None => b,
        });
    }
    let bbox = bbox.expect("non-empty parts");
    let mut values = vec![0.0; raster.nx * raster.ny];
    for (part, w) in parts {
        let r = part.normalize()?.rasterize_onto(bbox, raster.nx, raster.ny)?;
        for (acc, v) in values.iter_mut().zip(r.values()) {
            *acc += w / total * v;
        }
    }
    let grid = GridDensity::new(bbox, raster.nx, raster.ny, values)?;
    Ok(SpatialDensity::Grid(grid.normalize()?))
}

/// Subcell-center quadrature of a grid over a polygon.
fn integrate_grid_region(g: &GridDensity, poly: &Polygon, subcells: usize) -> f64 {
    let sub = subcells.max(1);
    let pb = poly.bbox();
    let Some((i0, i1, j0, j1)) = cell_range(g, pb) else {
        return 0.0;
    };
    let sub_mass = g.cell_area() / (sub * sub) as f64;
    let (dx, dy) = (g.cell_width() / sub as f64, g.cell_height() / sub as f64);
    let mut acc = 0.0;
    for j in j0..=j1 {
        for i in i0..=i1 {
            let v = g.value(i, j);
            if v == 0.0 {
                continue;
            }
            let x0 = g.bbox().min_x + i as f64 * g.cell_width();
            let y0 = g.bbox().min_y + j as f64 * g.cell_height();
            for sj in 0..sub {
                for si in 0..sub {
                    let p = Location::new(
                        x0 + (si as f64 + 0.5) * dx,
                        y0 + (sj as f64 + 0.5) * dy,
                    );
                    if poly.contains(p) {
                        acc += v * sub_mass;
                    }
                }
            }
        }
    }
    acc
}

/// Assign every subcell sample of a grid to a region (or outside).
fn accumulate_grid(g: &GridDensity, tess: &Tessellation, subcells: usize, masses: &mut [f64]) {
    let sub = subcells.max(1);
    let sub_mass = g.cell_area() / (sub * sub) as f64;
    let (dx, dy) = (g.cell_width() / sub as f64, g.cell_height() / sub as f64);
    for j in 0..g.ny() {
        let y0 = g.bbox().min_y + j as f64 * g.cell_height();
        for i in 0..g.nx() {
            let v = g.value(i, j);
            if v == 0.0 {
                continue;
            }
            let x0 = g.bbox().min_x + i as f64 * g.cell_width();
            for sj in 0..sub {
                for si in 0..sub {
                    let p = Location::new(
                        x0 + (si as f64 + 0.5) * dx,
                        y0 + (sj as f64 + 0.5) * dy,
                    );
                    if let Some(idx) = tess.point_in_region_index(p) {
                        masses[idx] += v * sub_mass;
                    }
                }
            }
        }
    }
}

/// Grid-cell index range overlapping a bounding box, or None when
/// disjoint from the grid.
fn cell_range(g: &GridDensity, b: BBox) -> Option<(usize, usize, usize, usize)> {
    let gb = g.bbox();
    if b.max_x < gb.min_x || b.min_x > gb.max_x || b.max_y < gb.min_y || b.min_y > gb.max_y {
        return None;
    }
    let clampi = |v: f64, n: usize| (v.floor() as isize).clamp(0, n as isize - 1) as usize;
    let i0 = clampi((b.min_x - gb.min_x) / g.cell_width(), g.nx());
    let i1 = clampi((b.max_x - gb.min_x) / g.cell_width(), g.nx());
    let j0 = clampi((b.min_y - gb.min_y) / g.cell_height(), g.ny());
    let j1 = clampi((b.max_y - gb.min_y) / g.cell_height(), g.ny());
    Some((i0, i1, j0, j1))
}

fn rasterize_gmm(m: &GaussianMixture, opts: &RasterOptions) -> GridDensity {
    let bbox = m.auto_bbox(opts.sigma_radius);
    GridDensity::from_fn(bbox, opts.nx, opts.ny, |c| m.pdf(c))
        .expect("gaussian pdf values are finite and non-negative")
}

fn gmm_mode(m: &GaussianMixture, search: &ModeSearch) -> Location {
    let bbox = m.auto_bbox(search.sigma_radius);
    let (nx, ny) = (search.nx.max(1), search.ny.max(1));
    let (dx, dy) = (bbox.width() / nx as f64, bbox.height() / ny as f64);
    let mut best = Location::new(f64::NAN, f64::NAN);
    let mut best_v = f64::NEG_INFINITY;
    for j in 0..ny {
        for i in 0..nx {
            let c = Location::new(
                bbox.min_x + (i as f64 + 0.5) * dx,
                bbox.min_y + (j as f64 + 0.5) * dy,
            );
            let v = m.pdf(c);
            if v > best_v || (v == best_v && c.lex_cmp(&best) == std::cmp::Ordering::Less) {
                best_v = v;
                best = c;
            }
        }
    }
    // Compass refinement: probe the 8 neighbours at the current step,
    // halve the step when no neighbour improves.
    let mut step = dx.max(dy);
    for _ in 0..search.refine_steps {
        let mut improved = false;
        for (ox, oy) in [
            (1.0, 0.0),
            (-1.0, 0.0),
            (0.0, 1.0),
            (0.0, -1.0),
            (1.0, 1.0),
            (1.0, -1.0),
            (-1.0, 1.0),
            (-1.0, -1.0),
        ] {
            let cand = Location::new(best.x + ox * step, best.y + oy * step);
            let v = m.pdf(cand);
            if v > best_v {
                best_v = v;
                best = cand;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

pub fn read_density(path: impl AsRef<Path>) -> Result<SpatialDensity> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path.display(), e))
}

pub fn parse_density(text: &str) -> Result<SpatialDensity> {
    serde_json::from_str(text).map_err(|e| Error::parse("<density>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Polygon;

    fn tess_ab() -> Tessellation {
        Tessellation::new(vec![
            ("A".into(), Polygon::rectangle(0.0, 0.0, 5.0, 5.0).unwrap()),
            ("B".into(), Polygon::rectangle(5.0, 0.0, 10.0, 5.0).unwrap()),
        ])
        .unwrap()
    }

    #[test]
    fn delta_integrate_and_aggregate() {
        let d = SpatialDensity::delta_at(Location::new(2.0, 3.0));
        let square = Polygon::rectangle(0.0, 0.0, 5.0, 5.0).unwrap();
        assert_eq!(d.integrate_region(&square), 1.0);
        let agg = d.aggregate(&tess_ab());
        assert_eq!(agg.prob("A"), 1.0);
        assert_eq!(agg.prob("B"), 0.0);
        assert_eq!(agg.outside_mass(), 0.0);
    }

    #[test]
    fn uniform_grid_split() {
        let g = GridDensity::uniform(BBox::new(0.0, 0.0, 10.0, 5.0), 20, 10).unwrap();
        let d = SpatialDensity::Grid(g);
        let half = Polygon::rectangle(0.0, 0.0, 5.0, 5.0).unwrap();
        assert!((d.integrate_region(&half) - 0.5).abs() < 1e-9);
        let agg = d.aggregate(&tess_ab());
        assert!((agg.prob("A") - 0.5).abs() < 1e-9);
        assert!((agg.prob("B") - 0.5).abs() < 1e-9);
    }

    #[test]
    fn gaussian_halfplane_mass() {
        // σ=1 at (5,5): the plane x ≤ 5 carries exactly half the mass.
        let m = GaussianMixture::single(
            Location::new(5.0, 5.0),
            Cov2::isotropic(1.0).unwrap(),
        );
        let d = SpatialDensity::Gmm(m);
        let west = Polygon::rectangle(0.0, 0.0, 5.0, 10.0).unwrap();
        let got = d.integrate_region(&west);
        assert!((got - 0.5).abs() < 2e-3, "got {got}");
    }

    #[test]
    fn posterior_uniform_likelihood_is_identity() {
        let prior = GridDensity::new(
            BBox::new(0.0, 0.0, 4.0, 4.0),
            4,
            4,
            (1..=16).map(|v| v as f64).collect(),
        )
        .unwrap()
        .normalize()
        .unwrap();
        let like = GridDensity::new(BBox::new(0.0, 0.0, 4.0, 4.0), 4, 4, vec![7.0; 16]).unwrap();
        let post = posterior(&like, &SpatialDensity::Grid(prior.clone())).unwrap();
        for (a, b) in post.values().iter().zip(prior.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn posterior_one_hot_prior_stays_one_hot() {
        let mut values = vec![0.0; 16];
        values[5] = 1.0;
        let prior = GridDensity::new(BBox::new(0.0, 0.0, 4.0, 4.0), 4, 4, values)
            .unwrap()
            .normalize()
            .unwrap();
        let like = GridDensity::from_fn(BBox::new(0.0, 0.0, 4.0, 4.0), 4, 4, |c| {
            1.0 + 0.1 * c.x + 0.2 * c.y
        })
        .unwrap();
        let post = posterior(&like, &SpatialDensity::Grid(prior.clone())).unwrap();
        for (idx, v) in post.values().iter().enumerate() {
            if idx == 5 {
                assert!(*v > 0.0);
            } else {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn posterior_zero_product_errors() {
        let prior = {
            let mut values = vec![0.0; 4];
            values[0] = 1.0;
            GridDensity::new(BBox::new(0.0, 0.0, 2.0, 2.0), 2, 2, values)
                .unwrap()
                .normalize()
                .unwrap()
        };
        let like = {
            let mut values = vec![0.0; 4];
            values[3] = 1.0;
            GridDensity::new(BBox::new(0.0, 0.0, 2.0, 2.0), 2, 2, values).unwrap()
        };
        let r = posterior(&like, &SpatialDensity::Grid(prior));
        assert!(matches!(r, Err(Error::DegenerateDensity(_))));
    }

    #[test]
    fn sample_delta_is_constant() {
        let d = SpatialDensity::delta_at(Location::new(2.0, 3.0));
        let s = d.sample(5, 42);
        assert_eq!(s.len(), 5);
        assert!(s.iter().all(|p| *p == Location::new(2.0, 3.0)));
    }

    #[test]
    fn sample_is_deterministic_per_seed() {
        let g = GridDensity::uniform(BBox::new(0.0, 0.0, 10.0, 10.0), 8, 8).unwrap();
        let d = SpatialDensity::Grid(g);
        assert_eq!(d.sample(100, 7), d.sample(100, 7));
        assert_ne!(d.sample(100, 7), d.sample(100, 8));
    }

    #[test]
    fn mixture_of_deltas_keeps_atoms() {
        let a = SpatialDensity::delta_at(Location::new(0.0, 0.0));
        let b = SpatialDensity::delta_at(Location::new(10.0, 0.0));
        let m = mixture(
            &[(a, 1.0), (b, 1.0)],
            &RasterOptions::default(),
        )
        .unwrap();
        let SpatialDensity::Delta(d) = m else {
            panic!("expected delta mixture")
        };
        assert_eq!(d.points().len(), 2);
        assert!((d.points()[0].weight - 0.5).abs() < 1e-15);
    }

    #[test]
    fn density_json_round_trip() {
        let d = SpatialDensity::Gmm(GaussianMixture::single(
            Location::new(1.0, 2.0),
            Cov2::new(2.0, 0.3, 1.0).unwrap(),
        ));
        let text = serde_json::to_string(&d).unwrap();
        assert!(text.contains("\"type\":\"gmm\""));
        let back: SpatialDensity = serde_json::from_str(&text).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn grid_json_shape() {
        let text = r#"{"type":"grid","bbox":[0,0,10,5],"nx":2,"ny":1,"values":[0.01,0.01]}"#;
        let d = parse_density(text).unwrap();
        assert!((d.total_mass() - 0.5).abs() < 1e-12);
        let bad = r#"{"type":"grid","bbox":[0,0,10,5],"nx":2,"ny":1,"values":[0.01]}"#;
        assert!(parse_density(bad).is_err());
    }
}
