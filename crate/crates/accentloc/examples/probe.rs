// quick probe: worst deviation vs aggregate raster resolution
use accentloc::density::{AggregateOptions, Cov2, GaussianComponent, GaussianMixture, RasterOptions, SpatialDensity};
use accentloc::geom::{Location, Polygon, Tessellation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut regions = Vec::new();
    for i in 0..20 {
        for j in 0..20 {
            regions.push((format!("m{i:02}_{j:02}"),
                Polygon::rectangle(i as f64*5.0, j as f64*5.0, (i+1) as f64*5.0, (j+1) as f64*5.0).unwrap()));
        }
    }
    let tess = Tessellation::new(regions).unwrap();
    for res in [512usize, 768, 1024] {
        for sub in [4usize, 6] {
            let mut rng = ChaCha8Rng::seed_from_u64(50_005);
            let mut worst: f64 = 0.0;
            let t0 = std::time::Instant::now();
            for _ in 0..50 {
                let n_comp = rng.random_range(1..=4);
                let comps: Vec<GaussianComponent> = (0..n_comp).map(|_| {
                    let sx: f64 = rng.random_range(2.0..8.0);
                    let sy: f64 = rng.random_range(2.0..8.0);
                    let rho: f64 = rng.random_range(-0.5..0.5);
                    GaussianComponent {
                        mean: Location::new(rng.random_range(15.0..85.0), rng.random_range(15.0..85.0)),
                        cov: Cov2::new(sx*sx, rho*sx*sy, sy*sy).unwrap(),
                        weight: rng.random_range(0.2..1.0),
                    }
                }).collect();
                let gmm = GaussianMixture::new(comps).unwrap().normalize().unwrap();
                let d = SpatialDensity::Gmm(gmm.clone());
                let opts = AggregateOptions { subcells: sub, renormalize: false, raster: RasterOptions::with_resolution(res, res) };
                let agg = d.aggregate_with(&tess, &opts).unwrap();

                let bbox = gmm.auto_bbox(4.0).union(&tess.bbox());
                let n = 1000usize;
                let (dx, dy) = (bbox.width()/n as f64, bbox.height()/n as f64);
                let cell = dx*dy;
                let mut oracle = vec![0.0f64; 400];
                for j in 0..n {
                    let y = bbox.min_y + (j as f64 + 0.5)*dy;
                    for i in 0..n {
                        let x = bbox.min_x + (i as f64 + 0.5)*dx;
                        if !(0.0..100.0).contains(&x) || !(0.0..100.0).contains(&y) { continue; }
                        let (ri, rj) = ((x/5.0) as usize, (y/5.0) as usize);
                        oracle[ri*20+rj] += gmm.pdf(Location::new(x,y))*cell;
                    }
                }
                for i in 0..20 { for j in 0..20 {
                    let id = format!("m{i:02}_{j:02}");
                    worst = worst.max((agg.prob(&id) - oracle[i*20+j]).abs());
                }}
            }
            println!("raster {res} sub {sub}: worst {worst:.3e}  ({:.1} s)", t0.elapsed().as_secs_f64());
        }
    }
}
