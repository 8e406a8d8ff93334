//! Synthetic cohort generation and participation statistics.
//!
//! Real origin-location corpora are scarce, so this module fabricates
//! one: a population prior over a handful of cities, speakers with
//! residence histories drawn from it, synthetic accent features that are
//! a smooth function of each speaker's origin, and a baseline Bayesian
//! locator that inverts those features back into a posterior density.
//! Every metric in the crate can then be exercised end to end against a
//! known ground truth.
//!
//! The participation side models recruitment after a media event as an
//! exponential decay of the daily recording rate, fitted in log space.

mod decay;

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use decay::{
    fit_decay, parse_series, predict_total, read_series, DayCount, DecayFit,
    ParticipationSeries, TotalPrediction,
};

use crate::density::{self, Cov2, GaussianComponent, GaussianMixture, GridDensity, SpatialDensity};
use crate::error::{Error, Result};
use crate::geom::{Location, Tessellation};
use crate::metrics::{Trial, TrialElement};
use crate::origin::{self, Episode, LocationHistory, SusceptibilityWeight};
use crate::seeding;

/// One population center: a Gaussian blob of residents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CityConfig {
    pub center: Location,
    pub spread_km: f64,
    pub population_weight: f64,
}

/// A population prior: isotropic Gaussian mixture with component weights
/// proportional to city populations.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationModel {
    cities: Vec<CityConfig>,
    prior: SpatialDensity,
}

pub fn build_population(cities: &[CityConfig]) -> Result<PopulationModel> {
    if cities.is_empty() {
        return Err(Error::Schema("population model needs at least one city".into()));
    }
    let mut components = Vec::with_capacity(cities.len());
    for c in cities {
        if !(c.spread_km.is_finite() && c.spread_km > 0.0) {
            return Err(Error::Domain(format!(
                "city spread must be positive, got {}",
                c.spread_km
            )));
        }
        if !(c.population_weight.is_finite() && c.population_weight > 0.0) {
            return Err(Error::Domain(format!(
                "city population weight must be positive, got {}",
                c.population_weight
            )));
        }
        components.push(GaussianComponent {
            mean: c.center,
            cov: Cov2::isotropic(c.spread_km)?,
            weight: c.population_weight,
        });
    }
    let prior = SpatialDensity::Gmm(GaussianMixture::new(components)?.normalize()?);
    Ok(PopulationModel {
        cities: cities.to_vec(),
        prior,
    })
}

impl PopulationModel {
    pub fn cities(&self) -> &[CityConfig] {
        &self.cities
    }

    pub fn prior(&self) -> &SpatialDensity {
        &self.prior
    }
}

/// Fixed sinusoidal embedding of a location: per length scale `s`, the
/// four values sin(x/s), cos(x/s), sin(y/s), cos(y/s).
///
/// Smooth, reproducible, and injective within half the longest period
/// (2π·s ≈ 377 km at the default 60 km scale) — enough at country scale,
/// where the prior suppresses the aliases anyway. Acoustics is out of
/// scope; this stands in for any embedding that varies smoothly with
/// origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMap {
    scales_km: Vec<f64>,
}

impl Default for FeatureMap {
    fn default() -> Self {
        FeatureMap {
            scales_km: vec![60.0, 12.0],
        }
    }
}

impl FeatureMap {
    pub fn new(scales_km: Vec<f64>) -> Result<Self> {
        if scales_km.is_empty()
            || scales_km.iter().any(|s| !(s.is_finite() && *s > 0.0))
        {
            return Err(Error::Domain(
                "feature map needs at least one positive, finite length scale".into(),
            ));
        }
        Ok(FeatureMap { scales_km })
    }

    pub fn dim(&self) -> usize {
        4 * self.scales_km.len()
    }

    pub fn embed(&self, loc: Location) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for s in &self.scales_km {
            out.push((loc.x / s).sin());
            out.push((loc.x / s).cos());
            out.push((loc.y / s).sin());
            out.push((loc.y / s).cos());
        }
        out
    }
}

/// A simulated participant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Speaker {
    pub speaker_id: String,
    pub history: LocationHistory,
    pub features: Vec<f64>,
    /// Cached origin density of the history under the cohort's
    /// susceptibility weight.
    pub true_origin: SpatialDensity,
}

/// Cohort generation controls.
#[derive(Debug, Clone)]
pub struct CohortParams {
    pub n_speakers: usize,
    /// Probability of relocating at each decade boundary of life.
    pub move_prob: f64,
    /// Standard deviation of the Gaussian feature noise.
    pub sigma_f: f64,
    pub feature_map: FeatureMap,
    pub susceptibility: SusceptibilityWeight,
}

impl CohortParams {
    pub fn new(n_speakers: usize, move_prob: f64, sigma_f: f64) -> Result<Self> {
        if n_speakers == 0 {
            return Err(Error::Schema("cohort needs at least one speaker".into()));
        }
        if !(0.0..=1.0).contains(&move_prob) || !move_prob.is_finite() {
            return Err(Error::Domain(format!(
                "move probability must lie in [0, 1], got {move_prob}"
            )));
        }
        if !(sigma_f.is_finite() && sigma_f >= 0.0) {
            return Err(Error::Domain(format!(
                "feature noise must be ≥ 0, got {sigma_f}"
            )));
        }
        Ok(CohortParams {
            n_speakers,
            move_prob,
            sigma_f,
            feature_map: FeatureMap::default(),
            susceptibility: SusceptibilityWeight::default(),
        })
    }
}

/// Generate a cohort. Each speaker gets an independent seed stream
/// derived from `seed` and their index, so cohorts are reproducible and
/// insensitive to generation order.
///
/// Per speaker: birthplace drawn from the prior; at every decade
/// boundary of life a relocation to a fresh prior draw happens with
/// `move_prob`; age is uniform in [18, 80); features are the feature-map
/// embedding of the origin-density mean plus `sigma_f`-scaled Gaussian
/// noise.
pub fn simulate_speakers(
    pop: &PopulationModel,
    params: &CohortParams,
    seed: u64,
) -> Result<Vec<Speaker>> {
    (0..params.n_speakers)
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(seeding::derive_seed(seed, idx as u64));
            let age: f64 = rng.random_range(18.0..80.0);
            let birthplace = pop.prior.sample_with(1, &mut rng)[0];

            let mut episodes = Vec::new();
            let mut start = 0.0;
            let mut place = birthplace;
            let mut boundary = 10.0;
            while boundary < age {
                if rng.random::<f64>() < params.move_prob {
                    episodes.push(Episode::at_point(start, boundary, place)?);
                    start = boundary;
                    place = pop.prior.sample_with(1, &mut rng)[0];
                }
                boundary += 10.0;
            }
            episodes.push(Episode::at_point(start, age, place)?);
            let history = LocationHistory::new(episodes)?;

            let true_origin = origin::origin_density(&history, &params.susceptibility)?;
            let mut features = params.feature_map.embed(true_origin.mean());
            for f in &mut features {
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                *f += params.sigma_f * z;
            }

            Ok(Speaker {
                speaker_id: format!("spk-{idx:05}"),
                history,
                features,
                true_origin,
            })
        })
        .collect()
}

/// Invert features into a posterior over locations: a Gaussian feature
/// likelihood exp(−‖f − φ(x)‖²/2σ²) on a grid over the prior's support,
/// composed with the population prior. The likelihood is evaluated in a
/// max-shifted scale, so small `sigma_f` stays numerically safe.
pub fn baseline_locator(
    features: &[f64],
    pop: &PopulationModel,
    sigma_f: f64,
    feature_map: &FeatureMap,
    grid: (usize, usize),
) -> Result<GridDensity> {
    if !(sigma_f.is_finite() && sigma_f > 0.0) {
        return Err(Error::Domain(format!(
            "locator needs a positive feature noise, got {sigma_f}"
        )));
    }
    if features.len() != feature_map.dim() {
        return Err(Error::Schema(format!(
            "feature vector has dimension {}, feature map expects {}",
            features.len(),
            feature_map.dim()
        )));
    }
    let SpatialDensity::Gmm(prior_gmm) = &pop.prior else {
        unreachable!("population prior is always a mixture")
    };
    let bbox = prior_gmm.auto_bbox(4.0);
    let (nx, ny) = grid;

    // log-likelihood up to a constant
    let proto = GridDensity::new(bbox, nx, ny, vec![0.0; nx * ny])?;
    let mut scores = Vec::with_capacity(nx * ny);
    let inv_two_sigma_sq = 1.0 / (2.0 * sigma_f * sigma_f);
    for j in 0..ny {
        for i in 0..nx {
            let phi = feature_map.embed(proto.cell_center(i, j));
            let sq: f64 = features
                .iter()
                .zip(&phi)
                .map(|(f, p)| (f - p) * (f - p))
                .sum();
            scores.push(-sq * inv_two_sigma_sq);
        }
    }
    let max_score = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let likelihood = GridDensity::new(
        bbox,
        nx,
        ny,
        scores.into_iter().map(|s| (s - max_score).exp()).collect(),
    )?;
    density::posterior(&likelihood, &pop.prior)
}

/// Trials produced from one cohort: density trials pair each speaker's
/// true origin with the locator posterior; with a tessellation, the same
/// pairs aggregated over regions, plus a baseline set whose hypothesis
/// is the aggregated prior (the no-evidence answer).
#[derive(Debug, Clone)]
pub struct TrialSet {
    pub density: Vec<Trial>,
    pub discrete: Vec<Trial>,
    pub discrete_prior: Vec<Trial>,
}

pub fn build_locator_trials(
    speakers: &[Speaker],
    pop: &PopulationModel,
    sigma_f: f64,
    feature_map: &FeatureMap,
    grid: (usize, usize),
    tess: Option<&Tessellation>,
) -> Result<TrialSet> {
    let prior_agg = tess.map(|t| pop.prior.aggregate(t));
    let mut set = TrialSet {
        density: Vec::with_capacity(speakers.len()),
        discrete: Vec::new(),
        discrete_prior: Vec::new(),
    };
    for sp in speakers {
        let post = baseline_locator(&sp.features, pop, sigma_f, feature_map, grid)?;
        let post = SpatialDensity::Grid(post);
        if let (Some(t), Some(prior_agg)) = (tess, prior_agg.as_ref()) {
            let ref_agg = sp.true_origin.aggregate(t);
            set.discrete.push(Trial::new(
                sp.speaker_id.clone(),
                TrialElement::Discrete(ref_agg.clone()),
                TrialElement::Discrete(post.aggregate(t)),
            )?);
            set.discrete_prior.push(Trial::new(
                sp.speaker_id.clone(),
                TrialElement::Discrete(ref_agg),
                TrialElement::Discrete(prior_agg.clone()),
            )?);
        }
        set.density.push(Trial::new(
            sp.speaker_id.clone(),
            TrialElement::Density(sp.true_origin.clone()),
            TrialElement::Density(post),
        )?);
    }
    Ok(set)
}

/// Batch simulation configuration, as read from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub cities: Vec<CityConfig>,
    pub n_speakers: usize,
    pub move_prob: f64,
    pub sigma_f: f64,
    pub seed: u64,
    /// Length scales of the sinusoidal feature map; default [60, 12] km.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_scales_km: Option<Vec<f64>>,
}

impl SimConfig {
    pub fn cohort_params(&self) -> Result<CohortParams> {
        let mut params = CohortParams::new(self.n_speakers, self.move_prob, self.sigma_f)?;
        if let Some(scales) = &self.feature_scales_km {
            params.feature_map = FeatureMap::new(scales.clone())?;
        }
        Ok(params)
    }
}

pub fn read_sim_config(path: impl AsRef<Path>) -> Result<SimConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path.display(), e))
}

/// Write speakers as JSON lines.
pub fn write_cohort(path: impl AsRef<Path>, speakers: &[Speaker]) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    for sp in speakers {
        serde_json::to_writer(&mut out, sp).expect("speaker serialization cannot fail");
        out.push(b'\n');
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path.display(), e))?;
    file.write_all(&out).map_err(|e| Error::io(path.display(), e))
}

pub fn read_cohort(path: impl AsRef<Path>) -> Result<Vec<Speaker>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))?;
    let mut speakers = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let sp: Speaker = serde_json::from_str(line)
            .map_err(|e| Error::parse_line(path.display(), idx + 1, e))?;
        speakers.push(sp);
    }
    Ok(speakers)
}
