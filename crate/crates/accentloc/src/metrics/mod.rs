//! The evaluation suite: trial-averaged cross entropy over regions, the
//! prior-entropy reference, argmax classification and its accuracy,
//! distance-based regression error, and the distance-weighted density
//! metric.
//!
//! Cross entropies are in nats. Regions plus the explicit
//! outside-tessellation mass form the class set, so a hypothesis that
//! leaks mass outside is scored against a reference that does the same
//! and the Gibbs inequality holds trial by trial.

mod report;
mod trial;

use std::collections::BTreeSet;

pub use report::{ConfigEcho, MetricReport, MetricValue, TrialBreakdown};
pub use trial::{parse_trials, read_trials, write_trials, Trial, TrialElement, TrialFamily};

use crate::density::{DiscreteDistribution, SpatialDensity};
use crate::error::{Error, Result};
use crate::geom::DistanceFunction;
use crate::seeding;

/// Trial-averaged cross entropy −(1/|T|) Σ_t Σ_i p_ref(i) ln p_hyp(i),
/// in nats, over discrete trials sharing one region set.
///
/// Without a floor, hypothesis mass vanishing where the reference has
/// mass yields an honest +∞. With `floor = Some(p)`, hypothesis
/// probabilities are clamped below at `p` first.
pub fn cross_entropy(trials: &[Trial], floor: Option<f64>) -> Result<f64> {
    validate_floor(floor)?;
    let pairs = discrete_pairs(trials)?;
    check_common_region_set(&pairs)?;
    let total: f64 = pairs
        .iter()
        .map(|(_, r, h)| single_cross_entropy(r, h, floor))
        .sum();
    Ok(total / pairs.len() as f64)
}

/// Cross entropy of one reference/hypothesis pair, in nats.
pub fn single_cross_entropy(
    reference: &DiscreteDistribution,
    hypothesis: &DiscreteDistribution,
    floor: Option<f64>,
) -> f64 {
    let floor = floor.unwrap_or(0.0);
    let term = |p_ref: f64, p_hyp: f64| -> f64 {
        if p_ref <= 0.0 {
            return 0.0; // 0·ln 0 := 0
        }
        let q = p_hyp.max(floor);
        if q <= 0.0 {
            f64::INFINITY
        } else {
            -p_ref * q.ln()
        }
    };
    let mut acc = 0.0;
    for (id, p_ref) in reference.entries() {
        acc += term(p_ref, hypothesis.prob(id));
    }
    acc + term(reference.outside_mass(), hypothesis.outside_mass())
}

/// Entropy of a region prior, −Σ_i π(i) ln π(i) in nats with 0·ln 0 = 0.
/// Inserting the prior as the hypothesis for trials drawn from it makes
/// the trial-averaged cross entropy converge to this value.
pub fn prior_entropy(pi: &DiscreteDistribution) -> f64 {
    pi.entropy()
}

/// Maximum-posterior region; ties resolve to the lexicographically
/// smallest id.
pub fn classify(d: &DiscreteDistribution) -> Result<&str> {
    d.argmax()
}

/// Fraction of discrete trials whose hypothesis argmax matches the
/// reference argmax.
pub fn classification_accuracy(trials: &[Trial]) -> Result<f64> {
    let pairs = discrete_pairs(trials)?;
    let mut correct = 0usize;
    for (id, r, h) in &pairs {
        let r_top = r
            .argmax()
            .map_err(|e| Error::Schema(format!("trial `{id}`: {e}")))?;
        let h_top = h
            .argmax()
            .map_err(|e| Error::Schema(format!("trial `{id}`: {e}")))?;
        if r_top == h_top {
            correct += 1;
        }
    }
    Ok(correct as f64 / pairs.len() as f64)
}

/// Mean distance between reference and hypothesis point estimates, in
/// the distance function's units (km for the built-in kinds).
pub fn regression_error(trials: &[Trial], distance: &DistanceFunction) -> Result<f64> {
    if trials.is_empty() {
        return Err(Error::Schema("empty trial list".into()));
    }
    let mut acc = 0.0;
    for t in trials {
        let (TrialElement::Point(r), TrialElement::Point(h)) = (t.reference(), t.hypothesis())
        else {
            return Err(Error::FamilyMismatch(format!(
                "trial `{}` is {}, regression_error needs point trials",
                t.trial_id(),
                t.family()
            )));
        };
        acc += distance.distance(*r, *h);
    }
    Ok(acc / trials.len() as f64)
}

/// How the double integral ∫∫ p_hyp(x) p_ref(y) D(x,y) dx dy is
/// evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistMethod {
    /// Exact double sum over cell centers; grid×grid only. Cost is
    /// O((nx·ny)² ) over non-empty cells — keep the grids modest.
    Quadrature,
    /// Paired independent draws; works for every representation and
    /// reports a standard error.
    MonteCarlo { pairs: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistEstimate {
    pub value: f64,
    /// Standard error of the Monte-Carlo mean; `None` for quadrature.
    pub standard_error: Option<f64>,
}

/// Expected distance between independent draws of the hypothesis and
/// reference densities. Not zero at a perfect match unless the density
/// is a single atom: matching a spread-out reference still pays its
/// internal spread.
pub fn dist_metric(
    hypothesis: &SpatialDensity,
    reference: &SpatialDensity,
    distance: &DistanceFunction,
    method: DistMethod,
) -> Result<DistEstimate> {
    match method {
        DistMethod::Quadrature => {
            let (SpatialDensity::Grid(h), SpatialDensity::Grid(r)) = (hypothesis, reference)
            else {
                return Err(Error::Method(
                    "quadrature needs grid hypothesis and grid reference; \
                     use Monte Carlo for other representations"
                        .into(),
                ));
            };
            let mut acc = 0.0;
            for jh in 0..h.ny() {
                for ih in 0..h.nx() {
                    let mh = h.cell_mass(ih, jh);
                    if mh == 0.0 {
                        continue;
                    }
                    let ch = h.cell_center(ih, jh);
                    for jr in 0..r.ny() {
                        for ir in 0..r.nx() {
                            let mr = r.cell_mass(ir, jr);
                            if mr == 0.0 {
                                continue;
                            }
                            acc += mh * mr * distance.distance(ch, r.cell_center(ir, jr));
                        }
                    }
                }
            }
            Ok(DistEstimate {
                value: acc,
                standard_error: None,
            })
        }
        DistMethod::MonteCarlo { pairs, seed } => {
            if pairs == 0 {
                return Err(Error::Domain("Monte Carlo needs at least 1 pair".into()));
            }
            let xs = hypothesis.sample(pairs, seeding::derive_seed(seed, 1));
            let ys = reference.sample(pairs, seeding::derive_seed(seed, 2));
            let n = pairs as f64;
            let mut mean = 0.0;
            let mut m2 = 0.0;
            for (k, (x, y)) in xs.iter().zip(&ys).enumerate() {
                let d = distance.distance(*x, *y);
                let delta = d - mean;
                mean += delta / (k as f64 + 1.0);
                m2 += delta * (d - mean);
            }
            let standard_error =
                (pairs > 1).then(|| (m2 / (n - 1.0)).sqrt() / n.sqrt());
            Ok(DistEstimate {
                value: mean,
                standard_error,
            })
        }
    }
}

/// Configuration for a scoring run.
#[derive(Debug, Clone)]
pub struct ScoreConfig {
    pub distance: DistanceFunction,
    /// Probability floor for cross entropy; off by default.
    pub floor: Option<f64>,
    /// Monte-Carlo pairs per density trial.
    pub mc_pairs: usize,
    /// Base seed for density trials; per-trial streams derive from it
    /// and the trial id, so results do not depend on trial order.
    pub seed: Option<u64>,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            distance: DistanceFunction::Euclidean,
            floor: None,
            mc_pairs: 100_000,
            seed: None,
        }
    }
}

impl ScoreConfig {
    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            distance: self.distance.describe(),
            log_base: "e (nats)".into(),
            floor: self.floor,
            mc_pairs: Some(self.mc_pairs),
            seed: self.seed,
        }
    }
}

/// Score a homogeneous trial list with every metric that applies to its
/// family, embedding the configuration in the report.
///
/// Per-trial failures are recorded in the breakdown and excluded from
/// the aggregates; the aggregate means are over the remaining trials.
pub fn score_run(trials: &[Trial], config: &ScoreConfig) -> Result<MetricReport> {
    if trials.is_empty() {
        return Err(Error::Schema("empty trial list".into()));
    }
    validate_floor(config.floor)?;
    let family = trials[0].family();
    if let Some(t) = trials.iter().find(|t| t.family() != family) {
        return Err(Error::FamilyMismatch(format!(
            "trial `{}` is {}, but the run started with {} trials",
            t.trial_id(),
            t.family(),
            family
        )));
    }

    let mut report = MetricReport {
        trial_count: trials.len(),
        failed_trials: 0,
        config: config.echo(),
        metrics: Default::default(),
        per_trial: Vec::with_capacity(trials.len()),
    };

    match family {
        TrialFamily::Discrete => {
            let pairs = discrete_pairs(trials)?;
            check_common_region_set(&pairs)?;
            let mut ce_sum = 0.0;
            let mut ref_h_sum = 0.0;
            let mut correct = 0usize;
            let mut scored = 0usize;
            for (id, r, h) in &pairs {
                let mut breakdown = TrialBreakdown {
                    trial_id: (*id).to_string(),
                    metrics: Default::default(),
                    error: None,
                };
                let ce = single_cross_entropy(r, h, config.floor);
                let ref_h = r.entropy();
                breakdown.metrics.insert("cross_entropy".into(), ce.into());
                breakdown
                    .metrics
                    .insert("reference_entropy".into(), ref_h.into());
                match (r.argmax(), h.argmax()) {
                    (Ok(rt), Ok(ht)) => {
                        let hit = rt == ht;
                        breakdown
                            .metrics
                            .insert("correct".into(), (f64::from(u8::from(hit))).into());
                        ce_sum += ce;
                        ref_h_sum += ref_h;
                        if hit {
                            correct += 1;
                        }
                        scored += 1;
                    }
                    (r_res, h_res) => {
                        let e = r_res.err().or(h_res.err()).expect("one side failed");
                        breakdown.error = Some(e.to_string());
                        report.failed_trials += 1;
                    }
                }
                report.per_trial.push(breakdown);
            }
            if scored > 0 {
                let n = scored as f64;
                report
                    .metrics
                    .insert("cross_entropy".into(), (ce_sum / n).into());
                report
                    .metrics
                    .insert("reference_entropy".into(), (ref_h_sum / n).into());
                report
                    .metrics
                    .insert("classification_accuracy".into(), (correct as f64 / n).into());
            }
        }
        TrialFamily::Point => {
            let mut sum = 0.0;
            for t in trials {
                let (TrialElement::Point(r), TrialElement::Point(h)) =
                    (t.reference(), t.hypothesis())
                else {
                    unreachable!("family checked above")
                };
                let d = config.distance.distance(*r, *h);
                sum += d;
                report.per_trial.push(TrialBreakdown {
                    trial_id: t.trial_id().to_string(),
                    metrics: [("distance".to_string(), MetricValue(d))].into(),
                    error: None,
                });
            }
            report
                .metrics
                .insert("regression_error".into(), (sum / trials.len() as f64).into());
        }
        TrialFamily::Density => {
            let seed = config.seed.ok_or_else(|| {
                Error::Domain("density trials are scored by Monte Carlo; a seed is required".into())
            })?;
            let mut sum = 0.0;
            let mut scored = 0usize;
            for t in trials {
                let (TrialElement::Density(r), TrialElement::Density(h)) =
                    (t.reference(), t.hypothesis())
                else {
                    unreachable!("family checked above")
                };
                let method = DistMethod::MonteCarlo {
                    pairs: config.mc_pairs,
                    seed: seeding::seed_for_label(seed, t.trial_id()),
                };
                let mut breakdown = TrialBreakdown {
                    trial_id: t.trial_id().to_string(),
                    metrics: Default::default(),
                    error: None,
                };
                match dist_metric(h, r, &config.distance, method) {
                    Ok(est) => {
                        breakdown
                            .metrics
                            .insert("dist_metric".into(), est.value.into());
                        if let Some(se) = est.standard_error {
                            breakdown
                                .metrics
                                .insert("dist_standard_error".into(), se.into());
                        }
                        sum += est.value;
                        scored += 1;
                    }
                    Err(e) => {
                        breakdown.error = Some(e.to_string());
                        report.failed_trials += 1;
                    }
                }
                report.per_trial.push(breakdown);
            }
            if scored > 0 {
                report
                    .metrics
                    .insert("dist_metric_mean".into(), (sum / scored as f64).into());
            }
        }
    }
    Ok(report)
}

fn validate_floor(floor: Option<f64>) -> Result<()> {
    if let Some(f) = floor {
        if !(f.is_finite() && f > 0.0 && f < 1.0) {
            return Err(Error::Domain(format!(
                "probability floor must lie in (0, 1), got {f}"
            )));
        }
    }
    Ok(())
}

fn discrete_pairs(
    trials: &[Trial],
) -> Result<Vec<(&str, &DiscreteDistribution, &DiscreteDistribution)>> {
    if trials.is_empty() {
        return Err(Error::Schema("empty trial list".into()));
    }
    trials
        .iter()
        .map(|t| match (t.reference(), t.hypothesis()) {
            (TrialElement::Discrete(r), TrialElement::Discrete(h)) => {
                Ok((t.trial_id(), r, h))
            }
            _ => Err(Error::FamilyMismatch(format!(
                "trial `{}` is {}, expected discrete trials",
                t.trial_id(),
                t.family()
            ))),
        })
        .collect()
}

fn check_common_region_set(
    pairs: &[(&str, &DiscreteDistribution, &DiscreteDistribution)],
) -> Result<()> {
    let (first_id, first_ref, _) = pairs[0];
    let expected: BTreeSet<&str> = first_ref.region_ids().collect();
    for (id, r, h) in pairs {
        for (side, d) in [("reference", r), ("hypothesis", h)] {
            let got: BTreeSet<&str> = d.region_ids().collect();
            if got != expected {
                return Err(Error::Schema(format!(
                    "trial `{id}` {side} is over a different region set than \
                     trial `{first_id}`"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Location;
    use std::collections::BTreeMap;

    fn dd(pairs: &[(&str, f64)]) -> DiscreteDistribution {
        let entries: BTreeMap<String, f64> =
            pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let outside = 1.0 - entries.values().sum::<f64>();
        DiscreteDistribution::new(entries, outside.max(0.0)).unwrap()
    }

    fn discrete_trial(id: &str, r: DiscreteDistribution, h: DiscreteDistribution) -> Trial {
        Trial::new(id, TrialElement::Discrete(r), TrialElement::Discrete(h)).unwrap()
    }

    #[test]
    fn cross_entropy_perfect_one_hot_is_zero() {
        let t = discrete_trial(
            "t",
            dd(&[("A", 1.0), ("B", 0.0)]),
            dd(&[("A", 1.0), ("B", 0.0)]),
        );
        assert_eq!(cross_entropy(&[t], None).unwrap(), 0.0);
    }

    #[test]
    fn cross_entropy_uniform_hyp_is_ln_k() {
        let regions = ["A", "B", "C", "D"];
        let r = dd(&[("A", 1.0), ("B", 0.0), ("C", 0.0), ("D", 0.0)]);
        let h = dd(&regions.map(|k| (k, 0.25)));
        let t = discrete_trial("t", r, h);
        let ce = cross_entropy(&[t], None).unwrap();
        assert!((ce - 4.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn cross_entropy_gibbs_equality_at_match() {
        let p = dd(&[("A", 0.5), ("B", 0.5)]);
        let t = discrete_trial("t", p.clone(), p.clone());
        let ce = cross_entropy(&[t], None).unwrap();
        assert!((ce - 2.0f64.ln()).abs() < 1e-12);
        assert!((ce - prior_entropy(&p)).abs() < 1e-12);
    }

    #[test]
    fn cross_entropy_unbounded_without_floor() {
        let r = dd(&[("A", 0.5), ("B", 0.5)]);
        let h = dd(&[("A", 1.0), ("B", 0.0)]);
        let t = discrete_trial("t", r.clone(), h.clone());
        assert!(cross_entropy(&[t], None).unwrap().is_infinite());
        let floored = cross_entropy(
            &[discrete_trial("t", r, h)],
            Some(1e-6),
        )
        .unwrap();
        assert!(floored.is_finite());
    }

    #[test]
    fn cross_entropy_rejects_mixed_region_sets() {
        let t1 = discrete_trial("t1", dd(&[("A", 1.0)]), dd(&[("A", 1.0)]));
        let t2 = discrete_trial("t2", dd(&[("B", 1.0)]), dd(&[("B", 1.0)]));
        assert!(matches!(
            cross_entropy(&[t1, t2], None),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn prior_entropy_examples() {
        let u = DiscreteDistribution::uniform(["A", "B", "C", "D", "E"]).unwrap();
        assert!((prior_entropy(&u) - 5.0f64.ln()).abs() < 1e-12);
        assert_eq!(prior_entropy(&DiscreteDistribution::one_hot("A")), 0.0);
    }

    #[test]
    fn classify_and_tiebreak() {
        assert_eq!(classify(&dd(&[("A", 0.7), ("B", 0.3)])).unwrap(), "A");
        assert_eq!(classify(&dd(&[("A", 0.5), ("B", 0.5)])).unwrap(), "A");
        let empty = DiscreteDistribution::new(Default::default(), 1.0).unwrap();
        assert!(matches!(classify(&empty), Err(Error::Schema(_))));
    }

    #[test]
    fn accuracy_extremes() {
        let same: Vec<Trial> = (0..10)
            .map(|i| {
                discrete_trial(
                    &format!("t{i}"),
                    dd(&[("A", 0.6), ("B", 0.4)]),
                    dd(&[("A", 0.6), ("B", 0.4)]),
                )
            })
            .collect();
        assert_eq!(classification_accuracy(&same).unwrap(), 1.0);
        let wrong: Vec<Trial> = (0..10)
            .map(|i| {
                discrete_trial(
                    &format!("t{i}"),
                    dd(&[("A", 0.9), ("B", 0.1)]),
                    dd(&[("A", 0.1), ("B", 0.9)]),
                )
            })
            .collect();
        assert_eq!(classification_accuracy(&wrong).unwrap(), 0.0);
    }

    #[test]
    fn regression_error_examples() {
        let t = Trial::new(
            "t",
            TrialElement::Point(Location::new(0.0, 0.0)),
            TrialElement::Point(Location::new(3.0, 4.0)),
        )
        .unwrap();
        let d = DistanceFunction::Euclidean;
        assert_eq!(regression_error(std::slice::from_ref(&t), &d).unwrap(), 5.0);
        let sat = DistanceFunction::saturated(2.0).unwrap();
        assert_eq!(regression_error(&[t], &sat).unwrap(), 2.0);
        let same = Trial::new(
            "s",
            TrialElement::Point(Location::new(1.0, 1.0)),
            TrialElement::Point(Location::new(1.0, 1.0)),
        )
        .unwrap();
        assert_eq!(regression_error(&[same], &d).unwrap(), 0.0);
    }

    #[test]
    fn dist_metric_two_atoms() {
        let h = SpatialDensity::delta_at(Location::new(0.0, 0.0));
        let r = SpatialDensity::delta_at(Location::new(3.0, 4.0));
        let est = dist_metric(
            &h,
            &r,
            &DistanceFunction::Euclidean,
            DistMethod::MonteCarlo { pairs: 100, seed: 1 },
        )
        .unwrap();
        assert_eq!(est.value, 5.0);
        assert_eq!(est.standard_error, Some(0.0));
    }

    #[test]
    fn dist_metric_quadrature_needs_grids() {
        let h = SpatialDensity::delta_at(Location::new(0.0, 0.0));
        let r = SpatialDensity::delta_at(Location::new(3.0, 4.0));
        assert!(matches!(
            dist_metric(&h, &r, &DistanceFunction::Euclidean, DistMethod::Quadrature),
            Err(Error::Method(_))
        ));
    }

    #[test]
    fn score_run_discrete_perfect_trial() {
        let p = dd(&[("A", 0.5), ("B", 0.5)]);
        let t = discrete_trial("t", p.clone(), p.clone());
        let report = score_run(&[t], &ScoreConfig::default()).unwrap();
        let ce = report.value("cross_entropy").unwrap();
        assert!((ce - prior_entropy(&p)).abs() < 1e-12);
        assert_eq!(report.value("classification_accuracy"), Some(1.0));
        assert_eq!(report.trial_count, 1);
    }

    #[test]
    fn score_run_empty_is_schema_error() {
        assert!(matches!(
            score_run(&[], &ScoreConfig::default()),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn score_run_density_requires_seed() {
        let t = Trial::new(
            "t",
            TrialElement::Density(SpatialDensity::delta_at(Location::new(0.0, 0.0))),
            TrialElement::Density(SpatialDensity::delta_at(Location::new(1.0, 0.0))),
        )
        .unwrap();
        let r = score_run(&[t], &ScoreConfig::default());
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
