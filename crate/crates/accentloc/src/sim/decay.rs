//! Exponential participation decay: after a media event the daily
//! recording rate drops by a roughly constant fraction per day. The fit
//! is an ordinary least-squares line through (day, ln count), which is
//! both how such rates look linear on a log plot and what keeps the fit
//! closed-form.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DayCount {
    pub day: i64,
    pub count: f64,
}

/// Daily observation counts with strictly increasing day indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<DayCount>", into = "Vec<DayCount>")]
pub struct ParticipationSeries {
    points: Vec<DayCount>,
}

impl TryFrom<Vec<DayCount>> for ParticipationSeries {
    type Error = Error;
    fn try_from(points: Vec<DayCount>) -> Result<Self> {
        ParticipationSeries::new(points)
    }
}

impl From<ParticipationSeries> for Vec<DayCount> {
    fn from(s: ParticipationSeries) -> Self {
        s.points
    }
}

impl ParticipationSeries {
    pub fn new(points: Vec<DayCount>) -> Result<Self> {
        for p in &points {
            if !(p.count.is_finite() && p.count >= 0.0) {
                return Err(Error::Schema(format!(
                    "count on day {} must be finite and ≥ 0, got {}",
                    p.day, p.count
                )));
            }
        }
        for w in points.windows(2) {
            if w[1].day <= w[0].day {
                return Err(Error::Schema(format!(
                    "day indices must be strictly increasing, got {} after {}",
                    w[1].day, w[0].day
                )));
            }
        }
        Ok(ParticipationSeries { points })
    }

    /// Exact exponential series `r0 · (1 − d)^k` for `k = 0..days`.
    pub fn exponential(r0: f64, d: f64, days: usize) -> Result<Self> {
        ParticipationSeries::new(
            (0..days)
                .map(|k| DayCount {
                    day: k as i64,
                    count: r0 * (1.0 - d).powi(k as i32),
                })
                .collect(),
        )
    }

    pub fn points(&self) -> &[DayCount] {
        &self.points
    }
}

/// Fitted decay: the day-0 rate and the fractional drop per day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Rate extrapolated to day 0, in counts/day.
    pub r0_per_day: f64,
    /// Fractional drop per day, `d = 1 − e^slope`.
    pub d_per_day: f64,
    /// Positive-count points that entered the fit.
    pub points_used: usize,
}

/// Least squares on ln(count) against day index. Zero-count days carry
/// no information about a multiplicative rate and are excluded.
pub fn fit_decay(series: &ParticipationSeries) -> Result<DecayFit> {
    let data: Vec<(f64, f64)> = series
        .points()
        .iter()
        .filter(|p| p.count > 0.0)
        .map(|p| (p.day as f64, p.count.ln()))
        .collect();
    if data.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: data.len(),
        });
    }
    let n = data.len() as f64;
    let mean_x = data.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = data.iter().map(|(_, y)| y).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in &data {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    Ok(DecayFit {
        r0_per_day: intercept.exp(),
        d_per_day: 1.0 - slope.exp(),
        points_used: data.len(),
    })
}

/// Two closings of the total-count series, which disagree except at
/// d = 1/2; both are reported rather than picking one silently.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TotalPrediction {
    /// `N·R₀/(1−d)`: the day-0 total divided by the retained fraction.
    pub one_minus_d_formula: f64,
    /// `N·R₀/d`: the closed geometric sum Σₖ N·R₀·(1−d)^k.
    pub geometric_series: f64,
}

/// Predict the total count following an event from the initial
/// per-minute rate, the daily decay, and the minutes per day.
pub fn predict_total(
    r0_per_minute: f64,
    d_per_day: f64,
    minutes_per_day: f64,
) -> Result<TotalPrediction> {
    if !(d_per_day > 0.0 && d_per_day < 1.0) {
        return Err(Error::Domain(format!(
            "decay fraction must lie strictly in (0, 1), got {d_per_day}"
        )));
    }
    if !(r0_per_minute.is_finite() && r0_per_minute >= 0.0 && minutes_per_day > 0.0) {
        return Err(Error::Domain(
            "rate must be ≥ 0 and minutes per day positive".into(),
        ));
    }
    let day_total = minutes_per_day * r0_per_minute;
    Ok(TotalPrediction {
        one_minus_d_formula: day_total / (1.0 - d_per_day),
        geometric_series: day_total / d_per_day,
    })
}

pub fn read_series(path: impl AsRef<Path>) -> Result<ParticipationSeries> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path.display(), e))
}

pub fn parse_series(text: &str) -> Result<ParticipationSeries> {
    serde_json::from_str(text).map_err(|e| Error::parse("<series>", e))
}
