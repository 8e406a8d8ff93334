//! Where does a speaker come from? `accentloc` models the answer as a
//! probability density over planar locations — optionally spread over a
//! life history of residences — and provides the machinery to reason
//! about and score such densities:
//!
//! - [`geom`]: locations, polygons, tessellations, and distance functions;
//! - [`density`]: densities as weighted point sets, rasters, or Gaussian
//!   mixtures, with normalization, moments, region aggregation, Bayes
//!   composition, and seeded sampling;
//! - [`origin`]: life-span residence histories reduced to origin densities
//!   and origin points under age-susceptibility and accent-strength
//!   weighting;
//! - [`metrics`]: trial-averaged cross entropy over regions, entropy
//!   references, classification accuracy, and distance-sensitive errors;
//! - [`sim`]: a synthetic cohort simulator with a baseline Bayesian
//!   locator, plus exponential participation-decay fitting.
//!
//! The companion `book/` directory walks through the concepts with
//! runnable examples; the `accentloc` CLI batch-processes the JSON file
//! formats defined by each module.

pub mod density;
mod error;
pub mod geom;
pub mod metrics;
pub mod origin;
pub(crate) mod seeding;
pub mod sim;

pub use error::{Error, Result};
