//! Batch front end for the accentloc library.
//!
//! Subcommands: `aggregate`, `score`, `simulate`, `fit-decay`. All
//! randomness is seed-mandatory and outputs are byte-identical across
//! repeated invocations with the same inputs. Reports embed a SHA-256
//! hash of each input file.
//!
//! Exit codes: 0 success, 2 input schema/parse error, 3 semantic
//! mismatch (e.g. mixed trial families), 4 insufficient data.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

use accentloc::density::{read_density, AggregateOptions, RasterOptions};
use accentloc::geom::{geojson, DistanceFunction};
use accentloc::metrics::{read_trials, score_run, write_trials, ScoreConfig};
use accentloc::sim;
use accentloc::Error;

#[derive(Parser)]
#[command(name = "accentloc", version, about = "Origin-location densities: aggregation, scoring, simulation, decay fitting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discretize a density over a tessellation into region probabilities.
    Aggregate {
        /// Density JSON file (delta, grid, or gmm). Normalized on load.
        density: PathBuf,
        /// Tessellation GeoJSON file.
        tess: PathBuf,
        /// Raster resolution for mixture quadrature, e.g. 512x512.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, usize)>,
        /// Subcell samples per grid-cell axis.
        #[arg(long, default_value_t = 4)]
        subcells: usize,
        /// Fold outside-tessellation mass proportionally into regions.
        #[arg(long)]
        renormalize: bool,
        /// Output path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a trial file (JSON lines) with the metrics of its family.
    Score {
        trials: PathBuf,
        /// euclidean | saturated:<tau-km> | population:<density-file>:<samples>
        #[arg(long, default_value = "euclidean", value_parser = parse_distance_spec)]
        distance: DistanceSpec,
        /// Probability floor for cross entropy (off by default).
        #[arg(long)]
        floor: Option<f64>,
        /// Monte-Carlo pairs per density trial.
        #[arg(long, default_value_t = 100_000)]
        mc_pairs: usize,
        /// Base seed; required when scoring density trials.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic cohort and ready-to-score trial files.
    Simulate {
        /// Simulation config JSON (cities, n_speakers, move_prob, sigma_f, seed).
        config: PathBuf,
        /// Optional tessellation; adds aggregated discrete trial files.
        #[arg(long)]
        tess: Option<PathBuf>,
        /// Locator posterior grid, e.g. 128x128.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, usize)>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit an exponential decay to a daily participation series.
    FitDecay {
        /// Series JSON: [{"day": 0, "count": 100.0}, ...]
        series: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone)]
enum DistanceSpec {
    Euclidean,
    Saturated(f64),
    Population { path: PathBuf, samples: usize },
}

fn parse_distance_spec(s: &str) -> Result<DistanceSpec, String> {
    if s == "euclidean" {
        return Ok(DistanceSpec::Euclidean);
    }
    if let Some(tau) = s.strip_prefix("saturated:") {
        let tau: f64 = tau
            .parse()
            .map_err(|e| format!("bad saturation radius: {e}"))?;
        return Ok(DistanceSpec::Saturated(tau));
    }
    if let Some(rest) = s.strip_prefix("population:") {
        let (path, samples) = rest
            .rsplit_once(':')
            .ok_or("expected population:<density-file>:<samples>")?;
        let samples: usize = samples
            .parse()
            .map_err(|e| format!("bad sample count: {e}"))?;
        return Ok(DistanceSpec::Population {
            path: PathBuf::from(path),
            samples,
        });
    }
    Err(format!(
        "unknown distance `{s}` (expected euclidean, saturated:<tau>, or population:<file>:<samples>)"
    ))
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (nx, ny) = s.split_once('x').ok_or("expected <nx>x<ny>, e.g. 512x512")?;
    let nx: usize = nx.parse().map_err(|e| format!("bad nx: {e}"))?;
    let ny: usize = ny.parse().map_err(|e| format!("bad ny: {e}"))?;
    if nx == 0 || ny == 0 {
        return Err("grid dimensions must be ≥ 1".into());
    }
    Ok((nx, ny))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::FamilyMismatch(_) | Error::Method(_) => 3,
        Error::InsufficientData { .. } => 4,
        _ => 2,
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Aggregate {
            density,
            tess,
            grid,
            subcells,
            renormalize,
            out,
        } => cmd_aggregate(&density, &tess, grid, subcells, renormalize, out.as_deref()),
        Command::Score {
            trials,
            distance,
            floor,
            mc_pairs,
            seed,
            out,
        } => cmd_score(&trials, distance, floor, mc_pairs, seed, out.as_deref()),
        Command::Simulate {
            config,
            tess,
            grid,
            out,
        } => cmd_simulate(&config, tess.as_deref(), grid, &out),
        Command::FitDecay { series, out } => cmd_fit_decay(&series, out.as_deref()),
    }
}

fn cmd_aggregate(
    density_path: &Path,
    tess_path: &Path,
    grid: Option<(usize, usize)>,
    subcells: usize,
    renormalize: bool,
    out: Option<&Path>,
) -> Result<(), Error> {
    let density = read_density(density_path)?.normalize()?;
    let tess = geojson::read_tessellation(tess_path)?;
    let mut opts = AggregateOptions {
        subcells,
        renormalize,
        ..Default::default()
    };
    if let Some((nx, ny)) = grid {
        opts.raster = RasterOptions::with_resolution(nx, ny);
    }
    let dist = density.aggregate_with(&tess, &opts)?;

    let mut doc = serde_json::to_value(&dist).expect("distribution serializes");
    doc.as_object_mut().expect("object").insert(
        "inputs".into(),
        json!({
            "density": file_hash(density_path)?,
            "tessellation": file_hash(tess_path)?,
        }),
    );
    emit(&doc, out)
}

fn cmd_score(
    trials_path: &Path,
    distance: DistanceSpec,
    floor: Option<f64>,
    mc_pairs: usize,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<(), Error> {
    let trials = read_trials(trials_path)?;
    let mut inputs = serde_json::Map::new();
    inputs.insert("trials".into(), json!(file_hash(trials_path)?));
    let distance = match distance {
        DistanceSpec::Euclidean => DistanceFunction::Euclidean,
        DistanceSpec::Saturated(tau) => DistanceFunction::saturated(tau)?,
        DistanceSpec::Population { path, samples } => {
            inputs.insert("population_density".into(), json!(file_hash(&path)?));
            DistanceFunction::population_weighted(read_density(&path)?, samples)?
        }
    };
    let config = ScoreConfig {
        distance,
        floor,
        mc_pairs,
        seed,
    };
    let report = score_run(&trials, &config)?;

    let mut doc = serde_json::to_value(&report).expect("report serializes");
    doc.as_object_mut()
        .expect("object")
        .insert("inputs".into(), serde_json::Value::Object(inputs));
    emit(&doc, out)
}

fn cmd_simulate(
    config_path: &Path,
    tess_path: Option<&Path>,
    grid: Option<(usize, usize)>,
    out_dir: &Path,
) -> Result<(), Error> {
    let config = sim::read_sim_config(config_path)?;
    let params = config.cohort_params()?;
    let pop = sim::build_population(&config.cities)?;
    let speakers = sim::simulate_speakers(&pop, &params, config.seed)?;
    let tess = tess_path.map(geojson::read_tessellation).transpose()?;
    let grid = grid.unwrap_or((128, 128));
    let trials = sim::build_locator_trials(
        &speakers,
        &pop,
        config.sigma_f,
        &params.feature_map,
        grid,
        tess.as_ref(),
    )?;

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.display(), e))?;
    sim::write_cohort(out_dir.join("cohort.jsonl"), &speakers)?;
    write_trials(out_dir.join("trials_density.jsonl"), &trials.density)?;
    let mut outputs = vec!["cohort.jsonl", "trials_density.jsonl"];
    if tess.is_some() {
        write_trials(out_dir.join("trials_discrete.jsonl"), &trials.discrete)?;
        write_trials(
            out_dir.join("trials_discrete_prior.jsonl"),
            &trials.discrete_prior,
        )?;
        outputs.push("trials_discrete.jsonl");
        outputs.push("trials_discrete_prior.jsonl");
    }

    let mut inputs = serde_json::Map::new();
    inputs.insert("config".into(), json!(file_hash(config_path)?));
    if let Some(p) = tess_path {
        inputs.insert("tessellation".into(), json!(file_hash(p)?));
    }
    let manifest = json!({
        "config": serde_json::to_value(&config).expect("config serializes"),
        "locator_grid": [grid.0, grid.1],
        "inputs": serde_json::Value::Object(inputs),
        "outputs": outputs,
    });
    emit(&manifest, Some(&out_dir.join("run.json")))
}

fn cmd_fit_decay(series_path: &Path, out: Option<&Path>) -> Result<(), Error> {
    let series = sim::read_series(series_path)?;
    let fit = sim::fit_decay(&series)?;
    // Totals assume the fitted day-0 rate spread evenly over the day's
    // minutes; outside (0,1) there is no finite series to close.
    let minutes_per_day = 24.0 * 60.0;
    let totals = if fit.d_per_day > 0.0 && fit.d_per_day < 1.0 {
        let p = sim::predict_total(
            fit.r0_per_day / minutes_per_day,
            fit.d_per_day,
            minutes_per_day,
        )?;
        serde_json::to_value(p).expect("prediction serializes")
    } else {
        serde_json::Value::Null
    };
    let doc = json!({
        "r0_per_day": fit.r0_per_day,
        "d_per_day": fit.d_per_day,
        "points_used": fit.points_used,
        "total_prediction": totals,
        "inputs": { "series": file_hash(series_path)? },
    });
    emit(&doc, out)
}

fn file_hash(path: &Path) -> Result<String, Error> {
    let bytes = fs::read(path).map_err(|e| Error::io(path.display(), e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn emit(doc: &serde_json::Value, out: Option<&Path>) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(doc).expect("value serializes");
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::io(path.display(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
