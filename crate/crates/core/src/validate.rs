//! Monte Carlo validation of the enclosure's coverage claim.
//!
//! Per trial: draw a data set (fresh synthetic seed per trial, or the
//! fixed CSV data), run the pipeline, then (i) sample posterior paths on a
//! grid of `2^(B+1)` points and record the fraction whose graphs stay
//! inside the fibers, and (ii) evaluate the generating map on the same
//! grid and record whether its graph stays inside. The grid uses the
//! midpoints of a doubled subdivision, so every probe point is interior to
//! exactly one edge and the containment check is a pair of comparisons.
//!
//! Trials and paths are independent units with seeds derived from
//! `(master seed, unit index)`, so results do not depend on scheduling.

use crate::dataio::MapFunction;
use crate::enclosure::Enclosure;
use crate::pipeline::{run, Analysis, AnalysisConfig, DataSource, PipelineError};
use crate::rng::derive_stream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Coverage results of one trial.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial: usize,
    pub data_seed: u64,
    pub confidence_valid: bool,
    /// Fraction of posterior paths fully inside the fibers.
    pub posterior_coverage: f64,
    /// Whether the generating map's graph stayed inside (synthetic only).
    pub truth_inside: Option<bool>,
    pub error: Option<String>,
}

/// Aggregate over all trials.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub trials_requested: usize,
    pub trials_completed: usize,
    pub trials_failed: usize,
    pub paths_per_trial: usize,
    pub grid_points: usize,
    pub confidence_valid_count: usize,
    /// Mean posterior coverage over completed trials.
    pub mean_posterior_coverage: f64,
    /// Fraction of completed synthetic trials whose truth stayed inside.
    pub truth_coverage_rate: Option<f64>,
    pub per_trial: Vec<TrialSummary>,
}

impl ValidationSummary {
    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        serde_json::to_string_pretty(self)
    }
}

/// Probe grid: midpoints of the doubled subdivision (`2^(B+1)` points,
/// each interior to one edge of the analysis complex).
pub fn probe_grid(config: &AnalysisConfig) -> Vec<f64> {
    let m = 1usize << (config.subdivision_exponent + 1);
    let w = config.domain.width();
    (0..m)
        .map(|j| config.domain.lower + (j as f64 + 0.5) * w / m as f64)
        .collect()
}

/// Fast containment of grid-aligned values: probe point `j` lies inside
/// edge `j >> 1` of the analysis complex.
fn grid_inside(enclosure: &Enclosure, values: &[f64]) -> bool {
    values.iter().enumerate().all(|(j, &y)| {
        let (lo, hi) = enclosure.fibers.fiber(j >> 1);
        lo <= y && y <= hi
    })
}

fn truth_function(config: &AnalysisConfig) -> Option<MapFunction> {
    match &config.data {
        DataSource::Synthetic(spec) => Some(spec.function.clone()),
        DataSource::Csv { .. } => None,
    }
}

/// Runs one trial on an already-fitted analysis.
fn trial_coverage(
    analysis: &Analysis,
    grid: &[f64],
    paths: usize,
    path_stream: u64,
) -> Result<f64, PipelineError> {
    let factor = analysis
        .model
        .posterior_factor(grid)
        .map_err(PipelineError::Fit)?;
    let inside: usize = (0..paths)
        .into_par_iter()
        .map_init(
            || vec![0.0; grid.len()],
            |buf, i| {
                factor.draw_into(derive_stream(path_stream, i as u64), buf);
                usize::from(grid_inside(&analysis.enclosure, buf))
            },
        )
        .sum();
    Ok(inside as f64 / paths as f64)
}

/// Full validation: `trials` independent data draws, `paths` posterior
/// paths each.
pub fn validate(
    config: &AnalysisConfig,
    trials: usize,
    paths: usize,
) -> Result<ValidationSummary, PipelineError> {
    assert!(trials >= 1 && paths >= 1);
    config.validate()?;
    let grid = probe_grid(config);
    let truth = truth_function(config);
    let data_stream = derive_stream(config.seed, 1);
    let path_master = derive_stream(config.seed, 2);

    let per_trial: Vec<TrialSummary> = (0..trials)
        .map(|t| {
            let data_seed = derive_stream(data_stream, t as u64);
            let trial_config = match &config.data {
                DataSource::Synthetic(_) => config.clone().with_seed(data_seed),
                DataSource::Csv { .. } => config.clone(),
            };
            match run(&trial_config) {
                Err(e) => TrialSummary {
                    trial: t,
                    data_seed,
                    confidence_valid: false,
                    posterior_coverage: 0.0,
                    truth_inside: None,
                    error: Some(e.to_string()),
                },
                Ok(analysis) => {
                    let path_stream = derive_stream(path_master, t as u64);
                    match trial_coverage(&analysis, &grid, paths, path_stream) {
                        Err(e) => TrialSummary {
                            trial: t,
                            data_seed,
                            confidence_valid: analysis.report.confidence_valid,
                            posterior_coverage: 0.0,
                            truth_inside: None,
                            error: Some(e.to_string()),
                        },
                        Ok(coverage) => {
                            let truth_inside = truth.as_ref().map(|f| {
                                let values: Vec<f64> =
                                    grid.iter().map(|&x| f.eval(x)).collect();
                                grid_inside(&analysis.enclosure, &values)
                            });
                            TrialSummary {
                                trial: t,
                                data_seed,
                                confidence_valid: analysis.report.confidence_valid,
                                posterior_coverage: coverage,
                                truth_inside,
                                error: None,
                            }
                        }
                    }
                }
            }
        })
        .collect();

    let completed: Vec<&TrialSummary> =
        per_trial.iter().filter(|t| t.error.is_none()).collect();
    let mean_posterior_coverage = if completed.is_empty() {
        0.0
    } else {
        completed.iter().map(|t| t.posterior_coverage).sum::<f64>() / completed.len() as f64
    };
    let truth_coverage_rate = if truth.is_some() && !completed.is_empty() {
        Some(
            completed
                .iter()
                .filter(|t| t.truth_inside == Some(true))
                .count() as f64
                / completed.len() as f64,
        )
    } else {
        None
    };
    Ok(ValidationSummary {
        trials_requested: trials,
        trials_completed: completed.len(),
        trials_failed: trials - completed.len(),
        paths_per_trial: paths,
        grid_points: grid.len(),
        confidence_valid_count: per_trial.iter().filter(|t| t.confidence_valid).count(),
        mean_posterior_coverage,
        truth_coverage_rate,
        per_trial,
    })
}
