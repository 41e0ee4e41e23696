//! End-to-end analysis pipeline behind a JSON config: data, surrogate fit,
//! radius allocation, enclosure, Morse graph, Conley indices, connecting
//! orbits, and the serialized report.

use crate::confidence::{
    allocate, ConfidenceBudget, ConfidenceError, LipschitzAssumption, RadiusAssignment, Weights,
};
use crate::conley::{
    build_selector, conley_index, connecting_orbit, interpret, ChainSelector, Classification,
    ConleyError, ConleyIndex,
};
use crate::dataio::{generate, load_csv, DataError, Domain, SyntheticSpec, TrainingData};
use crate::enclosure::{assemble, Enclosure, EnclosureDiagnostics, EnclosureError};
use crate::gp::{fit, GpError, GpModel, KernelConfig};
use crate::grid::{CellComplex1D, GridError};
use crate::morse::{
    morse_graph, morse_set_intervals, nu, pred, Attractor, Digraph, MorseGraph,
};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("data: {0}")]
    Data(#[from] DataError),
    #[error("grid: {0}")]
    Grid(#[from] GridError),
    #[error("gp fit: {0}")]
    Fit(#[from] GpError),
    #[error("confidence: {0}")]
    Confidence(#[from] ConfidenceError),
    #[error("enclosure: {0}")]
    Enclosure(#[from] EnclosureError),
    #[error("conley: {0}")]
    Conley(#[from] ConleyError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

/// Where the samples come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Csv { path: PathBuf },
    Synthetic(SyntheticSpec),
}

fn default_schema_version() -> u32 {
    1
}

fn default_delta() -> f64 {
    0.05
}

fn default_lipschitz() -> f64 {
    8.0
}

fn default_weights() -> Weights {
    Weights::Uniform
}

/// One experiment: domain, resolution, confidence budget, Lipschitz bound,
/// kernel settings, data source, and seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub domain: Domain,
    pub subdivision_exponent: u32,
    #[serde(default = "default_delta")]
    pub delta_total: f64,
    /// Optional custom split; both shares default to sqrt(1 - delta).
    #[serde(default)]
    pub budget: Option<BudgetShares>,
    #[serde(default = "default_lipschitz")]
    pub lipschitz_l: f64,
    #[serde(default)]
    pub kernel: KernelConfig,
    pub data: DataSource,
    #[serde(default = "default_weights")]
    pub weights: Weights,
    /// Master seed for validation streams; `analyze` itself is
    /// deterministic in the data.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetShares {
    pub lipschitz_share: f64,
    pub pointwise_share: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    #[serde(default)]
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub svg: Option<PathBuf>,
}

impl AnalysisConfig {
    pub fn from_file(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)?;
        let cfg: AnalysisConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.schema_version != 1 {
            return Err(PipelineError::Config(format!(
                "unsupported schema version {}",
                self.schema_version
            )));
        }
        if !(self.delta_total > 0.0 && self.delta_total < 1.0) {
            return Err(PipelineError::Config(format!(
                "delta_total {} outside (0,1)",
                self.delta_total
            )));
        }
        if !(self.lipschitz_l > 0.0 && self.lipschitz_l.is_finite()) {
            return Err(PipelineError::Config(format!(
                "lipschitz_l {} must be positive",
                self.lipschitz_l
            )));
        }
        Ok(())
    }

    pub fn budget(&self) -> Result<ConfidenceBudget, ConfidenceError> {
        match self.budget {
            None => ConfidenceBudget::split_evenly(self.delta_total),
            Some(s) => ConfidenceBudget::with_shares(
                self.delta_total,
                s.lipschitz_share,
                s.pointwise_share,
            ),
        }
    }

    /// Replaces every seed in the config (master and synthetic data).
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        if let DataSource::Synthetic(ref mut spec) = self.data {
            spec.seed = seed;
        }
        self
    }

    pub fn load_data(&self) -> Result<TrainingData, DataError> {
        match &self.data {
            DataSource::Csv { path } => load_csv(path, self.domain),
            DataSource::Synthetic(spec) => generate(spec, self.domain),
        }
    }
}

/// Everything the pipeline produced, for rendering and further queries.
pub struct Analysis {
    pub config: AnalysisConfig,
    pub data: TrainingData,
    pub model: GpModel,
    pub complex: CellComplex1D,
    pub radii: RadiusAssignment,
    pub enclosure: Enclosure,
    pub diagnostics: EnclosureDiagnostics,
    pub digraph: Digraph,
    pub morse: MorseGraph,
    pub selector: ChainSelector,
    pub indices: Vec<ConleyIndex>,
    pub report: Report,
}

/// Serialized result of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: AnalysisConfig,
    pub model: ModelSummary,
    pub diagnostics: DiagnosticsReport,
    /// True exactly when every fiber interval stayed inside the domain, so
    /// the stated confidence level applies to the reported structure.
    pub confidence_valid: bool,
    pub morse_graph: MorseGraphReport,
    pub conley: Vec<NodeIndexReport>,
    pub connections: Vec<ConnectionReport>,
    pub timings: Timings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub n: usize,
    pub beta_hat: f64,
    pub sigma2_hat: f64,
    pub theta_hat: f64,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub epsilon: f64,
    pub ell: f64,
    pub max_fiber_diameter: f64,
    pub fiber_diameter_bound: f64,
    pub fiber_bound_satisfied: bool,
    pub gamma: f64,
    pub variance_bound: f64,
    pub max_posterior_sd: f64,
    pub lipschitz: LipschitzAssumption,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorseGraphReport {
    pub nodes: Vec<MorseNodeReport>,
    /// Covering relations `(upper, lower)` by node label.
    pub cover_edges: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorseNodeReport {
    pub label: String,
    pub cell_count: usize,
    /// Maximal closed intervals of the node's support, 8-decimal endpoints.
    pub intervals: Vec<String>,
    pub minimal: bool,
    pub maximal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeIndexReport {
    pub label: String,
    pub p0: String,
    pub p1: String,
    pub classification: String,
    pub h0_dim: usize,
    pub h1_dim: usize,
    pub h0_core_dim: usize,
    pub h1_core_dim: usize,
    pub h0_invariant_factors: Vec<String>,
    pub h1_invariant_factors: Vec<String>,
    /// Raw index maps, row-major, entries lifted to `{-2..2}`.
    pub h0_matrix: Vec<Vec<i8>>,
    pub h1_matrix: Vec<Vec<i8>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionReport {
    pub upper: String,
    pub lower: String,
    pub connecting_orbit: bool,
    pub combined_p0: String,
    pub combined_p1: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub fit_ms: f64,
    pub enclosure_ms: f64,
    pub morse_ms: f64,
    pub conley_ms: f64,
    pub total_ms: f64,
}

impl Report {
    /// JSON bytes with the (inherently nondeterministic) timings zeroed;
    /// every other byte is a pure function of the config.
    pub fn canonical_json(&self) -> Result<String, serde_json::Error> {
        let mut clone = self.clone();
        clone.timings = Timings::default();
        serde_json::to_string_pretty(&clone)
    }

    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn ms(from: Instant) -> f64 {
    from.elapsed().as_secs_f64() * 1e3
}

/// Runs the full pipeline.
pub fn run(config: &AnalysisConfig) -> Result<Analysis, PipelineError> {
    config.validate()?;
    let total_t = Instant::now();

    let data = config.load_data()?;
    let complex = CellComplex1D::new(config.domain, config.subdivision_exponent)?;

    let fit_t = Instant::now();
    let model = fit(&data, &config.kernel)?;
    let fit_ms = ms(fit_t);

    let budget = config.budget()?;
    let midpoints = complex.odd_midpoints();
    let radii = allocate(&budget, &midpoints, &config.weights)?;

    let enc_t = Instant::now();
    let (enclosure, diagnostics) = assemble(&model, &complex, &radii, config.lipschitz_l)?;
    let enclosure_ms = ms(enc_t);

    let morse_t = Instant::now();
    let digraph = Digraph::from_fibers(&enclosure.fibers);
    let morse = morse_graph(&digraph);
    verify_attractor_lattice(&digraph, &morse);
    let morse_ms = ms(morse_t);

    let conley_t = Instant::now();
    let selector = build_selector(&enclosure.fibers).map_err(ConleyError::from)?;
    let indices: Vec<ConleyIndex> = (0..morse.len())
        .map(|i| conley_index(&digraph, &morse, &selector, i))
        .collect();
    let mut connections = Vec::new();
    for (upper, lower) in morse.cover_pairs() {
        let res = connecting_orbit(
            &digraph,
            &morse,
            &selector,
            upper,
            lower,
            &indices[upper],
            &indices[lower],
        )?;
        connections.push(ConnectionReport {
            upper: morse.label(upper),
            lower: morse.label(lower),
            connecting_orbit: res.connecting_orbit,
            combined_p0: res.combined.h0.polynomial_string(),
            combined_p1: res.combined.h1.polynomial_string(),
        });
    }
    let conley_ms = ms(conley_t);

    let morse_report = MorseGraphReport {
        nodes: (0..morse.len())
            .map(|i| MorseNodeReport {
                label: morse.label(i),
                cell_count: morse.nodes[i].cells.len(),
                intervals: morse_set_intervals(&complex, &morse.nodes[i].cells)
                    .iter()
                    .map(|&iv| crate::morse::format_interval(iv))
                    .collect(),
                minimal: morse.is_minimal(i),
                maximal: morse.is_maximal(i),
            })
            .collect(),
        cover_edges: morse
            .cover_pairs()
            .iter()
            .map(|&(u, l)| (morse.label(u), morse.label(l)))
            .collect(),
    };
    let conley_report = (0..morse.len())
        .map(|i| {
            let idx = &indices[i];
            let (p0, p1) = idx.polynomial_pair();
            NodeIndexReport {
                label: morse.label(i),
                p0,
                p1,
                classification: interpret(idx).to_string(),
                h0_dim: idx.h0.matrix.rows(),
                h1_dim: idx.h1.matrix.rows(),
                h0_core_dim: idx.h0.core.core_dim,
                h1_core_dim: idx.h1.core.core_dim,
                h0_invariant_factors: idx
                    .h0
                    .core
                    .invariant_factors
                    .iter()
                    .map(|p| p.to_string())
                    .collect(),
                h1_invariant_factors: idx
                    .h1
                    .core
                    .invariant_factors
                    .iter()
                    .map(|p| p.to_string())
                    .collect(),
                h0_matrix: idx.h0.matrix.lifted_rows(),
                h1_matrix: idx.h1.matrix.lifted_rows(),
            }
        })
        .collect();

    let report = Report {
        schema_version: 1,
        config: config.clone(),
        model: ModelSummary {
            n: data.len(),
            beta_hat: model.beta_hat(),
            sigma2_hat: model.sigma2_hat(),
            theta_hat: model.theta_hat(),
            degenerate: model.degenerate(),
        },
        diagnostics: DiagnosticsReport {
            epsilon: diagnostics.epsilon,
            ell: diagnostics.ell,
            max_fiber_diameter: diagnostics.max_fiber_diameter,
            fiber_diameter_bound: diagnostics.fiber_diameter_bound,
            fiber_bound_satisfied: diagnostics.max_fiber_diameter
                < diagnostics.fiber_diameter_bound,
            gamma: diagnostics.gamma,
            variance_bound: diagnostics.variance_bound,
            max_posterior_sd: diagnostics.max_posterior_sd,
            lipschitz: LipschitzAssumption::new(
                config.lipschitz_l,
                budget.lipschitz_share,
            ),
        },
        confidence_valid: enclosure.g_tilde_contained,
        morse_graph: morse_report,
        conley: conley_report,
        connections,
        timings: Timings {
            fit_ms,
            enclosure_ms,
            morse_ms,
            conley_ms,
            total_ms: ms(total_t),
        },
    };

    Ok(Analysis {
        config: config.clone(),
        data,
        model,
        complex,
        radii,
        enclosure,
        diagnostics,
        digraph,
        morse,
        selector,
        indices,
        report,
    })
}

/// Exit status for the CLI: certified, structural-only, or error.
pub fn exit_code(report: &Report) -> i32 {
    if report.confidence_valid {
        0
    } else {
        2
    }
}

/// Lattice sanity of the computed attractors (finite family per run).
///
/// Joins are plain unions and stay invariant; the meet of two attractors
/// is the largest attractor inside their intersection (which need not be
/// invariant itself: a shared cell can have all its preimages outside the
/// intersection), realized here as the union of the node attractors lying
/// below both.
fn verify_attractor_lattice(g: &Digraph, mg: &MorseGraph) {
    let nus: Vec<Attractor> = (0..mg.len()).map(|i| nu(g, mg, i)).collect();
    let preds: Vec<Attractor> = (0..mg.len()).map(|i| pred(g, mg, i)).collect();
    let mut all: Vec<&Attractor> = nus.iter().collect();
    all.extend(preds.iter());
    for a in &all {
        for b in &all {
            assert!(a.union(b).is_invariant(g), "attractor union not invariant");
        }
    }
    let below_or_eq = |i: usize, j: usize| i == j || mg.strictly_below(i, j);
    for i in 0..mg.len() {
        for j in 0..mg.len() {
            let mut meet = Attractor::empty();
            for k in 0..mg.len() {
                if below_or_eq(i, k) && below_or_eq(j, k) {
                    meet = meet.union(&nus[k]);
                }
            }
            assert!(meet.is_invariant(g));
            assert!(
                meet.is_subset_of(&nus[i].intersection(&nus[j])),
                "lattice meet must lie inside the intersection"
            );
        }
    }
    // nu is an order embedding: strict Morse order = strict inclusion.
    for i in 0..mg.len() {
        for j in 0..mg.len() {
            if i != j {
                let below = mg.strictly_below(i, j);
                let inside = nus[j].is_subset_of(&nus[i]) && nus[j].cells != nus[i].cells;
                assert_eq!(below, inside, "nu must embed the Morse order");
            }
        }
    }
}

impl Analysis {
    /// Helper used by tests and the validation harness: node indices whose
    /// support intervals contain `x`.
    pub fn nodes_containing(&self, x: f64) -> Vec<usize> {
        (0..self.morse.len())
            .filter(|&i| {
                morse_set_intervals(&self.complex, &self.morse.nodes[i].cells)
                    .iter()
                    .any(|&(a, b)| a <= x && x <= b)
            })
            .collect()
    }

    pub fn classification(&self, node: usize) -> Classification {
        interpret(&self.indices[node])
    }
}
