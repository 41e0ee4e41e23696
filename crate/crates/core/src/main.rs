//! Command-line front end: `analyze` runs one experiment and writes the
//! report (and optionally the figure); `validate` runs the Monte Carlo
//! coverage check.
//!
//! Exit codes: 0 = certified result, 2 = structure computed but the
//! confidence certificate failed (some fiber left the domain), 1 = hard
//! error.

use clap::{Args, Parser, Subcommand};
use gpdyn::pipeline::{exit_code, run, AnalysisConfig};
use gpdyn::svg;
use gpdyn::validate::validate;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gpdyn", version, about = "Certified coarse dynamics of 1D maps from sparse data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one analysis and write the JSON report (and optional SVG).
    Analyze(AnalyzeArgs),
    /// Monte Carlo coverage validation of the enclosure construction.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Report destination (default: config's output.report, else stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Figure destination (default: config's output.svg, else none).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Overrides every seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress the summary lines.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Independent data draws.
    #[arg(long)]
    trials: usize,
    /// Posterior sample paths per trial.
    #[arg(long)]
    paths: usize,
    /// Summary destination (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

fn analyze(args: AnalyzeArgs) -> Result<i32, Box<dyn std::error::Error>> {
    let mut config = AnalysisConfig::from_file(&args.config)?;
    if let Some(seed) = args.seed {
        config = config.with_seed(seed);
    }
    let analysis = run(&config)?;
    let report = &analysis.report;

    let report_path = args
        .out
        .or_else(|| config.output.as_ref().and_then(|o| o.report.clone()));
    match &report_path {
        Some(path) => std::fs::write(path, report.to_json()?)?,
        None => println!("{}", report.to_json()?),
    }

    let svg_path = args
        .svg
        .or_else(|| config.output.as_ref().and_then(|o| o.svg.clone()));
    if let Some(path) = &svg_path {
        std::fs::write(path, svg::render(&analysis))?;
    }

    if !args.quiet {
        eprintln!(
            "model: beta = {:.6}, sigma2 = {:.6e}, theta = {:.6e}{}",
            report.model.beta_hat,
            report.model.sigma2_hat,
            report.model.theta_hat,
            if report.model.degenerate { " (degenerate)" } else { "" },
        );
        eprintln!(
            "enclosure: max fiber diameter {:.6} < bound {:.6}; confidence_valid = {}",
            report.diagnostics.max_fiber_diameter,
            report.diagnostics.fiber_diameter_bound,
            report.confidence_valid,
        );
        for (node, idx) in report.morse_graph.nodes.iter().zip(&report.conley) {
            eprintln!(
                "{}: ({}, {}) {} {} {}",
                node.label,
                idx.p0,
                idx.p1,
                idx.classification,
                if node.minimal { "[minimal]" } else if node.maximal { "[maximal]" } else { "" },
                node.intervals.join(" "),
            );
        }
        for c in &report.connections {
            if c.connecting_orbit {
                eprintln!("connecting orbit: {} -> {}", c.upper, c.lower);
            }
        }
        if let Some(path) = &report_path {
            eprintln!("report written to {}", path.display());
        }
        if let Some(path) = &svg_path {
            eprintln!("figure written to {}", path.display());
        }
        if !report.confidence_valid {
            eprintln!(
                "warning: fibers left the domain; the {}% confidence certificate does not apply",
                (1.0 - config.delta_total) * 100.0
            );
        }
    }
    Ok(exit_code(report))
}

fn run_validate(args: ValidateArgs) -> Result<i32, Box<dyn std::error::Error>> {
    let mut config = AnalysisConfig::from_file(&args.config)?;
    if let Some(seed) = args.seed {
        config = config.with_seed(seed);
    }
    let summary = validate(&config, args.trials, args.paths)?;
    match &args.out {
        Some(path) => std::fs::write(path, summary.to_json()?)?,
        None => println!("{}", summary.to_json()?),
    }
    if !args.quiet {
        eprintln!(
            "trials: {}/{} completed, {} with valid certificates",
            summary.trials_completed, summary.trials_requested, summary.confidence_valid_count,
        );
        eprintln!(
            "mean posterior coverage: {:.4} over {} paths x {} grid points",
            summary.mean_posterior_coverage, summary.paths_per_trial, summary.grid_points,
        );
        if let Some(rate) = summary.truth_coverage_rate {
            eprintln!("truth coverage rate: {rate:.4}");
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Validate(args) => run_validate(args),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
