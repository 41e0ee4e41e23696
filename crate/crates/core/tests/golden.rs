//! Golden-file pin of the report schema: the canonical JSON (timings
//! zeroed) of a fixed small analysis must stay byte-identical. Regenerate
//! deliberately with `GPDYN_BLESS=1 cargo test -p gpdyn --test golden`
//! after an intentional schema change.

use gpdyn::confidence::Weights;
use gpdyn::dataio::{Domain, MapFunction, SyntheticSpec};
use gpdyn::gp::KernelConfig;
use gpdyn::pipeline::{run, AnalysisConfig, DataSource};
use std::path::PathBuf;

fn fixture_config() -> AnalysisConfig {
    AnalysisConfig {
        schema_version: 1,
        domain: Domain::new(0.0, 1.0).unwrap(),
        subdivision_exponent: 5,
        delta_total: 0.05,
        budget: None,
        lipschitz_l: 8.0,
        kernel: KernelConfig {
            // fixed length parameter keeps the fixture independent of the
            // optimizer's iteration count
            theta: Some(0.25),
            theta_search_bounds: None,
            jitter: 1e-10,
        },
        data: DataSource::Synthetic(SyntheticSpec {
            function: MapFunction::Logistic { r: 2.5 },
            count: 5,
            seed: 42,
        }),
        weights: Weights::Uniform,
        seed: 42,
        output: None,
    }
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/report_fixture.json")
}

#[test]
fn report_matches_golden_fixture() {
    let analysis = run(&fixture_config()).unwrap();
    let canonical = analysis.report.canonical_json().unwrap();
    let path = golden_path();
    if std::env::var("GPDYN_BLESS").is_ok() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &canonical).unwrap();
        return;
    }
    let golden = std::fs::read_to_string(&path)
        .expect("golden file missing; run with GPDYN_BLESS=1 to create it");
    assert_eq!(
        canonical, golden,
        "report changed; bless deliberately if the schema moved"
    );
}
