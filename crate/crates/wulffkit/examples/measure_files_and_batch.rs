//! Round-trips a measure through the JSON file format and drives the batch
//! verification harness programmatically, rendering the report as CSV.

use wulffkit::cli::{
    load_measure, render, run, save_measure, OutputFormat, RunConfig, Suite,
};
use wulffkit::measures::gen_random_isotropic_fcentered;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir();
    let path = dir.join("example_measure.json");

    let (m, f) = gen_random_isotropic_fcentered(2, 12, (0.8, 1.2), 1)?;
    save_measure(&path, &m, &f)?;
    let (m2, f2) = load_measure(&path)?;
    assert_eq!(m.weights(), m2.weights(), "weights survive the round trip");
    assert_eq!(f.values(), f2.values(), "f values survive the round trip");
    println!("measure round-trip through {} ok", path.display());

    let config = RunConfig {
        suite: Suite::Wulff,
        dim: 2,
        trials: 5,
        seed: 123,
        eq_tol: 1e-7,
        hyp_tol: 1e-7,
        solver_tol: 1e-10,
        format: OutputFormat::Csv,
        out: None,
        measure: None,
    };
    let report = run(&config)?;
    println!(
        "suite ran {} reports, min gap {:.3e}, failures: {}",
        report.summary.report_count,
        report.summary.min_gap,
        report.summary.failures.len()
    );
    println!("{}", render(&report, OutputFormat::Csv));
    Ok(())
}
