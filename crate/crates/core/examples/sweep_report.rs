//! A complete sweep on disk: run, aggregate, plot and compare against a
//! human curve. The human curve here is synthetic (a straight line) and only
//! exercises the comparison; supply real data with `psi compare --human`.
//!
//! ```bash
//! cargo run --release --example sweep_report -- /tmp/psi-sweep
//! ```

use std::path::PathBuf;

use psi::harness::{
    compare_variants, read_records, render_plots, run_experiment, Aggregates, ExperimentConfig, HumanCurve, HumanPoint,
    ProblemClass,
};
use psi::optim::AlphaMode;
use psi::psi::ModelConfig;

fn main() -> psi::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "psi-sweep".into()));
    let config = ExperimentConfig {
        master_seed: 1,
        problems: vec!["P-INSIDE".into(), "P-TOUCH".into(), "P-SAMESIZE".into()],
        shot_counts: vec![2, 4, 8, 16],
        seeds: (0..6).collect(),
        variants: vec![
            ModelConfig::psi(AlphaMode::Adaptive),
            ModelConfig::psi(AlphaMode::Fixed(0.0)),
            ModelConfig::psi(AlphaMode::Fixed(1.0)),
            ModelConfig::prototype(),
        ],
        noise: true,
        targets_per_episode: 4,
        output_dir: dir.clone(),
        workers: None,
        trace: false,
        timing: false,
        catalog: None,
    };
    let out = run_experiment(&config)?;
    println!("{} records, {} failed cells", out.record_count, out.failure_count);

    let agg = Aggregates::from_records(&read_records(&out.records)?);
    agg.write(&dir)?;
    for p in render_plots(&agg, &dir)? {
        println!("wrote {}", p.display());
    }

    let synthetic = HumanCurve::new(
        [(2, 0.60), (4, 0.66), (8, 0.72), (16, 0.78)]
            .into_iter()
            .map(|(total_shots, accuracy)| HumanPoint { problem_class: ProblemClass::FirstOrder, total_shots, accuracy })
            .collect(),
    )?;
    println!("{:<20} {:>9} {:>9}  (vs synthetic line)", "variant", "RMSE pp", "MAE pp");
    for row in compare_variants(&agg.curves, &synthetic)? {
        println!("{:<20} {:>9.2} {:>9.2}", row.variant, row.rmse, row.mae);
    }
    Ok(())
}
