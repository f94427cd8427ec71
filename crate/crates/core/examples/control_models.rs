//! PSI against its two controls on every built-in problem: the
//! single-vector prototype over global descriptors and the node-only model
//! over patch descriptors.
//!
//! ```bash
//! cargo run --release --example control_models
//! ```

use psi::harness::{aggregate_curves, run_sweep, ExperimentConfig, POOLED};
use psi::optim::AlphaMode;
use psi::psi::ModelConfig;
use psi::scenegen::Catalog;

fn main() -> psi::Result<()> {
    let catalog = Catalog::builtin();
    let config = ExperimentConfig {
        master_seed: 4,
        problems: catalog.problem_ids().map(String::from).collect(),
        shot_counts: vec![8],
        seeds: (0..10).collect(),
        variants: vec![ModelConfig::psi(AlphaMode::Adaptive), ModelConfig::patches(), ModelConfig::prototype()],
        noise: true,
        targets_per_episode: 4,
        output_dir: "unused".into(),
        workers: None,
        trace: false,
        timing: false,
        catalog: None,
    };
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let result = run_sweep(&config, &catalog, workers)?;
    println!("{:<18} {:<12} {:>6} {:>9} {:>17}", "variant", "problem", "n", "accuracy", "95% interval");
    for r in aggregate_curves(&result.records) {
        let problem = if r.problem_id == POOLED { "(pooled)" } else { r.problem_id.as_str() };
        println!("{:<18} {:<12} {:>6} {:>9.3}   [{:.3}, {:.3}]", r.variant, problem, r.n, r.accuracy, r.ci_low, r.ci_high);
    }
    Ok(())
}
