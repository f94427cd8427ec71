//! Fixed and adaptive node/edge mixing on one problem: alpha = 1 (objects
//! only), 0.5, 0 (relations only) and the adaptive model.
//!
//! ```bash
//! cargo run --release --example alpha_variants -- P-INSIDE
//! ```

use psi::harness::{run_sweep, ExperimentConfig};
use psi::optim::AlphaMode;
use psi::psi::ModelConfig;
use psi::scenegen::Catalog;

fn main() -> psi::Result<()> {
    let problem = std::env::args().nth(1).unwrap_or_else(|| "P-INSIDE".into());
    let variants = vec![
        ModelConfig::psi(AlphaMode::Fixed(1.0)),
        ModelConfig::psi(AlphaMode::Fixed(0.5)),
        ModelConfig::psi(AlphaMode::Fixed(0.0)),
        ModelConfig::psi(AlphaMode::Adaptive),
    ];
    let config = ExperimentConfig {
        master_seed: 3,
        problems: vec![problem.clone()],
        shot_counts: vec![2, 4, 8],
        seeds: (0..10).collect(),
        variants: variants.clone(),
        noise: true,
        targets_per_episode: 4,
        output_dir: "unused".into(),
        workers: None,
        trace: false,
        timing: false,
        catalog: None,
    };
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let result = run_sweep(&config, &Catalog::builtin(), workers)?;
    println!("{problem}, noise on, 10 episodes x 4 targets per cell");
    println!("{:<16} {:>8} {:>8} {:>8}", "variant", "2 shots", "4 shots", "8 shots");
    for v in &variants {
        let label = v.label();
        let cells: Vec<String> = config
            .shot_counts
            .iter()
            .map(|&s| {
                let rs: Vec<_> = result.records.iter().filter(|r| r.variant == label && r.total_shots == s).collect();
                let acc = rs.iter().map(|r| r.correct as f64).sum::<f64>() / rs.len() as f64;
                format!("{acc:.3}")
            })
            .collect();
        println!("{label:<16} {:>8} {:>8} {:>8}", cells[0], cells[1], cells[2]);
    }
    Ok(())
}
