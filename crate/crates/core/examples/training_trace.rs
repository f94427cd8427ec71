//! Watches induction step by step through the observer hook: loss, alpha,
//! the distinguishing relation's weight, and how many exemplar maps change
//! their projection.
//!
//! ```bash
//! cargo run --release --example training_trace -- P-REFLECT model.json
//! ```

use psi::features::Extractor;
use psi::harness::{build_episode, generate_scenes};
use psi::optim::AlphaMode;
use psi::psi::{induce_schemas_observed, ModelConfig};
use psi::scenegen::Catalog;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> psi::Result<()> {
    let problem = std::env::args().nth(1).unwrap_or_else(|| "P-REFLECT".into());
    let catalog = Catalog::builtin();
    let relation = catalog.problem(&problem)?.distinguishing_relation;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let scenes = generate_scenes(&catalog, &problem, 8, 1, &mut rng)?;
    let episode = build_episode(&scenes, Extractor::Object, &catalog, false, 11, &mut rng)?;

    let config = ModelConfig { early_stop_window: 0, ..ModelConfig::psi(AlphaMode::Adaptive) };
    let mut previous: Option<Vec<_>> = None;
    println!("{:>5} {:>9} {:>7} {:>7} {:>7} {:>6}", "step", "loss", "G+", "alpha", relation.name(), "flips");
    let model = induce_schemas_observed(&episode, &config, &mut rng, |s| {
        let flips = previous.as_ref().map_or(0, |p: &Vec<_>| p.iter().zip(s.projections).filter(|(a, b)| a != b).count());
        previous = Some(s.projections.to_vec());
        if s.step % 25 == 0 {
            println!(
                "{:>5} {:>9.4} {:>7.3} {:>7.3} {:>7.3} {:>6}",
                s.step,
                s.terms.loss,
                s.terms.g_pos,
                s.terms.alpha,
                s.terms.weights.get(relation),
                flips
            );
        }
    })?;
    println!("largest weight: {} ({:.3})", model.edge_weights.argmax().name(), model.edge_weights.get(model.edge_weights.argmax()));
    if let Some(path) = std::env::args().nth(2) {
        std::fs::write(&path, serde_json::to_string_pretty(&model.summary())?)?;
        println!("wrote {path}");
    }
    Ok(())
}
