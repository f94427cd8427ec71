//! One few-shot episode end to end: sample scenes, build object graphs,
//! induce both schemas, classify fresh targets.
//!
//! ```bash
//! cargo run --release --example quickstart -- P-TOUCH 8
//! ```

use psi::features::Extractor;
use psi::harness::{build_episode, generate_scenes};
use psi::optim::AlphaMode;
use psi::psi::{classify, induce_schemas, ModelConfig};
use psi::scenegen::Catalog;
use psi::Relation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> psi::Result<()> {
    let mut args = std::env::args().skip(1);
    let problem = args.next().unwrap_or_else(|| "P-INSIDE".into());
    let shots: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);

    let catalog = Catalog::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let scenes = generate_scenes(&catalog, &problem, shots, 10, &mut rng)?;
    let episode = build_episode(&scenes, Extractor::Object, &catalog, true, 7, &mut rng)?;
    println!(
        "{problem}: {} positives, {} negatives, {} targets, {} nodes per graph",
        episode.positives.len(),
        episode.negatives.len(),
        episode.targets.len(),
        episode.node_count()
    );

    let config = ModelConfig::psi(AlphaMode::Adaptive);
    let model = induce_schemas(&episode, &config, &mut rng)?;
    println!("loss {:.4} -> {:.4} after {} steps", model.loss_trace[0], model.final_loss(), model.steps);
    println!("final alpha {:.3}", model.alpha);
    for (i, w) in model.edge_weights.values().iter().enumerate() {
        println!("  w[{:<18}] = {w:.3}", Relation::from_index(i).expect("relation").name());
    }

    let mut correct = 0;
    for (i, t) in episode.targets.iter().enumerate() {
        let c = classify(&model, &t.graph, &config, &mut rng)?;
        correct += (c.predicted == t.label) as usize;
        println!("target {i}: true {:<8} predicted {:<8} sim+ {:.3} sim- {:.3}", t.label, c.predicted, c.sim_pos, c.sim_neg);
    }
    println!("accuracy {correct}/{}", episode.targets.len());
    Ok(())
}
