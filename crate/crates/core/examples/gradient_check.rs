//! Central finite differences against the reverse-mode gradients of the
//! induction loss, term by term, on random episodes.
//!
//! ```bash
//! cargo run --release --example gradient_check
//! ```

use psi::optim::gradcheck::{check_loss_gradients, random_case};
use psi::optim::{AlphaMode, LossConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> psi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let configs = [
        ("adaptive + contrastive", LossConfig::default()),
        ("alpha 0.5, no contrast", LossConfig { alpha: AlphaMode::Fixed(0.5), contrastive: false, ..LossConfig::default() }),
        ("nodes only", LossConfig { contrastive: false, nodes_only: true, ..LossConfig::default() }),
    ];
    for (name, config) in configs {
        let mut worst = 0.0f64;
        let mut compared = 0;
        for _ in 0..20 {
            let (episode, params) = random_case(&mut rng, 5);
            let g = check_loss_gradients(&params, &episode, &config, 1e-5)?;
            worst = worst.max(g.max_relative_error);
            compared += g.compared;
        }
        println!("{name:<24} {compared:>5} entries compared, max relative error {worst:.2e}");
    }
    Ok(())
}
