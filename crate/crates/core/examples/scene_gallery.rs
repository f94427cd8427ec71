//! Renders one positive and one negative scene of every built-in problem as
//! SVG and prints the ground-truth relations of each ordered pair.
//!
//! ```bash
//! cargo run --release --example scene_gallery -- /tmp/gallery
//! ```

use psi::scenegen::{extract_relations, scene_svg, Catalog};
use psi::{Label, Relation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> psi::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "gallery".into());
    std::fs::create_dir_all(&dir)?;
    let catalog = Catalog::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for id in catalog.problem_ids() {
        let spec = catalog.problem(id)?;
        println!("{id} (distinguishing relation: {})", spec.distinguishing_relation.name());
        for label in [Label::Positive, Label::Negative] {
            let scene = catalog.generate(id, label, &mut rng)?;
            let path = format!("{dir}/{id}_{label}.svg");
            std::fs::write(&path, scene_svg(&scene))?;
            for ((a, b), rel) in extract_relations(&scene, &catalog.tolerances)? {
                let shown: Vec<String> = (0..7)
                    .map(|i| format!("{}={:.2}", Relation::from_index(i).expect("relation").name(), rel.values()[i]))
                    .collect();
                println!("  {label:<8} {a}->{b}: {}", shown.join(" "));
            }
            println!("  wrote {path}");
        }
    }
    Ok(())
}
