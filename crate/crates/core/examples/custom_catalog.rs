//! Edits the problem catalog: tighter contact tolerance and a harder
//! P-SAMESIZE (area ratios closer to 1), saved as JSON for `psi generate
//! --catalog` or an experiment config's `catalog` field.
//!
//! ```bash
//! cargo run --example custom_catalog -- /tmp/catalog.json
//! ```

use psi::scenegen::{extract_relations, Catalog};
use psi::{Label, Relation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> psi::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "catalog.json".into());
    let mut catalog = Catalog::builtin();
    catalog.tolerances.touch = 1.0;
    let same_size = catalog.problems.iter_mut().find(|p| p.id == "P-SAMESIZE").expect("built-in problem");
    same_size.size_ratio = Some((1.3, 1.6));
    catalog.validate()?;
    std::fs::write(&path, serde_json::to_string_pretty(&catalog)? + "\n")?;
    let reloaded = Catalog::load(path.as_ref())?;
    assert_eq!(reloaded, catalog);
    println!("wrote {path} (version {}, {} problems)", catalog.version, catalog.problems.len());

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for label in [Label::Positive, Label::Negative] {
        let scene = reloaded.generate("P-SAMESIZE", label, &mut rng)?;
        let areas: Vec<String> = scene.objects.iter().map(|o| format!("{:.0}", o.area())).collect();
        let rel = extract_relations(&scene, &reloaded.tolerances)?;
        println!("{label}: areas {}, sameSize {}", areas.join(" / "), rel[&(0, 1)].get(Relation::SameSize));
    }
    Ok(())
}
