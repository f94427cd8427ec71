//! Scene sampling for episodes, conversion to graphs, and the episode JSON
//! format.
//!
//! ```json
//! {"problem_id": "P-INSIDE", "seed": 7, "extractor": "object", "noise": false,
//!  "distinguishing_relation": "inside",
//!  "positives": [<graph>, ...], "negatives": [<graph>, ...],
//!  "targets": [{"label": "positive", "graph": <graph>}, ...]}
//! ```
//!
//! Graphs use the `{"nodes": ..., "edges": ...}` layout of
//! [`ObjectGraph`]'s serde form. Global descriptors are stored as one-node
//! edgeless graphs.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PsiError, Result};
use crate::features::{global_descriptor, scene_to_graph, scene_to_patch_graph, Extractor};
use crate::relgraph::{Episode, EpisodeMeta, Label, ObjectGraph, Relation, Target};
use crate::scenegen::{Catalog, Scene};

/// Scenes of one episode.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeScenes {
    pub problem_id: String,
    pub positives: Vec<Scene>,
    pub negatives: Vec<Scene>,
    /// Even indices are positive, odd negative.
    pub targets: Vec<Scene>,
}

/// Label of target `i`: alternating, starting positive.
pub fn target_label(i: usize) -> Label {
    if i.is_multiple_of(2) {
        Label::Positive
    } else {
        Label::Negative
    }
}

/// Samples `total_shots / 2` scenes per class, then the targets.
pub fn generate_scenes(
    catalog: &Catalog,
    problem: &str,
    total_shots: usize,
    targets: usize,
    rng: &mut impl Rng,
) -> Result<EpisodeScenes> {
    if total_shots < 2 || !total_shots.is_multiple_of(2) {
        return Err(PsiError::InvalidConfig(format!("shot count {total_shots} must be even and at least 2")));
    }
    let k = total_shots / 2;
    let mut draw = |label, count| (0..count).map(|_| catalog.generate(problem, label, rng)).collect::<Result<Vec<_>>>();
    let positives = draw(Label::Positive, k)?;
    let negatives = draw(Label::Negative, k)?;
    let targets = (0..targets).map(|i| catalog.generate(problem, target_label(i), rng)).collect::<Result<Vec<_>>>()?;
    Ok(EpisodeScenes { problem_id: problem.to_string(), positives, negatives, targets })
}

/// Graph of one scene under an extractor. Relation noise applies to object
/// graphs only.
pub fn scene_graph(scene: &Scene, extractor: Extractor, catalog: &Catalog, noise: bool, rng: &mut impl Rng) -> Result<ObjectGraph> {
    match extractor {
        Extractor::Object => scene_to_graph(scene, &catalog.tolerances, noise.then_some(&catalog.noise), rng),
        Extractor::Patch => scene_to_patch_graph(scene),
        Extractor::Global => ObjectGraph::nodes_only(vec![global_descriptor(scene)]),
    }
}

/// Converts every scene of an episode, in support-then-target order.
pub fn build_episode(
    scenes: &EpisodeScenes,
    extractor: Extractor,
    catalog: &Catalog,
    noise: bool,
    seed: u64,
    rng: &mut impl Rng,
) -> Result<Episode> {
    let mut convert = |s: &Scene| scene_graph(s, extractor, catalog, noise, rng);
    let positives = scenes.positives.iter().map(&mut convert).collect::<Result<Vec<_>>>()?;
    let negatives = scenes.negatives.iter().map(&mut convert).collect::<Result<Vec<_>>>()?;
    let targets = scenes
        .targets
        .iter()
        .map(|s| Ok(Target { graph: convert(s)?, label: s.label }))
        .collect::<Result<Vec<_>>>()?;
    let distinguishing = catalog.problem(&scenes.problem_id)?.distinguishing_relation;
    Episode::new(
        positives,
        negatives,
        targets,
        EpisodeMeta { problem_id: scenes.problem_id.clone(), seed, distinguishing_relation: Some(distinguishing) },
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct TargetRepr {
    label: Label,
    graph: ObjectGraph,
}

/// On-disk form of an episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeFile {
    pub problem_id: String,
    pub seed: u64,
    pub extractor: Extractor,
    pub noise: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distinguishing_relation: Option<Relation>,
    positives: Vec<ObjectGraph>,
    negatives: Vec<ObjectGraph>,
    targets: Vec<TargetRepr>,
}

impl EpisodeFile {
    pub fn new(episode: &Episode, extractor: Extractor, noise: bool) -> Self {
        EpisodeFile {
            problem_id: episode.meta.problem_id.clone(),
            seed: episode.meta.seed,
            extractor,
            noise,
            distinguishing_relation: episode.meta.distinguishing_relation,
            positives: episode.positives.clone(),
            negatives: episode.negatives.clone(),
            targets: episode.targets.iter().map(|t| TargetRepr { label: t.label, graph: t.graph.clone() }).collect(),
        }
    }

    pub fn into_episode(self) -> Result<Episode> {
        Episode::new(
            self.positives,
            self.negatives,
            self.targets.into_iter().map(|t| Target { graph: t.graph, label: t.label }).collect(),
            EpisodeMeta {
                problem_id: self.problem_id,
                seed: self.seed,
                distinguishing_relation: self.distinguishing_relation,
            },
        )
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn episode_round_trips_through_json() {
        let catalog = Catalog::builtin();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let scenes = generate_scenes(&catalog, "P-TOUCH", 4, 3, &mut rng).unwrap();
        assert_eq!((scenes.positives.len(), scenes.negatives.len(), scenes.targets.len()), (2, 2, 3));
        assert_eq!(scenes.targets.iter().map(|s| s.label).collect::<Vec<_>>(), [Label::Positive, Label::Negative, Label::Positive]);
        for extractor in [Extractor::Object, Extractor::Patch, Extractor::Global] {
            let ep = build_episode(&scenes, extractor, &catalog, true, 3, &mut rng).unwrap();
            let file = EpisodeFile::new(&ep, extractor, true);
            let text = serde_json::to_string(&file).unwrap();
            let back: EpisodeFile = serde_json::from_str(&text).unwrap();
            assert_eq!(back.clone().into_episode().unwrap(), ep);
            assert_eq!(back.distinguishing_relation, Some(Relation::Touching));
        }
        assert!(generate_scenes(&catalog, "P-TOUCH", 3, 1, &mut rng).is_err());
    }
}
