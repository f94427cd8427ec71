//! Schema computation, schema induction, classification and the two control
//! models (a single-vector prototype and a patch-node variant).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PsiError, Result};
use crate::features::Extractor;
use crate::optim::{
    adamw_step, loss_and_gradients, project, target_similarity, AdamWConfig, AdamWState, AlphaMode,
    ContinuousMappingMatrix, LossConfig, LossTerms, ParamSet, PermutationMatrix, DEFAULT_MAP_SMOOTHING, MAP_INIT_MAX,
    smooth_map, validate_smoothing,
};
use crate::relgraph::{cosine_similarity, directed_pairs, EdgeWeights, Episode, Label, ObjectGraph, RelationVector};

/// Model family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Object nodes, relation edges, full loss.
    Psi,
    /// Sixteen patch nodes, no edges, node similarity only.
    PsiPatches,
    /// Mean occupancy vector per class, cosine to the target.
    PrototypeGlobal,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Psi => "psi",
            Variant::PsiPatches => "psi-patches",
            Variant::PrototypeGlobal => "prototype-global",
        }
    }

    /// Feature extractor the variant consumes.
    pub fn extractor(self) -> Extractor {
        match self {
            Variant::Psi => Extractor::Object,
            Variant::PsiPatches => Extractor::Patch,
            Variant::PrototypeGlobal => Extractor::Global,
        }
    }
}

fn default_steps() -> usize {
    300
}

fn default_tolerance() -> f64 {
    1e-6
}

fn default_window() -> usize {
    20
}

fn default_true() -> bool {
    true
}

fn default_map_smoothing() -> f64 {
    DEFAULT_MAP_SMOOTHING
}

fn default_alpha() -> AlphaMode {
    AlphaMode::Adaptive
}

/// Settings of one model variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Label used in records; derived from the settings when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub variant: Variant,
    #[serde(default = "default_alpha")]
    pub alpha: AlphaMode,
    #[serde(default = "default_true")]
    pub contrastive: bool,
    /// Optimizer step budget for induction and for each classification.
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Stop once `|Δloss|` stays below this for `early_stop_window` steps.
    #[serde(default = "default_tolerance")]
    pub early_stop_tolerance: f64,
    /// Zero disables early stopping.
    #[serde(default = "default_window")]
    pub early_stop_window: usize,
    #[serde(default)]
    pub optimizer: AdamWConfig,
    /// See [`LossConfig::map_smoothing`]; also used when fitting target maps.
    #[serde(default = "default_map_smoothing")]
    pub map_smoothing: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::psi(AlphaMode::Adaptive)
    }
}

impl ModelConfig {
    pub fn psi(alpha: AlphaMode) -> Self {
        ModelConfig {
            name: None,
            variant: Variant::Psi,
            alpha,
            contrastive: true,
            steps: default_steps(),
            early_stop_tolerance: default_tolerance(),
            early_stop_window: default_window(),
            optimizer: AdamWConfig::default(),
            map_smoothing: DEFAULT_MAP_SMOOTHING,
        }
    }

    pub fn patches() -> Self {
        ModelConfig { variant: Variant::PsiPatches, contrastive: false, ..ModelConfig::psi(AlphaMode::Adaptive) }
    }

    pub fn prototype() -> Self {
        ModelConfig { variant: Variant::PrototypeGlobal, contrastive: false, ..ModelConfig::psi(AlphaMode::Adaptive) }
    }

    pub fn validate(&self) -> Result<()> {
        self.alpha.validate()?;
        self.optimizer.validate()?;
        validate_smoothing(self.map_smoothing)?;
        if !(self.early_stop_tolerance >= 0.0) {
            return Err(PsiError::InvalidConfig(format!(
                "early stop tolerance {} must be non-negative",
                self.early_stop_tolerance
            )));
        }
        if let Some(name) = &self.name {
            if name.is_empty() || name.contains(',') || name.contains('"') || name.contains('\n') {
                return Err(PsiError::InvalidConfig(format!("variant name {name:?} must be non-empty plain text")));
            }
        }
        Ok(())
    }

    /// Record label, e.g. `psi-adaptive`, `psi-alpha0`, `psi-adaptive-nocontrast`.
    pub fn label(&self) -> String {
        if let Some(name) = &self.name {
            return name.clone();
        }
        match self.variant {
            Variant::Psi => {
                let alpha = match self.alpha {
                    AlphaMode::Adaptive => "adaptive".to_string(),
                    AlphaMode::Fixed(a) => format!("alpha{a}"),
                };
                let suffix = if self.contrastive { "" } else { "-nocontrast" };
                format!("psi-{alpha}{suffix}")
            }
            other => other.name().to_string(),
        }
    }

    pub fn loss_config(&self) -> LossConfig {
        LossConfig {
            alpha: self.alpha,
            contrastive: self.contrastive && self.variant == Variant::Psi,
            nodes_only: self.variant == Variant::PsiPatches,
            map_smoothing: self.map_smoothing,
        }
    }

    fn nodes_only(&self) -> bool {
        self.variant == Variant::PsiPatches
    }
}

/// Prototype graph of one class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub prototype: ObjectGraph,
    pub label: Label,
}

/// Average of aligned exemplars: schema node `k` is the mean of the exemplar
/// nodes mapped to `k`; schema edge `(k, l)` is the mean of `w ⊙` the
/// exemplar edges between the nodes mapped to `k` and `l`. Node-only
/// exemplars give a node-only schema.
pub fn compute_schema(exemplars: &[ObjectGraph], maps: &[PermutationMatrix], w: &EdgeWeights) -> Result<ObjectGraph> {
    let Some(first) = exemplars.first() else {
        return Err(PsiError::InvalidEpisode("a schema needs at least one exemplar".into()));
    };
    if maps.len() != exemplars.len() {
        return Err(PsiError::DimensionMismatch(format!("{} maps for {} exemplars", maps.len(), exemplars.len())));
    }
    let (n, dim) = (first.node_count(), first.dim());
    let mut cols = Vec::with_capacity(exemplars.len());
    for (e, (g, p)) in exemplars.iter().zip(maps).enumerate() {
        if g.node_count() != n || g.dim() != dim || g.has_edges() != first.has_edges() {
            return Err(PsiError::InvalidEpisode(format!("exemplar {e} does not match the shape of exemplar 0")));
        }
        if p.rows() != n || p.cols() != n {
            return Err(PsiError::DimensionMismatch(format!("map {e} is {}×{}, expected {n}×{n}", p.rows(), p.cols())));
        }
        let c: Vec<usize> = (0..n)
            .map(|k| p.col_of(k).ok_or_else(|| PsiError::InvalidEpisode(format!("schema node {k} is unmapped in exemplar {e}"))))
            .collect::<Result<_>>()?;
        cols.push(c);
    }
    let k = exemplars.len() as f64;
    let nodes: Vec<Vec<f64>> = (0..n)
        .map(|row| {
            let mut acc = vec![0.0; dim];
            for (g, c) in exemplars.iter().zip(&cols) {
                for (a, x) in acc.iter_mut().zip(g.node(c[row])) {
                    *a += x;
                }
            }
            acc.iter().map(|a| a / k).collect()
        })
        .collect();
    if !first.has_edges() {
        return ObjectGraph::nodes_only(nodes);
    }
    let edges = directed_pairs(n)
        .map(|(a, b)| {
            let mut acc = [0.0; crate::relgraph::NUM_RELATIONS];
            for (g, c) in exemplars.iter().zip(&cols) {
                let e = w.apply(g.edge(c[a], c[b]).expect("dense edges"));
                for (x, v) in acc.iter_mut().zip(e) {
                    *x += v;
                }
            }
            RelationVector::new(acc.map(|x| x / k))
        })
        .collect::<Result<Vec<_>>>()?;
    ObjectGraph::from_dense(nodes, edges)
}

/// State reported to an observer after each loss evaluation.
#[derive(Debug)]
pub struct StepInfo<'a> {
    /// Number of optimizer updates applied so far.
    pub step: usize,
    pub terms: &'a LossTerms,
    /// Projected maps at this step, schema–schema map last.
    pub projections: &'a [PermutationMatrix],
    pub params: &'a ParamSet,
}

/// Result of schema induction.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel {
    pub schema_pos: Schema,
    pub schema_neg: Schema,
    pub alpha: f64,
    pub edge_weights: EdgeWeights,
    pub final_params: ParamSet,
    /// Loss at every evaluated parameter state, initial state first.
    pub loss_trace: Vec<f64>,
    pub alpha_trace: Vec<f64>,
    pub weight_trace: Vec<[f64; 7]>,
    /// Optimizer updates applied.
    pub steps: usize,
    pub nodes_only: bool,
}

/// Serializable digest of a trained model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub alpha: f64,
    pub edge_weights: [f64; 7],
    pub steps: usize,
    pub final_loss: f64,
    pub loss_trace: Vec<f64>,
    pub schema_pos: ObjectGraph,
    pub schema_neg: ObjectGraph,
}

impl TrainedModel {
    pub fn final_loss(&self) -> f64 {
        *self.loss_trace.last().expect("at least one evaluation")
    }

    pub fn summary(&self) -> ModelSummary {
        ModelSummary {
            alpha: self.alpha,
            edge_weights: *self.edge_weights.values(),
            steps: self.steps,
            final_loss: self.final_loss(),
            loss_trace: self.loss_trace.clone(),
            schema_pos: self.schema_pos.prototype.clone(),
            schema_neg: self.schema_neg.prototype.clone(),
        }
    }
}

struct EarlyStop {
    tolerance: f64,
    window: usize,
    calm: usize,
    last: Option<f64>,
}

impl EarlyStop {
    fn new(config: &ModelConfig) -> Self {
        EarlyStop { tolerance: config.early_stop_tolerance, window: config.early_stop_window, calm: 0, last: None }
    }

    /// Records a loss; true once the change stayed small for the full window.
    fn update(&mut self, loss: f64) -> bool {
        if let Some(prev) = self.last {
            if (loss - prev).abs() < self.tolerance {
                self.calm += 1;
            } else {
                self.calm = 0;
            }
        }
        self.last = Some(loss);
        self.window > 0 && self.calm >= self.window
    }
}

/// Jointly optimizes mappings, alpha and edge weights for an episode.
pub fn induce_schemas(episode: &Episode, config: &ModelConfig, rng: &mut impl Rng) -> Result<TrainedModel> {
    induce_schemas_observed(episode, config, rng, |_| {})
}

/// [`induce_schemas`] calling `observer` after every loss evaluation.
pub fn induce_schemas_observed(
    episode: &Episode,
    config: &ModelConfig,
    rng: &mut impl Rng,
    mut observer: impl FnMut(&StepInfo),
) -> Result<TrainedModel> {
    if config.variant == Variant::PrototypeGlobal {
        return Err(PsiError::InvalidConfig("the prototype model has no schemas to induce".into()));
    }
    config.validate()?;
    episode.validate()?;
    let loss_config = config.loss_config();
    let mut params = ParamSet::init(episode.node_count(), episode.positives.len(), episode.negatives.len(), rng);
    let mut state = AdamWState::new(params.len());
    let mut stop = EarlyStop::new(config);
    let (mut loss_trace, mut alpha_trace, mut weight_trace) = (Vec::new(), Vec::new(), Vec::new());
    let mut steps = 0;
    loop {
        let eval = loss_and_gradients(&params, episode, &loss_config)?;
        let projections = params.projections();
        observer(&StepInfo { step: steps, terms: &eval.terms, projections: &projections, params: &params });
        loss_trace.push(eval.terms.loss);
        alpha_trace.push(eval.terms.alpha);
        weight_trace.push(*eval.terms.weights.values());
        if stop.update(eval.terms.loss) || steps == config.steps {
            break;
        }
        adamw_step(params.as_mut_slice(), &eval.grads, &mut state, &config.optimizer);
        if let Some(i) = params.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(PsiError::NonFinite(format!("{} after step {}", params.name(i), steps + 1)));
        }
        steps += 1;
    }

    let projections = params.projections();
    let exemplar_maps = params.exemplar_maps();
    let positives = params.positives();
    let w = if config.nodes_only() { EdgeWeights::uniform() } else { params.edge_weights() };
    let schema_pos = compute_schema(&episode.positives, &projections[..positives], &w)?;
    let schema_neg = compute_schema(&episode.negatives, &projections[positives..exemplar_maps], &w)?;
    Ok(TrainedModel {
        schema_pos: Schema { prototype: schema_pos, label: Label::Positive },
        schema_neg: Schema { prototype: schema_neg, label: Label::Negative },
        alpha: *alpha_trace.last().expect("evaluated"),
        edge_weights: w,
        final_params: params,
        loss_trace,
        alpha_trace,
        weight_trace,
        steps,
        nodes_only: config.nodes_only(),
    })
}

/// Outcome of classifying one target.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub predicted: Label,
    pub sim_pos: f64,
    pub sim_neg: f64,
}

/// Higher similarity wins; ties go to positive.
pub fn decide(sim_pos: f64, sim_neg: f64) -> Label {
    if sim_pos >= sim_neg {
        Label::Positive
    } else {
        Label::Negative
    }
}

/// Optimizes a fresh target map against a frozen schema; returns the
/// similarity at the final projection.
fn fit_target(
    model: &TrainedModel,
    schema: &ObjectGraph,
    target: &ObjectGraph,
    init: &[f64],
    config: &ModelConfig,
) -> Result<f64> {
    let n = schema.node_count();
    let mut m = init.to_vec();
    let mut state = AdamWState::new(m.len());
    let mut stop = EarlyStop::new(config);
    let mut steps = 0;
    loop {
        let p = project(&ContinuousMappingMatrix::new(n, n, m.clone())?);
        let (sim, grad) = target_similarity(&p.to_dense(), schema, target, model.alpha, &model.edge_weights, model.nodes_only)?;
        let eps = config.map_smoothing;
        let grad = if eps > 0.0 {
            let smoothed = smooth_map(&p.to_dense(), n, eps);
            target_similarity(&smoothed, schema, target, model.alpha, &model.edge_weights, model.nodes_only)?.1
        } else {
            grad
        };
        if stop.update(-sim) || steps == config.steps {
            return Ok(sim);
        }
        let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
        adamw_step(&mut m, &neg, &mut state, &config.optimizer);
        steps += 1;
    }
}

/// Classifies `target` by the schema it is more similar to. Each schema gets
/// a fresh map from the same random initialization, optimized with the same
/// optimizer and budget as induction while schemas, alpha and weights stay
/// frozen.
pub fn classify(model: &TrainedModel, target: &ObjectGraph, config: &ModelConfig, rng: &mut impl Rng) -> Result<Classification> {
    let n = model.schema_pos.prototype.node_count();
    if target.node_count() != n {
        return Err(PsiError::InvalidEpisode(format!(
            "target has {} nodes but the schemas have {n}; unequal node counts are not supported",
            target.node_count()
        )));
    }
    let init: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.0..MAP_INIT_MAX)).collect();
    let sim_pos = fit_target(model, &model.schema_pos.prototype, target, &init, config)?;
    let sim_neg = fit_target(model, &model.schema_neg.prototype, target, &init, config)?;
    Ok(Classification { predicted: decide(sim_pos, sim_neg), sim_pos, sim_neg })
}

fn mean_vector(vs: &[Vec<f64>]) -> Result<Vec<f64>> {
    let Some(first) = vs.first() else {
        return Err(PsiError::InvalidEpisode("a prototype needs at least one exemplar".into()));
    };
    let mut acc = vec![0.0; first.len()];
    for v in vs {
        if v.len() != acc.len() {
            return Err(PsiError::DimensionMismatch(format!("descriptor lengths {} and {}", v.len(), acc.len())));
        }
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    Ok(acc.iter().map(|a| a / vs.len() as f64).collect())
}

/// Single-vector control: cosine of the target descriptor to the mean
/// descriptor of each class; ties go to positive.
pub fn baseline_prototype(positives: &[Vec<f64>], negatives: &[Vec<f64>], target: &[f64]) -> Result<Classification> {
    let (pp, pn) = (mean_vector(positives)?, mean_vector(negatives)?);
    let sim_pos = cosine_similarity(target, &pp)?;
    let sim_neg = cosine_similarity(target, &pn)?;
    Ok(Classification { predicted: decide(sim_pos, sim_neg), sim_pos, sim_neg })
}

/// Patch control: node-only schema induction over edgeless patch graphs, then
/// classification by node similarity.
pub fn baseline_patches(
    episode: &Episode,
    target: &ObjectGraph,
    config: &ModelConfig,
    rng: &mut impl Rng,
) -> Result<(TrainedModel, Classification)> {
    let config = ModelConfig { variant: Variant::PsiPatches, ..config.clone() };
    let model = induce_schemas(episode, &config, rng)?;
    let c = classify(&model, target, &config, rng)?;
    Ok((model, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::gradcheck::random_graph;
    use crate::relgraph::{EpisodeMeta, NUM_RELATIONS};
    use rand::SeedableRng;

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(seed)
    }

    fn all_orders(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_orders(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn weighted(g: &ObjectGraph, w: &EdgeWeights) -> ObjectGraph {
        ObjectGraph::new(g.nodes().to_vec(), g.edges().map(|(p, e)| (p, RelationVector::new(w.apply(e)).unwrap()))).unwrap()
    }

    #[test]
    fn schema_examples() {
        let g = random_graph(&mut rng(1), 2, 3);
        let w = EdgeWeights::uniform();
        let id = PermutationMatrix::identity(2);
        let s = compute_schema(std::slice::from_ref(&g), std::slice::from_ref(&id), &w).unwrap();
        assert_eq!(s.nodes(), g.nodes());
        for ((_, a), (_, b)) in s.edges().zip(g.edges()) {
            for r in 0..NUM_RELATIONS {
                assert!((a.values()[r] - b.values()[r] / 7.0).abs() < 1e-15);
            }
        }

        let s2 = compute_schema(&[g.clone(), g.clone()], &[id.clone(), id.clone()], &w).unwrap();
        assert_eq!(s2.nodes(), g.nodes());

        let swapped = g.permuted(&[1, 0]).unwrap();
        let swap = PermutationMatrix::from_order(&[1, 0]).unwrap();
        let s3 = compute_schema(&[g.clone(), swapped], &[id, swap], &w).unwrap();
        let want = weighted(&g, &w);
        for (a, b) in s3.nodes().iter().flatten().zip(want.nodes().iter().flatten()) {
            assert!((a - b).abs() < 1e-15);
        }
        for ((_, a), (_, b)) in s3.edges().zip(want.edges()) {
            for r in 0..NUM_RELATIONS {
                assert!((a.values()[r] - b.values()[r]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn schema_rejects_malformed_inputs() {
        let g = random_graph(&mut rng(2), 3, 2);
        let w = EdgeWeights::uniform();
        assert!(compute_schema(std::slice::from_ref(&g), &[], &w).is_err());
        assert!(compute_schema(&[], &[], &w).is_err());
        assert!(compute_schema(&[g], &[PermutationMatrix::identity(2)], &w).is_err());
    }

    #[test]
    fn schema_is_idempotent_over_identical_exemplars() {
        let mut r = rng(3);
        for k in 1..=5 {
            let g = random_graph(&mut r, 3, 4);
            let w = EdgeWeights::from_logits(&std::array::from_fn(|i| i as f64 * 0.3 - 1.0));
            let schema = compute_schema(&vec![g.clone(); k], &vec![PermutationMatrix::identity(3); k], &w).unwrap();
            let want = weighted(&g, &w);
            for (a, b) in schema.nodes().iter().flatten().zip(want.nodes().iter().flatten()) {
                assert!((a - b).abs() < 1e-12);
            }
            for ((_, a), (_, b)) in schema.edges().zip(want.edges()) {
                assert!(a.values().iter().zip(b.values()).all(|(x, y)| (x - y).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn schema_is_invariant_under_relabeling() {
        let mut r = rng(4);
        let w = EdgeWeights::from_logits(&[0.2, -0.1, 0.4, 0.0, -0.3, 0.1, 0.05]);
        for n in 2..=4 {
            let exemplars: Vec<ObjectGraph> = (0..2).map(|_| random_graph(&mut r, n, 3)).collect();
            let orders = all_orders(n);
            let maps = vec![PermutationMatrix::from_order(&orders[1 % orders.len()]).unwrap(), PermutationMatrix::identity(n)];
            let reference = compute_schema(&exemplars, &maps, &w).unwrap();
            for order in &orders {
                let relabeled = vec![exemplars[0].permuted(order).unwrap(), exemplars[1].clone()];
                let composed = vec![maps[0].relabel_columns(order).unwrap(), maps[1].clone()];
                assert_eq!(compute_schema(&relabeled, &composed, &w).unwrap(), reference);
            }
        }
    }

    #[test]
    fn identical_classes_reach_perfect_similarity() {
        let g = random_graph(&mut rng(5), 2, 4);
        let ep = Episode::new(vec![g.clone(), g.permuted(&[1, 0]).unwrap()], vec![g.clone(), g], vec![], EpisodeMeta::default()).unwrap();
        let config = ModelConfig { contrastive: false, ..ModelConfig::default() };
        let mut last = None;
        let model = induce_schemas_observed(&ep, &config, &mut rng(0), |s| last = Some((s.terms.g_pos, s.terms.g_neg))).unwrap();
        assert!(model.final_loss() <= model.loss_trace[0]);
        let (gp, gn) = last.unwrap();
        assert!(gp >= 0.99 && gn >= 0.99, "{gp} {gn}");
    }

    #[test]
    fn fixed_alpha_is_returned_exactly() {
        let mut r = rng(6);
        let ep = Episode::new(
            (0..2).map(|_| random_graph(&mut r, 2, 4)).collect(),
            (0..2).map(|_| random_graph(&mut r, 2, 4)).collect(),
            vec![],
            EpisodeMeta::default(),
        )
        .unwrap();
        let config = ModelConfig { steps: 20, ..ModelConfig::psi(AlphaMode::Fixed(1.0)) };
        let model = induce_schemas(&ep, &config, &mut rng(1)).unwrap();
        assert_eq!(model.alpha, 1.0);
        assert!(model.alpha_trace.iter().all(|&a| a == 1.0));
    }

    #[test]
    fn classification_prefers_the_matching_schema() {
        let mut r = rng(7);
        let pos = random_graph(&mut r, 3, 4);
        let neg = random_graph(&mut r, 3, 4);
        let ep = Episode::new(vec![pos.clone()], vec![neg], vec![], EpisodeMeta::default()).unwrap();
        let config = ModelConfig { steps: 30, ..ModelConfig::default() };
        let model = induce_schemas(&ep, &config, &mut rng(2)).unwrap();
        let target = pos.permuted(&[2, 0, 1]).unwrap();
        let c = classify(&model, &target, &config, &mut rng(3)).unwrap();
        assert_eq!(c.predicted, Label::Positive);
        assert!(c.sim_pos >= c.sim_neg);
        assert_eq!(classify(&model, &target, &config, &mut rng(3)).unwrap(), c);
        let wrong = random_graph(&mut r, 2, 4);
        assert!(classify(&model, &wrong, &config, &mut rng(3)).is_err());
    }

    #[test]
    fn ties_go_to_positive() {
        assert_eq!(decide(0.4, 0.4), Label::Positive);
        assert_eq!(decide(0.3, 0.4), Label::Negative);
        let v = vec![vec![1.0, 2.0]];
        assert_eq!(baseline_prototype(&v, &v, &[0.5, 0.1]).unwrap().predicted, Label::Positive);
    }

    #[test]
    fn prototype_examples() {
        let pos = vec![vec![1.0, 0.0, 1.0]];
        let neg = vec![vec![0.0, 1.0, 0.0]];
        let c = baseline_prototype(&pos, &neg, &[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(c.predicted, Label::Positive);
        assert!((c.sim_pos - 1.0).abs() < 1e-12 && c.sim_neg < 1.0);
    }

    #[test]
    fn patch_model_is_node_only() {
        let mut r = rng(8);
        let g = |r: &mut rand_chacha::ChaCha8Rng| {
            ObjectGraph::nodes_only((0..16).map(|_| (0..4).map(|_| r.random::<f64>()).collect()).collect()).unwrap()
        };
        let ep = Episode::new(vec![g(&mut r), g(&mut r)], vec![g(&mut r), g(&mut r)], vec![], EpisodeMeta::default()).unwrap();
        let target = ep.positives[0].clone();
        let config = ModelConfig { steps: 15, ..ModelConfig::patches() };
        let (model, c) = baseline_patches(&ep, &target, &config, &mut r).unwrap();
        assert!(model.nodes_only && !model.schema_pos.prototype.has_edges());
        assert!(c.sim_pos.is_finite() && c.sim_neg.is_finite());
    }

    #[test]
    fn config_labels_and_serde() {
        assert_eq!(ModelConfig::default().label(), "psi-adaptive");
        assert_eq!(ModelConfig::psi(AlphaMode::Fixed(0.0)).label(), "psi-alpha0");
        assert_eq!(ModelConfig { contrastive: false, ..ModelConfig::psi(AlphaMode::Fixed(0.5)) }.label(), "psi-alpha0.5-nocontrast");
        assert_eq!(ModelConfig::prototype().label(), "prototype-global");
        let parsed: ModelConfig = serde_json::from_str(r#"{"variant": "psi", "alpha": {"fixed": 0.5}}"#).unwrap();
        assert_eq!(parsed.alpha, AlphaMode::Fixed(0.5));
        assert_eq!(parsed.steps, 300);
        assert!(parsed.contrastive);
        let parsed: ModelConfig = serde_json::from_str(r#"{"variant": "psi-patches", "alpha": "adaptive"}"#).unwrap();
        assert_eq!(parsed.variant.extractor(), Extractor::Patch);
        assert!(serde_json::from_str::<ModelConfig>(r#"{"variant": "psi", "bogus": 1}"#).is_err());
        assert!(ModelConfig::psi(AlphaMode::Fixed(2.0)).validate().is_err());
        assert_eq!(Variant::Psi.extractor(), Extractor::Object);
    }
}
