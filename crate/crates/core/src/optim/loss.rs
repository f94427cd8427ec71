//! The induction loss and its gradients.
//!
//! Every similarity term is written as a mapping-weighted mean, e.g.
//! `G_nodes = Σ P_kj cos(s_k, x_j) / Σ P_kj`. At a permutation this is the
//! plain mean over mapped pairs; away from one it is a smooth function of the
//! mapping entries. The forward pass evaluates it at the projected 0/1
//! matrices and the backward pass hands the gradients with respect to those
//! entries to the continuous matrices unchanged (straight-through).

use serde::{Deserialize, Serialize};

use super::params::ParamSet;
use super::tape::{cosine_with_partials, sigmoid, Tape, Var};
use crate::error::{PsiError, Result};
use crate::relgraph::{directed_pairs, EdgeWeights, Episode, ObjectGraph, NUM_RELATIONS};

const MIN_MASS: f64 = 1e-12;

/// How `alpha` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaMode {
    /// `sigmoid(alpha logit)`, learned.
    Adaptive,
    /// Held at the given value in `[0, 1]`.
    Fixed(f64),
}

impl AlphaMode {
    pub fn validate(self) -> Result<()> {
        match self {
            AlphaMode::Fixed(a) if !(0.0..=1.0).contains(&a) => {
                Err(PsiError::InvalidConfig(format!("fixed alpha {a} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }

    /// Value of alpha for a given logit.
    pub fn resolve(self, logit: f64) -> f64 {
        match self {
            AlphaMode::Adaptive => sigmoid(logit),
            AlphaMode::Fixed(a) => a,
        }
    }
}

/// Which terms enter the loss.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub alpha: AlphaMode,
    /// Include the schema–schema terms `−G^C_nodes + G^C_edges`.
    pub contrastive: bool,
    /// Node similarity only (`−G^P_nodes − G^N_nodes`); edges, alpha and the
    /// contrastive terms are ignored.
    pub nodes_only: bool,
    /// Map gradients are taken at `(1 − ε)·P + ε/n` instead of at the
    /// projection `P` itself. At a permutation the gradient cannot see moves
    /// that need two entries to change together (for two nodes, every
    /// edge-only move), so those maps would never leave their initial
    /// projection. Zero gives the plain straight-through gradient.
    #[serde(default = "default_map_smoothing")]
    pub map_smoothing: f64,
}

/// Default [`LossConfig::map_smoothing`].
pub const DEFAULT_MAP_SMOOTHING: f64 = 0.1;

fn default_map_smoothing() -> f64 {
    DEFAULT_MAP_SMOOTHING
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig { alpha: AlphaMode::Adaptive, contrastive: true, nodes_only: false, map_smoothing: DEFAULT_MAP_SMOOTHING }
    }
}

/// Checks `0 ≤ eps < 1`.
pub fn validate_smoothing(eps: f64) -> Result<()> {
    if (0.0..1.0).contains(&eps) {
        Ok(())
    } else {
        Err(PsiError::InvalidConfig(format!("map smoothing {eps} must lie in [0, 1)")))
    }
}

/// `(1 − eps)·p + eps/n` for a dense n × n map.
pub fn smooth_map(p: &[f64], n: usize, eps: f64) -> Vec<f64> {
    p.iter().map(|x| (1.0 - eps) * x + eps / n as f64).collect()
}

/// Forward values of one loss evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct LossTerms {
    pub loss: f64,
    /// Mean graph similarity of the positive exemplars to their schema.
    pub g_pos: f64,
    pub g_neg: f64,
    /// Schema–schema node similarity, when the contrastive terms are on.
    pub contrastive_nodes: Option<f64>,
    pub contrastive_edges: Option<f64>,
    pub alpha: f64,
    pub weights: EdgeWeights,
}

/// Loss terms plus gradients laid out like the [`ParamSet`].
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub terms: LossTerms,
    pub grads: Vec<f64>,
}

/// Straight-through loss: maps are projected to permutations and the relaxed
/// loss is evaluated there. Its gradients become the gradients of the
/// continuous entries, except that map gradients come from the smoothed
/// projection (see [`LossConfig::map_smoothing`]). Alpha and edge-weight
/// gradients always use the exact projection.
pub fn loss_and_gradients(params: &ParamSet, episode: &Episode, config: &LossConfig) -> Result<Evaluation> {
    validate_smoothing(config.map_smoothing)?;
    let projected = params.projected();
    let exact = relaxed_loss(&projected, episode, config)?;
    if config.map_smoothing == 0.0 {
        return Ok(exact);
    }
    let smooth = relaxed_loss(&projected.smoothed(config.map_smoothing), episode, config)?.grads;
    let mut grads = exact.grads;
    let maps = params.alpha_index();
    grads[..maps].copy_from_slice(&smooth[..maps]);
    Ok(Evaluation { terms: exact.terms, grads })
}


/// Loss with the mapping entries of `values` used directly as (relaxed)
/// mapping weights. Equals the true loss whenever every map is a permutation.
pub fn relaxed_loss(values: &ParamSet, episode: &Episode, config: &LossConfig) -> Result<Evaluation> {
    episode.validate()?;
    config.alpha.validate()?;
    let n = episode.node_count();
    if values.node_count() != n
        || values.positives() != episode.positives.len()
        || values.negatives() != episode.negatives.len()
    {
        return Err(PsiError::DimensionMismatch(format!(
            "parameters for {} nodes with {}+{} exemplars, episode has {} nodes with {}+{}",
            values.node_count(),
            values.positives(),
            values.negatives(),
            n,
            episode.positives.len(),
            episode.negatives.len()
        )));
    }
    if !config.nodes_only && !episode.positives[0].has_edges() {
        return Err(PsiError::EmptyAlignment("edge"));
    }

    let mut t = Tape::new();
    // leaf i is parameter i, so adjoints read back in layout order
    let leaves = t.leaves(values.as_slice());
    let nn = n * n;
    let map = |i: usize| &leaves[values.map_offset(i)..values.map_offset(i) + nn];
    let logits = &leaves[values.edge_logit_offset()..values.edge_logit_offset() + NUM_RELATIONS];
    let alpha = match config.alpha {
        AlphaMode::Adaptive => t.sigmoid(leaves[values.alpha_index()]),
        AlphaMode::Fixed(a) => t.leaf(a),
    };
    let w = if config.nodes_only { None } else { Some(t.softmax(logits)) };

    let positives = values.positives();
    let pos_maps: Vec<&[Var]> = (0..positives).map(map).collect();
    let neg_maps: Vec<&[Var]> = (positives..values.exemplar_maps()).map(map).collect();
    let pos = class_terms(&mut t, &episode.positives, &pos_maps, w.as_deref(), alpha, n)?;
    let neg = class_terms(&mut t, &episode.negatives, &neg_maps, w.as_deref(), alpha, n)?;

    let mut loss_terms = vec![(pos.similarity, -1.0), (neg.similarity, -1.0)];
    let (mut cn, mut ce) = (None, None);
    if config.contrastive && !config.nodes_only {
        let q = map(values.exemplar_maps());
        let gn = node_sim(&mut t, q, &pos.schema.nodes, &neg.schema.nodes)?;
        let ge = edge_sim(&mut t, q, &pos.schema.edges, &neg.schema.edges, n)?;
        loss_terms.push((gn, -1.0));
        loss_terms.push((ge, 1.0));
        cn = Some(t.value(gn));
        ce = Some(t.value(ge));
    }
    let loss = t.linear(&loss_terms);

    let value = t.value(loss);
    if !value.is_finite() {
        return Err(PsiError::NonFinite(format!("loss evaluated to {value}")));
    }
    let adj = t.backward(loss);
    let grads: Vec<f64> = leaves.iter().map(|v| adj[v.index()]).collect();
    if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
        return Err(PsiError::NonFinite(format!("gradient of {} is {}", values.name(i), grads[i])));
    }
    let alpha_value = if config.nodes_only { 1.0 } else { t.value(alpha) };
    Ok(Evaluation {
        terms: LossTerms {
            loss: value,
            g_pos: t.value(pos.similarity),
            g_neg: t.value(neg.similarity),
            contrastive_nodes: cn,
            contrastive_edges: ce,
            alpha: alpha_value,
            weights: values.edge_weights(),
        },
        grads,
    })
}

/// Similarity of a frozen schema to a target under a relaxed map, and its
/// gradient with respect to the map entries. `schema` edges are compared as
/// stored; target edges are weighted by `w`.
pub fn target_similarity(
    map_values: &[f64],
    schema: &ObjectGraph,
    target: &ObjectGraph,
    alpha: f64,
    w: &EdgeWeights,
    nodes_only: bool,
) -> Result<(f64, Vec<f64>)> {
    let n = schema.node_count();
    if target.node_count() != n || target.dim() != schema.dim() {
        return Err(PsiError::DimensionMismatch(format!(
            "target with {} nodes of dimension {} against a schema with {} nodes of dimension {}",
            target.node_count(),
            target.dim(),
            n,
            schema.dim()
        )));
    }
    if map_values.len() != n * n {
        return Err(PsiError::DimensionMismatch(format!("{} map entries for {n} nodes", map_values.len())));
    }
    let mut t = Tape::new();
    let p = t.leaves(map_values);
    let s = node_leaves(&mut t, schema);
    let x = node_leaves(&mut t, target);
    let gn = node_sim(&mut t, &p, &s, &x)?;
    let out = if nodes_only {
        gn
    } else {
        if !schema.has_edges() || !target.has_edges() {
            return Err(PsiError::EmptyAlignment("edge"));
        }
        let se: Vec<Vec<Var>> = schema.dense_edges().iter().map(|e| t.leaves(e.values())).collect();
        let te: Vec<Vec<Var>> = target.dense_edges().iter().map(|e| t.leaves(&w.apply(e))).collect();
        let ge = edge_sim(&mut t, &p, &se, &te, n)?;
        let (vn, ve) = (t.value(gn), t.value(ge));
        t.node(alpha * vn + (1.0 - alpha) * ve, [(gn, alpha), (ge, 1.0 - alpha)])
    };
    let value = t.value(out);
    if !value.is_finite() {
        return Err(PsiError::NonFinite(format!("target similarity evaluated to {value}")));
    }
    let adj = t.backward(out);
    let grads: Vec<f64> = p.iter().map(|v| adj[v.index()]).collect();
    if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
        return Err(PsiError::NonFinite(format!("gradient of target map [{},{}]", i / n, i % n)));
    }
    Ok((value, grads))
}

struct SchemaVars {
    nodes: Vec<Vec<Var>>,
    /// Dense edge slots; empty in node-only mode.
    edges: Vec<Vec<Var>>,
}

struct ClassTerms {
    schema: SchemaVars,
    similarity: Var,
}

fn node_leaves(t: &mut Tape, g: &ObjectGraph) -> Vec<Vec<Var>> {
    g.nodes().iter().map(|x| t.leaves(x)).collect()
}

fn class_terms(
    t: &mut Tape,
    exemplars: &[ObjectGraph],
    maps: &[&[Var]],
    w: Option<&[Var]>,
    alpha: Var,
    n: usize,
) -> Result<ClassTerms> {
    let schema = schema_vars(t, exemplars, maps, w, n)?;
    let mut sims = Vec::with_capacity(exemplars.len());
    for (g, p) in exemplars.iter().zip(maps) {
        let x = node_leaves(t, g);
        let gn = node_sim(t, p, &schema.nodes, &x)?;
        let sim = match w {
            None => gn,
            Some(w) => {
                let f = weighted_edges(t, g, w);
                let ge = edge_sim(t, p, &schema.edges, &f, n)?;
                let (a, vn, ve) = (t.value(alpha), t.value(gn), t.value(ge));
                t.node(a * vn + (1.0 - a) * ve, [(alpha, vn - ve), (gn, a), (ge, 1.0 - a)])
            }
        };
        sims.push(sim);
    }
    let similarity = t.mean(&sims);
    Ok(ClassTerms { schema, similarity })
}

/// `w ⊙ e` for every dense edge slot of `g`.
fn weighted_edges(t: &mut Tape, g: &ObjectGraph, w: &[Var]) -> Vec<Vec<Var>> {
    g.dense_edges()
        .iter()
        .map(|e| {
            e.values()
                .iter()
                .zip(w)
                .map(|(&v, &wr)| {
                    let value = t.value(wr) * v;
                    t.node(value, [(wr, v)])
                })
                .collect()
        })
        .collect()
}

/// Schema of one class:
/// `s_k = (1/K) Σ_e Σ_j P_kj x_j / Σ_j P_kj` and
/// `t_kl = (1/K) Σ_e w ⊙ Σ_{j≠m} P_kj P_lm E_jm / Σ_{j≠m} P_kj P_lm`.
fn schema_vars(t: &mut Tape, exemplars: &[ObjectGraph], maps: &[&[Var]], w: Option<&[Var]>, n: usize) -> Result<SchemaVars> {
    let k_count = exemplars.len() as f64;
    let dim = exemplars[0].dim();
    let pv: Vec<Vec<f64>> = maps.iter().map(|m| t.values_of(m)).collect();

    let mut nodes = Vec::with_capacity(n);
    for k in 0..n {
        let mass: Vec<f64> = pv.iter().map(|p| p[k * n..(k + 1) * n].iter().sum()).collect();
        if mass.iter().any(|m| m.abs() < MIN_MASS) {
            return Err(PsiError::EmptyAlignment("schema row"));
        }
        let mut row = Vec::with_capacity(dim);
        for d in 0..dim {
            let mut value = 0.0;
            let mut parents = Vec::with_capacity(exemplars.len() * n);
            for (e, g) in exemplars.iter().enumerate() {
                let mean: f64 = (0..n).map(|j| pv[e][k * n + j] * g.node(j)[d]).sum::<f64>() / mass[e];
                value += mean / k_count;
                for j in 0..n {
                    parents.push((maps[e][k * n + j], (g.node(j)[d] - mean) / (mass[e] * k_count)));
                }
            }
            row.push(t.node(value, parents));
        }
        nodes.push(row);
    }

    let mut edges = Vec::new();
    if let Some(w) = w {
        let wv = t.values_of(w);
        for (k, l) in directed_pairs(n) {
            // per exemplar: pair mass and unweighted aligned edge mean
            let mut z = Vec::with_capacity(exemplars.len());
            let mut b = Vec::with_capacity(exemplars.len());
            for (e, g) in exemplars.iter().enumerate() {
                let mut ze = 0.0;
                let mut be = [0.0; NUM_RELATIONS];
                for (s, (j, m)) in directed_pairs(n).enumerate() {
                    let q = pv[e][k * n + j] * pv[e][l * n + m];
                    ze += q;
                    for (r, v) in g.dense_edges()[s].values().iter().enumerate() {
                        be[r] += q * v;
                    }
                }
                if ze.abs() < MIN_MASS {
                    return Err(PsiError::EmptyAlignment("schema edge"));
                }
                z.push(ze);
                b.push(be.map(|v| v / ze));
            }
            let mut slot = Vec::with_capacity(NUM_RELATIONS);
            for r in 0..NUM_RELATIONS {
                let mut parents = Vec::with_capacity(1 + exemplars.len() * 2 * n);
                let mean_b = b.iter().map(|be| be[r]).sum::<f64>() / k_count;
                parents.push((w[r], mean_b));
                for (e, g) in exemplars.iter().enumerate() {
                    let edges = g.dense_edges();
                    let c = wv[r] / (z[e] * k_count);
                    let mut dk = vec![0.0; n];
                    let mut dl = vec![0.0; n];
                    for (s, (j, m)) in directed_pairs(n).enumerate() {
                        let diff = edges[s].values()[r] - b[e][r];
                        dk[j] += pv[e][l * n + m] * diff;
                        dl[m] += pv[e][k * n + j] * diff;
                    }
                    for j in 0..n {
                        parents.push((maps[e][k * n + j], c * dk[j]));
                        parents.push((maps[e][l * n + j], c * dl[j]));
                    }
                }
                slot.push(t.node(wv[r] * mean_b, parents));
            }
            edges.push(slot);
        }
    }
    Ok(SchemaVars { nodes, edges })
}

/// `Σ P_kj cos(s_k, x_j) / Σ P_kj`. Cosines enter the tape only where the
/// mapping weight is nonzero; the others contribute through `∂/∂P` alone.
fn node_sim(t: &mut Tape, p: &[Var], s: &[Vec<Var>], x: &[Vec<Var>]) -> Result<Var> {
    let (rows, cols) = (s.len(), x.len());
    let pv = t.values_of(p);
    let mass: f64 = pv.iter().sum();
    if mass.abs() < MIN_MASS {
        return Err(PsiError::EmptyAlignment("node"));
    }
    let sv: Vec<Vec<f64>> = s.iter().map(|v| t.values_of(v)).collect();
    let xv: Vec<Vec<f64>> = x.iter().map(|v| t.values_of(v)).collect();
    let mut c = vec![0.0; rows * cols];
    for k in 0..rows {
        for j in 0..cols {
            c[k * cols + j] = cosine_with_partials(&sv[k], &xv[j]).0;
        }
    }
    let g = pv.iter().zip(&c).map(|(p, c)| p * c).sum::<f64>() / mass;
    let mut parents = Vec::with_capacity(2 * rows * cols);
    for i in 0..rows * cols {
        parents.push((p[i], (c[i] - g) / mass));
        if pv[i] != 0.0 {
            let cv = t.cosine(&s[i / cols], &x[i % cols]);
            parents.push((cv, pv[i] / mass));
        }
    }
    Ok(t.node(g, parents))
}

/// `Σ P_ac P_bd cos(t_ab, f_cd) / Σ P_ac P_bd` over directed pairs
/// `a ≠ b`, `c ≠ d`.
fn edge_sim(t: &mut Tape, p: &[Var], te: &[Vec<Var>], fe: &[Vec<Var>], n: usize) -> Result<Var> {
    let pv = t.values_of(p);
    let tv: Vec<Vec<f64>> = te.iter().map(|v| t.values_of(v)).collect();
    let fv: Vec<Vec<f64>> = fe.iter().map(|v| t.values_of(v)).collect();
    let pairs: Vec<(usize, usize)> = directed_pairs(n).collect();
    let m = pairs.len();
    let mut c = vec![0.0; m * m];
    let mut q = vec![0.0; m * m];
    for (u, &(a, b)) in pairs.iter().enumerate() {
        for (v, &(cc, d)) in pairs.iter().enumerate() {
            q[u * m + v] = pv[a * n + cc] * pv[b * n + d];
            c[u * m + v] = cosine_with_partials(&tv[u], &fv[v]).0;
        }
    }
    let mass: f64 = q.iter().sum();
    if mass.abs() < MIN_MASS {
        return Err(PsiError::EmptyAlignment("edge"));
    }
    let g = q.iter().zip(&c).map(|(q, c)| q * c).sum::<f64>() / mass;
    let mut dp = vec![0.0; n * n];
    let mut parents = Vec::new();
    for (u, &(a, b)) in pairs.iter().enumerate() {
        for (v, &(cc, d)) in pairs.iter().enumerate() {
            let diff = (c[u * m + v] - g) / mass;
            dp[a * n + cc] += pv[b * n + d] * diff;
            dp[b * n + d] += pv[a * n + cc] * diff;
            let qv = q[u * m + v];
            if qv != 0.0 {
                let cv = t.cosine(&te[u], &fe[v]);
                parents.push((cv, qv / mass));
            }
        }
    }
    parents.extend(p.iter().copied().zip(dp));
    Ok(t.node(g, parents))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::{PermutationMatrix, ParamSet};
    use crate::relgraph::{edge_similarity, graph_similarity, node_similarity, EpisodeMeta, RelationVector};
    use rand::{Rng, SeedableRng};

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_graph(r: &mut impl Rng, n: usize, dim: usize) -> ObjectGraph {
        let nodes = (0..n).map(|_| (0..dim).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
        let edges = directed_pairs(n)
            .map(|_| RelationVector::new(std::array::from_fn(|_| r.random::<f64>())).unwrap())
            .collect();
        ObjectGraph::from_dense(nodes, edges).unwrap()
    }

    fn episode(r: &mut impl Rng, n: usize, pos: usize, neg: usize) -> Episode {
        let positives = (0..pos).map(|_| random_graph(r, n, 4)).collect();
        let negatives = (0..neg).map(|_| random_graph(r, n, 4)).collect();
        Episode::new(positives, negatives, vec![], EpisodeMeta::default()).unwrap()
    }

    /// Schema from the projected maps, computed directly.
    fn plain_schema(exemplars: &[ObjectGraph], maps: &[PermutationMatrix], w: &EdgeWeights) -> ObjectGraph {
        let n = exemplars[0].node_count();
        let k = exemplars.len() as f64;
        let nodes = (0..n)
            .map(|row| {
                let mut acc = vec![0.0; exemplars[0].dim()];
                for (g, p) in exemplars.iter().zip(maps) {
                    for (a, x) in acc.iter_mut().zip(g.node(p.col_of(row).unwrap())) {
                        *a += x / k;
                    }
                }
                acc
            })
            .collect();
        let edges = directed_pairs(n)
            .map(|(a, b)| {
                let mut acc = [0.0; NUM_RELATIONS];
                for (g, p) in exemplars.iter().zip(maps) {
                    let e = w.apply(g.edge(p.col_of(a).unwrap(), p.col_of(b).unwrap()).unwrap());
                    for r in 0..NUM_RELATIONS {
                        acc[r] += e[r] / k;
                    }
                }
                RelationVector::new(acc).unwrap()
            })
            .collect();
        ObjectGraph::from_dense(nodes, edges).unwrap()
    }

    fn naive_loss(params: &ParamSet, ep: &Episode, config: &LossConfig) -> f64 {
        let proj = params.projections();
        let w = params.edge_weights();
        let alpha = config.alpha.resolve(params.alpha_logit());
        let pos = ep.positives.len();
        let class = |graphs: &[ObjectGraph], maps: &[PermutationMatrix]| {
            let schema = plain_schema(graphs, maps, &w);
            let sims: Vec<f64> = graphs
                .iter()
                .zip(maps)
                .map(|(g, p)| {
                    graph_similarity(alpha, node_similarity(&schema, g, p).unwrap(), edge_similarity(&schema, g, p, &w).unwrap())
                })
                .collect();
            (schema, sims.iter().sum::<f64>() / sims.len() as f64)
        };
        let (sp, gp) = class(&ep.positives, &proj[..pos]);
        let (sn, gn) = class(&ep.negatives, &proj[pos..proj.len() - 1]);
        let mut loss = -gp - gn;
        if config.contrastive {
            let q = &proj[proj.len() - 1];
            // schema edges are already weighted; a uniform w only rescales, which cosine ignores
            let ge = edge_similarity(&sp, &sn, q, &EdgeWeights::uniform()).unwrap();
            loss += -node_similarity(&sp, &sn, q).unwrap() + ge;
        }
        loss
    }

    #[test]
    fn matches_direct_evaluation_at_permutations() {
        let mut r = rng(4);
        for trial in 0..30 {
            let n = 2 + trial % 3;
            let ep = episode(&mut r, n, 1 + trial % 3, 1 + (trial / 3) % 3);
            let mut params = ParamSet::init(n, ep.positives.len(), ep.negatives.len(), &mut r);
            params.set_alpha_logit(r.random_range(-2.0..2.0));
            params.set_edge_logits(&std::array::from_fn(|_| r.random_range(-1.0..1.0)));
            for contrastive in [false, true] {
                for alpha in [AlphaMode::Adaptive, AlphaMode::Fixed(0.0), AlphaMode::Fixed(1.0)] {
                    let config = LossConfig { alpha, contrastive, nodes_only: false, ..LossConfig::default() };
                    let got = loss_and_gradients(&params, &ep, &config).unwrap().terms.loss;
                    let want = naive_loss(&params, &ep, &config);
                    assert!((got - want).abs() < 1e-12, "trial {trial}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn identical_exemplars_reach_minus_two() {
        let g = random_graph(&mut rng(1), 3, 5);
        let ep = Episode::new(vec![g.clone(), g.clone()], vec![g.clone(), g], vec![], EpisodeMeta::default()).unwrap();
        let mut params = ParamSet::zeros(3, 2, 2);
        for i in 0..=params.exemplar_maps() {
            params.map_mut(i).copy_from_slice(&PermutationMatrix::identity(3).to_dense());
        }
        let config = LossConfig { contrastive: false, ..LossConfig::default() };
        let e = loss_and_gradients(&params, &ep, &config).unwrap();
        assert!((e.terms.loss + 2.0).abs() < 1e-12);
        assert!((e.terms.g_pos - 1.0).abs() < 1e-12 && (e.terms.g_neg - 1.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_gradient_vanishes_when_node_and_edge_similarity_agree() {
        // single exemplars are their own schemas: both similarities are 1
        let mut r = rng(2);
        let ep = episode(&mut r, 3, 1, 1);
        let params = ParamSet::init(3, 1, 1, &mut r);
        let config = LossConfig { contrastive: false, ..LossConfig::default() };
        let e = loss_and_gradients(&params, &ep, &config).unwrap();
        assert_eq!(e.grads[params.alpha_index()], 0.0);
    }

    #[test]
    fn fixed_alpha_one_ignores_edges() {
        let mut r = rng(3);
        let ep = episode(&mut r, 3, 2, 2);
        let params = ParamSet::init(3, 2, 2, &mut r);
        let config = LossConfig { alpha: AlphaMode::Fixed(1.0), contrastive: false, nodes_only: false, ..LossConfig::default() };
        let e = loss_and_gradients(&params, &ep, &config).unwrap();
        assert_eq!(e.terms.alpha, 1.0);
        let o = params.edge_logit_offset();
        assert!(e.grads[o..o + NUM_RELATIONS].iter().all(|&g| g == 0.0));
        assert_eq!(e.grads[params.alpha_index()], 0.0);
    }

    #[test]
    fn node_only_loss_works_on_edgeless_graphs() {
        let mut r = rng(5);
        let g = |r: &mut rand_chacha::ChaCha8Rng| {
            ObjectGraph::nodes_only((0..4).map(|_| (0..3).map(|_| r.random::<f64>()).collect()).collect()).unwrap()
        };
        let ep = Episode::new(vec![g(&mut r), g(&mut r)], vec![g(&mut r)], vec![], EpisodeMeta::default()).unwrap();
        let params = ParamSet::init(4, 2, 1, &mut r);
        let config = LossConfig { alpha: AlphaMode::Adaptive, contrastive: true, nodes_only: true, ..LossConfig::default() };
        let e = loss_and_gradients(&params, &ep, &config).unwrap();
        assert!((e.terms.loss + e.terms.g_pos + e.terms.g_neg).abs() < 1e-12);
        assert!(e.terms.contrastive_nodes.is_none());
        assert!(loss_and_gradients(&params, &ep, &LossConfig::default()).is_err());
    }

    #[test]
    fn mismatched_parameters_are_rejected() {
        let mut r = rng(6);
        let ep = episode(&mut r, 3, 2, 2);
        let params = ParamSet::init(3, 1, 2, &mut r);
        assert!(matches!(loss_and_gradients(&params, &ep, &LossConfig::default()), Err(PsiError::DimensionMismatch(_))));
        let params = ParamSet::init(3, 2, 2, &mut r);
        let bad = LossConfig { alpha: AlphaMode::Fixed(1.5), ..LossConfig::default() };
        assert!(matches!(loss_and_gradients(&params, &ep, &bad), Err(PsiError::InvalidConfig(_))));
    }

    #[test]
    fn target_similarity_matches_direct_evaluation() {
        let mut r = rng(7);
        let w = EdgeWeights::from_logits(&std::array::from_fn(|_| r.random_range(-1.0..1.0)));
        for n in 2..=4 {
            let schema = random_graph(&mut r, n, 4);
            let target = random_graph(&mut r, n, 4);
            let m: Vec<f64> = (0..n * n).map(|_| r.random::<f64>()).collect();
            let p = crate::optim::project(&crate::optim::ContinuousMappingMatrix::new(n, n, m).unwrap());
            let (sim, grads) = target_similarity(&p.to_dense(), &schema, &target, 0.3, &w, false).unwrap();
            let want = graph_similarity(0.3, node_similarity(&schema, &target, &p).unwrap(), edge_similarity(&schema, &target, &p, &w).unwrap());
            assert!((sim - want).abs() < 1e-12);
            assert_eq!(grads.len(), n * n);
        }
    }

    #[test]
    fn two_node_edge_maps_need_smoothing_to_move() {
        let mut r = rng(31);
        let ep = episode(&mut r, 2, 3, 3);
        let params = ParamSet::init(2, 3, 3, &mut r);
        let plain = LossConfig { alpha: AlphaMode::Fixed(0.0), contrastive: false, map_smoothing: 0.0, ..LossConfig::default() };
        let maps = params.alpha_index();
        let g = loss_and_gradients(&params, &ep, &plain).unwrap().grads;
        assert!(g[..maps].iter().all(|&x| x.abs() < 1e-12), "{:?}", &g[..maps]);
        let smoothed = LossConfig { map_smoothing: 0.1, ..plain };
        let g = loss_and_gradients(&params, &ep, &smoothed).unwrap().grads;
        assert!(g[..maps].iter().any(|&x| x.abs() > 1e-6));
    }

    #[test]
    fn smoothing_changes_only_map_gradients() {
        let mut r = rng(32);
        let ep = episode(&mut r, 3, 2, 2);
        let params = ParamSet::init(3, 2, 2, &mut r);
        let config = LossConfig::default();
        let eval = loss_and_gradients(&params, &ep, &config).unwrap();
        let exact = relaxed_loss(&params.projected(), &ep, &config).unwrap();
        let smooth = relaxed_loss(&params.projected().smoothed(config.map_smoothing), &ep, &config).unwrap();
        let maps = params.alpha_index();
        assert_eq!(eval.terms, exact.terms);
        assert_eq!(&eval.grads[..maps], &smooth.grads[..maps]);
        assert_eq!(&eval.grads[maps..], &exact.grads[maps..]);
        assert!(loss_and_gradients(&params, &ep, &LossConfig { map_smoothing: 1.0, ..config }).is_err());
        assert_eq!(smooth_map(&[1.0, 0.0, 0.0, 1.0], 2, 0.2), [0.9, 0.1, 0.1, 0.9]);
    }
}
