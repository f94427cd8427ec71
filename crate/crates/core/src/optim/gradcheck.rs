//! Central-difference verification of analytic gradients.

use rand::Rng;

use super::loss::{relaxed_loss, AlphaMode, LossConfig};
use super::params::ParamSet;
use crate::error::Result;
use crate::relgraph::{directed_pairs, Episode, EpisodeMeta, ObjectGraph, RelationVector, NUM_RELATIONS};

/// Entries where `|analytic| + |numeric|` is at most this are skipped.
pub const NEGLIGIBLE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct GradCheck {
    /// Largest `|a − n| / max(|a|, |n|)` over the compared entries.
    pub max_relative_error: f64,
    /// Parameter index attaining it.
    pub worst_index: Option<usize>,
    /// Number of entries compared.
    pub compared: usize,
}

/// Compares `analytic` with central differences of `loss` around `x0`.
pub fn finite_diff_check(
    mut loss: impl FnMut(&[f64]) -> Result<f64>,
    x0: &[f64],
    analytic: &[f64],
    eps: f64,
) -> Result<GradCheck> {
    assert_eq!(x0.len(), analytic.len());
    let mut x = x0.to_vec();
    let mut out = GradCheck { max_relative_error: 0.0, worst_index: None, compared: 0 };
    for i in 0..x.len() {
        x[i] = x0[i] + eps;
        let up = loss(&x)?;
        x[i] = x0[i] - eps;
        let down = loss(&x)?;
        x[i] = x0[i];
        let numeric = (up - down) / (2.0 * eps);
        let a = analytic[i];
        if a.abs() + numeric.abs() <= NEGLIGIBLE {
            continue;
        }
        out.compared += 1;
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs());
        if out.worst_index.is_none() || rel > out.max_relative_error {
            out.max_relative_error = rel;
            out.worst_index = Some(i);
        }
    }
    Ok(out)
}

/// Gradient check of the induction loss with every projection frozen at its
/// current permutation: perturbing a continuous entry by `δ` perturbs the
/// corresponding permutation entry by `δ`.
pub fn check_loss_gradients(params: &ParamSet, episode: &Episode, config: &LossConfig, eps: f64) -> Result<GradCheck> {
    let frozen = params.projected();
    let analytic = relaxed_loss(&frozen, episode, config)?.grads;
    let mut probe = frozen.clone();
    finite_diff_check(
        |x| {
            probe.as_mut_slice().copy_from_slice(x);
            Ok(relaxed_loss(&probe, episode, config)?.terms.loss)
        },
        frozen.as_slice(),
        &analytic,
        eps,
    )
}

/// Graph with `n` nodes of random features in `[-1, 1)` and random relation
/// values.
pub fn random_graph(rng: &mut impl Rng, n: usize, dim: usize) -> ObjectGraph {
    let nodes = (0..n).map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let edges = directed_pairs(n)
        .map(|_| RelationVector::new(std::array::from_fn(|_| rng.random::<f64>())).expect("values in range"))
        .collect();
    ObjectGraph::from_dense(nodes, edges).expect("dense graph")
}

/// Random check case: 2–4 nodes, 1–3 shots per class, random maps, alpha
/// logit and edge logits.
pub fn random_case(rng: &mut impl Rng, dim: usize) -> (Episode, ParamSet) {
    let n = rng.random_range(2..=4);
    let (kp, kn) = (rng.random_range(1..=3), rng.random_range(1..=3));
    let positives = (0..kp).map(|_| random_graph(rng, n, dim)).collect();
    let negatives = (0..kn).map(|_| random_graph(rng, n, dim)).collect();
    let episode = Episode::new(positives, negatives, vec![], EpisodeMeta::default()).expect("valid episode");
    let mut params = ParamSet::zeros(n, kp, kn);
    for v in params.as_mut_slice() {
        *v = rng.random_range(-1.0..1.0);
    }
    let logits: [f64; NUM_RELATIONS] = std::array::from_fn(|_| rng.random_range(-1.5..1.5));
    params.set_edge_logits(&logits);
    params.set_alpha_logit(rng.random_range(-2.0..2.0));
    (episode, params)
}

/// Worst relative error over `cases` random cases with the contrastive terms
/// on and adaptive alpha.
pub fn random_gradcheck(rng: &mut impl Rng, cases: usize, eps: f64) -> Result<f64> {
    let config = LossConfig { alpha: AlphaMode::Adaptive, contrastive: true, nodes_only: false, ..LossConfig::default() };
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let (episode, params) = random_case(rng, 6);
        worst = worst.max(check_loss_gradients(&params, &episode, &config, eps)?.max_relative_error);
    }
    Ok(worst)
}
