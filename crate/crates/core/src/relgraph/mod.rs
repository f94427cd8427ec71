//! Object–relation graphs, relation vectors, attention weights over relations,
//! and the similarity functions computed between aligned graphs.

mod json;
mod similarity;

pub use similarity::{cosine_similarity, edge_similarity, graph_similarity, node_similarity, ZERO_NORM};

use serde::{Deserialize, Serialize};

use crate::error::{PsiError, Result};

/// Number of pairwise relations carried on every edge.
pub const NUM_RELATIONS: usize = 7;

/// The seven pairwise relations, in edge-vector order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Relation {
    Inside,
    Touching,
    SameShape,
    NormalizedDistance,
    Mirrored,
    SameSize,
    Reflection,
}

impl Relation {
    pub const ALL: [Relation; NUM_RELATIONS] = [
        Relation::Inside,
        Relation::Touching,
        Relation::SameShape,
        Relation::NormalizedDistance,
        Relation::Mirrored,
        Relation::SameSize,
        Relation::Reflection,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Relation> {
        Self::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Relation::Inside => "inside",
            Relation::Touching => "touching",
            Relation::SameShape => "sameShape",
            Relation::NormalizedDistance => "normalizedDistance",
            Relation::Mirrored => "mirrored",
            Relation::SameSize => "sameSize",
            Relation::Reflection => "reflection",
        }
    }

    /// Every relation except normalized distance is binary before noise.
    pub fn is_binary(self) -> bool {
        self != Relation::NormalizedDistance
    }
}

/// Seven relation strengths for one directed edge, each clamped to `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct RelationVector([f64; NUM_RELATIONS]);

impl RelationVector {
    pub fn new(values: [f64; NUM_RELATIONS]) -> Result<Self> {
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(PsiError::NonFinite(format!(
                "relation `{}`",
                Relation::ALL[bad].name()
            )));
        }
        Ok(RelationVector(values.map(|v| v.clamp(0.0, 1.0))))
    }

    pub fn zeros() -> Self {
        RelationVector([0.0; NUM_RELATIONS])
    }

    pub fn values(&self) -> &[f64; NUM_RELATIONS] {
        &self.0
    }

    pub fn get(&self, relation: Relation) -> f64 {
        self.0[relation.index()]
    }

    pub fn with(mut self, relation: Relation, value: f64) -> Self {
        self.0[relation.index()] = if value.is_finite() {
            value.clamp(0.0, 1.0)
        } else {
            0.0
        };
        self
    }
}

/// Node feature vector.
pub type Node = Vec<f64>;

/// Slot of directed edge `(sender, receiver)` in the dense edge list of an
/// `n`-node graph. Edges are ordered by sender, then receiver, skipping `s == r`.
pub fn edge_slot(n: usize, sender: usize, receiver: usize) -> usize {
    debug_assert!(sender != receiver && sender < n && receiver < n);
    sender * (n - 1) + if receiver < sender { receiver } else { receiver - 1 }
}

/// Iterates all ordered pairs `(s, r)`, `s != r`, in edge-slot order.
pub fn directed_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |s| (0..n).filter(move |&r| r != s).map(move |r| (s, r)))
}

/// Directed attributed graph. Either every ordered pair of distinct nodes
/// carries an edge, or the graph is node-only (used by the patch control).
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectGraph {
    nodes: Vec<Node>,
    edges: Vec<RelationVector>,
}

impl ObjectGraph {
    /// Builds a graph from nodes and a complete set of directed edges.
    pub fn new(
        nodes: Vec<Node>,
        edges: impl IntoIterator<Item = ((usize, usize), RelationVector)>,
    ) -> Result<Self> {
        let n = nodes.len();
        validate_nodes(&nodes)?;
        let mut dense: Vec<Option<RelationVector>> = vec![None; n * n.saturating_sub(1)];
        for ((s, r), v) in edges {
            if s >= n || r >= n || s == r {
                return Err(PsiError::InvalidGraph(format!(
                    "edge ({s}, {r}) is not a directed pair of distinct nodes in a {n}-node graph"
                )));
            }
            let slot = &mut dense[edge_slot(n, s, r)];
            if slot.is_some() {
                return Err(PsiError::InvalidGraph(format!("duplicate edge ({s}, {r})")));
            }
            *slot = Some(v);
        }
        let edges = dense
            .into_iter()
            .enumerate()
            .map(|(i, e)| {
                e.ok_or_else(|| {
                    let (s, r) = directed_pairs(n).nth(i).unwrap_or((0, 0));
                    PsiError::InvalidGraph(format!("missing edge ({s}, {r})"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ObjectGraph { nodes, edges })
    }

    /// Builds a graph from edges already in [`edge_slot`] order.
    pub fn from_dense(nodes: Vec<Node>, edges: Vec<RelationVector>) -> Result<Self> {
        validate_nodes(&nodes)?;
        let n = nodes.len();
        if edges.len() != n * n.saturating_sub(1) {
            return Err(PsiError::InvalidGraph(format!(
                "{n}-node graph needs {} directed edges, got {}",
                n * n.saturating_sub(1),
                edges.len()
            )));
        }
        Ok(ObjectGraph { nodes, edges })
    }

    /// Graph without edges.
    pub fn nodes_only(nodes: Vec<Node>) -> Result<Self> {
        validate_nodes(&nodes)?;
        Ok(ObjectGraph {
            nodes,
            edges: Vec::new(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn dim(&self) -> usize {
        self.nodes.first().map_or(0, Vec::len)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i]
    }

    pub fn has_edges(&self) -> bool {
        !self.edges.is_empty()
    }

    pub fn edge(&self, sender: usize, receiver: usize) -> Option<&RelationVector> {
        if !self.has_edges() || sender == receiver {
            return None;
        }
        self.edges.get(edge_slot(self.node_count(), sender, receiver))
    }

    /// Edges in slot order.
    pub fn dense_edges(&self) -> &[RelationVector] {
        &self.edges
    }

    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), &RelationVector)> {
        directed_pairs(self.node_count()).zip(self.edges.iter())
    }

    /// Relabels nodes: node `i` of the result is node `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<ObjectGraph> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
            return Err(PsiError::InvalidGraph(format!(
                "{order:?} is not a permutation of {n} nodes"
            )));
        }
        let nodes = order.iter().map(|&i| self.nodes[i].clone()).collect();
        if !self.has_edges() {
            return ObjectGraph::nodes_only(nodes);
        }
        let edges = directed_pairs(n)
            .map(|(s, r)| self.edges[edge_slot(n, order[s], order[r])])
            .collect();
        ObjectGraph::from_dense(nodes, edges)
    }
}

fn validate_nodes(nodes: &[Node]) -> Result<()> {
    let Some(first) = nodes.first() else {
        return Err(PsiError::InvalidGraph("graph has no nodes".into()));
    };
    let dim = first.len();
    if dim == 0 {
        return Err(PsiError::InvalidGraph("node features are empty".into()));
    }
    for (i, node) in nodes.iter().enumerate() {
        if node.len() != dim {
            return Err(PsiError::InvalidGraph(format!(
                "node {i} has dimension {}, expected {dim}",
                node.len()
            )));
        }
        if node.iter().any(|v| !v.is_finite()) {
            return Err(PsiError::NonFinite(format!("features of node {i}")));
        }
    }
    Ok(())
}

/// Attention over relations: non-negative, summing to one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeWeights([f64; NUM_RELATIONS]);

impl EdgeWeights {
    pub fn new(weights: [f64; NUM_RELATIONS]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(PsiError::InvalidConfig(format!(
                "edge weights {weights:?} must be non-negative and sum to 1"
            )));
        }
        Ok(EdgeWeights(weights))
    }

    pub fn uniform() -> Self {
        EdgeWeights([1.0 / NUM_RELATIONS as f64; NUM_RELATIONS])
    }

    /// Numerically stable softmax of unconstrained logits.
    pub fn from_logits(logits: &[f64; NUM_RELATIONS]) -> Self {
        EdgeWeights(softmax(logits))
    }

    pub fn values(&self) -> &[f64; NUM_RELATIONS] {
        &self.0
    }

    pub fn get(&self, relation: Relation) -> f64 {
        self.0[relation.index()]
    }

    /// Element-wise product with a relation vector.
    pub fn apply(&self, edge: &RelationVector) -> [f64; NUM_RELATIONS] {
        std::array::from_fn(|i| self.0[i] * edge.0[i])
    }

    pub fn argmax(&self) -> Relation {
        let mut best = 0;
        for i in 1..NUM_RELATIONS {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        Relation::ALL[best]
    }
}

pub(crate) fn softmax(logits: &[f64; NUM_RELATIONS]) -> [f64; NUM_RELATIONS] {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps = logits.map(|z| (z - max).exp());
    let sum: f64 = exps.iter().sum();
    exps.map(|e| e / sum)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Target {
    pub graph: ObjectGraph,
    pub label: Label,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMeta {
    pub problem_id: String,
    pub seed: u64,
    pub distinguishing_relation: Option<Relation>,
}

/// A few-shot trial: labeled support graphs plus targets to classify.
#[derive(Clone, Debug, PartialEq)]
pub struct Episode {
    pub positives: Vec<ObjectGraph>,
    pub negatives: Vec<ObjectGraph>,
    pub targets: Vec<Target>,
    pub meta: EpisodeMeta,
}

impl Episode {
    pub fn new(
        positives: Vec<ObjectGraph>,
        negatives: Vec<ObjectGraph>,
        targets: Vec<Target>,
        meta: EpisodeMeta,
    ) -> Result<Self> {
        let episode = Episode {
            positives,
            negatives,
            targets,
            meta,
        };
        episode.validate()?;
        Ok(episode)
    }

    /// Checks the support sets are non-empty and every graph agrees on node
    /// count, feature dimension and whether edges are present.
    pub fn validate(&self) -> Result<()> {
        if self.positives.is_empty() || self.negatives.is_empty() {
            return Err(PsiError::InvalidEpisode(format!(
                "need at least one exemplar per class, got {} positive and {} negative",
                self.positives.len(),
                self.negatives.len()
            )));
        }
        let reference = &self.positives[0];
        let all = self
            .positives
            .iter()
            .map(|g| ("positive", g))
            .chain(self.negatives.iter().map(|g| ("negative", g)))
            .chain(self.targets.iter().map(|t| ("target", &t.graph)));
        for (i, (role, g)) in all.enumerate() {
            if g.node_count() != reference.node_count() {
                return Err(PsiError::InvalidEpisode(format!(
                    "graph {i} ({role}) has {} nodes but the episode uses {}; unequal node counts are not supported",
                    g.node_count(),
                    reference.node_count()
                )));
            }
            if g.dim() != reference.dim() {
                return Err(PsiError::InvalidEpisode(format!(
                    "graph {i} ({role}) has feature dimension {}, expected {}",
                    g.dim(),
                    reference.dim()
                )));
            }
            if g.has_edges() != reference.has_edges() {
                return Err(PsiError::InvalidEpisode(format!(
                    "graph {i} ({role}) disagrees with the episode on edge presence"
                )));
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.positives[0].node_count()
    }

    pub fn exemplar_count(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize) -> ObjectGraph {
        let nodes = (0..n).map(|i| vec![i as f64 + 1.0, 1.0]).collect();
        let edges = directed_pairs(n)
            .map(|(s, r)| RelationVector::new([s as f64 * 0.1, r as f64 * 0.1, 0.0, 0.5, 0.0, 0.0, 0.0]).unwrap())
            .collect();
        ObjectGraph::from_dense(nodes, edges).unwrap()
    }

    #[test]
    fn relation_vectors_clamp() {
        let v = RelationVector::new([1.4, -0.2, 0.5, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(v.values(), &[1.0, 0.0, 0.5, 0.0, 0.0, 0.0, 1.0]);
        assert!(RelationVector::new([f64::NAN; 7]).is_err());
    }

    #[test]
    fn complete_graphs_have_n_times_n_minus_one_edges() {
        for n in 1..6 {
            assert_eq!(graph(n).edges().count(), n * (n - 1));
        }
    }

    #[test]
    fn missing_or_duplicate_edges_are_rejected() {
        let nodes = vec![vec![1.0], vec![2.0]];
        let e = RelationVector::zeros();
        assert!(ObjectGraph::new(nodes.clone(), [((0, 1), e)]).is_err());
        assert!(ObjectGraph::new(nodes.clone(), [((0, 1), e), ((0, 1), e)]).is_err());
        assert!(ObjectGraph::new(nodes.clone(), [((0, 0), e)]).is_err());
        assert!(ObjectGraph::new(nodes, [((0, 1), e), ((1, 0), e)]).is_ok());
    }

    #[test]
    fn node_dimensions_must_agree() {
        assert!(ObjectGraph::nodes_only(vec![vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(ObjectGraph::nodes_only(vec![vec![f64::INFINITY]]).is_err());
    }

    #[test]
    fn directed_edges_are_independent() {
        let g = graph(3);
        assert_ne!(g.edge(0, 1), g.edge(1, 0));
        assert_eq!(g.edge(2, 1).unwrap().get(Relation::Inside), 0.2);
    }

    #[test]
    fn permuting_relabels_edges_consistently() {
        let g = graph(3);
        let p = g.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.node(0), g.node(2));
        assert_eq!(p.edge(0, 1), g.edge(2, 0));
        assert!(g.permuted(&[0, 0, 1]).is_err());
    }

    #[test]
    fn edge_weights_from_logits_are_a_distribution() {
        let w = EdgeWeights::from_logits(&[0.0, 1.0, -3.0, 700.0, 2.0, 0.0, 0.0]);
        let sum: f64 = w.values().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert_eq!(w.argmax(), Relation::NormalizedDistance);
        assert_eq!(EdgeWeights::uniform().values()[0], 1.0 / 7.0);
        assert!(EdgeWeights::new([0.5, 0.5, 0.1, 0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn episodes_reject_unequal_node_counts() {
        let err = Episode::new(vec![graph(2)], vec![graph(3)], vec![], EpisodeMeta::default());
        assert!(matches!(err, Err(PsiError::InvalidEpisode(_))));
        assert!(Episode::new(vec![], vec![graph(2)], vec![], EpisodeMeta::default()).is_err());
        assert!(Episode::new(vec![graph(2)], vec![graph(2)], vec![], EpisodeMeta::default()).is_ok());
    }
}
