use rand::Rng;

use super::{project, ContinuousMappingMatrix, PermutationMatrix};
use crate::relgraph::{EdgeWeights, Relation, NUM_RELATIONS};

/// Upper bound (exclusive) of the uniform initialization of mapping entries.
pub const MAP_INIT_MAX: f64 = 0.01;

/// All free parameters of one induction run in a flat vector:
///
/// `[exemplar maps (positives then negatives, n² each, row-major),
///   schema–schema map (n²), alpha logit, 7 edge-weight logits]`.
///
/// Mapping rows are schema nodes, columns exemplar nodes. For the
/// schema–schema map rows are positive-schema nodes, columns negative-schema
/// nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet {
    n: usize,
    positives: usize,
    negatives: usize,
    data: Vec<f64>,
}

impl ParamSet {
    /// All-zero parameters.
    pub fn zeros(n: usize, positives: usize, negatives: usize) -> Self {
        let len = (positives + negatives + 1) * n * n + 1 + NUM_RELATIONS;
        ParamSet { n, positives, negatives, data: vec![0.0; len] }
    }

    /// Mapping entries uniform in `[0, 0.01)`, alpha logit 0 (α = 0.5),
    /// edge logits 0 (uniform weights).
    pub fn init(n: usize, positives: usize, negatives: usize, rng: &mut impl Rng) -> Self {
        let mut p = Self::zeros(n, positives, negatives);
        let maps = p.maps_len();
        for v in &mut p.data[..maps] {
            *v = rng.random_range(0.0..MAP_INIT_MAX);
        }
        p
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn positives(&self) -> usize {
        self.positives
    }

    pub fn negatives(&self) -> usize {
        self.negatives
    }

    /// Number of exemplar maps.
    pub fn exemplar_maps(&self) -> usize {
        self.positives + self.negatives
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    fn maps_len(&self) -> usize {
        (self.exemplar_maps() + 1) * self.n * self.n
    }

    /// Offset of map `i`; exemplar maps come first, the schema–schema map is
    /// index [`exemplar_maps`](Self::exemplar_maps).
    pub fn map_offset(&self, i: usize) -> usize {
        assert!(i <= self.exemplar_maps());
        i * self.n * self.n
    }

    /// Map of exemplar `i`: positives are `0..positives`, negatives follow.
    pub fn map(&self, i: usize) -> &[f64] {
        let o = self.map_offset(i);
        &self.data[o..o + self.n * self.n]
    }

    pub fn map_mut(&mut self, i: usize) -> &mut [f64] {
        let o = self.map_offset(i);
        let nn = self.n * self.n;
        &mut self.data[o..o + nn]
    }

    pub fn schema_map(&self) -> &[f64] {
        self.map(self.exemplar_maps())
    }

    pub fn alpha_index(&self) -> usize {
        self.maps_len()
    }

    pub fn alpha_logit(&self) -> f64 {
        self.data[self.alpha_index()]
    }

    pub fn set_alpha_logit(&mut self, v: f64) {
        let i = self.alpha_index();
        self.data[i] = v;
    }

    pub fn edge_logit_offset(&self) -> usize {
        self.maps_len() + 1
    }

    pub fn edge_logits(&self) -> [f64; NUM_RELATIONS] {
        let o = self.edge_logit_offset();
        std::array::from_fn(|r| self.data[o + r])
    }

    pub fn set_edge_logits(&mut self, logits: &[f64; NUM_RELATIONS]) {
        let o = self.edge_logit_offset();
        self.data[o..o + NUM_RELATIONS].copy_from_slice(logits);
    }

    pub fn edge_weights(&self) -> EdgeWeights {
        EdgeWeights::from_logits(&self.edge_logits())
    }

    /// Continuous matrix of map `i` (the schema–schema map included).
    pub fn matrix(&self, i: usize) -> ContinuousMappingMatrix {
        ContinuousMappingMatrix::new(self.n, self.n, self.map(i).to_vec()).expect("square map")
    }

    /// Hungarian projection of every map, schema–schema map last.
    pub fn projections(&self) -> Vec<PermutationMatrix> {
        (0..=self.exemplar_maps()).map(|i| project(&self.matrix(i))).collect()
    }

    /// Copy with every map replaced by the 0/1 entries of its projection.
    pub fn projected(&self) -> ParamSet {
        let mut out = self.clone();
        for (i, p) in self.projections().iter().enumerate() {
            out.map_mut(i).copy_from_slice(&p.to_dense());
        }
        out
    }

    /// Every map blended toward the uniform matrix: `(1 − eps)·P + eps/n`.
    pub fn smoothed(&self, eps: f64) -> ParamSet {
        let mut out = self.clone();
        for i in 0..=self.exemplar_maps() {
            let smooth = super::loss::smooth_map(self.map(i), self.n, eps);
            out.map_mut(i).copy_from_slice(&smooth);
        }
        out
    }

    /// Human-readable name of parameter `index`.
    pub fn name(&self, index: usize) -> String {
        let nn = self.n * self.n;
        if index < self.maps_len() {
            let (map, entry) = (index / nn, index % nn);
            let (r, c) = (entry / self.n, entry % self.n);
            if map < self.positives {
                format!("positive map {map} [{r},{c}]")
            } else if map < self.exemplar_maps() {
                format!("negative map {} [{r},{c}]", map - self.positives)
            } else {
                format!("schema-schema map [{r},{c}]")
            }
        } else if index == self.alpha_index() {
            "alpha logit".into()
        } else {
            let r = index - self.edge_logit_offset();
            format!("edge logit {}", Relation::ALL[r].name())
        }
    }
}
