use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::relgraph::{Relation, RelationVector, NUM_RELATIONS};

/// Gaussian perturbation of clean relation values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Standard deviation added to binary relations.
    pub binary_sd: f64,
    /// Standard deviation of the distance relation as a fraction of its value.
    pub distance_fraction: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel { binary_sd: 0.1, distance_fraction: 0.2 }
    }
}

/// Adds noise to each value using `draw(sd)` as the Gaussian source; the
/// result is clamped to `[0, 1]`. One draw is taken per relation, even when
/// its standard deviation is zero, so the random stream does not depend on
/// the clean values.
pub fn perturb_relations(clean: &RelationVector, model: &NoiseModel, mut draw: impl FnMut(f64) -> f64) -> RelationVector {
    let mut out = [0.0; NUM_RELATIONS];
    for r in Relation::ALL {
        let v = clean.get(r);
        let sd = if r.is_binary() { model.binary_sd } else { model.distance_fraction * v };
        let e = draw(sd);
        out[r.index()] = if sd > 0.0 { v + e } else { v };
    }
    RelationVector::new(out).expect("finite values")
}

/// Binary relations get `N(0, 0.1)`, the distance `N(0, 0.2·value)`; results
/// are clamped to `[0, 1]`.
pub fn add_relation_noise(clean: &RelationVector, model: &NoiseModel, rng: &mut impl Rng) -> RelationVector {
    perturb_relations(clean, model, |sd| sd * rng.sample::<f64, _>(StandardNormal))
}
