//! Ground-truth pairwise relations computed from scene geometry.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Scene, SceneObject, CANVAS};
use crate::error::{PsiError, Result};
use crate::geometry::{self, Point};
use crate::relgraph::{Relation, RelationVector, NUM_RELATIONS};

/// Thresholds for the binary relations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Maximum boundary distance for contact.
    pub touch: f64,
    /// Maximum max-norm difference of normalized moments for equal shapes.
    pub shape: f64,
    /// Maximum relative area difference for equal sizes.
    pub size: f64,
    /// Maximum distance between a reflected centroid and its partner.
    pub reflection: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { touch: 2.0, shape: 1e-3, size: 0.05, reflection: 2.0 }
    }
}

/// Clean relation vector for every ordered object pair.
pub type RelationMap = BTreeMap<(usize, usize), RelationVector>;

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub(crate) fn polygon_inside(inner: &[Point], outer: &[Point]) -> bool {
    inner.iter().all(|&p| geometry::strictly_contains_point(outer, p))
}

/// 1 iff every vertex of `a` lies strictly inside `b`.
pub fn rel_inside(a: &SceneObject, b: &SceneObject) -> f64 {
    indicator(polygon_inside(&a.outline(), &b.outline()))
}

fn touching(pa: &[Point], pb: &[Point], tol: &Tolerances) -> bool {
    geometry::boundary_distance(pa, pb) <= tol.touch && !polygon_inside(pa, pb) && !polygon_inside(pb, pa)
}

/// 1 iff the boundaries come within `tol.touch` and neither object is
/// inside the other.
pub fn rel_touching(a: &SceneObject, b: &SceneObject, tol: &Tolerances) -> f64 {
    indicator(touching(&a.outline(), &b.outline(), tol))
}

fn max_abs_diff(a: &[f64; 7], b: &[f64; 7]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Moments of the mirror image about a vertical axis: odd powers of x flip sign.
fn mirror_moments(eta: &[f64; 7]) -> [f64; 7] {
    // η20, η11, η02, η30, η21, η12, η03
    [eta[0], -eta[1], eta[2], -eta[3], eta[4], -eta[5], eta[6]]
}

/// 1 iff the normalized central moments agree within `tol.shape`.
pub fn rel_same_shape(a: &SceneObject, b: &SceneObject, tol: &Tolerances) -> f64 {
    let (ea, eb) = (geometry::normalized_central_moments(&a.outline()), geometry::normalized_central_moments(&b.outline()));
    indicator(max_abs_diff(&ea, &eb) <= tol.shape)
}

/// Centroid distance over the canvas diagonal.
pub fn rel_normalized_distance(a: &SceneObject, b: &SceneObject) -> f64 {
    let d = (a.centroid.x - b.centroid.x).abs().hypot((a.centroid.y - b.centroid.y).abs());
    (d / (CANVAS * std::f64::consts::SQRT_2)).clamp(0.0, 1.0)
}

/// 1 iff `a`'s shape mirrored about its own vertical axis matches `b`'s shape.
pub fn rel_mirrored(a: &SceneObject, b: &SceneObject, tol: &Tolerances) -> f64 {
    let (ea, eb) = (geometry::normalized_central_moments(&a.outline()), geometry::normalized_central_moments(&b.outline()));
    indicator(max_abs_diff(&mirror_moments(&ea), &eb) <= tol.shape)
}

/// 1 iff the areas differ by at most `tol.size` of the larger one.
pub fn rel_same_size(a: &SceneObject, b: &SceneObject, tol: &Tolerances) -> f64 {
    let (x, y) = (a.area(), b.area());
    indicator((x - y).abs() / x.max(y) <= tol.size)
}

/// 1 iff the centroids mirror each other about `x = C/2` within `tol.reflection`.
pub fn rel_reflection(a: &SceneObject, b: &SceneObject, tol: &Tolerances) -> f64 {
    let dx = CANVAS - (a.centroid.x + b.centroid.x);
    let dy = (a.centroid.y - b.centroid.y).abs();
    indicator(dx.abs().hypot(dy) <= tol.reflection)
}

/// Clean relation vectors for all ordered pairs of a scene.
pub fn extract_relations(scene: &Scene, tol: &Tolerances) -> Result<RelationMap> {
    let n = scene.objects.len();
    if n < 2 {
        return Err(PsiError::InvalidGraph(format!("a scene needs at least 2 objects, got {n}")));
    }
    let outlines: Vec<Vec<Point>> = scene.objects.iter().map(SceneObject::outline).collect();
    let moments: Vec<[f64; 7]> = outlines.iter().map(|o| geometry::normalized_central_moments(o)).collect();
    let mut map = RelationMap::new();
    for s in 0..n {
        for r in 0..n {
            if s == r {
                continue;
            }
            let (a, b) = (&scene.objects[s], &scene.objects[r]);
            let mut v = [0.0; NUM_RELATIONS];
            v[Relation::Inside.index()] = indicator(polygon_inside(&outlines[s], &outlines[r]));
            v[Relation::Touching.index()] = indicator(touching(&outlines[s], &outlines[r], tol));
            v[Relation::SameShape.index()] = indicator(max_abs_diff(&moments[s], &moments[r]) <= tol.shape);
            v[Relation::NormalizedDistance.index()] = rel_normalized_distance(a, b);
            v[Relation::Mirrored.index()] = indicator(max_abs_diff(&mirror_moments(&moments[s]), &moments[r]) <= tol.shape);
            v[Relation::SameSize.index()] = rel_same_size(a, b, tol);
            v[Relation::Reflection.index()] = rel_reflection(a, b, tol);
            map.insert((s, r), RelationVector::new(v)?);
        }
    }
    Ok(map)
}
