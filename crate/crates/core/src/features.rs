//! Handcrafted extractors: per-object node descriptors, a whole-scene
//! occupancy vector and a 4×4 grid of patch descriptors.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PsiError, Result};
use crate::geometry::{self, Point};
use crate::relgraph::{directed_pairs, ObjectGraph, RelationVector};
use crate::scenegen::{add_relation_noise, extract_relations, NoiseModel, Scene, SceneObject, Tolerances, CANVAS};

/// Length of [`object_descriptor`].
pub const OBJECT_DIM: usize = 16;
/// Cells per side of the global occupancy grid.
pub const GLOBAL_GRID: usize = 16;
/// Length of [`global_descriptor`].
pub const GLOBAL_DIM: usize = GLOBAL_GRID * GLOBAL_GRID;
/// Cells per side of the patch grid.
pub const PATCH_GRID: usize = 4;
/// Number of patch nodes.
pub const PATCH_COUNT: usize = PATCH_GRID * PATCH_GRID;
/// Length of one patch descriptor.
pub const PATCH_DIM: usize = 16;

const GLOBAL_SAMPLES: usize = 8;
const PATCH_SAMPLES: usize = 16;
const MIN_AREA: f64 = 1e-9;

/// Extractor selection by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extractor {
    /// One node per object, relation edges.
    Object,
    /// One occupancy vector per scene.
    Global,
    /// Sixteen edgeless patch nodes.
    Patch,
}

impl Extractor {
    pub fn name(self) -> &'static str {
        match self {
            Extractor::Object => "object",
            Extractor::Global => "global",
            Extractor::Patch => "patch",
        }
    }
}

impl std::str::FromStr for Extractor {
    type Err = PsiError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "object" => Ok(Extractor::Object),
            "global" => Ok(Extractor::Global),
            "patch" => Ok(Extractor::Patch),
            other => Err(PsiError::InvalidConfig(format!("unknown extractor {other:?}"))),
        }
    }
}

/// Node features of one object:
///
/// | slots | content |
/// |-------|---------|
/// | 0–1   | centroid x, y ÷ C |
/// | 2     | √area ÷ C |
/// | 3     | perimeter ÷ 4C |
/// | 4     | compactness 4π·area/perimeter² |
/// | 5     | eccentricity of the covariance ellipse |
/// | 6–7   | cos, sin of the principal-axis angle |
/// | 8–14  | η20, η11, η02, η30, η21, η12, η03 |
/// | 15    | reserved, 0 |
pub fn object_descriptor(obj: &SceneObject) -> Result<Vec<f64>> {
    let poly = obj.outline();
    let area = geometry::signed_area(&poly);
    if !(area >= MIN_AREA) {
        return Err(PsiError::InvalidShape(format!("degenerate polygon with area {area}")));
    }
    let c = geometry::area_centroid(&poly);
    let perimeter = geometry::perimeter(&poly);
    let mu = geometry::central_moments(&poly);
    let (a, b, h) = (mu.m20 / mu.m00, mu.m02 / mu.m00, mu.m11 / mu.m00);
    let spread = ((a - b).powi(2) + 4.0 * h * h).sqrt();
    let (major, minor) = (0.5 * (a + b + spread), (0.5 * (a + b - spread)).max(0.0));
    let eccentricity = if major > 0.0 { (1.0 - minor / major).max(0.0).sqrt() } else { 0.0 };
    let theta = 0.5 * (2.0 * h).atan2(a - b);
    let eta = geometry::normalized_central_moments(&poly);

    let mut d = Vec::with_capacity(OBJECT_DIM);
    d.push(c.x / CANVAS);
    d.push(c.y / CANVAS);
    d.push(area.sqrt() / CANVAS);
    d.push(perimeter / (4.0 * CANVAS));
    d.push((4.0 * std::f64::consts::PI * area / (perimeter * perimeter)).min(1.0));
    d.push(eccentricity);
    d.push(theta.cos());
    d.push(theta.sin());
    d.extend_from_slice(&eta);
    d.push(0.0);
    if d.iter().any(|v| !v.is_finite()) {
        return Err(PsiError::NonFinite(format!("object descriptor {d:?}")));
    }
    Ok(d)
}

/// Union of the scene's polygons with bounding boxes for quick rejection.
struct Covered {
    outlines: Vec<(Vec<Point>, (Point, Point))>,
}

impl Covered {
    fn new(scene: &Scene) -> Covered {
        let outlines = scene
            .objects
            .iter()
            .map(|o| {
                let p = o.outline();
                let bb = geometry::bounding_box(&p);
                (p, bb)
            })
            .collect();
        Covered { outlines }
    }

    fn contains(&self, p: Point) -> bool {
        self.outlines.iter().any(|(poly, (lo, hi))| {
            p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && geometry::contains_point(poly, p)
        })
    }

    /// Covered sample points of a square cell, sampled on an `s × s` grid at
    /// the sub-cell centers.
    fn samples(&self, x0: f64, y0: f64, size: f64, s: usize) -> Vec<Point> {
        let step = size / s as f64;
        let mut out = Vec::new();
        for j in 0..s {
            for i in 0..s {
                let p = Point::new(x0 + (i as f64 + 0.5) * step, y0 + (j as f64 + 0.5) * step);
                if self.contains(p) {
                    out.push(p);
                }
            }
        }
        out
    }
}

/// 16×16 grid of covered fractions (8×8 supersamples per cell), row-major
/// with rows along y.
pub fn global_descriptor(scene: &Scene) -> Vec<f64> {
    let covered = Covered::new(scene);
    let cell = CANVAS / GLOBAL_GRID as f64;
    let total = (GLOBAL_SAMPLES * GLOBAL_SAMPLES) as f64;
    let mut out = Vec::with_capacity(GLOBAL_DIM);
    for row in 0..GLOBAL_GRID {
        for col in 0..GLOBAL_GRID {
            let hits = covered.samples(col as f64 * cell, row as f64 * cell, cell, GLOBAL_SAMPLES).len();
            out.push(hits as f64 / total);
        }
    }
    out
}

/// One descriptor per 4×4 grid cell (row-major, rows along y), from 16×16
/// samples per cell:
///
/// | slots | content |
/// |-------|---------|
/// | 0     | covered fraction |
/// | 1–2   | centroid of the covered samples ÷ C |
/// | 3–4   | centroid offset from the cell center ÷ cell size |
/// | 5–7   | covariance xx, xy, yy of the covered samples ÷ cell² |
/// | 8–15  | 0 |
///
/// Empty cells give the zero vector.
pub fn patch_descriptors(scene: &Scene) -> Vec<Vec<f64>> {
    let covered = Covered::new(scene);
    let cell = CANVAS / PATCH_GRID as f64;
    let total = (PATCH_SAMPLES * PATCH_SAMPLES) as f64;
    let mut out = Vec::with_capacity(PATCH_COUNT);
    for row in 0..PATCH_GRID {
        for col in 0..PATCH_GRID {
            let (x0, y0) = (col as f64 * cell, row as f64 * cell);
            let pts = covered.samples(x0, y0, cell, PATCH_SAMPLES);
            let mut d = vec![0.0; PATCH_DIM];
            if !pts.is_empty() {
                let k = pts.len() as f64;
                let mx = pts.iter().map(|p| p.x).sum::<f64>() / k;
                let my = pts.iter().map(|p| p.y).sum::<f64>() / k;
                let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
                for p in &pts {
                    sxx += (p.x - mx) * (p.x - mx);
                    sxy += (p.x - mx) * (p.y - my);
                    syy += (p.y - my) * (p.y - my);
                }
                let c2 = cell * cell;
                d[0] = k / total;
                d[1] = mx / CANVAS;
                d[2] = my / CANVAS;
                d[3] = (mx - (x0 + 0.5 * cell)) / cell;
                d[4] = (my - (y0 + 0.5 * cell)) / cell;
                d[5] = sxx / k / c2;
                d[6] = sxy / k / c2;
                d[7] = syy / k / c2;
            }
            out.push(d);
        }
    }
    out
}

/// Object graph of a scene: one node per object in scene order, edges from
/// [`extract_relations`], perturbed by `noise` when given.
pub fn scene_to_graph(
    scene: &Scene,
    tol: &Tolerances,
    noise: Option<&NoiseModel>,
    rng: &mut impl Rng,
) -> Result<ObjectGraph> {
    let nodes = scene.objects.iter().map(object_descriptor).collect::<Result<Vec<_>>>()?;
    let clean = extract_relations(scene, tol)?;
    let n = nodes.len();
    let edges: Vec<RelationVector> = directed_pairs(n)
        .map(|pair| {
            let v = &clean[&pair];
            match noise {
                Some(model) => add_relation_noise(v, model, rng),
                None => *v,
            }
        })
        .collect();
    ObjectGraph::from_dense(nodes, edges)
}

/// Edgeless graph of the 16 patch descriptors.
pub fn scene_to_patch_graph(scene: &Scene) -> Result<ObjectGraph> {
    ObjectGraph::nodes_only(patch_descriptors(scene))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relgraph::{Label, Relation};
    use crate::scenegen::{Catalog, Shape};
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(seed)
    }

    fn square_shape() -> Shape {
        let pts = [(-1.0, -1.0), (0.0, -1.0), (1.0, -1.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (-1.0, 1.0), (-1.0, 0.0)];
        Shape::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    fn scene(objects: Vec<SceneObject>) -> Scene {
        Scene { objects, label: Label::Positive, problem_id: "test".into(), distinguishing_relation: Relation::Inside }
    }

    #[test]
    fn circle_is_compact() {
        let shape = Shape::new(
            (0..64)
                .map(|i| {
                    let t = std::f64::consts::TAU * i as f64 / 64.0;
                    Point::new(t.cos(), t.sin())
                })
                .collect(),
        )
        .unwrap();
        let d = object_descriptor(&SceneObject::new(shape, Point::new(64.0, 64.0), 20.0).unwrap()).unwrap();
        assert_eq!(d.len(), OBJECT_DIM);
        assert!(d[4] >= 0.99, "compactness {}", d[4]);
        assert!(d[5] < 1e-3, "eccentricity {}", d[5]);
        assert_eq!(d[15], 0.0);
    }

    #[test]
    fn degenerate_polygon_is_rejected() {
        let obj = SceneObject::new(square_shape(), Point::new(5.0, 5.0), 1e-6).unwrap();
        assert!(object_descriptor(&obj).is_err());
    }

    #[test]
    fn elongated_shape_orientation() {
        // 4:1 rectangle along x
        let pts = [(-4.0, -1.0), (0.0, -1.0), (4.0, -1.0), (4.0, 0.0), (4.0, 1.0), (0.0, 1.0), (-4.0, 1.0), (-4.0, 0.0)];
        let shape = Shape::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap();
        let d = object_descriptor(&SceneObject::new(shape, Point::new(64.0, 64.0), 2.0).unwrap()).unwrap();
        assert!((d[6] - 1.0).abs() < 1e-12 && d[7].abs() < 1e-12);
        assert!((d[5] - (1.0f64 - 1.0 / 16.0).sqrt()).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn moment_block_is_pose_invariant(seed in any::<u64>(), dx in -30.0f64..30.0, dy in -30.0f64..30.0) {
            let shape = Shape::random(&mut rng(seed), (10, 16));
            let a = SceneObject::new(shape.clone(), Point::new(64.0, 64.0), 10.0).unwrap();
            let moved = SceneObject::new(shape.clone(), Point::new(64.0 + dx, 64.0 + dy), 10.0).unwrap();
            let scaled = SceneObject::new(shape, Point::new(64.0, 64.0), 20.0).unwrap();
            let (da, dm, ds) = (object_descriptor(&a).unwrap(), object_descriptor(&moved).unwrap(), object_descriptor(&scaled).unwrap());
            for k in 8..15 {
                prop_assert!((da[k] - dm[k]).abs() < 1e-9);
                prop_assert!((da[k] - ds[k]).abs() < 1e-6);
            }
            if dx.abs() > 1e-6 {
                prop_assert!(da[0] != dm[0]);
            }
            prop_assert!(da.iter().all(|v| v.is_finite()));
            prop_assert!((0.0..=1.0).contains(&da[0]) && (0.0..=1.0).contains(&da[1]));
            prop_assert!(da[4] > 0.0 && da[4] <= 1.0);
        }
    }

    #[test]
    fn occupancy_examples() {
        assert!(global_descriptor(&scene(vec![])).iter().all(|&v| v == 0.0));

        let full = SceneObject::new(square_shape(), Point::new(64.0, 64.0), 64.0).unwrap();
        let g = global_descriptor(&scene(vec![full]));
        assert_eq!(g.len(), GLOBAL_DIM);
        assert!(g.iter().all(|&v| v == 1.0));

        let corner = SceneObject::new(square_shape(), Point::new(8.0, 8.0), 8.0).unwrap();
        let g = global_descriptor(&scene(vec![corner]));
        for row in 0..GLOBAL_GRID {
            for col in 0..GLOBAL_GRID {
                let expected = if row < 2 && col < 2 { 1.0 } else { 0.0 };
                assert_eq!(g[row * GLOBAL_GRID + col], expected, "cell ({row}, {col})");
            }
        }
    }

    #[test]
    fn patch_examples() {
        let p = patch_descriptors(&scene(vec![]));
        assert_eq!(p.len(), PATCH_COUNT);
        assert!(p.iter().all(|d| d.len() == PATCH_DIM && d.iter().all(|&v| v == 0.0)));

        // fills cell (0, 1) exactly
        let obj = SceneObject::new(square_shape(), Point::new(48.0, 16.0), 16.0).unwrap();
        let p = patch_descriptors(&scene(vec![obj]));
        let d = &p[1];
        assert_eq!(d[0], 1.0);
        assert!((d[1] - 48.0 / CANVAS).abs() < 1e-12 && (d[2] - 16.0 / CANVAS).abs() < 1e-12);
        assert!(d[3].abs() < 1e-12 && d[4].abs() < 1e-12);
        // variance of a uniform 16-point grid over the unit interval
        let var = (0..16).map(|i| ((i as f64 + 0.5) / 16.0 - 0.5).powi(2)).sum::<f64>() / 16.0;
        assert!((d[5] - var).abs() < 1e-12 && d[6].abs() < 1e-12 && (d[7] - var).abs() < 1e-12);
        assert!(p.iter().enumerate().all(|(i, d)| i == 1 || d.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn graphs_from_scenes() {
        let catalog = Catalog::builtin();
        let tol = catalog.tolerances;
        let s = catalog.generate("P-INSIDE", Label::Positive, &mut rng(3)).unwrap();
        let g = scene_to_graph(&s, &tol, None, &mut rng(0)).unwrap();
        assert_eq!((g.node_count(), g.edges().count(), g.dim()), (2, 2, OBJECT_DIM));
        assert_eq!(g.edges().filter(|(_, e)| e.get(Relation::Inside) == 1.0).count(), 1);
        let clean = extract_relations(&s, &tol).unwrap();
        assert!(g.edges().all(|(p, e)| *e == clean[&p]));

        let noisy = scene_to_graph(&s, &tol, Some(&catalog.noise), &mut rng(0)).unwrap();
        let again = scene_to_graph(&s, &tol, Some(&catalog.noise), &mut rng(0)).unwrap();
        assert_eq!(noisy, again);
        assert_ne!(noisy, g);

        let four = scene((0..4).map(|i| SceneObject::new(square_shape(), Point::new(20.0 + 25.0 * i as f64, 64.0), 5.0).unwrap()).collect());
        assert_eq!(scene_to_graph(&four, &tol, None, &mut rng(0)).unwrap().edges().count(), 12);
        assert_eq!(scene_to_patch_graph(&four).unwrap().node_count(), PATCH_COUNT);
    }
}
