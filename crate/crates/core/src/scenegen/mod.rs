//! Synthetic first-order relational problems.
//!
//! Each problem places two random star-shaped polygons on a 128×128 canvas so
//! that one relation separates the classes while every object-level property
//! (sizes, vertex counts, shapes) comes from the same samplers in both
//! classes. Problems, sampler ranges and relation tolerances are read from a
//! versioned catalog; [`Catalog::builtin`] embeds the default one.

mod noise;
mod relations;
mod render;

pub use noise::{add_relation_noise, perturb_relations, NoiseModel};
pub use relations::{
    extract_relations, rel_inside, rel_mirrored, rel_normalized_distance, rel_reflection, rel_same_shape,
    rel_same_size, rel_touching, RelationMap, Tolerances,
};
pub use render::scene_svg;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PsiError, Result};
use crate::geometry::{self, Point};
use crate::relgraph::{Label, Relation};

/// Side length of the square canvas.
pub const CANVAS: f64 = 128.0;

const BUILTIN_CATALOG: &str = include_str!("catalog.json");
const CATALOG_VERSION: u32 = 1;

/// A closed simple polygon in local coordinates: area centroid at the origin,
/// unit scale. Placed copies are `centroid + scale · vertex`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shape {
    vertices: Vec<Point>,
}

impl Shape {
    pub const MIN_VERTICES: usize = 8;

    /// Validates and recenters the outline on its area centroid.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < Self::MIN_VERTICES {
            return Err(PsiError::InvalidShape(format!(
                "{} vertices, need at least {}",
                vertices.len(),
                Self::MIN_VERTICES
            )));
        }
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(PsiError::InvalidShape("non-finite vertex".into()));
        }
        let area = geometry::signed_area(&vertices);
        if area <= 0.0 {
            return Err(PsiError::InvalidShape(format!("signed area {area} is not positive")));
        }
        if !geometry::is_simple(&vertices) {
            return Err(PsiError::InvalidShape("outline self-intersects".into()));
        }
        let c = geometry::area_centroid(&vertices);
        let vertices = vertices.into_iter().map(|p| Point::new(p.x - c.x, p.y - c.y)).collect();
        Ok(Shape { vertices })
    }

    /// Star polygon: vertex angles jittered around a regular spacing (so they
    /// stay sorted), radii uniform in `[0.5, 1.0]`.
    pub fn random(rng: &mut impl Rng, vertex_range: (usize, usize)) -> Shape {
        loop {
            let k = rng.random_range(vertex_range.0..=vertex_range.1);
            let step = std::f64::consts::TAU / k as f64;
            let vertices = (0..k)
                .map(|i| {
                    let theta = (i as f64 + rng.random_range(-0.35..0.35)) * step;
                    let r = rng.random_range(0.5..=1.0);
                    Point::new(r * theta.cos(), r * theta.sin())
                })
                .collect();
            if let Ok(shape) = Shape::new(vertices) {
                return shape;
            }
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Area at unit scale.
    pub fn area(&self) -> f64 {
        geometry::signed_area(&self.vertices)
    }

    /// Largest vertex distance from the centroid at unit scale.
    pub fn radius(&self) -> f64 {
        self.vertices.iter().map(|p| p.x.hypot(p.y)).fold(0.0, f64::max)
    }

    /// Mirror image about the vertical axis through the centroid.
    pub fn mirrored(&self) -> Shape {
        Shape { vertices: geometry::reflect_vertical(&self.vertices, 0.0) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub shape: Shape,
    pub centroid: Point,
    pub scale: f64,
}

impl SceneObject {
    pub fn new(shape: Shape, centroid: Point, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(PsiError::InvalidShape(format!("scale {scale} must be positive")));
        }
        Ok(SceneObject { shape, centroid, scale })
    }

    /// Outline in canvas coordinates.
    pub fn outline(&self) -> Vec<Point> {
        self.shape
            .vertices
            .iter()
            .map(|v| Point::new(self.centroid.x + self.scale * v.x, self.centroid.y + self.scale * v.y))
            .collect()
    }

    pub fn area(&self) -> f64 {
        self.scale * self.scale * self.shape.area()
    }

    pub fn radius(&self) -> f64 {
        self.scale * self.shape.radius()
    }

    pub fn fits_canvas(&self, margin: f64) -> bool {
        let (lo, hi) = geometry::bounding_box(&self.outline());
        lo.x >= margin && lo.y >= margin && hi.x <= CANVAS - margin && hi.y <= CANVAS - margin
    }

    fn with_area(&self, area: f64) -> SceneObject {
        SceneObject { scale: (area / self.shape.area()).sqrt(), ..self.clone() }
    }

    fn at(&self, centroid: Point) -> SceneObject {
        SceneObject { centroid, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub objects: Vec<SceneObject>,
    pub label: Label,
    pub problem_id: String,
    pub distinguishing_relation: Relation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// Small object inside vs outside a larger one.
    Inside,
    /// Two objects in contact vs separated.
    Touch,
    /// Translated copies vs different shapes of equal area.
    SameShape,
    /// Mirror-image pair at positions reflected about `x = C/2` vs shifted
    /// horizontally (same pairwise distance).
    Reflect,
    /// Equal areas vs areas differing by a factor in `size_ratio`.
    SameSize,
}

/// Closed interval `[lo, hi]`.
pub type Range = (f64, f64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub id: String,
    pub kind: ProblemKind,
    pub object_count: usize,
    pub distinguishing_relation: Relation,
    /// Vertex count range of sampled shapes.
    pub vertices: (usize, usize),
    /// Scale range of the primary (for `inside`, the containing) object.
    pub scale: Range,
    /// Scale range of the contained object.
    #[serde(default)]
    pub inner_scale: Option<Range>,
    /// Minimum boundary gap between a contained object and its container.
    #[serde(default)]
    pub inset: Option<f64>,
    /// Boundary gap range for objects in contact.
    #[serde(default)]
    pub contact_gap: Option<Range>,
    /// Minimum boundary gap between objects that must be apart.
    pub separation: f64,
    /// Horizontal shift range for non-reflected pairs.
    #[serde(default)]
    pub reflect_shift: Option<Range>,
    /// Area ratio range for unequal-size pairs.
    #[serde(default)]
    pub size_ratio: Option<Range>,
    /// Clearance between objects and the canvas border.
    pub margin: f64,
    /// Place the reference object uniformly; when false it sits at the
    /// canvas center.
    #[serde(default = "yes")]
    pub position_randomized: bool,
}

fn yes() -> bool {
    true
}

fn check_range(name: &str, r: Range) -> Result<()> {
    if r.0.is_finite() && r.1.is_finite() && 0.0 < r.0 && r.0 <= r.1 {
        Ok(())
    } else {
        Err(PsiError::InvalidConfig(format!("{name} range {r:?} must satisfy 0 < lo ≤ hi")))
    }
}

fn required<T: Copy>(id: &str, name: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| PsiError::InvalidConfig(format!("problem {id} needs `{name}`")))
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        if self.object_count < 2 {
            return Err(PsiError::InvalidConfig(format!("problem {}: object_count must be ≥ 2", self.id)));
        }
        if self.object_count != 2 {
            return Err(PsiError::InvalidConfig(format!(
                "problem {}: the built-in generators place exactly two objects",
                self.id
            )));
        }
        if self.vertices.0 < Shape::MIN_VERTICES || self.vertices.0 > self.vertices.1 {
            return Err(PsiError::InvalidConfig(format!("problem {}: bad vertex range", self.id)));
        }
        check_range("scale", self.scale)?;
        if self.separation < 0.0 || self.margin < 0.0 {
            return Err(PsiError::InvalidConfig(format!("problem {}: negative gap", self.id)));
        }
        let expected = match self.kind {
            ProblemKind::Inside => {
                check_range("inner_scale", required(&self.id, "inner_scale", self.inner_scale)?)?;
                required(&self.id, "inset", self.inset)?;
                Relation::Inside
            }
            ProblemKind::Touch => {
                let gap = required(&self.id, "contact_gap", self.contact_gap)?;
                check_range("contact_gap", gap)?;
                Relation::Touching
            }
            ProblemKind::SameShape => Relation::SameShape,
            ProblemKind::Reflect => {
                check_range("reflect_shift", required(&self.id, "reflect_shift", self.reflect_shift)?)?;
                Relation::Reflection
            }
            ProblemKind::SameSize => {
                let r = required(&self.id, "size_ratio", self.size_ratio)?;
                check_range("size_ratio", r)?;
                if r.0 <= 1.0 {
                    return Err(PsiError::InvalidConfig(format!("problem {}: size_ratio must exceed 1", self.id)));
                }
                Relation::SameSize
            }
        };
        if expected != self.distinguishing_relation {
            return Err(PsiError::InvalidConfig(format!(
                "problem {}: a {:?} generator separates classes by {}, not {}",
                self.id,
                self.kind,
                expected.name(),
                self.distinguishing_relation.name()
            )));
        }
        Ok(())
    }
}

/// Problem definitions plus the relation tolerances and noise model shared
/// by every problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub version: u32,
    pub canvas: f64,
    pub max_attempts: usize,
    pub tolerances: Tolerances,
    pub noise: NoiseModel,
    pub problems: Vec<ProblemSpec>,
}

impl Catalog {
    pub fn builtin() -> Catalog {
        Catalog::from_json(BUILTIN_CATALOG).expect("embedded catalog is valid")
    }

    pub fn from_json(text: &str) -> Result<Catalog> {
        let catalog: Catalog = serde_json::from_str(text)?;
        catalog.validate()?;
        Ok(catalog)
    }

    pub fn load(path: &std::path::Path) -> Result<Catalog> {
        Catalog::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CATALOG_VERSION {
            return Err(PsiError::InvalidConfig(format!(
                "catalog version {} is not supported (expected {CATALOG_VERSION})",
                self.version
            )));
        }
        if self.canvas != CANVAS {
            return Err(PsiError::InvalidConfig(format!("canvas must be {CANVAS}")));
        }
        if self.max_attempts == 0 {
            return Err(PsiError::InvalidConfig("max_attempts must be positive".into()));
        }
        for (i, p) in self.problems.iter().enumerate() {
            p.validate()?;
            if self.problems[..i].iter().any(|q| q.id == p.id) {
                return Err(PsiError::InvalidConfig(format!("duplicate problem id {}", p.id)));
            }
        }
        Ok(())
    }

    pub fn problem(&self, id: &str) -> Result<&ProblemSpec> {
        self.problems.iter().find(|p| p.id == id).ok_or_else(|| PsiError::UnknownProblem(id.to_string()))
    }

    pub fn problem_ids(&self) -> impl Iterator<Item = &str> {
        self.problems.iter().map(|p| p.id.as_str())
    }

    pub fn generate(&self, id: &str, label: Label, rng: &mut impl Rng) -> Result<Scene> {
        generate_scene_with(self.problem(id)?, label, &self.tolerances, self.max_attempts, rng)
    }
}

/// Default rejection-sampling budget per scene.
pub const MAX_ATTEMPTS: usize = 1000;

/// Generates one scene of `spec` with the default tolerances.
pub fn generate_scene(spec: &ProblemSpec, label: Label, rng: &mut impl Rng) -> Result<Scene> {
    generate_scene_with(spec, label, &Tolerances::default(), MAX_ATTEMPTS, rng)
}

/// Generates one scene, retrying placement up to `max_attempts` times. Object
/// order in the returned scene is shuffled.
pub fn generate_scene_with(
    spec: &ProblemSpec,
    label: Label,
    tol: &Tolerances,
    max_attempts: usize,
    rng: &mut impl Rng,
) -> Result<Scene> {
    spec.validate()?;
    let positive = label == Label::Positive;
    let mut last_failure = "none";
    for _ in 0..max_attempts {
        let attempt = match spec.kind {
            ProblemKind::Inside => place_inside(spec, positive, tol, rng),
            ProblemKind::Touch => place_touch(spec, positive, tol, rng),
            ProblemKind::SameShape => place_same_shape(spec, positive, tol, rng),
            ProblemKind::Reflect => place_reflect(spec, positive, tol, rng),
            ProblemKind::SameSize => place_same_size(spec, positive, tol, rng),
        };
        match attempt {
            Ok(mut objects) => {
                objects.shuffle(rng);
                return Ok(Scene {
                    objects,
                    label,
                    problem_id: spec.id.clone(),
                    distinguishing_relation: spec.distinguishing_relation,
                });
            }
            Err(constraint) => last_failure = constraint,
        }
    }
    Err(PsiError::PlacementFailed {
        constraint: format!("{} ({}): {last_failure}", spec.id, label),
        attempts: max_attempts,
    })
}

type Placement = std::result::Result<Vec<SceneObject>, &'static str>;

fn sample(rng: &mut impl Rng, r: Range) -> f64 {
    if r.0 == r.1 {
        r.0
    } else {
        rng.random_range(r.0..=r.1)
    }
}

fn random_object(spec: &ProblemSpec, scale: Range, rng: &mut impl Rng) -> SceneObject {
    let shape = Shape::random(rng, spec.vertices);
    let s = sample(rng, scale);
    SceneObject { shape, centroid: Point::new(CANVAS / 2.0, CANVAS / 2.0), scale: s }
}

/// Uniform position keeping the object's bounding circle inside the margins.
fn reference_position(spec: &ProblemSpec, obj: &SceneObject, rng: &mut impl Rng) -> std::result::Result<Point, &'static str> {
    if !spec.position_randomized {
        return Ok(Point::new(CANVAS / 2.0, CANVAS / 2.0));
    }
    let r = obj.radius() + spec.margin;
    if 2.0 * r >= CANVAS {
        return Err("object too large for canvas");
    }
    Ok(Point::new(rng.random_range(r..CANVAS - r), rng.random_range(r..CANVAS - r)))
}

fn uniform_position(spec: &ProblemSpec, obj: &SceneObject, rng: &mut impl Rng) -> std::result::Result<Point, &'static str> {
    let r = obj.radius() + spec.margin;
    if 2.0 * r >= CANVAS {
        return Err("object too large for canvas");
    }
    Ok(Point::new(rng.random_range(r..CANVAS - r), rng.random_range(r..CANVAS - r)))
}

fn separated(a: &SceneObject, b: &SceneObject, gap: f64) -> bool {
    let (pa, pb) = (a.outline(), b.outline());
    !geometry::polygons_overlap(&pa, &pb) && geometry::boundary_distance(&pa, &pb) >= gap
}

const POSITION_RETRIES: usize = 200;

fn place_inside_position(
    spec: &ProblemSpec,
    positive: bool,
    tol: &Tolerances,
    big: &SceneObject,
    small: &mut SceneObject,
    rng: &mut impl Rng,
) -> std::result::Result<(), &'static str> {
    if positive {
        let reach = (big.radius() - small.radius()).max(0.0);
        let (t, r) = (rng.random_range(0.0..std::f64::consts::TAU), reach * rng.random::<f64>().sqrt());
        small.centroid = big.centroid.offset(r * t.cos(), r * t.sin());
        let outer = big.outline();
        let inner = small.outline();
        if !relations::polygon_inside(&inner, &outer) {
            return Err("contained object not strictly inside its container");
        }
        if geometry::boundary_distance(&inner, &outer) < spec.inset.unwrap_or(0.0) {
            return Err("contained object too close to the container boundary");
        }
    } else {
        small.centroid = uniform_position(spec, small, rng)?;
        if !separated(small, big, spec.separation.max(tol.touch + 1e-9)) {
            return Err("outside object overlaps or touches the larger object");
        }
    }
    Ok(())
}

fn place_inside(spec: &ProblemSpec, positive: bool, tol: &Tolerances, rng: &mut impl Rng) -> Placement {
    let inner_scale = spec.inner_scale.ok_or("missing inner_scale")?;
    let mut big = random_object(spec, spec.scale, rng);
    big.centroid = reference_position(spec, &big, rng)?;
    let mut small = random_object(spec, inner_scale, rng);
    // retry positions with the shapes fixed so rejection does not bias shape statistics
    let mut last = "";
    for _ in 0..POSITION_RETRIES {
        match place_inside_position(spec, positive, tol, &big, &mut small, rng) {
            Ok(()) => {
                last = "";
                break;
            }
            Err(e) => last = e,
        }
    }
    if !last.is_empty() {
        return Err(last);
    }
    if !big.fits_canvas(spec.margin) || !small.fits_canvas(spec.margin) {
        return Err("object leaves the canvas");
    }
    Ok(vec![big, small])
}

/// Center distance along `dir` at which `b` sits `gap` away from `a`,
/// found by bisection on the boundary distance.
fn contact_offset(a: &SceneObject, b: &SceneObject, dir: (f64, f64), gap: f64) -> f64 {
    let pa = a.outline();
    let at = |t: f64| b.at(a.centroid.offset(t * dir.0, t * dir.1));
    let (mut lo, mut hi) = (0.0, a.radius() + b.radius() + gap + 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let pb = at(mid).outline();
        if geometry::polygons_overlap(&pa, &pb) || geometry::boundary_distance(&pa, &pb) < gap {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn place_touch(spec: &ProblemSpec, positive: bool, tol: &Tolerances, rng: &mut impl Rng) -> Placement {
    let mut a = random_object(spec, spec.scale, rng);
    a.centroid = reference_position(spec, &a, rng)?;
    let mut b = random_object(spec, spec.scale, rng);
    if positive {
        let gap_range = spec.contact_gap.ok_or("missing contact_gap")?;
        let gap = sample(rng, gap_range);
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let dir = (theta.cos(), theta.sin());
        let t = contact_offset(&a, &b, dir, gap);
        b.centroid = a.centroid.offset(t * dir.0, t * dir.1);
        let (pa, pb) = (a.outline(), b.outline());
        let d = geometry::boundary_distance(&pa, &pb);
        if geometry::polygons_overlap(&pa, &pb) || d > tol.touch.min(gap_range.1 + 0.25) {
            return Err("contact placement missed the target gap");
        }
    } else {
        b.centroid = uniform_position(spec, &b, rng)?;
        if !separated(&a, &b, spec.separation.max(tol.touch + 1e-9)) {
            return Err("separated objects overlap or touch");
        }
    }
    if !a.fits_canvas(spec.margin) || !b.fits_canvas(spec.margin) {
        return Err("object leaves the canvas");
    }
    Ok(vec![a, b])
}

fn place_same_shape(spec: &ProblemSpec, positive: bool, tol: &Tolerances, rng: &mut impl Rng) -> Placement {
    let mut a = random_object(spec, spec.scale, rng);
    a.centroid = reference_position(spec, &a, rng)?;
    let mut b = if positive {
        a.clone()
    } else {
        let other = random_object(spec, spec.scale, rng);
        other.with_area(a.area())
    };
    b.centroid = uniform_position(spec, &b, rng)?;
    if !separated(&a, &b, spec.separation) {
        return Err("objects overlap or are too close");
    }
    if !positive && relations::rel_same_shape(&a, &b, tol) == 1.0 {
        return Err("independent shapes coincide");
    }
    if !a.fits_canvas(spec.margin) || !b.fits_canvas(spec.margin) {
        return Err("object leaves the canvas");
    }
    Ok(vec![a, b])
}

fn place_reflect(spec: &ProblemSpec, positive: bool, tol: &Tolerances, rng: &mut impl Rng) -> Placement {
    let shift = spec.reflect_shift.ok_or("missing reflect_shift")?;
    let a = random_object(spec, spec.scale, rng);
    let r = a.radius() + spec.margin;
    let half_gap = 0.5 * spec.separation;
    let (x_lo, x_hi) = (r, CANVAS / 2.0 - half_gap);
    if x_lo >= x_hi {
        return Err("object too large for a mirrored pair");
    }
    let x = rng.random_range(x_lo..x_hi);
    let y = rng.random_range(r..CANVAS - r);
    let mut left = a.at(Point::new(x, y));
    let mut right = SceneObject { shape: a.shape.mirrored(), centroid: Point::new(CANVAS - x, y), scale: a.scale };
    if !positive {
        let d = sample(rng, shift) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        left.centroid.x += d;
        right.centroid.x += d;
        if relations::rel_reflection(&left, &right, tol) == 1.0 {
            return Err("shifted pair is still reflected");
        }
    }
    if !separated(&left, &right, spec.separation) {
        return Err("mirrored objects overlap or are too close");
    }
    if !left.fits_canvas(spec.margin) || !right.fits_canvas(spec.margin) {
        return Err("object leaves the canvas");
    }
    Ok(vec![left, right])
}

fn place_same_size(spec: &ProblemSpec, positive: bool, tol: &Tolerances, rng: &mut impl Rng) -> Placement {
    let mut a = random_object(spec, spec.scale, rng);
    let area = a.area();
    let other = random_object(spec, spec.scale, rng);
    let mut b = if positive {
        other.with_area(area)
    } else {
        // Split so the pair's mean area matches the positive class.
        let ratio = sample(rng, spec.size_ratio.ok_or("missing size_ratio")?);
        let big = 2.0 * ratio * area / (1.0 + ratio);
        let small = 2.0 * area / (1.0 + ratio);
        let (ab, bb) = if rng.random::<bool>() { (big, small) } else { (small, big) };
        a = a.with_area(ab);
        other.with_area(bb)
    };
    a.centroid = reference_position(spec, &a, rng)?;
    b.centroid = uniform_position(spec, &b, rng)?;
    if !separated(&a, &b, spec.separation) {
        return Err("objects overlap or are too close");
    }
    if relations::rel_same_shape(&a, &b, tol) == 1.0 {
        return Err("independent shapes coincide");
    }
    if !a.fits_canvas(spec.margin) || !b.fits_canvas(spec.margin) {
        return Err("object leaves the canvas");
    }
    Ok(vec![a, b])
}
