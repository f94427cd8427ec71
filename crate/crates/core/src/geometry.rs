//! Planar polygon primitives: area, centroid, containment, boundary distance
//! and area moments. Polygons are closed implicitly (last vertex connects to
//! the first) and positively oriented polygons have positive signed area.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn offset(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

fn edges(poly: &[Point]) -> impl Iterator<Item = (Point, Point)> + '_ {
    let n = poly.len();
    (0..n).map(move |i| (poly[i], poly[(i + 1) % n]))
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Shoelace area, positive for counter-clockwise vertex order.
pub fn signed_area(poly: &[Point]) -> f64 {
    0.5 * edges(poly).map(|(a, b)| a.x * b.y - b.x * a.y).sum::<f64>()
}

/// Centroid of the enclosed area (not the vertex mean).
pub fn area_centroid(poly: &[Point]) -> Point {
    let a = signed_area(poly);
    let (mut cx, mut cy) = (0.0, 0.0);
    for (p, q) in edges(poly) {
        let w = p.x * q.y - q.x * p.y;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    Point::new(cx / (6.0 * a), cy / (6.0 * a))
}

pub fn perimeter(poly: &[Point]) -> f64 {
    edges(poly).map(|(a, b)| a.distance(b)).sum()
}

/// Axis-aligned bounding box as `(min, max)`.
pub fn bounding_box(poly: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in poly {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

/// Even–odd crossing test. Points exactly on the boundary may fall either way.
pub fn contains_point(poly: &[Point], p: Point) -> bool {
    let mut inside = false;
    for (a, b) in edges(poly) {
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Inside by the crossing test and not within `1e-9` of the boundary.
pub fn strictly_contains_point(poly: &[Point], p: Point) -> bool {
    contains_point(poly, p) && point_boundary_distance(poly, p) > 1e-9
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(Point::new(a.x + t * dx, a.y + t * dy))
}

pub fn point_boundary_distance(poly: &[Point], p: Point) -> f64 {
    edges(poly)
        .map(|(a, b)| point_segment_distance(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Proper or touching intersection of closed segments.
pub fn segments_intersect(a0: Point, a1: Point, b0: Point, b1: Point) -> bool {
    let d1 = cross(b0, b1, a0);
    let d2 = cross(b0, b1, a1);
    let d3 = cross(a0, a1, b0);
    let d4 = cross(a0, a1, b1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |p: Point, q: Point, r: Point, d: f64| {
        d == 0.0 && r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    on(b0, b1, a0, d1) || on(b0, b1, a1, d2) || on(a0, a1, b0, d3) || on(a0, a1, b1, d4)
}

pub fn segment_distance(a0: Point, a1: Point, b0: Point, b1: Point) -> f64 {
    if segments_intersect(a0, a1, b0, b1) {
        return 0.0;
    }
    point_segment_distance(a0, b0, b1)
        .min(point_segment_distance(a1, b0, b1))
        .min(point_segment_distance(b0, a0, a1))
        .min(point_segment_distance(b1, a0, a1))
}

/// Minimum distance between the two boundaries (zero when they cross).
pub fn boundary_distance(a: &[Point], b: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    for (a0, a1) in edges(a) {
        for (b0, b1) in edges(b) {
            best = best.min(segment_distance(a0, a1, b0, b1));
            if best == 0.0 {
                return 0.0;
            }
        }
    }
    best
}

/// True when no two non-adjacent edges touch.
pub fn is_simple(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Whether the boundaries overlap or either polygon contains the other.
pub fn polygons_overlap(a: &[Point], b: &[Point]) -> bool {
    boundary_distance(a, b) == 0.0 || contains_point(b, a[0]) || contains_point(a, b[0])
}

/// Area moments `∫∫ xᵖ yᵠ dA` up to order three.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub m00: f64,
    pub m10: f64,
    pub m01: f64,
    pub m20: f64,
    pub m11: f64,
    pub m02: f64,
    pub m30: f64,
    pub m21: f64,
    pub m12: f64,
    pub m03: f64,
}

/// Exact polygon moments via Green's theorem.
pub fn raw_moments(poly: &[Point]) -> Moments {
    let mut m = Moments::default();
    for (p, q) in edges(poly) {
        let (x0, y0, x1, y1) = (p.x, p.y, q.x, q.y);
        let a = x0 * y1 - x1 * y0;
        m.m00 += a;
        m.m10 += a * (x0 + x1);
        m.m01 += a * (y0 + y1);
        m.m20 += a * (x0 * x0 + x0 * x1 + x1 * x1);
        m.m02 += a * (y0 * y0 + y0 * y1 + y1 * y1);
        m.m11 += a * (x0 * y1 + 2.0 * x0 * y0 + 2.0 * x1 * y1 + x1 * y0);
        m.m30 += a * (x0 * x0 * x0 + x0 * x0 * x1 + x0 * x1 * x1 + x1 * x1 * x1);
        m.m03 += a * (y0 * y0 * y0 + y0 * y0 * y1 + y0 * y1 * y1 + y1 * y1 * y1);
        m.m21 += a * (x0 * x0 * (3.0 * y0 + y1) + 2.0 * x0 * x1 * (y0 + y1) + x1 * x1 * (y0 + 3.0 * y1));
        m.m12 += a * (y0 * y0 * (3.0 * x0 + x1) + 2.0 * y0 * y1 * (x0 + x1) + y1 * y1 * (x0 + 3.0 * x1));
    }
    m.m00 /= 2.0;
    m.m10 /= 6.0;
    m.m01 /= 6.0;
    m.m20 /= 12.0;
    m.m02 /= 12.0;
    m.m11 /= 24.0;
    m.m30 /= 20.0;
    m.m03 /= 20.0;
    m.m21 /= 60.0;
    m.m12 /= 60.0;
    m
}

/// Moments about the area centroid.
pub fn central_moments(poly: &[Point]) -> Moments {
    let c = area_centroid(poly);
    let shifted: Vec<Point> = poly.iter().map(|p| Point::new(p.x - c.x, p.y - c.y)).collect();
    let mut m = raw_moments(&shifted);
    m.m10 = 0.0;
    m.m01 = 0.0;
    m
}

/// Scale-normalized central moments `η_pq = μ_pq / μ00^(1 + (p+q)/2)` in the
/// order η20, η11, η02, η30, η21, η12, η03. Translation- and scale-invariant.
pub fn normalized_central_moments(poly: &[Point]) -> [f64; 7] {
    let mu = central_moments(poly);
    let a = mu.m00;
    let s2 = a * a;
    let s3 = a.powf(2.5);
    [mu.m20 / s2, mu.m11 / s2, mu.m02 / s2, mu.m30 / s3, mu.m21 / s3, mu.m12 / s3, mu.m03 / s3]
}

/// Mirror about the vertical line `x = axis`, keeping counter-clockwise order.
pub fn reflect_vertical(poly: &[Point], axis: f64) -> Vec<Point> {
    poly.iter().rev().map(|p| Point::new(2.0 * axis - p.x, p.y)).collect()
}
