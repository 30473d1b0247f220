//! Convex polygons with counterclockwise vertex lists.

use super::{GeometryError, HalfPlane, Point2, Vec2};
use crate::tol;

/// Convex polygon stored as a counterclockwise vertex list, first vertex not
/// repeated. The empty polygon (no vertices) is a valid value and the result
/// of an infeasible clip.
///
/// Edge iteration follows the convention that vertex `N` wraps to vertex `0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    /// Validating constructor: deduplicates consecutive vertices, normalizes
    /// orientation to counterclockwise, and rejects nonconvex input.
    pub fn new(vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        let mut vs = dedup_cyclic(vertices, tol::VERTEX_DEDUP);
        if vs.len() < 3 {
            return Err(GeometryError::EmptyRegion);
        }
        if signed_area(&vs) < 0.0 {
            vs.reverse();
        }
        let poly = Self { vertices: vs };
        if !poly.is_convex() {
            return Err(GeometryError::EmptyRegion);
        }
        Ok(poly)
    }

    /// Convenience constructor from `(x, y)` pairs.
    pub fn from_coords(coords: &[(f64, f64)]) -> Result<Self, GeometryError> {
        Self::new(coords.iter().map(|&(x, y)| Point2::new(x, y)).collect())
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self {
            vertices: vec![
                Point2::new(x0, y0),
                Point2::new(x1, y0),
                Point2::new(x1, y1),
                Point2::new(x0, y1),
            ],
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Construction without validation; callers guarantee counterclockwise
    /// convex input (clipping preserves both).
    pub(crate) fn from_ccw_unchecked(vertices: Vec<Point2>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        let scale = self.scale_estimate();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            (b - a).cross(c - b) >= -tol::VERTEX_DEDUP * scale * scale
        })
    }

    /// Edges as ordered vertex pairs, wrapping at the end.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace area (nonnegative for the maintained orientation).
    pub fn area(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            signed_area(&self.vertices)
        }
    }

    pub fn contains(&self, q: Point2) -> bool {
        self.contains_with_slack(q, 0.0)
    }

    /// Membership with an absolute boundary band `slack` (positive widens).
    pub fn contains_with_slack(&self, q: Point2, slack: f64) -> bool {
        !self.is_empty()
            && self
                .edges()
                .all(|(a, b)| (b - a).cross(q - a) >= -slack * (b - a).norm())
    }

    /// Clip against a half-plane. The result may be empty. Vertices within a
    /// small band of the boundary count as inside, which makes clipping
    /// idempotent: re-clipping keeps the intersection vertices the first
    /// pass created.
    pub fn clip(&self, h: &HalfPlane) -> ConvexPolygon {
        if self.is_empty() {
            return ConvexPolygon::empty();
        }
        let n = self.vertices.len();
        let norm = h.normal.norm();
        let band = |q: Point2| tol::VERTEX_DEDUP * norm * (1.0 + q.x.abs() + q.y.abs());
        let mut out: Vec<Point2> = Vec::with_capacity(n + 1);
        for i in 0..n {
            let s = self.vertices[i];
            let e = self.vertices[(i + 1) % n];
            let ds = h.excess(s);
            let de = h.excess(e);
            let s_in = ds >= -band(s);
            let e_in = de >= -band(e);
            if s_in {
                out.push(s);
                if !e_in {
                    out.push(intersect_edge(s, e, ds, de));
                }
            } else if e_in {
                out.push(intersect_edge(s, e, ds, de));
            }
        }
        let out = dedup_cyclic(out, tol::VERTEX_DEDUP);
        if out.len() < 3 {
            ConvexPolygon::empty()
        } else {
            ConvexPolygon::from_ccw_unchecked(out)
        }
    }

    /// Intersection with another convex polygon.
    pub fn intersect(&self, other: &ConvexPolygon) -> ConvexPolygon {
        let mut acc = self.clone();
        for (a, b) in other.edges() {
            if acc.is_empty() {
                break;
            }
            // interior of `other` lies left of each edge
            let normal = (b - a).perp();
            acc = acc.clip(&HalfPlane::new(normal, normal.dot(a.to_vec())));
        }
        acc
    }

    /// Closest point of the polygon to `q` (identity when `q` is inside).
    pub fn project(&self, q: Point2) -> Point2 {
        if self.contains(q) {
            return q;
        }
        let mut best = self.vertices[0];
        let mut best_d2 = f64::INFINITY;
        for (a, b) in self.edges() {
            let p = closest_on_segment(a, b, q);
            let d2 = (q - p).norm_squared();
            if d2 < best_d2 {
                best_d2 = d2;
                best = p;
            }
        }
        best
    }

    /// Largest distance from `p` to a vertex (the farthest point of a convex
    /// region from any point is a vertex).
    pub fn max_vertex_distance(&self, p: Point2) -> f64 {
        self.vertices
            .iter()
            .map(|&v| p.distance(v))
            .fold(0.0, f64::max)
    }

    /// Largest pairwise vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, &a) in self.vertices.iter().enumerate() {
            for &b in &self.vertices[i + 1..] {
                d = d.max(a.distance(b));
            }
        }
        d
    }

    /// Arithmetic mean of the vertices; interior for convex polygons, used as
    /// the fan-triangulation anchor.
    pub fn vertex_average(&self) -> Point2 {
        let n = self.vertices.len().max(1) as f64;
        let sum = self
            .vertices
            .iter()
            .fold(Vec2::ZERO, |acc, v| acc + v.to_vec());
        Point2::new(sum.x / n, sum.y / n)
    }

    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = Point2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Point2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        (lo, hi)
    }

    fn scale_estimate(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.x.abs().max(v.y.abs()))
            .fold(1.0, f64::max)
    }
}

fn signed_area(vs: &[Point2]) -> f64 {
    let n = vs.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = vs[i];
        let b = vs[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    0.5 * acc
}

fn intersect_edge(s: Point2, e: Point2, ds: f64, de: f64) -> Point2 {
    // ds and de have opposite signs; linear interpolation along the edge
    let t = ds / (ds - de);
    s + (e - s) * t
}

fn closest_on_segment(a: Point2, b: Point2, q: Point2) -> Point2 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return a;
    }
    let t = ((q - a).dot(ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

fn dedup_cyclic(vs: Vec<Point2>, eps: f64) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::with_capacity(vs.len());
    for v in vs {
        if out.last().is_none_or(|&last| (v - last).norm() > eps) {
            out.push(v);
        }
    }
    while out.len() > 1 && (out[0] - *out.last().unwrap()).norm() <= eps {
        out.pop();
    }
    out
}
