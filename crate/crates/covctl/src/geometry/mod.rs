//! Planar convex-polygon primitives, bounded Voronoi diagrams, and exact
//! moment/centroid computation.
//!
//! Everything here has value semantics and is safe to call concurrently.

mod enclosing;
mod moments;
mod polygon;
mod voronoi;

pub use enclosing::{min_enclosing_ball, min_enclosing_ball_center};
pub use moments::{
    cell_moments, integrate, polygon_moments_uniform, quadrature_sharpness, CellMoments,
};
pub use polygon::ConvexPolygon;
pub use voronoi::{cell_face_with, circumcenter, voronoi_diagram, Segment, VoronoiDiagram};

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Errors from the geometric primitives.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    /// Two generators coincide within tolerance; the caller must perturb or
    /// reject the configuration.
    #[error("generators {0} and {1} coincide within tolerance")]
    DuplicateGenerators(usize, usize),
    /// Collinear generators have no circumcenter.
    #[error("degenerate (collinear) triangle")]
    DegenerateTriangle,
    /// The operation needs a nonempty region.
    #[error("operation on an empty region")]
    EmptyRegion,
    /// Integrated cell mass fell below the zero-mass threshold; the centroid
    /// is undefined and the caller decides policy.
    #[error("cell mass {0:e} below zero-mass threshold")]
    ZeroMass(f64),
}

/// A point of the plane, in the length units of the region `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

/// A displacement / direction in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    pub fn to_vec(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub const ZERO: Vec2 = Vec2::new(0.0, 0.0);

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Counterclockwise perpendicular.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }
}

impl Sub for Point2 {
    type Output = Vec2;
    fn sub(self, rhs: Point2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Add<Vec2> for Point2 {
    type Output = Point2;
    fn add(self, rhs: Vec2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub<Vec2> for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Vec2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, rhs: Vec2) -> Vec2 {
        rhs * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x / rhs, self.y / rhs)
    }
}

/// Closed half-plane `{ q : normal . q >= offset }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub normal: Vec2,
    pub offset: f64,
}

impl HalfPlane {
    /// The normal must be nonzero.
    pub fn new(normal: Vec2, offset: f64) -> Self {
        debug_assert!(normal.norm_squared() > 0.0, "half-plane normal is zero");
        Self { normal, offset }
    }

    /// Bisector half-plane containing `keep`: points at least as close to
    /// `keep` as to `other`.
    pub fn bisector_toward(keep: Point2, other: Point2) -> Self {
        let normal = keep - other;
        let offset = 0.5 * (keep.to_vec() + other.to_vec()).dot(normal);
        Self::new(normal, offset)
    }

    /// Signed slack of the constraint at `q` (nonnegative inside).
    pub fn excess(&self, q: Point2) -> f64 {
        self.normal.dot(q.to_vec()) - self.offset
    }

    pub fn contains(&self, q: Point2) -> bool {
        self.excess(q) >= 0.0
    }
}
