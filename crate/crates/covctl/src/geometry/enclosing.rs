//! Minimum enclosing disk of a convex polygon.
//!
//! The farthest point of a convex polygon from any center is a vertex, so
//! the smallest disk containing the polygon is the smallest disk containing
//! its vertices. Computed by the deterministic incremental scheme (no
//! shuffle): rebuild with each violating vertex forced onto the boundary.

use super::{circumcenter, ConvexPolygon, GeometryError, Point2};

/// Center and radius of the smallest disk containing the polygon.
pub fn min_enclosing_ball(poly: &ConvexPolygon) -> Result<(Point2, f64), GeometryError> {
    if poly.is_empty() {
        return Err(GeometryError::EmptyRegion);
    }
    Ok(mindisk(poly.vertices()))
}

/// Center of the smallest disk containing the polygon.
pub fn min_enclosing_ball_center(poly: &ConvexPolygon) -> Result<Point2, GeometryError> {
    min_enclosing_ball(poly).map(|(c, _)| c)
}

#[derive(Clone, Copy)]
struct Disk {
    center: Point2,
    radius: f64,
}

impl Disk {
    fn from_two(a: Point2, b: Point2) -> Disk {
        let center = a.midpoint(b);
        Disk {
            center,
            radius: center.distance(a),
        }
    }

    fn from_three(a: Point2, b: Point2, c: Point2) -> Disk {
        match circumcenter(a, b, c) {
            Ok(center) => Disk {
                center,
                radius: center.distance(a),
            },
            // collinear support: the diameter disk of the extreme pair
            Err(_) => {
                let pairs = [(a, b), (a, c), (b, c)];
                pairs
                    .iter()
                    .map(|&(p, q)| Disk::from_two(p, q))
                    .max_by(|x, y| x.radius.total_cmp(&y.radius))
                    .unwrap()
            }
        }
    }

    fn contains(&self, p: Point2) -> bool {
        self.center.distance(p) <= self.radius * (1.0 + 1e-12) + 1e-14
    }
}

fn mindisk(pts: &[Point2]) -> (Point2, f64) {
    if pts.len() == 1 {
        return (pts[0], 0.0);
    }
    let mut d = Disk::from_two(pts[0], pts[1]);
    for i in 2..pts.len() {
        if !d.contains(pts[i]) {
            d = mindisk_with_one(&pts[..i], pts[i]);
        }
    }
    (d.center, d.radius)
}

fn mindisk_with_one(pts: &[Point2], q: Point2) -> Disk {
    let mut d = Disk::from_two(pts[0], q);
    for j in 1..pts.len() {
        if !d.contains(pts[j]) {
            d = mindisk_with_two(&pts[..j], pts[j], q);
        }
    }
    d
}

fn mindisk_with_two(pts: &[Point2], q1: Point2, q2: Point2) -> Disk {
    let mut d = Disk::from_two(q1, q2);
    for &p in pts {
        if !d.contains(p) {
            d = Disk::from_three(q1, q2, p);
        }
    }
    d
}
