//! Shared oracles for the integration suites. Everything here is
//! deliberately independent of the library's own quadrature and geometry
//! paths it is used to check.

use covctl::geometry::{ConvexPolygon, Point2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// 5-point Gauss-Legendre nodes and weights on [-1, 1].
const GL5: [(f64, f64); 5] = [
    (-9.06179845938663964e-01, 2.36926885056188974e-01),
    (-5.38469310105683108e-01, 4.78628670499366526e-01),
    (0.0, 5.68888888888888999e-01),
    (5.38469310105683108e-01, 4.78628670499366526e-01),
    (9.06179845938663964e-01, 2.36926885056188974e-01),
];

/// Independent quadrature oracle: ear fan from the first vertex (not the
/// vertex average the library uses), Duffy-collapsed 5x5 Gauss product rule
/// per triangle, `levels` uniform 4-splits. Exact to polynomial degree 8
/// before refinement.
pub fn duffy_integrate<F>(poly: &ConvexPolygon, levels: usize, f: F) -> f64
where
    F: Fn(Point2) -> f64 + Copy,
{
    let vs = poly.vertices();
    if vs.len() < 3 {
        return 0.0;
    }
    let mut total = 0.0;
    for k in 1..vs.len() - 1 {
        total += duffy_triangle(vs[0], vs[k], vs[k + 1], levels, f);
    }
    total
}

fn duffy_triangle<F>(a: Point2, b: Point2, c: Point2, levels: usize, f: F) -> f64
where
    F: Fn(Point2) -> f64 + Copy,
{
    if levels > 0 {
        let ab = a.midpoint(b);
        let bc = b.midpoint(c);
        let ca = c.midpoint(a);
        return duffy_triangle(a, ab, ca, levels - 1, f)
            + duffy_triangle(ab, b, bc, levels - 1, f)
            + duffy_triangle(ca, bc, c, levels - 1, f)
            + duffy_triangle(ab, bc, ca, levels - 1, f);
    }
    let e1 = b - a;
    let e2 = c - a;
    let jac2 = e1.cross(e2); // twice the signed area
    let mut acc = 0.0;
    for &(xu, wu) in &GL5 {
        let u = 0.5 * (xu + 1.0);
        for &(xv, wv) in &GL5 {
            let v = 0.5 * (xv + 1.0);
            // Duffy collapse: (u, v) -> (u(1-v), uv), jacobian u
            let r = u * (1.0 - v);
            let s = u * v;
            let q = a + e1 * r + e2 * s;
            acc += 0.25 * wu * wv * u * f(q);
        }
    }
    acc * jac2
}

/// Oracle moments: mass, centroid, and second moment about `p`, all via
/// [`duffy_integrate`].
pub fn oracle_mass<F>(poly: &ConvexPolygon, levels: usize, phi: F) -> f64
where
    F: Fn(Point2) -> f64 + Copy,
{
    duffy_integrate(poly, levels, phi)
}

pub fn oracle_centroid<F>(poly: &ConvexPolygon, levels: usize, phi: F) -> Point2
where
    F: Fn(Point2) -> f64 + Copy,
{
    let m = duffy_integrate(poly, levels, phi);
    let sx = duffy_integrate(poly, levels, |q| q.x * phi(q));
    let sy = duffy_integrate(poly, levels, |q| q.y * phi(q));
    Point2::new(sx / m, sy / m)
}

pub fn oracle_polar_moment_about<F>(poly: &ConvexPolygon, levels: usize, p: Point2, phi: F) -> f64
where
    F: Fn(Point2) -> f64 + Copy,
{
    duffy_integrate(poly, levels, |q| (q - p).norm_squared() * phi(q))
}

/// Random convex polygon: the convex hull of `k` points on a randomly
/// scaled and offset ellipse-ish blob. Always convex and counterclockwise.
pub fn random_convex_polygon(rng: &mut ChaCha8Rng) -> ConvexPolygon {
    let k = rng.gen_range(4..9);
    let cx = rng.gen_range(-0.5..0.5);
    let cy = rng.gen_range(-0.5..0.5);
    let rx = rng.gen_range(0.5..1.5);
    let ry = rng.gen_range(0.5..1.5);
    // sorted random angles on an ellipse give a convex vertex set
    let mut angles: Vec<f64> = (0..k)
        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
        .collect();
    angles.sort_by(|a, b| a.total_cmp(b));
    angles.dedup_by(|a, b| (*a - *b).abs() < 0.15);
    while angles.len() < 4 {
        angles.push(angles.last().unwrap() + 0.5);
    }
    let vertices: Vec<Point2> = angles
        .iter()
        .map(|&t| Point2::new(cx + rx * t.cos(), cy + ry * t.sin()))
        .collect();
    ConvexPolygon::new(vertices).expect("hull of ellipse points is convex")
}

/// Uniform sample inside a convex polygon by bounding-box rejection.
pub fn random_interior_point(rng: &mut ChaCha8Rng, poly: &ConvexPolygon) -> Point2 {
    let (lo, hi) = poly.bounding_box();
    loop {
        let p = Point2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if poly.contains(p) {
            return p;
        }
    }
}

/// Distinct interior points with a minimum pairwise separation.
pub fn random_generators(
    rng: &mut ChaCha8Rng,
    poly: &ConvexPolygon,
    n: usize,
    min_sep: f64,
) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::with_capacity(n);
    while out.len() < n {
        let p = random_interior_point(rng, poly);
        if out.iter().all(|&q| p.distance(q) > min_sep) {
            out.push(p);
        }
    }
    out
}

/// Brute-force minimum enclosing disk over all 2- and 3-point support sets.
pub fn brute_force_min_disk(points: &[Point2]) -> (Point2, f64) {
    let contains_all = |c: Point2, r: f64| points.iter().all(|&p| c.distance(p) <= r * (1.0 + 1e-9));
    let mut best: Option<(Point2, f64)> = None;
    let mut consider = |c: Point2, r: f64| {
        if contains_all(c, r) && best.is_none_or(|(_, br)| r < br) {
            best = Some((c, r));
        }
    };
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let c = points[i].midpoint(points[j]);
            consider(c, c.distance(points[i]));
            for k in (j + 1)..points.len() {
                if let Ok(c) = covctl::geometry::circumcenter(points[i], points[j], points[k]) {
                    consider(c, c.distance(points[i]));
                }
            }
        }
    }
    best.expect("at least two points")
}
