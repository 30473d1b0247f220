//! Bounded Voronoi diagrams by successive half-plane clipping.
//!
//! Each cell is the environment clipped by the bisector half-planes against
//! every other generator: O(n^2) overall, robust, and exact enough at desk
//! scale (n <= 64). Zero-length shared faces are dropped from the neighbor
//! sets, which keeps neighbor symmetry exact by construction.

use std::collections::BTreeMap;

use super::{ConvexPolygon, GeometryError, HalfPlane, Point2};
use crate::tol;

/// A shared face between two Voronoi cells (a segment of their bisector).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn midpoint(&self) -> Point2 {
        self.a.midpoint(self.b)
    }
}

/// Voronoi diagram of a configuration inside a convex region.
#[derive(Debug, Clone)]
pub struct VoronoiDiagram {
    cells: Vec<ConvexPolygon>,
    neighbors: Vec<Vec<usize>>,
    faces: BTreeMap<(usize, usize), Segment>,
}

impl VoronoiDiagram {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, i: usize) -> &ConvexPolygon {
        &self.cells[i]
    }

    pub fn cells(&self) -> &[ConvexPolygon] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<ConvexPolygon> {
        self.cells
    }

    /// Indices of the Voronoi neighbors of generator `i`, ascending.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Shared face between `i` and `j`, if they are neighbors.
    pub fn face(&self, i: usize, j: usize) -> Option<&Segment> {
        let key = if i < j { (i, j) } else { (j, i) };
        self.faces.get(&key)
    }

    pub fn faces(&self) -> impl Iterator<Item = ((usize, usize), &Segment)> {
        self.faces.iter().map(|(&k, s)| (k, s))
    }
}

/// Build the bounded Voronoi diagram of `points` inside `region`.
///
/// Callers must keep every generator inside the region; generator pairs
/// closer than [`tol::DUPLICATE_GENERATORS`] are rejected so the caller can
/// perturb or reject the degenerate configuration.
pub fn voronoi_diagram(
    region: &ConvexPolygon,
    points: &[Point2],
) -> Result<VoronoiDiagram, GeometryError> {
    let n = points.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if points[i].distance(points[j]) < tol::DUPLICATE_GENERATORS {
                return Err(GeometryError::DuplicateGenerators(i, j));
            }
        }
    }

    let mut cells = Vec::with_capacity(n);
    for (i, &p) in points.iter().enumerate() {
        let mut cell = region.clone();
        for (j, &q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            cell = cell.clip(&HalfPlane::bisector_toward(p, q));
            if cell.is_empty() {
                break;
            }
        }
        cells.push(cell);
    }

    // Faces are detected once per unordered pair, from the lower-index cell:
    // an edge lies on the (i,j) bisector iff both endpoints are equidistant
    // from the two generators. A single decision per pair keeps N symmetric.
    let mut neighbors = vec![Vec::new(); n];
    let mut faces = BTreeMap::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some(face) = cell_face_with(&cells[i], points[i], points[j]) {
                if face.length() > tol::FACE_MIN_LENGTH {
                    neighbors[i].push(j);
                    neighbors[j].push(i);
                    faces.insert((i, j), face);
                }
            }
        }
    }

    Ok(VoronoiDiagram {
        cells,
        neighbors,
        faces,
    })
}

/// The edge of `cell` lying on the bisector between `pi` (its generator)
/// and `pj`, if one exists: both endpoints equidistant from the two points.
pub fn cell_face_with(cell: &ConvexPolygon, pi: Point2, pj: Point2) -> Option<Segment> {
    let equidistant = |v: Point2| {
        let di = v.distance(pi);
        let dj = v.distance(pj);
        (di - dj).abs() <= tol::EQUIDISTANT_REL * (1.0 + di.max(dj))
    };
    cell.edges()
        .find(|&(a, b)| equidistant(a) && equidistant(b))
        .map(|(a, b)| Segment { a, b })
}

/// Circumcenter of the triangle `(a, b, c)` from the pairwise difference
/// vectors: each vertex is weighted by the squared length of its opposite
/// side times the dot product of the adjacent sides, and the weights are
/// normalized by their sum. Fails for collinear points.
pub fn circumcenter(a: Point2, b: Point2, c: Point2) -> Result<Point2, GeometryError> {
    let ab = b - a; // alpha_{ba}
    let bc = c - b; // alpha_{cb}
    let ca = a - c; // alpha_{ac}
    let area = 0.5 * ab.cross(-ca);
    if area.abs() < tol::DEGENERATE_TRIANGLE_AREA {
        return Err(GeometryError::DegenerateTriangle);
    }
    let wa = bc.norm_squared() * ab.dot(-ca);
    let wb = ca.norm_squared() * bc.dot(-ab);
    let wc = ab.norm_squared() * ca.dot(-bc);
    let sum = wa + wb + wc; // equals 16 * area^2, nonzero here
    Ok(Point2::new(
        (wa * a.x + wb * b.x + wc * c.x) / sum,
        (wa * a.y + wb * b.y + wc * c.y) / sum,
    ))
}
