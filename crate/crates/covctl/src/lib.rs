//! Coverage control for mobile sensing networks.
//!
//! A deterministic library (plus the `covctl` CLI) for planar coverage
//! control: bounded Voronoi diagrams over convex polygons, locational
//! optimization costs and their gradients, continuous and discrete Lloyd
//! descent, vehicle dynamics (first order, passive second order, unicycle),
//! pattern-forming density fields, and a discrete-event simulator for
//! asynchronous distributed agents with radius-limited sensing or
//! communication.
//!
//! The narrative guide lives in `book/`; its code snippets are compiled as
//! doc-tests through the [`guide`] module.

pub mod density;
pub mod descent;
pub mod distributed;
pub mod dynamics;
pub mod geometry;
pub mod guide;
pub mod objective;
pub mod scenario;
pub mod tol;

pub use geometry::{ConvexPolygon, GeometryError, HalfPlane, Point2, Vec2, VoronoiDiagram};
pub use objective::Configuration;
