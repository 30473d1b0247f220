//! Central record of the numeric tolerances used across the crate.
//!
//! Geometry predicates, descent monitors, and the distributed simulator all
//! read from here so that a tolerance is never duplicated with two values.

/// Consecutive polygon vertices closer than this are merged.
pub const VERTEX_DEDUP: f64 = 1e-12;

/// Generator pairs closer than this make a Voronoi diagram degenerate.
pub const DUPLICATE_GENERATORS: f64 = 1e-12;

/// Triangles with |signed area| below this are treated as collinear.
pub const DEGENERATE_TRIANGLE_AREA: f64 = 1e-12;

/// Voronoi faces shorter than this are dropped from the neighbor sets.
pub const FACE_MIN_LENGTH: f64 = 1e-12;

/// Relative tolerance on a point being equidistant from two generators.
pub const EQUIDISTANT_REL: f64 = 1e-9;

/// Relative tolerance for cell areas summing to the region area.
pub const PARTITION_AREA_REL: f64 = 1e-9;

/// Relative agreement required between closed-form and quadrature moments.
pub const MOMENT_CONSISTENCY_REL: f64 = 1e-9;

/// Cell masses below this are reported as `ZeroMass`; callers pick a policy.
pub const ZERO_MASS: f64 = 1e-14;

/// Relative mass change between quadrature refinement levels flagged as sharp.
pub const QUADRATURE_REFINE_REL: f64 = 1e-6;

/// Reproducibility of the minimum enclosing ball radius.
pub const ENCLOSING_RADIUS: f64 = 1e-9;

/// Slack for monotone-descent checks: `H(next) <= H(prev) + slack*(1+|H|)`.
pub const DESCENT_SLACK_REL: f64 = 1e-9;

/// Slack for monotone-energy checks on the PD closed loop.
pub const ENERGY_SLACK: f64 = 1e-6;

/// Slack for global-cost descent checks along asynchronous event traces.
pub const ASYNC_DESCENT_SLACK: f64 = 1e-6;

/// Commanded speeds above this mark an agent as active.
pub const ACTIVE_SPEED: f64 = 1e-9;

/// Quadrature nodes closer than this to a gradient singularity are skipped.
pub const SINGULARITY_SKIP: f64 = 1e-12;

/// Iteration guard for the radius-adjustment loops (cannot trip on valid
/// geometry; firing signals corruption).
pub const MAX_RADIUS_ITERATIONS: usize = 64;
