//! Density fields over the environment and sensing-performance functions.
//!
//! Densities weight where coverage matters; they are not normalized to
//! integrate to one (the descent laws work with any positive scaling, and
//! gains are exposed in scenario configuration instead). The pattern-forming
//! variants concentrate mass along a line, an ellipse, or uniformly inside
//! an ellipsoidal disk.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::geometry::Point2;

/// An evaluable density over the plane; nonnegative everywhere.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityField {
    Uniform,
    /// `exp(gain * (-(x-cx)^2 - (y-cy)^2))`.
    Gaussian { center: Point2, gain: f64 },
    /// `exp(-k (a x + b y + c)^2)`: equals 1 on the line, decays with the
    /// squared line offset. Requires `(a, b) != (0, 0)`.
    Line { a: f64, b: f64, c: f64, k: f64 },
    /// `exp(-k (a (x-cx)^2 + b (y-cy)^2 - r2)^2)`: equals 1 on the ellipse
    /// `a (x-cx)^2 + b (y-cy)^2 = r2`.
    Ellipse {
        a: f64,
        b: f64,
        center: Point2,
        r2: f64,
        k: f64,
    },
    /// `exp(-k SR_l(a (x-cx)^2 + b (y-cy)^2 - r2))`: approximately uniform
    /// inside the ellipsoidal disk, decaying outside; `l` sharpens the ramp.
    Disk {
        a: f64,
        b: f64,
        center: Point2,
        r2: f64,
        k: f64,
        ell: f64,
    },
}

impl DensityField {
    pub fn eval(&self, q: Point2) -> f64 {
        match *self {
            DensityField::Uniform => 1.0,
            DensityField::Gaussian { center, gain } => {
                let d = q - center;
                (gain * (-d.x * d.x - d.y * d.y)).exp()
            }
            DensityField::Line { a, b, c, k } => {
                let s = a * q.x + b * q.y + c;
                (-k * s * s).exp()
            }
            DensityField::Ellipse { a, b, center, r2, k } => {
                let d = q - center;
                let s = a * d.x * d.x + b * d.y * d.y - r2;
                (-k * s * s).exp()
            }
            DensityField::Disk {
                a,
                b,
                center,
                r2,
                k,
                ell,
            } => {
                let d = q - center;
                let s = a * d.x * d.x + b * d.y * d.y - r2;
                (-k * smooth_ramp(ell, s)).exp()
            }
        }
    }

    /// Closure view for the quadrature helpers.
    pub fn as_fn(&self) -> impl Fn(Point2) -> f64 + '_ {
        move |q| self.eval(q)
    }
}

/// Smooth ramp `SR_l(x) = x (arctan(l x)/pi + 1/2)`; converges pointwise to
/// `max(x, 0)` as `l -> inf` and vanishes at the origin for every `l > 0`.
pub fn smooth_ramp(ell: f64, x: f64) -> f64 {
    x * ((ell * x).atan() / PI + 0.5)
}

/// Sensing-performance function `f`: how badly a sensor at distance `d`
/// measures. Non-decreasing and differentiable on the nonnegative reals.
#[derive(Clone)]
pub enum SensingPerformance {
    /// `f(d) = d^2`, the setting with the centroid/moment decomposition.
    Quadratic,
    /// Caller-supplied `f` with its derivative; no symbolic differentiation
    /// is attempted.
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        df: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl std::fmt::Debug for SensingPerformance {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SensingPerformance::Quadratic => fmt.write_str("Quadratic"),
            SensingPerformance::Custom { .. } => fmt.write_str("Custom"),
        }
    }
}

impl SensingPerformance {
    pub fn custom(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SensingPerformance::Custom {
            f: Arc::new(f),
            df: Arc::new(df),
        }
    }

    pub fn eval(&self, d: f64) -> f64 {
        match self {
            SensingPerformance::Quadratic => d * d,
            SensingPerformance::Custom { f, .. } => f(d),
        }
    }

    pub fn derivative(&self, d: f64) -> f64 {
        match self {
            SensingPerformance::Quadratic => 2.0 * d,
            SensingPerformance::Custom { df, .. } => df(d),
        }
    }

    pub fn is_quadratic(&self) -> bool {
        matches!(self, SensingPerformance::Quadratic)
    }

    /// Spot-check that `f` is non-decreasing and `f(0) >= 0` on a grid over
    /// `[0, max_d]`.
    pub fn spot_check(&self, max_d: f64, steps: usize) -> bool {
        let mut prev = self.eval(0.0);
        if prev < 0.0 {
            return false;
        }
        for i in 1..=steps {
            let d = max_d * i as f64 / steps as f64;
            let v = self.eval(d);
            if v + 1e-12 < prev {
                return false;
            }
            prev = v;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_density_is_one_on_the_line() {
        let phi = DensityField::Line {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            k: 500.0,
        };
        for y in [-1.0, 0.0, 0.4, 2.0] {
            assert_eq!(phi.eval(Point2::new(0.0, y)), 1.0);
        }
        // strictly decreasing in the unsigned line offset
        let mut prev = phi.eval(Point2::new(0.0, 0.0));
        for i in 1..20 {
            let v = phi.eval(Point2::new(0.005 * i as f64, 0.3));
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn ellipse_density_is_one_on_the_ellipse() {
        let phi = DensityField::Ellipse {
            a: 1.4,
            b: 0.6,
            center: Point2::new(0.0, 0.0),
            r2: 0.3,
            k: 500.0,
        };
        // points on a*x^2 + b*y^2 = r^2
        for t in 0..8 {
            let ang = t as f64 * PI / 4.0;
            let x = (0.3f64 / 1.4).sqrt() * ang.cos();
            let y = (0.3f64 / 0.6).sqrt() * ang.sin();
            let s = 1.4 * x * x + 0.6 * y * y - 0.3;
            assert!(s.abs() < 1e-12);
            assert!((phi.eval(Point2::new(x, y)) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn disk_density_interior_dominates_exterior() {
        let phi = DensityField::Disk {
            a: 1.4,
            b: 0.6,
            center: Point2::new(0.0, 0.0),
            r2: 0.3,
            k: 500.0,
            ell: 10.0,
        };
        let center = phi.eval(Point2::new(0.0, 0.0));
        assert!(center >= 1.0); // ramp is slightly negative inside
        let outside = phi.eval(Point2::new(1.0, 1.0));
        assert!(outside < 1e-30);
        assert!(center > outside);
    }

    #[test]
    fn gaussian_matches_formula() {
        let phi = DensityField::Gaussian {
            center: Point2::new(0.0, 0.0),
            gain: 5.0,
        };
        let q = Point2::new(0.3, -0.2);
        let expect = (5.0 * (-(0.3f64 * 0.3) - 0.2 * 0.2)).exp();
        assert!((phi.eval(q) - expect).abs() < 1e-15);
        assert_eq!(phi.eval(Point2::new(0.0, 0.0)), 1.0);
    }

    #[test]
    fn smooth_ramp_values() {
        for ell in [1.0, 10.0, 100.0] {
            assert_eq!(smooth_ramp(ell, 0.0), 0.0);
        }
        // direct-evaluation oracle: 5 (atan(50)/pi + 1/2)
        assert!((smooth_ramp(10.0, 5.0) - 4.9681732544951362).abs() < 1e-12);
        assert!((smooth_ramp(10.0, -5.0) - (-0.031826745504864029)).abs() < 1e-12);
    }

    #[test]
    fn smooth_ramp_monotone_on_grid() {
        for ell in [1.0, 10.0, 100.0] {
            let mut prev = f64::NEG_INFINITY;
            for i in -200..=200 {
                let x = i as f64 * 0.05;
                let v = smooth_ramp(ell, x);
                assert!(v >= prev - 1e-12, "ell={ell} x={x}");
                prev = v;
            }
        }
    }

    #[test]
    fn densities_nonnegative_on_grid() {
        let fields = [
            DensityField::Uniform,
            DensityField::Gaussian {
                center: Point2::new(0.2, -0.1),
                gain: 5.0,
            },
            DensityField::Line {
                a: 1.0,
                b: -2.0,
                c: 0.3,
                k: 500.0,
            },
            DensityField::Ellipse {
                a: 1.4,
                b: 0.6,
                center: Point2::new(0.0, 0.0),
                r2: 0.3,
                k: 500.0,
            },
            DensityField::Disk {
                a: 1.4,
                b: 0.6,
                center: Point2::new(0.0, 0.0),
                r2: 0.3,
                k: 500.0,
                ell: 10.0,
            },
        ];
        for phi in &fields {
            for ix in 0..100 {
                for iy in 0..100 {
                    let q = Point2::new(-1.0 + 0.02 * ix as f64, -1.0 + 0.02 * iy as f64);
                    assert!(phi.eval(q) >= 0.0);
                }
            }
        }
    }

    #[test]
    fn quadratic_performance_and_spot_check() {
        let f = SensingPerformance::Quadratic;
        assert_eq!(f.eval(3.0), 9.0);
        assert_eq!(f.derivative(3.0), 6.0);
        assert!(f.spot_check(2.0, 64));
        let custom = SensingPerformance::custom(|d| d, |_| 1.0);
        assert!(custom.spot_check(2.0, 64));
        let bad = SensingPerformance::custom(|d| -d, |_| -1.0);
        assert!(!bad.spot_check(2.0, 64));
    }
}
