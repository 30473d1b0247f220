//! Standalone SVG snapshots of a configuration: environment outline, cell
//! edges, generator dots, optional density shading, optional trails.

use std::fmt::Write;

use crate::density::DensityField;
use crate::geometry::{ConvexPolygon, Point2, VoronoiDiagram};

const VIEW: f64 = 640.0;
const MARGIN: f64 = 24.0;

struct Frame {
    lo: Point2,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(region: &ConvexPolygon) -> Self {
        let (lo, hi) = region.bounding_box();
        let w = (hi.x - lo.x).max(1e-9);
        let h = (hi.y - lo.y).max(1e-9);
        let scale = (VIEW - 2.0 * MARGIN) / w.max(h);
        Frame {
            lo,
            scale,
            height: h * scale + 2.0 * MARGIN,
        }
    }

    fn map(&self, p: Point2) -> (f64, f64) {
        (
            MARGIN + (p.x - self.lo.x) * self.scale,
            self.height - MARGIN - (p.y - self.lo.y) * self.scale,
        )
    }

    fn points_attr(&self, poly: &ConvexPolygon) -> String {
        poly.vertices()
            .iter()
            .map(|&v| {
                let (x, y) = self.map(v);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Render a scene: always the region outline and the generator dots; cell
/// edges when a diagram is given; 50x50 density shading when a field is
/// given; one polyline per trail.
pub fn emit_svg(
    region: &ConvexPolygon,
    diagram: Option<&VoronoiDiagram>,
    positions: &[Point2],
    phi: Option<&DensityField>,
    trails: &[Vec<Point2>],
) -> String {
    let frame = Frame::new(region);
    let width = VIEW;
    let height = frame.height;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();

    if let Some(phi) = phi {
        let (lo, hi) = region.bounding_box();
        let nx = 50;
        let ny = 50;
        let dx = (hi.x - lo.x) / nx as f64;
        let dy = (hi.y - lo.y) / ny as f64;
        let mut max_val = f64::MIN_POSITIVE;
        let mut values = vec![0.0f64; nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                let c = Point2::new(
                    lo.x + (ix as f64 + 0.5) * dx,
                    lo.y + (iy as f64 + 0.5) * dy,
                );
                if region.contains(c) {
                    let v = phi.eval(c);
                    values[iy * nx + ix] = v;
                    max_val = max_val.max(v);
                }
            }
        }
        for iy in 0..ny {
            for ix in 0..nx {
                let v = values[iy * nx + ix];
                if v <= 0.0 {
                    continue;
                }
                let shade = 255.0 - 160.0 * (v / max_val);
                let cell_lo = Point2::new(lo.x + ix as f64 * dx, lo.y + (iy as f64 + 1.0) * dy);
                let (px, py) = frame.map(cell_lo);
                writeln!(
                    s,
                    r#"<rect x="{px:.2}" y="{py:.2}" width="{w:.2}" height="{h:.2}" fill="rgb({g:.0},{g:.0},{g:.0})"/>"#,
                    w = dx * frame.scale,
                    h = dy * frame.scale,
                    g = shade,
                )
                .unwrap();
            }
        }
    }

    if let Some(diagram) = diagram {
        for cell in diagram.cells() {
            if cell.is_empty() {
                continue;
            }
            writeln!(
                s,
                r#"<polygon points="{}" fill="none" stroke="steelblue" stroke-width="1.2"/>"#,
                frame.points_attr(cell)
            )
            .unwrap();
        }
    }

    writeln!(
        s,
        r#"<polygon points="{}" fill="none" stroke="black" stroke-width="2"/>"#,
        frame.points_attr(region)
    )
    .unwrap();

    for trail in trails {
        if trail.len() < 2 {
            continue;
        }
        let pts = trail
            .iter()
            .map(|&p| {
                let (x, y) = frame.map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(
            s,
            r#"<polyline points="{pts}" fill="none" stroke="gray" stroke-width="0.8"/>"#
        )
        .unwrap();
    }

    for &p in positions {
        let (x, y) = frame.map(p);
        writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="crimson"/>"#).unwrap();
    }

    writeln!(s, "</svg>").unwrap();
    s
}
