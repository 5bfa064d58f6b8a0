//! Deterministic SVG drawings of packings and link diagrams.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{Complex, GeneralizedCircle, Point};
use crate::link::FALDiagram;
use crate::nerve::Nerve;
use crate::packing::{Geometry, Layout};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RenderError {
    #[error("nothing to draw: {0}")]
    Empty(String),
    #[error("layout does not match the diagram")]
    Mismatch,
}

const SIZE: f64 = 800.0;
const MARGIN: f64 = 20.0;

/// Affine map from layout coordinates to the SVG canvas (y axis flipped).
struct Canvas {
    scale: f64,
    min: Complex,
    max: Complex,
}

impl Canvas {
    fn fit(points: impl Iterator<Item = (Complex, f64)>) -> Self {
        let mut min = Complex::new(f64::INFINITY, f64::INFINITY);
        let mut max = Complex::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (p, r) in points {
            if !(p.re.is_finite() && p.im.is_finite() && r.is_finite()) {
                continue;
            }
            min.re = min.re.min(p.re - r);
            min.im = min.im.min(p.im - r);
            max.re = max.re.max(p.re + r);
            max.im = max.im.max(p.im + r);
        }
        if !min.re.is_finite() {
            min = Complex::new(-1.0, -1.0);
            max = Complex::new(1.0, 1.0);
        }
        let span = (max.re - min.re).max(max.im - min.im).max(1e-12);
        Canvas { scale: (SIZE - 2.0 * MARGIN) / span, min, max }
    }

    fn xy(&self, z: Complex) -> (f64, f64) {
        (MARGIN + (z.re - self.min.re) * self.scale, MARGIN + (self.max.im - z.im) * self.scale)
    }

    fn len(&self, r: f64) -> f64 {
        r * self.scale
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(out, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
}

fn circle(out: &mut String, cv: &Canvas, c: &GeneralizedCircle, class: &str, style: &str) {
    let (Some(ctr), Some(r)) = (c.center(), c.radius()) else {
        return;
    };
    let (x, y) = cv.xy(ctr);
    let _ = writeln!(out, r#"<circle class="{class}" cx="{x:.3}" cy="{y:.3}" r="{:.3}" {style}/>"#, cv.len(r));
}

fn finite_extent(c: &GeneralizedCircle) -> Option<(Complex, f64)> {
    (c.a > 0.0).then(|| (c.center().expect("a > 0"), c.radius().expect("a > 0")))
}

/// Packing circles (solid) and dual circles (dashed), one copy per face
/// chart; copies that coincide are drawn once.
pub fn render_packing(layout: &Layout) -> Result<String, RenderError> {
    if layout.face_circles.is_empty() {
        return Err(RenderError::Empty("layout has no faces".into()));
    }
    let mut circles: Vec<GeneralizedCircle> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let key = |c: &GeneralizedCircle| format!("{:.9} {:.9} {:.9} {:.9}", c.a, c.b.re, c.b.im, c.c);
    let sources: Vec<GeneralizedCircle> = if layout.geometry == Geometry::Spherical {
        layout.circles.clone()
    } else {
        layout.face_circles.iter().flatten().copied().collect()
    };
    for c in sources {
        if seen.insert(key(&c)) {
            circles.push(c);
        }
    }
    let unit = GeneralizedCircle::from_center_radius(Complex::new(0.0, 0.0), 1.0);
    let canvas = if layout.geometry == Geometry::Hyperbolic {
        Canvas::fit(std::iter::once((Complex::new(0.0, 0.0), 1.0)))
    } else {
        Canvas::fit(circles.iter().filter_map(finite_extent))
    };
    let mut out = String::new();
    header(&mut out, &format!("{} circle packing", layout.geometry));
    if layout.geometry == Geometry::Hyperbolic {
        circle(&mut out, &canvas, &unit, "boundary", r##"fill="none" stroke="#999" stroke-width="1""##);
    }
    for c in &circles {
        circle(&mut out, &canvas, c, "packing", r##"fill="none" stroke="#1f3a93" stroke-width="1.2""##);
    }
    for d in &layout.duals {
        circle(
            &mut out,
            &canvas,
            d,
            "dual",
            r##"fill="none" stroke="#c0392b" stroke-width="0.8" stroke-dasharray="4 3""##,
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Link diagram drawn over the dual graph: strand arcs between face
/// centers, a crossing-circle glyph on every matched arc with the two
/// strands passing through it (crossed at a half-twist).
pub fn render_diagram(f: &FALDiagram, nerve: &Nerve, layout: &Layout) -> Result<String, RenderError> {
    if f.crossing_circles.is_empty() {
        return Err(RenderError::Empty("diagram has no crossing circles".into()));
    }
    if layout.duals.len() != nerve.face_count() || layout.tangency.len() != nerve.edge_count() {
        return Err(RenderError::Mismatch);
    }
    // Node of each face: mean of its tangency points in the face's chart.
    let node: Vec<Option<Complex>> = (0..nerve.face_count())
        .map(|fi| {
            let mut s = Complex::new(0.0, 0.0);
            for e in nerve.face_edges(fi) {
                let t = if nerve.edge_faces(e)[0] == fi {
                    layout.tangency[e]
                } else {
                    layout.transfer[e].inverse().apply_point(&layout.tangency[e])
                };
                s += t.finite()?;
            }
            Some(s / 3.0)
        })
        .collect();
    // Both ends of arc e in the chart of edge_faces(e)[0].
    let ends = |e: usize| -> Option<(Complex, Complex)> {
        let [a, b] = nerve.edge_faces(e);
        let pb = layout.transfer[e].apply_point(&Point::Finite(node[b]?)).finite()?;
        Some((node[a]?, pb))
    };
    let mut extent: Vec<(Complex, f64)> = Vec::new();
    for e in 0..nerve.edge_count() {
        if let Some((p, q)) = ends(e) {
            extent.push((p, 0.0));
            extent.push((q, 0.0));
        }
    }
    let canvas = Canvas::fit(extent.into_iter());
    let mut out = String::new();
    header(&mut out, "fully augmented link");
    for s in &f.strands {
        let Some((p, q)) = ends(s.arc) else { continue };
        let (x1, y1) = canvas.xy(p);
        let (x2, y2) = canvas.xy(q);
        let _ = writeln!(
            out,
            r##"<line class="strand" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#222" stroke-width="1.5"/>"##
        );
    }
    for (ci, c) in f.crossing_circles.iter().enumerate() {
        let Some((p, q)) = ends(c.arc) else { continue };
        let (x1, y1) = canvas.xy(p);
        let (x2, y2) = canvas.xy(q);
        let (dx, dy) = (x2 - x1, y2 - y1);
        let len = (dx * dx + dy * dy).sqrt().max(1e-9);
        let (nx, ny) = (-dy / len * 3.0, dx / len * 3.0);
        let (a0, a1) = if c.half_twist { (1.0, -1.0) } else { (1.0, 1.0) };
        for side in [1.0, -1.0] {
            let _ = writeln!(
                out,
                r##"<line class="strand" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#222" stroke-width="1.5"/>"##,
                x1 + side * a0 * nx,
                y1 + side * a0 * ny,
                x2 + side * a1 * nx,
                y2 + side * a1 * ny
            );
        }
        let (mx, my) = (0.5 * (x1 + x2), 0.5 * (y1 + y2));
        let angle = dy.atan2(dx).to_degrees();
        let _ = writeln!(
            out,
            r##"<ellipse class="crossing-circle" data-index="{ci}" cx="{mx:.3}" cy="{my:.3}" rx="{:.3}" ry="{:.3}" transform="rotate({angle:.3} {mx:.3} {my:.3})" fill="none" stroke="#c0392b" stroke-width="1.5"/>"##,
            (0.15 * len).max(2.0),
            (0.35 * len).max(6.0)
        );
        if c.half_twist {
            let _ = writeln!(
                out,
                r##"<text class="half-twist" x="{mx:.3}" y="{:.3}" font-size="10" text-anchor="middle">{}</text>"##,
                my - 0.4 * len - 4.0,
                if c.twist_sign < 0 { "-" } else { "+" }
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
