//! SVG rendering of skeletons on the Poincaré disc.

use std::fmt::Write;

use crate::compactification::DiscPoint;
use crate::finite::PointKind;
use crate::skeleton::{Node, SeparatrixSkeleton};

#[derive(Debug, Clone, PartialEq)]
pub struct RenderStyle {
    /// Disc radius in px inside the 1000×1000 view box.
    pub radius: f64,
    pub separatrix_color: String,
    pub orbit_color: String,
    pub boundary_color: String,
    pub stroke: f64,
    /// Ramer–Douglas–Peucker tolerance in px.
    pub simplify: f64,
    pub arrows: bool,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            radius: 460.0,
            separatrix_color: "#1f4fd8".into(),
            orbit_color: "#000000".into(),
            boundary_color: "#1f4fd8".into(),
            stroke: 1.6,
            simplify: 0.25,
            arrows: true,
        }
    }
}

const VIEW: f64 = 1000.0;

fn px(style: &RenderStyle, d: DiscPoint) -> (f64, f64) {
    (VIEW / 2.0 + style.radius * d.x, VIEW / 2.0 - style.radius * d.y)
}

fn seg_dist(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let l2 = dx * dx + dy * dy;
    if l2 == 0.0 {
        return (p.0 - a.0).hypot(p.1 - a.1);
    }
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / l2).clamp(0.0, 1.0);
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}

/// Ramer–Douglas–Peucker simplification.
pub fn simplify(points: &[(f64, f64)], tol: f64) -> Vec<(f64, f64)> {
    if points.len() < 3 {
        return points.to_vec();
    }
    let mut keep = vec![false; points.len()];
    keep[0] = true;
    keep[points.len() - 1] = true;
    let mut stack = vec![(0, points.len() - 1)];
    while let Some((i, j)) = stack.pop() {
        let mut best = (0.0, 0);
        for k in i + 1..j {
            let d = seg_dist(points[k], points[i], points[j]);
            if d > best.0 {
                best = (d, k);
            }
        }
        if best.0 > tol {
            keep[best.1] = true;
            stack.push((i, best.1));
            stack.push((best.1, j));
        }
    }
    points.iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| *p).collect()
}

fn polyline(out: &mut String, style: &RenderStyle, path: &[DiscPoint], color: &str, class: &str) {
    let pts: Vec<(f64, f64)> = path.iter().map(|&d| px(style, d)).collect();
    let pts = simplify(&pts, style.simplify);
    let mut attr = String::new();
    for (i, (x, y)) in pts.iter().enumerate() {
        if i > 0 {
            attr.push(' ');
        }
        let _ = write!(attr, "{x:.2},{y:.2}");
    }
    let marker = if style.arrows { " marker-mid=\"url(#arrow)\"" } else { "" };
    let _ = writeln!(
        out,
        "<polyline class=\"{class}\" points=\"{attr}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{:.2}\"{marker}/>",
        style.stroke
    );
}

/// Standalone SVG document; the output depends only on the inputs.
pub fn render_svg(s: &SeparatrixSkeleton, style: &RenderStyle) -> Vec<u8> {
    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 {VIEW} {VIEW}\" width=\"{VIEW}\" height=\"{VIEW}\">"
    );
    let _ = writeln!(
        out,
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"5\" refY=\"5\" markerWidth=\"5\" markerHeight=\"5\" orient=\"auto\"><path d=\"M0,1 L9,5 L0,9 z\" fill=\"context-stroke\"/></marker></defs>"
    );
    let _ = writeln!(out, "<rect width=\"{VIEW}\" height=\"{VIEW}\" fill=\"#ffffff\"/>");
    // The whole boundary circle is made of singular points.
    let _ = writeln!(
        out,
        "<circle class=\"infinity\" cx=\"{c}\" cy=\"{c}\" r=\"{r:.2}\" fill=\"none\" stroke=\"{col}\" stroke-width=\"{w:.2}\"/>",
        c = VIEW / 2.0,
        r = style.radius,
        col = style.boundary_color,
        w = 3.0 * style.stroke
    );
    for e in &s.edges {
        polyline(&mut out, style, &e.path, &style.separatrix_color, "separatrix");
    }
    for r in &s.regions {
        polyline(&mut out, style, &r.path, &style.orbit_color, "orbit");
    }
    for n in &s.nodes {
        let (x, y) = px(style, n.disc());
        let glyph = match n {
            Node::Finite { kind, .. } => match kind {
                PointKind::Saddle => format!(
                    "<rect class=\"saddle\" x=\"{:.2}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"#000000\"/>",
                    x - 5.0,
                    y - 5.0
                ),
                PointKind::StableNode => {
                    format!("<circle class=\"stable_node\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"6\" fill=\"#000000\"/>")
                }
                PointKind::UnstableNode => format!(
                    "<circle class=\"unstable_node\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"6\" fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\"2\"/>"
                ),
                PointKind::SaddleNode => format!(
                    "<path class=\"saddle_node\" d=\"M{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2} z\" fill=\"#000000\"/>",
                    x,
                    y - 7.0,
                    x + 7.0,
                    y + 6.0,
                    x - 7.0,
                    y + 6.0
                ),
            },
            Node::Origin { .. } => format!(
                "<circle class=\"chart_origin\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"7\" fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\"2\"/>"
            ),
            Node::Boundary { .. } => continue,
        };
        let _ = writeln!(out, "{glyph}");
    }
    let _ = writeln!(out, "</svg>");
    out.into_bytes()
}
