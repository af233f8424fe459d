//! Deterministic SVG rendering of scenes: black chain circles, blue derived
//! circles, a red trace polygon and white pivot dots. Element order,
//! attribute order and the 6-decimal coordinate format are fixed, so equal
//! inputs produce byte-identical output.

use std::fmt::Write as _;

use crate::chain::Trace;
use crate::doc::SceneDocument;
use crate::geom::{Circle, Point};

#[derive(Debug, Clone)]
pub struct StyleOptions {
    /// Stroke width as a fraction of the drawing diameter.
    pub stroke_fraction: f64,
    pub show_pivots: bool,
}

impl Default for StyleOptions {
    fn default() -> Self {
        StyleOptions {
            stroke_fraction: 0.003,
            show_pivots: true,
        }
    }
}

fn fmt6(v: f64) -> String {
    // Avoid the "-0.000000" representation so output is canonical.
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

struct Bounds {
    min_x: f64,
    min_y: f64,
    max_x: f64,
    max_y: f64,
}

impl Bounds {
    fn empty() -> Self {
        Bounds {
            min_x: f64::INFINITY,
            min_y: f64::INFINITY,
            max_x: f64::NEG_INFINITY,
            max_y: f64::NEG_INFINITY,
        }
    }

    fn add_point(&mut self, p: Point) {
        self.min_x = self.min_x.min(p.x);
        self.min_y = self.min_y.min(p.y);
        self.max_x = self.max_x.max(p.x);
        self.max_y = self.max_y.max(p.y);
    }

    fn add_circle(&mut self, c: &Circle) {
        self.add_point(Point::new(c.center.x - c.radius, c.center.y - c.radius));
        self.add_point(Point::new(c.center.x + c.radius, c.center.y + c.radius));
    }
}

/// Render a scene, optionally with a trace polygon and derived circles.
pub fn render_svg(
    doc: &SceneDocument,
    trace: Option<&Trace>,
    derived: Option<&[Circle]>,
    style: &StyleOptions,
) -> Vec<u8> {
    let circles: Vec<Circle> = doc
        .circles
        .iter()
        .map(|c| Circle::new(Point::new(c.cx, c.cy), c.r))
        .collect();
    let pivots: Vec<Point> = doc
        .chain_geometry()
        .ok()
        .and_then(|(chain, tol)| chain.resolved_pivots(&tol).ok())
        .unwrap_or_default();

    let mut bounds = Bounds::empty();
    for c in &circles {
        bounds.add_circle(c);
    }
    if let Some(extra) = derived {
        for c in extra {
            bounds.add_circle(c);
        }
    }
    if let Some(trace) = trace {
        for v in &trace.vertices {
            bounds.add_point(*v);
        }
    }
    let (min_x, min_y, width, height) = if bounds.min_x.is_finite() {
        let w = (bounds.max_x - bounds.min_x).max(1e-9);
        let h = (bounds.max_y - bounds.min_y).max(1e-9);
        let margin = 0.05 * w.max(h);
        (
            bounds.min_x - margin,
            bounds.min_y - margin,
            w + 2.0 * margin,
            h + 2.0 * margin,
        )
    } else {
        (0.0, 0.0, 1.0, 1.0)
    };
    let stroke = style.stroke_fraction * width.max(height);
    // World y points up; SVG y points down.
    let flip_y = |y: f64| -(y - min_y) + height;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 {} {}\">",
        fmt6(width),
        fmt6(height)
    );
    let _ = writeln!(
        out,
        "<g fill=\"none\" stroke=\"black\" stroke-width=\"{}\">",
        fmt6(stroke)
    );
    for c in &circles {
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>",
            fmt6(c.center.x - min_x),
            fmt6(flip_y(c.center.y)),
            fmt6(c.radius)
        );
    }
    out.push_str("</g>\n");

    if let Some(extra) = derived {
        let _ = writeln!(
            out,
            "<g fill=\"none\" stroke=\"blue\" stroke-width=\"{}\">",
            fmt6(stroke)
        );
        for c in extra {
            let _ = writeln!(
                out,
                "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>",
                fmt6(c.center.x - min_x),
                fmt6(flip_y(c.center.y)),
                fmt6(c.radius)
            );
        }
        out.push_str("</g>\n");
    }

    if let Some(trace) = trace {
        if !trace.vertices.is_empty() {
            let points: Vec<String> = trace
                .vertices
                .iter()
                .map(|v| format!("{},{}", fmt6(v.x - min_x), fmt6(flip_y(v.y))))
                .collect();
            let _ = writeln!(
                out,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"red\" stroke-width=\"{}\"/>",
                points.join(" "),
                fmt6(stroke)
            );
        }
    }

    if style.show_pivots && !pivots.is_empty() {
        let _ = writeln!(
            out,
            "<g fill=\"white\" stroke=\"black\" stroke-width=\"{}\">",
            fmt6(0.6 * stroke)
        );
        for p in &pivots {
            let _ = writeln!(
                out,
                "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>",
                fmt6(p.x - min_x),
                fmt6(flip_y(p.y)),
                fmt6(2.0 * stroke)
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain;
    use crate::doc::{ChainEntry, SceneDocument};
    use crate::scenes;
    use serde_json::Map;

    fn empty_doc() -> SceneDocument {
        SceneDocument {
            version: "1".into(),
            circles: vec![],
            chain: ChainEntry {
                order: vec![],
                closed: true,
                pivots: vec![],
            },
            start: None,
            anchor_i: None,
            meta: Map::new(),
            extra: Map::new(),
        }
    }

    #[test]
    fn empty_scene_is_valid_svg() {
        let svg = String::from_utf8(render_svg(&empty_doc(), None, None, &StyleOptions::default()))
            .unwrap();
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains("viewBox=\"0 0 1.000000 1.000000\""));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn polygon_scene_renders_circles_and_red_polygon() {
        let (chain, witness) = scenes::gen_polygon_chain(5, 7).unwrap();
        let tol = chain.tolerance();
        let trace = chain::iterate(&chain, witness, 1, None, &tol).unwrap();
        let doc = SceneDocument::from_chain(&chain, Some(witness), None);
        let svg =
            String::from_utf8(render_svg(&doc, Some(&trace), None, &StyleOptions::default()))
                .unwrap();
        assert_eq!(svg.matches("<circle ").count(), 5 + 5); // chain + pivot dots
        assert!(svg.contains("stroke=\"red\""));
    }

    #[test]
    fn rendering_is_byte_deterministic() {
        let (chain, witness) = scenes::gen_polygon_chain(4, 3).unwrap();
        let doc = SceneDocument::from_chain(&chain, Some(witness), None);
        let a = render_svg(&doc, None, None, &StyleOptions::default());
        let b = render_svg(&doc, None, None, &StyleOptions::default());
        assert_eq!(a, b);
    }
}
