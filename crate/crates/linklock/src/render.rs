//! SVG 1.1 output.
//!
//! Plane coordinates go into the file unchanged except for the sign of y:
//! a vertex at (x, y) is drawn at (x, −y) and the `viewBox` frames the
//! drawing, so up in the plane is up on screen and the coordinates can be
//! read back exactly. Each edge is one `line` (id `e<index>`), each vertex
//! one `circle` (id `v-<vertex id>`).

use std::fmt::Write as _;

use linklock_core::touching::TouchingConfig;
use linklock_core::{Configuration, Linkage, Motion, Point};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct RenderStyle {
    /// Line width in canvas pixels.
    pub stroke_width: f64,
    /// Vertex mark radius in canvas pixels.
    pub vertex_radius: f64,
    /// ε for drawing touching configurations pulled apart; `None` means ε₀/2.
    pub pull_apart_epsilon: Option<f64>,
    pub canvas: (f64, f64),
    pub labels: bool,
    /// Animation length in seconds.
    pub duration: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle { stroke_width: 2.0, vertex_radius: 3.0, pull_apart_epsilon: None, canvas: (600.0, 600.0), labels: true, duration: 10.0 }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("style field {0} must be positive and finite")]
    BadStyle(&'static str),
    #[error("pull-apart epsilon {eps} exceeds the fixture's separation bound {eps0}")]
    EpsilonTooLarge { eps: f64, eps0: f64 },
}

impl RenderStyle {
    pub fn validate(&self) -> Result<(), RenderError> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        for (name, v) in [
            ("strokeWidth", self.stroke_width),
            ("vertexRadius", self.vertex_radius),
            ("canvas.width", self.canvas.0),
            ("canvas.height", self.canvas.1),
            ("duration", self.duration),
        ] {
            if !ok(v) {
                return Err(RenderError::BadStyle(name));
            }
        }
        if self.pull_apart_epsilon.is_some_and(|e| !ok(e)) {
            return Err(RenderError::BadStyle("pullApartEpsilon"));
        }
        Ok(())
    }
}

/// The frame files and the animated file of a motion.
#[derive(Clone, Debug, PartialEq)]
pub struct MotionSvg {
    pub frames: Vec<String>,
    pub animated: String,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;").replace('\'', "&apos;")
}

/// Screen y of a plane y; `0.0 - y` avoids writing `-0`.
fn sy(y: f64) -> f64 {
    0.0 - y
}

/// Maps plane units to the canvas.
struct Frame {
    min: Point,
    max: Point,
    /// Plane units per canvas pixel.
    unit: f64,
}

impl Frame {
    fn new<'a>(pts: impl Iterator<Item = &'a Point>, canvas: (f64, f64)) -> Self {
        let (mut min, mut max) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in pts {
            min = Point::new(min.x.min(p.x), min.y.min(p.y));
            max = Point::new(max.x.max(p.x), max.y.max(p.y));
        }
        if !min.is_finite() {
            (min, max) = (Point::new(-1.0, -1.0), Point::new(1.0, 1.0));
        }
        let span = (max.x - min.x).max(max.y - min.y).max(1e-9);
        let pad = Point::new(0.05 * span, 0.05 * span);
        let (min, max) = (min - pad, max + pad);
        let unit = ((max.x - min.x) / canvas.0).max((max.y - min.y) / canvas.1);
        Frame { min, max, unit }
    }

    fn header(&self, out: &mut String, style: &RenderStyle) {
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="{} {} {} {}">"#,
            style.canvas.0,
            style.canvas.1,
            self.min.x,
            sy(self.max.y),
            self.max.x - self.min.x,
            self.max.y - self.min.y
        );
    }
}

fn draw(out: &mut String, l: &Linkage, pts: &[Point], frame: &Frame, style: &RenderStyle, anim: Option<&Motion>) {
    let sw = style.stroke_width * frame.unit;
    let r = style.vertex_radius * frame.unit;
    let dur = style.duration;
    let animate = |out: &mut String, attr: &str, f: &dyn Fn(&[Point]) -> f64| {
        if let Some(m) = anim {
            let times: Vec<String> = m.samples().iter().map(|s| s.t.to_string()).collect();
            let values: Vec<String> = m.samples().iter().map(|s| f(&s.coords).to_string()).collect();
            let _ = write!(
                out,
                r#"<animate attributeName="{attr}" dur="{dur}s" repeatCount="indefinite" calcMode="linear" keyTimes="{}" values="{}"/>"#,
                times.join(";"),
                values.join(";")
            );
        }
    };
    let _ = writeln!(out, r#"<g stroke="black" stroke-width="{sw}" stroke-linecap="round">"#);
    for e in 0..l.edge_count() {
        let (a, b) = l.endpoints(e);
        let _ = write!(
            out,
            r#"<line id="e{e}" x1="{}" y1="{}" x2="{}" y2="{}">"#,
            pts[a].x,
            sy(pts[a].y),
            pts[b].x,
            sy(pts[b].y)
        );
        animate(out, "x1", &|p| p[a].x);
        animate(out, "y1", &|p| sy(p[a].y));
        animate(out, "x2", &|p| p[b].x);
        animate(out, "y2", &|p| sy(p[b].y));
        let _ = writeln!(out, "<title>{}</title></line>", escape(&l.label(e)));
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g fill="black">"#);
    for (v, id) in l.vertices().iter().enumerate() {
        let _ = write!(out, r#"<circle id="v-{}" cx="{}" cy="{}" r="{r}">"#, escape(id), pts[v].x, sy(pts[v].y));
        animate(out, "cx", &|p| p[v].x);
        animate(out, "cy", &|p| sy(p[v].y));
        let _ = writeln!(out, "</circle>");
    }
    let _ = writeln!(out, "</g>");
    if style.labels && anim.is_none() {
        let fs = 12.0 * frame.unit;
        let _ = writeln!(out, r#"<g font-family="sans-serif" font-size="{fs}" fill="dimgray">"#);
        for (v, id) in l.vertices().iter().enumerate() {
            let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, pts[v].x + 1.5 * r, sy(pts[v].y) - 1.5 * r, escape(id));
        }
        let _ = writeln!(out, "</g>");
    }
}

fn render_points(l: &Linkage, pts: &[Point], style: &RenderStyle) -> Result<String, RenderError> {
    style.validate()?;
    let frame = Frame::new(pts.iter(), style.canvas);
    let mut out = String::new();
    frame.header(&mut out, style);
    draw(&mut out, l, pts, &frame, style, None);
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn render_configuration(c: &Configuration, style: &RenderStyle) -> Result<String, RenderError> {
    render_points(c.linkage(), c.coords(), style)
}

/// Draws `tc` pulled apart by the style's ε, which may not exceed ε₀.
pub fn render_touching(tc: &TouchingConfig, style: &RenderStyle) -> Result<String, RenderError> {
    style.validate()?;
    let eps = style.pull_apart_epsilon.unwrap_or(0.5 * tc.eps0());
    if eps > tc.eps0() {
        return Err(RenderError::EpsilonTooLarge { eps, eps0: tc.eps0() });
    }
    let c = tc.pulled_apart(eps);
    render_points(c.linkage(), c.coords(), style)
}

/// One frame per sample plus a SMIL-animated file; all share one viewBox.
pub fn render_motion(m: &Motion, style: &RenderStyle) -> Result<MotionSvg, RenderError> {
    style.validate()?;
    let l = m.linkage();
    let frame = Frame::new(m.samples().iter().flat_map(|s| s.coords.iter()), style.canvas);
    let page = |pts: &[Point], anim: Option<&Motion>| {
        let mut out = String::new();
        frame.header(&mut out, style);
        draw(&mut out, l, pts, &frame, style, anim);
        out.push_str("</svg>\n");
        out
    };
    let frames = m.samples().iter().map(|s| page(&s.coords, None)).collect();
    let animated = page(&m.samples()[0].coords, Some(m));
    Ok(MotionSvg { frames, animated })
}

/// Vertex positions read back from a rendered SVG, in document order.
pub fn parse_vertex_marks(svg: &str) -> Vec<(String, Point)> {
    let attr = |tag: &str, name: &str| -> Option<String> {
        let key = format!(" {name}=\"");
        let start = tag.find(&key)? + key.len();
        let end = tag[start..].find('"')? + start;
        Some(tag[start..end].to_string())
    };
    let unescape = |s: String| s.replace("&apos;", "'").replace("&quot;", "\"").replace("&lt;", "<").replace("&gt;", ">").replace("&amp;", "&");
    svg.split("<circle")
        .skip(1)
        .filter_map(|rest| {
            let tag = &rest[..rest.find('>')?];
            let id = unescape(attr(tag, "id")?.strip_prefix("v-")?.to_string());
            let x: f64 = attr(tag, "cx")?.parse().ok()?;
            let y: f64 = attr(tag, "cy")?.parse().ok()?;
            Some((id, Point::new(x, -y)))
        })
        .collect()
}
