//! Static SVG renderings of complexes in the Poincaré disk.

use std::fmt::Write as _;

use crate::complex::ComplexSample;
use crate::geometry::{geodesic_through, perpendicular_geodesic};

/// Samples per geodesic edge.
pub const ARC_SAMPLES: usize = 24;

const SIZE: f64 = 600.0;

fn to_px(p: [f64; 2]) -> (f64, f64) {
    let h = SIZE / 2.0;
    (h + 0.95 * h * p[0], h - 0.95 * h * p[1])
}

fn path(points: &[[f64; 2]], close: bool) -> String {
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let (x, y) = to_px(*p);
        let _ = write!(d, "{}{x:.3},{y:.3}", if i == 0 { "M" } else { " L" });
    }
    if close {
        d.push_str(" Z");
    }
    d
}

fn header(title: &str) -> String {
    let h = SIZE / 2.0;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(s, "<title>{title}</title>");
    let _ = writeln!(s, r#"<circle class="boundary" cx="{h}" cy="{h}" r="{:.3}" fill="white" stroke="black" stroke-width="1.5"/>"#, 0.95 * h);
    s
}

fn poincare_vertices(sample: &ComplexSample) -> Vec<[f64; 2]> {
    sample.vertices().iter().map(|p| p.location.poincare()).collect()
}

/// Unit circle, shaded triangles bounded by geodesic arcs, geodesic edges and
/// vertices. Vertices are read as points of the Poincaré disk.
pub fn render_disk(sample: &ComplexSample) -> String {
    let z = poincare_vertices(sample);
    let mut s = header("complex");
    if sample.alpha() >= 2 {
        for t in sample.simplices(2) {
            let (a, b, c) = (z[t[0] as usize], z[t[1] as usize], z[t[2] as usize]);
            let mut ring = geodesic_through(a, b).segment(a, b, ARC_SAMPLES);
            ring.extend(geodesic_through(b, c).segment(b, c, ARC_SAMPLES).into_iter().skip(1));
            ring.extend(geodesic_through(c, a).segment(c, a, ARC_SAMPLES).into_iter().skip(1));
            let _ = writeln!(s, r##"<path class="tri" d="{}" fill="#9ecae1" fill-opacity="0.5" stroke="none"/>"##, path(&ring, true));
        }
    }
    if sample.alpha() >= 1 {
        for e in sample.simplices(1) {
            let (a, b) = (z[e[0] as usize], z[e[1] as usize]);
            let arc = geodesic_through(a, b).segment(a, b, ARC_SAMPLES);
            let _ = writeln!(s, r##"<path class="edge" d="{}" fill="none" stroke="#08519c" stroke-width="1"/>"##, path(&arc, false));
        }
    }
    for p in &z {
        let (x, y) = to_px(*p);
        let _ = writeln!(s, r#"<circle class="vertex" cx="{x:.3}" cy="{y:.3}" r="2.5" fill="black"/>"#);
    }
    s.push_str("</svg>\n");
    s
}

/// The hyperbolic line process: for every vertex `z` the full geodesic
/// through `z` perpendicular to the ray from the origin. A vertex at the
/// origin has no such line and is drawn as a point only.
pub fn render_line_process(sample: &ComplexSample) -> String {
    let z = poincare_vertices(sample);
    let mut s = header("line process");
    for p in &z {
        if let Some(g) = perpendicular_geodesic(*p) {
            let chord = g.full_chord(4 * ARC_SAMPLES);
            let _ = writeln!(s, r##"<path class="line" d="{}" fill="none" stroke="#a50f15" stroke-width="1"/>"##, path(&chord, false));
        }
        let (x, y) = to_px(*p);
        let _ = writeln!(s, r#"<circle class="vertex" cx="{x:.3}" cy="{y:.3}" r="2" fill="black"/>"#);
    }
    s.push_str("</svg>\n");
    s
}
