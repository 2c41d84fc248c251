//! Linear drawing of a pair of triangulations: vertices on a horizontal
//! line, diagonals of the first triangulation as arcs above it and of the
//! second as arcs below.

use std::fmt::Write;

use flipdist::convex::Triangulation;

const STEP: f64 = 40.0;
const MARGIN: f64 = 30.0;

fn arc(out: &mut String, a: usize, b: usize, above: bool, color: &str) {
    let (x1, x2) = (MARGIN + a as f64 * STEP, MARGIN + b as f64 * STEP);
    let r = (x2 - x1) / 2.0;
    let sweep = if above { 1 } else { 0 };
    let _ = writeln!(
        out,
        r#"<path d="M {x1} 0 A {r} {r} 0 0 {sweep} {x2} 0" fill="none" stroke="{color}" stroke-width="1.5"/>"#
    );
}

pub fn render(t1: &Triangulation, t2: &Triangulation) -> String {
    let n = t1.n();
    let width = 2.0 * MARGIN + (n.max(2) - 1) as f64 * STEP;
    let half = width / 2.0 + 10.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{h}" viewBox="0 {y0} {width} {h}">"#,
        h = 2.0 * half,
        y0 = -half
    );
    let last = MARGIN + (n - 1) as f64 * STEP;
    let _ = writeln!(s, r#"<line x1="{MARGIN}" y1="0" x2="{last}" y2="0" stroke="black" stroke-width="2"/>"#);
    // the closing side (0, n-1) is drawn on both sides
    arc(&mut s, 0, n - 1, true, "gray");
    arc(&mut s, 0, n - 1, false, "gray");
    for e in t1.diagonals() {
        arc(&mut s, e.a, e.b, true, "steelblue");
    }
    for e in t2.diagonals() {
        arc(&mut s, e.a, e.b, false, "firebrick");
    }
    for v in 0..n {
        let x = MARGIN + v as f64 * STEP;
        let _ = writeln!(s, r#"<circle cx="{x}" cy="0" r="4" fill="black"/>"#);
        let _ = writeln!(s, r#"<text x="{x}" y="16" font-size="10" text-anchor="middle">{v}</text>"#);
    }
    s.push_str("</svg>\n");
    s
}
