//! Static SVG rendering of `Int` diagrams.
//!
//! Each interval is drawn as the union of the unit squares `[x,x+1)×[y,y+1)`
//! of its points: blue for positive values, red for negative ones. Corner
//! points are marked with a dot (type 0), a star (type 1) or a square
//! (type 2) in the interval's colour.

use std::fmt::Write as _;

use gpd_core::betti::corner_types;
use gpd_core::posets::Interval;
use gpd_core::{Grid, Point};

const CELL: i64 = 48;
const MARGIN: i64 = 40;
const BLUE: &str = "#1f5fbf";
const RED: &str = "#c0392b";
const BLUE_FILL: &str = "#d6e2f5";
const RED_FILL: &str = "#f5d7d3";

struct Canvas {
    // drawable extent, in cells: [0, w] × [0, h]
    w: i64,
    h: i64,
}

impl Canvas {
    fn sx(&self, x: i64) -> i64 {
        MARGIN + x * CELL
    }

    fn sy(&self, y: i64) -> i64 {
        MARGIN + (self.h - y) * CELL
    }

    fn width(&self) -> i64 {
        2 * MARGIN + self.w * CELL
    }

    fn height(&self) -> i64 {
        2 * MARGIN + self.h * CELL
    }
}

/// Outline of the unit-square expansion, counter-clockwise from `(lo[b], b)`.
fn outline(i: &Interval) -> Vec<(i64, i64)> {
    let rows: Vec<(i64, i64, i64)> = i.rows().map(|(y, lo, hi)| (y as i64, lo as i64, hi as i64)).collect();
    let mut pts = Vec::new();
    let (b, lo_b, _) = rows[0];
    pts.push((lo_b, b));
    for &(y, _, hi) in &rows {
        pts.push((hi + 1, y));
        pts.push((hi + 1, y + 1));
    }
    for &(y, lo, _) in rows.iter().rev() {
        pts.push((lo, y + 1));
        pts.push((lo, y));
    }
    pts.dedup();
    pts
}

// five-pointed star, outer radius 9, inner radius 4, rounded to pixels
const STAR: [(i64, i64); 10] = [
    (0, -9),
    (2, -3),
    (9, -3),
    (4, 1),
    (5, 7),
    (0, 4),
    (-5, 7),
    (-4, 1),
    (-9, -3),
    (-2, -3),
];

fn star(out: &mut String, cx: i64, cy: i64, colour: &str) {
    let pts: Vec<String> = STAR.iter().map(|(dx, dy)| format!("{},{}", cx + dx, cy + dy)).collect();
    let _ = writeln!(
        out,
        r#"    <polygon class="tau1" points="{}" fill="{colour}"/>"#,
        pts.join(" ")
    );
}

/// Renders the nonzero entries of an `Int` diagram on `grid`.
pub fn render(grid: Grid, entries: &[(Interval, i64)]) -> String {
    let canvas = Canvas {
        w: grid.m as i64 + 2,
        h: grid.n as i64 + 2,
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = canvas.width(),
        h = canvas.height()
    );
    let _ = writeln!(out, r#"  <rect width="100%" height="100%" fill="white"/>"#);

    // axes and lattice ticks
    let (x0, y0) = (canvas.sx(0), canvas.sy(0));
    let _ = writeln!(
        out,
        r#"  <g class="axes" stroke="black" stroke-width="1"><line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{}"/></g>"#,
        canvas.sx(canvas.w),
        canvas.sy(canvas.h)
    );
    let _ = writeln!(out, r##"  <g class="lattice" fill="#999">"##);
    for x in 0..=canvas.w {
        for y in 0..=canvas.h {
            let _ = writeln!(
                out,
                r#"    <circle cx="{}" cy="{}" r="2"/>"#,
                canvas.sx(x),
                canvas.sy(y)
            );
        }
    }
    let _ = writeln!(out, "  </g>");
    let _ = writeln!(
        out,
        r#"  <g class="labels" font-family="sans-serif" font-size="12" text-anchor="middle">"#
    );
    for x in 0..=canvas.w {
        let _ = writeln!(out, r#"    <text x="{}" y="{}">{x}</text>"#, canvas.sx(x), y0 + 18);
    }
    for y in 0..=canvas.h {
        let _ = writeln!(out, r#"    <text x="{}" y="{}">{y}</text>"#, x0 - 14, canvas.sy(y) + 4);
    }
    let _ = writeln!(out, "  </g>");

    for (interval, value) in entries {
        if *value == 0 {
            continue;
        }
        let (colour, fill) = if *value > 0 { (BLUE, BLUE_FILL) } else { (RED, RED_FILL) };
        let sign = if *value > 0 { "positive" } else { "negative" };
        let _ = writeln!(out, r#"  <g class="interval {sign}" data-value="{value}">"#);
        let poly: Vec<String> = outline(interval)
            .into_iter()
            .map(|(x, y)| format!("{},{}", canvas.sx(x), canvas.sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"    <polygon points="{}" fill="{fill}" stroke="{colour}" stroke-width="2"/>"#,
            poly.join(" ")
        );
        let first = interval.minima()[0];
        let _ = writeln!(
            out,
            r#"    <text x="{}" y="{}" font-family="sans-serif" font-size="13" fill="{colour}" text-anchor="middle">{value:+}</text>"#,
            canvas.sx(first.x) + CELL / 2,
            canvas.sy(first.y) - CELL / 2 + 5
        );
        let top = interval.top() as i64 + 1;
        let right = interval.points().iter().map(|p| p.x).max().unwrap_or(0) + 1;
        for x in 0..=right {
            for y in 0..=top {
                let [t0, t1, t2] = corner_types(interval, Point::new(x, y));
                let (cx, cy) = (canvas.sx(x), canvas.sy(y));
                if t0 != 0 {
                    let _ = writeln!(
                        out,
                        r#"    <circle class="tau0" cx="{cx}" cy="{cy}" r="6" fill="{colour}"/>"#
                    );
                }
                if t1 != 0 {
                    star(&mut out, cx, cy, colour);
                }
                if t2 != 0 {
                    let _ = writeln!(
                        out,
                        r#"    <rect class="tau2" x="{}" y="{}" width="11" height="11" fill="{colour}"/>"#,
                        cx - 5,
                        cy - 5
                    );
                }
            }
        }
        let _ = writeln!(out, "  </g>");
    }
    out.push_str("</svg>\n");
    out
}
