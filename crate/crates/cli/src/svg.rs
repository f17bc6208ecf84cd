//! Static SVG 1.1 plots in chart coordinates.
//!
//! The viewBox is the plot window itself, with `x²` flipped so that it
//! points up; every coordinate is written with fixed precision so output is
//! byte-stable.

use std::fmt::Write as _;

use affsurf::geodesic::{CoverageMap, Reach};
use affsurf::Point2;

pub struct Plot {
    window: [f64; 4],
    stroke: f64,
    body: String,
}

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

impl Plot {
    pub fn new(window: [f64; 4]) -> Self {
        let span = (window[1] - window[0]).max(window[3] - window[2]);
        Self { window, stroke: 0.003 * span, body: String::new() }
    }

    fn inside(&self, p: Point2, slack: f64) -> bool {
        let [a, b, c, d] = self.window;
        let (mx, my) = (slack * (b - a), slack * (d - c));
        p.x1.is_finite() && p.x2.is_finite() && p.x1 >= a - mx && p.x1 <= b + mx && p.x2 >= c - my && p.x2 <= d + my
    }

    /// Shaded cells: unreachable dark, unknown light.
    pub fn coverage(&mut self, map: &CoverageMap) {
        let (dx, dy) = map.grid.cell_size();
        for j in 0..map.grid.ny {
            for i in 0..map.grid.nx {
                let fill = match map.get(i, j) {
                    Reach::Reachable => continue,
                    Reach::Unreachable => "#555555",
                    Reach::Unknown => "#c8c8c8",
                };
                let c = map.grid.center(i, j);
                let _ = writeln!(
                    self.body,
                    r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}" fill-opacity="0.6"/>"#,
                    num(c.x1 - 0.5 * dx),
                    num(-(c.x2 + 0.5 * dy)),
                    num(dx),
                    num(dy)
                );
            }
        }
    }

    /// A curve, split into the runs that stay near the window.
    pub fn polyline(&mut self, points: &[Point2], color: &str) {
        let mut run: Vec<Point2> = Vec::new();
        for &p in points.iter().chain(std::iter::once(&Point2::new(f64::NAN, f64::NAN))) {
            if self.inside(p, 0.25) {
                run.push(p);
                continue;
            }
            if run.len() > 1 {
                let pts: Vec<String> = run.iter().map(|q| format!("{},{}", num(q.x1), num(-q.x2))).collect();
                let _ = writeln!(
                    self.body,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{}"/>"#,
                    pts.join(" "),
                    num(self.stroke)
                );
            }
            run.clear();
        }
    }

    pub fn marker(&mut self, p: Point2, color: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{}" fill="{color}"/>"#,
            num(p.x1),
            num(-p.x2),
            num(3.0 * self.stroke)
        );
    }

    pub fn finish(self) -> String {
        let [a, b, c, d] = self.window;
        let (w, h) = (b - a, d - c);
        let px = 800.0;
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="{} {} {} {}">"#,
            num(px),
            num(px * h / w),
            num(a),
            num(-d),
            num(w),
            num(h)
        );
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="white" stroke="black" stroke-width="{}"/>"#,
            num(a),
            num(-d),
            num(w),
            num(h),
            num(self.stroke)
        );
        let _ = writeln!(
            out,
            r#"<clipPath id="window"><rect x="{}" y="{}" width="{}" height="{}"/></clipPath>"#,
            num(a),
            num(-d),
            num(w),
            num(h)
        );
        out.push_str("<g clip-path=\"url(#window)\">\n");
        out.push_str(&self.body);
        out.push_str("</g>\n</svg>\n");
        out
    }
}

/// Smallest window containing `points` (finite ones), padded by 5%.
pub fn bounding_window(points: &[Point2]) -> [f64; 4] {
    let mut w = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for p in points.iter().filter(|p| p.x1.is_finite() && p.x2.is_finite()) {
        w = [w[0].min(p.x1), w[1].max(p.x1), w[2].min(p.x2), w[3].max(p.x2)];
    }
    if !w[0].is_finite() {
        return [-1.0, 1.0, -1.0, 1.0];
    }
    let pad = |lo: f64, hi: f64| {
        let m = 0.05 * (hi - lo).max(1e-3);
        (lo - m, hi + m)
    };
    let (a, b) = pad(w[0], w[1]);
    let (c, d) = pad(w[2], w[3]);
    [a, b, c, d]
}
