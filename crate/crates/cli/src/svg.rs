//! Minimal SVG writer for line plots, scatters and layouts.

use std::fmt::Write as _;

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Self { width, height, body: String::new() }
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str, width: f64, dashed: bool) {
        if points.is_empty() {
            return;
        }
        let coords: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}"{dash}/>"#,
            coords.join(" ")
        );
    }

    pub fn polygon(&mut self, points: &[(f64, f64)], fill: &str, stroke: &str) {
        let coords: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(self.body, r#"<polygon points="{}" fill="{fill}" stroke="{stroke}"/>"#, coords.join(" "));
    }

    pub fn circle(&mut self, (x, y): (f64, f64), r: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{fill}"/>"#);
    }

    pub fn line(&mut self, (x1, y1): (f64, f64), (x2, y2): (f64, f64), stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width}"/>"#
        );
    }

    pub fn rect(&mut self, (x, y): (f64, f64), w: f64, h: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"/>"#);
    }

    pub fn text(&mut self, (x, y): (f64, f64), size: f64, anchor: &str, text: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size}" font-family="sans-serif" text-anchor="{anchor}">{}</text>"#,
            escape(text)
        );
    }

    pub fn finish(self, comment: &str) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<!-- {} -->\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            escape(comment),
            self.body,
            w = self.width,
            h = self.height,
        )
    }
}

/// Maps data coordinates into a pixel rectangle, y pointing up.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
}

impl Frame {
    /// Frame holding all `points` with a 5 % margin. With `equal_aspect` one
    /// data unit has the same length along both axes.
    pub fn fit(points: &[(f64, f64)], left: f64, top: f64, width: f64, height: f64, equal_aspect: bool) -> Self {
        let finite = points.iter().filter(|(x, y)| x.is_finite() && y.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in finite {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |lo: f64, hi: f64| {
            let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
            (lo - 0.05 * span, hi + 0.05 * span)
        };
        let (mut x, mut y) = (pad(x0, x1), pad(y0, y1));
        if equal_aspect {
            let scale = ((x.1 - x.0) / width).max((y.1 - y.0) / height);
            let (cx, cy) = ((x.0 + x.1) / 2.0, (y.0 + y.1) / 2.0);
            x = (cx - scale * width / 2.0, cx + scale * width / 2.0);
            y = (cy - scale * height / 2.0, cy + scale * height / 2.0);
        }
        Self { x, y, left, top, width, height }
    }

    pub fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (
            self.left + (x - self.x.0) / (self.x.1 - self.x.0) * self.width,
            self.top + (self.y.1 - y) / (self.y.1 - self.y.0) * self.height,
        )
    }

    pub fn map_all(&self, points: &[(f64, f64)]) -> Vec<(f64, f64)> {
        points.iter().map(|&p| self.map(p)).collect()
    }

    /// Frame box with range labels at the ends of each axis.
    pub fn axes(&self, svg: &mut Svg, x_label: &str, y_label: &str) {
        let (l, t, r, b) = (self.left, self.top, self.left + self.width, self.top + self.height);
        svg.polyline(&[(l, t), (r, t), (r, b), (l, b), (l, t)], "#444", 1.0, false);
        svg.text((l, b + 16.0), 11.0, "start", &format!("{:.4}", self.x.0));
        svg.text((r, b + 16.0), 11.0, "end", &format!("{:.4}", self.x.1));
        svg.text(((l + r) / 2.0, b + 32.0), 12.0, "middle", x_label);
        svg.text((l - 6.0, b), 11.0, "end", &format!("{:.4}", self.y.0));
        svg.text((l - 6.0, t + 10.0), 11.0, "end", &format!("{:.4}", self.y.1));
        svg.text((l - 6.0, (t + b) / 2.0), 12.0, "end", y_label);
    }
}
