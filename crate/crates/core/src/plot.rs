//! Minimal scatter plots rendered as plain SVG text.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#e6b800", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct PlotPoint {
    pub x: f64,
    pub y: f64,
    pub label: String,
    /// Series or group index; 0 means ungrouped.
    pub group: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scatter {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub points: Vec<PlotPoint>,
    /// Legend names for groups `1..`.
    pub legend: Vec<String>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

impl Scatter {
    /// Ranges padded to cover every point, with a fallback for degenerate spans.
    pub fn fit_ranges(&mut self) {
        let fit = |vals: Vec<f64>| {
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !lo.is_finite() || !hi.is_finite() {
                return (0.0, 1.0);
            }
            let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
            (lo - pad, hi + pad)
        };
        self.x_range = fit(self.points.iter().map(|p| p.x).collect());
        self.y_range = fit(self.points.iter().map(|p| p.y).collect());
    }

    pub fn to_svg(&self) -> String {
        let (x0, x1) = self.x_range;
        let (y0, y1) = self.y_range;
        let plot_w = WIDTH - 2.0 * MARGIN;
        let plot_h = HEIGHT - 2.0 * MARGIN;
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * plot_w;
        let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * plot_h;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{HEIGHT:.0}" viewBox="0 0 {WIDTH:.0} {HEIGHT:.0}">"#
        );
        out.push_str("<style>\n");
        out.push_str("text { font-family: sans-serif; font-size: 11px; }\n");
        out.push_str(".axis { stroke: #333; stroke-width: 1; }\n");
        out.push_str(".group-0 { fill: #555555; }\n");
        for (k, color) in PALETTE.iter().enumerate() {
            let _ = writeln!(out, ".group-{} {{ fill: {color}; }}", k + 1);
        }
        out.push_str("</style>\n");
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            MARGIN / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<line class="axis" x1="{MARGIN:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}"/>"#,
            HEIGHT - MARGIN,
            WIDTH - MARGIN,
            HEIGHT - MARGIN
        );
        let _ = writeln!(
            out,
            r#"<line class="axis" x1="{MARGIN:.1}" y1="{MARGIN:.1}" x2="{MARGIN:.1}" y2="{:.1}"/>"#,
            HEIGHT - MARGIN
        );
        for (value, anchor_x) in [(x0, MARGIN), (x1, WIDTH - MARGIN)] {
            let _ = writeln!(
                out,
                r#"<text x="{anchor_x:.1}" y="{:.1}" text-anchor="middle">{value:.3}</text>"#,
                HEIGHT - MARGIN + 16.0
            );
        }
        for (value, anchor_y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN)] {
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{anchor_y:.1}" text-anchor="end">{value:.3}</text>"#,
                MARGIN - 6.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - MARGIN / 3.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
            MARGIN / 3.0,
            HEIGHT / 2.0,
            MARGIN / 3.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        for p in &self.points {
            let (cx, cy) = (sx(p.x), sy(p.y));
            let class = if p.group <= PALETTE.len() { p.group } else { 0 };
            let _ = writeln!(
                out,
                r#"<circle class="group-{class}" cx="{cx:.2}" cy="{cy:.2}" r="4"><title>{}</title></circle>"#,
                escape(&p.label)
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                cx + 6.0,
                cy - 4.0,
                escape(&p.label)
            );
        }
        for (k, name) in self.legend.iter().enumerate() {
            let y = MARGIN + 14.0 * k as f64;
            let _ = writeln!(
                out,
                r#"<circle class="group-{}" cx="{:.1}" cy="{y:.1}" r="4"/><text x="{:.1}" y="{:.1}">{}</text>"#,
                k + 1,
                WIDTH - MARGIN - 90.0,
                WIDTH - MARGIN - 82.0,
                y + 4.0,
                escape(name)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_has_one_circle_per_point_and_escapes_labels() {
        let mut s = Scatter {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            x_range: (0.0, 1.0),
            y_range: (0.0, 1.0),
            points: vec![
                PlotPoint { x: 0.1, y: 0.2, label: "a<b".into(), group: 1 },
                PlotPoint { x: 0.3, y: 0.4, label: "c".into(), group: 0 },
            ],
            legend: vec![],
        };
        s.fit_ranges();
        let svg = s.to_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains("a&lt;b"));
        assert!(svg.contains(r#"class="group-1""#));
    }
}
