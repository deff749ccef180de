//! Self-contained SVG charts for convergence tables.

use std::fmt::Write;

/// One polyline of a chart.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Axis scaling of a chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axes {
    LogLog,
    /// Linear abscissa, logarithmic ordinate.
    SemiLogY,
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub axes: Axes,
    pub series: Vec<Series>,
    /// Reference slopes drawn as dashed guide lines (log-log only).
    pub guides: Vec<f64>,
}

const W: f64 = 640.0;
const H: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    log_x: bool,
}

impl Frame {
    fn tx(&self, x: f64) -> f64 {
        let v = if self.log_x { x.log10() } else { x };
        LEFT + (v - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }

    fn ty(&self, y: f64) -> f64 {
        TOP + (self.y1 - y.log10()) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }
}

fn pad(lo: f64, hi: f64, frac: f64) -> (f64, f64) {
    let span = (hi - lo).max(1e-3);
    (lo - frac * span, hi + frac * span)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Chart {
    /// Render to an SVG document. Non-positive or non-finite points are skipped.
    pub fn to_svg(&self) -> String {
        let log_x = self.axes == Axes::LogLog;
        let usable = |&(x, y): &(f64, f64)| y > 0.0 && y.is_finite() && x.is_finite() && (!log_x || x > 0.0);
        let pts: Vec<(f64, f64)> = self.series.iter().flat_map(|s| s.points.iter().copied().filter(usable)).collect();
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            (LEFT + W - RIGHT) / 2.0,
            escape(&self.title)
        );
        if pts.is_empty() {
            let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">no data</text>"#, W / 2.0, H / 2.0);
            out.push_str("</svg>\n");
            return out;
        }
        let xv = |x: f64| if log_x { x.log10() } else { x };
        let (x0, x1) = pad(
            pts.iter().map(|p| xv(p.0)).fold(f64::INFINITY, f64::min),
            pts.iter().map(|p| xv(p.0)).fold(f64::NEG_INFINITY, f64::max),
            0.05,
        );
        let (y0, y1) = pad(
            pts.iter().map(|p| p.1.log10()).fold(f64::INFINITY, f64::min),
            pts.iter().map(|p| p.1.log10()).fold(f64::NEG_INFINITY, f64::max),
            0.08,
        );
        let f = Frame { x0, x1, y0, y1, log_x };
        let (pl, pr, pt, pb) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
        let _ = writeln!(
            out,
            r##"<rect x="{pl}" y="{pt}" width="{}" height="{}" fill="none" stroke="#333"/>"##,
            pr - pl,
            pb - pt
        );
        // decade grid on log axes, five ticks on the linear one
        for e in (y0.ceil() as i32)..=(y1.floor() as i32) {
            let y = f.ty(10f64.powi(e));
            let _ = writeln!(out, r##"<line x1="{pl}" y1="{y:.1}" x2="{pr}" y2="{y:.1}" stroke="#ddd"/>"##);
            let _ = writeln!(out, r#"<text x="{}" y="{:.1}" text-anchor="end">1e{e}</text>"#, pl - 6.0, y + 4.0);
        }
        if log_x {
            for e in (x0.ceil() as i32)..=(x1.floor() as i32) {
                let x = f.tx(10f64.powi(e));
                let _ = writeln!(out, r##"<line x1="{x:.1}" y1="{pt}" x2="{x:.1}" y2="{pb}" stroke="#ddd"/>"##);
                let _ = writeln!(out, r#"<text x="{x:.1}" y="{}" text-anchor="middle">1e{e}</text>"#, pb + 16.0);
            }
        } else {
            for i in 0..=4 {
                let v = x0 + (x1 - x0) * i as f64 / 4.0;
                let x = f.tx(v);
                let _ = writeln!(out, r##"<line x1="{x:.1}" y1="{pt}" x2="{x:.1}" y2="{pb}" stroke="#ddd"/>"##);
                let _ = writeln!(out, r#"<text x="{x:.1}" y="{}" text-anchor="middle">{v:.3}</text>"#, pb + 16.0);
            }
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (pl + pr) / 2.0,
            H - 16.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
            (pt + pb) / 2.0,
            escape(&self.y_label)
        );
        if log_x {
            // guides fan out from the smallest parameter and error, shortened to stay inside the frame
            let (ax, ay) = pts.iter().fold((f64::INFINITY, f64::INFINITY), |(mx, my), p| {
                (mx.min(p.0.log10()), my.min(p.1.log10()))
            });
            for &slope in &self.guides {
                let mut span = 0.4 * (x1 - x0);
                if slope > 0.0 {
                    span = span.min(0.9 * (y1 - ay) / slope);
                }
                let (xb, yt) = (ax + span, ay + slope * span);
                let (sx0, sx1) = (f.tx(10f64.powf(xb)), f.tx(10f64.powf(ax)));
                let (sy0, sy1) = (f.ty(10f64.powf(yt)), f.ty(10f64.powf(ay)));
                let _ = writeln!(
                    out,
                    r##"<line x1="{sx0:.1}" y1="{sy0:.1}" x2="{sx1:.1}" y2="{sy1:.1}" stroke="#c9a400" stroke-width="1.5" stroke-dasharray="6 4"/>"##
                );
                let _ = writeln!(
                    out,
                    r##"<text x="{:.1}" y="{:.1}" text-anchor="start" fill="#8a7000">slope {slope}</text>"##,
                    sx0 + 4.0,
                    sy0 + 4.0
                );
            }
        }
        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let p: Vec<(f64, f64)> = s.points.iter().copied().filter(usable).map(|(x, y)| (f.tx(x), f.ty(y))).collect();
            if p.len() > 1 {
                let path: Vec<String> = p.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
                let _ = writeln!(
                    out,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                    path.join(" ")
                );
            }
            for (x, y) in &p {
                let _ = writeln!(out, r#"<circle cx="{x:.1}" cy="{y:.1}" r="3.5" fill="{color}"/>"#);
            }
            let ly = pt + 16.0 + 18.0 * i as f64;
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
                pr + 10.0,
                pr + 30.0
            );
            let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, pr + 36.0, ly + 4.0, escape(&s.label));
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(points: Vec<(f64, f64)>) -> Chart {
        Chart {
            title: "t<1>".into(),
            x_label: "h".into(),
            y_label: "error".into(),
            axes: Axes::LogLog,
            series: vec![Series {
                label: "err".into(),
                points,
            }],
            guides: vec![1.0, 2.0],
        }
    }

    #[test]
    fn renders_well_formed_document() {
        let svg = chart(vec![(0.1, 1e-2), (0.05, 2.5e-3), (0.025, 6.2e-4)]).to_svg();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("slope 2"));
        assert!(svg.contains("t&lt;1&gt;"));
    }

    #[test]
    fn skips_unplottable_points() {
        let svg = chart(vec![(0.1, 0.0), (0.05, f64::NAN)]).to_svg();
        assert!(svg.contains("no data"));
    }
}
