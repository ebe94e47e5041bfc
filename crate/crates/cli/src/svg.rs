//! Static SVG plots written as plain text.
//!
//! Coordinates are printed with fixed precision so identical inputs give
//! identical bytes.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 240.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const PANEL_GAP: f64 = 50.0;

/// One stacked panel of a line chart sharing the x axis with the others.
pub struct Panel {
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        let pad = lo.abs().max(1.0) * 0.5;
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e-2 && v.abs() < 1e4 {
        format!("{v:.3}").trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn header(out: &mut String, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

/// Line chart with one or more stacked panels.
pub fn line_chart(title: &str, x_label: &str, panels: &[Panel]) -> String {
    let height = MARGIN_TOP + panels.len() as f64 * (PANEL_HEIGHT + PANEL_GAP) + 10.0;
    let mut out = String::new();
    header(&mut out, height, title);
    let (x0, x1) = bounds(panels.iter().flat_map(|p| p.points.iter().map(|q| q.0)));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    for (k, panel) in panels.iter().enumerate() {
        let top = MARGIN_TOP + k as f64 * (PANEL_HEIGHT + PANEL_GAP);
        let (y0, y1) = bounds(panel.points.iter().map(|q| q.1));
        let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
        let sy = |y: f64| top + PANEL_HEIGHT - (y - y0) / (y1 - y0) * PANEL_HEIGHT;
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN_LEFT:.1}" y="{top:.1}" width="{plot_w:.1}" height="{PANEL_HEIGHT:.1}" fill="none" stroke="black"/>"#
        );
        for i in 0..=4 {
            let t = i as f64 / 4.0;
            let xv = x0 + t * (x1 - x0);
            let yv = y0 + t * (y1 - y0);
            let _ = writeln!(
                out,
                r##"<line x1="{x:.1}" y1="{top:.1}" x2="{x:.1}" y2="{b:.1}" stroke="#ddd"/><text x="{x:.1}" y="{ty:.1}" text-anchor="middle">{}</text>"##,
                tick_label(xv),
                x = sx(xv),
                b = top + PANEL_HEIGHT,
                ty = top + PANEL_HEIGHT + 15.0,
            );
            let _ = writeln!(
                out,
                r##"<line x1="{MARGIN_LEFT:.1}" y1="{y:.1}" x2="{r:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{tx:.1}" y="{y:.1}" text-anchor="end" dominant-baseline="middle">{}</text>"##,
                tick_label(yv),
                y = sy(yv),
                r = MARGIN_LEFT + plot_w,
                tx = MARGIN_LEFT - 5.0,
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="16" y="{y:.1}" transform="rotate(-90 16 {y:.1})" text-anchor="middle">{}</text>"#,
            escape(&panel.y_label),
            y = top + PANEL_HEIGHT / 2.0,
        );
        let pts: Vec<String> = panel
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r##"<polyline fill="none" stroke="#1f5fa8" stroke-width="1.5" points="{}"/>"##,
            pts.join(" ")
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        height - 12.0,
        escape(x_label)
    );
    out.push_str("</svg>\n");
    out
}

/// Linear blend through a dark-blue to yellow ramp, `t` in `[0, 1]`.
fn color(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 4] = [
        (68.0, 1.0, 84.0),
        (49.0, 104.0, 142.0),
        (53.0, 183.0, 121.0),
        (253.0, 231.0, 37.0),
    ];
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |p: f64, q: f64| (p + f * (q - p)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Grid of coloured cells with the value printed in each. `None` cells are
/// drawn grey.
pub fn heatmap(
    title: &str,
    row_labels: &[String],
    col_labels: &[String],
    values: &[Vec<Option<f64>>],
) -> String {
    const CELL_H: f64 = 36.0;
    const LABEL_W: f64 = 190.0;
    let ncol = col_labels.len().max(1);
    let cell_w = (WIDTH - LABEL_W - MARGIN_RIGHT) / ncol as f64;
    let height = MARGIN_TOP + 24.0 + row_labels.len() as f64 * CELL_H + 20.0;
    let mut out = String::new();
    header(&mut out, height, title);
    let (lo, hi) = bounds(values.iter().flatten().flatten().copied());
    let grid_top = MARGIN_TOP + 24.0;
    for (j, label) in col_labels.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LABEL_W + (j as f64 + 0.5) * cell_w,
            grid_top - 8.0,
            escape(label)
        );
    }
    for (i, (label, row)) in row_labels.iter().zip(values).enumerate() {
        let y = grid_top + i as f64 * CELL_H;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            LABEL_W - 8.0,
            y + CELL_H / 2.0,
            escape(label)
        );
        for (j, v) in row.iter().enumerate() {
            let x = LABEL_W + j as f64 * cell_w;
            let (fill, text) = match v {
                Some(v) => (color((v - lo) / (hi - lo)), tick_label(*v)),
                None => ("#bbbbbb".to_string(), "n/a".to_string()),
            };
            let _ = writeln!(
                out,
                r#"<rect x="{x:.1}" y="{y:.1}" width="{cell_w:.1}" height="{CELL_H:.1}" fill="{fill}" stroke="white"/><text x="{:.1}" y="{:.1}" text-anchor="middle" dominant-baseline="middle" fill="black" stroke="white" stroke-width="0.3">{text}</text>"#,
                x + cell_w / 2.0,
                y + CELL_H / 2.0,
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
