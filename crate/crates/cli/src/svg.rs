//! Hand-written SVG figures. Output depends only on the input numbers.

use std::fmt::Write;

use coloc_core::ena::{NetworkGraph, NetworkKind};
use coloc_core::eval::{ConfusionMatrix, PrCurve};

/// Nine-stop blue-white-red ramp; index 4 is the neutral midpoint.
pub const DIVERGING: [&str; 9] = [
    "#2166ac", "#4393c3", "#92c5de", "#d1e5f0", "#f7f7f7", "#fddbc7", "#f4a582", "#d6604d", "#b2182b",
];

const SERIES: [&str; 8] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"];

/// Palette index for `value` scaled by `limit`; zero always maps to the midpoint.
pub fn diverging_index(value: f64, limit: f64) -> usize {
    if limit <= 0.0 || value == 0.0 || !value.is_finite() {
        return 4;
    }
    let t = (value / limit).clamp(-1.0, 1.0);
    let step = (t.abs() * 4.0).round() as i64;
    (4 + t.signum() as i64 * step) as usize
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn open(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{w:.0}" height="{h:.0}" fill="white"/>"#);
}

fn text(out: &mut String, x: f64, y: f64, anchor: &str, s: &str) {
    let _ = writeln!(out, r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{}</text>"#, escape(s));
}

fn max_abs(m: &[Vec<f64>]) -> f64 {
    m.iter().flatten().fold(0.0f64, |a, v| if v.is_finite() { a.max(v.abs()) } else { a })
}

/// Three aligned heatmap panels (High, Low, High − Low). Each matrix is
/// channels × normalised time. The first two panels share one colour scale,
/// the difference panel uses its own scale centred at zero.
pub fn heatmap_triptych(high: &[Vec<f64>], low: &[Vec<f64>], diff: &[Vec<f64>], channels: &[String]) -> String {
    const CELL_H: f64 = 18.0;
    const PANEL_W: f64 = 240.0;
    const LEFT: f64 = 190.0;
    const GAP: f64 = 30.0;
    const TOP: f64 = 30.0;
    let rows = channels.len();
    let cols = high.first().map_or(0, Vec::len).max(1);
    let cell_w = PANEL_W / cols as f64;
    let height = TOP + rows as f64 * CELL_H + 50.0;
    let width = LEFT + 3.0 * PANEL_W + 2.0 * GAP + 20.0;
    let mut out = String::new();
    open(&mut out, width, height);

    let shared = max_abs(high).max(max_abs(low));
    let panels = [("High", high, shared), ("Low", low, shared), ("Difference (High - Low)", diff, max_abs(diff))];
    for (k, (title, m, limit)) in panels.iter().enumerate() {
        let x0 = LEFT + k as f64 * (PANEL_W + GAP);
        text(&mut out, x0 + PANEL_W / 2.0, TOP - 10.0, "middle", title);
        let _ = writeln!(out, r#"<g class="panel" data-panel="{k}">"#);
        for (r, row) in m.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let colour = DIVERGING[diverging_index(*v, *limit)];
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{CELL_H:.2}" fill="{colour}"/>"#,
                    x0 + c as f64 * cell_w,
                    TOP + r as f64 * CELL_H,
                    cell_w
                );
            }
        }
        let _ = writeln!(out, "</g>");
        let base = TOP + rows as f64 * CELL_H;
        text(&mut out, x0, base + 14.0, "start", "0");
        text(&mut out, x0 + PANEL_W, base + 14.0, "end", "1");
        text(&mut out, x0 + PANEL_W / 2.0, base + 30.0, "middle", "normalized time");
    }
    for (r, name) in channels.iter().enumerate() {
        text(&mut out, LEFT - 6.0, TOP + (r as f64 + 0.7) * CELL_H, "end", name);
    }
    out.push_str("</svg>\n");
    out
}

/// One panel per graph on a shared circular layout. Stroke width is
/// proportional to |weight| on a scale shared by all panels; difference edges
/// are red when positive and blue when negative.
pub fn network_svg(graphs: &[&NetworkGraph]) -> String {
    const PANEL: f64 = 360.0;
    const RADIUS: f64 = 120.0;
    const MAX_STROKE: f64 = 12.0;
    let width = PANEL * graphs.len().max(1) as f64;
    let mut out = String::new();
    open(&mut out, width, PANEL + 20.0);
    let limit = graphs
        .iter()
        .flat_map(|g| g.edges.iter().map(|e| e.weight.abs()))
        .fold(0.0f64, f64::max);
    for (k, g) in graphs.iter().enumerate() {
        let cx = PANEL * k as f64 + PANEL / 2.0;
        let cy = PANEL / 2.0 + 10.0;
        let title = match g.kind {
            NetworkKind::HighMean => "High",
            NetworkKind::LowMean => "Low",
            NetworkKind::Difference => "Difference (High - Low)",
        };
        text(&mut out, cx, 18.0, "middle", title);
        let pos: Vec<(f64, f64)> = g.positions.iter().map(|(x, y)| (cx + RADIUS * x, cy + RADIUS * y)).collect();
        for e in &g.edges {
            if e.weight == 0.0 || limit == 0.0 {
                continue;
            }
            let colour = match g.kind {
                NetworkKind::Difference if e.weight > 0.0 => DIVERGING[8],
                NetworkKind::Difference => DIVERGING[0],
                _ => "#555555",
            };
            let (a, b) = (pos[e.a], pos[e.b]);
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-width="{:.4}" stroke-linecap="round"/>"#,
                a.0,
                a.1,
                b.0,
                b.1,
                MAX_STROKE * e.weight.abs() / limit
            );
        }
        for (name, (x, y)) in g.nodes.iter().zip(&pos) {
            let _ = writeln!(out, r##"<circle cx="{x:.2}" cy="{y:.2}" r="6" fill="#333333"/>"##);
            let (dx, dy) = (x - cx, y - cy);
            let anchor = if dx.abs() < 1.0 { "middle" } else if dx > 0.0 { "start" } else { "end" };
            text(&mut out, x + dx * 0.12, y + dy * 0.12 + 4.0, anchor, name);
        }
    }
    out.push_str("</svg>\n");
    out
}

fn axes(out: &mut String, x0: f64, y0: f64, size: f64, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        out,
        r##"<rect x="{x0:.2}" y="{y0:.2}" width="{size:.2}" height="{size:.2}" fill="none" stroke="#000000"/>"##
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        text(out, x0 + f * size, y0 + size + 14.0, "middle", &format!("{f:.2}"));
        text(out, x0 - 6.0, y0 + size - f * size + 4.0, "end", &format!("{f:.2}"));
    }
    text(out, x0 + size / 2.0, y0 + size + 32.0, "middle", xlabel);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{ylabel}</text>"#,
        x0 - 40.0,
        y0 + size / 2.0,
        x0 - 40.0,
        y0 + size / 2.0
    );
}

/// Precision-recall curves, one polyline per class.
pub fn pr_curve_svg(curves: &[PrCurve]) -> String {
    const SIZE: f64 = 320.0;
    const X0: f64 = 60.0;
    const Y0: f64 = 20.0;
    let mut out = String::new();
    open(&mut out, X0 + SIZE + 230.0, Y0 + SIZE + 50.0);
    axes(&mut out, X0, Y0, SIZE, "recall", "precision");
    for (k, c) in curves.iter().enumerate() {
        let colour = SERIES[k % SERIES.len()];
        let pts: Vec<String> = c
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", X0 + p.recall * SIZE, Y0 + SIZE - p.precision * SIZE))
            .collect();
        if !pts.is_empty() {
            let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#, pts.join(" "));
        }
        let ly = Y0 + 12.0 + k as f64 * 16.0;
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{colour}"/>"#,
            X0 + SIZE + 16.0,
            ly - 9.0
        );
        text(&mut out, X0 + SIZE + 32.0, ly, "start", &format!("{} {:.3}", c.class, c.ap));
    }
    out.push_str("</svg>\n");
    out
}

/// Column-normalised confusion matrix: rows predicted, columns true.
pub fn confusion_svg(m: &ConfusionMatrix) -> String {
    const CELL: f64 = 48.0;
    const LEFT: f64 = 180.0;
    const TOP: f64 = 30.0;
    let n = m.labels.len();
    let mut out = String::new();
    open(&mut out, LEFT + n as f64 * CELL + 20.0, TOP + n as f64 * CELL + 170.0);
    let limit = max_abs(&m.cells);
    for (r, row) in m.cells.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            let idx = diverging_index(*v, limit);
            let (x, y) = (LEFT + c as f64 * CELL, TOP + r as f64 * CELL);
            let _ = writeln!(
                out,
                r##"<rect x="{x:.2}" y="{y:.2}" width="{CELL:.2}" height="{CELL:.2}" fill="{}" stroke="#ffffff"/>"##,
                DIVERGING[idx]
            );
            if *v != 0.0 {
                text(&mut out, x + CELL / 2.0, y + CELL / 2.0 + 4.0, "middle", &format!("{v:.2}"));
            }
        }
    }
    for (k, name) in m.labels.iter().enumerate() {
        text(&mut out, LEFT - 6.0, TOP + (k as f64 + 0.55) * CELL, "end", name);
        let (x, y) = (LEFT + (k as f64 + 0.5) * CELL, TOP + n as f64 * CELL + 8.0);
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="end" transform="rotate(-60 {x:.2} {y:.2})">{}</text>"#,
            escape(name)
        );
    }
    text(&mut out, LEFT - 6.0, TOP - 10.0, "end", "predicted \\ true");
    out.push_str("</svg>\n");
    out
}
