//! Minimal self-contained SVG chart emitters: line charts for score
//! trajectories and regret curves, heatmaps for transfer grids, grouped
//! bars for before/after defense comparisons. No plotting dependency; the
//! numeric data always ships alongside as a table.

use anyhow::Result;
use std::path::Path;

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#2ca02c", "#9467bd", "#d62728", "#ff7f0e", "#8c564b",
];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn frame(title: &str, body: &str) -> String {
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">
<rect width="{W}" height="{H}" fill="white"/>
<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>
{}
</svg>
"#,
        W / 2.0,
        esc(title),
        body
    )
}

/// Polyline chart; one series per (label, points) pair.
pub fn line_chart(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(String, Vec<(f64, f64)>)],
) -> Result<()> {
    let xs = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0));
    let ys = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.1));
    let (x_min, x_max) = bounds(xs);
    let (y_min, y_max) = bounds(ys);
    let sx = move |x: f64| MARGIN + (x - x_min) / (x_max - x_min).max(1e-12) * (W - 2.0 * MARGIN);
    let sy =
        move |y: f64| H - MARGIN - (y - y_min) / (y_max - y_min).max(1e-12) * (H - 2.0 * MARGIN);

    let mut body = axes(x_label, y_label, x_min, x_max, y_min, y_max);
    for (i, (label, points)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        body.push_str(&format!(
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>
"#,
            pts.join(" ")
        ));
        body.push_str(&format!(
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>
"#,
            W - MARGIN + 4.0 - 120.0,
            40.0 + 16.0 * i as f64,
            esc(label)
        ));
    }
    write_svg(path, &frame(title, &body))
}

/// Heatmap with `None` cells rendered as hatched gray.
pub fn heatmap(
    path: &Path,
    title: &str,
    row_labels: &[String],
    col_labels: &[String],
    cells: &[Vec<Option<f64>>],
) -> Result<()> {
    let rows = row_labels.len().max(1) as f64;
    let cols = col_labels.len().max(1) as f64;
    let cw = (W - 2.0 * MARGIN) / cols;
    let ch = (H - 2.0 * MARGIN) / rows;
    let mut body = String::new();
    for (i, row) in cells.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let x = MARGIN + j as f64 * cw;
            let y = MARGIN + i as f64 * ch;
            match cell {
                Some(v) => {
                    let t = v.clamp(0.0, 1.0);
                    let red = (255.0 * t) as u8;
                    let blue = (255.0 * (1.0 - t)) as u8;
                    body.push_str(&format!(
                        r#"<rect x="{x:.1}" y="{y:.1}" width="{cw:.1}" height="{ch:.1}" fill="rgb({red},120,{blue})" stroke="white"/>
<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" fill="white" text-anchor="middle">{v:.2}</text>
"#,
                        x + cw / 2.0,
                        y + ch / 2.0 + 4.0
                    ));
                }
                None => {
                    body.push_str(&format!(
                        r##"<rect x="{x:.1}" y="{y:.1}" width="{cw:.1}" height="{ch:.1}" fill="#dddddd" stroke="white"/>
"##
                    ));
                }
            }
        }
    }
    for (i, label) in row_labels.iter().enumerate() {
        body.push_str(&format!(
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>
"#,
            MARGIN - 6.0,
            MARGIN + i as f64 * ch + ch / 2.0 + 4.0,
            esc(label)
        ));
    }
    for (j, label) in col_labels.iter().enumerate() {
        body.push_str(&format!(
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>
"#,
            MARGIN + j as f64 * cw + cw / 2.0,
            MARGIN - 8.0,
            esc(label)
        ));
    }
    write_svg(path, &frame(title, &body))
}

/// Grouped bars: one group per label, a bar per series.
pub fn grouped_bars(
    path: &Path,
    title: &str,
    series_names: &[String],
    groups: &[(String, Vec<f64>)],
) -> Result<()> {
    let values = groups.iter().flat_map(|(_, vs)| vs.iter().copied());
    let (mut lo, mut hi) = bounds(values);
    lo = lo.min(0.0);
    hi = hi.max(0.0);
    let span = (hi - lo).max(1e-12);
    let n_groups = groups.len().max(1) as f64;
    let n_series = series_names.len().max(1) as f64;
    let group_w = (W - 2.0 * MARGIN) / n_groups;
    let bar_w = group_w * 0.8 / n_series;
    let sy = |v: f64| H - MARGIN - (v - lo) / span * (H - 2.0 * MARGIN);

    let mut body = String::new();
    for (g, (label, values)) in groups.iter().enumerate() {
        for (s, &v) in values.iter().enumerate() {
            let color = PALETTE[s % PALETTE.len()];
            let x = MARGIN + g as f64 * group_w + group_w * 0.1 + s as f64 * bar_w;
            let (y0, y1) = (sy(v.max(0.0)), sy(v.min(0.0)));
            body.push_str(&format!(
                r#"<rect x="{x:.1}" y="{y0:.1}" width="{:.1}" height="{:.1}" fill="{color}"/>
<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="middle">{v:.2}</text>
"#,
                bar_w * 0.9,
                (y1 - y0).abs().max(1.0),
                x + bar_w * 0.45,
                y0 - 4.0
            ));
        }
        body.push_str(&format!(
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>
"#,
            MARGIN + g as f64 * group_w + group_w / 2.0,
            H - MARGIN + 18.0,
            esc(label)
        ));
    }
    for (s, name) in series_names.iter().enumerate() {
        body.push_str(&format!(
            r#"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{}"/>
<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>
"#,
            W - MARGIN - 110.0,
            36.0 + 16.0 * s as f64,
            PALETTE[s % PALETTE.len()],
            W - MARGIN - 96.0,
            45.0 + 16.0 * s as f64,
            esc(name)
        ));
    }
    write_svg(path, &frame(title, &body))
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn axes(x_label: &str, y_label: &str, x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> String {
    format!(
        r#"<line x1="{m}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>
<line x1="{m}" y1="{t}" x2="{m}" y2="{b}" stroke="black"/>
<text x="{cx}" y="{by}" font-family="sans-serif" font-size="12" text-anchor="middle">{xl}</text>
<text x="16" y="{cy}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {cy})">{yl}</text>
<text x="{m}" y="{by}" font-family="sans-serif" font-size="10" text-anchor="middle">{x0:.1}</text>
<text x="{r}" y="{by}" font-family="sans-serif" font-size="10" text-anchor="middle">{x1:.1}</text>
<text x="{ml}" y="{b}" font-family="sans-serif" font-size="10" text-anchor="end">{y0:.2}</text>
<text x="{ml}" y="{t}" font-family="sans-serif" font-size="10" text-anchor="end">{y1:.2}</text>
"#,
        m = MARGIN,
        ml = MARGIN - 4.0,
        r = W - MARGIN,
        t = MARGIN,
        b = H - MARGIN,
        cx = W / 2.0,
        cy = H / 2.0,
        by = H - MARGIN + 30.0,
        xl = esc(x_label),
        yl = esc(y_label),
        x0 = x_min,
        x1 = x_max,
        y0 = y_min,
        y1 = y_max,
    )
}

fn write_svg(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, content)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_render_to_files() {
        let dir = std::env::temp_dir().join(format!("sb_svg_{}", std::process::id()));
        line_chart(
            &dir.join("line.svg"),
            "best so far",
            "round",
            "score",
            &[("bite".into(), vec![(1.0, 5.0), (2.0, 7.0), (3.0, 7.0)])],
        )
        .unwrap();
        heatmap(
            &dir.join("heat.svg"),
            "transfer",
            &["a".into(), "b".into()],
            &["a".into(), "b".into()],
            &[vec![Some(1.0), Some(0.2)], vec![None, Some(1.0)]],
        )
        .unwrap();
        grouped_bars(
            &dir.join("bars.svg"),
            "defense",
            &["before".into(), "after".into()],
            &[
                ("base".into(), vec![5.0, 5.1]),
                ("attacked".into(), vec![7.0, 5.2]),
            ],
        )
        .unwrap();
        for f in ["line.svg", "heat.svg", "bars.svg"] {
            let text = std::fs::read_to_string(dir.join(f)).unwrap();
            assert!(text.starts_with("<svg"));
            assert!(text.ends_with("</svg>\n"));
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
