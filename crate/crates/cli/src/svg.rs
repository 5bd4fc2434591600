//! Minimal SVG charts: polyline plots and a heatmap.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 55.0;
const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

fn bounds<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w() / 2.0,
        escape(title)
    );
}

fn plot_w() -> f64 {
    WIDTH - LEFT - RIGHT
}

fn plot_h() -> f64 {
    HEIGHT - TOP - BOTTOM
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(out: &mut String, (x0, x1): (f64, f64), (y0, y1): (f64, f64), xlabel: &str, ylabel: &str) {
    let (w, h) = (plot_w(), plot_h());
    let _ = writeln!(out, r#"<rect x="{LEFT}" y="{TOP}" width="{w}" height="{h}" fill="none" stroke="black"/>"#);
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let x = LEFT + f * w;
        let y = TOP + h - f * h;
        let _ = writeln!(out, r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="black"/>"#, TOP + h, TOP + h + 5.0);
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + h + 18.0,
            tick(x0 + f * (x1 - x0))
        );
        let _ = writeln!(out, r#"<line x1="{}" y1="{y}" x2="{LEFT}" y2="{y}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            y + 4.0,
            tick(y0 + f * (y1 - y0))
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + w / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        TOP + h / 2.0,
        TOP + h / 2.0,
        escape(ylabel)
    );
}

/// Line chart of one or more series sharing the axes.
pub fn line_chart(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let xr = bounds(series.iter().flat_map(|s| s.x.iter()));
    let yr = bounds(series.iter().flat_map(|s| s.y.iter()));
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, xr, yr, xlabel, ylabel);
    let (w, h) = (plot_w(), plot_h());
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> =
            s.x.iter()
                .zip(s.y)
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(x, y)| {
                    let px = LEFT + (x - xr.0) / (xr.1 - xr.0) * w;
                    let py = TOP + h - (y - yr.0) / (yr.1 - yr.0) * h;
                    format!("{px:.2},{py:.2}")
                })
                .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 12.0 + 20.0 * i as f64;
        let lx = LEFT + w + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 30.0, ly + 4.0, escape(s.label));
    }
    out.push_str("</svg>\n");
    out
}

fn shade(f: f64) -> String {
    // dark blue to yellow
    let (a, b) = ([0x2c, 0x1e, 0x6e], [0xf5, 0xd9, 0x2f]);
    let c: Vec<String> = a
        .iter()
        .zip(b)
        .map(|(&a, b)| format!("{:02x}", (a as f64 + (b as f64 - a as f64) * f.clamp(0.0, 1.0)).round() as u8))
        .collect();
    format!("#{}", c.concat())
}

/// Heatmap of `values[row][col]`; rows run along x, columns along y.
pub fn heatmap(title: &str, xlabel: &str, ylabel: &str, xs: &[f64], ys: &[f64], values: &[Vec<f64>]) -> String {
    let (lo, hi) = bounds(values.iter().flatten());
    let mut out = String::new();
    header(&mut out, title);
    let (w, h) = (plot_w(), plot_h());
    let cw = w / xs.len().max(1) as f64;
    let ch = h / ys.len().max(1) as f64;
    for (i, row) in values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let x = LEFT + i as f64 * cw;
            let y = TOP + h - (j + 1) as f64 * ch;
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"><title>{v}</title></rect>"#,
                cw + 0.5,
                ch + 0.5,
                shade((v - lo) / (hi - lo))
            );
        }
    }
    let _ = writeln!(out, r#"<rect x="{LEFT}" y="{TOP}" width="{w}" height="{h}" fill="none" stroke="black"/>"#);
    for (i, x) in xs.iter().enumerate() {
        let px = LEFT + (i as f64 + 0.5) * cw;
        let _ = writeln!(out, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#, TOP + h + 18.0, tick(*x));
    }
    for (j, y) in ys.iter().enumerate() {
        let py = TOP + h - (j as f64 + 0.5) * ch;
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 8.0, py + 4.0, tick(*y));
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + w / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        TOP + h / 2.0,
        TOP + h / 2.0,
        escape(ylabel)
    );
    let lx = LEFT + w + 20.0;
    for k in 0..=10 {
        let f = k as f64 / 10.0;
        let y = TOP + h - (k + 1) as f64 * h / 11.0;
        let _ = writeln!(
            out,
            r#"<rect x="{lx}" y="{y:.2}" width="20" height="{:.2}" fill="{}"/>"#,
            h / 11.0 + 0.5,
            shade(f)
        );
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, TOP + 12.0, tick(hi));
    let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, TOP + h, tick(lo));
    out.push_str("</svg>\n");
    out
}
