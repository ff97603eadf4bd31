//! Hand-rolled SVG line charts for the benchmark sweeps; no plotting
//! dependency. Output is deterministic for fixed input: 800x500 viewBox,
//! one polyline plus markers per series.
//!
//! Time series plot median nanoseconds against n (linear axis) or against
//! alpha (log2 axis, chosen automatically when alpha varies); an optional
//! size series plots ciphertext file bytes against n in a second panel.

use anyhow::{bail, Result};
use fhipe::wire::BenchRecord;
use std::collections::BTreeMap;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Panel {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn polyline(points: &[(f64, f64)], color: &str) -> String {
    let mut s = String::from("<polyline fill=\"none\" stroke=\"");
    s.push_str(color);
    s.push_str("\" stroke-width=\"2\" points=\"");
    for (x, y) in points {
        s.push_str(&format!("{},{} ", fmt(*x), fmt(*y)));
    }
    s.push_str("\"/>\n");
    for (x, y) in points {
        s.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>\n",
            fmt(*x),
            fmt(*y),
            color
        ));
    }
    s
}

fn draw_series(
    out: &mut String,
    panel: &Panel,
    series: &BTreeMap<String, Vec<(f64, f64)>>,
    x_label: &str,
    y_label: &str,
) {
    let xs: Vec<f64> = series.values().flatten().map(|p| p.0).collect();
    let ys: Vec<f64> = series.values().flatten().map(|p| p.1).collect();
    let (xmin, xmax) = (
        xs.iter().cloned().fold(f64::INFINITY, f64::min),
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let (ymin, ymax) = (0.0, ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let xspan = if xmax > xmin { xmax - xmin } else { 1.0 };
    let yspan = if ymax > ymin { ymax - ymin } else { 1.0 };

    let map = |x: f64, y: f64| -> (f64, f64) {
        (
            panel.x0 + (x - xmin) / xspan * panel.w,
            panel.y0 + panel.h - (y - ymin) / yspan * panel.h,
        )
    };

    // axes
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\"/>\n",
        fmt(panel.x0),
        fmt(panel.y0 + panel.h),
        fmt(panel.x0 + panel.w),
        fmt(panel.y0 + panel.h)
    ));
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\"/>\n",
        fmt(panel.x0),
        fmt(panel.y0),
        fmt(panel.x0),
        fmt(panel.y0 + panel.h)
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
        fmt(panel.x0 + panel.w / 2.0),
        fmt(panel.y0 + panel.h + 32.0),
        x_label
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">{}</text>\n",
        fmt(panel.x0 - 45.0),
        fmt(panel.y0 + panel.h / 2.0),
        fmt(panel.x0 - 45.0),
        fmt(panel.y0 + panel.h / 2.0),
        y_label
    ));
    // x tick labels at data positions
    let mut ticks: Vec<f64> = xs.clone();
    ticks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ticks.dedup();
    for t in &ticks {
        let (px, _) = map(*t, 0.0);
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
            fmt(px),
            fmt(panel.y0 + panel.h + 14.0),
            fmt(*t)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
        fmt(panel.x0 - 6.0),
        fmt(panel.y0 + 10.0),
        fmt(ymax)
    ));

    for (i, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mapped: Vec<(f64, f64)> = pts.iter().map(|(x, y)| map(*x, *y)).collect();
        out.push_str(&polyline(&mapped, color));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{}\">{}</text>\n",
            fmt(panel.x0 + panel.w - 150.0),
            fmt(panel.y0 + 14.0 + 14.0 * i as f64),
            color,
            name
        ));
    }
}

/// Renders grouped bench records (and an optional ciphertext-size series)
/// into a fixed 800x500 chart. Every series needs at least two points.
pub fn render_scaling_svg(
    records: &[BenchRecord],
    size_series: &[(u32, u64)],
    note: &str,
) -> Result<String> {
    // group time series by (op, strategy); x axis is alpha when it varies,
    // n otherwise
    let alphas: Vec<u64> = records.iter().map(|r| r.alpha).collect();
    let alpha_varies = alphas.iter().any(|&a| a != alphas.first().copied().unwrap_or(0));

    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in records {
        let key = if r.strategy == "-" {
            r.op.clone()
        } else {
            format!("{} [{}]", r.op, r.strategy)
        };
        let x = if alpha_varies {
            (r.alpha as f64).log2()
        } else {
            r.n as f64
        };
        series.entry(key).or_default().push((x, r.median_ns as f64 / 1e6));
    }
    for pts in series.values_mut() {
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    if series.is_empty() && size_series.is_empty() {
        bail!("nothing to plot");
    }
    for (name, pts) in &series {
        if pts.len() < 2 {
            bail!("series {name:?} has fewer than 2 points");
        }
    }
    if !size_series.is_empty() && size_series.len() < 2 {
        bail!("ciphertext-size series has fewer than 2 points");
    }

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if !note.is_empty() {
        out.push_str(&format!(
            "<text x=\"400\" y=\"18\" font-size=\"13\" text-anchor=\"middle\">{note}</text>\n"
        ));
    }

    let two_panels = !series.is_empty() && !size_series.is_empty();
    if !series.is_empty() {
        let panel = if two_panels {
            Panel { x0: 70.0, y0: 40.0, w: 690.0, h: 170.0 }
        } else {
            Panel { x0: 70.0, y0: 40.0, w: 690.0, h: 400.0 }
        };
        let x_label = if alpha_varies { "log2(alpha)" } else { "n" };
        draw_series(&mut out, &panel, &series, x_label, "median ms");
    }
    if !size_series.is_empty() {
        let panel = if two_panels {
            Panel { x0: 70.0, y0: 280.0, w: 690.0, h: 170.0 }
        } else {
            Panel { x0: 70.0, y0: 40.0, w: 690.0, h: 400.0 }
        };
        let mut sizes: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        sizes.insert(
            "ciphertext bytes".into(),
            size_series.iter().map(|(n, b)| (*n as f64, *b as f64)).collect(),
        );
        draw_series(&mut out, &panel, &sizes, "n", "file bytes");
    }
    out.push_str("</svg>\n");
    Ok(out)
}
