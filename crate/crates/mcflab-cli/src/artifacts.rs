//! Artifact writers: steps.csv, report.json, manifest.json and SVG plots.

use mcflab::{FlowTrajectory, Quantity};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Fixed column prefix; accumulator columns follow in registration order.
pub const CSV_HEADER_PREFIX: &str = "step,t,dt,max_A2,max_H2,min_kappa,min_H,area";

pub fn csv_header(pairs: &[(Quantity, f64)]) -> String {
    let mut header = CSV_HEADER_PREFIX.to_string();
    for (q, alpha) in pairs {
        write!(header, ",acc_{}_{}", q.label(), alpha).unwrap();
    }
    header
}

/// Serialize every step record; floats use the shortest round-trip form, so
/// identical runs produce identical bytes.
pub fn render_steps_csv(traj: &FlowTrajectory) -> String {
    let mut out = csv_header(traj.accumulator.pairs());
    out.push('\n');
    for rec in &traj.records {
        write!(
            out,
            "{},{},{},{},{},{},{},{}",
            rec.step, rec.t, rec.dt, rec.max_a2, rec.max_h2, rec.min_kappa, rec.min_h, rec.area
        )
        .unwrap();
        for v in &rec.acc {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest {
        write!(hex, "{b:02x}").unwrap();
    }
    hex
}

#[derive(Serialize)]
pub struct Manifest {
    pub config: serde_json::Value,
    pub artifacts: Vec<String>,
    pub stop_reason: mcflab::StopReason,
    pub duration_seconds: f64,
    pub tool_version: &'static str,
    pub csv_sha256: String,
}

/// One polyline per labelled series, linear or log10 y-axis.
pub fn render_svg(title: &str, series: &[(String, Vec<(f64, f64)>)], log_y: bool) -> String {
    let (width, height) = (640.0, 480.0);
    let margin = 50.0;
    let mut pts: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for (label, data) in series {
        let mapped: Vec<(f64, f64)> = data
            .iter()
            .filter_map(|&(x, y)| {
                let y = if log_y {
                    if y > 0.0 {
                        y.log10()
                    } else {
                        return None;
                    }
                } else {
                    y
                };
                Some((x, y))
            })
            .collect();
        for &(x, y) in &mapped {
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            y_lo = y_lo.min(y);
            y_hi = y_hi.max(y);
        }
        pts.push((label.clone(), mapped));
    }
    if !x_lo.is_finite() {
        x_lo = 0.0;
        x_hi = 1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    if x_hi - x_lo < 1e-300 {
        x_hi = x_lo + 1.0;
    }
    if y_hi - y_lo < 1e-300 {
        y_hi = y_lo + 1.0;
    }
    let sx = |x: f64| margin + (x - x_lo) / (x_hi - x_lo) * (width - 2.0 * margin);
    let sy = |y: f64| height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2.0 * margin);

    let mut svg = String::new();
    write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    )
    .unwrap();
    write!(svg, "<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n").unwrap();
    write!(
        svg,
        "<text x=\"{}\" y=\"24\" font-family=\"monospace\" font-size=\"14\">{}</text>\n",
        margin,
        xml_escape(title)
    )
    .unwrap();
    // axes
    write!(
        svg,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = margin,
        b = height - margin,
        r = width - margin,
        t = margin
    )
    .unwrap();
    let ylabel = if log_y { "log10" } else { "" };
    write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\">{x_lo:.3e}..{x_hi:.3e} t; {ylabel} {y_lo:.3e}..{y_hi:.3e}</text>\n",
        margin,
        height - margin / 3.0
    )
    .unwrap();
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    for (i, (label, data)) in pts.iter().enumerate() {
        let color = palette[i % palette.len()];
        if data.is_empty() {
            continue;
        }
        let step = (data.len() / 2000).max(1);
        let mut coords = String::new();
        for (j, &(x, y)) in data.iter().enumerate() {
            if j % step == 0 || j + 1 == data.len() {
                write!(coords, "{:.3},{:.3} ", sx(x), sy(y)).unwrap();
            }
        }
        write!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\" points=\"{}\"/>\n",
            coords.trim_end()
        )
        .unwrap();
        write!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" fill=\"{color}\">{}</text>\n",
            width - margin - 150.0,
            margin + 14.0 * (i + 1) as f64,
            xml_escape(label)
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write_plots(dir: &Path, traj: &FlowTrajectory) -> std::io::Result<Vec<String>> {
    let plots = dir.join("plots");
    fs::create_dir_all(&plots)?;

    let radius: Vec<(f64, f64)> = traj
        .frames
        .iter()
        .map(|tf| (tf.t, tf.immersion.mean_radius()))
        .collect();
    fs::write(
        plots.join("radius_vs_time.svg"),
        render_svg("radius vs time", &[("mean radius".to_string(), radius)], false),
    )?;

    let mut series = Vec::new();
    for (i, (q, alpha)) in traj.accumulator.pairs().iter().enumerate() {
        let data: Vec<(f64, f64)> = traj.records.iter().map(|r| (r.t, r.acc[i])).collect();
        series.push((format!("acc_{}_{}", q.label(), alpha), data));
    }
    if series.is_empty() {
        let area: Vec<(f64, f64)> = traj.records.iter().map(|r| (r.t, r.area)).collect();
        series.push(("area".to_string(), area));
    }
    fs::write(
        plots.join("accumulators.svg"),
        render_svg("space-time norm accumulators (log scale)", &series, true),
    )?;
    Ok(vec![
        "plots/radius_vs_time.svg".to_string(),
        "plots/accumulators.svg".to_string(),
    ])
}
