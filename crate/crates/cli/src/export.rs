use std::fmt::Write as _;
use std::io::Write;

use choreo_core::algebra::point::{real_part_projective, CVec3};
use choreo_core::algebra::ConjClass;
use choreo_core::topology::CurveTopology;
use choreo_core::tracking::DivisorPath;
use serde::Serialize;

use crate::CliError;

#[derive(Serialize)]
struct Row {
    t: f64,
    point_id: usize,
    class: String,
    x_re: f64,
    x_im: f64,
    y_re: f64,
    y_im: f64,
    z_re: f64,
    z_im: f64,
    component_id: Option<usize>,
    angle_lift: Option<f64>,
}

/// One row per grid value and tracked point.
pub fn write_trajectory_csv<W: Write>(path: &DivisorPath, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for (k, &t) in path.grid.iter().enumerate() {
        for (j, p) in path.points.iter().enumerate() {
            let q = p.positions[k];
            let class = match p.class {
                ConjClass::Real => "real".to_string(),
                ConjClass::Paired { partner } => format!("pair:{partner}"),
            };
            w.serialize(Row {
                t,
                point_id: j,
                class,
                x_re: q[0].re,
                x_im: q[0].im,
                y_re: q[1].re,
                y_im: q[1].im,
                z_re: q[2].re,
                z_im: q[2].im,
                component_id: p.component,
                angle_lift: p.lift.get(k).copied(),
            })
            .map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

const SIZE: f64 = 600.0;
const SCALE: f64 = 120.0;
const LIMIT: f64 = 2.4;
const COLORS: [&str; 6] = ["#1f5fa8", "#b8401c", "#2e8b3a", "#7a3e9d", "#b08a12", "#0f8585"];

fn screen(x: f64, y: f64) -> (f64, f64) {
    (SIZE / 2.0 + SCALE * x, SIZE / 2.0 - SCALE * y)
}

fn affine_real(p: &[f64; 3]) -> Option<(f64, f64)> {
    if p[2].abs() < 1e-9 {
        return None;
    }
    let (x, y) = (p[0] / p[2], p[1] / p[2]);
    (x.abs() <= LIMIT && y.abs() <= LIMIT).then_some((x, y))
}

/// Splits a sequence of chart points into drawable runs.
fn runs(points: impl Iterator<Item = Option<(f64, f64)>>) -> Vec<Vec<(f64, f64)>> {
    let mut out: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut cur: Vec<(f64, f64)> = Vec::new();
    for p in points {
        match p {
            Some(q) if cur.last().is_none_or(|l| (l.0 - q.0).hypot(l.1 - q.1) < 0.5) => cur.push(q),
            Some(q) => {
                out.push(std::mem::take(&mut cur));
                cur.push(q);
            }
            None => out.push(std::mem::take(&mut cur)),
        }
    }
    out.push(cur);
    out.retain(|r| r.len() > 1);
    out
}

fn polyline(svg: &mut String, run: &[(f64, f64)], style: &str) {
    let pts: Vec<String> = run
        .iter()
        .map(|&(x, y)| {
            let (a, b) = screen(x, y);
            format!("{a:.2},{b:.2}")
        })
        .collect();
    let _ = writeln!(svg, r#"<polyline fill="none" {style} points="{}"/>"#, pts.join(" "));
}

fn arrowhead(svg: &mut String, run: &[(f64, f64)], color: &str) {
    let m = run.len() / 2;
    let (a, b) = (run[m - 1], run[m]);
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len = dx.hypot(dy);
    if len == 0.0 {
        return;
    }
    let (ux, uy) = (dx / len, dy / len);
    let tip = screen(b.0, b.1);
    // screen y points down
    let (sx, sy) = (ux, -uy);
    let back = (tip.0 - 9.0 * sx, tip.1 - 9.0 * sy);
    let left = (back.0 - 4.0 * sy, back.1 + 4.0 * sx);
    let right = (back.0 + 4.0 * sy, back.1 - 4.0 * sx);
    let _ = writeln!(
        svg,
        r#"<polygon fill="{color}" points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}"/>"#,
        tip.0, tip.1, left.0, left.1, right.0, right.1
    );
}

fn complex_affine_re(p: &CVec3) -> Option<(f64, f64)> {
    if p[2].norm() < 1e-9 {
        return None;
    }
    let (x, y) = ((p[0] / p[2]).re, (p[1] / p[2]).re);
    (x.abs() <= LIMIT && y.abs() <= LIMIT).then_some((x, y))
}

/// SVG of the chart `z = 1` with the real locus, start divisor and trajectories.
pub fn export_plot<W: Write>(path: Option<&DivisorPath>, topo: &CurveTopology, mut out: W) -> Result<(), CliError> {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (ox, oy) = screen(0.0, 0.0);
    let _ = writeln!(svg, r##"<path stroke="#cccccc" stroke-width="0.5" d="M0,{oy:.2} H{SIZE} M{ox:.2},0 V{SIZE}"/>"##);
    for comp in &topo.components {
        let color = "#444444";
        let mut pts: Vec<Option<(f64, f64)>> = comp.vertices().iter().map(affine_real).collect();
        pts.push(pts[0]);
        for run in runs(pts.into_iter()) {
            polyline(&mut svg, &run, &format!(r#"stroke="{color}" stroke-width="1.5""#));
        }
    }
    if let Some(path) = path {
        for (j, p) in path.points.iter().enumerate() {
            let color = COLORS[j % COLORS.len()];
            if p.is_real() {
                let pts = p.positions.iter().map(|q| affine_real(&real_part_projective(q)));
                for run in runs(pts) {
                    polyline(&mut svg, &run, &format!(r#"stroke="{color}" stroke-width="2.5" stroke-opacity="0.7""#));
                    arrowhead(&mut svg, &run, color);
                }
                if let Some((x, y)) = affine_real(&real_part_projective(&p.positions[0])) {
                    let (a, b) = screen(x, y);
                    let _ = writeln!(svg, r#"<circle cx="{a:.2}" cy="{b:.2}" r="4" fill="{color}"/>"#);
                }
            } else {
                let pts = p.positions.iter().map(complex_affine_re);
                for run in runs(pts) {
                    polyline(&mut svg, &run, r##"stroke="#999999" stroke-width="1" stroke-dasharray="4 3""##);
                }
            }
        }
    }
    svg.push_str("</svg>\n");
    out.write_all(svg.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
}
