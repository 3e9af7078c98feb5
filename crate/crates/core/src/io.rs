//! File formats: polygon JSON, residual CSV, flow-trace JSON lines and SVG
//! frames.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::FlowTrace;
use crate::point::Point;
use crate::polygon::Polygon;
use crate::variations::ResidualReport;

pub const CSV_HEADER: &str = "i,r_slide,r_tilt,r_move";

#[derive(Debug, Serialize, Deserialize)]
struct PolygonFile {
    vertices: Vec<[f64; 2]>,
}

/// `{"vertices":[[x,y],...]}` with shortest round-trip number formatting.
pub fn polygon_to_json(p: &Polygon) -> String {
    let f = PolygonFile {
        vertices: p.vertices().iter().map(|&q| q.into()).collect(),
    };
    serde_json::to_string(&f).expect("finite coordinates serialize")
}

/// Parses the polygon JSON format without validating the vertex list.
pub fn vertices_from_json(s: &str) -> Result<Vec<Point>> {
    let f: PolygonFile = serde_json::from_str(s)?;
    Ok(f.vertices.into_iter().map(Point::from).collect())
}

pub fn polygon_from_json(s: &str) -> Result<Polygon> {
    Polygon::new(vertices_from_json(s)?)
}

pub fn write_polygon(path: &Path, p: &Polygon) -> Result<()> {
    std::fs::write(path, polygon_to_json(p) + "\n")?;
    Ok(())
}

/// One row per index; `i` is 1-based.
pub fn residuals_to_csv(r: &ResidualReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for k in 0..r.slide.len() {
        writeln!(
            out,
            "{},{:?},{:?},{:?}",
            k + 1,
            r.slide[k],
            r.tilt[k],
            r.move_vertex[k]
        )
        .unwrap();
    }
    out
}

/// Inverse of [`residuals_to_csv`]: `(slide, tilt, move)` vectors.
pub fn residuals_from_csv(s: &str) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let mut lines = s.lines();
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err(Error::Format("missing residual CSV header".into()));
    }
    let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
    for (row, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(Error::Format(format!(
                "row {}: expected 4 columns",
                row + 1
            )));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("row {}: {e}", row + 1)))
        };
        a.push(num(cols[1])?);
        b.push(num(cols[2])?);
        c.push(num(cols[3])?);
    }
    Ok((a, b, c))
}

/// One JSON object per recorded iterate.
pub fn trace_to_jsonl(trace: &FlowTrace) -> String {
    let mut out = String::new();
    for rec in &trace.iterates {
        out.push_str(&serde_json::to_string(rec).expect("trace records serialize"));
        out.push('\n');
    }
    out
}

/// Static SVG of a vertex list fitted into a 512×512 view box with a 5%
/// margin.
pub fn svg_frame(vertices: &[Point]) -> String {
    const SIZE: f64 = 512.0;
    let (mut lo, mut hi) = (vertices[0], vertices[0]);
    for p in vertices {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
    let margin = 0.05 * SIZE;
    let scale = (SIZE - 2.0 * margin) / span;
    let pts: Vec<String> = vertices
        .iter()
        .map(|p| {
            // flip y so the picture is not mirrored
            let x = margin + (p.x - lo.x) * scale;
            let y = SIZE - margin - (p.y - lo.y) * scale;
            format!("{x:.3},{y:.3}")
        })
        .collect();
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SIZE} {SIZE}\" width=\"{SIZE}\" height=\"{SIZE}\">\n\
         <polygon points=\"{}\" fill=\"#fdd9b5\" stroke=\"#40494d\" stroke-width=\"2\"/>\n</svg>\n",
        pts.join(" ")
    )
}
