use crate::error::{Error, Result};
use crate::metrics::compute_metrics;
use crate::polygon::Polygon;

/// Similarity-invariant feature sequence: `(ℓ_i / perimeter, θ_i)` per index.
fn features(p: &Polygon) -> Vec<(f64, f64)> {
    let m = compute_metrics(p).expect("valid polygon has valid metrics");
    m.side_length
        .iter()
        .zip(&m.interior_angle)
        .map(|(&l, &t)| (l / m.perimeter, t))
        .collect()
}

fn min_shift_gap(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let n = a.len();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|j| {
                    let (la, ta) = a[j];
                    let (lb, tb) = b[(j + k) % n];
                    (la - lb).abs().max((ta - tb).abs())
                })
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Max-norm gap between normalized side-length and angle sequences,
/// minimized over cyclic relabelings and reflection. Zero iff `p` and `q`
/// are similar.
pub fn similarity_distance(p: &Polygon, q: &Polygon) -> Result<f64> {
    if p.n() != q.n() {
        return Err(Error::MismatchedN(p.n(), q.n()));
    }
    let fp = features(p);
    let direct = min_shift_gap(&fp, &features(q));
    let mirrored = min_shift_gap(&fp, &features(&q.mirrored()));
    Ok(direct.min(mirrored))
}
