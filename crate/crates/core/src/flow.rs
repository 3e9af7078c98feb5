//! Area-constrained perimeter descent over the elementary moves.
//!
//! Each iteration rescales the polygon to unit perimeter, picks the enabled
//! move with the steepest quotient derivative and takes a backtracking step
//! along it. Acceptance is decided on the exact quotient change of the move
//! (see [`crate::perturb::exact_change`]), which stays accurate after the
//! decrease drops below the rounding floor of `Q` itself.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::generate::{generate, Kind};
use crate::metrics::compute_metrics;
use crate::perturb::{admissible_range, apply, exact_change, quotient_change, Family, Move};
use crate::polygon::Polygon;
use crate::similarity::similarity_distance;
use crate::variations::{quotient_derivative_from, residuals, Classification, DEFAULT_STAT_TOL};

/// Trial steps below this (unit-perimeter lengths or radians) count as a
/// stalled line search.
const MIN_STEP: f64 = 1e-15;
/// Fraction of the admissible range a step may use.
const RANGE_USE: f64 = 0.9;
/// Final polygons farther than this from regular while satisfying a
/// sufficient stationarity pair are counterexamples.
pub const COUNTEREXAMPLE_DISTANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub families: Vec<Family>,
    pub step0: f64,
    pub shrink: f64,
    pub armijo_c: f64,
    /// Stop once every enabled quotient derivative is below this.
    pub stat_tol: f64,
    pub max_iters: usize,
    pub record_every: usize,
    /// Store a vertex snapshot with each recorded iterate.
    pub record_polygons: bool,
    /// Tolerance for classifying the final polygon.
    pub classify_tol: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            families: vec![Family::Slide, Family::Tilt],
            step0: 0.1,
            shrink: 0.5,
            armijo_c: 1e-4,
            stat_tol: 1e-9,
            max_iters: 100_000,
            record_every: 1,
            record_polygons: false,
            classify_tol: DEFAULT_STAT_TOL,
        }
    }
}

impl FlowConfig {
    pub fn with_families(families: &[Family]) -> Self {
        Self {
            families: families.to_vec(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParams(what.to_string()));
        if self.families.is_empty() {
            return bad("families must be non-empty");
        }
        let unit = |x: f64| x > 0.0 && x < 1.0;
        if !(self.step0 > 0.0 && self.step0.is_finite()) {
            return bad("step0 must be positive");
        }
        if !unit(self.shrink) || !unit(self.armijo_c) {
            return bad("shrink and armijo_c must lie in (0, 1)");
        }
        if self.stat_tol.is_nan()
            || self.stat_tol <= 0.0
            || self.classify_tol.is_nan()
            || self.classify_tol <= 0.0
        {
            return bad("tolerances must be positive");
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1");
        }
        Ok(())
    }

    fn sorted_families(&self) -> Vec<Family> {
        let mut f = self.families.clone();
        f.sort();
        f.dedup();
        f
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub q: f64,
    /// Largest `|quotient derivative|` per enabled family.
    pub max_derivative: BTreeMap<Family, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub polygon: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FlowOutcome {
    Converged { classification: Classification },
    MaxIters,
    Stalled { reason: String },
}

impl FlowOutcome {
    pub fn is_converged(&self) -> bool {
        matches!(self, FlowOutcome::Converged { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub iterates: Vec<TraceRecord>,
    pub outcome: FlowOutcome,
    /// Number of accepted descent steps.
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    /// Final iterate, normalized to unit perimeter.
    pub polygon: Polygon,
    pub trace: FlowTrace,
    /// `Q` of the start plus the sum of exact accepted decreases.
    pub q_final: f64,
}

struct Candidates {
    /// `(family, index, derivative)` sorted by decreasing `|derivative|`,
    /// ties broken by family order then index.
    ranked: Vec<(Family, usize, f64)>,
    per_family: BTreeMap<Family, f64>,
}

fn rank_moves(p: &Polygon, families: &[Family]) -> Result<(Candidates, crate::PolygonMetrics)> {
    let m = compute_metrics(p).map_err(|e| Error::InvalidStart(e.to_string()))?;
    let mut ranked = Vec::with_capacity(families.len() * p.n());
    let mut per_family = BTreeMap::new();
    for &family in families {
        let mut fmax: f64 = 0.0;
        for i in 0..p.n() {
            let d = quotient_derivative_from(&m, family, i);
            fmax = fmax.max(d.abs());
            ranked.push((family, i, d));
        }
        per_family.insert(family, fmax);
    }
    // stable sort keeps the family/index order among equal magnitudes
    ranked.sort_by(|a, b| b.2.abs().total_cmp(&a.2.abs()));
    Ok((Candidates { ranked, per_family }, m))
}

/// Backtracking search along one move, followed by one quadratic
/// interpolation step. Returns the exact quotient change and the new,
/// renormalized polygon.
fn line_search(
    p: &Polygon,
    m: &crate::PolygonMetrics,
    family: Family,
    index: usize,
    derivative: f64,
    cfg: &FlowConfig,
) -> Option<(f64, Polygon)> {
    let g = derivative.abs();
    let range = admissible_range(p, family, index).ok()?.scaled(RANGE_USE);
    let dir = -derivative.signum();
    let limit = if dir > 0.0 { range.hi } else { -range.lo };
    let dq_at = |len: f64| {
        quotient_change(
            m.perimeter,
            m.area,
            exact_change(m, Move::new(family, index, dir * len)),
        )
    };
    let sufficient = |len: f64, dq: f64| dq <= -cfg.armijo_c * len * g;
    let build = |len: f64| {
        apply(p, Move::new(family, index, dir * len))
            .and_then(|q| q.normalized())
            .ok()
    };

    let mut step = cfg.step0;
    let (len, dq, next) = loop {
        let len = step.min(limit);
        if len < MIN_STEP {
            return None;
        }
        let dq = dq_at(len);
        if sufficient(len, dq) {
            if let Some(next) = build(len) {
                break (len, dq, next);
            }
        }
        step = len * cfg.shrink;
    };

    // Minimizer of the quadratic through Q(0), Q'(0) and Q(len).
    let curvature = (dq + g * len) / (len * len);
    if curvature > 0.0 {
        let cand = g / (2.0 * curvature);
        if cand < limit && cand != len {
            let dq2 = dq_at(cand);
            if dq2 < dq && sufficient(cand, dq2) {
                if let Some(p2) = build(cand) {
                    return Some((dq2, p2));
                }
            }
        }
    }
    Some((dq, next))
}

/// Runs the descent from `start` until stationarity, stalling, or the
/// iteration cap.
pub fn run_flow(start: &Polygon, cfg: &FlowConfig) -> Result<FlowResult> {
    cfg.validate()?;
    let families = cfg.sorted_families();
    let mut p = start
        .normalized()
        .map_err(|e| Error::InvalidStart(e.to_string()))?;
    let mut q = p.quotient();
    let mut iterates = Vec::new();
    let mut steps = 0usize;
    let record = |iterates: &mut Vec<TraceRecord>, iteration, q, c: &Candidates, p: &Polygon| {
        iterates.push(TraceRecord {
            iteration,
            q,
            max_derivative: c.per_family.clone(),
            polygon: cfg
                .record_polygons
                .then(|| p.vertices().iter().map(|&v| v.into()).collect()),
        });
    };

    let outcome = loop {
        let (cands, m) = rank_moves(&p, &families)?;
        let g = cands.ranked[0].2.abs();
        let finished = g < cfg.stat_tol || steps >= cfg.max_iters;
        if steps.is_multiple_of(cfg.record_every) || finished {
            record(&mut iterates, steps, q, &cands, &p);
        }
        if g < cfg.stat_tol {
            let classification = residuals(&p, cfg.classify_tol).classification();
            break FlowOutcome::Converged { classification };
        }
        if steps >= cfg.max_iters {
            break FlowOutcome::MaxIters;
        }

        // The steepest move normally succeeds; the rest are fallbacks for a
        // move whose admissible range has pinched shut.
        let taken = cands
            .ranked
            .iter()
            .take_while(|c| c.2.abs() >= cfg.stat_tol)
            .find_map(|&(family, index, d)| line_search(&p, &m, family, index, d, cfg));
        let Some((dq, next)) = taken else {
            let (family, index, _) = cands.ranked[0];
            break FlowOutcome::Stalled {
                reason: format!("line search underflow on every move, steepest {family} {index} (|dQ/dt| = {g:e})"),
            };
        };

        p = next;
        q += dq;
        steps += 1;
    };

    Ok(FlowResult {
        polygon: p,
        trace: FlowTrace {
            iterates,
            outcome,
            steps,
        },
        q_final: q,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub outcome: FlowOutcome,
    pub steps: usize,
    pub q_initial: f64,
    pub q_final: f64,
    pub similarity_distance: f64,
    /// Final Q never exceeded the start and recorded Q never increased.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub seed: u64,
    pub vertices: Vec<[f64; 2]>,
    pub similarity_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremSummary {
    pub n: usize,
    pub seeds: u64,
    pub families: Vec<Family>,
    pub converged: usize,
    pub stalled: usize,
    pub max_iters: usize,
    pub convergence_fraction: f64,
    /// Largest similarity distance to the regular polygon among converged runs.
    pub max_similarity_distance: f64,
    pub q_regular: f64,
    pub counterexamples: Vec<Counterexample>,
    pub runs: Vec<RunSummary>,
}

/// Runs the flow from `num_seeds` random convex N-gons (seeds `0..num_seeds`)
/// and checks that every final polygon satisfying a sufficient stationarity
/// pair is regular.
pub fn verify_theorem(
    n: usize,
    num_seeds: u64,
    cfg: &FlowConfig,
    exec: Exec,
) -> Result<TheoremSummary> {
    if n < 3 {
        return Err(Error::InvalidParams(format!("need n >= 3, got {n}")));
    }
    cfg.validate()?;
    let regular = generate(&Kind::Regular { n, radius: 1.0 })?;
    let runs: Vec<Result<(RunSummary, Option<Counterexample>)>> =
        exec.map_seeds(0..num_seeds, |seed| {
            let start = generate(&Kind::RandomConvex { n, seed })?;
            let res = run_flow(&start, cfg)?;
            let distance = similarity_distance(&res.polygon, &regular)?;
            let q_initial = start.quotient();
            let monotone =
                res.trace.iterates.windows(2).all(|w| w[1].q <= w[0].q) && res.q_final <= q_initial;
            let report = residuals(&res.polygon, cfg.classify_tol);
            let counter = (report.satisfies_sufficient_pair()
                && distance > COUNTEREXAMPLE_DISTANCE)
                .then(|| Counterexample {
                    seed,
                    vertices: res.polygon.vertices().iter().map(|&v| v.into()).collect(),
                    similarity_distance: distance,
                });
            Ok((
                RunSummary {
                    seed,
                    outcome: res.trace.outcome,
                    steps: res.trace.steps,
                    q_initial,
                    q_final: res.q_final,
                    similarity_distance: distance,
                    monotone,
                },
                counter,
            ))
        });

    let mut summary = TheoremSummary {
        n,
        seeds: num_seeds,
        families: cfg.sorted_families(),
        converged: 0,
        stalled: 0,
        max_iters: 0,
        convergence_fraction: 0.0,
        max_similarity_distance: 0.0,
        q_regular: regular.quotient(),
        counterexamples: Vec::new(),
        runs: Vec::with_capacity(num_seeds as usize),
    };
    for r in runs {
        let (run, counter) = r?;
        match run.outcome {
            FlowOutcome::Converged { .. } => {
                summary.converged += 1;
                summary.max_similarity_distance =
                    summary.max_similarity_distance.max(run.similarity_distance);
            }
            FlowOutcome::Stalled { .. } => summary.stalled += 1,
            FlowOutcome::MaxIters => summary.max_iters += 1,
        }
        summary.counterexamples.extend(counter);
        summary.runs.push(run);
    }
    if num_seeds > 0 {
        summary.convergence_fraction = summary.converged as f64 / num_seeds as f64;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_octagon_is_a_fixed_point() {
        let p = generate(&Kind::Regular { n: 8, radius: 3.0 }).unwrap();
        let res = run_flow(&p, &FlowConfig::default()).unwrap();
        assert_eq!(res.trace.steps, 0);
        assert!(matches!(
            res.trace.outcome,
            FlowOutcome::Converged {
                classification: Classification::Regular
            }
        ));
        assert!(similarity_distance(&res.polygon, &p).unwrap() < 1e-10);
    }

    #[test]
    fn rectangle_flows_to_square() {
        let r = generate(&Kind::Rectangle { a: 1.0, b: 2.0 }).unwrap();
        let res = run_flow(&r, &FlowConfig::default()).unwrap();
        assert!(res.trace.outcome.is_converged(), "{:?}", res.trace.outcome);
        let sq = generate(&Kind::Rectangle { a: 1.0, b: 1.0 }).unwrap();
        assert!(similarity_distance(&res.polygon, &sq).unwrap() < 1e-6);
        assert!((res.polygon.quotient() - 4.0).abs() < 1e-8);
        assert!(res.trace.iterates.windows(2).all(|w| w[1].q < w[0].q));
    }

    #[test]
    fn deterministic_traces() {
        let p = generate(&Kind::RandomConvex { n: 5, seed: 8 }).unwrap();
        let a = run_flow(&p, &FlowConfig::default()).unwrap();
        let b = run_flow(&p, &FlowConfig::default()).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.polygon, b.polygon);
    }

    #[test]
    fn config_validation() {
        assert!(FlowConfig::with_families(&[]).validate().is_err());
        assert!(FlowConfig {
            shrink: 1.0,
            ..FlowConfig::default()
        }
        .validate()
        .is_err());
        assert!(FlowConfig {
            record_every: 0,
            ..FlowConfig::default()
        }
        .validate()
        .is_err());
        assert!(FlowConfig::default().validate().is_ok());
    }

    #[test]
    fn verify_rejects_small_n() {
        assert!(verify_theorem(2, 1, &FlowConfig::default(), Exec::Sequential).is_err());
    }
}
