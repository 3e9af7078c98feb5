//! First variations of perimeter and area, area-constrained stationarity
//! residuals, a finite-difference oracle, and the stationarity classifier.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{compute_metrics, PolygonMetrics};
use crate::perturb::{apply, Family, Move};
use crate::polygon::Polygon;

/// Default threshold for the stationarity flags.
pub const DEFAULT_STAT_TOL: f64 = 1e-8;

/// `ψ(θ) = csc θ + cot θ`, evaluated as `cot(θ/2)`. Strictly decreasing on
/// `(0, 2π)`, negative on reflex angles.
pub fn psi(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < TAU) {
        return Err(Error::Domain(theta));
    }
    Ok(psi_unchecked(theta))
}

pub(crate) fn psi_unchecked(theta: f64) -> f64 {
    1.0 / (0.5 * theta).tan()
}

/// Analytic `(d perimeter/dt, d area/dt)` at `t = 0`.
pub fn first_variation(p: &Polygon, family: Family, i: usize) -> Result<(f64, f64)> {
    check_index(p, i)?;
    Ok(first_variation_from(&compute_metrics(p)?, family, i))
}

pub fn first_variation_from(m: &PolygonMetrics, family: Family, i: usize) -> (f64, f64) {
    first_variation_with(m, family, i, psi_unchecked)
}

fn first_variation_with(
    m: &PolygonMetrics,
    family: Family,
    i: usize,
    psi: fn(f64) -> f64,
) -> (f64, f64) {
    match family {
        Family::Slide => (psi(m.theta(i)) + psi(m.theta(i + 1)), m.side_length[i]),
        Family::Tilt => (
            0.5 * m.side_length[i] * (psi(m.theta(i)) - psi(m.theta(i + 1))),
            0.0,
        ),
        Family::MoveVertex => (
            m.diag_angle_minus[i].cos() - m.diag_angle_plus[i].cos(),
            0.0,
        ),
    }
}

/// Derivative of `perimeter / sqrt(area)` from perimeter/area rates.
fn quotient_rate(perimeter: f64, area: f64, d_per: f64, d_area: f64) -> f64 {
    let sa = area.sqrt();
    (d_per * sa - perimeter * d_area / (2.0 * sa)) / area
}

/// `d/dt (perimeter(P_t) / sqrt(area(P_t)))` at `t = 0`.
pub fn quotient_derivative(p: &Polygon, family: Family, i: usize) -> Result<f64> {
    check_index(p, i)?;
    Ok(quotient_derivative_from(&compute_metrics(p)?, family, i))
}

pub fn quotient_derivative_from(m: &PolygonMetrics, family: Family, i: usize) -> f64 {
    let (dp, da) = first_variation_from(m, family, i);
    quotient_rate(m.perimeter, m.area, dp, da)
}

fn check_index(p: &Polygon, i: usize) -> Result<()> {
    if i >= p.n() {
        return Err(Error::IndexOutOfRange { index: i, n: p.n() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyMax {
    pub slide: f64,
    pub tilt: f64,
    #[serde(rename = "move")]
    pub move_vertex: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub slide_stationary: bool,
    pub tilt_stationary: bool,
    pub move_stationary: bool,
    pub equiangular: bool,
    pub equilateral: bool,
    pub regular: bool,
}

/// Stationarity residuals per side (slide, tilt) and per vertex (move).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub slide: Vec<f64>,
    pub tilt: Vec<f64>,
    #[serde(rename = "move")]
    pub move_vertex: Vec<f64>,
    pub max_abs: FamilyMax,
    pub flags: Flags,
    pub stat_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Regular,
    Equiangular,
    Equilateral,
    SlideStationaryOnly,
    NonStationary,
}

/// Residual vectors in the polygon's own units:
/// `r^S_i = (ψ(θ_i) + ψ(θ_{i+1})) / ℓ_i - per / (2 area)`,
/// `r^T_i = ψ(θ_i) - ψ(θ_{i+1})`, `r^M_i = cos α_i⁻ - cos α_i⁺`.
pub fn raw_residuals(m: &PolygonMetrics) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = m.n();
    let target = m.perimeter / (2.0 * m.area);
    let psi: Vec<f64> = m.interior_angle.iter().map(|&t| psi_unchecked(t)).collect();
    let slide = (0..n)
        .map(|i| (psi[i] + psi[(i + 1) % n]) / m.side_length[i] - target)
        .collect();
    let tilt = (0..n).map(|i| psi[i] - psi[(i + 1) % n]).collect();
    let mv = (0..n)
        .map(|i| m.diag_angle_minus[i].cos() - m.diag_angle_plus[i].cos())
        .collect();
    (slide, tilt, mv)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Residuals of the unit-perimeter copy of `p`, so flags at `stat_tol` do
/// not depend on the polygon's scale. The slide residual scales as
/// 1/length and is rescaled by the perimeter; the other two are
/// scale-invariant.
pub fn residuals(p: &Polygon, stat_tol: f64) -> ResidualReport {
    let m = compute_metrics(p).expect("valid polygon has valid metrics");
    let (mut slide, tilt, move_vertex) = raw_residuals(&m);
    for r in &mut slide {
        *r *= m.perimeter;
    }
    let max_abs = FamilyMax {
        slide: max_abs(&slide),
        tilt: max_abs(&tilt),
        move_vertex: max_abs(&move_vertex),
    };
    let (s, t, mv) = (
        max_abs.slide < stat_tol,
        max_abs.tilt < stat_tol,
        max_abs.move_vertex < stat_tol,
    );
    ResidualReport {
        slide,
        tilt,
        move_vertex,
        max_abs,
        flags: Flags {
            slide_stationary: s,
            tilt_stationary: t,
            move_stationary: mv,
            equiangular: t,
            equilateral: mv,
            regular: t && mv,
        },
        stat_tol,
    }
}

impl ResidualReport {
    /// Either sufficient pair (slide and tilt, or tilt and move) makes the
    /// polygon regular; otherwise the strongest single-family label wins.
    pub fn classification(&self) -> Classification {
        let f = &self.flags;
        if (f.slide_stationary && f.tilt_stationary) || (f.tilt_stationary && f.move_stationary) {
            Classification::Regular
        } else if f.tilt_stationary {
            Classification::Equiangular
        } else if f.move_stationary {
            Classification::Equilateral
        } else if f.slide_stationary {
            Classification::SlideStationaryOnly
        } else {
            Classification::NonStationary
        }
    }

    /// True when one of the two sufficient pairs holds.
    pub fn satisfies_sufficient_pair(&self) -> bool {
        self.classification() == Classification::Regular
    }
}

pub fn classify(p: &Polygon, stat_tol: f64) -> Classification {
    residuals(p, stat_tol).classification()
}

/// Central finite differences of measured perimeter, area and quotient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdDerivative {
    pub d_perimeter: f64,
    pub d_area: f64,
    pub d_quotient: f64,
}

pub fn fd_derivative(p: &Polygon, family: Family, i: usize, h: f64) -> Result<FdDerivative> {
    let plus = apply(p, Move::new(family, i, h))?;
    let minus = apply(p, Move::new(family, i, -h))?;
    let c = |f: fn(&Polygon) -> f64| (f(&plus) - f(&minus)) / (2.0 * h);
    Ok(FdDerivative {
        d_perimeter: c(Polygon::perimeter),
        d_area: c(Polygon::area),
        d_quotient: c(Polygon::quotient),
    })
}

/// Finite-difference step: `rel · diameter` for the length-parametrized
/// families, `rel` radians for Tilt.
pub fn fd_step(p: &Polygon, family: Family, rel: f64) -> f64 {
    match family {
        Family::Tilt => rel,
        Family::Slide | Family::MoveVertex => rel * p.diameter(),
    }
}

/// One row of an analytic-versus-finite-difference comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariationCheck {
    pub family: Family,
    pub index: usize,
    pub h: f64,
    pub analytic: FdDerivative,
    pub numeric: FdDerivative,
    pub max_rel_err: f64,
    pub passed: bool,
}

fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / (1.0 + analytic.abs())
}

/// Compares analytic first variations with central differences for every
/// family and index. With `sabotage_psi` the analytic side uses `-ψ`, which
/// must make the check fail.
pub fn check_variations(
    p: &Polygon,
    rel_h: f64,
    tol: f64,
    sabotage_psi: bool,
) -> Result<Vec<VariationCheck>> {
    let m = compute_metrics(p)?;
    let psi_fn: fn(f64) -> f64 = if sabotage_psi {
        |t| -psi_unchecked(t)
    } else {
        psi_unchecked
    };
    let mut rows = Vec::with_capacity(3 * p.n());
    for family in Family::ALL {
        for i in 0..p.n() {
            let (dp, da) = first_variation_with(&m, family, i, psi_fn);
            let analytic = FdDerivative {
                d_perimeter: dp,
                d_area: da,
                d_quotient: quotient_rate(m.perimeter, m.area, dp, da),
            };
            let h = fd_step(p, family, rel_h);
            let numeric = fd_derivative(p, family, i, h)?;
            let max_rel_err = rel_err(dp, numeric.d_perimeter)
                .max(rel_err(da, numeric.d_area))
                .max(rel_err(analytic.d_quotient, numeric.d_quotient));
            rows.push(VariationCheck {
                family,
                index: i,
                h,
                analytic,
                numeric,
                max_rel_err,
                passed: max_rel_err <= tol,
            });
        }
    }
    Ok(rows)
}
