//! Proximity, counting and characteristic functions, and growth estimates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::ComplexPoint;
use crate::divisor::{merge_tolerance, Divisor};
use crate::error::{invalid, NevError, Result};
use crate::fit::fit_slope;
use crate::model::FunctionModel;
use crate::quadrature::{circle_mean, DEFAULT_MAX_NODES};

pub const DEFAULT_TOL: f64 = 1e-8;

/// Candidate singularities closer than this fraction of `r` to the circle
/// become panel breakpoints.
pub const BREAKPOINT_BAND: f64 = 0.05;

/// Radius nudge in units of the merge tolerance.
pub const NUDGE_FACTOR: f64 = 10.0;

/// Initial uniform panels for circle means: `4 r / gap`, clamped to
/// `[16, 128]`, where `gap` is the distance from the circle to the nearest
/// zero or pole outside the breakpoint band.
const UNIFORM_PANELS_PER_ARC: f64 = 4.0;
const MIN_UNIFORM_PANELS: f64 = 16.0;
const MAX_UNIFORM_PANELS: f64 = 128.0;

/// A functional value in natural-log units. `radius` is the radius actually
/// used, which differs from the request only after a nudge off a pole.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NevanlinnaValue {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub nodes_used: usize,
    pub radius: f64,
}

impl NevanlinnaValue {
    pub fn exact(value: f64, radius: f64) -> NevanlinnaValue {
        NevanlinnaValue {
            value,
            abs_error_estimate: 0.0,
            nodes_used: 0,
            radius,
        }
    }

    pub fn plus(self, other: NevanlinnaValue) -> NevanlinnaValue {
        NevanlinnaValue {
            value: self.value + other.value,
            abs_error_estimate: self.abs_error_estimate + other.abs_error_estimate,
            nodes_used: self.nodes_used + other.nodes_used,
            radius: self.radius,
        }
    }

    pub fn was_nudged(&self, requested: f64) -> bool {
        self.radius != requested
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Poles,
    Zeros,
}

/// Geometric radii `r0 * ratio^k`, `k < count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusGrid {
    pub r0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for RadiusGrid {
    /// Twelve radii from 2 to 100.
    fn default() -> Self {
        RadiusGrid {
            r0: 2.0,
            ratio: 50f64.powf(1.0 / 11.0),
            count: 12,
        }
    }
}

impl RadiusGrid {
    pub fn new(r0: f64, ratio: f64, count: usize) -> Result<RadiusGrid> {
        let grid = RadiusGrid { r0, ratio, count };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid with `count` radii from `lo` to `hi` inclusive.
    pub fn spanning(lo: f64, hi: f64, count: usize) -> Result<RadiusGrid> {
        if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) || count < 2 {
            return invalid(format!("bad radius range {lo}:{hi} with {count} points"));
        }
        Ok(RadiusGrid {
            r0: lo,
            ratio: (hi / lo).powf(1.0 / (count - 1) as f64),
            count,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return invalid(format!("grid r0 must be positive, got {}", self.r0));
        }
        if !(self.ratio > 1.0 && self.ratio.is_finite()) {
            return invalid(format!("grid ratio must exceed 1, got {}", self.ratio));
        }
        if self.count < 4 {
            return invalid(format!("grid needs at least 4 radii, got {}", self.count));
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.count)
            .map(|k| self.r0 * self.ratio.powi(k as i32))
            .collect()
    }

    /// Radii moved outward off any of the given moduli.
    pub fn nudged_radii(&self, moduli: &[f64]) -> Vec<f64> {
        self.radii().into_iter().map(|r| nudge_off(r, moduli)).collect()
    }

    pub fn largest(&self) -> f64 {
        self.r0 * self.ratio.powi(self.count as i32 - 1)
    }

    /// Index of the first radius of the upper half.
    pub fn upper_start(&self) -> usize {
        self.count / 2
    }

    /// Log measure attributed to each radius.
    pub fn cell_log_measure(&self) -> f64 {
        self.ratio.ln()
    }

    pub fn total_log_measure(&self) -> f64 {
        self.cell_log_measure() * self.count as f64
    }
}

fn radius_tolerance(r: f64) -> f64 {
    merge_tolerance(ComplexPoint::new(r, 0.0))
}

/// `r` itself, or `r + 10 tau` when some modulus lies within `tau` of `r`.
pub fn nudge_off(r: f64, moduli: &[f64]) -> f64 {
    let tau = radius_tolerance(r);
    if moduli.iter().any(|m| (m - r).abs() <= tau) {
        r + NUDGE_FACTOR * tau
    } else {
        r
    }
}

fn check_radius(f: &FunctionModel, r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return invalid(format!("radius must be positive and finite, got {r}"));
    }
    if r > f.extent() {
        return invalid(format!("radius {r} exceeds model extent {}", f.extent()));
    }
    Ok(())
}

/// `m(r, f)`, the circle mean of `log+ |f|`.
pub fn proximity(f: &FunctionModel, r: f64, tol: f64) -> Result<NevanlinnaValue> {
    check_radius(f, r)?;
    if !(tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    let singular = f.singular_points();
    let moduli: Vec<f64> = singular.iter().map(|p| p.norm()).collect();
    let radius = nudge_off(r, &moduli);
    let points: Vec<ComplexPoint> = singular
        .iter()
        .chain(f.zeros().map(|d| d.entries()).unwrap_or(&[]).iter().map(|e| &e.location))
        .copied()
        .collect();
    let near = |p: &ComplexPoint| (p.norm() - radius).abs() < BREAKPOINT_BAND * radius;
    let mut breakpoints: Vec<f64> = points
        .iter()
        .filter(|p| near(p) && p.norm() > 0.0)
        .map(|p| p.arg().rem_euclid(std::f64::consts::TAU))
        .collect();
    // a bump of log+|f| from a point at distance d spans an arc of order d/r;
    // uniform panels of that size keep all 15 nodes of a panel from missing it
    let gap = points
        .iter()
        .filter(|p| !near(p))
        .map(|p| (p.norm() - radius).abs())
        .fold(f64::INFINITY, f64::min);
    let panels = (UNIFORM_PANELS_PER_ARC * radius / gap).ceil().clamp(MIN_UNIFORM_PANELS, MAX_UNIFORM_PANELS) as usize;
    breakpoints.extend((1..panels).map(|k| std::f64::consts::TAU * k as f64 / panels as f64));
    breakpoints.sort_by(f64::total_cmp);
    let q = circle_mean(
        |theta| f.eval(ComplexPoint::from_polar(radius, theta)).log_plus(),
        &breakpoints,
        tol,
        DEFAULT_MAX_NODES,
    )?;
    Ok(NevanlinnaValue {
        value: q.value.max(0.0),
        abs_error_estimate: q.abs_error,
        nodes_used: q.nodes,
        radius,
    })
}

/// `n(r)`: multiplicities of entries in the closed disk `|z| <= r`; the
/// origin only when `with_origin`.
pub fn count_points(d: &Divisor, r: f64, with_origin: bool) -> Result<u64> {
    if !(r >= 0.0) || r > d.extent() {
        return invalid(format!("radius {r} outside divisor extent {}", d.extent()));
    }
    Ok(d.entries()
        .iter()
        .filter(|e| e.location.norm() <= r)
        .filter(|e| with_origin || e.location.norm() > merge_tolerance(e.location))
        .map(|e| e.multiplicity as u64)
        .sum())
}

/// `N(r) = sum_{0<|b|<=r} m log(r/|b|) + n(0) log r`.
pub fn counting_divisor(d: &Divisor, r: f64) -> Result<NevanlinnaValue> {
    if !(r > 0.0) || r > d.extent() {
        return invalid(format!("radius {r} outside divisor extent {}", d.extent()));
    }
    let log_r = r.ln();
    let mut sum = 0.0;
    let mut comp = 0.0;
    for e in d.entries() {
        let t = e.location.norm();
        if t > r {
            break;
        }
        let term = if t <= merge_tolerance(e.location) {
            e.multiplicity as f64 * log_r
        } else {
            e.multiplicity as f64 * (log_r - t.ln())
        };
        // Kahan summation
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    Ok(NevanlinnaValue::exact(sum, r))
}

pub fn counting(f: &FunctionModel, r: f64, target: Target) -> Result<NevanlinnaValue> {
    check_radius(f, r)?;
    let d = match target {
        Target::Poles => f.require_poles()?,
        Target::Zeros => f.require_zeros()?,
    };
    counting_divisor(d, r)
}

/// `T(r, f) = m(r, f) + N(r, f)`, both at the (possibly nudged) radius.
pub fn characteristic(f: &FunctionModel, r: f64, tol: f64) -> Result<NevanlinnaValue> {
    let m = proximity(f, r, tol)?;
    let n = counting(f, m.radius, Target::Poles)?;
    Ok(m.plus(n))
}

fn characteristic_on(f: &FunctionModel, radii: &[f64], tol: f64) -> Result<Vec<f64>> {
    radii
        .par_iter()
        .map(|&r| characteristic(f, r, tol).map(|t| t.value))
        .collect()
}

fn upper_slope(xs: &[f64], ts: &[f64], start: usize) -> Result<f64> {
    let ys: Vec<f64> = ts.iter().map(|t| t.ln().max(0.0)).collect();
    if ys[start..].iter().all(|y| *y == 0.0) {
        return Ok(0.0);
    }
    Ok(fit_slope(&xs[start..], &ys[start..])?.max(0.0))
}

/// Slope of `log+ T` against `log r` on the upper half of the grid, at
/// least 0.
pub fn estimate_order(f: &FunctionModel, grid: &RadiusGrid, tol: f64) -> Result<f64> {
    grid.validate()?;
    if grid.count < 6 {
        return invalid("order estimation needs at least 6 radii");
    }
    let radii = grid.radii();
    let ts = characteristic_on(f, &radii, tol)?;
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    upper_slope(&xs, &ts, grid.upper_start())
}

/// Slope of `log+ T` against `log log r` on the upper half of the grid.
pub fn estimate_log_order(f: &FunctionModel, grid: &RadiusGrid, tol: f64) -> Result<f64> {
    grid.validate()?;
    let radii = grid.radii();
    let start = grid.upper_start();
    if radii[start] <= 1.0 {
        return invalid("logarithmic order needs the upper grid half beyond r = 1");
    }
    let ts = characteristic_on(f, &radii[start..], tol)?;
    let xs: Vec<f64> = radii[start..].iter().map(|r| r.ln().ln()).collect();
    upper_slope(&xs, &ts, 0)
}

/// Slope of `log n(t)` against `log t` over the upper half of the entries,
/// at least 0.
pub fn exponent_of_convergence(d: &Divisor) -> Result<f64> {
    if d.len() < 6 {
        return Err(NevError::InvalidInput(format!(
            "exponent of convergence needs at least 6 entries, got {}",
            d.len()
        )));
    }
    let mut cumulative = 0u64;
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(d.len());
    for e in d.entries() {
        cumulative += e.multiplicity as u64;
        let t = e.location.norm();
        if t <= 0.0 {
            continue;
        }
        // equal moduli collapse onto the larger count
        match points.last_mut() {
            Some(last) if last.0 == t.ln() => last.1 = (cumulative as f64).ln(),
            _ => points.push((t.ln(), (cumulative as f64).ln())),
        }
    }
    let start = points.len() / 2;
    let xs: Vec<f64> = points[start..].iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points[start..].iter().map(|p| p.1).collect();
    Ok(fit_slope(&xs, &ys)?.max(0.0))
}
