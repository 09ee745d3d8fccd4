//! Helpers shared by the checks: step construction, order lookup, constant
//! fitting and exceptional-set bookkeeping.

use rand::Rng;
use serde_json::json;

use super::report::CheckReport;
use super::ExceptionalSetPolicy;
use crate::complex::ComplexPoint;
use crate::difference::{Regime, StepSpec};
use crate::error::Result;
use crate::model::FunctionModel;
use crate::nevanlinna::{estimate_order, RadiusGrid};

/// Relative headroom on fitted constants so that the radius that fixed the
/// constant is not failed by rounding.
pub(crate) const FIT_REL_SLACK: f64 = 1e-9;

/// A step in the preferred regime, or a fixed step when its modulus falls
/// outside that regime (for example `|eta| >= 1` at small radii).
pub(crate) fn step_with(value: ComplexPoint, preferred: Regime) -> Result<StepSpec> {
    StepSpec::new(value, preferred).or_else(|_| StepSpec::fixed(value))
}

/// The model's order hint, else the grid estimate.
pub(crate) fn order_of(f: &FunctionModel, grid: &RadiusGrid, tol: f64) -> Result<(f64, &'static str)> {
    match f.order_hint() {
        Some(s) => Ok((s, "hint")),
        None => Ok((estimate_order(f, grid, tol)?, "estimate")),
    }
}

/// Uniform modulus in `(0, bound)`, uniform argument.
pub(crate) fn random_step(rng: &mut impl Rng, bound: f64) -> ComplexPoint {
    let rho = bound * rng.gen_range(f64::MIN_POSITIVE..1.0);
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    ComplexPoint::from_polar(rho, theta)
}

pub(crate) fn poles_at_origin(f: &FunctionModel) -> Result<u32> {
    Ok(f.require_poles()?.at_origin())
}

/// Runs a check body and turns its outcome into a finished report.
pub(crate) fn run(mut report: CheckReport, body: impl FnOnce(&mut CheckReport) -> Result<()>) -> CheckReport {
    match body(&mut report) {
        Ok(()) => report.finish(),
        Err(e) => report.absorb(e),
    }
}

/// Marks the failing samples `indices` exempt when their total log measure
/// fits in the policy budget; otherwise leaves them failing.
pub(crate) fn apply_policy(
    report: &mut CheckReport,
    label: &str,
    indices: &[usize],
    grid: &RadiusGrid,
    policy: &ExceptionalSetPolicy,
) {
    let failing: Vec<usize> = indices.iter().copied().filter(|&i| !report.samples[i].holds()).collect();
    let measure = failing.len() as f64 * grid.cell_log_measure();
    let allowed = policy.max_log_measure_fraction * grid.total_log_measure();
    if measure <= allowed {
        for &i in &failing {
            report.samples[i].exempt = true;
        }
    }
    report.param(&format!("{label}.failing_log_measure"), measure);
    report.param(&format!("{label}.allowed_log_measure"), allowed);
}

/// Fits `C = max lhs/envelope` on the lower half of the grid and records
/// `lhs <= C * envelope` on the upper half as samples, with the policy
/// applied to the upper-half failures.
pub(crate) fn fitted_bound(
    report: &mut CheckReport,
    label: &str,
    radii: &[f64],
    lhs: &[f64],
    envelope: &[f64],
    grid: &RadiusGrid,
    policy: &ExceptionalSetPolicy,
) -> f64 {
    let start = grid.upper_start();
    let constant = (0..start)
        .filter(|&i| envelope[i] > 0.0)
        .map(|i| lhs[i] / envelope[i])
        .fold(0.0, f64::max);
    let lower: Vec<_> = (0..start)
        .map(|i| json!({"r": radii[i], "lhs": lhs[i], "envelope": envelope[i]}))
        .collect();
    report.param(&format!("{label}.lower_half"), lower);
    report.param(&format!("{label}.constant"), constant);
    let mut indices = Vec::new();
    for i in start..radii.len() {
        let inputs = json!({"series": label, "r": radii[i], "envelope": envelope[i], "constant": constant});
        report.push(inputs, lhs[i], constant * envelope[i] * (1.0 + FIT_REL_SLACK));
        indices.push(report.samples.len() - 1);
    }
    apply_policy(report, label, &indices, grid, policy);
    constant
}
