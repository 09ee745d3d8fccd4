//! Checks for steps that grow with the radius.

use rand::Rng;
use serde_json::json;

use super::report::CheckReport;
use super::support::{fitted_bound, order_of, run, step_with};
use super::ExceptionalSetPolicy;
use crate::complex::ComplexPoint;
use crate::difference::{quotient_proximity, shifted_counting, Regime};
use crate::error::{NevError, Result};
use crate::fit::fit_slope;
use crate::model::FunctionModel;
use crate::nevanlinna::{characteristic, counting, estimate_log_order, RadiusGrid, Target};

/// Allowance added to the predicted proximity growth exponent.
pub const SLOPE_ALLOWANCE: f64 = 0.1;
/// Radii with a proximity sum at or below this are left out of the fit.
pub const SLOPE_FLOOR: f64 = 0.01;
/// Steps are drawn this fraction of the way to the top of open windows.
pub const WINDOW_FILL: f64 = 0.999;
/// A logarithmic order estimate must exceed 1 by this much before the
/// logarithmic-order statements are exercised.
pub const LOG_ORDER_MARGIN: f64 = 0.3;

fn skip(msg: impl Into<String>) -> NevError {
    NevError::CapabilityRejected(msg.into())
}

/// Forward plus reverse quotient proximity at `|omega| = r^beta` grows no
/// faster than `r^{sigma - (1-beta)(1-eps) + eps}`, read off as a log-log
/// slope over the grid.
#[allow(clippy::too_many_arguments)]
pub fn check_infinite_proximity(
    function_id: &str,
    f: &FunctionModel,
    grid: &RadiusGrid,
    betas: &[f64],
    eps: f64,
    policy: &ExceptionalSetPolicy,
    tol: f64,
    rng: &mut impl Rng,
) -> CheckReport {
    let report = CheckReport::new(
        "check_infinite_proximity",
        "quotient proximity for steps up to r^beta grows at most polynomially with a reduced exponent",
        function_id,
        0.0,
    );
    run(report, |report| {
        grid.validate()?;
        let (sigma, source) = order_of(f, grid, tol)?;
        report.param("sigma", sigma);
        report.param("sigma_source", source);
        if sigma <= 0.0 {
            return Err(skip("order 0: the statement needs positive order"));
        }
        let theta = rng.gen_range(-std::f64::consts::FRAC_PI_4..std::f64::consts::FRAC_PI_4);
        report.param("theta", theta);
        report.param("eps", eps);
        report.param("slope_allowance", SLOPE_ALLOWANCE);
        report.param("slope_floor", SLOPE_FLOOR);
        let radii = grid.radii();
        let budget = (policy.max_log_measure_fraction * grid.count as f64).floor() as usize;
        for &b in betas.iter().filter(|b| **b < sigma.min(1.0)) {
            if !(eps < (1.0 - b) / (2.0 - b)) {
                report.note(format!("beta = {b}: eps = {eps} lies outside (0, (1-beta)/(2-beta))"));
                continue;
            }
            let sums = radii
                .iter()
                .map(|&r| {
                    let omega = ComplexPoint::from_polar(r.powf(b), theta);
                    quotient_proximity(f, &step_with(omega, Regime::Infinite)?, r, tol).map(|q| q.sum())
                })
                .collect::<Result<Vec<_>>>()?;
            report.param(&format!("sums.beta={b}"), &sums);
            let bound = sigma - (1.0 - b) * (1.0 - eps) + eps + SLOPE_ALLOWANCE;
            let mut pts: Vec<(f64, f64, f64)> = radii
                .iter()
                .zip(&sums)
                .filter(|(_, s)| **s > SLOPE_FLOOR)
                .map(|(r, s)| (*r, r.ln(), s.ln()))
                .collect();
            if pts.len() < 3 {
                let top = sums.iter().copied().fold(0.0, f64::max);
                report.push(json!({"beta": b, "kind": "below-floor"}), top, SLOPE_FLOOR);
                continue;
            }
            let slope_of = |p: &[(f64, f64, f64)]| {
                let xs: Vec<f64> = p.iter().map(|q| q.1).collect();
                let ys: Vec<f64> = p.iter().map(|q| q.2).collect();
                fit_slope(&xs, &ys)
            };
            let mut slope = slope_of(&pts)?;
            let mut exempt = Vec::new();
            // greedy removal of the most slope-raising radius, within budget
            while slope > bound && exempt.len() < budget && pts.len() > 3 {
                let mut best = (f64::INFINITY, 0);
                for i in 0..pts.len() {
                    let mut rest = pts.clone();
                    rest.remove(i);
                    let s = slope_of(&rest)?;
                    if s < best.0 {
                        best = (s, i);
                    }
                }
                exempt.push(pts.remove(best.1).0);
                slope = best.0;
            }
            report.push(
                json!({"beta": b, "kind": "slope", "radii_fitted": pts.len(), "exempt_radii": exempt}),
                slope,
                bound,
            );
        }
        Ok(())
    })
}

#[derive(Clone, Copy, PartialEq)]
enum Level {
    Counting,
    Characteristic,
}

struct Plan {
    label: String,
    window: Box<dyn Fn(f64) -> f64>,
    envelope: Box<dyn Fn(f64) -> f64>,
}

/// Window and envelope per case of the infinite-step estimates.
fn case_plans(sigma: f64, betas: &[f64], eps: f64, level: Level, report: &mut CheckReport) -> Vec<Plan> {
    let mut plans = Vec::new();
    if sigma >= 1.0 {
        for &b in betas.iter().filter(|b| **b < 1.0) {
            let cap = match level {
                Level::Counting => ((sigma - 1.0) * (1.0 - b) / b).min(1.0 - b),
                Level::Characteristic => ((sigma - 1.0) * (1.0 - b) / b).min((1.0 - b) / (2.0 - b)),
            };
            if !(eps < cap) {
                report.note(format!(
                    "case i, beta = {b}: admissible eps range (0, {cap:.4}) excludes eps = {eps}; eps used as given"
                ));
            }
            let exponent = match level {
                Level::Counting => sigma - (1.0 - b) + eps,
                Level::Characteristic => sigma - (1.0 - b) * (1.0 - eps) + eps,
            };
            plans.push(Plan {
                label: format!("case-i.beta={b}"),
                window: Box::new(move |r: f64| r.powf(b)),
                envelope: Box::new(move |r: f64| r.powf(exponent)),
            });
        }
    } else if sigma > 0.0 {
        for &b in betas.iter().filter(|b| **b < sigma) {
            plans.push(Plan {
                label: format!("case-ii.beta={b}"),
                window: Box::new(move |r: f64| r.powf(b)),
                envelope: Box::new(move |r: f64| r.powf(b)),
            });
        }
    } else {
        plans.push(Plan {
            label: "case-iii".into(),
            window: Box::new(|r: f64| r.ln().sqrt()),
            envelope: Box::new(|r: f64| r.ln()),
        });
    }
    plans
}

/// Window and envelope `log^beta r` for order-0 models of logarithmic
/// order above 1.
fn log_order_plan(f: &FunctionModel, grid: &RadiusGrid, tol: f64, report: &mut CheckReport) -> Result<Option<Plan>> {
    if f.is_rational() {
        report.note("rational model: logarithmic order is exactly 1");
        return Ok(None);
    }
    let sigma_log = estimate_log_order(f, grid, tol)?;
    report.param("sigma_log", sigma_log);
    if sigma_log <= 1.0 + LOG_ORDER_MARGIN {
        report.note(format!("logarithmic order estimate {sigma_log:.3} is not clearly above 1"));
        return Ok(None);
    }
    let b = 0.5 * (1.0 + sigma_log);
    Ok(Some(Plan {
        label: format!("log-order.beta={b:.6}"),
        window: Box::new(move |r: f64| r.ln().powf(b)),
        envelope: Box::new(move |r: f64| r.ln().powf(b)),
    }))
}

/// Evaluates `|F(r, f(z+omega)) - F(r, f)|` with `|omega|` at the top of
/// the plan's window and a random phase per radius, then applies the
/// fitted-constant rule.
#[allow(clippy::too_many_arguments)]
fn run_plan(
    plan: &Plan,
    level: Level,
    f: &FunctionModel,
    grid: &RadiusGrid,
    policy: &ExceptionalSetPolicy,
    tol: f64,
    rng: &mut impl Rng,
    report: &mut CheckReport,
) -> Result<()> {
    let radii = grid.radii();
    let mut lhs = Vec::with_capacity(radii.len());
    let mut steps = Vec::with_capacity(radii.len());
    for &r in &radii {
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let omega = ComplexPoint::from_polar(WINDOW_FILL * (plan.window)(r), theta);
        let step = step_with(omega, Regime::Infinite)?;
        let d = match level {
            Level::Counting => shifted_counting(f, &step, r)?.value - counting(f, r, Target::Poles)?.value,
            Level::Characteristic => characteristic(&f.shift(omega)?, r, tol)?.value - characteristic(f, r, tol)?.value,
        };
        lhs.push(d.abs());
        steps.push(json!([omega.re, omega.im]));
    }
    report.param(&format!("{}.steps", plan.label), steps);
    let envelope: Vec<f64> = radii.iter().map(|&r| (plan.envelope)(r)).collect();
    fitted_bound(report, &plan.label, &radii, &lhs, &envelope, grid, policy);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn infinite_shift_check(
    check_id: &str,
    anchor: &str,
    level: Level,
    with_log_order: bool,
    function_id: &str,
    f: &FunctionModel,
    grid: &RadiusGrid,
    betas: &[f64],
    eps: f64,
    policy: &ExceptionalSetPolicy,
    tol: f64,
    rng: &mut impl Rng,
) -> CheckReport {
    let report = CheckReport::new(check_id, anchor, function_id, 0.0);
    run(report, |report| {
        grid.validate()?;
        if level == Level::Counting {
            f.require_poles()?;
        }
        let (sigma, source) = order_of(f, grid, tol)?;
        report.param("sigma", sigma);
        report.param("sigma_source", source);
        report.param("eps", eps);
        report.param("window_fill", WINDOW_FILL);
        report.param("policy", policy);
        let mut plans = case_plans(sigma, betas, eps, level, report);
        if with_log_order && sigma == 0.0 {
            plans.extend(log_order_plan(f, grid, tol, report)?);
        }
        for plan in &plans {
            run_plan(plan, level, f, grid, policy, tol, rng, report)?;
        }
        Ok(())
    })
}

/// `|N(r, f(z+omega)) - N(r, f)|` against the case bound `r^{sigma-(1-beta)+eps}`,
/// `r^beta` or `log r`, outside a tolerated exceptional set.
#[allow(clippy::too_many_arguments)]
pub fn check_infinite_counting(
    function_id: &str,
    f: &FunctionModel,
    grid: &RadiusGrid,
    betas: &[f64],
    eps: f64,
    policy: &ExceptionalSetPolicy,
    tol: f64,
    rng: &mut impl Rng,
) -> CheckReport {
    infinite_shift_check(
        "check_infinite_counting",
        "counting function under steps growing with r changes by a case-dependent power or log",
        Level::Counting,
        false,
        function_id,
        f,
        grid,
        betas,
        eps,
        policy,
        tol,
        rng,
    )
}

/// `|N(r, f(z+omega)) - N(r, f)| = O(log^beta r)` for `|omega| < log^beta r`
/// when `1 < beta < sigma_log`.
pub fn check_log_order_counting(
    function_id: &str,
    f: &FunctionModel,
    grid: &RadiusGrid,
    policy: &ExceptionalSetPolicy,
    tol: f64,
    rng: &mut impl Rng,
) -> CheckReport {
    let report = CheckReport::new(
        "check_log_order_counting",
        "counting function under steps up to log^beta r changes by O(log^beta r) for logarithmic order above 1",
        function_id,
        0.0,
    );
    run(report, |report| {
        grid.validate()?;
        f.require_poles()?;
        let (sigma, source) = order_of(f, grid, tol)?;
        report.param("sigma", sigma);
        report.param("sigma_source", source);
        if sigma > 0.0 {
            return Err(skip("positive order: logarithmic order is infinite"));
        }
        match log_order_plan(f, grid, tol, report)? {
            Some(plan) => run_plan(&plan, Level::Counting, f, grid, policy, tol, rng, report),
            None => Err(skip("logarithmic order not above 1")),
        }
    })
}

/// T-level versions of the infinite-step counting estimates, including the
/// logarithmic-order variant.
#[allow(clippy::too_many_arguments)]
pub fn check_characteristic_infinite(
    function_id: &str,
    f: &FunctionModel,
    grid: &RadiusGrid,
    betas: &[f64],
    eps: f64,
    policy: &ExceptionalSetPolicy,
    tol: f64,
    rng: &mut impl Rng,
) -> CheckReport {
    infinite_shift_check(
        "check_characteristic_infinite",
        "characteristic under steps growing with r changes by a case-dependent power or log",
        Level::Characteristic,
        true,
        function_id,
        f,
        grid,
        betas,
        eps,
        policy,
        tol,
        rng,
    )
}
