//! Checks for small steps at a fixed radius.

use rand::Rng;
use serde_json::json;

use super::report::CheckReport;
use super::support::{poles_at_origin, random_step, run, step_with};
use crate::complex::{format_complex, ComplexPoint};
use crate::difference::{quotient_proximity, shifted_counting, Regime};
use crate::error::{NevError, Result};
use crate::model::FunctionModel;
use crate::nevanlinna::{characteristic, counting, RadiusGrid, Target};
use crate::thresholds::{alpha1, alpha2, beta};

/// Final-term threshold for the halving sequence.
pub const VANISHING_FINAL_BOUND: f64 = 0.02;
/// Allowed increase between consecutive tail terms.
pub const MONOTONE_TOL: f64 = 1e-6;
/// Tail terms that must be nonincreasing.
pub const MONOTONE_TAIL: usize = 4;
/// Threshold for the fixed-step, growing-radius variant (diagnostic only).
pub const RADIAL_BOUND: f64 = 0.05;
/// Allowed spread of `|T(r,1/(f-a)) - T(r,f)|` over the grid.
pub const FIRST_MAIN_SPREAD: f64 = 2.0;

/// `|T(r, 1/(f-a)) - T(r, f)|` stays within a bounded band over the grid
/// for `a` in `{0, 1, i}`.
pub fn check_first_main(function_id: &str, f: &FunctionModel, grid: &RadiusGrid, tol: f64) -> CheckReport {
    let report = CheckReport::new(
        "check_first_main",
        "characteristic of 1/(f-a) differs from that of f by a bounded amount",
        function_id,
        0.0,
    );
    run(report, |report| {
        grid.validate()?;
        report.param("spread_bound", FIRST_MAIN_SPREAD);
        let radii = grid.radii();
        let ts = radii
            .iter()
            .map(|&r| characteristic(f, r, tol).map(|t| t.value))
            .collect::<Result<Vec<_>>>()?;
        for a in [ComplexPoint::new(0.0, 0.0), ComplexPoint::new(1.0, 0.0), ComplexPoint::new(0.0, 1.0)] {
            let g = match f.subtract_constant(a).and_then(|g| {
                if g.is_identically_zero() {
                    Err(NevError::CapabilityRejected("f - a vanishes identically".into()))
                } else {
                    g.reciprocal()
                }
            }) {
                Ok(g) => g,
                Err(NevError::CapabilityRejected(msg)) => {
                    report.note(format!("a = {} skipped: {msg}", format_complex(a)));
                    continue;
                }
                Err(e) => return Err(e),
            };
            let diffs = match radii
                .iter()
                .zip(&ts)
                .map(|(&r, t)| characteristic(&g, r, tol).map(|tg| (tg.value - t).abs()))
                .collect::<Result<Vec<_>>>()
            {
                Ok(d) => d,
                Err(NevError::CapabilityRejected(msg)) => {
                    report.note(format!("a = {} skipped: {msg}", format_complex(a)));
                    continue;
                }
                Err(e) => return Err(e),
            };
            let hi = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = diffs.iter().copied().fold(f64::INFINITY, f64::min);
            report.param(&format!("differences.a={}", format_complex(a)), &diffs);
            report.push(json!({"a": format_complex(a)}), hi - lo, FIRST_MAIN_SPREAD);
        }
        report.param("radii", &radii);
        Ok(())
    })
}

/// Forward plus reverse quotient proximity along `eta_k = alpha1(r)/2^k`
/// at each fixed radius: the last term is small and the tail does not
/// increase. The fixed-step variant over growing radii is recorded as a
/// diagnostic.
pub fn check_vanishing_proximity(
    function_id: &str,
    f: &FunctionModel,
    radii: &[f64],
    halvings: u32,
    grid: &RadiusGrid,
    tol: f64,
) -> CheckReport {
    let report = CheckReport::new(
        "check_vanishing_proximity",
        "quotient proximity of f(z+eta) and f(z) vanishes as the step shrinks",
        function_id,
        0.0,
    );
    run(report, |report| {
        report.param("final_bound", VANISHING_FINAL_BOUND);
        report.param("monotone_tol", MONOTONE_TOL);
        report.param("halvings", halvings);
        let mut sequences = Vec::new();
        for &r in radii {
            let a1 = alpha1(f, r)?;
            let mut sums = Vec::new();
            let mut etas = Vec::new();
            for k in 0..=halvings {
                let eta = a1.value / 2f64.powi(k as i32);
                let step = step_with(ComplexPoint::new(eta, 0.0), Regime::Vanishing)?;
                sums.push(quotient_proximity(f, &step, r, tol)?.sum());
                etas.push(eta);
            }
            let last = halvings as usize;
            report.push(json!({"r": r, "k": last, "eta": etas[last], "kind": "final"}), sums[last], VANISHING_FINAL_BOUND);
            let tail_start = (last + 1).saturating_sub(MONOTONE_TAIL) + 1;
            for k in tail_start..=last {
                report.push(
                    json!({"r": r, "k": k, "eta": etas[k], "kind": "nonincreasing"}),
                    sums[k] - sums[k - 1],
                    MONOTONE_TOL,
                );
            }
            sequences.push(json!({"r": r, "alpha1": a1.value, "binding": a1.binding_term, "etas": etas, "sums": sums}));
        }
        report.param("sequences", sequences);

        // fixed step alpha1(r)/2 over growing radii
        let mut radial = Vec::new();
        for r in grid.radii().into_iter().filter(|r| *r > 1.0) {
            let eta = alpha1(f, r)?.value / 2.0;
            let step = step_with(ComplexPoint::new(eta, 0.0), Regime::Vanishing)?;
            radial.push(json!({"r": r, "eta": eta, "sum": quotient_proximity(f, &step, r, tol)?.sum()}));
        }
        let final_sum = radial.last().and_then(|v| v["sum"].as_f64()).unwrap_or(0.0);
        report.param("radial_sequence", radial);
        report.param("radial_bound", RADIAL_BOUND);
        report.param("radial_below_bound", final_sum < RADIAL_BOUND);
        if final_sum >= RADIAL_BOUND {
            report.note(format!(
                "diagnostic: fixed-step sum {final_sum:.4} at the largest radius is not below {RADIAL_BOUND}"
            ));
        }
        Ok(())
    })
}

/// `|N(r, f(z+eta)) - N(r, f)| <= n(0,f) log r + 3` for random
/// `0 < |eta| < alpha2(r)`.
pub fn check_shifted_counting(
    function_id: &str,
    f: &FunctionModel,
    radii: &[f64],
    samples: usize,
    rng: &mut impl Rng,
) -> CheckReport {
    let report = CheckReport::new(
        "check_shifted_counting",
        "counting function is stable under small shifts below the pole-sum threshold",
        function_id,
        0.0,
    );
    run(report, |report| {
        let n0 = poles_at_origin(f)?;
        report.param("n0", n0);
        report.param("additive_constant", 3.0);
        for &r in radii {
            let a2 = alpha2(f, r, None)?;
            let base = counting(f, r, Target::Poles)?.value;
            let bound = n0 as f64 * r.ln() + 3.0;
            for _ in 0..samples {
                let eta = random_step(rng, a2.value);
                let step = step_with(eta, Regime::Vanishing)?;
                let shifted = shifted_counting(f, &step, r)?.value;
                report.push(
                    json!({"r": r, "eta": format_complex(eta), "alpha2": a2.value, "n": base, "n_shifted": shifted}),
                    (shifted - base).abs(),
                    bound,
                );
            }
        }
        Ok(())
    })
}

/// `|T(r, f(z+eta)) - T(r, f)| <= n(0,f) log r + 4 + 2 tol` for random
/// `0 < |eta| < beta(r)`.
pub fn check_characteristic_shift(
    function_id: &str,
    f: &FunctionModel,
    radii: &[f64],
    samples: usize,
    tol: f64,
    rng: &mut impl Rng,
) -> CheckReport {
    let report = CheckReport::new(
        "check_characteristic_shift",
        "characteristic is stable under small shifts below the combined threshold",
        function_id,
        2.0 * tol,
    );
    run(report, |report| {
        let n0 = poles_at_origin(f)?;
        report.param("n0", n0);
        report.param("additive_constant", 4.0);
        for &r in radii {
            let b = beta(f, r, None)?;
            let base = characteristic(f, r, tol)?.value;
            let bound = n0 as f64 * r.ln() + 4.0;
            for _ in 0..samples {
                let eta = random_step(rng, b.value);
                let shifted = characteristic(&f.shift(eta)?, r, tol)?.value;
                report.push(
                    json!({"r": r, "eta": format_complex(eta), "beta": b.value, "t": base, "t_shifted": shifted}),
                    (shifted - base).abs(),
                    bound,
                );
            }
        }
        Ok(())
    })
}
