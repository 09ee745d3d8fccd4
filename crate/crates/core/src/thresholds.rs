//! Explicit thresholds on the step size and explicit right-hand sides.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::FunctionModel;
use crate::nevanlinna::{characteristic, count_points, counting, proximity, NevanlinnaValue, Target};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BindingTerm {
    /// `r`
    Radius,
    /// `log^{-1/2} r`
    LogTerm,
    /// `1 / n(r+1)^2`
    Count,
    /// `h / 2`
    HalfH,
    /// `1 / sum 1/|b|`
    PoleSum,
}

/// Minimum of a list of terms; `+inf` terms stand for empty sums or counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdValue {
    pub value: f64,
    pub binding_term: BindingTerm,
    pub terms: Vec<(BindingTerm, f64)>,
}

impl ThresholdValue {
    fn from_terms(terms: Vec<(BindingTerm, f64)>) -> ThresholdValue {
        let (binding_term, value) = terms
            .iter()
            .copied()
            .fold((terms[0].0, f64::INFINITY), |best, t| if t.1 < best.1 { t } else { best });
        ThresholdValue {
            value,
            binding_term,
            terms,
        }
    }

    /// Recomputes the minimum from the stored terms.
    pub fn recomputed(&self) -> f64 {
        self.terms.iter().map(|t| t.1).fold(f64::INFINITY, f64::min)
    }
}

fn check_log_radius(r: f64) -> Result<()> {
    if !(r > 1.0 && r.is_finite()) {
        return invalid(format!("threshold radius must exceed 1, got {r}"));
    }
    Ok(())
}

fn inverse_or_inf(x: f64) -> f64 {
    if x > 0.0 {
        1.0 / x
    } else {
        f64::INFINITY
    }
}

/// `min{log^{-1/2} r, 1/n(r+1)^2}` with `n` counting zeros and poles.
pub fn alpha1(f: &FunctionModel, r: f64) -> Result<ThresholdValue> {
    check_log_radius(r)?;
    let n = count_points(f.require_poles()?, r + 1.0, true)? + count_points(f.require_zeros()?, r + 1.0, true)?;
    Ok(ThresholdValue::from_terms(vec![
        (BindingTerm::LogTerm, r.ln().powf(-0.5)),
        (BindingTerm::Count, inverse_or_inf((n * n) as f64)),
    ]))
}

/// `min(1/2, |b_min|/2)` over the nonzero poles.
pub fn default_h(f: &FunctionModel) -> Result<f64> {
    let poles = f.require_poles()?;
    let smallest = poles
        .entries()
        .iter()
        .map(|e| e.location.norm())
        .find(|t| *t > crate::divisor::merge_tolerance(crate::complex::ComplexPoint::new(*t, 0.0)));
    Ok(smallest.map_or(0.5, |t| (0.5 * t).min(0.5)))
}

/// `min{r, log^{-1/2} r, h/2, 1/sum_{0<|b|<r+1/2} 1/|b|}`. Without `h` the
/// value from [`default_h`] is used.
pub fn alpha2(f: &FunctionModel, r: f64, h: Option<f64>) -> Result<ThresholdValue> {
    check_log_radius(r)?;
    let poles = f.require_poles()?;
    let h = match h {
        Some(h) => h,
        None => default_h(f)?,
    };
    if !(h > 0.0 && h < 1.0) {
        return invalid(format!("h must lie in (0, 1), got {h}"));
    }
    let origin_tol = crate::divisor::merge_tolerance(crate::complex::ComplexPoint::new(0.0, 0.0));
    if poles.entries().iter().any(|e| e.location.norm() > origin_tol && e.location.norm() <= h) {
        return invalid(format!("f has a pole in the punctured disk of radius h = {h}"));
    }
    let reach = r + 0.5;
    if poles.extent() < reach {
        return invalid(format!("pole divisor extent {} is below r + 1/2", poles.extent()));
    }
    let sum: f64 = poles
        .entries()
        .iter()
        .filter(|e| e.location.norm() > origin_tol && e.location.norm() < reach)
        .map(|e| e.multiplicity as f64 / e.location.norm())
        .sum();
    Ok(ThresholdValue::from_terms(vec![
        (BindingTerm::Radius, r),
        (BindingTerm::LogTerm, r.ln().powf(-0.5)),
        (BindingTerm::HalfH, 0.5 * h),
        (BindingTerm::PoleSum, inverse_or_inf(sum)),
    ]))
}

/// `min{alpha1, alpha2}`.
pub fn beta(f: &FunctionModel, r: f64, h: Option<f64>) -> Result<ThresholdValue> {
    let a1 = alpha1(f, r)?;
    let a2 = alpha2(f, r, h)?;
    let mut terms = a1.terms;
    terms.extend(a2.terms.into_iter().filter(|t| t.0 != BindingTerm::LogTerm));
    Ok(ThresholdValue::from_terms(terms))
}

/// Admissible step moduli `(lo, hi)` in the infinite-step regime.
pub fn omega_window(sigma: f64, beta: f64, r: f64) -> Result<(f64, f64)> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return invalid(format!("order must be finite and nonnegative, got {sigma}"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return invalid(format!("radius must be positive, got {r}"));
    }
    if sigma > 0.0 {
        if !(beta > 0.0 && beta < sigma.min(1.0)) {
            return invalid(format!("beta must lie in (0, min(1, sigma)) = (0, {}), got {beta}", sigma.min(1.0)));
        }
        Ok((0.0, r.powf(beta)))
    } else if r > 1.0 {
        Ok((0.0, r.ln().sqrt()))
    } else {
        Ok((0.0, 1.0))
    }
}

/// `5 m(3r, f) + log 4 * n(3r, f)`, a bound on `m(r, f(z+c))` for `|c| < r`.
pub fn uniform_shift_rhs(f: &FunctionModel, r: f64, tol: f64) -> Result<NevanlinnaValue> {
    let m = proximity(f, 3.0 * r, tol)?;
    let n = count_points(f.require_poles()?, m.radius, true)?;
    Ok(NevanlinnaValue {
        value: 5.0 * m.value + 4f64.ln() * n as f64,
        abs_error_estimate: 5.0 * m.abs_error_estimate,
        nodes_used: m.nodes_used,
        radius: m.radius,
    })
}

const C_ALPHA_SEEDS: usize = 2000;

/// `sup_{x>0} log(1+x) / x^alpha`, so that `log(1+x) <= C x^alpha`.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return invalid(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if alpha == 1.0 {
        return Ok(1.0);
    }
    // log of the ratio as a function of u = ln x; unimodal in u
    let g = |u: f64| u.exp().ln_1p().ln() - alpha * u;
    let (mut lo, mut hi) = (1e-6f64.ln(), 1e6f64.ln());
    loop {
        let step = (hi - lo) / (C_ALPHA_SEEDS - 1) as f64;
        let best = (0..C_ALPHA_SEEDS)
            .map(|k| (k, g(lo + step * k as f64)))
            .fold((0, f64::NEG_INFINITY), |b, t| if t.1 > b.1 { t } else { b })
            .0;
        // widen when the maximiser sits on the bracket edge
        if best == C_ALPHA_SEEDS - 1 && hi < 700.0 {
            lo = hi - 2.0 * step;
            hi += 13.8;
            continue;
        }
        if best == 0 && lo > -700.0 {
            hi = lo + 2.0 * step;
            lo -= 13.8;
            continue;
        }
        let mut a = lo + step * best.saturating_sub(1) as f64;
        let mut b = lo + step * (best + 1).min(C_ALPHA_SEEDS - 1) as f64;
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let objective = g;
        let mut x1 = b - ratio * (b - a);
        let mut x2 = a + ratio * (b - a);
        let (mut f1, mut f2) = (objective(x1), objective(x2));
        for _ in 0..200 {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + ratio * (b - a);
                f2 = objective(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - ratio * (b - a);
                f1 = objective(x1);
            }
            if b - a < 1e-13 {
                break;
            }
        }
        let u = 0.5 * (a + b);
        let value = [objective(u), f1, f2].into_iter().fold(f64::NEG_INFINITY, f64::max);
        return Ok(value.exp());
    }
}

/// Right side of the logarithmic-derivative-free estimate for
/// `m(r, (f(z+eta) - f(z)) / (eta f(z)))` in the limit `eta -> 0`.
pub fn lld14_rhs(f: &FunctionModel, r: f64, big_r: f64, big_rp: f64, alpha: f64, tol: f64) -> Result<NevanlinnaValue> {
    if !(r > 0.0 && r < big_r && big_r < big_rp) {
        return invalid(format!("radii must satisfy 0 < r < R < R', got {r}, {big_r}, {big_rp}"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    if big_rp > f.extent() {
        return invalid(format!("R' = {big_rp} exceeds model extent {}", f.extent()));
    }
    let recip = f.reciprocal()?;
    let t_f = characteristic(f, big_r, tol)?;
    let t_inv = characteristic(&recip, big_r, tol)?;
    let n_sum = counting(f, big_rp, Target::Poles)?.value + counting(f, big_rp, Target::Zeros)?.value;
    let denom = (1.0 - alpha) * r.powf(alpha) * (big_rp / big_r).ln();
    let lead = 8.0 * big_r.powf(alpha) / (big_r - r).powf(2.0 * alpha);
    let first = (1.0 + lead * (t_f.value.powf(alpha) + t_inv.value.powf(alpha)) + 3.0 * n_sum / denom).ln() / alpha;
    let second = (2f64.powf(alpha) + n_sum / denom).ln() / alpha;
    let value = first + second + 2.0 * 2f64.ln();
    // first-order propagation of the quadrature errors through T^alpha
    let dt = |t: NevanlinnaValue| {
        if t.value > 0.0 {
            alpha * t.value.powf(alpha - 1.0) * t.abs_error_estimate
        } else {
            t.abs_error_estimate.powf(alpha)
        }
    };
    let err = lead * (dt(t_f) + dt(t_inv)) / alpha;
    Ok(NevanlinnaValue {
        value,
        abs_error_estimate: err,
        nodes_used: t_f.nodes_used + t_inv.nodes_used,
        radius: r,
    })
}
