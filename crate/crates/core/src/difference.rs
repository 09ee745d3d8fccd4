//! Functionals of the varying-step difference `f(z + eta) - f(z)`.
//!
//! Two different quantities share one symbol in the literature: the
//! remainder combination `2N(r,f) - N(r,Df) + N(r,1/Df)` and the integrated
//! count of common zeros of `f - a` and `Df`. They live in
//! [`smt_remainder`] and [`integrated_common_counting`] respectively.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::complex::{format_complex, parse_complex, ComplexPoint};
use crate::divisor::{common_points, Divisor};
use crate::error::{invalid, NevError, Result};
use crate::model::FunctionModel;
use crate::nevanlinna::{characteristic, counting, counting_divisor, proximity, NevanlinnaValue, RadiusGrid, Target};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Vanishing,
    Infinite,
    Fixed,
}

/// A nonzero step; vanishing steps are shorter than 1, infinite ones longer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSpec {
    value: ComplexPoint,
    regime: Regime,
}

impl StepSpec {
    pub fn new(value: ComplexPoint, regime: Regime) -> Result<StepSpec> {
        crate::complex::ensure_finite(value, "step")?;
        let size = value.norm();
        if size == 0.0 {
            return invalid("step must be nonzero");
        }
        match regime {
            Regime::Vanishing if size >= 1.0 => invalid(format!("vanishing step needs |eta| < 1, got {size}")),
            Regime::Infinite if size <= 1.0 => invalid(format!("infinite step needs |omega| > 1, got {size}")),
            _ => Ok(StepSpec { value, regime }),
        }
    }

    pub fn vanishing(value: ComplexPoint) -> Result<StepSpec> {
        StepSpec::new(value, Regime::Vanishing)
    }

    pub fn infinite(value: ComplexPoint) -> Result<StepSpec> {
        StepSpec::new(value, Regime::Infinite)
    }

    pub fn fixed(value: ComplexPoint) -> Result<StepSpec> {
        StepSpec::new(value, Regime::Fixed)
    }

    pub fn value(&self) -> ComplexPoint {
        self.value
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// The same regime with the step negated.
    pub fn negated(&self) -> StepSpec {
        StepSpec {
            value: -self.value,
            regime: self.regime,
        }
    }
}

/// A value `a` in the extended plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ValueTarget {
    Finite(ComplexPoint),
    Infinity,
}

impl ValueTarget {
    pub fn parse(text: &str) -> Result<ValueTarget> {
        match text {
            "inf" | "infinity" | "∞" => Ok(ValueTarget::Infinity),
            _ => parse_complex(text).map(ValueTarget::Finite),
        }
    }
}

impl fmt::Display for ValueTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueTarget::Finite(z) => f.write_str(&format_complex(*z)),
            ValueTarget::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ValueTarget {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ValueTarget {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        ValueTarget::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientProximity {
    /// `m(r, f(z+eta)/f(z))`
    pub forward: NevanlinnaValue,
    /// `m(r, f(z)/f(z+eta))`
    pub reverse: NevanlinnaValue,
}

impl QuotientProximity {
    pub fn sum(&self) -> f64 {
        self.forward.value + self.reverse.value
    }

    pub fn abs_error(&self) -> f64 {
        self.forward.abs_error_estimate + self.reverse.abs_error_estimate
    }
}

pub fn quotient_proximity(f: &FunctionModel, step: &StepSpec, r: f64, tol: f64) -> Result<QuotientProximity> {
    if f.is_identically_zero() {
        return invalid("quotient proximity of an identically zero model");
    }
    let shifted = f.shift(step.value)?;
    let forward = proximity(&shifted.quotient(f)?, r, tol)?;
    let reverse = proximity(&f.quotient(&shifted)?, r, tol)?;
    Ok(QuotientProximity { forward, reverse })
}

/// `N(r, f(z + eta))`.
pub fn shifted_counting(f: &FunctionModel, step: &StepSpec, r: f64) -> Result<NevanlinnaValue> {
    f.require_poles()?;
    counting(&f.shift(step.value)?, r, Target::Poles)
}

/// Zero divisor of `f - a` (or of `1/f` for `a = inf`) together with the
/// zero divisor of the matching difference.
fn value_and_difference_zeros(f: &FunctionModel, step: &StepSpec, a: &ValueTarget) -> Result<(Divisor, Divisor)> {
    let base = match a {
        ValueTarget::Finite(a) => f.subtract_constant(*a)?,
        ValueTarget::Infinity => f.reciprocal()?,
    };
    let diff = base.difference(step.value)?;
    if diff.is_identically_zero() {
        return Err(NevError::CapabilityRejected(
            "the difference vanishes identically".into(),
        ));
    }
    let zeros = base.require_zeros()?.clone();
    let diff_zeros = diff.require_zeros()?.clone();
    Ok((zeros, diff_zeros))
}

/// Common zeros of `f - a` and `D_eta f` at minimum multiplicity.
pub fn common_zero_divisor(f: &FunctionModel, step: &StepSpec, a: &ValueTarget) -> Result<Divisor> {
    let (zeros, diff_zeros) = value_and_difference_zeros(f, step, a)?;
    Ok(common_points(&zeros, &diff_zeros))
}

/// `n_D(r, a)`: common zeros in the closed disk of radius `r`.
pub fn common_zero_count(f: &FunctionModel, step: &StepSpec, r: f64, a: &ValueTarget) -> Result<u64> {
    let d = common_zero_divisor(f, step, a)?;
    crate::nevanlinna::count_points(&d, r, true)
}

/// `N_D(r, a)`, the integrated common-zero count.
pub fn integrated_common_counting(f: &FunctionModel, step: &StepSpec, r: f64, a: &ValueTarget) -> Result<NevanlinnaValue> {
    counting_divisor(&common_zero_divisor(f, step, a)?, r)
}

/// `N~ = N(r, 1/(f-a)) - N_D(r, a)`, clamped at 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TildeCounting {
    pub value: f64,
    /// Before clamping.
    pub raw: f64,
    pub full: f64,
    pub common: f64,
    pub radius: f64,
}

pub fn tilde_counting(f: &FunctionModel, step: &StepSpec, r: f64, a: &ValueTarget) -> Result<TildeCounting> {
    let (zeros, diff_zeros) = value_and_difference_zeros(f, step, a)?;
    let full = counting_divisor(&zeros, r)?.value;
    let common = counting_divisor(&common_points(&zeros, &diff_zeros), r)?.value;
    let raw = full - common;
    Ok(TildeCounting {
        value: raw.max(0.0),
        raw,
        full,
        common,
        radius: r,
    })
}

/// `2 N(r, f) - N(r, D f) + N(r, 1/D f)`. May be negative.
pub fn smt_remainder(f: &FunctionModel, step: &StepSpec, r: f64) -> Result<NevanlinnaValue> {
    let diff = f.difference(step.value)?;
    if diff.is_identically_zero() {
        return Err(NevError::CapabilityRejected(
            "the difference vanishes identically".into(),
        ));
    }
    let n_f = counting(f, r, Target::Poles)?.value;
    let n_diff = counting(&diff, r, Target::Poles)?.value;
    let n_diff_zeros = counting(&diff, r, Target::Zeros)?.value;
    Ok(NevanlinnaValue::exact(2.0 * n_f - n_diff + n_diff_zeros, r))
}

/// Finite-radius deficiency proxies at one radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectIndices {
    /// `1 - N(r,1/(f-a))/T`, clamped to `[0, 1]`.
    pub delta: f64,
    /// `N_D(r,a)/T`.
    pub vartheta: f64,
    /// `1 - N~(r,a)/T`.
    pub theta_big: f64,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectSeries {
    pub a: ValueTarget,
    pub indices: Vec<DefectIndices>,
    /// Componentwise median over the upper half of the grid.
    pub trend: DefectIndices,
}

pub fn defect_at(f: &FunctionModel, step: &StepSpec, a: &ValueTarget, r: f64, tol: f64) -> Result<DefectIndices> {
    let t = characteristic(f, r, tol)?;
    if t.value <= 0.0 {
        return invalid("characteristic vanishes; defects are undefined");
    }
    let tilde = tilde_counting(f, step, t.radius, a)?;
    Ok(DefectIndices {
        delta: (1.0 - tilde.full / t.value).clamp(0.0, 1.0),
        vartheta: tilde.common / t.value,
        theta_big: 1.0 - tilde.value / t.value,
        radius: t.radius,
    })
}

pub fn defect_indices(f: &FunctionModel, step: &StepSpec, a: &ValueTarget, grid: &RadiusGrid, tol: f64) -> Result<DefectSeries> {
    grid.validate()?;
    let indices = grid
        .radii()
        .into_iter()
        .map(|r| defect_at(f, step, a, r, tol))
        .collect::<Result<Vec<_>>>()?;
    let upper = &indices[grid.upper_start()..];
    let med = |g: fn(&DefectIndices) -> f64| median(upper.iter().map(g).collect());
    let trend = DefectIndices {
        delta: med(|d| d.delta),
        vartheta: med(|d| d.vartheta),
        theta_big: med(|d| d.theta_big),
        radius: upper.last().map(|d| d.radius).unwrap_or(0.0),
    };
    Ok(DefectSeries { a: *a, indices, trend })
}

pub(crate) fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Outcome of the exceptional-value detector for one value `a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalValue {
    pub a: ValueTarget,
    /// `sup` of `N~` over all steps and radii inspected.
    pub sup_tilde: f64,
    pub bound: f64,
    pub exceptional: bool,
    /// `(eta_n, r, N~)` triples.
    pub samples: Vec<(f64, f64, f64)>,
}

/// Flags `a` as exceptional when `N~` with steps `eta_n = eta0 / 2^n`,
/// `n <= n_max`, stays below `bound` on every grid radius. Finite data can
/// only show boundedness over the steps inspected.
pub fn exceptional_value_detector(
    f: &FunctionModel,
    a: &ValueTarget,
    eta0: ComplexPoint,
    n_max: u32,
    grid: &RadiusGrid,
    bound: f64,
) -> Result<ExceptionalValue> {
    grid.validate()?;
    let mut samples = Vec::new();
    let mut sup: f64 = 0.0;
    for n in 0..=n_max {
        let eta = eta0 / 2f64.powi(n as i32);
        let step = StepSpec::new(eta, Regime::Vanishing)?;
        for r in grid.radii() {
            let t = tilde_counting(f, &step, r, a)?;
            sup = sup.max(t.value);
            samples.push((eta.norm(), r, t.value));
        }
    }
    Ok(ExceptionalValue {
        a: *a,
        sup_tilde: sup,
        bound,
        exceptional: sup <= bound,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nevanlinna::DEFAULT_TOL;
    use crate::poly::PolynomialCoeffs;

    fn c(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::new(re, im)
    }

    fn rational(num: &[f64], den: &[f64]) -> FunctionModel {
        FunctionModel::build_rational(
            &PolynomialCoeffs::from_real(num),
            &PolynomialCoeffs::from_real(den),
            f64::INFINITY,
        )
        .unwrap()
    }

    fn exp_z() -> FunctionModel {
        FunctionModel::build_exp_poly(&PolynomialCoeffs::from_real(&[0.0, 1.0])).unwrap()
    }

    #[test]
    fn step_validation() {
        assert!(StepSpec::vanishing(c(0.0, 0.0)).is_err());
        assert!(StepSpec::vanishing(c(1.5, 0.0)).is_err());
        assert!(StepSpec::infinite(c(0.5, 0.0)).is_err());
        assert!(StepSpec::fixed(c(1.0, 0.0)).is_ok());
    }

    #[test]
    fn value_target_round_trip() {
        for text in ["inf", "1", "0.5-2i"] {
            let a = ValueTarget::parse(text).unwrap();
            assert_eq!(ValueTarget::parse(&a.to_string()).unwrap(), a);
        }
    }

    #[test]
    fn exp_quotient_proximity_is_the_step() {
        let q = quotient_proximity(&exp_z(), &StepSpec::vanishing(c(0.1, 0.0)).unwrap(), 3.0, DEFAULT_TOL).unwrap();
        assert!((q.forward.value - 0.1).abs() < 1e-12);
        assert!(q.reverse.value.abs() < 1e-12);
        let q = quotient_proximity(&exp_z(), &StepSpec::vanishing(c(-0.1, 0.0)).unwrap(), 3.0, DEFAULT_TOL).unwrap();
        assert!(q.forward.value.abs() < 1e-12);
        assert!((q.reverse.value - 0.1).abs() < 1e-12);
    }

    #[test]
    fn shifted_single_pole() {
        let f = rational(&[1.0], &[-2.0, 1.0]);
        let n = shifted_counting(&f, &StepSpec::vanishing(c(0.5, 0.0)).unwrap(), 4.0).unwrap();
        assert!((n.value - (4.0f64 / 1.5).ln()).abs() < 1e-14);
    }

    #[test]
    fn common_zeros_of_square() {
        // z^2 - 1/4 and 2z + 1 share z = -1/2
        let f = rational(&[0.0, 0.0, 1.0], &[1.0]);
        let a = ValueTarget::Finite(c(0.25, 0.0));
        assert_eq!(common_zero_count(&f, &StepSpec::fixed(c(1.0, 0.0)).unwrap(), 1.0, &a).unwrap(), 1);
        assert_eq!(common_zero_count(&f, &StepSpec::vanishing(c(0.3, 0.0)).unwrap(), 1.0, &a).unwrap(), 0);
        let e = exp_z();
        let step = StepSpec::vanishing(c(0.1, 0.0)).unwrap();
        assert_eq!(common_zero_count(&e, &step, 5.0, &ValueTarget::Finite(c(1.0, 0.0))).unwrap(), 0);
    }

    #[test]
    fn tilde_for_exp_plus_one() {
        let f = FunctionModel::build_exp_affine(
            c(1.0, 0.0),
            &PolynomialCoeffs::from_real(&[0.0, 1.0]),
            c(1.0, 0.0),
            1000.0,
        )
        .unwrap();
        let step = StepSpec::vanishing(c(0.1, 0.0)).unwrap();
        let t = tilde_counting(&f, &step, 20.0, &ValueTarget::Finite(c(0.0, 0.0))).unwrap();
        assert!(t.full > 0.0);
        assert_eq!(t.common, 0.0);
        assert_eq!(t.value, t.full);
    }

    #[test]
    fn remainder_examples() {
        let step = StepSpec::vanishing(c(0.3, 0.0)).unwrap();
        assert_eq!(smt_remainder(&exp_z(), &step, 4.0).unwrap().value, 0.0);
        let z = rational(&[0.0, 1.0], &[1.0]);
        assert_eq!(smt_remainder(&z, &step, 4.0).unwrap().value, 0.0);
        // 1/(z-1): D f = -0.3 / ((z-0.7)(z-1)), zero-free
        let f = rational(&[1.0], &[-1.0, 1.0]);
        let v = smt_remainder(&f, &step, 3.0).unwrap().value;
        let expected = 2.0 * 3f64.ln() - (3f64.ln() + (3.0f64 / 0.7).ln());
        assert!((v - expected).abs() < 1e-12);
        let k = FunctionModel::constant(c(2.0, 0.0)).unwrap();
        assert!(matches!(smt_remainder(&k, &step, 2.0), Err(NevError::CapabilityRejected(_))));
    }

    #[test]
    fn exp_defects() {
        let grid = RadiusGrid::new(2.0, 2.0, 4).unwrap();
        let step = StepSpec::vanishing(c(0.1, 0.0)).unwrap();
        for a in [ValueTarget::Infinity, ValueTarget::Finite(c(0.0, 0.0))] {
            let s = defect_indices(&exp_z(), &step, &a, &grid, DEFAULT_TOL).unwrap();
            for d in &s.indices {
                assert_eq!((d.delta, d.vartheta, d.theta_big), (1.0, 0.0, 1.0));
            }
        }
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
