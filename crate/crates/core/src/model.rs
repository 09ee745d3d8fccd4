//! Concrete meromorphic models: an evaluator plus zero and pole divisors.
//!
//! Rational and exponential models keep a closed algebraic form so that
//! shifts, differences, reciprocals and quotients of them stay exact. Other
//! combinations fall back to an expression tree whose divisors are
//! propagated when they can be, and flagged unknown (`None`) otherwise.

use std::f64::consts::TAU;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{ensure_finite, ComplexPoint, Scaled, Value};
use crate::divisor::{cancel_common, Divisor};
use crate::error::{invalid, NevError, Result};
use crate::poly::PolynomialCoeffs;
use crate::roots::find_roots;

/// Divisor extent used when a model with infinitely many zeros or poles must
/// list them (e.g. `e^z - 1`).
pub const DEFAULT_EXTENT: f64 = 1000.0;

/// Relative tail bound for truncating canonical products.
pub const PRODUCT_TAIL_TOL: f64 = 1e-10;

/// Cap on `sum extent / |a_k|` for canonical products.
pub const PRODUCT_CONVERGENCE_CAP: f64 = 1e6;

/// Relative distance at which zeros and poles of a combined model cancel.
/// Tighter than the common-zero matching tolerance so that tiny steps do not
/// cancel a pole against its own translate.
pub const CANCEL_REL_TOL: f64 = 1e-8;

/// `|z - b|` below this counts as sitting on a pole.
const POLE_GUARD: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Rational,
    ExpPolynomial,
    CanonicalProduct,
    Shifted,
    Difference,
    AlgebraicCombination,
}

#[derive(Clone, Debug)]
struct RationalForm {
    /// Zero scale means the model is identically zero.
    scale: ComplexPoint,
    zeros: Vec<(ComplexPoint, u32)>,
    poles: Vec<(ComplexPoint, u32)>,
}

/// `scale * exp(exponent(z)) + offset`.
#[derive(Clone, Debug)]
struct ExpForm {
    scale: ComplexPoint,
    exponent: PolynomialCoeffs,
    offset: ComplexPoint,
}

#[derive(Clone, Debug)]
enum Repr {
    Rational(RationalForm),
    Exp(ExpForm),
    /// `prod (1 - z/a)^m` over the retained factors.
    Product(Vec<(ComplexPoint, u32)>),
    Shift(Arc<FunctionModel>, ComplexPoint),
    Difference(Arc<FunctionModel>, ComplexPoint),
    SubConst(Arc<FunctionModel>, ComplexPoint),
    Reciprocal(Arc<FunctionModel>),
    Quotient(Arc<FunctionModel>, Arc<FunctionModel>),
}

/// Operand for [`FunctionModel::combine`].
#[derive(Clone, Debug)]
pub enum Combination<'a> {
    SubtractConstant(ComplexPoint),
    Reciprocal,
    QuotientWith(&'a FunctionModel),
}

/// A meromorphic function with its divisors. Immutable after construction.
#[derive(Clone, Debug)]
pub struct FunctionModel {
    repr: Repr,
    kind: ModelKind,
    zeros: Option<Divisor>,
    poles: Option<Divisor>,
    extent: f64,
    order_hint: Option<f64>,
}

impl FunctionModel {
    // ---- constructors ---------------------------------------------------

    /// `num / den`. Divisors come from the root finder; `extent` bounds the
    /// radius up to which they are reported.
    pub fn build_rational(num: &PolynomialCoeffs, den: &PolynomialCoeffs, extent: f64) -> Result<FunctionModel> {
        check_extent(extent)?;
        if den.is_zero() {
            return invalid("denominator polynomial is identically zero");
        }
        if num.is_zero() {
            return Ok(FunctionModel::from_rational(
                RationalForm {
                    scale: ComplexPoint::new(0.0, 0.0),
                    zeros: Vec::new(),
                    poles: Vec::new(),
                },
                extent,
                ModelKind::Rational,
                Some(0.0),
            ));
        }
        let zeros = find_roots(num)?;
        let poles = find_roots(den)?;
        for (z, _) in &zeros {
            if poles.iter().any(|(p, _)| (p - z).norm() <= CANCEL_REL_TOL * z.norm().max(1.0)) {
                return invalid(format!("numerator and denominator share the root {z}"));
            }
        }
        let form = RationalForm {
            scale: num.leading() / den.leading(),
            zeros,
            poles,
        };
        Ok(FunctionModel::from_rational(form, extent, ModelKind::Rational, Some(0.0)))
    }

    /// The constant function `c`.
    pub fn constant(c: ComplexPoint) -> Result<FunctionModel> {
        ensure_finite(c, "constant")?;
        FunctionModel::build_rational(&PolynomialCoeffs::constant(c), &PolynomialCoeffs::from_real(&[1.0]), f64::INFINITY)
    }

    /// `exp(p(z))`.
    pub fn build_exp_poly(p: &PolynomialCoeffs) -> Result<FunctionModel> {
        FunctionModel::build_exp_affine(ComplexPoint::new(1.0, 0.0), p, ComplexPoint::new(0.0, 0.0), DEFAULT_EXTENT)
    }

    /// `scale * exp(p(z)) + offset`. `zero_extent` is the radius up to which
    /// the zeros are listed when `offset != 0`.
    pub fn build_exp_affine(
        scale: ComplexPoint,
        p: &PolynomialCoeffs,
        offset: ComplexPoint,
        zero_extent: f64,
    ) -> Result<FunctionModel> {
        ensure_finite(scale, "exponential scale")?;
        ensure_finite(offset, "exponential offset")?;
        check_extent(zero_extent)?;
        let form = ExpForm {
            scale,
            exponent: p.clone(),
            offset,
        };
        let order = p.degree().unwrap_or(0) as f64;
        Ok(FunctionModel::from_exp(form, zero_extent, ModelKind::ExpPolynomial, Some(order)))
    }

    /// Genus-zero product `prod (1 - z/a_k)^{m_k}` over the given zeros.
    /// Entries beyond `extent` still enter the evaluator (until the tail is
    /// below [`PRODUCT_TAIL_TOL`]) but the reported divisor stops at `extent`.
    pub fn build_canonical_product(
        zeros: &[(ComplexPoint, u32)],
        extent: f64,
        order_hint: Option<f64>,
    ) -> Result<FunctionModel> {
        check_extent(extent)?;
        if !extent.is_finite() {
            return invalid("canonical products need a finite extent");
        }
        let mut factors: Vec<(ComplexPoint, u32)> = Vec::with_capacity(zeros.len());
        for &(a, m) in zeros {
            ensure_finite(a, "product zero")?;
            if a.norm() == 0.0 {
                return invalid("canonical product zeros must be nonzero");
            }
            if m == 0 {
                return invalid("multiplicities must be positive");
            }
            factors.push((a, m));
        }
        factors.sort_by(|x, y| x.0.norm().total_cmp(&y.0.norm()));
        let total: f64 = factors.iter().map(|(a, m)| *m as f64 * extent / a.norm()).sum();
        if total >= PRODUCT_CONVERGENCE_CAP {
            return invalid(format!(
                "product does not converge fast enough on the extent disk (sum {total:.3e})"
            ));
        }
        // drop the tail once sum extent/|a| over it is negligible
        let mut tail = 0.0;
        let mut keep = factors.len();
        for (idx, (a, m)) in factors.iter().enumerate().rev() {
            tail += *m as f64 * extent / a.norm();
            if tail >= PRODUCT_TAIL_TOL {
                keep = idx + 1;
                break;
            }
            keep = idx;
        }
        let divisor = Divisor::truncated(factors.iter().copied(), extent)?;
        factors.truncate(keep);
        Ok(FunctionModel {
            repr: Repr::Product(factors),
            kind: ModelKind::CanonicalProduct,
            zeros: Some(divisor),
            poles: Some(Divisor::empty(extent)),
            extent,
            order_hint: order_hint.filter(|s| s.is_finite() && *s >= 0.0),
        })
    }

    fn from_rational(form: RationalForm, extent: f64, kind: ModelKind, order_hint: Option<f64>) -> FunctionModel {
        let zeros = Divisor::truncated(form.zeros.iter().copied(), extent).expect("validated roots");
        let poles = Divisor::truncated(form.poles.iter().copied(), extent).expect("validated roots");
        FunctionModel {
            repr: Repr::Rational(form),
            kind,
            zeros: Some(zeros),
            poles: Some(poles),
            extent,
            order_hint,
        }
    }

    fn from_exp(form: ExpForm, zero_extent: f64, kind: ModelKind, order_hint: Option<f64>) -> FunctionModel {
        // zero-free exponentials are described on the whole plane
        let zero_free = !is_nonzero(form.offset) || form.exponent.degree().unwrap_or(0) == 0;
        let extent = if zero_free { f64::INFINITY } else { zero_extent };
        let zeros = if zero_free {
            Some(Divisor::empty(extent))
        } else {
            exp_zeros(&form, extent)
        };
        FunctionModel {
            repr: Repr::Exp(form),
            kind,
            zeros,
            poles: Some(Divisor::empty(extent)),
            extent,
            order_hint,
        }
    }

    fn node(repr: Repr, kind: ModelKind, zeros: Option<Divisor>, poles: Option<Divisor>, extent: f64, order_hint: Option<f64>) -> FunctionModel {
        FunctionModel {
            repr,
            kind,
            zeros: zeros.map(|d| d.with_extent(extent)),
            poles: poles.map(|d| d.with_extent(extent)),
            extent,
            order_hint,
        }
    }

    // ---- accessors ------------------------------------------------------

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn zeros(&self) -> Option<&Divisor> {
        self.zeros.as_ref()
    }

    pub fn poles(&self) -> Option<&Divisor> {
        self.poles.as_ref()
    }

    pub fn require_zeros(&self) -> Result<&Divisor> {
        self.zeros.as_ref().ok_or_else(|| {
            NevError::CapabilityRejected("zero divisor of this model is unknown".into())
        })
    }

    pub fn require_poles(&self) -> Result<&Divisor> {
        self.poles.as_ref().ok_or_else(|| {
            NevError::CapabilityRejected("pole divisor of this model is unknown".into())
        })
    }

    pub fn has_divisors(&self) -> bool {
        self.zeros.is_some() && self.poles.is_some()
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn order_hint(&self) -> Option<f64> {
        self.order_hint
    }

    pub fn with_order_hint(mut self, order_hint: Option<f64>) -> FunctionModel {
        self.order_hint = order_hint;
        self
    }

    /// True when the closed form shows that the model vanishes everywhere.
    pub fn is_identically_zero(&self) -> bool {
        match &self.repr {
            Repr::Rational(r) => !is_nonzero(r.scale),
            Repr::Exp(e) => {
                !is_nonzero(e.offset) && !is_nonzero(e.scale)
                    || (e.exponent.degree().unwrap_or(0) == 0
                        && !is_nonzero(e.scale * e.exponent.eval(ComplexPoint::new(0.0, 0.0)).exp() + e.offset))
            }
            Repr::Product(_) => false,
            Repr::Shift(f, _) => f.is_identically_zero(),
            Repr::Difference(f, _) => f.is_identically_zero(),
            Repr::SubConst(f, a) => f.is_identically_zero() && !is_nonzero(*a),
            Repr::Reciprocal(_) => false,
            Repr::Quotient(f, _) => f.is_identically_zero(),
        }
    }

    /// True for models kept in closed rational form.
    pub fn is_rational(&self) -> bool {
        matches!(self.repr, Repr::Rational(_))
    }

    /// Numerator and denominator roots plus scale for rational models.
    pub fn rational_parts(&self) -> Option<(ComplexPoint, Vec<(ComplexPoint, u32)>, Vec<(ComplexPoint, u32)>)> {
        match &self.repr {
            Repr::Rational(r) => Some((r.scale, r.zeros.clone(), r.poles.clone())),
            _ => None,
        }
    }

    /// Candidate pole locations, available even when the pole divisor is
    /// unknown (a superset of the true poles, possibly incomplete for models
    /// whose base zeros are unknown).
    pub fn singular_points(&self) -> Vec<ComplexPoint> {
        match &self.repr {
            Repr::Rational(r) => r.poles.iter().map(|p| p.0).collect(),
            Repr::Exp(_) | Repr::Product(_) => Vec::new(),
            Repr::Shift(f, c) => f.singular_points().into_iter().map(|p| p - c).collect(),
            Repr::Difference(f, c) => {
                let base = f.singular_points();
                let mut out: Vec<ComplexPoint> = base.iter().map(|p| p - c).collect();
                out.extend(base);
                out
            }
            Repr::SubConst(f, _) => f.singular_points(),
            Repr::Reciprocal(f) => f.zeros.as_ref().map(|d| d.pairs().into_iter().map(|p| p.0).collect()).unwrap_or_default(),
            Repr::Quotient(f, g) => {
                let mut out = f.singular_points();
                if let Some(d) = &g.zeros {
                    out.extend(d.pairs().into_iter().map(|p| p.0));
                }
                out
            }
        }
    }

    // ---- evaluation -----------------------------------------------------

    pub fn eval(&self, z: ComplexPoint) -> Value {
        match &self.repr {
            Repr::Rational(r) => eval_rational(r, z),
            Repr::Exp(e) => {
                let main = Scaled::from_exp(e.exponent.eval(z)).mul(Scaled::from_complex(e.scale));
                Value::Finite(main.add(Scaled::from_complex(e.offset)))
            }
            Repr::Product(factors) => {
                let mut acc = Scaled::ONE;
                for &(a, m) in factors {
                    let term = Scaled::from_complex(ComplexPoint::new(1.0, 0.0) - z / a);
                    acc = acc.mul(if m == 1 { term } else { term.powi(m) });
                }
                Value::Finite(acc)
            }
            Repr::Shift(f, c) => f.eval(z + c),
            Repr::Difference(f, c) => f.eval(z + c).sub(f.eval(z)),
            Repr::SubConst(f, a) => f.eval(z).sub(Value::finite(*a)),
            Repr::Reciprocal(f) => f.eval(z).recip(),
            Repr::Quotient(f, g) => f.eval(z).div(g.eval(z)),
        }
    }

    /// Plain complex value, `None` at a pole.
    pub fn eval_complex(&self, z: ComplexPoint) -> Option<ComplexPoint> {
        self.eval(z).to_complex()
    }

    // ---- derived models -------------------------------------------------

    /// `z -> f(z + c)`.
    pub fn shift(&self, c: ComplexPoint) -> Result<FunctionModel> {
        ensure_finite(c, "shift")?;
        let extent = self.extent - c.norm();
        if extent <= 0.0 {
            return invalid(format!("shift by |c| = {} exhausts extent {}", c.norm(), self.extent));
        }
        match &self.repr {
            Repr::Rational(r) => {
                let form = RationalForm {
                    scale: r.scale,
                    zeros: r.zeros.iter().map(|&(z, m)| (z - c, m)).collect(),
                    poles: r.poles.iter().map(|&(p, m)| (p - c, m)).collect(),
                };
                Ok(FunctionModel::from_rational(form, extent, ModelKind::Shifted, self.order_hint))
            }
            Repr::Exp(e) => {
                let form = ExpForm {
                    scale: e.scale,
                    exponent: e.exponent.shifted(c),
                    offset: e.offset,
                };
                let zero_extent = if extent.is_finite() { extent } else { DEFAULT_EXTENT };
                Ok(FunctionModel::from_exp(form, zero_extent, ModelKind::Shifted, self.order_hint))
            }
            Repr::Shift(f, c0) => f.shift(c0 + c).map(|m| FunctionModel { extent: m.extent.min(extent), ..m }),
            _ => {
                let zeros = self.zeros.as_ref().map(|d| d.translated(c)).transpose()?;
                let poles = self.poles.as_ref().map(|d| d.translated(c)).transpose()?;
                Ok(FunctionModel::node(
                    Repr::Shift(Arc::new(self.clone()), c),
                    ModelKind::Shifted,
                    zeros,
                    poles,
                    extent,
                    self.order_hint,
                ))
            }
        }
    }

    /// `z -> f(z + c) - f(z)`.
    pub fn difference(&self, c: ComplexPoint) -> Result<FunctionModel> {
        ensure_finite(c, "step")?;
        if c.norm() == 0.0 {
            return invalid("difference step must be nonzero");
        }
        let extent = self.extent - c.norm();
        if extent <= 0.0 {
            return invalid(format!("step |c| = {} exhausts extent {}", c.norm(), self.extent));
        }
        match &self.repr {
            Repr::Rational(r) => {
                let form = rational_difference(r, c)?;
                Ok(FunctionModel::from_rational(form, extent, ModelKind::Difference, self.order_hint))
            }
            Repr::Exp(e) if e.exponent.degree().unwrap_or(0) <= 1 => {
                let slope = e.exponent.coeffs().get(1).copied().unwrap_or(ComplexPoint::new(0.0, 0.0));
                let factor = (slope * c).exp() - 1.0;
                let form = ExpForm {
                    scale: e.scale * factor,
                    exponent: e.exponent.clone(),
                    offset: ComplexPoint::new(0.0, 0.0),
                };
                if !is_nonzero(form.scale) {
                    return FunctionModel::constant(ComplexPoint::new(0.0, 0.0));
                }
                Ok(FunctionModel::from_exp(form, DEFAULT_EXTENT, ModelKind::Difference, self.order_hint))
            }
            _ => {
                // poles of the difference are unknown unless the base is entire
                let poles = match &self.poles {
                    Some(d) if d.is_empty() => Some(Divisor::empty(extent)),
                    _ => None,
                };
                Ok(FunctionModel::node(
                    Repr::Difference(Arc::new(self.clone()), c),
                    ModelKind::Difference,
                    None,
                    poles,
                    extent,
                    self.order_hint,
                ))
            }
        }
    }

    pub fn combine(&self, how: Combination<'_>) -> Result<FunctionModel> {
        match how {
            Combination::SubtractConstant(a) => self.subtract_constant(a),
            Combination::Reciprocal => self.reciprocal(),
            Combination::QuotientWith(g) => self.quotient(g),
        }
    }

    /// `f - a`.
    pub fn subtract_constant(&self, a: ComplexPoint) -> Result<FunctionModel> {
        ensure_finite(a, "constant")?;
        if !is_nonzero(a) {
            return Ok(FunctionModel {
                kind: ModelKind::AlgebraicCombination,
                ..self.clone()
            });
        }
        match &self.repr {
            Repr::Rational(r) => {
                let form = rational_subtract(r, a)?;
                Ok(FunctionModel::from_rational(form, self.extent, ModelKind::AlgebraicCombination, self.order_hint))
            }
            Repr::Exp(e) => {
                let form = ExpForm {
                    scale: e.scale,
                    exponent: e.exponent.clone(),
                    offset: e.offset - a,
                };
                let zero_extent = if self.extent.is_finite() { self.extent } else { DEFAULT_EXTENT };
                Ok(FunctionModel::from_exp(form, zero_extent, ModelKind::AlgebraicCombination, self.order_hint))
            }
            _ => Ok(FunctionModel::node(
                Repr::SubConst(Arc::new(self.clone()), a),
                ModelKind::AlgebraicCombination,
                None,
                self.poles.clone(),
                self.extent,
                self.order_hint,
            )),
        }
    }

    /// `1 / f`.
    pub fn reciprocal(&self) -> Result<FunctionModel> {
        if self.is_identically_zero() {
            return invalid("reciprocal of an identically zero model");
        }
        match &self.repr {
            Repr::Rational(r) => {
                let form = RationalForm {
                    scale: r.scale.inv(),
                    zeros: r.poles.clone(),
                    poles: r.zeros.clone(),
                };
                Ok(FunctionModel::from_rational(form, self.extent, ModelKind::AlgebraicCombination, self.order_hint))
            }
            Repr::Exp(e) if !is_nonzero(e.offset) => {
                let form = ExpForm {
                    scale: e.scale.inv(),
                    exponent: e.exponent.scale(ComplexPoint::new(-1.0, 0.0)),
                    offset: ComplexPoint::new(0.0, 0.0),
                };
                Ok(FunctionModel::from_exp(form, DEFAULT_EXTENT, ModelKind::AlgebraicCombination, self.order_hint))
            }
            Repr::Reciprocal(f) => Ok(FunctionModel {
                kind: ModelKind::AlgebraicCombination,
                ..(**f).clone()
            }),
            _ => Ok(FunctionModel::node(
                Repr::Reciprocal(Arc::new(self.clone())),
                ModelKind::AlgebraicCombination,
                self.poles.clone(),
                self.zeros.clone(),
                self.extent,
                self.order_hint,
            )),
        }
    }

    /// `f / g`, cancelling common divisor entries at minimum multiplicity.
    pub fn quotient(&self, g: &FunctionModel) -> Result<FunctionModel> {
        if g.is_identically_zero() {
            return invalid("quotient by an identically zero model");
        }
        let extent = self.extent.min(g.extent);
        let order = match (self.order_hint, g.order_hint) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        match (&self.repr, &g.repr) {
            (Repr::Rational(a), Repr::Rational(b)) => {
                let mut zeros = a.zeros.clone();
                zeros.extend(b.poles.iter().copied());
                let mut poles = a.poles.clone();
                poles.extend(b.zeros.iter().copied());
                let (zeros, poles) = cancel_common(&merge_points(zeros), &merge_points(poles), CANCEL_REL_TOL);
                let form = RationalForm {
                    scale: a.scale / b.scale,
                    zeros,
                    poles,
                };
                Ok(FunctionModel::from_rational(form, extent, ModelKind::AlgebraicCombination, order))
            }
            (Repr::Exp(a), Repr::Exp(b)) if !is_nonzero(a.offset) && !is_nonzero(b.offset) => {
                let form = ExpForm {
                    scale: a.scale / b.scale,
                    exponent: a.exponent.sub(&b.exponent),
                    offset: ComplexPoint::new(0.0, 0.0),
                };
                Ok(FunctionModel::from_exp(form, DEFAULT_EXTENT, ModelKind::AlgebraicCombination, order))
            }
            _ => {
                let (zeros, poles) = match (&self.zeros, &self.poles, &g.zeros, &g.poles) {
                    (Some(fz), Some(fp), Some(gz), Some(gp)) => {
                        let z = fz.union(gp).with_extent(extent);
                        let p = fp.union(gz).with_extent(extent);
                        let (zc, pc) = cancel_common(&z.pairs(), &p.pairs(), CANCEL_REL_TOL);
                        (
                            Some(Divisor::truncated(zc, extent)?),
                            Some(Divisor::truncated(pc, extent)?),
                        )
                    }
                    _ => (None, None),
                };
                Ok(FunctionModel::node(
                    Repr::Quotient(Arc::new(self.clone()), Arc::new(g.clone())),
                    ModelKind::AlgebraicCombination,
                    zeros,
                    poles,
                    extent,
                    order,
                ))
            }
        }
    }
}

fn check_extent(extent: f64) -> Result<()> {
    if extent.is_nan() || extent <= 0.0 {
        return invalid(format!("extent must be positive, got {extent}"));
    }
    Ok(())
}

fn is_nonzero(c: ComplexPoint) -> bool {
    c.re != 0.0 || c.im != 0.0
}

fn eval_rational(r: &RationalForm, z: ComplexPoint) -> Value {
    if !is_nonzero(r.scale) {
        return Value::Finite(Scaled::ZERO);
    }
    let mut den = Scaled::ONE;
    for &(p, m) in &r.poles {
        let d = z - p;
        if d.norm() < POLE_GUARD {
            return Value::Pole;
        }
        den = den.mul(Scaled::from_complex(d).powi(m));
    }
    let mut num = Scaled::from_complex(r.scale);
    for &(a, m) in &r.zeros {
        num = num.mul(Scaled::from_complex(z - a).powi(m));
    }
    Value::Finite(num.div(den).expect("nonzero denominator"))
}

fn merge_points(points: Vec<(ComplexPoint, u32)>) -> Vec<(ComplexPoint, u32)> {
    let mut out: Vec<(ComplexPoint, u32)> = Vec::new();
    for (z, m) in points {
        match out.iter_mut().find(|(w, _)| (w - z).norm() <= CANCEL_REL_TOL * z.norm().max(1.0)) {
            Some(hit) => hit.1 += m,
            None => out.push((z, m)),
        }
    }
    out
}

/// Numerator `s (P(z+c) Q(z) - P(z) Q(z+c))` over `Q(z+c) Q(z)` with common
/// roots cancelled. The numerator is summed as the Taylor series
/// `sum_j c^j/j! (P^(j) Q - P Q^(j))`, which avoids the cancellation of the
/// direct subtraction when `c` is small.
fn rational_difference(r: &RationalForm, c: ComplexPoint) -> Result<RationalForm> {
    let zero = RationalForm {
        scale: ComplexPoint::new(0.0, 0.0),
        zeros: Vec::new(),
        poles: Vec::new(),
    };
    if !is_nonzero(r.scale) {
        return Ok(zero);
    }
    let p = PolynomialCoeffs::from_roots(&r.zeros);
    let q = PolynomialCoeffs::from_roots(&r.poles);
    let order = p.degree().unwrap_or(0).max(q.degree().unwrap_or(0));
    let mut numerator = PolynomialCoeffs::default();
    let mut reference: f64 = 0.0;
    let (mut pj, mut qj) = (p.clone(), q.clone());
    let mut weight = ComplexPoint::new(1.0, 0.0);
    for j in 1..=order {
        pj = pj.derivative();
        qj = qj.derivative();
        weight *= c / j as f64;
        let term = pj.mul(&q).sub(&p.mul(&qj)).scale(weight);
        reference = reference.max(pj.mul(&q).max_norm().max(p.mul(&qj).max_norm()) * weight.norm());
        numerator = numerator.add(&term);
    }
    numerator.trim_relative(1e-14, reference);
    if numerator.is_zero() {
        return Ok(zero);
    }
    let zeros = find_roots(&numerator)?;
    let mut poles: Vec<(ComplexPoint, u32)> = r.poles.iter().map(|&(b, m)| (b - c, m)).collect();
    poles.extend(r.poles.iter().copied());
    let (zeros, poles) = cancel_common(&zeros, &merge_points(poles), CANCEL_REL_TOL);
    Ok(RationalForm {
        scale: r.scale * numerator.leading(),
        zeros,
        poles,
    })
}

/// `s P - a Q` over `Q`.
fn rational_subtract(r: &RationalForm, a: ComplexPoint) -> Result<RationalForm> {
    let p = PolynomialCoeffs::from_roots(&r.zeros).scale(r.scale);
    let q = PolynomialCoeffs::from_roots(&r.poles);
    let aq = q.scale(a);
    let reference = p.max_norm().max(aq.max_norm());
    let mut numerator = p.sub(&aq);
    numerator.trim_relative(1e-14, reference);
    if numerator.is_zero() {
        return Ok(RationalForm {
            scale: ComplexPoint::new(0.0, 0.0),
            zeros: Vec::new(),
            poles: Vec::new(),
        });
    }
    let zeros = find_roots(&numerator)?;
    let (zeros, poles) = cancel_common(&zeros, &r.poles, CANCEL_REL_TOL);
    Ok(RationalForm {
        scale: numerator.leading(),
        zeros,
        poles,
    })
}

/// Zeros of `s e^{p} + B`: empty when `B = 0`, explicit when `p` is affine,
/// unknown otherwise.
fn exp_zeros(e: &ExpForm, extent: f64) -> Option<Divisor> {
    if !is_nonzero(e.offset) || !is_nonzero(e.scale) {
        return Some(Divisor::empty(extent));
    }
    match e.exponent.degree() {
        None | Some(0) => Some(Divisor::empty(extent)),
        Some(1) => {
            let p0 = e.exponent.coeffs()[0];
            let p1 = e.exponent.coeffs()[1];
            let target = (-e.offset / e.scale).ln();
            let span = ((extent * p1.norm() + (target - p0).norm()) / TAU).ceil() as i64 + 1;
            let points = (-span..=span).map(|k| ((target + ComplexPoint::new(0.0, TAU * k as f64) - p0) / p1, 1u32));
            Divisor::truncated(points, extent).ok()
        }
        Some(_) => None,
    }
}
