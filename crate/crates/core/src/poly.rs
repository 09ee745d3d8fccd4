//! Dense complex polynomials in ascending-degree order.

use serde::{Deserialize, Serialize};

use crate::complex::{ensure_finite, ComplexPoint};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolynomialCoeffs {
    coeffs: Vec<ComplexPoint>,
}

impl PolynomialCoeffs {
    /// Builds a polynomial, trimming exact-zero leading coefficients.
    pub fn new(coeffs: Vec<ComplexPoint>) -> Result<Self> {
        for c in &coeffs {
            ensure_finite(*c, "polynomial coefficient")?;
        }
        let mut p = PolynomialCoeffs { coeffs };
        p.trim_exact();
        Ok(p)
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        let mut p = PolynomialCoeffs {
            coeffs: coeffs.iter().map(|&c| ComplexPoint::new(c, 0.0)).collect(),
        };
        p.trim_exact();
        p
    }

    pub fn constant(c: ComplexPoint) -> Self {
        let mut p = PolynomialCoeffs { coeffs: vec![c] };
        p.trim_exact();
        p
    }

    /// Monic polynomial with the given roots (repeated by multiplicity).
    pub fn from_roots(roots: &[(ComplexPoint, u32)]) -> Self {
        let mut coeffs = vec![ComplexPoint::new(1.0, 0.0)];
        for &(root, mult) in roots {
            for _ in 0..mult {
                coeffs.push(ComplexPoint::new(0.0, 0.0));
                for k in (1..coeffs.len()).rev() {
                    let prev = coeffs[k - 1];
                    coeffs[k] = prev - root * coeffs[k];
                }
                coeffs[0] *= -root;
            }
        }
        let mut p = PolynomialCoeffs { coeffs };
        p.trim_exact();
        p
    }

    fn trim_exact(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.re == 0.0 && c.im == 0.0) {
            self.coeffs.pop();
        }
    }

    /// Drops leading coefficients whose modulus is below `rel` times the
    /// largest coefficient modulus. Used after cancelling subtractions.
    pub fn trim_relative(&mut self, rel: f64, reference: f64) {
        let scale = reference.max(self.max_norm());
        while matches!(self.coeffs.last(), Some(c) if c.norm() <= rel * scale) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[ComplexPoint] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> ComplexPoint {
        self.coeffs
            .last()
            .copied()
            .unwrap_or(ComplexPoint::new(0.0, 0.0))
    }

    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: ComplexPoint) -> ComplexPoint {
        self.coeffs
            .iter()
            .rev()
            .fold(ComplexPoint::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: ComplexPoint) -> (ComplexPoint, ComplexPoint) {
        let zero = ComplexPoint::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `sum |c_k| |z|^k`, the natural scale for the rounding error of `eval`.
    pub fn abs_eval(&self, z: ComplexPoint) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> PolynomialCoeffs {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        PolynomialCoeffs { coeffs }
    }

    pub fn scale(&self, s: ComplexPoint) -> PolynomialCoeffs {
        let mut p = PolynomialCoeffs {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        };
        p.trim_exact();
        p
    }

    pub fn mul(&self, other: &PolynomialCoeffs) -> PolynomialCoeffs {
        if self.is_zero() || other.is_zero() {
            return PolynomialCoeffs::default();
        }
        let mut coeffs = vec![ComplexPoint::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        let mut p = PolynomialCoeffs { coeffs };
        p.trim_exact();
        p
    }

    pub fn sub(&self, other: &PolynomialCoeffs) -> PolynomialCoeffs {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = ComplexPoint::new(0.0, 0.0);
        let coeffs = (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(zero) - other.coeffs.get(k).copied().unwrap_or(zero)
            })
            .collect();
        let mut p = PolynomialCoeffs { coeffs };
        p.trim_exact();
        p
    }

    pub fn add(&self, other: &PolynomialCoeffs) -> PolynomialCoeffs {
        self.sub(&other.scale(ComplexPoint::new(-1.0, 0.0)))
    }

    /// Coefficients of `p(z + c)` (Taylor shift by repeated synthetic division).
    pub fn shifted(&self, c: ComplexPoint) -> PolynomialCoeffs {
        let mut coeffs = self.coeffs.clone();
        let n = coeffs.len();
        for i in 0..n {
            for k in (i..n.saturating_sub(1)).rev() {
                let next = coeffs[k + 1];
                coeffs[k] += c * next;
            }
        }
        let mut p = PolynomialCoeffs { coeffs };
        p.trim_exact();
        p
    }
}
