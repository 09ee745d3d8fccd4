//! Complex points, a log-scaled complex value type and the `a+bi` parser.

use num_complex::Complex64;

use crate::error::{NevError, Result};

/// A point of the complex plane. Constructors in this crate reject non-finite
/// coordinates before a point is stored.
pub type ComplexPoint = Complex64;

pub fn is_finite(z: ComplexPoint) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub fn ensure_finite(z: ComplexPoint, what: &str) -> Result<ComplexPoint> {
    if is_finite(z) {
        Ok(z)
    } else {
        Err(NevError::InvalidInput(format!("{what} is not finite: {z}")))
    }
}

/// A nonzero complex number stored as `unit * exp(log_abs)` with `|unit| = 1`,
/// or exact zero (`log_abs = -inf`). Keeps values such as `exp(z^2)` at
/// `|z| = 100` representable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    unit: Complex64,
    log_abs: f64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        unit: Complex64 { re: 0.0, im: 0.0 },
        log_abs: f64::NEG_INFINITY,
    };
    pub const ONE: Scaled = Scaled {
        unit: Complex64 { re: 1.0, im: 0.0 },
        log_abs: 0.0,
    };

    pub fn from_complex(z: Complex64) -> Scaled {
        let r = z.norm();
        if r == 0.0 {
            Scaled::ZERO
        } else {
            Scaled {
                unit: z / r,
                log_abs: r.ln(),
            }
        }
    }

    /// `exp(w)`.
    pub fn from_exp(w: Complex64) -> Scaled {
        Scaled {
            unit: Complex64::from_polar(1.0, w.im),
            log_abs: w.re,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }

    pub fn log_abs(&self) -> f64 {
        self.log_abs
    }

    pub fn unit(&self) -> Complex64 {
        self.unit
    }

    /// Plain complex value; overflows to infinity for huge moduli.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            self.unit * self.log_abs.exp()
        }
    }

    pub fn mul(self, other: Scaled) -> Scaled {
        if self.is_zero() || other.is_zero() {
            return Scaled::ZERO;
        }
        let u = self.unit * other.unit;
        Scaled {
            unit: u / u.norm(),
            log_abs: self.log_abs + other.log_abs,
        }
    }

    /// Division; `None` when dividing by exact zero.
    pub fn div(self, other: Scaled) -> Option<Scaled> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Scaled::ZERO);
        }
        let u = self.unit / other.unit;
        Some(Scaled {
            unit: u / u.norm(),
            log_abs: self.log_abs - other.log_abs,
        })
    }

    pub fn recip(self) -> Option<Scaled> {
        Scaled::ONE.div(self)
    }

    pub fn powi(self, n: u32) -> Scaled {
        if self.is_zero() {
            return if n == 0 { Scaled::ONE } else { Scaled::ZERO };
        }
        let u = self.unit.powu(n);
        Scaled {
            unit: u / u.norm(),
            log_abs: self.log_abs * n as f64,
        }
    }

    pub fn neg(self) -> Scaled {
        Scaled {
            unit: -self.unit,
            log_abs: self.log_abs,
        }
    }

    pub fn add(self, other: Scaled) -> Scaled {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.log_abs >= other.log_abs {
            (self, other)
        } else {
            (other, self)
        };
        let sum = big.unit + small.unit * (small.log_abs - big.log_abs).exp();
        let r = sum.norm();
        if r == 0.0 {
            return Scaled::ZERO;
        }
        Scaled {
            unit: sum / r,
            log_abs: big.log_abs + r.ln(),
        }
    }

    pub fn sub(self, other: Scaled) -> Scaled {
        self.add(other.neg())
    }
}

/// Value of a meromorphic model at a point: finite or a pole.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Finite(Scaled),
    Pole,
}

impl Value {
    pub fn finite(z: Complex64) -> Value {
        Value::Finite(Scaled::from_complex(z))
    }

    /// `log|f|`; `+inf` at a pole, `-inf` at a zero.
    pub fn log_abs(&self) -> f64 {
        match self {
            Value::Finite(s) => s.log_abs(),
            Value::Pole => f64::INFINITY,
        }
    }

    pub fn log_plus(&self) -> f64 {
        self.log_abs().max(0.0)
    }

    pub fn to_complex(&self) -> Option<Complex64> {
        match self {
            Value::Finite(s) => Some(s.to_complex()),
            Value::Pole => None,
        }
    }

    pub fn is_pole(&self) -> bool {
        matches!(self, Value::Pole)
    }

    pub fn add(self, other: Value) -> Value {
        match (self, other) {
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(a.add(b)),
            _ => Value::Pole,
        }
    }

    pub fn sub(self, other: Value) -> Value {
        match (self, other) {
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(a.sub(b)),
            _ => Value::Pole,
        }
    }

    pub fn mul(self, other: Value) -> Value {
        match (self, other) {
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(a.mul(b)),
            _ => Value::Pole,
        }
    }

    pub fn div(self, other: Value) -> Value {
        match (self, other) {
            (Value::Finite(a), Value::Finite(b)) => a.div(b).map_or(Value::Pole, Value::Finite),
            (Value::Finite(_), Value::Pole) => Value::Finite(Scaled::ZERO),
            _ => Value::Pole,
        }
    }

    pub fn recip(self) -> Value {
        Value::Finite(Scaled::ONE).div(self)
    }
}

/// Parses `a+bi` style complex literals: `2`, `-1.5`, `i`, `-i`, `0.3i`,
/// `1-2i`, `1e-3+2.5e-4i`. No whitespace is allowed.
pub fn parse_complex(text: &str) -> Result<ComplexPoint> {
    let bad = || NevError::InvalidInput(format!("cannot parse complex number '{text}'"));
    if text.is_empty() || text.chars().any(char::is_whitespace) {
        return Err(bad());
    }
    let parse_real = |s: &str| -> Result<f64> {
        let v: f64 = s.parse().map_err(|_| bad())?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad())
        }
    };
    let Some(body) = text.strip_suffix('i') else {
        return Ok(ComplexPoint::new(parse_real(text)?, 0.0));
    };
    // split at the last sign that is not the leading sign and not an exponent sign
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let ch = bytes[idx];
        if (ch == b'+' || ch == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
            split = Some(idx);
            break;
        }
    }
    let (re_text, im_text) = match split {
        Some(idx) => (&body[..idx], &body[idx..]),
        None => ("", body),
    };
    let re = if re_text.is_empty() {
        0.0
    } else {
        parse_real(re_text)?
    };
    let im = match im_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => parse_real(other)?,
    };
    Ok(ComplexPoint::new(re, im))
}

/// Inverse of [`parse_complex`] for round-trippable display.
pub fn format_complex(z: ComplexPoint) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}
