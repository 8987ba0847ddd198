//! Dual-mode arithmetic: exact `i64` rationals or IEEE doubles.
//!
//! Every quantity in this crate is a [`Scalar`]. A scalar is either an exact
//! rational with 64-bit numerator and denominator, or a float. Arithmetic
//! between two rationals stays rational and is checked: if a normalized
//! result would not fit in `i64` components the operation reports
//! [`ScalarError::Overflow`] instead of silently degrading to floats.
//! As soon as a float enters an expression the result is a float.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational with 64-bit components, always stored normalized
/// (lowest terms, denominator positive).
pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    /// A rational operation produced components outside the `i64` range.
    #[error("rational overflow in {op}: result does not fit in 64-bit components")]
    Overflow { op: &'static str },
    #[error("division by zero")]
    DivisionByZero,
    #[error("rational denominator must be nonzero")]
    ZeroDenominator,
    /// `i64::MIN` is rejected so that negation and `abs` never overflow.
    #[error("rational component out of range (i64::MIN is not representable)")]
    ComponentOutOfRange,
    #[error("non-finite float is not a valid scalar")]
    NonFiniteFloat,
    #[error("malformed rational literal {text:?}: {reason}")]
    MalformedLiteral { text: String, reason: &'static str },
}

/// A number that knows whether it is exact.
///
/// Equality (`==`) is strict: both the mode and the value must match, so
/// `Scalar::integer(1) != Scalar::float(1.0)`. Use [`Scalar::numeric_eq`]
/// or [`Scalar::numeric_cmp`] to compare by value across modes.
#[derive(Debug, Clone, Copy)]
pub enum Scalar {
    Rational(Rational),
    Float(f64),
}

impl Scalar {
    /// Exact rational `num/den`, normalized. Rejects a zero denominator and
    /// `i64::MIN` components (whose magnitudes are not negatable).
    pub fn rational(num: i64, den: i64) -> Result<Scalar, ScalarError> {
        if den == 0 {
            return Err(ScalarError::ZeroDenominator);
        }
        if num == i64::MIN || den == i64::MIN {
            return Err(ScalarError::ComponentOutOfRange);
        }
        Ok(Scalar::Rational(Ratio::new(num, den)))
    }

    /// Exact integer.
    pub fn integer(n: i64) -> Scalar {
        Scalar::Rational(Ratio::from_integer(n))
    }

    /// Float-mode scalar. Panics in debug builds on non-finite input; use
    /// [`Scalar::try_float`] when the value comes from outside.
    pub fn float(x: f64) -> Scalar {
        debug_assert!(x.is_finite(), "non-finite float scalar");
        Scalar::Float(x)
    }

    pub fn try_float(x: f64) -> Result<Scalar, ScalarError> {
        if x.is_finite() {
            Ok(Scalar::Float(x))
        } else {
            Err(ScalarError::NonFiniteFloat)
        }
    }

    pub fn zero() -> Scalar {
        Scalar::integer(0)
    }

    pub fn one() -> Scalar {
        Scalar::integer(1)
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rational(_))
    }

    pub fn is_float(&self) -> bool {
        matches!(self, Scalar::Float(_))
    }

    /// Numeric zero test (mode-independent).
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_negative(),
            Scalar::Float(x) => *x < 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_positive(),
            Scalar::Float(x) => *x > 0.0,
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Scalar::Rational(r) => Some(*r),
            Scalar::Float(_) => None,
        }
    }

    /// Numeric value as a double (rationals round to nearest).
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64().expect("finite i64 ratio always converts to f64"),
            Scalar::Float(x) => *x,
        }
    }

    fn binop(
        &self,
        rhs: &Scalar,
        op: &'static str,
        exact: impl Fn(&Rational, &Rational) -> Option<Rational>,
        float: impl Fn(f64, f64) -> f64,
    ) -> Result<Scalar, ScalarError> {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => exact(a, b)
                .map(Scalar::Rational)
                .ok_or(ScalarError::Overflow { op }),
            _ => Ok(Scalar::Float(float(self.to_f64(), rhs.to_f64()))),
        }
    }

    pub fn checked_add(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        self.binop(rhs, "add", |a, b| a.checked_add(b), |a, b| a + b)
    }

    pub fn checked_sub(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        self.binop(rhs, "sub", |a, b| a.checked_sub(b), |a, b| a - b)
    }

    pub fn checked_mul(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        self.binop(rhs, "mul", |a, b| a.checked_mul(b), |a, b| a * b)
    }

    /// Division. A numerically zero divisor is an error in both modes.
    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        if rhs.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        self.binop(rhs, "div", |a, b| a.checked_div(b), |a, b| a / b)
    }

    pub fn neg(&self) -> Scalar {
        match self {
            // Safe: construction rejects i64::MIN components.
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            self.neg()
        } else {
            *self
        }
    }

    /// Value comparison across modes. Exact when both sides are rational;
    /// otherwise compares doubles. `None` only for non-finite floats.
    pub fn numeric_cmp(&self, rhs: &Scalar) -> Option<Ordering> {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&rhs.to_f64()),
        }
    }

    pub fn numeric_eq(&self, rhs: &Scalar) -> bool {
        self.numeric_cmp(rhs) == Some(Ordering::Equal)
    }

    /// Parses the canonical wire form of a rational: `p/q` in lowest terms
    /// with `q > 0`, or a bare integer. Rejects anything non-canonical
    /// (`"2/4"`, `"1/-3"`, `"+1"`, `"-0"`, `"03"`, whitespace).
    pub fn parse_canonical(text: &str) -> Result<Scalar, ScalarError> {
        let malformed = |reason| ScalarError::MalformedLiteral {
            text: text.to_owned(),
            reason,
        };
        let (num_text, den_text) = match text.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (text, None),
        };
        let num = parse_strict_int(num_text, true).ok_or_else(|| malformed("bad numerator"))?;
        let Some(den_text) = den_text else {
            return Scalar::rational(num, 1);
        };
        let den = parse_strict_int(den_text, false).ok_or_else(|| malformed("bad denominator"))?;
        if den <= 0 {
            return Err(malformed("denominator must be positive"));
        }
        if num_integer::gcd(num.unsigned_abs(), den.unsigned_abs()) != 1 {
            return Err(malformed("not in lowest terms"));
        }
        Scalar::rational(num, den)
    }

    /// Canonical wire form for rationals (`"p"` or `"p/q"`); `None` for floats.
    pub fn canonical_string(&self) -> Option<String> {
        match self {
            Scalar::Rational(r) => Some(if *r.denom() == 1 {
                format!("{}", r.numer())
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }),
            Scalar::Float(_) => None,
        }
    }
}

/// Decimal integer with no sign other than an optional leading `-`, no
/// leading zeros, no whitespace. Returns `None` on any deviation,
/// including values outside `i64` (so `i64::MIN`, whose magnitude cannot
/// be negated, never parses: `9223372036854775808` overflows first).
fn parse_strict_int(text: &str, allow_negative: bool) -> Option<i64> {
    let digits = match text.strip_prefix('-') {
        Some(rest) if allow_negative => rest,
        Some(_) => return None,
        None => text,
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return None;
    }
    let value: i64 = digits.parse().ok()?;
    if text.starts_with('-') {
        if value == 0 {
            return None; // "-0" is not canonical
        }
        Some(-value)
    } else {
        Some(value)
    }
}

impl PartialEq for Scalar {
    /// Strict equality: same mode and same value.
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(_) => f.write_str(&self.canonical_string().unwrap()),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Scalar {
    /// Rationals serialize as canonical strings, floats as JSON numbers.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Rational(_) => serializer.serialize_str(&self.canonical_string().unwrap()),
            Scalar::Float(x) => {
                if x.is_finite() {
                    serializer.serialize_f64(*x)
                } else {
                    Err(serde::ser::Error::custom("non-finite float scalar"))
                }
            }
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Scalar, D::Error> {
        struct ScalarVisitor;

        impl<'de> de::Visitor<'de> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a canonical rational string or a JSON number")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
                Scalar::parse_canonical(v).map_err(E::custom)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Scalar, E> {
                Scalar::try_float(v).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
                Ok(Scalar::Float(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
                Ok(Scalar::Float(v as f64))
            }
        }

        deserializer.deserialize_any(ScalarVisitor)
    }
}
