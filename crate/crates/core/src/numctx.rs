//! Arbitrary-precision real arithmetic.
//!
//! A [`NumericContext`] fixes the working precision in significant decimal
//! digits; every [`Real`] produced through it is an MPFR float rounded to
//! nearest at the matching binary precision. There is no process-global
//! precision setting: a context is a small `Copy` value passed wherever
//! numbers are created.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use thiserror::Error;

/// Smallest supported working precision, in decimal digits.
pub const MIN_DIGITS: u32 = 30;
/// Working precision used when none is requested.
pub const DEFAULT_DIGITS: u32 = 120;

const GUARD_BITS: u32 = 16;
const LOG2_10: f64 = std::f64::consts::LOG2_10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{op} is undefined at {arg}")]
    Domain { op: &'static str, arg: String },
    #[error("{op} produced a non-finite value")]
    NonFinite { op: &'static str },
    #[error("precision of {requested} digits is below the supported minimum of {minimum}")]
    PrecisionTooLow { requested: u32, minimum: u32 },
    #[error("invalid decimal number {text:?}")]
    Parse { text: String },
}

/// Precision contract shared by every computation in a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NumericContext {
    digits: u32,
    bits: u32,
}

impl Default for NumericContext {
    fn default() -> Self {
        Self::new(DEFAULT_DIGITS).expect("default precision is supported")
    }
}

impl NumericContext {
    pub fn new(digits: u32) -> Result<Self, NumError> {
        if digits < MIN_DIGITS {
            return Err(NumError::PrecisionTooLow {
                requested: digits,
                minimum: MIN_DIGITS,
            });
        }
        let bits = (f64::from(digits) * LOG2_10).ceil() as u32 + GUARD_BITS;
        Ok(Self { digits, bits })
    }

    /// Significant decimal digits guaranteed by this context.
    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Binary precision of the underlying floats.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn zero(&self) -> Real {
        Real(Float::new(self.bits))
    }

    pub fn one(&self) -> Real {
        self.int(1)
    }

    pub fn int(&self, value: i64) -> Real {
        Real(Float::with_val(self.bits, value))
    }

    /// Correctly rounded `num / den`.
    pub fn ratio(&self, num: i64, den: i64) -> Result<Real, NumError> {
        if den == 0 {
            return Err(NumError::DivisionByZero);
        }
        Ok(self.rational(&Rational::from((num, den))))
    }

    pub fn rational(&self, value: &Rational) -> Real {
        Real(Float::with_val(self.bits, value))
    }

    pub fn from_f64(&self, value: f64) -> Result<Real, NumError> {
        if !value.is_finite() {
            return Err(NumError::NonFinite { op: "from_f64" });
        }
        Ok(Real(Float::with_val(self.bits, value)))
    }

    /// Parses a decimal literal (optionally signed, optionally with an
    /// exponent) and rounds it once to the context precision.
    pub fn parse(&self, text: &str) -> Result<Real, NumError> {
        let trimmed = text.trim();
        let parse_err = || NumError::Parse {
            text: text.to_string(),
        };
        if trimmed.is_empty()
            || !trimmed
                .chars()
                .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'))
        {
            return Err(parse_err());
        }
        let parsed = Float::parse(trimmed).map_err(|_| parse_err())?;
        let value = Float::with_val(self.bits, parsed);
        if !value.is_finite() {
            return Err(parse_err());
        }
        Ok(Real(value))
    }

    pub fn pi(&self) -> Real {
        Real(Float::with_val(self.bits, Constant::Pi))
    }

    /// `10^exp`, correctly rounded.
    pub fn pow10(&self, exp: i32) -> Real {
        let ten = Float::with_val(self.bits, 10);
        Real(Float::with_val(self.bits, ten.pow(exp)))
    }

    /// Magnitudes below this are treated as a vanished denominator.
    pub fn vanishing_threshold(&self) -> Real {
        self.pow10(-2 * self.digits as i32)
    }

    pub fn is_vanishing(&self, value: &Real) -> bool {
        value.abs() < self.vanishing_threshold()
    }

    /// Magnitudes below this may be reported as exact zero.
    pub fn flush_threshold(&self) -> Real {
        self.pow10(-4 * self.digits as i32)
    }

    /// Re-rounds `value` to this context's precision.
    pub fn round(&self, value: &Real) -> Real {
        Real(Float::with_val(self.bits, &value.0))
    }
}

/// Elementary functions available on [`Real`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transcendental {
    Exp,
    Sin,
    Cos,
    Ln,
    Sqrt,
}

impl Transcendental {
    pub fn name(self) -> &'static str {
        match self {
            Transcendental::Exp => "exp",
            Transcendental::Sin => "sin",
            Transcendental::Cos => "cos",
            Transcendental::Ln => "ln",
            Transcendental::Sqrt => "sqrt",
        }
    }
}

/// A finite arbitrary-precision real number.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Real(Float);

impl Real {
    fn prec(&self) -> u32 {
        self.0.prec()
    }

    fn finite(value: Float, op: &'static str) -> Result<Real, NumError> {
        if value.is_finite() {
            Ok(Real(value))
        } else {
            Err(NumError::NonFinite { op })
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn abs(&self) -> Real {
        Real(Float::with_val(self.prec(), self.0.abs_ref()))
    }

    pub fn checked_div(&self, rhs: &Real) -> Result<Real, NumError> {
        if rhs.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        let prec = self.prec().max(rhs.prec());
        Real::finite(Float::with_val(prec, &self.0 / &rhs.0), "div")
    }

    pub fn apply(&self, func: Transcendental) -> Result<Real, NumError> {
        let prec = self.prec();
        let domain = || NumError::Domain {
            op: func.name(),
            arg: self.to_sci_string(12),
        };
        let value = match func {
            Transcendental::Exp => Float::with_val(prec, self.0.exp_ref()),
            Transcendental::Sin => Float::with_val(prec, self.0.sin_ref()),
            Transcendental::Cos => Float::with_val(prec, self.0.cos_ref()),
            Transcendental::Ln => {
                if self.0.is_sign_negative() || self.0.is_zero() {
                    return Err(domain());
                }
                Float::with_val(prec, self.0.ln_ref())
            }
            Transcendental::Sqrt => {
                if self.is_negative() {
                    return Err(domain());
                }
                Float::with_val(prec, self.0.sqrt_ref())
            }
        };
        Real::finite(value, func.name())
    }

    pub fn exp(&self) -> Result<Real, NumError> {
        self.apply(Transcendental::Exp)
    }

    pub fn sin(&self) -> Result<Real, NumError> {
        self.apply(Transcendental::Sin)
    }

    pub fn cos(&self) -> Result<Real, NumError> {
        self.apply(Transcendental::Cos)
    }

    pub fn ln(&self) -> Result<Real, NumError> {
        self.apply(Transcendental::Ln)
    }

    pub fn sqrt(&self) -> Result<Real, NumError> {
        self.apply(Transcendental::Sqrt)
    }

    pub fn log10(&self) -> Result<Real, NumError> {
        if self.0.is_sign_negative() || self.0.is_zero() {
            return Err(NumError::Domain {
                op: "log10",
                arg: self.to_sci_string(12),
            });
        }
        Real::finite(Float::with_val(self.prec(), self.0.log10_ref()), "log10")
    }

    /// General power `self^exponent`. A negative base is only accepted
    /// with an integer-valued exponent.
    pub fn pow(&self, exponent: &Real) -> Result<Real, NumError> {
        let prec = self.prec().max(exponent.prec());
        if let Some(int) = exponent.0.to_integer().filter(|i| *i == exponent.0) {
            return self.powi(&int);
        }
        if self.is_negative() {
            return Err(NumError::Domain {
                op: "pow",
                arg: self.to_sci_string(12),
            });
        }
        if self.is_zero() && exponent.is_negative() {
            return Err(NumError::DivisionByZero);
        }
        Real::finite(Float::with_val(prec, (&self.0).pow(&exponent.0)), "pow")
    }

    /// Integer power, valid for any base except zero to a negative power.
    pub fn powi(&self, exponent: &Integer) -> Result<Real, NumError> {
        if self.is_zero() && *exponent < 0 {
            return Err(NumError::DivisionByZero);
        }
        Real::finite(Float::with_val(self.prec(), (&self.0).pow(exponent)), "pow")
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Exact rational value of the stored binary float.
    pub fn to_rational(&self) -> Rational {
        self.0
            .to_rational()
            .expect("Real is finite by construction")
    }

    /// Decimal exponent `e` such that `10^e <= |self| < 10^(e+1)`;
    /// `None` for zero.
    pub fn decimal_exponent(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(self.sci_parts(1).1)
    }

    /// `significant` significant digits in scientific notation, e.g. `2.98e-62`.
    pub fn to_sci_string(&self, significant: usize) -> String {
        let significant = significant.max(1);
        if self.is_zero() {
            return "0".to_string();
        }
        let (mantissa, exp) = self.sci_parts(significant);
        let sign = if mantissa < 0 { "-" } else { "" };
        let digits = mantissa.abs().to_string();
        let (head, tail) = digits.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    }

    /// Rounded integer mantissa with exactly `significant` digits and its
    /// decimal exponent. `self` must be nonzero.
    fn sci_parts(&self, significant: usize) -> (Integer, i64) {
        let lower = Integer::from(10).pow(significant as u32 - 1);
        let upper = Integer::from(&lower * 10);
        let mut exp = Float::with_val(64, self.0.abs_ref())
            .log10()
            .floor()
            .to_f64() as i64;
        // the 64-bit log10 estimate can be off by one next to a power of ten
        loop {
            let scaled = self.scaled_rounded(significant as i64 - 1 - exp);
            let magnitude = Integer::from(scaled.abs_ref());
            if magnitude >= upper {
                exp += 1;
            } else if magnitude < lower {
                exp -= 1;
            } else {
                return (scaled, exp);
            }
        }
    }

    /// Fixed-point decimal with `places` fractional digits, rounded
    /// half-to-even on the exact binary value.
    pub fn to_fixed_string(&self, places: usize) -> String {
        fixed_digits(self.scaled_rounded(places as i64), places)
    }

    /// Fixed-point decimal with `places` fractional digits, truncated
    /// toward zero. The value is first rounded 20 places further so that
    /// binary representation noise (1.6 stored as 1.5999...) is not
    /// truncated into the output.
    pub fn to_truncated_string(&self, places: usize) -> String {
        const NOISE_PLACES: u32 = 20;
        let cleaned = self.scaled_rounded(places as i64 + i64::from(NOISE_PLACES));
        let (quotient, _) = cleaned.div_rem(Integer::from(10).pow(NOISE_PLACES));
        fixed_digits(quotient, places)
    }

    /// Full-precision decimal text that parses back to the same value at
    /// the producing context's precision.
    pub fn to_decimal_string(&self, ctx: &NumericContext) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        // two extra digits so the decimal text re-rounds to the same float
        let significant = ctx.digits() as usize + (GUARD_BITS as usize) / 3 + 2;
        self.0.to_string_radix(10, Some(significant))
    }

    /// `round_half_even(self * 10^shift)` as an exact integer.
    fn scaled_rounded(&self, shift: i64) -> Integer {
        let mut value = self.to_rational();
        let ten = Integer::from(10);
        if shift >= 0 {
            value *= Rational::from(ten.pow(shift as u32));
        } else {
            value /= Rational::from(ten.pow((-shift) as u32));
        }
        let floor = value.clone().floor();
        let floor_int = floor.numer().clone();
        let frac = value - floor;
        let half = Rational::from((1, 2));
        match frac.cmp(&half) {
            Ordering::Less => floor_int,
            Ordering::Greater => floor_int + 1,
            Ordering::Equal => {
                if floor_int.is_even() {
                    floor_int
                } else {
                    floor_int + 1
                }
            }
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_sci_string(24))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(places) => f.pad(&self.to_fixed_string(places)),
            None => f.pad(&self.to_sci_string(24)),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let prec = self.prec().max(rhs.prec());
                Real(Float::with_val(prec, &self.0 $op &rhs.0))
            }
        }

        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }

        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }

        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(Float::with_val(self.prec(), -&self.0))
    }
}

fn fixed_digits(scaled: Integer, places: usize) -> String {
    let negative = scaled < 0;
    let mut digits = scaled.abs().to_string();
    while digits.len() <= places {
        digits.insert(0, '0');
    }
    let split = digits.len() - places;
    let mut out = String::with_capacity(digits.len() + 2);
    if negative {
        out.push('-');
    }
    out.push_str(&digits[..split]);
    if places > 0 {
        out.push('.');
        out.push_str(&digits[split..]);
    }
    out
}
