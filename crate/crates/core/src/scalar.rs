//! Scalar abstractions shared by every module.
//!
//! Tree functions are generic over [`TreeScalar`]. Exact rationals make operator
//! identities bit-exact; floating point (real or complex) carries the
//! λ-dependent spectral constructions. Every scalar has an associated
//! [`Magnitude`] type in which the level means `M_p^p` are accumulated.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The exponent `p ≥ 1` of the Hardy space.
///
/// Integral exponents keep `|f(v)|^p` rational; any other exponent is only
/// available in floating-point mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Integer(u32),
    Real(f64),
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidExponent {
                p: p.to_string(),
                reason: "p must be a finite real number with p >= 1".into(),
            });
        }
        if p.fract() == 0.0 && p <= u32::MAX as f64 {
            Ok(Exponent::Integer(p as u32))
        } else {
            Ok(Exponent::Real(p))
        }
    }

    pub fn integer(p: u32) -> Self {
        assert!(p >= 1, "exponent must be at least 1");
        Exponent::Integer(p)
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Integer(k) => k as f64,
            Exponent::Real(p) => p,
        }
    }

    pub fn as_integer(self) -> Option<u32> {
        match self {
            Exponent::Integer(k) => Some(k),
            Exponent::Real(_) => None,
        }
    }

    pub(crate) fn require_integer(self, context: &str) -> Result<u32> {
        self.as_integer().ok_or_else(|| Error::InvalidExponent {
            p: self.to_string(),
            reason: format!("{context} needs an integer exponent"),
        })
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Integer(k) => write!(f, "{k}"),
            Exponent::Real(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let p: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("cannot parse exponent `{s}`")))?;
        Exponent::new(p)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Integer(k) => serializer.serialize_u32(*k),
            Exponent::Real(p) => serializer.serialize_f64(*p),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let p = f64::deserialize(deserializer)?;
        Exponent::new(p).map_err(serde::de::Error::custom)
    }
}

/// A nonnegative quantity that is exact whenever its inputs were.
#[derive(Clone, Debug)]
pub enum Quantity {
    Exact(BigRational),
    Approx(f64),
}

impl Quantity {
    pub fn from_integer(n: &BigUint) -> Self {
        Quantity::Exact(BigRational::from_integer(BigInt::from(n.clone())))
    }

    pub fn ratio(num: &BigUint, den: &BigUint) -> Self {
        Quantity::Exact(BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone())))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Quantity::Exact(_))
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Quantity::Exact(r) => Some(r),
            Quantity::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Quantity::Exact(r) => rational_to_f64(r),
            Quantity::Approx(x) => *x,
        }
    }

    /// Natural logarithm, robust for quantities far outside the `f64` range.
    pub fn ln(&self) -> f64 {
        match self {
            Quantity::Exact(r) => {
                if r.is_zero() {
                    f64::NEG_INFINITY
                } else {
                    ln_bigint(r.numer()) - ln_bigint(r.denom())
                }
            }
            Quantity::Approx(x) => x.ln(),
        }
    }

    /// `self^(1/p)` as a float.
    pub fn root(&self, p: Exponent) -> f64 {
        if let Quantity::Approx(x) = self {
            return x.powf(1.0 / p.as_f64());
        }
        if p == Exponent::Integer(1) {
            return self.to_f64();
        }
        (self.ln() / p.as_f64()).exp()
    }

    /// `self^(1/k)` as a float, for spectral-radius sequences.
    pub fn nth_root(&self, k: usize) -> f64 {
        if self.to_f64() == 0.0 && self.ln() == f64::NEG_INFINITY {
            return 0.0;
        }
        (self.ln() / k as f64).exp()
    }

    /// Total comparison; exact when both sides are exact.
    pub fn compare(&self, other: &Quantity) -> Ordering {
        match (self, other) {
            (Quantity::Exact(a), Quantity::Exact(b)) => a.cmp(b),
            _ => self.to_f64().partial_cmp(&other.to_f64()).unwrap_or(Ordering::Equal),
        }
    }

    /// Comparison used for sup bookkeeping: exact when possible, otherwise
    /// values within `rel_tol` relative distance count as equal.
    pub fn compare_tol(&self, other: &Quantity, rel_tol: f64) -> Ordering {
        match (self, other) {
            (Quantity::Exact(a), Quantity::Exact(b)) => a.cmp(b),
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
                if (a - b).abs() <= rel_tol * scale {
                    Ordering::Equal
                } else {
                    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
                }
            }
        }
    }

    /// `self^p`; exact for exact values and integer `p`.
    pub fn pow(&self, p: Exponent) -> Quantity {
        match (self, p) {
            (Quantity::Exact(r), Exponent::Integer(k)) => Quantity::Exact(num_traits::pow(r.clone(), k as usize)),
            _ => Quantity::Approx((self.ln() * p.as_f64()).exp()),
        }
    }

    pub fn mul(&self, other: &Quantity) -> Quantity {
        match (self, other) {
            (Quantity::Exact(a), Quantity::Exact(b)) => Quantity::Exact(a * b),
            _ => Quantity::Approx(self.to_f64() * other.to_f64()),
        }
    }

    pub fn display_exact(&self) -> Option<String> {
        self.exact().map(|r| {
            if r.is_integer() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        })
    }
}

impl PartialEq for Quantity {
    fn eq(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Equal
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.display_exact() {
            Some(s) => write!(f, "{s}"),
            None => write!(f, "{}", self.to_f64()),
        }
    }
}

#[derive(Serialize)]
struct QuantityRepr {
    exact: Option<String>,
    approx: Option<f64>,
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let approx = self.to_f64();
        QuantityRepr {
            exact: self.display_exact(),
            approx: approx.is_finite().then_some(approx),
        }
        .serialize(serializer)
    }
}

/// Natural log of a big integer without overflowing `f64`.
pub fn ln_bigint(n: &BigInt) -> f64 {
    ln_biguint(n.magnitude())
}

pub fn ln_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Correctly scaled conversion of a big rational to `f64`.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.numer().sign() == Sign::Minus { -1.0 } else { 1.0 };
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    if num.bits() < 1000 && den.bits() < 1000 {
        let (n, d) = (num.to_f64().unwrap(), den.to_f64().unwrap());
        if n.is_finite() && d.is_finite() && n != 0.0 {
            return sign * n / d;
        }
    }
    // Keep ~80 significant bits in the quotient, then rescale.
    let shift = 80i64 - (num.bits() as i64 - den.bits() as i64);
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let mantissa = q.to_f64().unwrap_or(f64::INFINITY);
    sign * mantissa * 2f64.powi(-(shift.clamp(i32::MIN as i64, i32::MAX as i64) as i32))
}

/// Ordered field in which `M_p^p` values are accumulated.
pub trait Magnitude:
    Clone
    + fmt::Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    fn from_biguint(n: &BigUint) -> Self;
    /// `num / den` without overflowing intermediate conversions.
    fn from_ratio(num: &BigUint, den: &BigUint) -> Self;
    fn to_f64(&self) -> f64;
    fn to_quantity(&self) -> Quantity;
}

impl Magnitude for BigRational {
    fn from_biguint(n: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from(n.clone()))
    }

    fn from_ratio(num: &BigUint, den: &BigUint) -> Self {
        BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn to_quantity(&self) -> Quantity {
        Quantity::Exact(self.clone())
    }
}

macro_rules! impl_float_magnitude {
    ($f:ty) => {
        impl Magnitude for $f {
            fn from_biguint(n: &BigUint) -> Self {
                n.to_f64().unwrap_or(f64::INFINITY) as $f
            }

            fn from_ratio(num: &BigUint, den: &BigUint) -> Self {
                match (num.to_f64(), den.to_f64()) {
                    (Some(a), Some(b)) if a < 1e300 && b < 1e300 => (a / b) as $f,
                    _ => rational_to_f64(&BigRational::new(
                        BigInt::from(num.clone()),
                        BigInt::from(den.clone()),
                    )) as $f,
                }
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn to_quantity(&self) -> Quantity {
                Quantity::Approx(*self as f64)
            }
        }
    };
}

impl_float_magnitude!(f32);
impl_float_magnitude!(f64);

/// How values of a [`TreeScalar`] are represented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueMode {
    ExactRational,
    RealFloat,
    ComplexFloat,
}

/// Values a tree function may take.
pub trait TreeScalar: Clone + fmt::Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static {
    type Magnitude: Magnitude;

    const MODE: ValueMode;

    /// `|x|`.
    fn modulus(&self) -> Self::Magnitude;

    /// `|x|^p`; exact scalars reject non-integer exponents.
    fn abs_pow(&self, p: Exponent) -> Result<Self::Magnitude>;

    fn from_biguint(n: &BigUint) -> Self;

    fn to_complex(&self) -> Complex64;

    fn is_exact() -> bool {
        Self::MODE == ValueMode::ExactRational
    }
}

impl TreeScalar for BigRational {
    type Magnitude = BigRational;

    const MODE: ValueMode = ValueMode::ExactRational;

    fn modulus(&self) -> BigRational {
        self.abs()
    }

    fn abs_pow(&self, p: Exponent) -> Result<BigRational> {
        let k = p.require_integer("exact rational arithmetic")?;
        Ok(num_traits::pow(self.abs(), k as usize))
    }

    fn from_biguint(n: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from(n.clone()))
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }
}

macro_rules! impl_float_scalar {
    ($f:ty) => {
        impl TreeScalar for $f {
            type Magnitude = $f;

            const MODE: ValueMode = ValueMode::RealFloat;

            fn modulus(&self) -> $f {
                self.abs()
            }

            fn abs_pow(&self, p: Exponent) -> Result<$f> {
                Ok(match p {
                    Exponent::Integer(k) => self.abs().powi(k as i32),
                    Exponent::Real(q) => self.abs().powf(q as $f),
                })
            }

            fn from_biguint(n: &BigUint) -> Self {
                n.to_f64().unwrap_or(f64::INFINITY) as $f
            }

            fn to_complex(&self) -> Complex64 {
                Complex64::new(*self as f64, 0.0)
            }
        }

        impl TreeScalar for Complex<$f> {
            type Magnitude = $f;

            const MODE: ValueMode = ValueMode::ComplexFloat;

            fn modulus(&self) -> $f {
                self.norm()
            }

            fn abs_pow(&self, p: Exponent) -> Result<$f> {
                Ok(match p {
                    Exponent::Integer(2) => self.norm_sqr(),
                    Exponent::Integer(k) => self.norm().powi(k as i32),
                    Exponent::Real(q) => self.norm().powf(q as $f),
                })
            }

            fn from_biguint(n: &BigUint) -> Self {
                Complex::new(n.to_f64().unwrap_or(f64::INFINITY) as $f, 0.0)
            }

            fn to_complex(&self) -> Complex64 {
                Complex64::new(self.re as f64, self.im as f64)
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

/// Parses `a/b`, an integer, or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("cannot parse `{s}` as a rational number"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

/// Parses complex literals such as `0.5`, `2i`, `-0.3+0.4i`, `1-i`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidParameter(format!("cannot parse `{s}` as a complex number"));
    if t.is_empty() {
        return Err(bad());
    }
    let real = |x: &str| -> Result<f64> {
        if let Ok(r) = parse_rational(x) {
            return Ok(rational_to_f64(&r));
        }
        x.parse::<f64>().map_err(|_| bad())
    };
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(real(&t)?, 0.0));
    };
    // Split at the last sign that is not the leading one and not an exponent sign.
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let imag = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => real(x),
        }
    };
    match split {
        Some(i) => Ok(Complex64::new(real(&body[..i])?, imag(&body[i..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_classification() {
        assert_eq!(Exponent::new(2.0).unwrap(), Exponent::Integer(2));
        assert_eq!(Exponent::new(1.5).unwrap(), Exponent::Real(1.5));
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
    }

    #[test]
    fn rational_abs_pow_is_exact() {
        let x = BigRational::new((-2).into(), 3.into());
        assert_eq!(
            x.abs_pow(Exponent::Integer(3)).unwrap(),
            BigRational::new(8.into(), 27.into())
        );
        assert!(x.abs_pow(Exponent::Real(1.5)).is_err());
    }

    #[test]
    fn huge_rationals_convert() {
        let big = num_traits::pow(BigInt::from(3u32), 2000);
        let r = BigRational::new(big.clone() * 2, big);
        assert!((rational_to_f64(&r) - 2.0).abs() < 1e-15);
        let q = Quantity::Exact(BigRational::from_integer(num_traits::pow(BigInt::from(10u32), 400)));
        assert!((q.ln() - 400.0 * 10f64.ln()).abs() < 1e-9);
        assert!((q.nth_root(400) - 10.0).abs() < 1e-9);
    }

    #[test]
    fn parses_numbers() {
        assert_eq!(parse_rational("1/2").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(
            parse_rational("-0.25").unwrap(),
            BigRational::new((-1).into(), 4.into())
        );
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("-0.3+0.4i").unwrap(), Complex64::new(-0.3, 0.4));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("1-i").unwrap(), Complex64::new(1.0, -1.0));
        assert_eq!(parse_complex("1e-3+2e+1i").unwrap(), Complex64::new(1e-3, 20.0));
        assert!(parse_complex("abc").is_err());
    }
}
