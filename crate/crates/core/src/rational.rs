//! Exact rational numbers and the half-angle cos² values used by the spin
//! correlation formula.
//!
//! Every probability in the library is a [`Rational`]. Kinematics (see
//! [`crate::relativity`]) is the only place floating point is used.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default denominator bound for approximate mode.
pub const DEFAULT_MAX_DENOMINATOR: u64 = 1_000_000;

/// Exact fraction in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// `count / total` for kernel counts. `total` must be nonzero.
    pub fn from_counts(count: &BigUint, total: &BigUint) -> Self {
        assert!(!total.is_zero(), "ratio with zero total");
        Rational(BigRational::new(
            BigInt::from(count.clone()),
            BigInt::from(total.clone()),
        ))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn pow(&self, exp: u64) -> Self {
        let exp = usize::try_from(exp).expect("exponent fits in usize");
        Rational(BigRational::new_raw(
            num_traits::pow(self.0.numer().clone(), exp),
            num_traits::pow(self.0.denom().clone(), exp),
        ))
    }

    /// Nearest `f64` (correctly rounded by num-rational for big operands).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// The exact value of a finite `f64`.
    pub fn from_f64_exact(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        BigRational::from_float(x)
            .map(Rational)
            .ok_or(Error::NonFinite(x))
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    /// Rescale to `denominator`, which must be a multiple of `self.denom()`.
    pub(crate) fn scaled_numerator(&self, denominator: &BigInt) -> BigInt {
        debug_assert!((denominator % self.denom()).is_zero());
        self.numer() * (denominator / self.denom())
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("not a rational: {s:?}"));
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                Rational::new(n, d)
            }
            None => Ok(Rational::from_integer(
                s.parse::<BigInt>().map_err(|_| bad())?,
            )),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, r| acc + r)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, r| acc + r)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |acc, r| acc * r)
    }
}

/// Integer angle in degrees, normalized to `[0, 360)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AngleDeg(i64);

impl AngleDeg {
    pub fn new(degrees: i64) -> Self {
        AngleDeg(degrees.rem_euclid(360))
    }

    pub fn degrees(self) -> i64 {
        self.0
    }

    pub fn opposite(self) -> Self {
        AngleDeg::new(self.0 + 180)
    }

    /// Normalized `self - other`.
    pub fn diff(self, other: AngleDeg) -> Self {
        AngleDeg::new(self.0 - other.0)
    }

    /// Representative in `[0, 180]` with the same cos² of the half angle,
    /// since cos²(d/2) = cos²((360 - d)/2).
    fn folded(self) -> i64 {
        if self.0 > 180 {
            360 - self.0
        } else {
            self.0
        }
    }
}

impl From<i64> for AngleDeg {
    fn from(d: i64) -> Self {
        AngleDeg::new(d)
    }
}

impl fmt::Display for AngleDeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}°", self.0)
    }
}

/// Whether cos²(delta/2) is rational for this integer angle.
pub fn is_exact_half_angle(delta: AngleDeg) -> bool {
    matches!(delta.folded(), 0 | 60 | 90 | 120 | 180)
}

/// Exact cos²(delta/2) for the angles where it is rational.
pub fn half_angle_cos2_exact(delta: AngleDeg) -> Result<Rational> {
    let (n, d) = match delta.folded() {
        0 => (1, 1),
        60 => (3, 4),
        90 => (1, 2),
        120 => (1, 4),
        180 => (0, 1),
        _ => return Err(Error::NotExactlyRepresentable(delta.degrees())),
    };
    Rational::new(n, d)
}

/// Floating-point cos²(delta/2), computed on the folded angle so that `delta`
/// and `-delta` give bit-identical results.
pub fn half_angle_cos2_f64(delta: AngleDeg) -> f64 {
    let half = (delta.folded() as f64 / 2.0).to_radians();
    let c = half.cos();
    c * c
}

/// Best rational approximation of `x` with denominator at most
/// `max_denominator`. Ties go to the smaller denominator.
///
/// Works on the exact binary value of `x`: walks the continued fraction until
/// the next convergent's denominator would exceed the bound, then compares the
/// last convergent against the largest admissible semiconvergent.
pub fn rational_approx(x: f64, max_denominator: u64) -> Result<Rational> {
    if max_denominator == 0 {
        return Err(Error::InvalidArgument(
            "max_denominator must be at least 1".into(),
        ));
    }
    let exact = Rational::from_f64_exact(x)?;
    Ok(limit_denominator(&exact, &BigInt::from(max_denominator)))
}

pub(crate) fn limit_denominator(x: &Rational, max_den: &BigInt) -> Rational {
    if x.denom() <= max_den {
        return x.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) =
        (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut n = x.numer().clone();
    let mut d = x.denom().clone();
    loop {
        let a = n.div_floor(&d);
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let r = &n - &a * &d;
        n = std::mem::replace(&mut d, r);
        if d.is_zero() {
            break;
        }
    }
    let k = (max_den - &q0).div_floor(&q1);
    let semi = Rational(BigRational::new(&p0 + &k * &p1, &q0 + &k * &q1));
    let conv = Rational(BigRational::new(p1, q1));
    if (&conv - x).abs() <= (&semi - x).abs() {
        conv
    } else {
        semi
    }
}
