//! Exact scalars for the ladder algebra.
//!
//! Every coefficient that arises from normal ordering products of
//! `x̃ = (a + a†)/√2` and `p̃ = i(a† − a)/√2` lies in the field `ℚ(√2, i)`.
//! We store such a number as `re + i·im` with `re, im ∈ ℚ(√2)` and each of
//! those as `rational + rational·√2`.

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

type Q = Ratio<i128>;

/// An element `a + b√2` of the real quadratic field `ℚ(√2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt2 {
    rational: Q,
    radical: Q,
}

impl QSqrt2 {
    pub fn new(rational: Q, radical: Q) -> Self {
        Self { rational, radical }
    }

    pub fn from_int(n: i128) -> Self {
        Self::new(Q::from_integer(n), Q::zero())
    }

    /// `1/√2 = √2/2`.
    pub fn inv_sqrt2() -> Self {
        Self::new(Q::zero(), Q::new(1, 2))
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.radical.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let a = ratio_to_f64(&self.rational);
        let b = ratio_to_f64(&self.radical);
        a + b * std::f64::consts::SQRT_2
    }
}

fn ratio_to_f64(q: &Q) -> f64 {
    // i128 -> f64 is exact for the magnitudes produced at word length <= 16
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

impl Add for &QSqrt2 {
    type Output = QSqrt2;
    fn add(self, rhs: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(self.rational + rhs.rational, self.radical + rhs.radical)
    }
}

impl Sub for &QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, rhs: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(self.rational - rhs.rational, self.radical - rhs.radical)
    }
}

impl Mul for &QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, rhs: &QSqrt2) -> QSqrt2 {
        let two = Q::from_integer(2);
        QSqrt2::new(
            self.rational * rhs.rational + two * self.radical * rhs.radical,
            self.rational * rhs.radical + self.radical * rhs.rational,
        )
    }
}

impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2::new(-self.rational, -self.radical)
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rational.is_zero(), self.radical.is_zero()) {
            (_, true) => write!(f, "{}", self.rational),
            (true, false) => write!(f, "{}√2", self.radical),
            (false, false) => {
                let sign = if self.radical.is_negative() { '-' } else { '+' };
                write!(f, "{} {} {}√2", self.rational, sign, self.radical.abs())
            }
        }
    }
}

/// Exact complex scalar in `ℚ(√2, i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    pub re: QSqrt2,
    pub im: QSqrt2,
}

impl ExactScalar {
    pub fn new(re: QSqrt2, im: QSqrt2) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(QSqrt2::from_int(0), QSqrt2::from_int(0))
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        Self::new(QSqrt2::from_int(0), QSqrt2::from_int(1))
    }

    pub fn from_int(n: i128) -> Self {
        Self::new(QSqrt2::from_int(n), QSqrt2::from_int(0))
    }

    /// Rational `num/den` on the real axis.
    pub fn ratio(num: i128, den: i128) -> Self {
        Self::new(QSqrt2::new(Q::new(num, den), Q::zero()), QSqrt2::from_int(0))
    }

    pub fn inv_sqrt2() -> Self {
        Self::new(QSqrt2::inv_sqrt2(), QSqrt2::from_int(0))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        *self = &*self + rhs;
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        ExactScalar::new(re, im)
    }
}

impl Mul<i128> for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: i128) -> ExactScalar {
        self * &ExactScalar::from_int(rhs)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-&self.re, -&self.im)
    }
}

impl Zero for ExactScalar {
    fn zero() -> Self {
        ExactScalar::zero()
    }
    fn is_zero(&self) -> bool {
        ExactScalar::is_zero(self)
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: ExactScalar) -> ExactScalar {
        &self + &rhs
    }
}

impl Mul for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: ExactScalar) -> ExactScalar {
        &self * &rhs
    }
}

impl One for ExactScalar {
    fn one() -> Self {
        ExactScalar::one()
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "({})i", self.im),
            (false, false) => write!(f, "({}) + ({})i", self.re, self.im),
        }
    }
}
