//! The numeric tower: exact rationals and first-order dual numbers over them.
//!
//! [`Scalar`] is an arbitrary-precision rational, always in lowest terms with
//! a positive denominator. It is the ground field for every ℝ³ identity in
//! this crate; equality checks on it are exact. [`DualScalar`] adjoins a
//! nilpotent unit ε (ε² = 0) and propagates exact partial derivatives through
//! rational arithmetic. Floating point never mixes with these types; the ℝ⁴
//! module works in `f64` on its own.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Division by an exact zero (or by a dual number with zero value part).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("division by zero")]
pub struct DivisionByZero;

/// The operations shared by [`Scalar`], [`DualScalar`] and the test-oracle
/// expression trees, enough to evaluate any rational formula generically.
pub trait ExactScalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
{
    /// Exact division, failing on a zero divisor instead of panicking.
    fn checked_div(&self, rhs: &Self) -> Result<Self, DivisionByZero>;

    fn from_int(n: i64) -> Self;
}

/// Exact rational number in lowest terms, denominator > 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    /// Builds `numer/denom`, normalizing to lowest terms.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, DivisionByZero> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(DivisionByZero);
        }
        Ok(Scalar(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Scalar(BigRational::from_integer(n.into()))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Scalar {
    /// `numer/denom`, or just `numer` when the denominator is 1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    /// Parses `p/q` or a plain integer `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let numer: BigInt = num.parse().map_err(|_| ParseScalarError)?;
        let denom: BigInt = den.parse().map_err(|_| ParseScalarError)?;
        Scalar::new(numer, denom).map_err(|_| ParseScalarError)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("expected a rational like `3` or `-1/7`")]
pub struct ParseScalarError;

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 + rhs.0)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 - rhs.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), Add::add)
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar(BigRational::one())
    }
    fn is_one(&self) -> bool {
        self.0.is_one()
    }
}

impl ExactScalar for Scalar {
    fn checked_div(&self, rhs: &Self) -> Result<Self, DivisionByZero> {
        if rhs.is_zero() {
            return Err(DivisionByZero);
        }
        Ok(Scalar(&self.0 / &rhs.0))
    }

    fn from_int(n: i64) -> Self {
        Scalar::from_integer(n)
    }
}

/// First-order dual number `value + ε·derivative` over [`Scalar`], ε² = 0.
///
/// Lifting one input with seed 1 (and the rest with seed 0) and running it
/// through any rational function yields the exact partial derivative with
/// respect to that input in the `derivative` slot.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DualScalar {
    value: Scalar,
    derivative: Scalar,
}

impl DualScalar {
    /// `x + ε·seed`.
    pub fn lift(value: Scalar, seed: Scalar) -> Self {
        DualScalar {
            value,
            derivative: seed,
        }
    }

    /// A constant: seed 0.
    pub fn constant(value: Scalar) -> Self {
        Self::lift(value, Scalar::zero())
    }

    /// The active variable: seed 1.
    pub fn variable(value: Scalar) -> Self {
        Self::lift(value, Scalar::one())
    }

    pub fn value(&self) -> &Scalar {
        &self.value
    }

    pub fn derivative(&self) -> &Scalar {
        &self.derivative
    }
}

impl Add for DualScalar {
    type Output = DualScalar;
    fn add(self, rhs: DualScalar) -> DualScalar {
        DualScalar {
            value: self.value + rhs.value,
            derivative: self.derivative + rhs.derivative,
        }
    }
}

impl Sub for DualScalar {
    type Output = DualScalar;
    fn sub(self, rhs: DualScalar) -> DualScalar {
        DualScalar {
            value: self.value - rhs.value,
            derivative: self.derivative - rhs.derivative,
        }
    }
}

impl Mul for DualScalar {
    type Output = DualScalar;
    fn mul(self, rhs: DualScalar) -> DualScalar {
        DualScalar {
            // (a + εa')(b + εb') = ab + ε(ab' + a'b)
            derivative: self.value.clone() * rhs.derivative
                + self.derivative * rhs.value.clone(),
            value: self.value * rhs.value,
        }
    }
}

impl Neg for DualScalar {
    type Output = DualScalar;
    fn neg(self) -> DualScalar {
        DualScalar {
            value: -self.value,
            derivative: -self.derivative,
        }
    }
}

impl Zero for DualScalar {
    fn zero() -> Self {
        DualScalar::constant(Scalar::zero())
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.derivative.is_zero()
    }
}

impl One for DualScalar {
    fn one() -> Self {
        DualScalar::constant(Scalar::one())
    }
}

impl ExactScalar for DualScalar {
    fn checked_div(&self, rhs: &Self) -> Result<Self, DivisionByZero> {
        if rhs.value.is_zero() {
            return Err(DivisionByZero);
        }
        let value = self.value.checked_div(&rhs.value)?;
        // (a/b)' = (a'b − ab') / b²
        let num = self.derivative.clone() * rhs.value.clone()
            - self.value.clone() * rhs.derivative.clone();
        let derivative = num.checked_div(&(rhs.value.clone() * rhs.value.clone()))?;
        Ok(DualScalar { value, derivative })
    }

    fn from_int(n: i64) -> Self {
        DualScalar::constant(Scalar::from_integer(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::new(n, d).unwrap()
    }

    #[test]
    fn arithmetic_in_lowest_terms() {
        assert_eq!(q(1, 3) + q(1, 6), q(1, 2));
        let half = q(2, 4);
        assert_eq!(half.numer(), &BigInt::from(1));
        assert_eq!(half.denom(), &BigInt::from(2));
        assert_eq!(q(-3, -6), q(1, 2));
        assert_eq!(q(1, -2).denom(), &BigInt::from(2));
        assert!(q(1, -2).is_negative());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(q(1, 2).checked_div(&Scalar::zero()), Err(DivisionByZero));
        assert_eq!(Scalar::new(1, 0), Err(DivisionByZero));
        let d = DualScalar::variable(Scalar::zero());
        assert_eq!(
            DualScalar::one().checked_div(&d),
            Err(DivisionByZero),
            "dual divisor with zero value part"
        );
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["1/3", "-7", "0", "22/7", "-5/9"] {
            let v: Scalar = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert_eq!("4/6".parse::<Scalar>().unwrap(), q(2, 3));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("x".parse::<Scalar>().is_err());
    }

    #[test]
    fn dual_lift_square() {
        // f(v) = v², v = 3, seed 1 → (9, 6)
        let v = DualScalar::variable(q(3, 1));
        let f = v.clone() * v;
        assert_eq!(f.value(), &q(9, 1));
        assert_eq!(f.derivative(), &q(6, 1));
    }

    #[test]
    fn dual_lift_reciprocal() {
        // f(v) = 1/v, v = 2, seed 1 → (1/2, −1/4)
        let v = DualScalar::variable(q(2, 1));
        let f = DualScalar::one().checked_div(&v).unwrap();
        assert_eq!(f.value(), &q(1, 2));
        assert_eq!(f.derivative(), &q(-1, 4));
    }

    #[test]
    fn dual_constant_has_zero_derivative() {
        let c = DualScalar::constant(q(5, 7));
        let v = DualScalar::variable(q(2, 3));
        let f = (c.clone() * c.clone() + c.clone())
            .checked_div(&(v + c))
            .unwrap();
        // constants lifted with seed 0 keep zero derivative through +,×; the
        // division brings in the variable's seed only
        assert_ne!(f.derivative(), &Scalar::zero());
        let g = DualScalar::constant(q(5, 7)) * DualScalar::constant(q(-2, 9));
        assert_eq!(g.derivative(), &Scalar::zero());
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        (-200i64..=200, 1i64..=40).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
            prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
            prop_assert_eq!(
                (a.clone() + b.clone()) + c.clone(),
                a.clone() + (b.clone() + c.clone())
            );
            prop_assert_eq!(
                (a.clone() * b.clone()) * c.clone(),
                a.clone() * (b.clone() * c.clone())
            );
            prop_assert_eq!(
                a.clone() * (b.clone() + c.clone()),
                a.clone() * b.clone() + a.clone() * c.clone()
            );
        }

        #[test]
        fn reciprocal_cancels(a in arb_scalar(), b in arb_scalar()) {
            prop_assume!(!a.is_zero() && !b.is_zero());
            let ab = a.clone().checked_div(&b).unwrap();
            let ba = b.checked_div(&a).unwrap();
            prop_assert_eq!(ab * ba, Scalar::one());
        }

        #[test]
        fn dual_product_rule(
            a in arb_scalar(), da in arb_scalar(),
            b in arb_scalar(), db in arb_scalar()
        ) {
            let x = DualScalar::lift(a.clone(), da.clone());
            let y = DualScalar::lift(b.clone(), db.clone());
            let p = x * y;
            prop_assert_eq!(p.value(), &(a.clone() * b.clone()));
            prop_assert_eq!(p.derivative(), &(a * db + da * b));
        }
    }
}
