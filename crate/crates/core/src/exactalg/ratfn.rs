use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::field::PrimeField;
use super::{AlgebraError, ExponentVector, LaurentPoly};

/// A fraction of Laurent polynomials.
///
/// Only monomial content is cancelled automatically: the denominator is
/// shifted so that its minimal exponent in every variable is zero and its
/// leading coefficient is one. Equality is semantic.
#[derive(Clone, Debug)]
pub struct RationalFn {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFn {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        if num.nvars() != den.nvars() {
            return Err(AlgebraError::VariableCountMismatch {
                left: num.nvars(),
                right: den.nvars(),
            });
        }
        Ok(Self::normalized(num, den))
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        let n = p.nvars();
        RationalFn {
            num: p,
            den: LaurentPoly::one(n),
        }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(LaurentPoly::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(LaurentPoly::one(nvars))
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::from_poly(LaurentPoly::from_int(nvars, c))
    }

    /// `e^w`.
    pub fn exp(w: &ExponentVector) -> Self {
        Self::from_poly(LaurentPoly::exp(w))
    }

    fn normalized(num: LaurentPoly, den: LaurentPoly) -> Self {
        let n = num.nvars();
        if num.is_zero() {
            return Self::zero(n);
        }
        let lo = den.min_exponents().expect("nonzero denominator");
        let (_, lc) = den.leading_term().expect("nonzero denominator");
        let c = lc.recip();
        let shift = -&lo;
        RationalFn {
            num: num.mul_term(&shift, &c),
            den: den.mul_term(&shift, &c),
        }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    /// Structural zero test; a nonzero numerator is never semantically zero.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Divides out the denominator when it divides the numerator exactly.
    pub fn reduce(&self) -> Self {
        if self.den.is_one() {
            return self.clone();
        }
        match self.num.div_exact(&self.den) {
            Some(q) => Self::from_poly(q),
            None => self.clone(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.den == other.den {
            return RationalFn::new(self.num.try_add(&other.num)?, self.den.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let num = self.num.try_mul(&other.den)?.try_add(&other.num.try_mul(&self.den)?)?;
        RationalFn::new(num, self.den.try_mul(&other.den)?)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.is_zero() || other.is_zero() {
            if self.nvars() != other.nvars() {
                return Err(AlgebraError::VariableCountMismatch {
                    left: self.nvars(),
                    right: other.nvars(),
                });
            }
            return Ok(Self::zero(self.nvars()));
        }
        // Cancel a denominator against the other numerator when it is literally equal.
        if self.den == other.num {
            return RationalFn::new(self.num.clone(), other.den.clone());
        }
        if other.den == self.num {
            return RationalFn::new(other.num.clone(), self.den.clone());
        }
        RationalFn::new(self.num.try_mul(&other.num)?, self.den.try_mul(&other.den)?)
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.try_mul(&other.recip()?)
    }

    pub fn recip(&self) -> Result<Self, AlgebraError> {
        if self.num.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        RationalFn::new(self.den.clone(), self.num.clone())
    }

    /// Divides by a polynomial, trying exact division first.
    pub fn div_poly(&self, d: &LaurentPoly) -> Result<Self, AlgebraError> {
        if d.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        match self.num.div_exact(d) {
            Some(q) => RationalFn::new(q, self.den.clone()),
            None => RationalFn::new(self.num.clone(), self.den.try_mul(d)?),
        }
    }

    pub fn mul_poly(&self, p: &LaurentPoly) -> Result<Self, AlgebraError> {
        if let Some(q) = p.div_exact(&self.den) {
            return Ok(Self::from_poly(self.num.try_mul(&q)?));
        }
        RationalFn::new(self.num.try_mul(p)?, self.den.clone())
    }

    /// Multiplies by `e^w`.
    pub fn shift(&self, w: &ExponentVector) -> Self {
        RationalFn {
            num: self.num.shift(w),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        RationalFn {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn bar(&self) -> Self {
        Self::normalized(self.num.bar(), self.den.bar())
    }

    /// Exact semantic equality by cross-multiplication.
    pub fn equals(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }

    pub fn eval(&self, field: &PrimeField, point: &[u64]) -> Result<u64, AlgebraError> {
        let d = self.den.eval(field, point)?;
        let dinv = field.inv(d).ok_or(AlgebraError::DenominatorVanished)?;
        let n = self.num.eval(field, point)?;
        Ok(field.mul(n, dinv))
    }

    /// Total degree bounds `(numerator, denominator)` after clearing monomials.
    pub fn degree_bounds(&self) -> (u64, u64) {
        (self.num.span_degree(), self.den.span_degree())
    }
}

impl PartialEq for RationalFn {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl Eq for RationalFn {}

impl From<LaurentPoly> for RationalFn {
    fn from(p: LaurentPoly) -> Self {
        RationalFn::from_poly(p)
    }
}

impl Add for &RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &RationalFn) -> RationalFn {
        self.try_add(rhs).expect("variable count mismatch")
    }
}

impl Sub for &RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &RationalFn) -> RationalFn {
        self.try_sub(rhs).expect("variable count mismatch")
    }
}

impl Mul for &RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &RationalFn) -> RationalFn {
        self.try_mul(rhs).expect("variable count mismatch")
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Repr {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl Serialize for RationalFn {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Repr {
            num: self.num.clone(),
            den: self.den.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = Repr::deserialize(d)?;
        let num = r.num.with_nvars(r.den.nvars()).map_err(D::Error::custom)?;
        RationalFn::new(num, r.den).map_err(D::Error::custom)
    }
}

impl Default for RationalFn {
    fn default() -> Self {
        RationalFn::zero(0)
    }
}

impl RationalFn {
    pub fn is_one(&self) -> bool {
        self.num == self.den || (self.den.is_one() && self.num.is_one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(nvars);
        }
        Self::from_poly(LaurentPoly::constant(nvars, c))
    }

    pub fn unit(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }
}
