use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::field::PrimeField;
use super::{AlgebraError, ExponentVector};

/// Sparse Laurent polynomial with rational coefficients.
///
/// Terms are kept in lexicographic order of their exponent vectors and no
/// stored coefficient is zero, so structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<ExponentVector, BigRational>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::monomial(ExponentVector::zero(nvars), c)
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, BigRational::from_integer(BigInt::from(c)))
    }

    /// `c * e^exp`.
    pub fn monomial(exp: ExponentVector, c: BigRational) -> Self {
        let nvars = exp.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        LaurentPoly { nvars, terms }
    }

    /// The monomial `e^w` with coefficient one.
    pub fn exp(w: &ExponentVector) -> Self {
        Self::monomial(w.clone(), BigRational::one())
    }

    /// The variable with index `i` (0-based; `nvars - 1` is `h`).
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::exp(&ExponentVector::unit(nvars, i))
    }

    /// Sums a list of terms, merging repeated exponents.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (ExponentVector, BigRational)>,
    {
        let mut p = LaurentPoly::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(AlgebraError::VariableCountMismatch {
                    left: nvars,
                    right: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// `1 - e^{-w}`, the K-theoretic Euler factor of a line with weight `w`.
    pub fn euler_factor(w: &ExponentVector) -> Self {
        let n = w.len();
        let mut p = LaurentPoly::one(n);
        p.add_term(-w, -BigRational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map_or(false, |(e, c)| e.is_zero() && c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &ExponentVector) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Lexicographically largest term.
    pub fn leading_term(&self) -> Option<(&ExponentVector, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// The single term if this is a monomial.
    pub fn as_monomial(&self) -> Option<(&ExponentVector, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn add_term(&mut self, e: ExponentVector, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.nvars == other.nvars {
            Ok(())
        } else {
            Err(AlgebraError::VariableCountMismatch {
                left: self.nvars,
                right: other.nvars,
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        if let Some((e, c)) = other.as_monomial() {
            return Ok(self.mul_term(e, c));
        }
        if let Some((e, c)) = self.as_monomial() {
            return Ok(other.mul_term(e, c));
        }
        let mut out = LaurentPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Multiplies by `c * e^e`.
    pub fn mul_term(&self, e: &ExponentVector, c: &BigRational) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e0, c0)| (e0 + e, c0 * c)).collect(),
        }
    }

    /// Multiplies by `e^w`.
    pub fn shift(&self, w: &ExponentVector) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e0, c0)| (e0 + w, c0.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        self.mul_term(&ExponentVector::zero(self.nvars), c)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = LaurentPoly::one(self.nvars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes every variable by its inverse.
    pub fn bar(&self) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Coordinatewise minimum exponent; `None` for the zero polynomial.
    pub fn min_exponents(&self) -> Option<ExponentVector> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, e| acc.meet(e)))
    }

    pub fn max_exponents(&self) -> Option<ExponentVector> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, e| acc.join(e)))
    }

    /// Sum over variables of the exponent span. After clearing the minimal
    /// monomial this bounds the total degree of the resulting polynomial.
    pub fn span_degree(&self) -> u64 {
        match (self.min_exponents(), self.max_exponents()) {
            (Some(lo), Some(hi)) => lo
                .as_slice()
                .iter()
                .zip(hi.as_slice())
                .map(|(&l, &h)| (h - l) as u64)
                .sum(),
            _ => 0,
        }
    }

    /// Exact quotient `self / d` if it is a Laurent polynomial.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() || self.nvars != d.nvars {
            return None;
        }
        if self.is_zero() {
            return Some(LaurentPoly::zero(self.nvars));
        }
        if let Some((e, c)) = d.as_monomial() {
            return Some(self.mul_term(&-e, &c.recip()));
        }
        let lo = &self.min_exponents()? - &d.min_exponents()?;
        let hi = &self.max_exponents()? - &d.max_exponents()?;
        let (dle, dlc) = d.leading_term()?;
        let (dle, dlc) = (dle.clone(), dlc.clone());
        let mut rem = self.clone();
        let mut quot = LaurentPoly::zero(self.nvars);
        while let Some((re, rc)) = rem.leading_term() {
            let qe = re - &dle;
            if !qe.within(&lo, &hi) {
                return None;
            }
            let qc = rc / &dlc;
            for (e, c) in &d.terms {
                rem.add_term(e + &qe, -(c * &qc));
            }
            quot.add_term(qe, qc);
        }
        Some(quot)
    }

    /// Value at a point of nonzero residues, one per variable.
    pub fn eval(&self, field: &PrimeField, point: &[u64]) -> Result<u64, AlgebraError> {
        if point.len() != self.nvars {
            return Err(AlgebraError::VariableCountMismatch {
                left: self.nvars,
                right: point.len(),
            });
        }
        let inv: Vec<u64> = point
            .iter()
            .enumerate()
            .map(|(i, &v)| field.inv(v).ok_or(AlgebraError::ZeroAssignment(i)))
            .collect::<Result<_, _>>()?;
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let mut m = eval_coeff(field, c)?;
            for (i, &x) in e.as_slice().iter().enumerate() {
                if x > 0 {
                    m = field.mul(m, field.pow(point[i], x as u64));
                } else if x < 0 {
                    m = field.mul(m, field.pow(inv[i], x.unsigned_abs() as u64));
                }
            }
            acc = field.add(acc, m);
        }
        Ok(acc)
    }
}

/// Reduces a rational coefficient into the field.
pub(crate) fn eval_coeff(field: &PrimeField, c: &BigRational) -> Result<u64, AlgebraError> {
    let n = field.reduce_int(c.numer());
    let d = field.reduce_int(c.denom());
    let dinv = field.inv(d).ok_or(AlgebraError::DenominatorVanished)?;
    Ok(field.mul(n, dinv))
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("variable count mismatch")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs).expect("variable count mismatch")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("variable count mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let n = self.nvars;
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mag = c.abs();
            let mut factors = Vec::new();
            for (i, &x) in e.as_slice().iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let name = if i + 1 == n {
                    "q".to_string()
                } else {
                    format!("x{}", i + 1)
                };
                factors.push(if x == 1 { name } else { format!("{name}^{x}") });
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<i32>,
    coef: String,
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(e, c)| TermRepr {
                exp: e.as_slice().to_vec(),
                coef: format_rational(c),
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    /// An empty term list deserializes with zero variables; callers that know
    /// the variable count fix it with [`LaurentPoly::with_nvars`].
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<TermRepr> = Vec::deserialize(d)?;
        let nvars = raw.first().map_or(0, |t| t.exp.len());
        let mut terms = Vec::with_capacity(raw.len());
        for t in raw {
            let c = parse_rational(&t.coef).map_err(D::Error::custom)?;
            terms.push((ExponentVector::from_vec(t.exp), c));
        }
        LaurentPoly::from_terms(nvars, terms).map_err(D::Error::custom)
    }
}

impl LaurentPoly {
    /// Reinterprets the zero polynomial in `nvars` variables; other values must already match.
    pub fn with_nvars(self, nvars: usize) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            Ok(LaurentPoly::zero(nvars))
        } else if self.nvars == nvars {
            Ok(self)
        } else {
            Err(AlgebraError::VariableCountMismatch {
                left: nvars,
                right: self.nvars,
            })
        }
    }
}

pub(crate) fn format_rational(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| format!("bad coefficient {s:?}: {e}"))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(BigRational::new(parse(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse(s)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> LaurentPoly {
        LaurentPoly::var(3, i)
    }

    fn one() -> LaurentPoly {
        LaurentPoly::one(3)
    }

    #[test]
    fn additive_inverse_cancels() {
        assert!((&x(0) + &-&x(0)).is_zero());
    }

    #[test]
    fn difference_of_squares() {
        let lhs = &(&one() - &x(0)) * &(&one() + &x(0));
        assert_eq!(lhs, &one() - &(&x(0) * &x(0)));
    }

    #[test]
    fn inverse_monomial() {
        let xinv = x(0).bar();
        assert!((&xinv * &x(0)).is_one());
    }

    #[test]
    fn mismatched_variable_counts_error() {
        let a = LaurentPoly::var(2, 0);
        assert!(a.try_add(&x(0)).is_err());
        assert!(a.try_mul(&x(0)).is_err());
    }

    #[test]
    fn exact_division() {
        let f = &(&one() - &x(0)) * &(&x(1).bar() + &x(2));
        let q = f.div_exact(&(&one() - &x(0))).unwrap();
        assert_eq!(q, &x(1).bar() + &x(2));
        assert!(f.div_exact(&(&one() - &x(1))).is_none());
        assert!((&one() + &x(0)).div_exact(&(&one() - &x(0))).is_none());
    }

    #[test]
    fn eval_laurent() {
        let f = PrimeField::new(101).unwrap();
        let p = &x(0) + &x(1).bar();
        // 7 + 1/2 = 7 + 51 mod 101
        assert_eq!(p.eval(&f, &[7, 2, 1]).unwrap(), 58);
    }

    #[test]
    fn json_round_trip() {
        let p = &x(0).scale(&BigRational::new(3.into(), 4.into())) - &x(2).bar();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[{"exp":[0,0,-1],"coef":"-1"},{"exp":[1,0,0],"coef":"3/4"}]"#);
        let back: LaurentPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn display_is_readable() {
        let p = &(&one() - &x(0)) + &x(2).scale(&BigRational::from_integer(2.into()));
        assert_eq!(p.to_string(), "-x1 + 2*q + 1");
    }
}
