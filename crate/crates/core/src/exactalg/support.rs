//! Exponent boxes for degree bookkeeping of expressions that are only ever
//! evaluated, never expanded.

use serde::{Deserialize, Serialize};

use super::{LaurentPoly, RationalFn};

/// Coordinatewise exponent range `[lo, hi]` containing the support of a
/// Laurent polynomial. The empty box stands for the zero polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportBox {
    bounds: Option<(Vec<i64>, Vec<i64>)>,
}

impl SupportBox {
    pub fn empty() -> Self {
        SupportBox { bounds: None }
    }

    pub fn point(exps: &[i32]) -> Self {
        let v: Vec<i64> = exps.iter().map(|&e| e as i64).collect();
        SupportBox {
            bounds: Some((v.clone(), v)),
        }
    }

    pub fn of_poly(p: &LaurentPoly) -> Self {
        match (p.min_exponents(), p.max_exponents()) {
            (Some(lo), Some(hi)) => SupportBox {
                bounds: Some((
                    lo.as_slice().iter().map(|&e| e as i64).collect(),
                    hi.as_slice().iter().map(|&e| e as i64).collect(),
                )),
            },
            _ => SupportBox::empty(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_none()
    }

    /// Support box of a product.
    pub fn sum(&self, other: &Self) -> Self {
        match (&self.bounds, &other.bounds) {
            (Some((l1, h1)), Some((l2, h2))) => SupportBox {
                bounds: Some((
                    l1.iter().zip(l2).map(|(a, b)| a + b).collect(),
                    h1.iter().zip(h2).map(|(a, b)| a + b).collect(),
                )),
            },
            _ => SupportBox::empty(),
        }
    }

    /// Smallest box containing both; bounds the support of a sum.
    pub fn hull(&self, other: &Self) -> Self {
        match (&self.bounds, &other.bounds) {
            (None, _) => other.clone(),
            (_, None) => self.clone(),
            (Some((l1, h1)), Some((l2, h2))) => SupportBox {
                bounds: Some((
                    l1.iter().zip(l2).map(|(a, b)| *a.min(b)).collect(),
                    h1.iter().zip(h2).map(|(a, b)| *a.max(b)).collect(),
                )),
            },
        }
    }

    pub fn negate(&self) -> Self {
        SupportBox {
            bounds: self
                .bounds
                .as_ref()
                .map(|(lo, hi)| (hi.iter().map(|e| -e).collect(), lo.iter().map(|e| -e).collect())),
        }
    }

    /// Total degree bound after multiplying by the monomial at the lower corner.
    pub fn degree(&self) -> u64 {
        match &self.bounds {
            None => 0,
            Some((lo, hi)) => lo.iter().zip(hi).map(|(l, h)| (h - l) as u64).sum(),
        }
    }
}

/// Numerator and denominator boxes of a formal fraction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FractionBox {
    pub num: SupportBox,
    pub den: SupportBox,
}

impl FractionBox {
    pub fn zero(nvars: usize) -> Self {
        FractionBox {
            num: SupportBox::empty(),
            den: SupportBox::point(&vec![0; nvars]),
        }
    }

    pub fn of_poly(p: &LaurentPoly) -> Self {
        FractionBox {
            num: SupportBox::of_poly(p),
            den: SupportBox::point(&vec![0; p.nvars()]),
        }
    }

    pub fn of_ratfn(f: &RationalFn) -> Self {
        FractionBox {
            num: SupportBox::of_poly(f.numerator()),
            den: SupportBox::of_poly(f.denominator()),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        FractionBox {
            num: self.num.sum(&other.num),
            den: self.den.sum(&other.den),
        }
    }

    /// Divides by a polynomial with support box `d`.
    pub fn div_poly(&self, d: &SupportBox) -> Self {
        FractionBox {
            num: self.num.clone(),
            den: self.den.sum(d),
        }
    }

    /// Multiplies by a polynomial with support box `p`.
    pub fn mul_poly(&self, p: &SupportBox) -> Self {
        FractionBox {
            num: self.num.sum(p),
            den: self.den.clone(),
        }
    }

    /// `a/b ± c/d = (ad ± cb)/bd`.
    pub fn add(&self, other: &Self) -> Self {
        if self.num.is_empty() {
            return other.clone();
        }
        if other.num.is_empty() {
            return self.clone();
        }
        FractionBox {
            num: self.num.sum(&other.den).hull(&other.num.sum(&self.den)),
            den: self.den.sum(&other.den),
        }
    }

    /// Box of the bar involution.
    pub fn bar(&self) -> Self {
        FractionBox {
            num: self.num.negate(),
            den: self.den.negate(),
        }
    }

    /// Bound on the total degree of the cleared numerator.
    pub fn numerator_degree(&self) -> u64 {
        self.num.degree()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_of_far_monomials_widens() {
        let a = FractionBox::of_poly(&LaurentPoly::var(2, 0).pow(10));
        let b = FractionBox::of_poly(&LaurentPoly::var(2, 0).bar().pow(10));
        assert_eq!(a.add(&b).numerator_degree(), 20);
    }

    #[test]
    fn product_box_is_exact_for_products() {
        let one = LaurentPoly::one(3);
        let p = &one - &LaurentPoly::var(3, 1);
        let q = &one - &LaurentPoly::var(3, 0).bar();
        let prod = FractionBox::of_poly(&p).mul(&FractionBox::of_poly(&q));
        assert_eq!(prod.num, SupportBox::of_poly(&(&p * &q)));
    }
}
