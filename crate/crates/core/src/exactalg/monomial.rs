use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Exponent vector of a Laurent monomial in the variables `x_1..x_N, h`.
///
/// The same type doubles as an additive torus weight: the monomial `e^w`
/// has exponent vector `w`. The last slot always belongs to `h`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(Box<[i32]>);

impl ExponentVector {
    pub fn zero(nvars: usize) -> Self {
        ExponentVector(vec![0; nvars].into_boxed_slice())
    }

    pub fn from_vec(exps: Vec<i32>) -> Self {
        ExponentVector(exps.into_boxed_slice())
    }

    /// The exponent vector with a single `1` at position `index`.
    pub fn unit(nvars: usize, index: usize) -> Self {
        let mut v = vec![0; nvars];
        v[index] = 1;
        ExponentVector(v.into_boxed_slice())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn get(&self, index: usize) -> i32 {
        self.0[index]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn scale(&self, factor: i32) -> Self {
        ExponentVector(self.0.iter().map(|&e| e * factor).collect())
    }

    /// Coordinatewise minimum.
    pub fn meet(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        ExponentVector(self.0.iter().zip(other.0.iter()).map(|(&a, &b)| a.min(b)).collect())
    }

    /// Coordinatewise maximum.
    pub fn join(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        ExponentVector(self.0.iter().zip(other.0.iter()).map(|(&a, &b)| a.max(b)).collect())
    }

    /// True when `lo <= self <= hi` in every coordinate.
    pub fn within(&self, lo: &Self, hi: &Self) -> bool {
        self.0
            .iter()
            .zip(lo.0.iter().zip(hi.0.iter()))
            .all(|(&e, (&l, &h))| l <= e && e <= h)
    }
}

impl Add for &ExponentVector {
    type Output = ExponentVector;

    fn add(self, rhs: &ExponentVector) -> ExponentVector {
        debug_assert_eq!(self.len(), rhs.len());
        ExponentVector(self.0.iter().zip(rhs.0.iter()).map(|(&a, &b)| a + b).collect())
    }
}

impl Sub for &ExponentVector {
    type Output = ExponentVector;

    fn sub(self, rhs: &ExponentVector) -> ExponentVector {
        debug_assert_eq!(self.len(), rhs.len());
        ExponentVector(self.0.iter().zip(rhs.0.iter()).map(|(&a, &b)| a - b).collect())
    }
}

impl Neg for &ExponentVector {
    type Output = ExponentVector;

    fn neg(self) -> ExponentVector {
        ExponentVector(self.0.iter().map(|&e| -e).collect())
    }
}

impl Add for ExponentVector {
    type Output = ExponentVector;

    fn add(self, rhs: ExponentVector) -> ExponentVector {
        &self + &rhs
    }
}

impl Sub for ExponentVector {
    type Output = ExponentVector;

    fn sub(self, rhs: ExponentVector) -> ExponentVector {
        &self - &rhs
    }
}

impl Neg for ExponentVector {
    type Output = ExponentVector;

    fn neg(self) -> ExponentVector {
        -&self
    }
}

/// Writes the vector as an additive weight, e.g. `x2 - x1 + h`.
impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.len();
        let mut out = String::new();
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = if i + 1 == n {
                "h".to_string()
            } else {
                format!("x{}", i + 1)
            };
            let mag = e.unsigned_abs();
            let term = if mag == 1 { name } else { format!("{mag}{name}") };
            if out.is_empty() {
                if e < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if e < 0 { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}
