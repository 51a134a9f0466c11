//! Single-word prime field arithmetic and evaluation contexts.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// The Mersenne prime 2^61 - 1.
pub const DEFAULT_PRIME: u64 = (1u64 << 61) - 1;

/// Arithmetic modulo a prime below 2^64.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, AlgebraError> {
        if p < 3 || !is_prime_u64(p) {
            return Err(AlgebraError::InvalidPrime(p.to_string()));
        }
        Ok(PrimeField { p })
    }

    /// Accepts an arbitrary-precision modulus; only single-word primes are supported.
    pub fn from_biguint(p: &BigUint) -> Result<Self, AlgebraError> {
        let small = p.to_u64().ok_or_else(|| AlgebraError::InvalidPrime(p.to_string()))?;
        Self::new(small)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.p as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.p - b % self.p)
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }

    /// Reduces an integer into the field.
    pub fn reduce_int(&self, n: &BigInt) -> u64 {
        let (sign, mag) = n.to_bytes_le();
        let mag = BigUint::from_bytes_le(&mag);
        let r = (mag % self.p).to_u64().expect("residue fits in u64");
        if sign == Sign::Minus {
            self.neg(r)
        } else {
            r
        }
    }

    /// A uniformly random nonzero residue.
    pub fn random_unit<R: Rng>(&self, rng: &mut R) -> u64 {
        rng.gen_range(1..self.p)
    }
}

impl std::str::FromStr for PrimeField {
    type Err = AlgebraError;

    /// Parses a decimal integer of any size; only primes below `2^64` are accepted.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let p: BigUint = s
            .trim()
            .parse()
            .map_err(|_| AlgebraError::InvalidPrime(s.to_string()))?;
        Self::from_biguint(&p)
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for &a in &BASES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A prime, a seed, and an assignment of nonzero residues to variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalContext {
    pub field: PrimeField,
    pub seed: u64,
    pub assignments: BTreeMap<usize, u64>,
}

impl EvalContext {
    pub fn new(field: PrimeField, seed: u64) -> Self {
        EvalContext {
            field,
            seed,
            assignments: BTreeMap::new(),
        }
    }

    /// Assigns `value` to variable `var`. Residues must be nonzero so that
    /// negative exponents are defined.
    pub fn assign(&mut self, var: usize, value: u64) -> Result<(), AlgebraError> {
        let v = value % self.field.modulus();
        if v == 0 {
            return Err(AlgebraError::ZeroAssignment(var));
        }
        self.assignments.insert(var, v);
        Ok(())
    }

    pub fn with_point(field: PrimeField, seed: u64, point: &[u64]) -> Result<Self, AlgebraError> {
        let mut ctx = EvalContext::new(field, seed);
        for (i, &v) in point.iter().enumerate() {
            ctx.assign(i, v)?;
        }
        Ok(ctx)
    }

    /// The assignment as a dense point for `nvars` variables.
    pub fn point(&self, nvars: usize) -> Result<Vec<u64>, AlgebraError> {
        (0..nvars)
            .map(|i| {
                self.assignments
                    .get(&i)
                    .copied()
                    .ok_or(AlgebraError::UnassignedVariable(i))
            })
            .collect()
    }
}

/// Deterministic stream of random evaluation points.
pub struct PointSampler {
    field: PrimeField,
    rng: ChaCha8Rng,
}

impl PointSampler {
    pub fn new(field: PrimeField, seed: u64) -> Self {
        PointSampler {
            field,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn next_point(&mut self, nvars: usize) -> Vec<u64> {
        (0..nvars).map(|_| self.field.random_unit(&mut self.rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_prime() {
        assert_eq!(
            "2305843009213693951".parse::<PrimeField>().unwrap(),
            PrimeField::default()
        );
        assert!("340282366920938463463374607431768211507".parse::<PrimeField>().is_err());
        assert!("12".parse::<PrimeField>().is_err());
        assert!("x".parse::<PrimeField>().is_err());
    }

    #[test]
    fn mersenne_prime_is_prime() {
        assert!(is_prime_u64(DEFAULT_PRIME));
        assert!(!is_prime_u64(DEFAULT_PRIME - 2));
        assert!(is_prime_u64(18446744073709551557));
        assert!(PrimeField::new(15).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let f = PrimeField::default();
        for a in [1u64, 2, 12345, DEFAULT_PRIME - 1] {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        assert_eq!(f.inv(0), None);
    }

    #[test]
    fn negative_integers_reduce() {
        let f = PrimeField::new(101).unwrap();
        assert_eq!(f.reduce_int(&BigInt::from(-1)), 100);
        assert_eq!(f.reduce_int(&BigInt::from(205)), 3);
    }

    #[test]
    fn zero_assignment_rejected() {
        let mut ctx = EvalContext::new(PrimeField::new(7).unwrap(), 0);
        assert!(ctx.assign(0, 14).is_err());
        assert!(ctx.assign(0, 3).is_ok());
    }

    #[test]
    fn sampler_is_deterministic() {
        let f = PrimeField::default();
        let a = PointSampler::new(f, 9).next_point(4);
        let b = PointSampler::new(f, 9).next_point(4);
        assert_eq!(a, b);
        assert!(a.iter().all(|&v| v != 0));
    }
}
