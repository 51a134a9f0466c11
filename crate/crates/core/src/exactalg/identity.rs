//! Randomized identity testing over a prime field.

use serde::{Deserialize, Serialize};

use super::field::{PointSampler, PrimeField};
use super::{AlgebraError, RationalFn};

/// Upper bound on consecutive resamples before a test gives up.
pub const MAX_RESAMPLES: usize = 64;

/// Outcome of [`is_zero`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ZeroTest {
    /// Every sampled point evaluated to zero, or the numerator is the zero polynomial.
    ZeroWithConfidence {
        trials: usize,
        degree_bound: u64,
        /// `log10` of the Schwartz-Zippel failure bound; `None` when the zero is exact.
        failure_log10: Option<f64>,
        resamples: usize,
    },
    /// A point where the value is nonzero. This proves nonzeroness.
    NonzeroWitness {
        point: Vec<u64>,
        value: u64,
        confirmed_at_second_point: bool,
        resamples: usize,
    },
}

impl ZeroTest {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroTest::ZeroWithConfidence { .. })
    }
}

/// `log10((deg / (p - 1))^trials)`, or `None` when the bound is vacuous.
pub fn schwartz_zippel_log10(degree: u64, field: &PrimeField, trials: usize) -> Option<f64> {
    if degree == 0 {
        return Some(f64::NEG_INFINITY);
    }
    let per = degree as f64 / (field.modulus() - 1) as f64;
    if per >= 1.0 {
        None
    } else {
        Some(per.log10() * trials as f64)
    }
}

/// Draws the next point at which `f` is defined.
pub(crate) fn sample_defined<F>(
    sampler: &mut PointSampler,
    nvars: usize,
    resamples: &mut usize,
    mut f: F,
) -> Result<(Vec<u64>, u64), AlgebraError>
where
    F: FnMut(&[u64]) -> Result<u64, AlgebraError>,
{
    for _ in 0..=MAX_RESAMPLES {
        let pt = sampler.next_point(nvars);
        match f(&pt) {
            Ok(v) => return Ok((pt, v)),
            Err(AlgebraError::DenominatorVanished) => *resamples += 1,
            Err(e) => return Err(e),
        }
    }
    Err(AlgebraError::TooManyResamples(MAX_RESAMPLES))
}

/// Tests whether `f` is identically zero.
///
/// A structurally zero numerator is reported without sampling. Otherwise
/// `trials` random points are drawn; the first nonzero value is rechecked at
/// a fresh point before being reported.
pub fn is_zero(f: &RationalFn, trials: usize, seed: u64, field: &PrimeField) -> Result<ZeroTest, AlgebraError> {
    if trials == 0 {
        return Err(AlgebraError::ZeroTrials);
    }
    let degree_bound = f.numerator().span_degree();
    if f.is_zero() {
        return Ok(ZeroTest::ZeroWithConfidence {
            trials,
            degree_bound,
            failure_log10: None,
            resamples: 0,
        });
    }
    let n = f.nvars();
    let mut sampler = PointSampler::new(*field, seed);
    let mut resamples = 0;
    for _ in 0..trials {
        let (point, value) = sample_defined(&mut sampler, n, &mut resamples, |p| f.eval(field, p))?;
        if value != 0 {
            let (_, second) = sample_defined(&mut sampler, n, &mut resamples, |p| f.eval(field, p))?;
            return Ok(ZeroTest::NonzeroWitness {
                point,
                value,
                confirmed_at_second_point: second != 0,
                resamples,
            });
        }
    }
    Ok(ZeroTest::ZeroWithConfidence {
        trials,
        degree_bound,
        failure_log10: schwartz_zippel_log10(degree_bound, field, trials),
        resamples,
    })
}
