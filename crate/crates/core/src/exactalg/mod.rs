//! Exact arithmetic: Laurent polynomials over the rationals, their fractions,
//! and randomized identity testing modulo a prime.

mod field;
mod identity;
mod laurent;
mod monomial;
mod ratfn;
mod support;

pub use field::{is_prime_u64, EvalContext, PointSampler, PrimeField, DEFAULT_PRIME};
pub(crate) use identity::sample_defined;
pub use identity::{is_zero, schwartz_zippel_log10, ZeroTest, MAX_RESAMPLES};
pub use laurent::LaurentPoly;
pub use monomial::ExponentVector;
pub use ratfn::RationalFn;
pub use support::{FractionBox, SupportBox};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("variable count mismatch: {left} vs {right}")]
    VariableCountMismatch { left: usize, right: usize },
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanished at the evaluation point")]
    DenominatorVanished,
    #[error("variable {0} assigned zero")]
    ZeroAssignment(usize),
    #[error("variable {0} has no assignment")]
    UnassignedVariable(usize),
    #[error("{0} is not a prime below 2^64")]
    InvalidPrime(String),
    #[error("identity test needs at least one trial")]
    ZeroTrials,
    #[error("gave up after {0} consecutive degenerate sample points")]
    TooManyResamples(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn poly_arith(a: &LaurentPoly, b: &LaurentPoly, op: PolyOp) -> Result<LaurentPoly, AlgebraError> {
    match op {
        PolyOp::Add => a.try_add(b),
        PolyOp::Sub => a.try_sub(b),
        PolyOp::Mul => a.try_mul(b),
    }
}

pub fn ratfn_arith(a: &RationalFn, b: &RationalFn, op: RatOp) -> Result<RationalFn, AlgebraError> {
    match op {
        RatOp::Add => a.try_add(b),
        RatOp::Sub => a.try_sub(b),
        RatOp::Mul => a.try_mul(b),
        RatOp::Div => a.try_div(b),
    }
}

pub fn eval_mod_p(f: &RationalFn, ctx: &EvalContext) -> Result<u64, AlgebraError> {
    f.eval(&ctx.field, &ctx.point(f.nvars())?)
}

pub fn bar_involution(f: &RationalFn) -> RationalFn {
    f.bar()
}
