//! Localized equivariant K-theory classes of kernels on `Y(k,N) × Y(k',N)`.
//!
//! A kernel is stored as its restrictions to pairs of torus fixed points.
//! Rows index the source `Y(k_src,N)`, columns the target `Y(k_tgt,N)`, both
//! in colex order.

use std::collections::HashMap;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exactalg::{
    is_zero, sample_defined, schwartz_zippel_log10, AlgebraError, ExponentVector, FractionBox, LaurentPoly,
    PointSampler, PrimeField, RationalFn, SupportBox, ZeroTest,
};
use crate::geom::{self, FixedPoint, FlagPoint, GeomError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// A localized kernel class.
#[derive(Clone, Debug)]
pub struct KernelClass {
    k_src: usize,
    k_tgt: usize,
    n: usize,
    rows: Vec<FixedPoint>,
    cols: Vec<FixedPoint>,
    entries: Vec<RationalFn>,
}

impl KernelClass {
    pub fn zero(k_src: usize, k_tgt: usize, n: usize) -> Result<Self, KernelError> {
        let rows = geom::fixed_points(k_src, n)?;
        let cols = geom::fixed_points(k_tgt, n)?;
        let entries = vec![RationalFn::zero(geom::nvars(n)); rows.len() * cols.len()];
        Ok(KernelClass {
            k_src,
            k_tgt,
            n,
            rows,
            cols,
            entries,
        })
    }

    /// Builds a kernel entrywise.
    pub fn from_fn<F>(k_src: usize, k_tgt: usize, n: usize, f: F) -> Result<Self, KernelError>
    where
        F: Fn(&FixedPoint, &FixedPoint) -> Result<RationalFn, KernelError> + Sync,
    {
        let mut out = Self::zero(k_src, k_tgt, n)?;
        let cols = out.cols.len();
        let rows = &out.rows;
        let colv = &out.cols;
        let entries: Vec<RationalFn> = (0..rows.len() * cols)
            .into_par_iter()
            .map(|idx| f(&rows[idx / cols], &colv[idx % cols]))
            .collect::<Result<_, _>>()?;
        out.entries = entries;
        Ok(out)
    }

    pub fn k_src(&self) -> usize {
        self.k_src
    }

    pub fn k_tgt(&self) -> usize {
        self.k_tgt
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        geom::nvars(self.n)
    }

    pub fn rows(&self) -> &[FixedPoint] {
        &self.rows
    }

    pub fn cols(&self) -> &[FixedPoint] {
        &self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalFn {
        &self.entries[i * self.cols.len() + j]
    }

    /// Entry at a pair of fixed points.
    pub fn entry(&self, p: &FixedPoint, q: &FixedPoint) -> &RationalFn {
        self.get(geom::colex_index(p), geom::colex_index(q))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&FixedPoint, &FixedPoint, &RationalFn)> {
        let c = self.cols.len();
        self.entries
            .iter()
            .enumerate()
            .map(move |(idx, v)| (&self.rows[idx / c], &self.cols[idx % c], v))
    }

    fn same_shape(&self, other: &Self) -> Result<(), KernelError> {
        if (self.k_src, self.k_tgt, self.n) != (other.k_src, other.k_tgt, other.n) {
            return Err(KernelError::ShapeMismatch(format!(
                "Y({},{})→Y({},{}) vs Y({},{})→Y({},{})",
                self.k_src, self.n, self.k_tgt, self.n, other.k_src, other.n, other.k_tgt, other.n
            )));
        }
        Ok(())
    }

    fn map<F>(&self, f: F) -> Result<Self, KernelError>
    where
        F: Fn(usize, &RationalFn) -> Result<RationalFn, KernelError> + Sync,
    {
        let entries = self
            .entries
            .par_iter()
            .enumerate()
            .map(|(idx, v)| f(idx, v))
            .collect::<Result<_, _>>()?;
        Ok(KernelClass {
            entries,
            ..self.clone_shape()
        })
    }

    fn clone_shape(&self) -> Self {
        KernelClass {
            k_src: self.k_src,
            k_tgt: self.k_tgt,
            n: self.n,
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: Vec::new(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, KernelError> {
        self.same_shape(other)?;
        self.map(|idx, v| Ok(v.try_add(&other.entries[idx])?))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, KernelError> {
        self.same_shape(other)?;
        self.map(|idx, v| Ok(v.try_sub(&other.entries[idx])?))
    }

    /// Multiplies every entry by `±e^w`.
    pub fn scale_monomial(&self, sign: i32, w: &ExponentVector) -> Self {
        let c = num_rational::BigRational::from_integer(sign.into());
        self.map(|_, v| Ok(v.shift(w).scale(&c))).expect("infallible")
    }

    /// Swaps source and target without changing entries.
    pub fn transpose(&self) -> Self {
        let (r, c) = self.shape();
        let mut entries = Vec::with_capacity(r * c);
        for j in 0..c {
            for i in 0..r {
                entries.push(self.get(i, j).clone());
            }
        }
        KernelClass {
            k_src: self.k_tgt,
            k_tgt: self.k_src,
            n: self.n,
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            entries,
        }
    }

    /// Cancels exact denominators entrywise.
    pub fn reduced(&self) -> Self {
        self.map(|_, v| Ok(v.reduce())).expect("infallible")
    }

    /// Degree bookkeeping for each entry.
    pub fn fraction_boxes(&self) -> Vec<FractionBox> {
        self.entries.iter().map(FractionBox::of_ratfn).collect()
    }

    pub fn is_structurally_zero_at(&self, i: usize, j: usize) -> bool {
        self.get(i, j).is_zero()
    }
}

/// Which subvariety a structure-sheaf kernel is supported on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubvarietyKind {
    Diagonal,
    WCorrespondence(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    AsIs,
    Transposed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubvarietySpec {
    pub kind: SubvarietyKind,
    pub orientation: Orientation,
}

/// `Π (1 - e^{-w})` over a weight list.
pub fn lambda_minus_one(weights: &geom::WeightMultiset, nvars: usize) -> LaurentPoly {
    weights
        .iter()
        .fold(LaurentPoly::one(nvars), |acc, w| &acc * &LaurentPoly::euler_factor(w))
}

/// `λ_{-1}(T^∨_p Y)`.
pub fn lambda_tangent(p: &FixedPoint) -> LaurentPoly {
    lambda_minus_one(&geom::tangent_weights_y(p), geom::nvars(p.n()))
}

/// Class of the structure sheaf of the diagonal or of `W^r(k,N)`.
///
/// The `k` argument is the dimension of the smaller subspace `V_1`. As-is the
/// kernel maps `Y(k,N) → Y(k+r,N)`; transposed it maps back.
pub fn structure_sheaf_kernel(spec: SubvarietySpec, k: usize, n: usize) -> Result<KernelClass, KernelError> {
    let r = match spec.kind {
        SubvarietyKind::Diagonal => 0,
        SubvarietyKind::WCorrespondence(r) => r,
    };
    if k + r > n {
        return Err(KernelError::InvalidParameters(format!(
            "k + r = {} exceeds N = {n}",
            k + r
        )));
    }
    let nv = geom::nvars(n);
    let value = move |small: &FixedPoint, big: &FixedPoint| -> Result<RationalFn, KernelError> {
        if !small.is_subset_of(big) {
            return Ok(RationalFn::zero(nv));
        }
        let q = FlagPoint::new(small.clone(), big.clone())?;
        Ok(RationalFn::from_poly(lambda_minus_one(
            &geom::normal_weights_w(r, &q)?,
            nv,
        )))
    };
    match spec.orientation {
        Orientation::AsIs => KernelClass::from_fn(k, k + r, n, |a, b| value(a, b)),
        Orientation::Transposed => KernelClass::from_fn(k + r, k, n, |a, b| value(b, a)),
    }
}

/// The diagonal kernel.
pub fn identity_kernel(k: usize, n: usize) -> Result<KernelClass, KernelError> {
    let nv = geom::nvars(n);
    KernelClass::from_fn(k, k, n, |a, b| {
        Ok(if a == b {
            RationalFn::from_poly(lambda_tangent(a))
        } else {
            RationalFn::zero(nv)
        })
    })
}

/// Multiplies every entry by `e^{χ(p,q)}`.
pub fn twist<F>(p: &KernelClass, chi: F) -> KernelClass
where
    F: Fn(&FixedPoint, &FixedPoint) -> ExponentVector + Sync,
{
    let c = p.cols.len();
    p.map(|idx, v| {
        if v.is_zero() {
            return Ok(v.clone());
        }
        Ok(v.shift(&chi(&p.rows[idx / c], &p.cols[idx % c])))
    })
    .expect("infallible")
}

/// Composition `P ∘ Q` by localization over the middle factor.
pub fn convolve(p: &KernelClass, q: &KernelClass) -> Result<KernelClass, KernelError> {
    if p.k_tgt != q.k_src || p.n != q.n {
        return Err(KernelError::ShapeMismatch(format!(
            "cannot compose Y({},{})→Y({},{}) with Y({},{})→Y({},{})",
            p.k_src, p.n, p.k_tgt, p.n, q.k_src, q.n, q.k_tgt, q.n
        )));
    }
    let basis = EulerBasis::new(p.n);
    let factor_all = |k: &KernelClass| -> Option<Vec<Factored>> {
        k.entries.par_iter().map(|v| basis.factor(v.denominator())).collect()
    };
    let lambda_mults: Option<Vec<Vec<u32>>> = p
        .cols
        .iter()
        .map(|m| basis.multiplicities(&geom::tangent_weights_y(m)))
        .collect();
    let (Some(pf), Some(qf), Some(lambda_mults)) = (factor_all(p), factor_all(q), lambda_mults) else {
        return convolve_unfactored(p, q);
    };
    let mid = p.cols.len();
    let qcols = q.cols.len();
    KernelClass::from_fn(p.k_src, q.k_tgt, p.n, |a, c| {
        let i = geom::colex_index(a);
        let j = geom::colex_index(c);
        let mut terms = Vec::new();
        let mut lcm = vec![0u32; basis.len()];
        for (m, lam) in lambda_mults.iter().enumerate() {
            let (x, y) = (p.get(i, m), q.get(m, j));
            if x.is_zero() || y.is_zero() {
                continue;
            }
            let (fx, fy) = (&pf[i * mid + m], &qf[m * qcols + j]);
            let mut num = x.numerator().try_mul(y.numerator())?.mul_term(
                &-(&fx.unit_exp + &fy.unit_exp),
                &(&fx.unit_coef * &fy.unit_coef).recip(),
            );
            let mut mult: Vec<u32> = (0..basis.len()).map(|f| fx.mult[f] + fy.mult[f] + lam[f]).collect();
            basis.cancel(&mut num, &mut mult);
            for (l, &e) in lcm.iter_mut().zip(&mult) {
                *l = (*l).max(e);
            }
            terms.push((num, mult));
        }
        let mut acc = LaurentPoly::zero(p.nvars());
        for (num, mult) in terms {
            let cofactor: Vec<u32> = lcm.iter().zip(&mult).map(|(l, e)| l - e).collect();
            acc = acc.try_add(&num.try_mul(&basis.product(&cofactor))?)?;
        }
        if acc.is_zero() {
            return Ok(RationalFn::zero(p.nvars()));
        }
        basis.cancel(&mut acc, &mut lcm);
        Ok(RationalFn::new(acc, basis.product(&lcm))?)
    })
}

/// Fallback for denominators outside the span of Euler factors.
fn convolve_unfactored(p: &KernelClass, q: &KernelClass) -> Result<KernelClass, KernelError> {
    let lambdas: Vec<LaurentPoly> = p.cols.iter().map(lambda_tangent).collect();
    let nv = p.nvars();
    KernelClass::from_fn(p.k_src, q.k_tgt, p.n, |a, c| {
        let i = geom::colex_index(a);
        let j = geom::colex_index(c);
        let mut acc = RationalFn::zero(nv);
        for (m, lam) in lambdas.iter().enumerate() {
            let x = p.get(i, m);
            let y = q.get(m, j);
            if x.is_zero() || y.is_zero() {
                continue;
            }
            let term = x.try_mul(y)?.div_poly(lam)?;
            acc = acc.try_add(&term)?;
        }
        Ok(acc.reduce())
    })
}

/// A denominator written as `c·e^v·Π f_i^{m_i}` over an [`EulerBasis`].
struct Factored {
    unit_exp: ExponentVector,
    unit_coef: BigRational,
    mult: Vec<u32>,
}

/// The Euler factors `1 - e^{-w}` for every `w = ±(x_i - x_j) + {0, h}`.
struct EulerBasis {
    index: HashMap<ExponentVector, usize>,
    factors: Vec<LaurentPoly>,
    nvars: usize,
}

impl EulerBasis {
    fn new(n: usize) -> Self {
        let mut index = HashMap::new();
        let mut factors = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                for h in 0..=1 {
                    let w = geom::weight(n, &[i], &[j], h);
                    factors.push(LaurentPoly::euler_factor(&w));
                    index.insert(w, factors.len() - 1);
                }
            }
        }
        EulerBasis {
            index,
            factors,
            nvars: geom::nvars(n),
        }
    }

    fn len(&self) -> usize {
        self.factors.len()
    }

    /// Divides `num` by every basis factor it shares with `Π f_i^{mult_i}`.
    fn cancel(&self, num: &mut LaurentPoly, mult: &mut [u32]) {
        for (f, e) in mult.iter_mut().enumerate() {
            while *e > 0 {
                match num.div_exact(&self.factors[f]) {
                    Some(quot) => {
                        *num = quot;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
    }

    fn multiplicities(&self, weights: &geom::WeightMultiset) -> Option<Vec<u32>> {
        let mut mult = vec![0u32; self.len()];
        for w in weights.iter() {
            mult[*self.index.get(w)?] += 1;
        }
        Some(mult)
    }

    fn product(&self, mult: &[u32]) -> LaurentPoly {
        let mut out = LaurentPoly::one(self.nvars);
        for (f, &e) in self.factors.iter().zip(mult) {
            for _ in 0..e {
                out = &out * f;
            }
        }
        out
    }

    /// Trial division by the basis until a monomial is left.
    fn factor(&self, den: &LaurentPoly) -> Option<Factored> {
        let mut rem = den.clone();
        let mut mult = vec![0u32; self.len()];
        loop {
            if let Some((e, c)) = rem.as_monomial() {
                return Some(Factored {
                    unit_exp: e.clone(),
                    unit_coef: c.clone(),
                    mult,
                });
            }
            let (f, quot) = self
                .factors
                .iter()
                .enumerate()
                .find_map(|(f, d)| rem.div_exact(d).map(|q| (f, q)))?;
            mult[f] += 1;
            rem = quot;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjointSide {
    /// Twist by the canonical character of the target factor.
    Left,
    /// Twist by the canonical character of the source factor.
    Right,
}

/// `(-1)^{dim}` and `ω = e^{-Σ tangent weights}` of `Y(k,N)` at `p`.
pub fn canonical_data(p: &FixedPoint) -> (i32, ExponentVector) {
    let tw = geom::tangent_weights_y(p);
    let sign = if tw.len() % 2 == 0 { 1 } else { -1 };
    (sign, -&tw.total(geom::nvars(p.n())))
}

/// Localized adjoint kernel: transposed bar involution, twisted by the
/// canonical character of one factor and signed by its dimension.
pub fn adjoint(p: &KernelClass, side: AdjointSide) -> KernelClass {
    let t = p.transpose();
    let c = t.cols.len();
    t.map(|idx, v| {
        if v.is_zero() {
            return Ok(v.clone());
        }
        // Rows of `t` are points of the original target.
        let pt = match side {
            AdjointSide::Left => &t.rows[idx / c],
            AdjointSide::Right => &t.cols[idx % c],
        };
        let (sign, omega) = canonical_data(pt);
        let b = v.bar().shift(&omega);
        Ok(if sign < 0 { -&b } else { b })
    })
    .expect("infallible")
}

/// Result of comparing two kernels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelComparison {
    pub equal: bool,
    pub mode: ComparisonMode,
    pub entries_checked: usize,
    pub trials: usize,
    /// Largest degree bound over entries that needed sampling.
    pub max_degree_bound: u64,
    /// `log10` of the per-entry failure bound; `None` when every entry was decided exactly.
    pub per_entry_failure_log10: Option<f64>,
    /// `log10` of the union bound over all sampled entries.
    pub aggregate_failure_log10: Option<f64>,
    pub resamples: usize,
    pub witness: Option<EntryWitness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonMode {
    Exact,
    Probabilistic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryWitness {
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    /// Sample point, or `None` when the difference was decided exactly.
    pub point: Option<Vec<u64>>,
    pub confirmed_at_second_point: bool,
}

/// Entrywise comparison. `trials == 0` selects exact cross-multiplication.
pub fn kernels_equal(
    p: &KernelClass,
    q: &KernelClass,
    trials: usize,
    seed: u64,
    field: &PrimeField,
) -> Result<KernelComparison, KernelError> {
    p.same_shape(q)?;
    let count = p.entries.len();
    if trials == 0 {
        let first_bad = (0..count).find(|&idx| !p.entries[idx].equals(&q.entries[idx]));
        let c = p.cols.len();
        return Ok(KernelComparison {
            equal: first_bad.is_none(),
            mode: ComparisonMode::Exact,
            entries_checked: count,
            trials: 0,
            max_degree_bound: 0,
            per_entry_failure_log10: None,
            aggregate_failure_log10: None,
            resamples: 0,
            witness: first_bad.map(|idx| EntryWitness {
                src: p.rows[idx / c].subset().to_vec(),
                tgt: p.cols[idx % c].subset().to_vec(),
                point: None,
                confirmed_at_second_point: true,
            }),
        });
    }
    let mut max_degree = 0u64;
    let mut sampled = 0usize;
    let mut resamples = 0usize;
    for idx in 0..count {
        let diff = p.entries[idx].try_sub(&q.entries[idx])?;
        // Distinct seeds per entry keep entries independent and the run reproducible.
        let entry_seed = seed.wrapping_add((idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        match is_zero(&diff, trials, entry_seed, field)? {
            ZeroTest::ZeroWithConfidence {
                degree_bound,
                failure_log10,
                resamples: r,
                ..
            } => {
                resamples += r;
                if failure_log10.is_some() {
                    sampled += 1;
                    max_degree = max_degree.max(degree_bound);
                }
            }
            ZeroTest::NonzeroWitness {
                point,
                confirmed_at_second_point,
                resamples: r,
                ..
            } => {
                let c = p.cols.len();
                return Ok(KernelComparison {
                    equal: false,
                    mode: ComparisonMode::Probabilistic,
                    entries_checked: idx + 1,
                    trials,
                    max_degree_bound: max_degree,
                    per_entry_failure_log10: None,
                    aggregate_failure_log10: None,
                    resamples: resamples + r,
                    witness: Some(EntryWitness {
                        src: p.rows[idx / c].subset().to_vec(),
                        tgt: p.cols[idx % c].subset().to_vec(),
                        point: Some(point),
                        confirmed_at_second_point,
                    }),
                });
            }
        }
    }
    let per = if sampled > 0 {
        schwartz_zippel_log10(max_degree, field, trials)
    } else {
        None
    };
    Ok(KernelComparison {
        equal: true,
        mode: ComparisonMode::Probabilistic,
        entries_checked: count,
        trials,
        max_degree_bound: max_degree,
        per_entry_failure_log10: per,
        aggregate_failure_log10: per.map(|l| l + (sampled as f64).log10()),
        resamples,
        witness: None,
    })
}

/// A kernel evaluated at one point of the torus, modulo a prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluatedKernel {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<u64>,
}

impl EvaluatedKernel {
    pub fn evaluate(p: &KernelClass, field: &PrimeField, point: &[u64]) -> Result<Self, AlgebraError> {
        let values = p
            .entries
            .iter()
            .map(|v| v.eval(field, point))
            .collect::<Result<_, _>>()?;
        Ok(EvaluatedKernel {
            rows: p.rows.len(),
            cols: p.cols.len(),
            values,
        })
    }

    pub fn diagonal(values: &[u64]) -> Self {
        let n = values.len();
        let mut out = vec![0u64; n * n];
        for (i, &v) in values.iter().enumerate() {
            out[i * n + i] = v;
        }
        EvaluatedKernel {
            rows: n,
            cols: n,
            values: out,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.values[i * self.cols + j]
    }

    /// `Σ_m self(i,m) · other(m,j) / mid[m]`.
    pub fn convolve(&self, other: &Self, mid: &[u64], field: &PrimeField) -> Result<Self, AlgebraError> {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.cols, mid.len());
        let inv: Vec<u64> = mid
            .iter()
            .map(|&m| field.inv(m).ok_or(AlgebraError::DenominatorVanished))
            .collect::<Result<_, _>>()?;
        let mut values = vec![0u64; self.rows * other.cols];
        for i in 0..self.rows {
            for m in 0..self.cols {
                let a = self.get(i, m);
                if a == 0 {
                    continue;
                }
                let a = field.mul(a, inv[m]);
                for j in 0..other.cols {
                    let v = &mut values[i * other.cols + j];
                    *v = field.add(*v, field.mul(a, other.get(m, j)));
                }
            }
        }
        Ok(EvaluatedKernel {
            rows: self.rows,
            cols: other.cols,
            values,
        })
    }

    pub fn add_scaled(&mut self, other: &Self, c: u64, field: &PrimeField) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.values.iter_mut().zip(&other.values) {
            *a = field.add(*a, field.mul(c, b));
        }
    }

    pub fn scale(&mut self, c: u64, field: &PrimeField) {
        for a in &mut self.values {
            *a = field.mul(*a, c);
        }
    }

    pub fn transpose(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                values.push(self.get(i, j));
            }
        }
        EvaluatedKernel {
            rows: self.cols,
            cols: self.rows,
            values,
        }
    }

    /// First index where the two differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        self.values
            .iter()
            .zip(&other.values)
            .position(|(a, b)| a != b)
            .map(|idx| (idx / self.cols, idx % self.cols))
    }
}

/// `λ_{-1}(T^∨_p)` at every fixed point of `Y(k,N)`, evaluated.
pub fn lambda_values(k: usize, n: usize, field: &PrimeField, point: &[u64]) -> Result<Vec<u64>, KernelError> {
    let mut out = Vec::new();
    for p in geom::fixed_points(k, n)? {
        let v = lambda_tangent(&p).eval(field, point)?;
        if v == 0 {
            return Err(AlgebraError::DenominatorVanished.into());
        }
        out.push(v);
    }
    Ok(out)
}

/// Support boxes of `λ_{-1}(T^∨_p)` at every fixed point of `Y(k,N)`.
pub fn lambda_boxes(k: usize, n: usize) -> Result<Vec<SupportBox>, KernelError> {
    Ok(geom::fixed_points(k, n)?
        .iter()
        .map(|p| SupportBox::of_poly(&lambda_tangent(p)))
        .collect())
}

/// Comparison of two matrix-valued functions that are only ever evaluated.
///
/// `eval` returns the two sides at a point. `degree_bound` bounds the total
/// degree of every cleared entry of the difference.
pub fn evaluated_equal<F>(
    nvars: usize,
    trials: usize,
    seed: u64,
    field: &PrimeField,
    degree_bound: u64,
    labels: (&[FixedPoint], &[FixedPoint]),
    mut eval: F,
) -> Result<KernelComparison, KernelError>
where
    F: FnMut(&[u64]) -> Result<(EvaluatedKernel, EvaluatedKernel), KernelError>,
{
    if trials == 0 {
        return Err(AlgebraError::ZeroTrials.into());
    }
    let mut sampler = PointSampler::new(*field, seed);
    let mut resamples = 0usize;
    let mut run = |sampler: &mut PointSampler, resamples: &mut usize| {
        let mut last = None;
        let res = sample_defined(sampler, nvars, resamples, |pt| match eval(pt) {
            Ok(pair) => {
                last = Some(pair);
                Ok(0)
            }
            Err(KernelError::Algebra(e)) => Err(e),
            Err(other) => panic!("evaluation failed: {other}"),
        });
        res.map(|(pt, _)| (pt, last.expect("set on success")))
    };
    let mut entries = 0;
    for _ in 0..trials {
        let (pt, (lhs, rhs)) = run(&mut sampler, &mut resamples)?;
        entries = lhs.values.len();
        if let Some((i, j)) = lhs.first_difference(&rhs) {
            let (_, (l2, r2)) = run(&mut sampler, &mut resamples)?;
            return Ok(KernelComparison {
                equal: false,
                mode: ComparisonMode::Probabilistic,
                entries_checked: entries,
                trials,
                max_degree_bound: degree_bound,
                per_entry_failure_log10: None,
                aggregate_failure_log10: None,
                resamples,
                witness: Some(EntryWitness {
                    src: labels.0[i].subset().to_vec(),
                    tgt: labels.1[j].subset().to_vec(),
                    point: Some(pt),
                    confirmed_at_second_point: l2.get(i, j) != r2.get(i, j),
                }),
            });
        }
    }
    let per = schwartz_zippel_log10(degree_bound, field, trials);
    Ok(KernelComparison {
        equal: true,
        mode: ComparisonMode::Probabilistic,
        entries_checked: entries,
        trials,
        max_degree_bound: degree_bound,
        per_entry_failure_log10: per,
        aggregate_failure_log10: per.map(|l| l + (entries.max(1) as f64).log10()),
        resamples,
        witness: None,
    })
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    src: Vec<usize>,
    tgt: Vec<usize>,
    val: RationalFn,
}

#[derive(Serialize, Deserialize)]
struct KernelRepr {
    k_src: usize,
    k_tgt: usize,
    #[serde(rename = "N")]
    n: usize,
    /// `[rows, cols]`; zero entries are omitted from `entries`.
    #[serde(default)]
    shape: Option<[usize; 2]>,
    entries: Vec<EntryRepr>,
}

impl Serialize for KernelClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let entries = self
            .entries()
            .filter(|(_, _, v)| !v.is_zero())
            .map(|(a, b, v)| EntryRepr {
                src: a.subset().to_vec(),
                tgt: b.subset().to_vec(),
                val: v.clone(),
            })
            .collect();
        let (r, c) = self.shape();
        KernelRepr {
            k_src: self.k_src,
            k_tgt: self.k_tgt,
            n: self.n,
            shape: Some([r, c]),
            entries,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KernelClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = KernelRepr::deserialize(d)?;
        let mut out = KernelClass::zero(r.k_src, r.k_tgt, r.n).map_err(D::Error::custom)?;
        let cols = out.cols.len();
        if r.shape.is_some_and(|sh| sh != [out.rows.len(), cols]) {
            return Err(D::Error::custom("shape does not match k_src, k_tgt and N"));
        }
        for e in r.entries {
            let a = FixedPoint::new(r.n, e.src).map_err(D::Error::custom)?;
            let b = FixedPoint::new(r.n, e.tgt).map_err(D::Error::custom)?;
            if a.k() != r.k_src || b.k() != r.k_tgt {
                return Err(D::Error::custom("entry index has the wrong cardinality"));
            }
            if e.val.nvars() != geom::nvars(r.n) {
                return Err(D::Error::custom("entry has the wrong number of variables"));
            }
            out.entries[geom::colex_index(&a) * cols + geom::colex_index(&b)] = e.val;
        }
        Ok(out)
    }
}
