//! The kernels `E^(s)`, `F^(r)`, `Θ_s` and `T(k,N)` as localized classes,
//! and the check that `T` composed with its adjoint is the diagonal.

use serde::{Deserialize, Serialize};

use crate::exactalg::{ExponentVector, FractionBox, PrimeField, RationalFn, SupportBox};
use crate::geom::{self, FixedPoint};
use crate::ktheory::{
    self, adjoint, convolve, evaluated_equal, identity_kernel, kernels_equal, lambda_boxes, lambda_values,
    structure_sheaf_kernel, twist, AdjointSide, EvaluatedKernel, KernelClass, KernelComparison, KernelError,
    Orientation, SubvarietyKind, SubvarietySpec,
};

fn check_range(s: usize, k: usize, n: usize) -> Result<(), KernelError> {
    if s > k || k > n {
        return Err(KernelError::InvalidParameters(format!(
            "need 0 ≤ s ≤ k ≤ N, got s={s}, k={k}, N={n}"
        )));
    }
    Ok(())
}

fn check_flop(k: usize, n: usize) -> Result<(), KernelError> {
    if k == 0 {
        return Err(KernelError::InvalidParameters("k must be at least 1".into()));
    }
    if 2 * k > n {
        return Err(KernelError::InvalidParameters(format!("need 2k ≤ N, got k={k}, N={n}")));
    }
    Ok(())
}

/// `E^(s)(k,N): Y(k,N) → Y(k-s,N)`.
///
/// Transposed structure sheaf of `W^s(k-s,N)` twisted by
/// `det(C^N/V')^{-s} det(V_1)^s`, where `V'` has dimension `k-s`.
pub fn e_class(s: usize, k: usize, n: usize) -> Result<KernelClass, KernelError> {
    check_range(s, k, n)?;
    let spec = SubvarietySpec {
        kind: SubvarietyKind::WCorrespondence(s),
        orientation: Orientation::Transposed,
    };
    let w = structure_sheaf_kernel(spec, k - s, n)?;
    let si = s as i32;
    Ok(twist(&w, |big, small| {
        geom::weight(n, big.subset(), &small.complement(), 0).scale(si)
    }))
}

/// `F^(r)(k',N): Y(k',N) → Y(k'+r,N)`, the structure sheaf of `W^r(k',N)`
/// twisted by `det(V_2/V')^s` with `s = N - r - 2k'`.
pub fn f_class(r: usize, k_prime: usize, n: usize) -> Result<KernelClass, KernelError> {
    if n < r + 2 * k_prime {
        return Err(KernelError::InvalidParameters(format!(
            "need k' + r ≤ N and N - r - 2k' ≥ 0, got r={r}, k'={k_prime}, N={n}"
        )));
    }
    let s = (n - r - 2 * k_prime) as i32;
    let spec = SubvarietySpec {
        kind: SubvarietyKind::WCorrespondence(r),
        orientation: Orientation::AsIs,
    };
    let w = structure_sheaf_kernel(spec, k_prime, n)?;
    Ok(twist(&w, |small, big| {
        let mid: Vec<usize> = big.subset().iter().copied().filter(|&i| !small.contains(i)).collect();
        geom::weight(n, &mid, &[], 0).scale(s)
    }))
}

/// Exponent of `h` in the grading shift of `Θ_s(k,N)`: `s·k - C(s+1,2)`.
pub fn theta_grading(s: usize, k: usize) -> i32 {
    (s * k) as i32 - (s * (s + 1) / 2) as i32
}

/// Sign and `h`-shift multiplying the convolution `E^(s) ∘ F^(N-2k+s)` in `Θ_s`.
fn theta_prefactor(s: usize, k: usize, n: usize) -> (i32, ExponentVector) {
    let sign = if s % 2 == 0 { 1 } else { -1 };
    (sign, geom::h_weight(n).scale(theta_grading(s, k)))
}

/// `Θ_s(k,N) = F^(N-2k+s) * E^(s) [-s]`, a kernel `Y(k,N) → Y(N-k,N)`.
pub fn theta_class(s: usize, k: usize, n: usize) -> Result<KernelClass, KernelError> {
    check_range(s, k, n)?;
    if 2 * k > n {
        return Err(KernelError::InvalidParameters(format!("need 2k ≤ N, got k={k}, N={n}")));
    }
    let e = e_class(s, k, n)?;
    let f = f_class(n - 2 * k + s, k - s, n)?;
    let (sign, shift) = theta_prefactor(s, k, n);
    Ok(convolve(&e, &f)?.scale_monomial(sign, &shift))
}

/// The terms `Θ_k, …, Θ_0` of the complex whose convolution is `T(k,N)`.
#[derive(Clone, Debug)]
pub struct ThetaComplex {
    pub k: usize,
    pub n: usize,
    pub terms: Vec<(usize, KernelClass)>,
}

pub fn theta_complex(k: usize, n: usize) -> Result<ThetaComplex, KernelError> {
    check_flop(k, n)?;
    let terms = (0..=k)
        .rev()
        .map(|s| Ok((s, theta_class(s, k, n)?)))
        .collect::<Result<_, KernelError>>()?;
    Ok(ThetaComplex { k, n, terms })
}

impl ThetaComplex {
    /// Class of the iterated cone: `Σ_s (-1)^s Θ_s`.
    pub fn total(&self) -> Result<KernelClass, KernelError> {
        let mut acc = KernelClass::zero(self.k, self.n - self.k, self.n)?;
        for (s, th) in &self.terms {
            let term = if s % 2 == 0 {
                th.clone()
            } else {
                th.scale_monomial(-1, &ExponentVector::zero(geom::nvars(self.n)))
            };
            acc = acc.try_add(&term)?;
        }
        Ok(acc.reduced())
    }
}

/// `T(k,N): Y(k,N) → Y(N-k,N)`.
pub fn t_class(k: usize, n: usize) -> Result<KernelClass, KernelError> {
    theta_complex(k, n)?.total()
}

pub fn t_adjoint_class(k: usize, n: usize, side: AdjointSide) -> Result<KernelClass, KernelError> {
    Ok(adjoint(&t_class(k, n)?, side))
}

/// `T(k,N)` kept as its `E`, `F` factors so it can be evaluated at a point
/// without expanding any convolution symbolically.
pub struct TFactors {
    k: usize,
    n: usize,
    terms: Vec<(usize, KernelClass, KernelClass)>,
}

impl TFactors {
    pub fn new(k: usize, n: usize) -> Result<Self, KernelError> {
        check_flop(k, n)?;
        let terms = (0..=k)
            .map(|s| Ok((s, e_class(s, k, n)?, f_class(n - 2 * k + s, k - s, n)?)))
            .collect::<Result<_, KernelError>>()?;
        Ok(TFactors { k, n, terms })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `T` at a point.
    pub fn evaluate(&self, field: &PrimeField, point: &[u64]) -> Result<EvaluatedKernel, KernelError> {
        let rows = geom::binomial(self.n, self.k);
        let cols = geom::binomial(self.n, self.n - self.k);
        let mut acc = EvaluatedKernel {
            rows,
            cols,
            values: vec![0; rows * cols],
        };
        for (_, term) in self.evaluate_terms(field, point)? {
            acc.add_scaled(&term, 1, field);
        }
        Ok(acc)
    }

    /// The summands `(-1)^s Θ_s` of `T` at a point, for `s = 0..=k`.
    pub fn evaluate_terms(
        &self,
        field: &PrimeField,
        point: &[u64],
    ) -> Result<Vec<(usize, EvaluatedKernel)>, KernelError> {
        self.terms
            .iter()
            .map(|(s, e, f)| {
                let ev = EvaluatedKernel::evaluate(e, field, point)?;
                let fv = EvaluatedKernel::evaluate(f, field, point)?;
                let mid = lambda_values(self.k - s, self.n, field, point)?;
                let mut conv = ev.convolve(&fv, &mid, field)?;
                // Θ_s carries (-1)^s and the cone sum another (-1)^s.
                let (_, shift) = theta_prefactor(*s, self.k, self.n);
                conv.scale(RationalFn::exp(&shift).eval(field, point)?, field);
                Ok((*s, conv))
            })
            .collect()
    }

    /// Degree boxes of the entries of `T`.
    pub fn boxes(&self) -> Result<Vec<FractionBox>, KernelError> {
        let rows = geom::binomial(self.n, self.k);
        let cols = geom::binomial(self.n, self.n - self.k);
        let nv = geom::nvars(self.n);
        let mut out = vec![FractionBox::zero(nv); rows * cols];
        for (s, e, f) in &self.terms {
            let lam = lambda_boxes(self.k - s, self.n)?;
            let (_, shift) = theta_prefactor(*s, self.k, self.n);
            let shift_box = SupportBox::point(shift.as_slice());
            let eb = e.fraction_boxes();
            let fb = f.fraction_boxes();
            let mid = lam.len();
            for i in 0..rows {
                for j in 0..cols {
                    for m in 0..mid {
                        if e.get(i, m).is_zero() || f.get(m, j).is_zero() {
                            continue;
                        }
                        let t = eb[i * mid + m]
                            .mul(&fb[m * cols + j])
                            .div_poly(&lam[m])
                            .mul_poly(&shift_box);
                        out[i * cols + j] = out[i * cols + j].add(&t);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// The localized adjoint of a kernel known only through evaluations:
/// `bar` is evaluation at the inverse point.
fn adjoint_evaluated(
    at_inverse: &EvaluatedKernel,
    src: &[FixedPoint],
    tgt: &[FixedPoint],
    side: AdjointSide,
    field: &PrimeField,
    point: &[u64],
) -> Result<EvaluatedKernel, KernelError> {
    let mut out = at_inverse.transpose();
    let factor = |p: &FixedPoint| -> Result<u64, KernelError> {
        let (sign, omega) = ktheory::canonical_data(p);
        let v = RationalFn::exp(&omega).eval(field, point)?;
        Ok(if sign < 0 { field.neg(v) } else { v })
    };
    let row_f: Vec<u64> = tgt.iter().map(factor).collect::<Result<_, _>>()?;
    let col_f: Vec<u64> = src.iter().map(factor).collect::<Result<_, _>>()?;
    for i in 0..out.rows {
        for j in 0..out.cols {
            let c = match side {
                AdjointSide::Left => row_f[i],
                AdjointSide::Right => col_f[j],
            };
            let v = &mut out.values[i * out.cols + j];
            *v = field.mul(*v, c);
        }
    }
    Ok(out)
}

fn adjoint_boxes(t: &[FractionBox], src: &[FixedPoint], tgt: &[FixedPoint], side: AdjointSide) -> Vec<FractionBox> {
    let (r, c) = (src.len(), tgt.len());
    let mut out = Vec::with_capacity(r * c);
    for (i, q) in tgt.iter().enumerate() {
        for (j, p) in src.iter().enumerate() {
            let pt = match side {
                AdjointSide::Left => q,
                AdjointSide::Right => p,
            };
            let (_, omega) = ktheory::canonical_data(pt);
            out.push(t[j * c + i].bar().mul_poly(&SupportBox::point(omega.as_slice())));
        }
    }
    out
}

/// Degree bound for the entries of `A ∘ B - Δ` where `A`, `B` have the given boxes.
fn composite_degree(
    a: &[FractionBox],
    b: &[FractionBox],
    rows: usize,
    mid: &[SupportBox],
    diag: &[SupportBox],
    nvars: usize,
) -> u64 {
    let m = mid.len();
    let cols = b.len() / m;
    let mut best = 0;
    for i in 0..rows {
        for j in 0..cols {
            let mut acc = FractionBox::zero(0);
            let mut first = true;
            for (l, lam) in mid.iter().enumerate() {
                let t = a[i * m + l].mul(&b[l * cols + j]).div_poly(lam);
                if t.num.is_empty() {
                    continue;
                }
                acc = if first { t } else { acc.add(&t) };
                first = false;
            }
            if i == j {
                let d = FractionBox {
                    num: diag[i].clone(),
                    den: SupportBox::point(&vec![0; nvars]),
                };
                acc = if first { d } else { acc.add(&d) };
            }
            best = best.max(acc.numerator_degree());
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Exact,
    Probabilistic,
}

/// Outcome of checking `T ∘ T_adj = Δ` on `Y(k,N)` and `T_adj ∘ T = Δ` on `Y(N-k,N)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceCheck {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub side: AdjointSide,
    pub source_composite: KernelComparison,
    pub target_composite: KernelComparison,
    pub passed: bool,
}

/// Checks both composites. Exact mode expands every class symbolically;
/// probabilistic mode only evaluates at `trials` random points.
pub fn verify_equivalence(
    k: usize,
    n: usize,
    side: AdjointSide,
    mode: CheckMode,
    trials: usize,
    seed: u64,
    field: &PrimeField,
) -> Result<EquivalenceCheck, KernelError> {
    check_flop(k, n)?;
    let (source_composite, target_composite) = match mode {
        CheckMode::Exact => {
            let t = t_class(k, n)?;
            let tl = adjoint(&t, side);
            let a = convolve(&t, &tl)?;
            let b = convolve(&tl, &t)?;
            (
                kernels_equal(&a, &identity_kernel(k, n)?, 0, seed, field)?,
                kernels_equal(&b, &identity_kernel(n - k, n)?, 0, seed, field)?,
            )
        }
        CheckMode::Probabilistic => {
            let factors = TFactors::new(k, n)?;
            let src = geom::fixed_points(k, n)?;
            let tgt = geom::fixed_points(n - k, n)?;
            let tb = factors.boxes()?;
            let tlb = adjoint_boxes(&tb, &src, &tgt, side);
            let lam_src = lambda_boxes(k, n)?;
            let lam_tgt = lambda_boxes(n - k, n)?;
            let nv = geom::nvars(n);
            let deg_a = composite_degree(&tb, &tlb, src.len(), &lam_tgt, &lam_src, nv);
            let deg_b = composite_degree(&tlb, &tb, tgt.len(), &lam_src, &lam_tgt, nv);
            let eval_pair =
                |pt: &[u64]| -> Result<(EvaluatedKernel, EvaluatedKernel, Vec<u64>, Vec<u64>), KernelError> {
                    let t = factors.evaluate(field, pt)?;
                    let inv: Vec<u64> = pt.iter().map(|&v| field.inv(v).expect("nonzero sample")).collect();
                    let t_bar = factors.evaluate(field, &inv)?;
                    let tl = adjoint_evaluated(&t_bar, &src, &tgt, side, field, pt)?;
                    Ok((
                        t,
                        tl,
                        lambda_values(k, n, field, pt)?,
                        lambda_values(n - k, n, field, pt)?,
                    ))
                };
            let a = evaluated_equal(nv, trials, seed, field, deg_a, (&src, &src), |pt| {
                let (t, tl, ls, lt) = eval_pair(pt)?;
                Ok((t.convolve(&tl, &lt, field)?, EvaluatedKernel::diagonal(&ls)))
            })?;
            let b = evaluated_equal(nv, trials, seed.wrapping_add(1), field, deg_b, (&tgt, &tgt), |pt| {
                let (t, tl, ls, lt) = eval_pair(pt)?;
                Ok((tl.convolve(&t, &ls, field)?, EvaluatedKernel::diagonal(&lt)))
            })?;
            (a, b)
        }
    };
    let passed = source_composite.equal && target_composite.equal;
    Ok(EquivalenceCheck {
        k,
        n,
        side,
        source_composite,
        target_composite,
        passed,
    })
}
