//! Torus fixed points and tangent/normal weights of `Y(k,N) = T*G(k,N)` and of
//! the flag correspondences `W^r(k,N)`.
//!
//! Weights are exponent vectors in `x_1..x_N, h`; the cotangent fibre scales
//! with `+h`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::ExponentVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("k = {k} exceeds N = {n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("malformed flag: {0}")]
    MalformedChain(String),
    #[error("invalid subset {subset:?} of 1..{n}")]
    InvalidSubset { subset: Vec<usize>, n: usize },
    #[error("normal weights undefined: {0}")]
    InternalInconsistency(String),
    #[error("{bundle:?} is not defined at a {point} point")]
    UndefinedBundle { bundle: LineBundle, point: &'static str },
}

/// A coordinate `k`-plane of `C^N`, stored as a sorted 1-based subset.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FixedPoint {
    n: usize,
    subset: Vec<usize>,
}

impl FixedPoint {
    pub fn new(n: usize, mut subset: Vec<usize>) -> Result<Self, GeomError> {
        subset.sort_unstable();
        let dup = subset.windows(2).any(|w| w[0] == w[1]);
        if dup || subset.iter().any(|&i| i == 0 || i > n) {
            return Err(GeomError::InvalidSubset { subset, n });
        }
        Ok(FixedPoint { n, subset })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.subset.len()
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn contains(&self, i: usize) -> bool {
        self.subset.binary_search(&i).is_ok()
    }

    /// Complement in `1..=N`.
    pub fn complement(&self) -> Vec<usize> {
        (1..=self.n).filter(|&i| !self.contains(i)).collect()
    }

    pub fn is_subset_of(&self, other: &FixedPoint) -> bool {
        self.subset.iter().all(|&i| other.contains(i))
    }

    pub fn intersection_size(&self, other: &FixedPoint) -> usize {
        self.subset.iter().filter(|&&i| other.contains(i)).count()
    }
}

/// A fixed point `S_1 ⊂ S_2` of a two-step flag.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlagPoint {
    inner: FixedPoint,
    outer: FixedPoint,
}

impl FlagPoint {
    pub fn new(inner: FixedPoint, outer: FixedPoint) -> Result<Self, GeomError> {
        if inner.n != outer.n {
            return Err(GeomError::MalformedChain(format!("ambient {} vs {}", inner.n, outer.n)));
        }
        if !inner.is_subset_of(&outer) {
            return Err(GeomError::MalformedChain(format!(
                "{:?} is not contained in {:?}",
                inner.subset, outer.subset
            )));
        }
        Ok(FlagPoint { inner, outer })
    }

    pub fn inner(&self) -> &FixedPoint {
        &self.inner
    }

    pub fn outer(&self) -> &FixedPoint {
        &self.outer
    }

    /// `r = |S_2| - |S_1|`.
    pub fn r(&self) -> usize {
        self.outer.k() - self.inner.k()
    }

    fn middle(&self) -> Vec<usize> {
        self.outer
            .subset
            .iter()
            .copied()
            .filter(|&i| !self.inner.contains(i))
            .collect()
    }
}

/// A multiset of torus weights, compared up to reordering.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightMultiset(Vec<ExponentVector>);

impl WeightMultiset {
    pub fn new(weights: Vec<ExponentVector>) -> Self {
        WeightMultiset(weights)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ExponentVector> {
        self.0.iter()
    }

    pub fn sorted(&self) -> Vec<ExponentVector> {
        let mut v = self.0.clone();
        v.sort();
        v
    }

    pub fn union(&self, other: &WeightMultiset) -> WeightMultiset {
        WeightMultiset(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    /// Multiset difference; `None` if `other` is not contained in `self`.
    pub fn difference(&self, other: &WeightMultiset) -> Option<WeightMultiset> {
        let mut rest = self.0.clone();
        for w in &other.0 {
            let pos = rest.iter().position(|v| v == w)?;
            rest.swap_remove(pos);
        }
        rest.sort();
        Some(WeightMultiset(rest))
    }

    /// Sum of all weights as a single character.
    pub fn total(&self, nvars: usize) -> ExponentVector {
        self.0.iter().fold(ExponentVector::zero(nvars), |acc, w| &acc + w)
    }
}

impl PartialEq for WeightMultiset {
    fn eq(&self, other: &Self) -> bool {
        self.sorted() == other.sorted()
    }
}

impl Eq for WeightMultiset {}

/// Number of variables `x_1..x_N, h`.
pub fn nvars(n: usize) -> usize {
    n + 1
}

/// `Σ_{i ∈ plus} x_i - Σ_{j ∈ minus} x_j + h_coef·h`, with 1-based indices.
pub fn weight(n: usize, plus: &[usize], minus: &[usize], h_coef: i32) -> ExponentVector {
    let mut v = vec![0i32; n + 1];
    for &i in plus {
        v[i - 1] += 1;
    }
    for &j in minus {
        v[j - 1] -= 1;
    }
    v[n] += h_coef;
    ExponentVector::from_vec(v)
}

/// The character `h`.
pub fn h_weight(n: usize) -> ExponentVector {
    ExponentVector::unit(n + 1, n)
}

/// All `k`-subsets of `1..=N` in colexicographic order.
pub fn fixed_points(k: usize, n: usize) -> Result<Vec<FixedPoint>, GeomError> {
    if k > n {
        return Err(GeomError::KOutOfRange { k, n });
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (1..=k).collect();
    loop {
        out.push(FixedPoint { n, subset: cur.clone() });
        // Colex successor: bump the first entry that can move without colliding.
        let mut i = 0;
        while i < k {
            let limit = if i + 1 < k { cur[i + 1] } else { n + 1 };
            if cur[i] + 1 < limit {
                break;
            }
            i += 1;
        }
        if i == k {
            break;
        }
        cur[i] += 1;
        for (j, slot) in cur.iter_mut().enumerate().take(i) {
            *slot = j + 1;
        }
    }
    Ok(out)
}

/// Position of `p` in [`fixed_points`] order.
pub fn colex_index(p: &FixedPoint) -> usize {
    // Rank of a combination in colex order is Σ C(c_i - 1, i + 1).
    p.subset.iter().enumerate().map(|(i, &c)| binomial(c - 1, i + 1)).sum()
}

pub fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Tangent weights of `Y(k,N)` at `p`: base `Hom(V, C^N/V)` and cotangent fibre.
pub fn tangent_weights_y(p: &FixedPoint) -> WeightMultiset {
    let n = p.n;
    let comp = p.complement();
    let mut out = Vec::with_capacity(2 * p.k() * comp.len());
    for &i in &p.subset {
        for &j in &comp {
            out.push(weight(n, &[j], &[i], 0));
            out.push(weight(n, &[i], &[j], 1));
        }
    }
    WeightMultiset(out)
}

/// Tangent weights of `W^r(k,N)` at the flag `q`: the two-step flag variety
/// plus the fibre `Hom(C^N/V_2, V_1)`.
pub fn tangent_weights_w(r: usize, q: &FlagPoint) -> Result<WeightMultiset, GeomError> {
    if q.r() != r {
        return Err(GeomError::MalformedChain(format!(
            "expected r = {r}, flag has r = {}",
            q.r()
        )));
    }
    let n = q.inner.n;
    let s1 = &q.inner.subset;
    let mid = q.middle();
    let out_c = q.outer.complement();
    let mut out = Vec::new();
    for &a in s1 {
        for &b in &mid {
            out.push(weight(n, &[b], &[a], 0));
        }
        for &c in &out_c {
            out.push(weight(n, &[c], &[a], 0));
            out.push(weight(n, &[a], &[c], 1));
        }
    }
    for &b in &mid {
        for &c in &out_c {
            out.push(weight(n, &[c], &[b], 0));
        }
    }
    Ok(WeightMultiset(out))
}

/// Normal weights of `W^r(k,N) ⊂ Y(k,N) × Y(k+r,N)` at `q`.
pub fn normal_weights_w(r: usize, q: &FlagPoint) -> Result<WeightMultiset, GeomError> {
    let ambient = tangent_weights_y(&q.inner).union(&tangent_weights_y(&q.outer));
    let tw = tangent_weights_w(r, q)?;
    ambient.difference(&tw).ok_or_else(|| {
        GeomError::InternalInconsistency(format!(
            "tangent space of W at {:?} ⊂ {:?} is not a sub-multiset of the ambient one",
            q.inner.subset, q.outer.subset
        ))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineBundle {
    DetV1,
    DetV2,
    DetQ1,
    DetQ2,
    DetV2ModV1,
}

/// Either kind of fixed point, for [`line_char`].
#[derive(Clone, Copy, Debug)]
pub enum PointRef<'a> {
    Grassmannian(&'a FixedPoint),
    Flag(&'a FlagPoint),
}

/// Torus character of a tautological determinant bundle at a fixed point.
/// At a Grassmannian point `V_1` is the tautological subspace.
pub fn line_char(bundle: LineBundle, point: PointRef<'_>) -> Result<ExponentVector, GeomError> {
    match point {
        PointRef::Grassmannian(p) => match bundle {
            LineBundle::DetV1 => Ok(weight(p.n, &p.subset, &[], 0)),
            LineBundle::DetQ1 => Ok(weight(p.n, &p.complement(), &[], 0)),
            _ => Err(GeomError::UndefinedBundle {
                bundle,
                point: "Grassmannian",
            }),
        },
        PointRef::Flag(q) => {
            let n = q.inner.n;
            Ok(match bundle {
                LineBundle::DetV1 => weight(n, &q.inner.subset, &[], 0),
                LineBundle::DetV2 => weight(n, &q.outer.subset, &[], 0),
                LineBundle::DetQ1 => weight(n, &q.inner.complement(), &[], 0),
                LineBundle::DetQ2 => weight(n, &q.outer.complement(), &[], 0),
                LineBundle::DetV2ModV1 => weight(n, &q.middle(), &[], 0),
            })
        }
    }
}

/// Every flag `S_1 ⊂ S_2` with `|S_1| = k`, `|S_2| = k + r`.
pub fn flag_points(k: usize, r: usize, n: usize) -> Result<Vec<FlagPoint>, GeomError> {
    if k + r > n {
        return Err(GeomError::KOutOfRange { k: k + r, n });
    }
    let inner = fixed_points(k, n)?;
    let outer = fixed_points(k + r, n)?;
    let mut out = Vec::new();
    for a in &inner {
        for b in &outer {
            if a.is_subset_of(b) {
                out.push(FlagPoint {
                    inner: a.clone(),
                    outer: b.clone(),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(n: usize, s: &[usize]) -> FixedPoint {
        FixedPoint::new(n, s.to_vec()).unwrap()
    }

    #[test]
    fn fixed_point_counts() {
        let pts = fixed_points(1, 2).unwrap();
        assert_eq!(pts, vec![fp(2, &[1]), fp(2, &[2])]);
        assert_eq!(fixed_points(2, 4).unwrap().len(), 6);
        assert_eq!(fixed_points(0, 3).unwrap(), vec![fp(3, &[])]);
        assert!(fixed_points(3, 2).is_err());
    }

    #[test]
    fn colex_order_and_rank() {
        let pts = fixed_points(2, 4).unwrap();
        let subsets: Vec<_> = pts.iter().map(|p| p.subset().to_vec()).collect();
        assert_eq!(
            subsets,
            vec![vec![1, 2], vec![1, 3], vec![2, 3], vec![1, 4], vec![2, 4], vec![3, 4]]
        );
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(colex_index(p), i);
        }
    }

    #[test]
    fn tangent_y_at_12() {
        let t = tangent_weights_y(&fp(2, &[1]));
        let expect = WeightMultiset::new(vec![weight(2, &[2], &[1], 0), weight(2, &[1], &[2], 1)]);
        assert_eq!(t, expect);
        assert!(tangent_weights_y(&fp(3, &[])).is_empty());
    }

    #[test]
    fn tangent_w_single_step() {
        let q = FlagPoint::new(fp(2, &[1]), fp(2, &[1, 2])).unwrap();
        let t = tangent_weights_w(1, &q).unwrap();
        // Only Hom(V_1, V_2/V_1) survives; C^N/V_2 = 0 kills the fibre.
        assert_eq!(t, WeightMultiset::new(vec![weight(2, &[2], &[1], 0)]));
        assert_eq!(normal_weights_w(1, &q).unwrap().len(), 1);
    }

    #[test]
    fn diagonal_normal_is_tangent() {
        let p = fp(2, &[1]);
        let q = FlagPoint::new(p.clone(), p.clone()).unwrap();
        assert_eq!(normal_weights_w(0, &q).unwrap(), tangent_weights_y(&p));
        assert_eq!(tangent_weights_w(0, &q).unwrap(), tangent_weights_y(&p));
    }

    #[test]
    fn malformed_chain_rejected() {
        assert!(FlagPoint::new(fp(3, &[3]), fp(3, &[1, 2])).is_err());
        let q = FlagPoint::new(fp(3, &[1]), fp(3, &[1, 2])).unwrap();
        assert!(tangent_weights_w(2, &q).is_err());
    }

    #[test]
    fn line_characters() {
        let p = fp(4, &[1, 3]);
        assert_eq!(
            line_char(LineBundle::DetV1, PointRef::Grassmannian(&p)).unwrap(),
            weight(4, &[1, 3], &[], 0)
        );
        let p = fp(2, &[1]);
        assert_eq!(
            line_char(LineBundle::DetQ1, PointRef::Grassmannian(&p)).unwrap(),
            weight(2, &[2], &[], 0)
        );
        assert!(line_char(LineBundle::DetV2, PointRef::Grassmannian(&p)).is_err());
        let q = FlagPoint::new(fp(4, &[2]), fp(4, &[2, 4])).unwrap();
        let v1 = line_char(LineBundle::DetV1, PointRef::Flag(&q)).unwrap();
        let q1 = line_char(LineBundle::DetQ1, PointRef::Flag(&q)).unwrap();
        assert_eq!(&v1 + &q1, weight(4, &[1, 2, 3, 4], &[], 0));
        assert_eq!(
            line_char(LineBundle::DetV2ModV1, PointRef::Flag(&q)).unwrap(),
            weight(4, &[4], &[], 0)
        );
    }
}
