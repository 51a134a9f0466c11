use flopcalc::exactalg::{ExponentVector, LaurentPoly, PrimeField, RationalFn};
use flopcalc::geom::{self, FixedPoint, FlagPoint};
use flopcalc::kernels::TFactors;
use flopcalc::ktheory::{
    adjoint, convolve, identity_kernel, kernels_equal, structure_sheaf_kernel, AdjointSide, KernelClass, Orientation,
    SubvarietyKind, SubvarietySpec,
};
use flopcalc::picard::{restrict, AmbientDivClass, ComponentDivClass};
use flopcalc::strata;
use num_rational::BigRational;
use proptest::prelude::*;

const NV: usize = 3;

fn poly(nvars: usize) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((prop::collection::vec(-2i32..=2, nvars), -4i64..=4), 0..5).prop_map(move |terms| {
        terms.into_iter().fold(LaurentPoly::zero(nvars), |acc, (e, c)| {
            &acc + &LaurentPoly::exp(&ExponentVector::from_vec(e)).scale(&BigRational::from_integer(c.into()))
        })
    })
}

fn nonzero_poly(nvars: usize) -> impl Strategy<Value = LaurentPoly> {
    poly(nvars).prop_filter("nonzero", |p| !p.is_zero())
}

fn point(nvars: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..(1 << 40), nvars)
}

fn fixed_point(max_n: usize) -> impl Strategy<Value = FixedPoint> {
    (1..=max_n)
        .prop_flat_map(|n| (Just(n), 0..=n))
        .prop_flat_map(|(n, k)| (Just(n), Just(k), 0..geom::binomial(n, k)))
        .prop_map(|(n, k, i)| geom::fixed_points(k, n).unwrap().swap_remove(i))
}

fn flag_point(max_n: usize) -> impl Strategy<Value = (usize, FlagPoint)> {
    (2..=max_n)
        .prop_flat_map(|n| (Just(n), 0..n))
        .prop_flat_map(|(n, k)| (Just(n), Just(k), 0..=n - k))
        .prop_flat_map(|(n, k, r)| {
            let pts = geom::flag_points(k, r, n).unwrap();
            (Just(r), prop::sample::select(pts))
        })
}

/// A kernel with sparse monomial entries.
fn kernel(k_src: usize, k_tgt: usize, n: usize) -> impl Strategy<Value = KernelClass> {
    let len = geom::binomial(n, k_src) * geom::binomial(n, k_tgt);
    let nv = geom::nvars(n);
    prop::collection::vec(
        prop::option::weighted(0.6, (prop::collection::vec(-1i32..=1, nv), 1i64..=3)),
        len,
    )
    .prop_map(move |vals| {
        let cols = geom::binomial(n, k_tgt);
        KernelClass::from_fn(k_src, k_tgt, n, |a, b| {
            Ok(match &vals[geom::colex_index(a) * cols + geom::colex_index(b)] {
                Some((e, c)) => RationalFn::from_poly(
                    LaurentPoly::exp(&ExponentVector::from_vec(e.clone()))
                        .scale(&BigRational::from_integer((*c).into())),
                ),
                None => RationalFn::zero(nv),
            })
        })
        .unwrap()
    })
}

fn exact_eq(p: &KernelClass, q: &KernelClass) -> bool {
    kernels_equal(p, q, 0, 0, &PrimeField::default()).unwrap().equal
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in poly(NV), b in poly(NV), c in poly(NV)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &LaurentPoly::one(NV), a.clone());
    }

    #[test]
    fn bar_is_an_involutive_ring_map(a in poly(NV), b in poly(NV)) {
        prop_assert_eq!(a.bar().bar(), a.clone());
        prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
        prop_assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
    }

    #[test]
    fn evaluation_is_multiplicative(a in poly(NV), b in poly(NV), pt in point(NV)) {
        let f = PrimeField::default();
        let ab = (&a * &b).eval(&f, &pt).unwrap();
        prop_assert_eq!(ab, f.mul(a.eval(&f, &pt).unwrap(), b.eval(&f, &pt).unwrap()));
        let inv: Vec<u64> = pt.iter().map(|&x| f.inv(x).unwrap()).collect();
        prop_assert_eq!(a.bar().eval(&f, &pt).unwrap(), a.eval(&f, &inv).unwrap());
    }

    #[test]
    fn fraction_sums_are_order_independent(
        ps in prop::collection::vec((poly(NV), nonzero_poly(NV)), 1..5),
        rot in 0usize..5,
    ) {
        let fs: Vec<RationalFn> = ps.into_iter().map(|(n, d)| RationalFn::new(n, d).unwrap()).collect();
        let sum = |v: &[RationalFn]| v.iter().fold(RationalFn::zero(NV), |acc, x| &acc + x);
        let mut rotated = fs.clone();
        rotated.rotate_left(rot % fs.len());
        let mut reversed = fs.clone();
        reversed.reverse();
        prop_assert!(sum(&fs).equals(&sum(&rotated)));
        prop_assert!(sum(&fs).equals(&sum(&reversed)));
    }

    #[test]
    fn division_inverts_multiplication(a in poly(NV), d in nonzero_poly(NV)) {
        let q = RationalFn::new(a.clone(), d.clone()).unwrap();
        prop_assert!(q.mul_poly(&d).unwrap().equals(&RationalFn::from_poly(a)));
    }

    #[test]
    fn tangent_weights_pair_symplectically(p in fixed_point(8)) {
        let n = p.n();
        let h = geom::h_weight(n);
        let tw = geom::tangent_weights_y(&p);
        let dual = geom::WeightMultiset::new(tw.iter().map(|w| &h - w).collect());
        prop_assert_eq!(&tw, &dual);
        let dim = p.k() * (n - p.k());
        prop_assert_eq!(tw.len(), 2 * dim);
        prop_assert_eq!(tw.total(geom::nvars(n)), h.scale(dim as i32));
    }

    #[test]
    fn correspondence_weights_split_the_ambient_tangent_space((r, q) in flag_point(7)) {
        let n = q.inner().n();
        let k = q.inner().k();
        let tw = geom::tangent_weights_w(r, &q).unwrap();
        let nw = geom::normal_weights_w(r, &q).unwrap();
        prop_assert!(nw.iter().all(|w| !w.is_zero()));
        prop_assert!(tw.iter().all(|w| !w.is_zero()));
        let ambient = geom::tangent_weights_y(q.inner()).union(&geom::tangent_weights_y(q.outer()));
        prop_assert_eq!(tw.len() + nw.len(), ambient.len());
        prop_assert_eq!(tw.union(&nw), ambient);
        prop_assert_eq!(tw.len(), strata::dim_w(k, r, n).unwrap());
    }

    #[test]
    fn restriction_is_additive(
        k in 1usize..5,
        x in prop::collection::vec(-5i64..=5, 7),
        y in prop::collection::vec(-5i64..=5, 7),
    ) {
        let cls = |v: &[i64]| AmbientDivClass { zcoef: v[..=k].to_vec(), a: v[5], b: v[6] };
        let (cx, cy) = (cls(&x), cls(&y));
        for s in 0..=k {
            let lhs = restrict(&(&cx + &cy), s).unwrap();
            let rhs = &restrict(&cx, s).unwrap() + &restrict(&cy, s).unwrap();
            prop_assert!(lhs.equivalent(&rhs));
        }
    }

    #[test]
    fn ambient_relations_restrict_to_zero(k in 1usize..8, c1 in -4i64..=4, c2 in -4i64..=4) {
        let rel = &AmbientDivClass::r1(k).scale(c1) + &AmbientDivClass::r2(k).scale(c2);
        for s in 0..=k {
            prop_assert!(restrict(&rel, s).unwrap().equivalent(&ComponentDivClass::zero(k, s)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn convolution_unit_and_associativity(
        (n, a, b, _c, p, q, r) in (1usize..=3)
            .prop_flat_map(|n| (Just(n), 0..=n, 0..=n, 0..=n))
            .prop_flat_map(|(n, a, b, c)| (Just(n), Just(a), Just(b), Just(c), kernel(a, b, n), kernel(b, c, n), kernel(c, a, n)))
    ) {
        prop_assert!(exact_eq(&convolve(&identity_kernel(a, n).unwrap(), &p).unwrap(), &p));
        prop_assert!(exact_eq(&convolve(&p, &identity_kernel(b, n).unwrap()).unwrap(), &p));
        let left = convolve(&convolve(&p, &q).unwrap(), &r).unwrap();
        let right = convolve(&p, &convolve(&q, &r).unwrap()).unwrap();
        prop_assert!(exact_eq(&left, &right));
    }

    #[test]
    fn adjoint_reverses_composition(
        (p, q) in (1usize..=3)
            .prop_flat_map(|n| (Just(n), 0..=n, 0..=n, 0..=n))
            .prop_flat_map(|(n, a, b, c)| (kernel(a, b, n), kernel(b, c, n)))
    ) {
        for side in [AdjointSide::Left, AdjointSide::Right] {
            let lhs = adjoint(&convolve(&p, &q).unwrap(), side);
            let rhs = convolve(&adjoint(&q, side), &adjoint(&p, side)).unwrap();
            prop_assert!(exact_eq(&lhs, &rhs));
        }
        prop_assert!(exact_eq(&adjoint(&adjoint(&p, AdjointSide::Left), AdjointSide::Right), &p));
        prop_assert!(exact_eq(&adjoint(&adjoint(&p, AdjointSide::Right), AdjointSide::Left), &p));
    }

    #[test]
    fn correspondences_are_supported_on_inclusions(
        (n, k, r) in (2usize..=5).prop_flat_map(|n| (Just(n), 0..=n)).prop_flat_map(|(n, k)| (Just(n), Just(k), 0..=n - k))
    ) {
        let spec = SubvarietySpec { kind: SubvarietyKind::WCorrespondence(r), orientation: Orientation::AsIs };
        let w = structure_sheaf_kernel(spec, k, n).unwrap();
        for (a, b, v) in w.entries() {
            prop_assert_eq!(v.is_zero(), !a.is_subset_of(b));
        }
        let back = structure_sheaf_kernel(SubvarietySpec { orientation: Orientation::Transposed, ..spec }, k, n).unwrap();
        prop_assert!(exact_eq(&back, &w.transpose()));
    }

    #[test]
    fn theta_terms_respect_the_filtration(
        (n, k) in (2usize..=5).prop_flat_map(|n| (Just(n), 1..=n / 2)),
        pt in point(6),
    ) {
        let f = PrimeField::default();
        let pt = &pt[..geom::nvars(n)];
        let mut terms = TFactors::new(k, n).unwrap().evaluate_terms(&f, pt).unwrap();
        terms.sort_by_key(|(s, _)| *s);
        let src = geom::fixed_points(k, n).unwrap();
        let tgt = geom::fixed_points(n - k, n).unwrap();
        let mut partial = vec![0u64; src.len() * tgt.len()];
        for (s, th) in &terms {
            for (acc, &v) in partial.iter_mut().zip(&th.values) {
                *acc = f.add(*acc, v);
            }
            for (i, a) in src.iter().enumerate() {
                for (j, b) in tgt.iter().enumerate() {
                    let idx = i * tgt.len() + j;
                    if a.intersection_size(b) < k - s {
                        prop_assert_eq!(th.values[idx], 0);
                        prop_assert_eq!(partial[idx], 0);
                    }
                }
            }
        }
    }
}
