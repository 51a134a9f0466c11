use flopcalc::exactalg::{PrimeField, RationalFn};
use flopcalc::geom::{self, line_char, LineBundle, PointRef};
use flopcalc::kernels::{e_class, f_class, t_adjoint_class, t_class, theta_complex, verify_equivalence, CheckMode};
use flopcalc::ktheory::{
    adjoint, convolve, identity_kernel, kernels_equal, structure_sheaf_kernel, twist, AdjointSide, KernelClass,
    Orientation, SubvarietyKind, SubvarietySpec,
};

fn exact_eq(p: &KernelClass, q: &KernelClass) -> bool {
    kernels_equal(p, q, 0, 0, &PrimeField::default()).unwrap().equal
}

#[test]
fn exact_equivalence_13() {
    let r = verify_equivalence(1, 3, AdjointSide::Left, CheckMode::Exact, 0, 0, &PrimeField::default()).unwrap();
    assert!(r.passed);
    assert!(r.source_composite.per_entry_failure_log10.is_none());
}

#[test]
fn probabilistic_equivalence_13_and_24() {
    let f = PrimeField::default();
    for (k, n) in [(1, 2), (1, 3), (2, 4)] {
        let r = verify_equivalence(k, n, AdjointSide::Left, CheckMode::Probabilistic, 20, 11, &f).unwrap();
        assert!(r.passed, "({k},{n})");
        for c in [&r.source_composite, &r.target_composite] {
            assert!(c.aggregate_failure_log10.unwrap() < -15.0);
            assert_eq!(c.trials, 20);
        }
    }
}

#[test]
fn both_adjoint_conventions_agree_on_t() {
    for (k, n) in [(1, 2), (1, 3)] {
        let l = t_adjoint_class(k, n, AdjointSide::Left).unwrap();
        let r = t_adjoint_class(k, n, AdjointSide::Right).unwrap();
        assert!(exact_eq(&l, &r));
        let f = PrimeField::default();
        let rr = verify_equivalence(k, n, AdjointSide::Right, CheckMode::Exact, 0, 0, &f).unwrap();
        assert!(rr.passed);
    }
}

#[test]
fn a_twisted_kernel_is_not_an_equivalence() {
    let t = t_class(1, 2).unwrap();
    let n = 2;
    let bent = twist(&t, |a, _| {
        line_char(LineBundle::DetV1, PointRef::Grassmannian(a))
            .unwrap()
            .scale(2)
    });
    let id = identity_kernel(1, n).unwrap();
    let composite = convolve(&bent, &adjoint(&t, AdjointSide::Left)).unwrap();
    let cmp = kernels_equal(&composite, &id, 0, 0, &PrimeField::default()).unwrap();
    assert!(!cmp.equal);
    assert!(cmp.witness.is_some());
}

#[test]
fn identity_versus_det_twist_has_diagonal_witness() {
    let id = identity_kernel(1, 2).unwrap();
    let tw = twist(&id, |a, _| {
        line_char(LineBundle::DetV1, PointRef::Grassmannian(a)).unwrap()
    });
    let cmp = kernels_equal(&id, &tw, 20, 3, &PrimeField::default()).unwrap();
    assert!(!cmp.equal);
    let w = cmp.witness.unwrap();
    assert_eq!(w.src, w.tgt);
    assert!(w.point.is_some());
    assert!(kernels_equal(&id, &id, 20, 3, &PrimeField::default()).unwrap().equal);
}

#[test]
fn twist_round_trip() {
    let t = t_class(1, 3).unwrap();
    let v = |a: &geom::FixedPoint| line_char(LineBundle::DetV1, PointRef::Grassmannian(a)).unwrap();
    let back = twist(&twist(&t, |a, _| v(a)), |a, _| -v(a));
    assert!(exact_eq(&back, &t));
    assert!(exact_eq(&twist(&t, |_, _| geom::h_weight(3).scale(0)), &t));
}

#[test]
fn identity_is_a_self_adjoint_unit() {
    for (k, n) in [(1, 2), (1, 3), (0, 2)] {
        let id = identity_kernel(k, n).unwrap();
        assert!(exact_eq(&convolve(&id, &id).unwrap(), &id));
        assert!(exact_eq(&adjoint(&id, AdjointSide::Left), &id));
        assert_eq!(id.shape(), (geom::binomial(n, k), geom::binomial(n, k)));
    }
}

#[test]
fn w1_12_has_one_normal_factor() {
    let spec = SubvarietySpec {
        kind: SubvarietyKind::WCorrespondence(1),
        orientation: Orientation::AsIs,
    };
    let w = structure_sheaf_kernel(spec, 1, 2).unwrap();
    assert_eq!(w.shape(), (2, 1));
    for (_, _, v) in w.entries() {
        // 1 - e^{-w} for a single weight: two terms, polynomial.
        assert!(v.is_polynomial());
        assert_eq!(v.numerator().num_terms(), 2);
    }
}

#[test]
fn e_class_support_and_shapes() {
    for (s, k, n) in [(1, 2, 4), (2, 2, 5), (1, 1, 3)] {
        let e = e_class(s, k, n).unwrap();
        assert_eq!(e.shape(), (geom::binomial(n, k), geom::binomial(n, k - s)));
        for (a, b, v) in e.entries() {
            assert_eq!(
                !v.is_zero(),
                b.is_subset_of(a),
                "E^({s}) at {:?}, {:?}",
                a.subset(),
                b.subset()
            );
        }
    }
    assert!(exact_eq(&e_class(0, 2, 4).unwrap(), &identity_kernel(2, 4).unwrap()));
    assert_eq!(e_class(2, 2, 5).unwrap().shape(), (10, 1));
    assert!(f_class(3, 2, 6).is_err());
}

#[test]
fn theta_complex_runs_from_k_down_to_zero() {
    let c = theta_complex(1, 3).unwrap();
    let order: Vec<usize> = c.terms.iter().map(|(s, _)| *s).collect();
    assert_eq!(order, vec![1, 0]);
    for (_, th) in &c.terms {
        assert_eq!(th.shape(), (3, 3));
    }
    assert!(exact_eq(&c.total().unwrap(), &t_class(1, 3).unwrap()));
}

#[test]
fn t_12_matches_hand_expansion() {
    let t = t_class(1, 2).unwrap();
    let pts = geom::fixed_points(1, 2).unwrap();
    // Off-diagonal entry: (1 - x2 x1^{-1} q^{-1})(1 - x1 x2^{-1} q^{-1}).
    let expect: RationalFn = serde_json::from_str(
        r#"{"num":[{"exp":[0,0,0],"coef":"1"},{"exp":[1,-1,-1],"coef":"-1"},{"exp":[-1,1,-1],"coef":"-1"},{"exp":[0,0,-2],"coef":"1"}],"den":[{"exp":[0,0,0],"coef":"1"}]}"#,
    )
    .unwrap();
    assert!(t.entry(&pts[0], &pts[1]).equals(&expect));
    assert!(t.entry(&pts[1], &pts[0]).equals(&expect));
}

#[test]
fn kernel_json_round_trip() {
    let t = t_class(1, 3).unwrap();
    let json = serde_json::to_string(&t).unwrap();
    let back: KernelClass = serde_json::from_str(&json).unwrap();
    assert!(exact_eq(&back, &t));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["shape"], serde_json::json!([3, 3]));
    let bad = json.replacen("\"shape\":[3,3]", "\"shape\":[2,3]", 1);
    assert!(serde_json::from_str::<KernelClass>(&bad).is_err());
}

#[test]
fn rejects_bad_flops() {
    let f = PrimeField::default();
    assert!(verify_equivalence(0, 3, AdjointSide::Left, CheckMode::Exact, 0, 0, &f).is_err());
    assert!(verify_equivalence(2, 3, AdjointSide::Left, CheckMode::Exact, 0, 0, &f).is_err());
    assert!(verify_equivalence(1, 2, AdjointSide::Left, CheckMode::Probabilistic, 0, 0, &f).is_err());
}
