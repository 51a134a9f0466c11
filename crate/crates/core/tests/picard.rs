use flopcalc::picard::{
    admissible_pairs, restrict, sweep, twist_difference, verify_identity, AmbientDivClass, ComponentDivClass,
    IdentityName,
};

fn comp(k: usize, s: usize, dminus: i64, dplus: i64, a: i64, b: i64) -> ComponentDivClass {
    ComponentDivClass::new(k, s, dminus, dplus, a, b).unwrap()
}

#[test]
fn every_identity_holds_up_to_twelve() {
    assert_eq!(admissible_pairs(12).len(), 36);
    for name in IdentityName::ALL {
        let reports = sweep(name, 12).unwrap();
        assert_eq!(reports.len(), 36);
        for r in reports {
            assert!(r.all_ok, "{name} at k={} N={}", r.k, r.n);
            assert_eq!(r.results.len(), r.k + 1);
        }
    }
}

#[test]
fn main_ledger_k2() {
    for n in 4..=9 {
        let rep = verify_identity(IdentityName::MainLedger, 2, n).unwrap();
        assert!(rep.all_ok);
        for r in &rep.results {
            let s = r.s as i64;
            assert!(r.lhs.equivalent(&comp(2, r.s, 0, 1, -s, s)));
        }
    }
}

#[test]
fn statement_form_at_k2_s1() {
    let c = AmbientDivClass {
        zcoef: vec![0, 1, 3],
        a: 0,
        b: 0,
    };
    let r = restrict(&c, 1).unwrap();
    assert!(r.equivalent(&comp(2, 1, -1, 2, 0, 0)));
    assert!(r.equivalent(&comp(2, 1, 0, 1, -1, 1)));
}

#[test]
fn fibre_and_l_relation() {
    for k in 1..=4 {
        let fibre = AmbientDivClass::components(k, |_| 1);
        let l = AmbientDivClass::components(k, |s| s);
        for s in 0..=k {
            assert!(restrict(&fibre, s).unwrap().equivalent(&ComponentDivClass::zero(k, s)));
            assert!(restrict(&l, s).unwrap().equivalent(&comp(k, s, 0, 0, -1, 1)));
        }
    }
}

#[test]
fn dualizing_k1_n2() {
    let rep = verify_identity(IdentityName::Dualizing, 1, 2).unwrap();
    assert!(rep.all_ok);
    let rep = verify_identity(IdentityName::Dualizing, 2, 6).unwrap();
    assert!(rep.all_ok);
    assert_eq!(rep.boundary_convention, "D_{0,-1} = D_{k,k+1} = 0");
}

#[test]
fn twist_difference_is_global_with_opposite_signs() {
    for (k, n) in admissible_pairs(10) {
        let d = twist_difference(k, n).unwrap();
        assert!(d.is_global);
        assert!(d.matches_a_minus_b, "k={k} N={n}: {}", d.difference);
        assert_eq!(d.matches_a_plus_b, d.exponent == 0);
    }
}

#[test]
fn names_and_preconditions() {
    for name in IdentityName::ALL {
        assert_eq!(name.as_str().parse::<IdentityName>().unwrap(), name);
    }
    assert!("bogus".parse::<IdentityName>().is_err());
    assert!(verify_identity(IdentityName::KernelLedger, 3, 5).is_err());
    assert!(verify_identity(IdentityName::KernelLedger, 0, 5).is_err());
    assert!(ComponentDivClass::new(2, 3, 0, 0, 0, 0).is_err());
}

#[test]
fn report_serializes() {
    let rep = verify_identity(IdentityName::ComponentCanonical, 2, 5).unwrap();
    let v = serde_json::to_value(&rep).unwrap();
    assert_eq!(v["identity"], "component_canonical");
    assert_eq!(v["N"], 5);
    assert_eq!(v["results"].as_array().unwrap().len(), 3);
}
