//! Algebraic invariants as properties over generated polynomials and forms.

use std::sync::{Arc, LazyLock};

use plgb_core::bundle::InducedBase;
use plgb_core::calculus::OneForm;
use plgb_core::poisson::Manifold;
use plgb_core::symkernel::{normalize, rat, Expr, Monomial, Rational, Ring, Strategy as Rewrite};
use plgb_core::{datasets, run_checks, CheckOptions, Geometry, Selection};
use proptest::prelude::*;

static SU2: LazyLock<Geometry> = LazyLock::new(|| datasets::su2_selfaction().unwrap());
static S1: LazyLock<Geometry> = LazyLock::new(|| datasets::s1_group().unwrap());
static S2: LazyLock<InducedBase> = LazyLock::new(|| datasets::su2_hopf().unwrap().induce_base().unwrap());

fn su2() -> &'static Manifold {
    SU2.manifold()
}

fn s2() -> &'static Manifold {
    S2.manifold()
}

fn manifolds() -> [&'static Manifold; 3] {
    [su2(), S1.manifold(), s2()]
}

fn coefficient() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=3).prop_filter("nonzero", |(n, _)| *n != 0).prop_map(|(n, d)| rat(n, d))
}

/// Unnormalized terms over the declared generators, total degree at most 4.
fn raw_terms(ring: &Arc<Ring>) -> impl Strategy<Value = Vec<(Monomial, Rational)>> {
    let nd = ring.declared();
    let len = ring.len();
    let laurent: Vec<bool> = (0..nd).map(|g| ring.is_laurent(g)).collect();
    let exps = proptest::collection::vec((0..nd, any::<bool>()), 0..=4).prop_map(move |steps| {
        let mut e = vec![0i32; len];
        for (g, neg) in steps {
            e[g] += if laurent[g] && neg { -1 } else { 1 };
        }
        Monomial::from_exponents(e)
    });
    proptest::collection::vec((exps, coefficient()), 1..=4)
}

fn function(m: &'static Manifold) -> impl Strategy<Value = Expr> {
    raw_terms(m.ring()).prop_map(move |t| normalize(m.ring(), t, Rewrite::Leading).unwrap())
}

fn one_form(m: &'static Manifold) -> impl Strategy<Value = OneForm> {
    let dim = m.frame().dim();
    proptest::collection::vec(function(m), dim).prop_map(OneForm::from_coords)
}

fn pick() -> impl Strategy<Value = &'static Manifold> {
    (0usize..3).prop_map(|i| manifolds()[i])
}

fn function_on_any() -> impl Strategy<Value = (&'static Manifold, Vec<(Monomial, Rational)>)> {
    pick().prop_flat_map(|m| (Just(m), raw_terms(m.ring())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_is_independent_of_rewrite_order((m, raw) in function_on_any(), seed in any::<u64>()) {
        let lead = normalize(m.ring(), raw.clone(), Rewrite::Leading).unwrap();
        let trail = normalize(m.ring(), raw.clone(), Rewrite::Trailing).unwrap();
        let shuffled = normalize(m.ring(), raw, Rewrite::Shuffled(seed)).unwrap();
        prop_assert_eq!(&lead, &trail);
        prop_assert_eq!(&lead, &shuffled);
    }

    #[test]
    fn display_parses_back((m, raw) in function_on_any()) {
        let p = normalize(m.ring(), raw, Rewrite::Leading).unwrap();
        prop_assert_eq!(Expr::parse(m.ring(), &p.to_string()).unwrap(), p);
    }

    #[test]
    fn bracket_is_an_antisymmetric_biderivation(
        p in function(su2()), q in function(su2()), r in function(su2()),
        s in coefficient(), t in coefficient(),
    ) {
        let m = su2();
        let leibniz = &(&m.bracket(&p, &(&q * &r)) - &(&m.bracket(&p, &q) * &r)) - &(&q * &m.bracket(&p, &r));
        prop_assert!(leibniz.is_zero(), "{}", leibniz);
        let combo = &p.scale(&s) + &q.scale(&t);
        let bilinear = &(&m.bracket(&combo, &r) - &m.bracket(&p, &r).scale(&s))
            - &m.bracket(&q, &r).scale(&t);
        prop_assert!(bilinear.is_zero(), "{}", bilinear);
        prop_assert!((&m.bracket(&p, &q) + &m.bracket(&q, &p)).is_zero());
    }

    #[test]
    fn bracket_satisfies_jacobi_on_the_sphere(p in function(s2()), q in function(s2()), r in function(s2())) {
        let m = s2();
        let j = &(&m.bracket(&p, &m.bracket(&q, &r)) + &m.bracket(&q, &m.bracket(&r, &p)))
            + &m.bracket(&r, &m.bracket(&p, &q));
        prop_assert!(j.is_zero(), "{}", j);
    }

    #[test]
    fn schouten_of_exact_forms_is_exact_on_su2(p in function(su2()), q in function(su2())) {
        let m = su2();
        let defect = &m.schouten(&m.d(&p), &m.d(&q)) - &m.d(&m.bracket(&p, &q));
        prop_assert!(defect.is_zero());
    }

    #[test]
    fn schouten_of_exact_forms_is_exact_on_the_sphere(p in function(s2()), q in function(s2())) {
        let m = s2();
        let defect = &m.schouten(&m.d(&p), &m.d(&q)) - &m.d(&m.bracket(&p, &q));
        prop_assert!(defect.is_zero());
    }

    #[test]
    fn d_is_a_derivation(p in function(su2()), q in function(su2())) {
        let m = su2();
        let defect = &(&m.d(&(&p * &q)) - &m.d(&p).scale(&q)) - &m.d(&q).scale(&p);
        prop_assert!(defect.is_zero());
    }

    #[test]
    fn connection_is_function_linear_in_its_first_slot(
        eta in one_form(su2()), tau in one_form(su2()), f in function(su2()),
    ) {
        let m = su2();
        let defect = &m.nabla(&eta.scale(&f), &tau).unwrap() - &m.nabla(&eta, &tau).unwrap().scale(&f);
        prop_assert!(defect.is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn curvature_is_tensorial(
        forms in proptest::collection::vec(one_form(su2()), 3),
        f in function(su2()),
        slot in 0usize..3,
    ) {
        let m = su2();
        let mut scaled = forms.clone();
        scaled[slot] = scaled[slot].scale(&f);
        let lhs = m.curvature(&scaled[0], &scaled[1], &scaled[2]).unwrap();
        let rhs = m.curvature(&forms[0], &forms[1], &forms[2]).unwrap().scale(&f);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reports_are_deterministic_per_seed(seed in any::<u64>()) {
        let opts = CheckOptions {
            selection: Selection::parse("jacobi,compat,plg,covariance").unwrap(),
            degree_bound: 3,
            seed,
            timings: false,
        };
        let a = run_checks(&SU2, &opts).unwrap();
        let b = run_checks(&SU2, &opts).unwrap();
        prop_assert!(a.passed());
        prop_assert_eq!(a.to_json(), b.to_json());
    }
}
