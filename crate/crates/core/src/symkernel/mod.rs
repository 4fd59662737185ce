//! Exact scalar layer: rationals, polynomial rings presented by oriented
//! rewrite rules, localization at declared denominators, derivations.

mod derivation;
mod expr;
pub mod linsolve;
mod parse;
mod ring;

pub use derivation::{extend_to_localizations, leibniz, Derivation, ExprModule};
pub use expr::{expr_cmp, normalize, Expr};
pub use parse::{is_identifier, parse_rational};
pub use ring::{Denominator, Monomial, Ring, RingBuilder, Rule, Strategy, DEFAULT_STEP_BOUND};

pub(crate) use derivation::leibniz_terms;

pub type Rational = num::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use std::sync::Arc;

    fn su2() -> Arc<Ring> {
        Ring::builder()
            .generators(["a", "b", "c", "d"])
            .relation("a*d", "1 + b*c")
            .build()
            .unwrap()
    }

    fn sphere() -> Arc<Ring> {
        Ring::builder()
            .generators(["z", "zs", "x"])
            .relation("zs*z", "x - x^2")
            .denominator(None, "2*x - 1")
            .build()
            .unwrap()
    }

    fn circle() -> Arc<Ring> {
        Ring::builder().generator("t").laurent("t").build().unwrap()
    }

    fn e(r: &Arc<Ring>, s: &str) -> Expr {
        Expr::parse(r, s).unwrap()
    }

    #[test]
    fn determinant_relation_normalizes_to_zero() {
        let r = su2();
        assert!(e(&r, "a*d - b*c - 1").is_zero());
        assert_eq!(e(&r, "a") * e(&r, "d"), e(&r, "1 + b*c"));
    }

    #[test]
    fn sphere_relation_normalizes_to_zero() {
        let r = sphere();
        assert!(e(&r, "zs*z - x + x^2").is_zero());
        assert!(Expr::zero(&r).is_zero());
    }

    #[test]
    fn localization_inverts_declared_denominator() {
        let r = sphere();
        let den = e(&r, "2*x - 1");
        let inv = den.try_inverse().unwrap();
        assert_eq!(&den * &inv, Expr::one(&r));
        assert_eq!(e(&r, "(2*x - 1)/(4*x - 2)"), e(&r, "1/2"));
        assert_eq!(e(&r, "(2*x - 1)^-2 * (2*x - 1)^2"), Expr::one(&r));
        assert!(matches!(
            Expr::parse(&r, "1/x"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn laurent_unit() {
        let r = circle();
        assert_eq!(e(&r, "t") * e(&r, "t^-1"), Expr::one(&r));
        assert_eq!(e(&r, "1/t"), e(&r, "t^-1"));
    }

    #[test]
    fn additive_inverse_and_scaling() {
        let r = su2();
        let a = e(&r, "a");
        assert!((&a + &(-&a)).is_zero());
        assert_eq!(a.scale(&rat(-1, 2)), e(&r, "-1/2*a"));
    }

    #[test]
    fn display_round_trips() {
        let r = sphere();
        for s in ["-1/2*z*zs + x^2 - 3", "u0*x", "(2*x - 1)^-1*z + zs^3", "0"] {
            let v = e(&r, s);
            assert_eq!(e(&r, &v.to_string()), v, "{s} -> {v}");
        }
        assert_eq!(e(&r, "x^2 - 1/2*z").to_string(), "x^2 - 1/2*z");
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = e(&su2(), "a");
        let t = e(&circle(), "t");
        assert_eq!(a.checked_add(&t), Err(Error::RingMismatch));
        assert_eq!(a.checked_mul(&t), Err(Error::RingMismatch));
    }

    #[test]
    fn structurally_equal_rings_interoperate() {
        let a = e(&su2(), "a");
        let d = e(&su2(), "d");
        assert_eq!(a.checked_mul(&d).unwrap().to_string(), "b*c + 1");
    }

    #[test]
    fn tilde_h_derivation() {
        let r = su2();
        let h = Derivation::new(&r, vec![e(&r, "a"), e(&r, "-b"), e(&r, "c"), e(&r, "-d")]).unwrap();
        assert_eq!(h.apply(&e(&r, "a")), e(&r, "a"));
        assert!(h.apply(&e(&r, "a*b")).is_zero());
        assert!(h.apply(&Expr::one(&r)).is_zero());
    }

    #[test]
    fn derivation_violating_relation_is_rejected() {
        let r = su2();
        let bad = Derivation::new(&r, vec![e(&r, "a"), e(&r, "0"), e(&r, "0"), e(&r, "0")]);
        assert!(matches!(bad, Err(Error::Invariant { .. })));
    }

    #[test]
    fn derivation_on_localization_generator() {
        let r = sphere();
        // d/dx on the base: z, zs fixed would break the relation, so use the
        // derivation x -> 0, z -> z, zs -> -zs.
        let d = Derivation::new(&r, vec![e(&r, "z"), e(&r, "-zs"), e(&r, "0")]).unwrap();
        assert!(d.apply(&e(&r, "(2*x - 1)^-1")).is_zero());
        let dx = Derivation::new(&r, vec![e(&r, "0"), e(&r, "0"), e(&r, "0")]).unwrap();
        assert!(dx.is_zero());
    }

    #[test]
    fn step_bound_names_the_rule_chain() {
        let r = Ring::builder()
            .generators(["p", "q", "s"])
            .relation("p*q", "s")
            .relation("s", "p*q")
            .allow_unordered_rules()
            .step_bound(50)
            .build()
            .unwrap();
        let m = Monomial::from_exponents(vec![1, 1, 0]);
        let err = normalize(&r, [(m, int(1))], Strategy::Leading).unwrap_err();
        match err {
            Error::StepBound { bound, chain } => {
                assert_eq!(bound, 50);
                assert!(chain.contains("p*q -> s") && chain.contains("s -> p*q"), "{chain}");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unordered_rule_rejected_by_default() {
        let r = Ring::builder()
            .generators(["p", "q"])
            .relation("p", "q^2")
            .build();
        assert!(matches!(r, Err(Error::InvalidRing(_))));
    }

    #[test]
    fn duplicate_leading_monomials_rejected() {
        let r = Ring::builder()
            .generators(["p", "q"])
            .relation("p*q", "1")
            .relation("p*q", "2")
            .build();
        assert!(matches!(r, Err(Error::InvalidRing(_))));
    }

    #[test]
    fn point_evaluation_and_localization_value() {
        let r = Ring::builder()
            .generators(["x"])
            .denominator(Some("w".into()), "2*x - 1")
            .point("x", int(3))
            .build()
            .unwrap();
        assert_eq!(e(&r, "w").eval_at_point().unwrap(), rat(1, 5));
        assert_eq!(e(&r, "x^2 + w").eval_at_point().unwrap(), rat(46, 5));
    }

    #[test]
    fn substitution_is_a_ring_map() {
        let up = su2();
        let free = Ring::builder().generators(["z", "zs", "x"]).build().unwrap();
        let images = vec![e(&up, "c*d"), e(&up, "-a*b"), e(&up, "-b*c")];
        let lhs = e(&free, "zs*z").substitute(&up, &images).unwrap();
        let rhs = e(&free, "x - x^2").substitute(&up, &images).unwrap();
        assert_eq!(lhs, rhs);
        let t = circle();
        let inv = e(&t, "t^-2").substitute(&t, &[e(&t, "2*t")]).unwrap();
        assert_eq!(inv, e(&t, "1/4*t^-2"));
    }
}
