//! Pins the conventions whose alternatives look plausible but fail.

use plgb_core::calculus::OneForm;
use plgb_core::symkernel::Expr;
use plgb_core::{datasets, Geometry};

fn hopf() -> Geometry {
    datasets::su2_hopf().unwrap()
}

fn differentials(g: &Geometry) -> Vec<OneForm> {
    let f = g.manifold().frame();
    (0..g.manifold().ring().declared()).map(|i| f.generator_differential(i).clone()).collect()
}

/// `{z, z̄} = x − 2x²` from the generator brackets; the product `2z̄zx`
/// differs from it already in degree one.
#[test]
fn sphere_bracket_of_z_and_zs() {
    let base = hopf().induce_base().unwrap();
    let m = base.manifold();
    let e = |s: &str| Expr::parse(base.ring(), s).unwrap();
    let got = m.bracket(&e("z"), &e("zs"));
    assert_eq!(got, e("x - 2*x^2"));
    assert_ne!(got, e("2*zs*z*x"));
    let up = hopf();
    let lifted = up.manifold().bracket(&up.expr("c*d").unwrap(), &up.expr("-a*b").unwrap());
    assert_eq!(base.lift(&got).unwrap(), lifted);
}

/// The pairing term enters as `−π(τ, d i_ξ̃η)`; writing it `−π(d i_ξ̃η, τ)`
/// fails on differentials of generators.
#[test]
fn bracket_contraction_pairing_order() {
    let g = hopf();
    let b = g.bundle().unwrap();
    let m = g.manifold();
    let v = &b.action().fields()[0];
    let forms = differentials(&g);
    let mut failing = Vec::new();
    for (i, eta) in forms.iter().enumerate() {
        for (j, tau) in forms.iter().enumerate() {
            assert!(b.cor52_check(0, eta, tau).is_zero(), "({i},{j})");
            let d_ieta = m.d(&v.interior(eta));
            let other = &(&b.cor52_check(0, eta, tau) - &m.pi(tau, &d_ieta)) + &m.pi(&d_ieta, tau);
            if !other.is_zero() {
                failing.push((i, j));
            }
        }
    }
    assert!(!failing.is_empty());
}
