//! Spin connections on a Poisson principal bundle: the covariant derivative
//! on the total space, its semiclassical corrections `Γ` and `ς`, and the
//! Leibniz-gap identity they satisfy.

use std::collections::BTreeMap;

use crate::bundle::Bundle;
use crate::calculus::OneForm;
use crate::error::{Error, Result};
use crate::symkernel::{Expr, Rational};

/// `ωⁱ` and `αⁱ` per fibre basis element.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinConnection {
    omega: Vec<OneForm>,
    alpha: Vec<OneForm>,
}

/// Non-zero defects found by [`SpinConnection::validate`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpinDefects {
    /// `(label, defect)` pairs; empty when ω and α are valid.
    pub entries: Vec<(String, String)>,
}

impl SpinDefects {
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

impl SpinConnection {
    pub fn new(omega: Vec<OneForm>, alpha: Vec<OneForm>) -> Result<Self> {
        if omega.len() != alpha.len() {
            return Err(Error::Spec("omega and alpha need one entry per fibre basis element".into()));
        }
        Ok(SpinConnection { omega, alpha })
    }

    pub fn omega(&self) -> &[OneForm] {
        &self.omega
    }

    pub fn alpha(&self) -> &[OneForm] {
        &self.alpha
    }

    fn check_dim(&self, b: &Bundle<'_>) -> Result<()> {
        if self.omega.len() != b.fibre().dim() {
            return Err(Error::Spec("spin connection dimension differs from the fibre".into()));
        }
        Ok(())
    }

    /// Verticality `i_{ξ̃_a}(ωⁱ) = δ_aⁱ`, equivariance
    /// `ξ_a▷ωⁱ + Σ_j ωʲ c[a][j][i] = 0` of ω and α, horizontality of α.
    pub fn validate(&self, b: &Bundle<'_>) -> Result<SpinDefects> {
        self.check_dim(b)?;
        let m = b.total();
        let frame = m.frame();
        let fibre = b.fibre();
        let names = fibre.names();
        let fields = b.action().fields();
        let ring = m.ring();
        let n = fibre.dim();
        let mut out = SpinDefects::default();
        for a in 0..n {
            for i in 0..n {
                let mut v = fields[a].interior(&self.omega[i]);
                if a == i {
                    v = &v - &Expr::one(ring);
                }
                if !v.is_zero() {
                    out.entries.push((format!("verticality i_{}(omega^{})", names[a], names[i]), v.to_string()));
                }
            }
        }
        for (label, forms) in [("omega", &self.omega), ("alpha", &self.alpha)] {
            for a in 0..n {
                for i in 0..n {
                    let mut v = frame.lie_derivative(&fields[a], &forms[i]);
                    for (j, form) in forms.iter().enumerate() {
                        let c = fibre.c(a, j, i);
                        if !num::Zero::is_zero(c) {
                            v = &v + &form.scale_rational(c);
                        }
                    }
                    if !v.is_zero() {
                        out.entries.push((
                            format!("equivariance {}▷{label}^{}", names[a], names[i]),
                            v.display_with(frame.names()),
                        ));
                    }
                }
            }
        }
        for (i, form) in self.alpha.iter().enumerate() {
            if let Some((a, w)) = b.horizontal_witness(form) {
                out.entries.push((format!("horizontality ver_{}(alpha^{})", names[a], names[i]), w.to_string()));
            }
        }
        Ok(out)
    }

    /// `∇_P p = dp − Σ ωⁱ ẽᵢ(p)`; horizontal for a valid ω.
    pub fn nabla_p(&self, b: &Bundle<'_>, p: &Expr) -> Result<OneForm> {
        self.check_dim(b)?;
        let mut acc = b.total().d(p);
        for (i, f) in b.action().fields().iter().enumerate() {
            acc = &acc - &self.omega[i].scale(&f.apply(p));
        }
        b.require_horizontal(format!("∇_P({p})"), &acc)?;
        Ok(acc)
    }

    /// `Γ(p) = Σᵢ Ξ*¹_{eᵢ}(Ξ*²_{eᵢ}(p))ωⁱ − ∇̂_{d ẽᵢ(p)}ωⁱ − ẽᵢ(p)αⁱ`;
    /// horizontal when the bundle is transversal.
    pub fn gamma(&self, b: &Bundle<'_>, p: &Expr) -> Result<OneForm> {
        self.check_dim(b)?;
        let m = b.total();
        let fields = b.action().fields();
        let mut acc = m.frame().zero_form();
        for i in 0..fields.len() {
            let mut s = Expr::zero(m.ring());
            for (k, l, c) in b.xi().star_terms(i) {
                s = &s + &fields[k].apply(&fields[l].apply(p)).scale(&c);
            }
            let vp = fields[i].apply(p);
            acc = &acc + &self.omega[i].scale(&s);
            acc = &acc - &m.nabla(&m.d(&vp), &self.omega[i])?;
            acc = &acc - &self.alpha[i].scale(&vp);
        }
        b.require_horizontal(format!("Γ({p})"), &acc)?;
        Ok(acc)
    }

    /// `ς(τ) = −Σᵢ ∇̂_{eᵢ▷τ}ωⁱ` for horizontal `τ`.
    pub fn varsigma(&self, b: &Bundle<'_>, tau: &OneForm) -> Result<OneForm> {
        self.check_dim(b)?;
        let m = b.total();
        b.require_horizontal("ς argument", tau)?;
        let mut acc = m.frame().zero_form();
        for i in 0..self.omega.len() {
            let moved = b.action().act_form(m, i, tau)?;
            acc = &acc - &m.nabla(&moved, &self.omega[i])?;
        }
        Ok(acc)
    }

    /// `Γ(ap) − aΓ(p) − ∇̂_{da}∇_P p + ∇̂_{dp}da + ∇_P{a,p}` for basic `a`.
    pub fn leibniz_gap(&self, b: &Bundle<'_>, a: &Expr, p: &Expr) -> Result<OneForm> {
        if !b.is_basic(a) {
            return Err(Error::NotBasic(a.to_string()));
        }
        let m = b.total();
        let da = m.d(a);
        let mut acc = self.gamma(b, &(a * p))?;
        acc = &acc - &self.gamma(b, p)?.scale(a);
        acc = &acc - &m.nabla(&da, &self.nabla_p(b, p)?)?;
        acc = &acc + &m.nabla(&m.d(p), &da)?;
        acc = &acc + &self.nabla_p(b, &m.bracket(a, p))?;
        Ok(acc)
    }
}

/// Splits `p` into eigencomponents of a fundamental field acting diagonally
/// on monomials. Errors if some monomial is not an eigenvector.
pub fn homogeneous_parts(b: &Bundle<'_>, xi: usize, p: &Expr) -> Result<BTreeMap<Rational, Expr>> {
    let field = &b.action().fields()[xi];
    let ring = b.total().ring();
    let mut parts: BTreeMap<Rational, Expr> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mono = Expr::monomial(ring, m.clone(), c.clone());
        let image = field.apply(&mono);
        let weight = if image.is_zero() {
            Rational::from_integer(0.into())
        } else {
            match (image.single_term(), mono.single_term()) {
                (Some((im, ic)), Some((mm, mc))) if im == mm => ic / mc,
                _ => {
                    return Err(Error::NotExpressible(format!(
                        "{mono} is not homogeneous for {}",
                        b.fibre().names()[xi]
                    )))
                }
            }
        };
        let e = parts.entry(weight).or_insert_with(|| Expr::zero(ring));
        *e = &*e + &mono;
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets;
    use crate::Geometry;

    fn check_both(f: impl Fn(&Geometry)) {
        f(&datasets::su2_hopf().unwrap());
        f(&datasets::su2_hopf_alpha().unwrap());
    }

    #[test]
    fn datasets_validate() {
        check_both(|g| {
            let b = g.bundle().unwrap();
            assert!(g.require_spin().unwrap().validate(&b).unwrap().is_zero());
        });
    }

    #[test]
    fn varsigma_kills_basic_differentials() {
        check_both(|g| {
            let b = g.bundle().unwrap();
            let s = g.require_spin().unwrap();
            let m = g.manifold();
            for img in &g.require_base().unwrap().images {
                assert!(s.varsigma(&b, &m.d(img)).unwrap().is_zero());
                let scaled = m.d(img).scale(&g.expr("c*d").unwrap());
                assert!(s.varsigma(&b, &scaled).unwrap().is_zero());
            }
        });
    }

    #[test]
    fn varsigma_needs_horizontal_argument() {
        let g = datasets::su2_hopf().unwrap();
        let b = g.bundle().unwrap();
        let e0 = g.manifold().frame().element(0);
        assert!(matches!(
            g.require_spin().unwrap().varsigma(&b, &e0),
            Err(Error::NotHorizontal { .. })
        ));
    }

    #[test]
    fn leibniz_gap_with_unit_vanishes() {
        check_both(|g| {
            let b = g.bundle().unwrap();
            let s = g.require_spin().unwrap();
            let one = g.expr("1").unwrap();
            for p in ["a", "b*c", "a^2*d"] {
                assert!(s.leibniz_gap(&b, &one, &g.expr(p).unwrap()).unwrap().is_zero(), "{p}");
            }
        });
    }

    #[test]
    fn leibniz_gap_matches_varsigma() {
        check_both(|g| {
            let b = g.bundle().unwrap();
            let s = g.require_spin().unwrap();
            let m = g.manifold();
            let z = g.expr("c*d").unwrap();
            for p in ["a", "b", "a*c"] {
                let p = g.expr(p).unwrap();
                let gap = s.leibniz_gap(&b, &z, &p).unwrap();
                let expected = s.varsigma(&b, &m.d(&z)).unwrap().scale(&p);
                assert_eq!(gap, expected);
            }
        });
    }

    #[test]
    fn leibniz_gap_requires_basic_factor() {
        let g = datasets::su2_hopf().unwrap();
        let b = g.bundle().unwrap();
        let a = g.expr("a").unwrap();
        let err = g.require_spin().unwrap().leibniz_gap(&b, &a, &a).unwrap_err();
        assert!(matches!(err, Error::NotBasic(_)), "{err}");
    }

    #[test]
    fn homogeneous_parts_split_by_weight() {
        let g = datasets::su2_hopf().unwrap();
        let b = g.bundle().unwrap();
        let p = g.expr("a + 3*b + c*d").unwrap();
        let parts = homogeneous_parts(&b, 0, &p).unwrap();
        let w = |n: i64| Rational::from_integer(n.into());
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[&w(1)], g.expr("a").unwrap());
        assert_eq!(parts[&w(-1)], g.expr("3*b").unwrap());
        assert_eq!(parts[&w(0)], g.expr("c*d").unwrap());
    }

    #[test]
    fn gamma_on_weighted_monomials() {
        check_both(|g| {
            let b = g.bundle().unwrap();
            let s = g.require_spin().unwrap();
            for p in ["a", "b^2", "a*c"] {
                let p = g.expr(p).unwrap();
                let parts = homogeneous_parts(&b, 0, &p).unwrap();
                let (w, _) = parts.iter().next().unwrap();
                let expected = s.alpha()[0].scale(&p).scale_rational(&-w.clone());
                assert_eq!(s.gamma(&b, &p).unwrap(), expected);
            }
        });
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let g = datasets::su2_hopf().unwrap();
        let s = g.require_spin().unwrap();
        assert!(SpinConnection::new(s.omega().to_vec(), Vec::new()).is_err());
    }
}
