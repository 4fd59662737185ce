//! Infinitesimal Lie algebra actions by vector fields and their covariance
//! defects against a Poisson structure and a contravariant connection.

use crate::calculus::{bivector_interior, OneForm, VectorField};
use crate::error::{Error, Result};
use crate::liebialg::LieBialgebra;
use crate::poisson::Manifold;
use crate::symkernel::Expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chirality {
    /// `ξ▷`, generated by left-invariant fields on the acting group.
    Left,
    /// `◁ξ`, generated by right-invariant fields.
    Right,
}

impl Chirality {
    pub fn symbol(self) -> &'static str {
        match self {
            Chirality::Left => "▷",
            Chirality::Right => "◁",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Chirality::Left => "left",
            Chirality::Right => "right",
        }
    }
}

/// Action of a fibre Lie algebra on a manifold. The classical defect
/// formulas agree for both chiralities once the fields are fixed, so the
/// chirality only records which field family the fields come from.
#[derive(Clone, Debug)]
pub struct Action {
    chirality: Chirality,
    basis: Vec<String>,
    fields: Vec<VectorField>,
    /// `[basis][frame]`: the action on frame elements.
    form_action: Option<Vec<Vec<OneForm>>>,
    /// Fields contracted in the cobracket term; the action's own fields
    /// unless overridden.
    delta_fields: Option<Vec<VectorField>>,
}

impl Action {
    /// `form_action`, when given, must equal the Lie derivative of each
    /// frame element along the corresponding field.
    pub fn new(
        m: &Manifold,
        chirality: Chirality,
        basis: Vec<String>,
        fields: Vec<VectorField>,
        form_action: Option<Vec<Vec<OneForm>>>,
    ) -> Result<Self> {
        if fields.len() != basis.len() {
            return Err(Error::Spec("one field per fibre basis element is required".into()));
        }
        let frame = m.frame();
        if let Some(table) = &form_action {
            if table.len() != basis.len() || table.iter().any(|r| r.len() != frame.dim()) {
                return Err(Error::Spec("form_action table has the wrong shape".into()));
            }
            for (a, row) in table.iter().enumerate() {
                for (i, given) in row.iter().enumerate() {
                    let lie = frame.lie_derivative(&fields[a], &frame.element(i));
                    if *given != lie {
                        return Err(Error::invariant(
                            "form action is the Lie derivative",
                            format!("{}{}{}", basis[a], chirality.symbol(), frame.names()[i]),
                            format!(
                                "table gives {}, Lie derivative gives {}",
                                given.display_with(frame.names()),
                                lie.display_with(frame.names())
                            ),
                        ));
                    }
                }
            }
        }
        Ok(Action {
            chirality,
            basis,
            fields,
            form_action,
            delta_fields: None,
        })
    }

    /// Uses `fields` instead of the action's own fields in the cobracket terms.
    pub fn with_delta_fields(mut self, fields: Vec<VectorField>) -> Self {
        self.delta_fields = Some(fields);
        self
    }

    pub fn chirality(&self) -> Chirality {
        self.chirality
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|n| n == name)
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn field(&self, xi: usize) -> &VectorField {
        &self.fields[xi]
    }

    pub fn has_form_action(&self) -> bool {
        self.form_action.is_some()
    }

    pub fn form_action(&self) -> Option<&[Vec<OneForm>]> {
        self.form_action.as_deref()
    }

    fn delta_field(&self, j: usize) -> &VectorField {
        match &self.delta_fields {
            Some(f) => &f[j],
            None => &self.fields[j],
        }
    }

    /// Action on a function.
    pub fn apply(&self, xi: usize, p: &Expr) -> Expr {
        self.fields[xi].apply(p)
    }

    /// Action on a 1-form from the frame table.
    pub fn act_form(&self, m: &Manifold, xi: usize, eta: &OneForm) -> Result<OneForm> {
        let table = self
            .form_action
            .as_ref()
            .ok_or_else(|| Error::Missing("form_action block".into()))?;
        Ok(m.frame().lie_derivative_table(&self.fields[xi], &table[xi], eta))
    }

    fn check_fibre(&self, l: &LieBialgebra) -> Result<()> {
        if l.names() != self.basis.as_slice() {
            return Err(Error::Spec("action basis differs from the fibre basis".into()));
        }
        Ok(())
    }

    /// `ξ{p,q} − {ξp,q} − {p,ξq} − Σ (δ¹ξ p)(δ²ξ q)`.
    pub fn plg_action_defect(&self, m: &Manifold, l: &LieBialgebra, xi: usize, p: &Expr, q: &Expr) -> Result<Expr> {
        self.check_fibre(l)?;
        let v = &self.fields[xi];
        let mut acc = v.apply(&m.bracket(p, q));
        acc = &acc - &m.bracket(&v.apply(p), q);
        acc = &acc - &m.bracket(p, &v.apply(q));
        for (j, k, c) in l.cobracket_terms(xi) {
            let t = &self.fields[j].apply(p) * &self.fields[k].apply(q);
            acc = &acc - &t.scale(&c);
        }
        Ok(acc)
    }

    /// `ξ∇̂_ητ − ∇̂_{ξη}τ − ∇̂_η(ξτ) − Σ (i_{δ¹ξ}η)(δ²ξ τ)`.
    pub fn conn_covariance_defect(
        &self,
        m: &Manifold,
        l: &LieBialgebra,
        xi: usize,
        eta: &OneForm,
        tau: &OneForm,
    ) -> Result<OneForm> {
        self.check_fibre(l)?;
        let mut acc = self.act_form(m, xi, &m.nabla(eta, tau)?)?;
        acc = &acc - &m.nabla(&self.act_form(m, xi, eta)?, tau)?;
        acc = &acc - &m.nabla(eta, &self.act_form(m, xi, tau)?)?;
        for (j, k, c) in l.cobracket_terms(xi) {
            let s = self.delta_field(j).interior(eta).scale(&c);
            if !s.is_zero() {
                acc = &acc - &self.act_form(m, k, tau)?.scale(&s);
            }
        }
        Ok(acc)
    }

    /// `ξ[τ,η] − [ξτ,η] − [τ,ξη] − ½ Σ L(δ¹ξ, δ²ξ)(τ,η)`, with the
    /// Leibnizator `L` from [`leibnizator`].
    pub fn cor44_check(
        &self,
        m: &Manifold,
        l: &LieBialgebra,
        xi: usize,
        tau: &OneForm,
        eta: &OneForm,
    ) -> Result<OneForm> {
        self.check_fibre(l)?;
        let mut acc = self.act_form(m, xi, &m.schouten(tau, eta))?;
        acc = &acc - &m.schouten(&self.act_form(m, xi, tau)?, eta);
        acc = &acc - &m.schouten(tau, &self.act_form(m, xi, eta)?);
        let half = crate::symkernel::rat(1, 2);
        for (j, k, c) in l.cobracket_terms(xi) {
            let lz = leibnizator(m, self.delta_field(j), self.delta_field(k), tau, eta)?;
            acc = &acc - &lz.scale_rational(&(&c * &half));
        }
        Ok(acc)
    }

    /// Same as [`Action::cor44_check`] with the cobracket term in the short
    /// form `Σ (i_{δ¹ξ}τ)L_{δ²ξ}η − (i_{δ¹ξ}η)L_{δ²ξ}τ`.
    pub fn cor44_check_short(
        &self,
        m: &Manifold,
        l: &LieBialgebra,
        xi: usize,
        tau: &OneForm,
        eta: &OneForm,
    ) -> Result<OneForm> {
        self.check_fibre(l)?;
        let frame = m.frame();
        let mut acc = self.act_form(m, xi, &m.schouten(tau, eta))?;
        acc = &acc - &m.schouten(&self.act_form(m, xi, tau)?, eta);
        acc = &acc - &m.schouten(tau, &self.act_form(m, xi, eta)?);
        for (j, k, c) in l.cobracket_terms(xi) {
            let v = self.delta_field(j);
            let w = self.delta_field(k);
            let a = frame.lie_derivative(w, eta).scale(&v.interior(tau));
            let b = frame.lie_derivative(w, tau).scale(&v.interior(eta));
            acc = &acc - &(&a - &b).scale_rational(&c);
        }
        Ok(acc)
    }
}

/// `𝓛_{v∧w}(τ∧η) − (i_{v∧w}dτ)η + τ(i_{v∧w}dη)` with the Lie derivative
/// along the bivector `v∧w` expanded on 2-forms. Needs structure equations.
pub fn leibnizator(m: &Manifold, v: &VectorField, w: &VectorField, tau: &OneForm, eta: &OneForm) -> Result<OneForm> {
    let frame = m.frame();
    let dtau = frame.exterior(tau)?;
    let deta = frame.exterior(eta)?;
    let ivw_dtau = bivector_interior(v, w, &dtau);
    let ivw_deta = bivector_interior(v, w, &deta);
    let (iv_eta, iw_eta) = (v.interior(eta), w.interior(eta));
    let (iv_tau, iw_tau) = (v.interior(tau), w.interior(tau));

    let mut lie = eta.scale(&ivw_dtau);
    lie = &lie - &w.contract(&dtau).scale(&iv_eta);
    lie = &lie + &v.contract(&dtau).scale(&iw_eta);
    lie = &lie - &v.contract(&deta).scale(&iw_tau);
    lie = &lie + &w.contract(&deta).scale(&iv_tau);
    lie = &lie - &tau.scale(&ivw_deta);
    lie = &lie - &frame.differential(&(&(&iv_eta * &iw_tau) - &(&iv_tau * &iw_eta)));

    let mut out = &lie - &eta.scale(&ivw_dtau);
    out = &out + &tau.scale(&ivw_deta);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::Sampler;
    use crate::datasets;

    fn su2() -> crate::Geometry {
        datasets::su2_selfaction().unwrap()
    }

    #[test]
    fn chirality_notation() {
        assert_eq!(Chirality::Left.symbol(), "▷");
        assert_eq!(Chirality::Right.symbol(), "◁");
        assert_eq!(Chirality::Right.name(), "right");
    }

    #[test]
    fn grave_fields_generate_the_self_action() {
        let g = su2();
        let a = g.require_action().unwrap();
        assert_eq!(a.chirality(), Chirality::Right);
        let e = |s: &str| g.expr(s).unwrap();
        let table = [
            ("H", ["a", "b", "-c", "-d"]),
            ("Xp", ["c", "d", "0", "0"]),
            ("Xm", ["0", "0", "a", "b"]),
        ];
        for (name, vals) in table {
            let xi = a.index(name).unwrap();
            for (gen, v) in ["a", "b", "c", "d"].iter().zip(vals) {
                assert_eq!(a.apply(xi, &e(gen)), e(v), "{gen}◁{name}");
            }
        }
    }

    /// Cobracket contractions with the left-invariant fields agree with the
    /// action's own fields on `(dg, eⁱ)` but not on exact pairs.
    #[test]
    fn left_invariant_cobracket_fields_fail_on_exact_pairs() {
        let g = su2();
        let m = g.manifold();
        let l = g.require_fibre().unwrap();
        let f = m.frame();
        let tilde: Vec<_> = (0..f.dim()).map(|i| f.dual_field(i)).collect();
        let literal = g.require_action().unwrap().clone().with_delta_fields(tilde);
        let nd = m.ring().declared();
        let mut failing_exact = 0;
        for xi in 0..l.dim() {
            for gi in 0..nd {
                let dg = f.generator_differential(gi);
                for i in 0..f.dim() {
                    assert!(literal.conn_covariance_defect(m, l, xi, dg, &f.element(i)).unwrap().is_zero());
                }
                for hi in 0..nd {
                    let dh = f.generator_differential(hi);
                    if !literal.conn_covariance_defect(m, l, xi, dg, dh).unwrap().is_zero() {
                        failing_exact += 1;
                    }
                }
            }
        }
        assert_eq!(failing_exact, 24);
    }

    #[test]
    fn leibnizator_forms_agree_and_vanish() {
        let g = su2();
        let m = g.manifold();
        let l = g.require_fibre().unwrap();
        let a = g.require_action().unwrap();
        let mut s = Sampler::new(8, 2);
        for xi in 0..l.dim() {
            for _ in 0..4 {
                let (tau, eta) = (s.one_form(m), s.one_form(m));
                let long = a.cor44_check(m, l, xi, &tau, &eta).unwrap();
                let short = a.cor44_check_short(m, l, xi, &tau, &eta).unwrap();
                assert_eq!(long, short);
                assert!(long.is_zero());
            }
        }
    }

    #[test]
    fn leibnizator_of_a_field_with_itself_vanishes() {
        let g = su2();
        let m = g.manifold();
        let f = m.frame();
        let v = f.dual_field(1);
        let mut s = Sampler::new(9, 2);
        let (tau, eta) = (s.one_form(m), s.one_form(m));
        assert!(leibnizator(m, &v, &v, &tau, &eta).unwrap().is_zero());
    }

    #[test]
    fn form_action_must_be_the_lie_derivative() {
        let g = datasets::su2_hopf().unwrap();
        let m = g.manifold();
        let a = g.require_action().unwrap();
        let mut table = a.form_action().unwrap().to_vec();
        table[0][1] = table[0][1].scale_rational(&crate::symkernel::rat(3, 2));
        let err = Action::new(m, a.chirality(), a.basis().to_vec(), a.fields().to_vec(), Some(table)).unwrap_err();
        assert!(err.to_string().contains("form action is the Lie derivative"), "{err}");
    }

    #[test]
    fn act_form_without_table_is_missing_data() {
        let g = su2();
        let m = g.manifold();
        let a = g.require_action().unwrap();
        let bare = Action::new(m, a.chirality(), a.basis().to_vec(), a.fields().to_vec(), None).unwrap();
        assert!(matches!(bare.act_form(m, 0, &m.frame().element(0)), Err(Error::Missing(_))));
    }
}
