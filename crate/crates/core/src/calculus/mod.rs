//! Frames, exterior derivative on functions and 1-forms, vector fields,
//! interior products and Lie derivatives.

mod forms;

pub use forms::{wedge, OneForm, TwoForm};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::symkernel::{extend_to_localizations, is_identifier, leibniz, Derivation, Expr, Ring};

/// Vector field: a derivation together with its pairings `i_V(eⁱ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    derivation: Derivation,
    pairings: Vec<Expr>,
}

impl VectorField {
    pub fn apply(&self, p: &Expr) -> Expr {
        self.derivation.apply(p)
    }

    pub fn derivation(&self) -> &Derivation {
        &self.derivation
    }

    pub fn pairings(&self) -> &[Expr] {
        &self.pairings
    }

    /// `i_V(η)`.
    pub fn interior(&self, eta: &OneForm) -> Expr {
        let mut acc = Expr::zero(eta.ring());
        for (c, p) in eta.coords().iter().zip(&self.pairings) {
            if !c.is_zero() && !p.is_zero() {
                acc = &acc + &(c * p);
            }
        }
        acc
    }

    /// Left contraction `i_V ω` of a 2-form: `i_V(α∧β) = i_V(α)β − i_V(β)α`.
    pub fn contract(&self, omega: &TwoForm) -> OneForm {
        let mut coords = vec![Expr::zero(self.derivation.ring()); omega.dim()];
        for ((i, j), c) in omega.components() {
            if c.is_zero() {
                continue;
            }
            // c·eⁱ∧eʲ ↦ c·(Vⁱ eʲ − Vʲ eⁱ)
            coords[j] = &coords[j] + &(c * &self.pairings[i]);
            coords[i] = &coords[i] - &(c * &self.pairings[j]);
        }
        OneForm::from_coords(coords)
    }

    pub fn is_zero(&self) -> bool {
        self.derivation.is_zero()
    }
}

/// Evaluation of a 2-form on a pair of fields: `ω(V, W)`, so that
/// `interior2(V, W, η∧τ) = i_V(η)i_W(τ) − i_W(η)i_V(τ)`.
pub fn interior2(v: &VectorField, w: &VectorField, omega: &TwoForm) -> Expr {
    let mut acc = Expr::zero(v.derivation.ring());
    for ((i, j), c) in omega.components() {
        if c.is_zero() {
            continue;
        }
        let s = &(&v.pairings[i] * &w.pairings[j]) - &(&v.pairings[j] * &w.pairings[i]);
        acc = &acc + &(c * &s);
    }
    acc
}

/// Iterated contraction `i_v i_w ω` (contract with `w` first). Equals
/// `−interior2(v, w, ω)`.
pub fn bivector_interior(v: &VectorField, w: &VectorField, omega: &TwoForm) -> Expr {
    v.interior(&w.contract(omega))
}

/// Frame of the 1-form module with its structure data.
#[derive(Clone, Debug)]
pub struct Frame {
    ring: Arc<Ring>,
    names: Vec<String>,
    differential: Vec<OneForm>,
    in_differentials: Vec<Vec<Expr>>,
    d2: Option<Vec<TwoForm>>,
}

impl Frame {
    /// `differential[g]` is `d(g)` for each declared generator;
    /// `in_differentials[i][g]` is the coefficient of `d(g)` in `eⁱ`.
    pub fn new(
        ring: &Arc<Ring>,
        names: Vec<String>,
        differential: Vec<OneForm>,
        in_differentials: Vec<Vec<Expr>>,
        d2: Option<Vec<TwoForm>>,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Spec("frame needs at least one element".into()));
        }
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) || names[..i].contains(name) {
                return Err(Error::Spec(format!("bad or duplicate frame name `{name}`")));
            }
        }
        if differential.len() != ring.declared() || differential.iter().any(|f| f.dim() != n) {
            return Err(Error::Spec("differential table has the wrong shape".into()));
        }
        if in_differentials.len() != n || in_differentials.iter().any(|r| r.len() != ring.declared()) {
            return Err(Error::Spec("frame_in_differentials has the wrong shape".into()));
        }
        let zero = OneForm::zero(ring, n);
        let differential = extend_to_localizations(ring, differential, &zero);
        let frame = Frame {
            ring: ring.clone(),
            names,
            differential,
            in_differentials,
            d2: None,
        };

        for rule in ring.rules() {
            let v = crate::symkernel::leibniz_terms(
                ring,
                &rule.relation_terms(),
                &frame.differential,
                zero.clone(),
            );
            if !v.is_zero() {
                return Err(Error::invariant(
                    "differential annihilates relations",
                    format!("relation `{}`", rule.label()),
                    format!("d(relation) = {}", v.display_with(&frame.names)),
                ));
            }
        }
        for i in 0..n {
            let back = frame.from_differentials(&frame.in_differentials[i]);
            let unit = OneForm::basis(ring, n, i, Expr::one(ring));
            if back != unit {
                return Err(Error::invariant(
                    "frame round trip",
                    format!("frame element `{}`", frame.names[i]),
                    format!("expands to {}", back.display_with(&frame.names)),
                ));
            }
        }
        let mut frame = frame;
        if let Some(d2) = d2 {
            if d2.len() != n || d2.iter().any(|w| w.dim() != n) {
                return Err(Error::Spec("d2 table has the wrong shape".into()));
            }
            for (i, given) in d2.iter().enumerate() {
                let oracle = frame.exterior_of_frame_element(i);
                if *given != oracle {
                    return Err(Error::invariant(
                        "structure equations match d of the frame",
                        format!("d{}", frame.names[i]),
                        format!(
                            "table gives {}, expansion gives {}",
                            given.display_with(&frame.names),
                            oracle.display_with(&frame.names)
                        ),
                    ));
                }
            }
            frame.d2 = Some(d2);
        }
        Ok(frame)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn d2(&self) -> Option<&[TwoForm]> {
        self.d2.as_deref()
    }

    pub fn zero_form(&self) -> OneForm {
        OneForm::zero(&self.ring, self.dim())
    }

    pub fn zero_two_form(&self) -> TwoForm {
        TwoForm::zero(&self.ring, self.dim())
    }

    /// The frame element `eⁱ`.
    pub fn element(&self, i: usize) -> OneForm {
        OneForm::basis(&self.ring, self.dim(), i, Expr::one(&self.ring))
    }

    /// `d(g)` for any generator, localization generators included.
    pub fn generator_differential(&self, g: usize) -> &OneForm {
        &self.differential[g]
    }

    /// Coefficient of `d(g)` in `eⁱ`.
    pub fn in_differentials(&self, i: usize) -> &[Expr] {
        &self.in_differentials[i]
    }

    pub fn differential(&self, p: &Expr) -> OneForm {
        leibniz(p, &self.differential, self.zero_form())
    }

    /// `p·dq` in frame coordinates.
    pub fn pdq(&self, p: &Expr, q: &Expr) -> OneForm {
        self.differential(q).scale(p)
    }

    /// Coefficients `P_g` with `η = Σ P_g d(g)` over the declared generators.
    pub fn differential_coeffs(&self, eta: &OneForm) -> Vec<Expr> {
        let mut out = vec![Expr::zero(&self.ring); self.ring.declared()];
        for (i, c) in eta.coords().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (g, f) in self.in_differentials[i].iter().enumerate() {
                if !f.is_zero() {
                    out[g] = &out[g] + &(c * f);
                }
            }
        }
        out
    }

    /// `Σ P_g d(g)`.
    pub fn from_differentials(&self, coeffs: &[Expr]) -> OneForm {
        let mut acc = self.zero_form();
        for (g, p) in coeffs.iter().enumerate() {
            if !p.is_zero() {
                acc = &acc + &self.differential[g].scale(p);
            }
        }
        acc
    }

    fn exterior_of_frame_element(&self, i: usize) -> TwoForm {
        let mut acc = self.zero_two_form();
        for (g, f) in self.in_differentials[i].iter().enumerate() {
            if !f.is_zero() {
                acc = &acc + &wedge(&self.differential(f), &self.differential[g]);
            }
        }
        acc
    }

    /// `dη` through the structure equations.
    pub fn exterior(&self, eta: &OneForm) -> Result<TwoForm> {
        let d2 = self
            .d2
            .as_ref()
            .ok_or_else(|| Error::Missing("d2 table (structure equations) for this frame".into()))?;
        let mut acc = self.zero_two_form();
        for (i, c) in eta.coords().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = &acc + &wedge(&self.differential(c), &self.element(i));
            acc = &acc + &d2[i].scale(c);
        }
        Ok(acc)
    }

    /// `dη = Σ dP_g ∧ d(g)`; needs no structure data.
    pub fn exterior_by_expansion(&self, eta: &OneForm) -> TwoForm {
        let mut acc = self.zero_two_form();
        for (g, p) in self.differential_coeffs(eta).iter().enumerate() {
            if !p.is_zero() {
                acc = &acc + &wedge(&self.differential(p), &self.differential[g]);
            }
        }
        acc
    }

    /// Vector field from its values on the declared generators; pairings are
    /// read off through `frame_in_differentials`.
    pub fn field(&self, declared: Vec<Expr>) -> Result<VectorField> {
        let derivation = Derivation::new(&self.ring, declared)?;
        let pairings: Vec<Expr> = (0..self.dim())
            .map(|i| {
                let mut acc = Expr::zero(&self.ring);
                for (g, f) in self.in_differentials[i].iter().enumerate() {
                    if !f.is_zero() {
                        acc = &acc + &(f * derivation.image(g));
                    }
                }
                acc
            })
            .collect();
        let field = VectorField {
            derivation,
            pairings,
        };
        for g in 0..self.ring.declared() {
            let via_frame = field.interior(&self.differential[g]);
            if via_frame != *field.derivation.image(g) {
                return Err(Error::invariant(
                    "vector field consistency",
                    format!("generator `{}`", self.ring.name(g)),
                    format!(
                        "i_V(d{}) = {via_frame} but V({}) = {}",
                        self.ring.name(g),
                        self.ring.name(g),
                        field.derivation.image(g)
                    ),
                ));
            }
        }
        Ok(field)
    }

    /// Field dual to the frame: `i(eʲ) = δᵢʲ`, `V(g)` = coefficient of `eⁱ` in `dg`.
    pub fn dual_field(&self, i: usize) -> VectorField {
        let declared = (0..self.ring.declared())
            .map(|g| self.differential[g].coord(i).clone())
            .collect();
        self.field(declared)
            .expect("frame duals are well defined once the frame validates")
    }

    /// Lie derivative by expanding `η = Σ P_g dg`:
    /// `L_V η = Σ V(P_g) dg + P_g d(V g)`.
    pub fn lie_derivative(&self, v: &VectorField, eta: &OneForm) -> OneForm {
        let mut acc = self.zero_form();
        for (g, p) in self.differential_coeffs(eta).iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            acc = &acc + &self.differential[g].scale(&v.apply(p));
            acc = &acc + &self.differential(v.derivation.image(g)).scale(p);
        }
        acc
    }

    /// Cartan formula `L_V = i_V d + d i_V`; needs structure equations.
    pub fn lie_derivative_cartan(&self, v: &VectorField, eta: &OneForm) -> Result<OneForm> {
        let d_eta = self.exterior(eta)?;
        Ok(&v.contract(&d_eta) + &self.differential(&v.interior(eta)))
    }

    /// Lie derivative from a table of values on frame elements.
    pub fn lie_derivative_table(&self, v: &VectorField, table: &[OneForm], eta: &OneForm) -> OneForm {
        let mut acc = self.zero_form();
        for (i, c) in eta.coords().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = &acc + &OneForm::basis(&self.ring, self.dim(), i, v.apply(c));
            acc = &acc + &table[i].scale(c);
        }
        acc
    }
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
    fn d_table_of_su2() {
        let g = su2();
        let f = g.manifold().frame();
        let e = |s: &str| g.expr(s).unwrap();
        let want = [("a", ["a", "b", "0"]), ("b", ["-b", "0", "a"]), ("c", ["c", "d", "0"]), ("d", ["-d", "0", "c"])];
        for (gen, coords) in want {
            let form = OneForm::from_coords(coords.iter().map(|c| e(c)).collect());
            assert_eq!(f.differential(&e(gen)), form, "d{gen}");
        }
    }

    #[test]
    fn differential_kills_the_determinant_relation() {
        let g = su2();
        let f = g.manifold().frame();
        assert!(f.differential(&g.expr("a*d - b*c").unwrap()).is_zero());
    }

    #[test]
    fn d_squared_vanishes_on_random_functions() {
        let g = su2();
        let m = g.manifold();
        let mut s = Sampler::new(1, 4);
        for _ in 0..20 {
            let p = s.function(m);
            assert!(m.frame().exterior(&m.d(&p)).unwrap().is_zero(), "d²({p})");
        }
    }

    #[test]
    fn structure_equations_agree_with_expansion() {
        let g = su2();
        let m = g.manifold();
        let mut s = Sampler::new(2, 3);
        for _ in 0..20 {
            let eta = s.one_form(m);
            assert_eq!(m.frame().exterior(&eta).unwrap(), m.frame().exterior_by_expansion(&eta));
        }
    }

    #[test]
    fn structure_constants_of_su2_frame() {
        let g = su2();
        let f = g.manifold().frame();
        let d2 = f.d2().unwrap();
        assert_eq!(d2[0].get(1, 2), g.expr("1").unwrap());
        assert_eq!(d2[1].get(0, 1), g.expr("2").unwrap());
        assert_eq!(d2[2].get(0, 2), g.expr("-2").unwrap());
    }

    #[test]
    fn lie_derivative_routes_agree() {
        let g = su2();
        let m = g.manifold();
        let f = m.frame();
        let mut s = Sampler::new(3, 3);
        for i in 0..f.dim() {
            let v = f.dual_field(i);
            for _ in 0..5 {
                let eta = s.one_form(m);
                assert_eq!(f.lie_derivative(&v, &eta), f.lie_derivative_cartan(&v, &eta).unwrap());
            }
        }
    }

    #[test]
    fn dual_field_of_e0_is_tilde_h() {
        let g = su2();
        let f = g.manifold().frame();
        let h = f.dual_field(0);
        for (gen, want) in [("a", "a"), ("b", "-b"), ("c", "c"), ("d", "-d")] {
            assert_eq!(h.apply(&g.expr(gen).unwrap()), g.expr(want).unwrap());
        }
        assert_eq!(h.pairings()[0], g.expr("1").unwrap());
        assert!(h.pairings()[1].is_zero() && h.pairings()[2].is_zero());
    }

    #[test]
    fn interior2_pairs_in_order() {
        let g = su2();
        let f = g.manifold().frame();
        let w = crate::calculus::wedge(&f.element(0), &f.element(1));
        let (h, xp) = (f.dual_field(0), f.dual_field(1));
        assert_eq!(interior2(&h, &xp, &w), g.expr("1").unwrap());
        assert_eq!(bivector_interior(&h, &xp, &w), g.expr("-1").unwrap());
    }

    #[test]
    fn inconsistent_d_table_is_rejected_naming_the_relation() {
        let text = datasets::SU2_SELFACTION.replacen("\"ep\": \"b\"", "\"ep\": \"2*b\"", 1);
        assert_ne!(text, datasets::SU2_SELFACTION, "fixture edit applied");
        let err = crate::Geometry::parse(&text).unwrap_err().to_string();
        assert!(err.contains("differential annihilates relations"), "{err}");
    }
}
