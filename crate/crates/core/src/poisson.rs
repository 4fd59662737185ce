//! Poisson brackets, the Schouten bracket of 1-forms and contravariant
//! connections.

use std::sync::Arc;

use crate::calculus::{Frame, OneForm};
use crate::error::{Error, Result};
use crate::symkernel::{leibniz_terms, Expr, Ring};

/// Antisymmetric bracket table on generators, extended as a biderivation.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonStructure {
    ring: Arc<Ring>,
    /// `{g, h}` over all generators, localization generators included.
    table: Vec<Vec<Expr>>,
}

impl PoissonStructure {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        let n = ring.len();
        PoissonStructure {
            ring: ring.clone(),
            table: vec![vec![Expr::zero(ring); n]; n],
        }
    }

    /// Entries `(g, h, {g,h})` over declared generators; unlisted pairs are zero.
    pub fn new<I>(ring: &Arc<Ring>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Expr)>,
    {
        let nd = ring.declared();
        let mut given: Vec<Vec<Option<Expr>>> = vec![vec![None; nd]; nd];
        for (g, h, v) in entries {
            if g >= nd || h >= nd {
                return Err(Error::Spec("bracket entries must use declared generators".into()));
            }
            if g == h && !v.is_zero() {
                return Err(Error::invariant(
                    "bracket is antisymmetric",
                    format!("{{{0},{0}}}", ring.name(g)),
                    format!("given {v}, must be 0"),
                ));
            }
            let neg = -&v;
            for (slot, val) in [((g, h), v), ((h, g), neg)] {
                match &given[slot.0][slot.1] {
                    Some(prev) if *prev != val => {
                        return Err(Error::invariant(
                            "bracket is antisymmetric",
                            format!("{{{},{}}}", ring.name(slot.0), ring.name(slot.1)),
                            format!("conflicting values {prev} and {val}"),
                        ))
                    }
                    _ => given[slot.0][slot.1] = Some(val),
                }
            }
        }
        let mut p = Self::zero(ring);
        for g in 0..nd {
            for h in 0..nd {
                if let Some(v) = given[g][h].take() {
                    p.table[g][h] = v;
                }
            }
        }
        p.extend_to_localizations();
        p.validate()?;
        Ok(p)
    }

    fn extend_to_localizations(&mut self) {
        let ring = self.ring.clone();
        let nd = ring.declared();
        let dens: Vec<(usize, Expr)> = ring
            .denominators()
            .iter()
            .map(|d| (d.generator(), Expr::from_terms(&ring, d.terms.iter().cloned())))
            .collect();
        // {g, u} = −u²{g, D} = u²{D, g} for declared g.
        for (u, den) in &dens {
            let uu = Expr::generator(&ring, *u).pow(2);
            for g in 0..nd {
                let v = &uu * &self.bracket_declared(den, g);
                self.table[g][*u] = v.clone();
                self.table[*u][g] = -&v;
            }
        }
        // {u, u'} = −u²{D, u'}.
        for (u, den) in &dens {
            let uu = -&Expr::generator(&ring, *u).pow(2);
            for (w, _) in &dens {
                let mut acc = Expr::zero(&ring);
                for k in 0..nd {
                    if den.mentions(k) {
                        acc = &acc + &(&den.partial(k) * &self.table[k][*w]);
                    }
                }
                self.table[*u][*w] = &uu * &acc;
            }
        }
    }

    /// `{D, g}` using declared entries only.
    fn bracket_declared(&self, den: &Expr, g: usize) -> Expr {
        let mut acc = Expr::zero(&self.ring);
        for k in 0..self.ring.declared() {
            if den.mentions(k) {
                acc = &acc + &(&den.partial(k) * &self.table[k][g]);
            }
        }
        acc
    }

    fn validate(&self) -> Result<()> {
        let zero = Expr::zero(&self.ring);
        for rule in self.ring.rules() {
            for g in 0..self.ring.declared() {
                let column: Vec<Expr> = self.table.iter().map(|row| row[g].clone()).collect();
                let v = leibniz_terms(&self.ring, &rule.relation_terms(), &column, zero.clone());
                if !v.is_zero() {
                    return Err(Error::invariant(
                        "bracket annihilates relations",
                        format!("{{{}, {}}}", rule.label(), self.ring.name(g)),
                        format!("gives {v}"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    /// `{g, h}` on generators.
    pub fn entry(&self, g: usize, h: usize) -> &Expr {
        &self.table[g][h]
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().flatten().all(Expr::is_zero)
    }

    /// `{g, q}` for a generator `g`.
    pub fn bracket_generator(&self, g: usize, q: &Expr) -> Expr {
        let mut acc = Expr::zero(&self.ring);
        for (h, v) in self.table[g].iter().enumerate() {
            if !v.is_zero() && q.mentions(h) {
                acc = &acc + &(&q.partial(h) * v);
            }
        }
        acc
    }

    pub fn bracket(&self, p: &Expr, q: &Expr) -> Expr {
        let mut acc = Expr::zero(&self.ring);
        for g in 0..self.ring.len() {
            if p.mentions(g) {
                let inner = self.bracket_generator(g, q);
                if !inner.is_zero() {
                    acc = &acc + &(&p.partial(g) * &inner);
                }
            }
        }
        acc
    }

    /// `{p,{q,r}} + {q,{r,p}} + {r,{p,q}}`.
    pub fn jacobiator(&self, p: &Expr, q: &Expr, r: &Expr) -> Expr {
        let a = self.bracket(p, &self.bracket(q, r));
        let b = self.bracket(q, &self.bracket(r, p));
        let c = self.bracket(r, &self.bracket(p, q));
        &(&a + &b) + &c
    }

    /// `π(η, τ)` with both forms expanded over generator differentials.
    pub fn pi(&self, frame: &Frame, eta: &OneForm, tau: &OneForm) -> Expr {
        let p = frame.differential_coeffs(eta);
        let q = frame.differential_coeffs(tau);
        let mut acc = Expr::zero(&self.ring);
        for (g, pg) in p.iter().enumerate() {
            if pg.is_zero() {
                continue;
            }
            for (h, qh) in q.iter().enumerate() {
                let v = &self.table[g][h];
                if !qh.is_zero() && !v.is_zero() {
                    acc = &acc + &(&(pg * qh) * v);
                }
            }
        }
        acc
    }

    /// `π(η, dq)`.
    pub fn pi_d(&self, frame: &Frame, eta: &OneForm, q: &Expr) -> Expr {
        let mut acc = Expr::zero(&self.ring);
        for (g, pg) in frame.differential_coeffs(eta).iter().enumerate() {
            if !pg.is_zero() {
                acc = &acc + &(pg * &self.bracket_generator(g, q));
            }
        }
        acc
    }

    /// Schouten bracket, from `[dg, dh] = d{g,h}` and
    /// `[aη, bτ] = ab[η,τ] + aπ(η,db)τ − bπ(τ,da)η`.
    pub fn schouten(&self, frame: &Frame, eta: &OneForm, tau: &OneForm) -> OneForm {
        let p = frame.differential_coeffs(eta);
        let q = frame.differential_coeffs(tau);
        let mut acc = frame.zero_form();
        for (k, pk) in p.iter().enumerate() {
            if pk.is_zero() {
                continue;
            }
            for (l, ql) in q.iter().enumerate() {
                if ql.is_zero() {
                    continue;
                }
                let gk = Expr::generator(&self.ring, k);
                let gl = Expr::generator(&self.ring, l);
                let coeff = pk * ql;
                acc = &acc + &frame.differential(&self.table[k][l]).scale(&coeff);
                let a = pk * &self.bracket(&gk, ql);
                acc = &acc + &frame.generator_differential(l).scale(&a);
                let b = ql * &self.bracket(&gl, pk);
                acc = &acc - &frame.generator_differential(k).scale(&b);
            }
        }
        acc
    }
}

/// Contravariant connection given by `∇̂_{dg} eⁱ` on generators and frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    /// `[generator][frame element]`, localization generators included.
    table: Vec<Vec<OneForm>>,
}

impl Connection {
    pub fn zero(frame: &Frame) -> Self {
        let n = frame.ring().len();
        Connection {
            table: vec![vec![frame.zero_form(); frame.dim()]; n],
        }
    }

    /// `declared[g][i] = ∇̂_{dg} eⁱ` for each declared generator.
    pub fn new(frame: &Frame, declared: Vec<Vec<OneForm>>) -> Result<Self> {
        let ring = frame.ring().clone();
        let nd = ring.declared();
        let n = frame.dim();
        if declared.len() != nd || declared.iter().any(|r| r.len() != n) {
            return Err(Error::Spec("connection table has the wrong shape".into()));
        }
        let mut table = declared;
        for d in ring.denominators() {
            let den = Expr::from_terms(&ring, d.terms.iter().cloned());
            let uu = -&Expr::generator(&ring, d.generator()).pow(2);
            let row: Vec<OneForm> = (0..n)
                .map(|i| {
                    let mut acc = frame.zero_form();
                    for (k, row) in table.iter().enumerate().take(nd) {
                        if den.mentions(k) {
                            acc = &acc + &row[i].scale(&den.partial(k));
                        }
                    }
                    acc.scale(&uu)
                })
                .collect();
            table.push(row);
        }
        let c = Connection { table };
        c.validate(frame)?;
        Ok(c)
    }

    /// The value on `dg` must agree with the value obtained by rewriting `dg`
    /// in the frame and back; this makes `∇̂` well defined on the quotient.
    fn validate(&self, frame: &Frame) -> Result<()> {
        let ring = frame.ring();
        for g in 0..ring.declared() {
            for i in 0..frame.dim() {
                let direct = &self.table[g][i];
                let via = self.direction(frame, frame.generator_differential(g), i);
                if *direct != via {
                    return Err(Error::invariant(
                        "connection is well defined on the quotient",
                        format!("∇̂_d{} {}", ring.name(g), frame.names()[i]),
                        format!(
                            "table gives {}, frame expansion gives {}",
                            direct.display_with(frame.names()),
                            via.display_with(frame.names())
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `∇̂_η eⁱ`, function-linear in `η`.
    fn direction(&self, frame: &Frame, eta: &OneForm, i: usize) -> OneForm {
        let mut acc = frame.zero_form();
        for (g, p) in frame.differential_coeffs(eta).iter().enumerate() {
            if !p.is_zero() {
                acc = &acc + &self.table[g][i].scale(p);
            }
        }
        acc
    }

    /// `∇̂_{dg} eⁱ`.
    pub fn entry(&self, g: usize, i: usize) -> &OneForm {
        &self.table[g][i]
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().flatten().all(OneForm::is_zero)
    }

    /// `∇̂_η τ`: function-linear in `η`, Leibniz in `τ` through the bracket.
    pub fn apply(&self, frame: &Frame, poisson: &PoissonStructure, eta: &OneForm, tau: &OneForm) -> OneForm {
        let ring = frame.ring();
        let mut acc = frame.zero_form();
        for (g, p) in frame.differential_coeffs(eta).iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let mut inner = frame.zero_form();
            for (i, t) in tau.coords().iter().enumerate() {
                if t.is_zero() {
                    continue;
                }
                inner = &inner + &OneForm::basis(ring, frame.dim(), i, poisson.bracket_generator(g, t));
                inner = &inner + &self.table[g][i].scale(t);
            }
            acc = &acc + &inner.scale(p);
        }
        acc
    }
}

/// Frame, bracket and (optionally) a contravariant connection on one ring.
#[derive(Clone, Debug)]
pub struct Manifold {
    frame: Frame,
    poisson: PoissonStructure,
    connection: Option<Connection>,
}

impl Manifold {
    pub fn new(frame: Frame, poisson: PoissonStructure, connection: Option<Connection>) -> Result<Self> {
        if !Arc::ptr_eq(frame.ring(), poisson.ring()) {
            return Err(Error::RingMismatch);
        }
        Ok(Manifold {
            frame,
            poisson,
            connection,
        })
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.frame.ring()
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn poisson(&self) -> &PoissonStructure {
        &self.poisson
    }

    pub fn connection(&self) -> Option<&Connection> {
        self.connection.as_ref()
    }

    pub fn require_connection(&self) -> Result<&Connection> {
        self.connection
            .as_ref()
            .ok_or_else(|| Error::Missing("connection block".into()))
    }

    pub fn expr(&self, src: &str) -> Result<Expr> {
        Expr::parse(self.ring(), src)
    }

    pub fn d(&self, p: &Expr) -> OneForm {
        self.frame.differential(p)
    }

    pub fn bracket(&self, p: &Expr, q: &Expr) -> Expr {
        self.poisson.bracket(p, q)
    }

    pub fn jacobiator(&self, p: &Expr, q: &Expr, r: &Expr) -> Expr {
        self.poisson.jacobiator(p, q, r)
    }

    pub fn pi(&self, eta: &OneForm, tau: &OneForm) -> Expr {
        self.poisson.pi(&self.frame, eta, tau)
    }

    pub fn schouten(&self, eta: &OneForm, tau: &OneForm) -> OneForm {
        self.poisson.schouten(&self.frame, eta, tau)
    }

    pub fn nabla(&self, eta: &OneForm, tau: &OneForm) -> Result<OneForm> {
        Ok(self.require_connection()?.apply(&self.frame, &self.poisson, eta, tau))
    }

    /// `∇̂_η τ − ∇̂_τ η − [η, τ]`.
    pub fn compatibility_defect(&self, eta: &OneForm, tau: &OneForm) -> Result<OneForm> {
        let a = self.nabla(eta, tau)?;
        let b = self.nabla(tau, eta)?;
        Ok(&(&a - &b) - &self.schouten(eta, tau))
    }

    /// `R(η,τ)σ = ∇̂_η∇̂_τσ − ∇̂_τ∇̂_ησ − ∇̂_{[η,τ]}σ`.
    pub fn curvature(&self, eta: &OneForm, tau: &OneForm, sigma: &OneForm) -> Result<OneForm> {
        let a = self.nabla(eta, &self.nabla(tau, sigma)?)?;
        let b = self.nabla(tau, &self.nabla(eta, sigma)?)?;
        let c = self.nabla(&self.schouten(eta, tau), sigma)?;
        Ok(&(&a - &b) - &c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::Sampler;
    use crate::datasets;

    /// `{p,q} = Σ ∂_g p ∂_h q {g,h}` over declared generators.
    fn coordinate_bracket(m: &Manifold, p: &Expr, q: &Expr) -> Expr {
        let ring = m.ring();
        let mut acc = Expr::zero(ring);
        for g in 0..ring.declared() {
            for h in 0..ring.declared() {
                let c = m.poisson().entry(g, h);
                if !c.is_zero() {
                    acc = &acc + &(&(&p.partial(g) * &q.partial(h)) * c);
                }
            }
        }
        acc
    }

    #[test]
    fn bracket_matches_coordinate_formula() {
        let g = datasets::su2_selfaction().unwrap();
        let m = g.manifold();
        let mut s = Sampler::new(4, 4);
        for _ in 0..30 {
            let (p, q) = (s.function(m), s.function(m));
            assert_eq!(m.bracket(&p, &q), coordinate_bracket(m, &p, &q), "{{{p}, {q}}}");
        }
    }

    #[test]
    fn brackets_with_an_inverse_follow_the_quotient_rule() {
        let g = datasets::su2_hopf().unwrap();
        let base = g.induce_base().unwrap();
        let m = base.manifold();
        let den = m.expr("2*x - 1").unwrap();
        let inv = den.try_inverse().unwrap();
        for gen in ["z", "zs", "x"] {
            let p = m.expr(gen).unwrap();
            let want = -&(&(&inv * &inv) * &m.bracket(&p, &den));
            assert_eq!(m.bracket(&p, &inv), want, "{{{gen}, 1/(2x-1)}}");
        }
    }

    #[test]
    fn self_bracket_entry_is_rejected() {
        let text = datasets::SU2_SELFACTION.replacen("\"a,b\"", "\"a,a\"", 1);
        let err = crate::Geometry::parse(&text).unwrap_err().to_string();
        assert!(err.contains("bracket is antisymmetric"), "{err}");
    }

    #[test]
    fn conflicting_entries_are_rejected() {
        let g = datasets::su2_selfaction().unwrap();
        let ring = g.ring();
        let e = |s: &str| g.expr(s).unwrap();
        let err = PoissonStructure::new(ring, [(0, 1, e("a*b")), (1, 0, e("a*b"))]).unwrap_err();
        assert!(err.to_string().contains("conflicting"), "{err}");
    }

    #[test]
    fn bracket_must_respect_relations() {
        let g = datasets::su2_selfaction().unwrap();
        let ring = g.ring();
        let err = PoissonStructure::new(ring, [(0, 1, g.expr("a").unwrap())]).unwrap_err();
        assert!(err.to_string().contains("bracket annihilates relations"), "{err}");
    }

    #[test]
    fn schouten_of_exact_forms_is_d_of_bracket() {
        let g = datasets::su2_selfaction().unwrap();
        let m = g.manifold();
        let mut s = Sampler::new(5, 3);
        for _ in 0..20 {
            let (p, q) = (s.function(m), s.function(m));
            assert_eq!(m.schouten(&m.d(&p), &m.d(&q)), m.d(&m.bracket(&p, &q)));
        }
    }

    #[test]
    fn connection_axioms_on_random_arguments() {
        let g = datasets::su2_selfaction().unwrap();
        let m = g.manifold();
        let mut s = Sampler::new(6, 3);
        for _ in 0..15 {
            let (f, eta, tau) = (s.function(m), s.one_form(m), s.one_form(m));
            let linear = &m.nabla(&eta.scale(&f), &tau).unwrap() - &m.nabla(&eta, &tau).unwrap().scale(&f);
            assert!(linear.is_zero());
            let lhs = m.nabla(&eta, &tau.scale(&f)).unwrap();
            let rhs = &tau.scale(&m.pi(&eta, &m.d(&f))) + &m.nabla(&eta, &tau).unwrap().scale(&f);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn pi_on_differentials_is_the_bracket() {
        let g = datasets::su2_selfaction().unwrap();
        let m = g.manifold();
        let (p, q) = (g.expr("a*c").unwrap(), g.expr("d^2 + b").unwrap());
        assert_eq!(m.pi(&m.d(&p), &m.d(&q)), m.bracket(&p, &q));
    }

    #[test]
    fn manifold_rejects_foreign_connection_ring() {
        let g = datasets::su2_selfaction().unwrap();
        let h = datasets::s1_group().unwrap();
        let err = Manifold::new(
            g.manifold().frame().clone(),
            h.manifold().poisson().clone(),
            None,
        );
        assert!(err.is_err());
    }
}
