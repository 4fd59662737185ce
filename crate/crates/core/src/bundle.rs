//! Poisson principal bundles: vertical and horizontal forms, the
//! transversality condition, and induction of the Poisson structure and
//! contravariant connection on the base.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::Zero;

use crate::action::Action;
use crate::calculus::{bivector_interior, wedge, Frame, OneForm, TwoForm, VectorField};
use crate::error::{Error, Result};
use crate::liebialg::{LieBialgebra, Xi};
use crate::poisson::{Connection, Manifold, PoissonStructure};
use crate::symkernel::linsolve::SparseSystem;
use crate::symkernel::{rat, Expr, Monomial, Rational, Ring};

/// Subalgebra of invariant functions presenting the base.
#[derive(Clone, Debug)]
pub struct BaseSpec {
    pub names: Vec<String>,
    /// Expression of each base generator on the total space.
    pub images: Vec<Expr>,
    pub relations: Vec<(String, String)>,
    /// `(name, expression)` of each denominator localized on the base.
    pub denominators: Vec<(Option<String>, String)>,
    /// Largest total degree of base monomials tried in the solves.
    pub degree_bound: usize,
}

/// Total space, structure group data and the fundamental vector fields.
#[derive(Clone, Copy, Debug)]
pub struct Bundle<'a> {
    total: &'a Manifold,
    fibre: &'a LieBialgebra,
    xi: &'a Xi,
    action: &'a Action,
}

impl<'a> Bundle<'a> {
    pub fn new(total: &'a Manifold, fibre: &'a LieBialgebra, xi: &'a Xi, action: &'a Action) -> Result<Self> {
        if action.basis() != fibre.names() {
            return Err(Error::Spec("action basis differs from the fibre basis".into()));
        }
        if xi.dim() != fibre.dim() {
            return Err(Error::Spec("xi_star dimension differs from the fibre".into()));
        }
        Ok(Bundle {
            total,
            fibre,
            xi,
            action,
        })
    }

    pub fn total(&self) -> &'a Manifold {
        self.total
    }

    pub fn fibre(&self) -> &'a LieBialgebra {
        self.fibre
    }

    pub fn xi(&self) -> &'a Xi {
        self.xi
    }

    pub fn action(&self) -> &'a Action {
        self.action
    }

    /// `i_ξ̃(η)` for each fibre basis element.
    pub fn ver(&self, eta: &OneForm) -> Vec<Expr> {
        self.action.fields().iter().map(|f| f.interior(eta)).collect()
    }

    /// First fibre basis element with a non-zero vertical component.
    pub fn horizontal_witness(&self, eta: &OneForm) -> Option<(usize, Expr)> {
        self.ver(eta).into_iter().enumerate().find(|(_, v)| !v.is_zero())
    }

    pub fn is_horizontal(&self, eta: &OneForm) -> bool {
        self.horizontal_witness(eta).is_none()
    }

    pub fn require_horizontal(&self, what: impl Into<String>, eta: &OneForm) -> Result<()> {
        match self.horizontal_witness(eta) {
            None => Ok(()),
            Some((a, w)) => Err(Error::NotHorizontal {
                what: what.into(),
                basis: self.fibre.names()[a].clone(),
                witness: w.to_string(),
            }),
        }
    }

    /// Annihilated by every fundamental field.
    pub fn is_basic(&self, p: &Expr) -> bool {
        self.action.fields().iter().all(|f| f.apply(p).is_zero())
    }

    /// `i_ξ̃(∇̂_ητ) − Σ i_{Ξ*¹ξ}(η) i_{Ξ*²ξ}(τ) − π(η, d i_ξ̃τ)`.
    pub fn transversality_defect(&self, xi: usize, eta: &OneForm, tau: &OneForm) -> Result<Expr> {
        let fields = self.action.fields();
        let m = self.total;
        let mut acc = fields[xi].interior(&m.nabla(eta, tau)?);
        for (k, l, c) in self.xi.star_terms(xi) {
            let t = &fields[k].interior(eta) * &fields[l].interior(tau);
            acc = &acc - &t.scale(&c);
        }
        let d_itau = m.d(&fields[xi].interior(tau));
        Ok(&acc - &m.pi(eta, &d_itau))
    }

    /// `i_ξ̃[η,τ] − π(η, d i_ξ̃τ) + π(τ, d i_ξ̃η) + ½ Σ i_{δ¹ξ}i_{δ²ξ}(η∧τ)`.
    pub fn cor52_check(&self, xi: usize, eta: &OneForm, tau: &OneForm) -> Expr {
        let fields = self.action.fields();
        let m = self.total;
        let v = &fields[xi];
        let mut acc = v.interior(&m.schouten(eta, tau));
        acc = &acc - &m.pi(eta, &m.d(&v.interior(tau)));
        acc = &acc + &m.pi(tau, &m.d(&v.interior(eta)));
        let w = wedge(eta, tau);
        let half = rat(1, 2);
        for (j, k, c) in self.fibre.cobracket_terms(xi) {
            let t = bivector_interior(&fields[j], &fields[k], &w);
            acc = &acc + &t.scale(&(&c * &half));
        }
        acc
    }

    fn require_invariant_form(&self, what: &str, eta: &OneForm) -> Result<()> {
        let frame = self.total.frame();
        for (a, f) in self.action.fields().iter().enumerate() {
            let l = frame.lie_derivative(f, eta);
            if !l.is_zero() {
                return Err(Error::invariant(
                    "connection output is invariant",
                    what.to_string(),
                    format!(
                        "Lie derivative along {} is {}",
                        self.fibre.names()[a],
                        l.display_with(frame.names())
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Poisson structure and contravariant connection on the base, read off
    /// the invariant, horizontal values upstairs.
    pub fn induce_base(&self, spec: &BaseSpec) -> Result<InducedBase> {
        let total_ring = self.total.ring();
        if spec.names.len() != spec.images.len() || spec.names.is_empty() {
            return Err(Error::Spec("base generators need one expression each".into()));
        }
        for (name, img) in spec.names.iter().zip(&spec.images) {
            if !Arc::ptr_eq(img.ring(), total_ring) && **img.ring() != **total_ring {
                return Err(Error::RingMismatch);
            }
            if !self.is_basic(img) {
                return Err(Error::NotBasic(format!("{name} = {img}")));
            }
        }

        let mut builder = Ring::builder().generators(spec.names.iter().cloned());
        for (lhs, rhs) in &spec.relations {
            builder = builder.relation(lhs.clone(), rhs.clone());
        }
        for (name, expr) in &spec.denominators {
            builder = builder.denominator(name.clone(), expr.clone());
        }
        let ring = builder.build()?;

        let free = Ring::builder().generators(spec.names.iter().cloned()).build()?;
        for (lhs, rhs) in &spec.relations {
            let up = Expr::parse(&free, &format!("({lhs}) - ({rhs})"))?.substitute(total_ring, &spec.images)?;
            if !up.is_zero() {
                return Err(Error::invariant(
                    "base relations hold on the total space",
                    format!("{lhs} = {rhs}"),
                    format!("difference is {up}"),
                ));
            }
        }

        let lift = Lifter::new(&ring, total_ring, &spec.images, spec.degree_bound)?;
        let frame = exact_frame(&ring)?;

        let nd = ring.declared();
        let mut entries = vec![];
        for g in 0..nd {
            for h in g + 1..nd {
                let up = self.total.bracket(&spec.images[g], &spec.images[h]);
                let p = lift.express(&up).ok_or_else(|| {
                    Error::NotExpressible(format!(
                        "{{{},{}}} = {up} in base monomials up to degree {}",
                        spec.names[g], spec.names[h], spec.degree_bound
                    ))
                })?;
                entries.push((g, h, p));
            }
        }
        let poisson = PoissonStructure::new(&ring, entries)?;

        let up_d: Vec<OneForm> = spec.images.iter().map(|p| self.total.d(p)).collect();
        let frame_gens: Vec<usize> = (0..frame.dim())
            .map(|i| frame.in_differentials(i).iter().position(|c| !c.is_zero()).expect("unit row"))
            .collect();
        let mut table = vec![];
        for g in 0..nd {
            let mut row = vec![];
            for &f in &frame_gens {
                let what = format!("∇̂_d{} d{}", spec.names[g], spec.names[f]);
                let up = self.total.nabla(&up_d[g], &up_d[f])?;
                self.require_horizontal(what.clone(), &up)?;
                self.require_invariant_form(&what, &up)?;
                let coeffs = lift.express_form(&up, &up_d).ok_or_else(|| {
                    Error::NotExpressible(format!(
                        "{what} in the span of base differentials up to degree {}",
                        spec.degree_bound
                    ))
                })?;
                row.push(frame.from_differentials(&coeffs));
            }
            table.push(row);
        }
        let connection = Connection::new(&frame, table)?;
        let manifold = Manifold::new(frame, poisson, Some(connection))?;
        Ok(InducedBase {
            manifold,
            spec: spec.clone(),
            lift,
            up_d,
        })
    }
}

/// Base manifold together with its embedding data.
#[derive(Clone, Debug)]
pub struct InducedBase {
    manifold: Manifold,
    spec: BaseSpec,
    lift: Lifter,
    up_d: Vec<OneForm>,
}

impl InducedBase {
    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn spec(&self) -> &BaseSpec {
        &self.spec
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.manifold.ring()
    }

    /// Image of a polynomial base function on the total space.
    pub fn lift(&self, p: &Expr) -> Result<Expr> {
        self.lift.lift(p)
    }

    /// Base 1-form `Σ P_g d(g)` from coefficients on base differentials.
    pub fn form(&self, coeffs: &[Expr]) -> OneForm {
        self.manifold.frame().from_differentials(coeffs)
    }

    /// Image of `Σ P_g d(g)` on the total space.
    pub fn lift_form(&self, coeffs: &[Expr]) -> Result<OneForm> {
        let frame = self.up_d[0].coords().len();
        let ring = self.up_d[0].ring().clone();
        let mut acc = OneForm::zero(&ring, frame);
        for (p, d) in coeffs.iter().zip(&self.up_d) {
            acc = &acc + &d.scale(&self.lift(p)?);
        }
        Ok(acc)
    }

    /// Pushes the fields of an action on the total space down to the base.
    /// The action's ring must equal the total space ring.
    pub fn descend_action(&self, total: &Manifold, source: &Action) -> Result<Action> {
        let frame = self.manifold.frame();
        let nd = self.ring().declared();
        let mut fields = vec![];
        let mut form_action = vec![];
        for (a, field) in source.fields().iter().enumerate() {
            let vals = (0..nd)
                .map(|g| {
                    let img = self.spec.images[g].transport(field.derivation().ring())?;
                    let up = field.apply(&img).transport(total.ring())?;
                    self.lift.express(&up).ok_or_else(|| {
                        Error::NotExpressible(format!(
                            "{}{}{} = {up} in base monomials",
                            self.spec.names[g],
                            source.chirality().symbol(),
                            source.basis()[a]
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let f: VectorField = frame.field(vals)?;
            let row = (0..frame.dim())
                .map(|i| {
                    let g = frame.in_differentials(i).iter().position(|c| !c.is_zero()).expect("unit row");
                    frame.differential(f.derivation().image(g))
                })
                .collect();
            fields.push(f);
            form_action.push(row);
        }
        Action::new(
            &self.manifold,
            source.chirality(),
            source.basis().to_vec(),
            fields,
            Some(form_action),
        )
    }
}

/// Frame of base differentials over the localized ring. For each relation a
/// generator whose partial derivative is invertible is eliminated.
fn exact_frame(ring: &Arc<Ring>) -> Result<Frame> {
    let nd = ring.declared();
    // rows[g][k]: coefficient of d(g_k) in d(g) before elimination.
    let mut rows: Vec<Vec<Expr>> = (0..nd)
        .map(|g| (0..nd).map(|k| if k == g { Expr::one(ring) } else { Expr::zero(ring) }).collect())
        .collect();
    let mut eliminated = vec![false; nd];
    for rule in ring.rules() {
        if (nd..ring.len()).any(|u| rule.lhs().exponent(u) != 0) {
            continue;
        }
        // Partial derivatives of the raw relation, each normalized.
        let partial = |k: usize| {
            Expr::from_terms(
                ring,
                rule.relation_terms()
                    .into_iter()
                    .filter(|(m, _)| m.exponent(k) != 0)
                    .map(|(m, c)| {
                        let e = m.exponent(k);
                        (m.with_exponent(k, e - 1), c * Rational::from_integer(e.into()))
                    }),
            )
        };
        let pick = (0..nd)
            .rev()
            .filter(|&g| !eliminated[g])
            .find_map(|g| {
                let p = partial(g);
                if p.is_zero() {
                    return None;
                }
                p.try_inverse().ok().map(|inv| (g, inv))
            });
        let Some((g, inv)) = pick else {
            return Err(Error::Spec(format!(
                "relation `{}` has no generator with an invertible partial derivative; declare it as a denominator",
                rule.label()
            )));
        };
        eliminated[g] = true;
        rows[g] = (0..nd)
            .map(|k| if k == g { Expr::zero(ring) } else { -&(&partial(k) * &inv) })
            .collect();
    }
    // Substitute eliminated differentials until only frame generators remain.
    for _ in 0..=nd {
        let mut changed = false;
        for g in 0..nd {
            for k in 0..nd {
                if k != g && eliminated[k] && !rows[g][k].is_zero() && eliminated[g] {
                    let c = rows[g][k].clone();
                    let sub = rows[k].clone();
                    rows[g][k] = Expr::zero(ring);
                    for (j, s) in sub.iter().enumerate() {
                        rows[g][j] = &rows[g][j] + &(&c * s);
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let frame_gens: Vec<usize> = (0..nd).filter(|&g| !eliminated[g]).collect();
    let n = frame_gens.len();
    if n == 0 {
        return Err(Error::Spec("base relations eliminate every generator".into()));
    }
    let mut differential = vec![];
    for g in 0..nd {
        if rows[g].iter().enumerate().any(|(k, c)| eliminated[k] && !c.is_zero()) {
            return Err(Error::Spec(format!(
                "could not express d{} in the remaining base differentials",
                ring.name(g)
            )));
        }
        differential.push(OneForm::from_coords(frame_gens.iter().map(|&k| rows[g][k].clone()).collect()));
    }
    let names: Vec<String> = frame_gens.iter().map(|&g| format!("d{}", ring.name(g))).collect();
    let in_diff: Vec<Vec<Expr>> = frame_gens
        .iter()
        .map(|&f| (0..nd).map(|k| if k == f { Expr::one(ring) } else { Expr::zero(ring) }).collect())
        .collect();
    let d2 = vec![TwoForm::zero(ring, n); n];
    Frame::new(ring, names, differential, in_diff, Some(d2))
}

/// Exact solves expressing total-space data in base monomials.
#[derive(Clone, Debug)]
struct Lifter {
    base: Arc<Ring>,
    total: Arc<Ring>,
    images: Vec<Expr>,
    monomials: Vec<Monomial>,
    lifted: Vec<Expr>,
}

impl Lifter {
    fn new(base: &Arc<Ring>, total: &Arc<Ring>, images: &[Expr], bound: usize) -> Result<Self> {
        let monomials = normal_monomials(base, bound);
        let mut lifter = Lifter {
            base: base.clone(),
            total: total.clone(),
            images: images.to_vec(),
            monomials: vec![],
            lifted: vec![],
        };
        let lifted = monomials
            .iter()
            .map(|m| lifter.lift(&Expr::monomial(base, m.clone(), Rational::from_integer(1.into()))))
            .collect::<Result<Vec<_>>>()?;
        lifter.monomials = monomials;
        lifter.lifted = lifted;
        Ok(lifter)
    }

    fn lift(&self, p: &Expr) -> Result<Expr> {
        let nd = self.base.declared();
        for g in nd..self.base.len() {
            if p.mentions(g) {
                return Err(Error::NotExpressible(format!("{p} involves a localized denominator")));
            }
        }
        let mut images = self.images.clone();
        images.resize(self.base.len(), Expr::zero(&self.total));
        p.substitute(&self.total, &images)
    }

    fn combine(&self, x: &[Rational]) -> Expr {
        Expr::from_terms(
            &self.base,
            self.monomials
                .iter()
                .zip(x)
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// Base polynomial mapping to `target`.
    fn express(&self, target: &Expr) -> Option<Expr> {
        let mut rows: BTreeMap<&Monomial, BTreeMap<usize, Rational>> = BTreeMap::new();
        for (col, img) in self.lifted.iter().enumerate() {
            for (m, c) in img.terms() {
                rows.entry(m).or_default().insert(col, c.clone());
            }
        }
        let mut sys = SparseSystem::new();
        for (m, row) in &rows {
            sys.push(row.clone(), target.coefficient(m));
        }
        for (m, c) in target.terms() {
            if !rows.contains_key(m) {
                sys.push(BTreeMap::new(), c.clone());
            }
        }
        sys.solve(self.monomials.len()).map(|x| self.combine(&x))
    }

    /// Base coefficients `P_g` with `target = Σ lift(P_g)·diffs[g]`.
    fn express_form(&self, target: &OneForm, diffs: &[OneForm]) -> Option<Vec<Expr>> {
        let nm = self.monomials.len();
        let mut rows: BTreeMap<(usize, Monomial), BTreeMap<usize, Rational>> = BTreeMap::new();
        for (g, dg) in diffs.iter().enumerate() {
            for (col, img) in self.lifted.iter().enumerate() {
                for (i, coord) in dg.coords().iter().enumerate() {
                    if coord.is_zero() {
                        continue;
                    }
                    let prod = img * coord;
                    for (m, c) in prod.terms() {
                        let e = rows.entry((i, m.clone())).or_default().entry(g * nm + col).or_insert_with(Rational::zero);
                        *e += c;
                    }
                }
            }
        }
        let mut sys = SparseSystem::new();
        for ((i, m), row) in &rows {
            sys.push(row.clone(), target.coord(*i).coefficient(m));
        }
        for (i, coord) in target.coords().iter().enumerate() {
            for (m, c) in coord.terms() {
                if !rows.contains_key(&(i, m.clone())) {
                    sys.push(BTreeMap::new(), c.clone());
                }
            }
        }
        let x = sys.solve(nm * diffs.len())?;
        Some((0..diffs.len()).map(|g| self.combine(&x[g * nm..(g + 1) * nm])).collect())
    }
}

/// Monomials in the declared generators of total degree at most `bound`
/// that no rewrite rule applies to.
pub fn normal_monomials(ring: &Arc<Ring>, bound: usize) -> Vec<Monomial> {
    let mut out = vec![];
    let mut exps = vec![0i32; ring.len()];
    fn rec(ring: &Ring, g: usize, left: i32, exps: &mut Vec<i32>, out: &mut Vec<Monomial>) {
        if g == ring.declared() {
            let m = Monomial::from_exponents(exps.clone());
            if !ring.rules().iter().any(|r| r.lhs().divides(&m)) {
                out.push(m);
            }
            return;
        }
        for e in 0..=left {
            exps[g] = e;
            rec(ring, g + 1, left - e, exps, out);
        }
        exps[g] = 0;
    }
    rec(ring, 0, bound as i32, &mut exps, &mut out);
    out.sort_by(|a, b| a.grlex_cmp(b));
    out
}
