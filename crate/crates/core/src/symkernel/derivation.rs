use std::sync::Arc;

use super::expr::Expr;
use super::ring::{Ring, Terms};
use crate::error::{Error, Result};

/// Values that can absorb `Σ ∂_g(p) · image(g)`: scalars, 1-forms.
pub trait ExprModule: Clone {
    fn add_assign_scaled(&mut self, coeff: &Expr, other: &Self);
}

impl ExprModule for Expr {
    fn add_assign_scaled(&mut self, coeff: &Expr, other: &Self) {
        *self = &*self + &(coeff * other);
    }
}

/// `Σ_g ∂_g(terms) · images[g]` over the generators covered by `images`.
pub(crate) fn leibniz_terms<T: ExprModule>(
    ring: &Arc<Ring>,
    terms: &Terms,
    images: &[T],
    zero: T,
) -> T {
    let raw = Expr::from_normal(ring, terms.clone());
    let mut acc = zero;
    for (g, img) in images.iter().enumerate() {
        if !raw.mentions(g) {
            continue;
        }
        // The partial of a raw relation may be reducible; normalize it.
        let p = Expr::from_terms(ring, raw.partial(g).terms().map(|(m, c)| (m.clone(), c.clone())));
        if !p.is_zero() {
            acc.add_assign_scaled(&p, img);
        }
    }
    acc
}

/// Leibniz extension of generator images to an arbitrary element.
pub fn leibniz<T: ExprModule>(e: &Expr, images: &[T], zero: T) -> T {
    let mut acc = zero;
    for (g, img) in images.iter().enumerate() {
        if !e.mentions(g) {
            continue;
        }
        acc.add_assign_scaled(&e.partial(g), img);
    }
    acc
}

/// Extends images given on the declared generators to the localization
/// generators: `u ↦ −u²·D(den)`.
pub fn extend_to_localizations<T: ExprModule>(
    ring: &Arc<Ring>,
    declared: Vec<T>,
    zero: &T,
) -> Vec<T> {
    let mut all = declared;
    for d in ring.denominators() {
        let den = Expr::from_terms(ring, d.terms.iter().cloned());
        let dden = leibniz(&den, &all[..ring.declared()], zero.clone());
        let u = Expr::generator(ring, d.generator());
        let factor = -(&u * &u);
        let mut img = zero.clone();
        img.add_assign_scaled(&factor, &dden);
        all.push(img);
    }
    all
}

/// A derivation of the ring given by its values on generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivation {
    ring: Arc<Ring>,
    images: Vec<Expr>,
}

impl Derivation {
    /// `declared` assigns a value to every declared generator; values on
    /// localization generators follow. Fails if a relation is not annihilated.
    pub fn new(ring: &Arc<Ring>, declared: Vec<Expr>) -> Result<Self> {
        if declared.len() != ring.declared() {
            return Err(Error::Missing(format!(
                "derivation needs {} generator values, got {}",
                ring.declared(),
                declared.len()
            )));
        }
        let zero = Expr::zero(ring);
        let images = extend_to_localizations(ring, declared, &zero);
        let d = Derivation {
            ring: ring.clone(),
            images,
        };
        for rule in ring.rules() {
            let v = leibniz_terms(ring, &rule.relation_terms(), &d.images, zero.clone());
            if !v.is_zero() {
                return Err(Error::invariant(
                    "derivation respects relations",
                    rule.label().to_string(),
                    format!("derivation of the relation gives {v}"),
                ));
            }
        }
        Ok(d)
    }

    /// Looks up every declared generator in a name-keyed table.
    pub fn from_table<'a, I>(ring: &Arc<Ring>, table: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, Expr)>,
    {
        let mut vals: Vec<Option<Expr>> = vec![None; ring.declared()];
        for (name, v) in table {
            let g = ring
                .index(name)
                .filter(|&g| g < ring.declared())
                .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
            vals[g] = Some(v);
        }
        let vals = vals
            .into_iter()
            .enumerate()
            .map(|(g, v)| v.ok_or_else(|| Error::Missing(format!("value on `{}`", ring.name(g)))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ring, vals)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn image(&self, g: usize) -> &Expr {
        &self.images[g]
    }

    pub fn images(&self) -> &[Expr] {
        &self.images
    }

    pub fn apply(&self, e: &Expr) -> Expr {
        leibniz(e, &self.images, Expr::zero(&self.ring))
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Expr::is_zero)
    }

    /// Sum of two derivations scaled by constants.
    pub fn combine(&self, a: &super::Rational, other: &Derivation, b: &super::Rational) -> Derivation {
        Derivation {
            ring: self.ring.clone(),
            images: self
                .images
                .iter()
                .zip(&other.images)
                .map(|(x, y)| &x.scale(a) + &y.scale(b))
                .collect(),
        }
    }
}
