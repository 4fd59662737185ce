use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{One, Signed, Zero};

use super::parse;
use super::ring::{add_term, eval_monomial, Monomial, Ring, Strategy, Terms};
use super::Rational;
use crate::error::{Error, Result};

/// Element of a [`Ring`], always held in normal form.
#[derive(Clone)]
pub struct Expr {
    ring: Arc<Ring>,
    terms: Terms,
}

impl Expr {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        Expr {
            ring: ring.clone(),
            terms: Terms::new(),
        }
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Self::constant(ring, Rational::one())
    }

    pub fn constant(ring: &Arc<Ring>, c: Rational) -> Self {
        let mut terms = Terms::new();
        add_term(&mut terms, Monomial::one(ring.len()), c);
        Expr {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn integer(ring: &Arc<Ring>, n: i64) -> Self {
        Self::constant(ring, Rational::from_integer(n.into()))
    }

    pub fn generator(ring: &Arc<Ring>, g: usize) -> Self {
        Self::monomial(ring, Monomial::generator(ring.len(), g), Rational::one())
    }

    pub fn var(ring: &Arc<Ring>, name: &str) -> Result<Self> {
        let g = ring
            .index(name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        Ok(Self::generator(ring, g))
    }

    /// A single term, normalized.
    pub fn monomial(ring: &Arc<Ring>, m: Monomial, c: Rational) -> Self {
        let mut terms = Terms::new();
        add_term(&mut terms, m, c);
        Self::from_raw(ring, terms)
    }

    pub fn parse(ring: &Arc<Ring>, src: &str) -> Result<Self> {
        parse::parse_expr(ring, src)
    }

    /// Normalizes arbitrary terms.
    ///
    /// # Panics
    /// If the ring was built with `allow_unordered_rules` and rewriting does
    /// not terminate within the step bound. Use [`normalize`] for a fallible
    /// variant.
    pub fn from_terms<I>(ring: &Arc<Ring>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut raw = Terms::new();
        for (m, c) in terms {
            add_term(&mut raw, m, c);
        }
        Self::from_raw(ring, raw)
    }

    pub(crate) fn from_raw(ring: &Arc<Ring>, raw: Terms) -> Self {
        match ring.reduce(raw, Strategy::Leading) {
            Ok(terms) => Expr {
                ring: ring.clone(),
                terms,
            },
            Err(e) => panic!("{e}"),
        }
    }

    /// Wraps terms already known to be in normal form.
    pub(crate) fn from_normal(ring: &Arc<Ring>, terms: Terms) -> Self {
        Expr {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn single_term(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Coefficient of a monomial in the normal form.
    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Highest total degree among the terms, `None` for zero.
    pub fn degree(&self) -> Option<i32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn mentions(&self, g: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(g) != 0)
    }

    fn same_ring(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring
    }

    pub fn checked_add(&self, other: &Expr) -> Result<Expr> {
        if !self.same_ring(other) {
            return Err(Error::RingMismatch);
        }
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        Ok(Expr::from_normal(&self.ring, terms))
    }

    pub fn checked_sub(&self, other: &Expr) -> Result<Expr> {
        if !self.same_ring(other) {
            return Err(Error::RingMismatch);
        }
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), -c.clone());
        }
        Ok(Expr::from_normal(&self.ring, terms))
    }

    pub fn checked_mul(&self, other: &Expr) -> Result<Expr> {
        if !self.same_ring(other) {
            return Err(Error::RingMismatch);
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Expr::zero(&self.ring));
        }
        let mut raw = Terms::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                add_term(&mut raw, m1.mul(m2), c1 * c2);
            }
        }
        Ok(Expr::from_raw(&self.ring, raw))
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero(&self.ring);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, k)| (m.clone(), k * c))
            .collect();
        Expr::from_normal(&self.ring, terms)
    }

    pub fn scale_int(&self, n: i64) -> Expr {
        self.scale(&Rational::from_integer(n.into()))
    }

    pub fn pow(&self, n: u32) -> Expr {
        let mut acc = Expr::one(&self.ring);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse when it exists in the ring: non-zero constants,
    /// monomials in Laurent and localization generators, and rational
    /// multiples of a declared denominator.
    pub fn try_inverse(&self) -> Result<Expr> {
        if self.is_zero() {
            return Err(Error::NotInvertible("0".into()));
        }
        if let Some((m, c)) = self.single_term() {
            let invertible = m.exponents().iter().enumerate().all(|(g, &e)| {
                e == 0 || self.ring.is_laurent(g) || self.ring.localization_of(g).is_some()
            });
            if invertible {
                let mut out = Expr::constant(&self.ring, c.recip());
                let mut plain = vec![0; self.ring.len()];
                for (g, &e) in m.exponents().iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    match self.ring.localization_of(g) {
                        Some(d) if !self.ring.is_laurent(g) => {
                            let den = Expr::from_terms(&self.ring, d.terms.iter().cloned());
                            if e > 0 {
                                out = &out * &den.pow(e as u32);
                            } else {
                                plain[g] = -e;
                            }
                        }
                        _ => plain[g] = -e,
                    }
                }
                return Ok(&out
                    * &Expr::monomial(&self.ring, Monomial::from_exponents(plain), Rational::one()));
            }
        }
        for d in self.ring.denominators() {
            if let Some(lambda) = self.ratio_to(&d.terms) {
                let u = Expr::generator(&self.ring, d.generator);
                return Ok(u.scale(&lambda.recip()));
            }
        }
        Err(Error::NotInvertible(self.to_string()))
    }

    /// `Some(λ)` when `self = λ·other` for the given term list.
    fn ratio_to(&self, other: &[(Monomial, Rational)]) -> Option<Rational> {
        if other.len() != self.terms.len() {
            return None;
        }
        let mut lambda: Option<Rational> = None;
        for (m, c) in other {
            let mine = self.terms.get(m)?;
            let r = mine / c;
            match &lambda {
                None => lambda = Some(r),
                Some(l) if *l == r => {}
                Some(_) => return None,
            }
        }
        lambda
    }

    /// Formal partial derivative of the normal-form representative.
    pub fn partial(&self, g: usize) -> Expr {
        let mut terms = Terms::new();
        for (m, c) in &self.terms {
            let e = m.exponent(g);
            if e != 0 {
                add_term(
                    &mut terms,
                    m.with_exponent(g, e - 1),
                    c * Rational::from_integer(e.into()),
                );
            }
        }
        // Lowering an exponent never creates a reducible monomial.
        Expr::from_normal(&self.ring, terms)
    }

    /// Evaluation at a point given for every generator.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        let mut v = Rational::zero();
        for (m, c) in &self.terms {
            v += c * eval_monomial(m, point)?;
        }
        Ok(v)
    }

    /// Evaluation at the ring's distinguished point.
    pub fn eval_at_point(&self) -> Result<Rational> {
        let point = self
            .ring
            .point()
            .ok_or_else(|| Error::Missing("identity point for every generator".into()))?;
        self.eval(&point)
    }

    /// Ring homomorphism sending generator `g` to `images[g]`.
    pub fn substitute(&self, target: &Arc<Ring>, images: &[Expr]) -> Result<Expr> {
        let mut out = Expr::zero(target);
        let mut cache: BTreeMap<(usize, i32), Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut t = Expr::constant(target, c.clone());
            for (g, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let f = match cache.get(&(g, e)) {
                    Some(f) => f.clone(),
                    None => {
                        let base = if e < 0 {
                            images[g].try_inverse()?
                        } else {
                            images[g].clone()
                        };
                        let f = base.pow(e.unsigned_abs());
                        cache.insert((g, e), f.clone());
                        f
                    }
                };
                t = t.checked_mul(&f)?;
            }
            out = out.checked_add(&t)?;
        }
        Ok(out)
    }

    /// Same terms read in a structurally identical ring.
    pub fn transport(&self, target: &Arc<Ring>) -> Result<Expr> {
        if *self.ring != **target {
            return Err(Error::RingMismatch);
        }
        Ok(Expr::from_normal(target, self.terms.clone()))
    }

    fn sorted_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.grlex_cmp(a.0));
        v
    }
}

/// Fallible normalization of raw terms with an explicit strategy.
pub fn normalize<I>(ring: &Arc<Ring>, terms: I, strategy: Strategy) -> Result<Expr>
where
    I: IntoIterator<Item = (Monomial, Rational)>,
{
    let mut raw = Terms::new();
    for (m, c) in terms {
        add_term(&mut raw, m, c);
    }
    let terms = ring.reduce(raw, strategy)?;
    Ok(Expr::from_normal(ring, terms))
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.same_ring(other) && self.terms == other.terms
    }
}

impl Eq for Expr {}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&self.ring.format_monomial(m))?;
            } else {
                write!(f, "{abs}*{}", self.ring.format_monomial(m))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                self.$checked(rhs).expect("operands from the same ring")
            }
        }
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                (&self).$method(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), -c.clone()))
            .collect();
        Expr::from_normal(&self.ring, terms)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

/// Total order on expressions of one ring, used for deterministic output.
pub fn expr_cmp(a: &Expr, b: &Expr) -> Ordering {
    a.terms.iter().cmp(b.terms.iter())
}
