use std::cmp::Ordering;
use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::expr::Expr;
use super::parse;
use super::Rational;
use crate::error::{Error, Result};

pub(crate) type Terms = BTreeMap<Monomial, Rational>;

pub const DEFAULT_STEP_BOUND: usize = 200_000;

/// Exponent vector over all generators of a ring, localization generators last.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<i32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn from_exponents(exps: Vec<i32>) -> Self {
        Monomial(exps)
    }

    pub fn generator(n: usize, g: usize) -> Self {
        let mut e = vec![0; n];
        e[g] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }

    pub fn exponent(&self, g: usize) -> i32 {
        self.0[g]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn degree(&self) -> i32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|e| -e).collect())
    }

    /// `self` divides `m` in the sense used by rewrite rules: every positive
    /// exponent of `self` is at most the matching exponent of `m`.
    pub fn divides(&self, m: &Monomial) -> bool {
        self.0.iter().zip(&m.0).all(|(&l, &e)| l <= 0 || e >= l)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub(crate) fn with_exponent(&self, g: usize, e: i32) -> Monomial {
        let mut v = self.0.clone();
        v[g] = e;
        Monomial(v)
    }

    /// Graded lexicographic order: total degree first, then exponents from the
    /// first generator.
    pub fn grlex_cmp(&self, other: &Monomial) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Oriented rewrite rule `lhs -> rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub(crate) lhs: Monomial,
    pub(crate) rhs: Vec<(Monomial, Rational)>,
    pub(crate) label: String,
}

impl Rule {
    pub fn lhs(&self) -> &Monomial {
        &self.lhs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `lhs - rhs` as a raw, unreduced term map.
    pub(crate) fn relation_terms(&self) -> Terms {
        let mut t = Terms::new();
        t.insert(self.lhs.clone(), Rational::one());
        for (m, c) in &self.rhs {
            add_term(&mut t, m.clone(), -c.clone());
        }
        t
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Denominator {
    pub(crate) name: String,
    pub(crate) source: String,
    pub(crate) terms: Vec<(Monomial, Rational)>,
    pub(crate) generator: usize,
}

impl Denominator {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// The denominator as written in the ring definition.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn generator(&self) -> usize {
        self.generator
    }
}

/// Order in which the normalizer picks reducible terms and rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Largest term first, first matching rule.
    Leading,
    /// Smallest term first, last matching rule.
    Trailing,
    /// Pseudo-random term and rule choice.
    Shuffled(u64),
}

/// Commutative ring presented by named generators, oriented rewrite rules and
/// a localization set. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ring {
    names: Vec<String>,
    laurent: Vec<bool>,
    declared: usize,
    rules: Vec<Rule>,
    denominators: Vec<Denominator>,
    point: Vec<Option<Rational>>,
    step_bound: usize,
}

impl Ring {
    pub fn builder() -> RingBuilder {
        RingBuilder::default()
    }

    /// Number of generators including localization generators.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Generators named in the ring definition, excluding localization generators.
    pub fn declared(&self) -> usize {
        self.declared
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_laurent(&self, g: usize) -> bool {
        self.laurent[g]
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn denominators(&self) -> &[Denominator] {
        &self.denominators
    }

    pub fn step_bound(&self) -> usize {
        self.step_bound
    }

    /// Value of each generator at the distinguished point, if one was declared.
    pub fn point(&self) -> Option<Vec<Rational>> {
        self.point.iter().cloned().collect()
    }

    pub fn has_point(&self) -> bool {
        self.point.iter().all(Option::is_some)
    }

    pub(crate) fn localization_of(&self, g: usize) -> Option<&Denominator> {
        self.denominators.iter().find(|d| d.generator == g)
    }

    /// Exhaustive rewriting of a raw term map.
    pub(crate) fn reduce(&self, input: Terms, strategy: Strategy) -> Result<Terms> {
        if self.rules.is_empty() {
            return Ok(input);
        }
        let mut rng = match strategy {
            Strategy::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        let mut work = input;
        let mut done = Terms::new();
        let mut steps = 0usize;
        let mut chain: VecDeque<usize> = VecDeque::new();
        let mut matches = Vec::new();
        while !work.is_empty() {
            let key = match strategy {
                Strategy::Leading => work.keys().next_back().cloned(),
                Strategy::Trailing => work.keys().next().cloned(),
                Strategy::Shuffled(_) => {
                    let i = rng.as_mut().map_or(0, |r| r.gen_range(0..work.len()));
                    work.keys().nth(i).cloned()
                }
            }
            .expect("work list is non-empty");
            let coeff = work.remove(&key).expect("key taken from the map");
            matches.clear();
            matches.extend(
                self.rules
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| r.lhs.divides(&key))
                    .map(|(i, _)| i),
            );
            let chosen = match strategy {
                Strategy::Leading => matches.first().copied(),
                Strategy::Trailing => matches.last().copied(),
                Strategy::Shuffled(_) => match rng.as_mut() {
                    Some(r) => matches.choose(r).copied(),
                    None => matches.first().copied(),
                },
            };
            match chosen {
                None => add_term(&mut done, key, coeff),
                Some(ri) => {
                    steps += 1;
                    chain.push_back(ri);
                    if chain.len() > 8 {
                        chain.pop_front();
                    }
                    if steps > self.step_bound {
                        let chain = chain
                            .iter()
                            .map(|&i| self.rules[i].label.as_str())
                            .collect::<Vec<_>>()
                            .join(", ");
                        return Err(Error::StepBound {
                            bound: self.step_bound,
                            chain,
                        });
                    }
                    let rule = &self.rules[ri];
                    let quotient = key.div(&rule.lhs);
                    for (m, c) in &rule.rhs {
                        add_term(&mut work, quotient.mul(m), &coeff * c);
                    }
                }
            }
        }
        Ok(done)
    }

    pub(crate) fn format_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (g, &e) in m.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.names[g].clone()),
                _ => parts.push(format!("{}^{}", self.names[g], e)),
            }
        }
        parts.join("*")
    }
}

pub(crate) fn add_term(terms: &mut Terms, m: Monomial, c: Rational) {
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Incremental construction of a [`Ring`] from textual relations.
#[derive(Clone, Debug, Default)]
pub struct RingBuilder {
    names: Vec<String>,
    laurent: Vec<String>,
    relations: Vec<(String, String)>,
    denominators: Vec<(Option<String>, String)>,
    point: Vec<(String, Rational)>,
    step_bound: Option<usize>,
    unordered: bool,
}

impl RingBuilder {
    pub fn generator(mut self, name: impl Into<String>) -> Self {
        self.names.push(name.into());
        self
    }

    pub fn generators<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.names.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn laurent(mut self, name: impl Into<String>) -> Self {
        self.laurent.push(name.into());
        self
    }

    pub fn relation(mut self, lhs: impl Into<String>, rhs: impl Into<String>) -> Self {
        self.relations.push((lhs.into(), rhs.into()));
        self
    }

    pub fn denominator(mut self, name: Option<String>, expr: impl Into<String>) -> Self {
        self.denominators.push((name, expr.into()));
        self
    }

    pub fn point(mut self, name: impl Into<String>, value: Rational) -> Self {
        self.point.push((name.into(), value));
        self
    }

    pub fn step_bound(mut self, bound: usize) -> Self {
        self.step_bound = Some(bound);
        self
    }

    /// Skip the check that every rule decreases in graded order. Rewriting may
    /// then fail to terminate and is cut off by the step bound.
    pub fn allow_unordered_rules(mut self) -> Self {
        self.unordered = true;
        self
    }

    pub fn build(self) -> Result<Arc<Ring>> {
        let n = self.names.len();
        for (i, name) in self.names.iter().enumerate() {
            if !parse::is_identifier(name) {
                return Err(Error::InvalidRing(format!("`{name}` is not a valid generator name")));
            }
            if self.names[..i].contains(name) {
                return Err(Error::InvalidRing(format!("generator `{name}` declared twice")));
            }
        }
        let mut laurent = vec![false; n];
        for l in &self.laurent {
            let g = self
                .names
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| Error::UnknownGenerator(l.clone()))?;
            laurent[g] = true;
        }
        let step_bound = self.step_bound.unwrap_or(DEFAULT_STEP_BOUND);
        let free = Arc::new(Ring {
            names: self.names.clone(),
            laurent: laurent.clone(),
            declared: n,
            rules: vec![],
            denominators: vec![],
            point: vec![None; n],
            step_bound,
        });

        let mut rules = Vec::new();
        for (lhs_src, rhs_src) in &self.relations {
            let lhs = Expr::parse(&free, lhs_src)?;
            let rhs = Expr::parse(&free, rhs_src)?;
            let (m, c) = match lhs.single_term() {
                Some(t) => t,
                None => {
                    return Err(Error::InvalidRing(format!(
                        "rule left side `{lhs_src}` must be a single monomial"
                    )))
                }
            };
            if m.0.iter().any(|&e| e < 0) || m.is_one() {
                return Err(Error::InvalidRing(format!(
                    "rule left side `{lhs_src}` must be a non-constant monomial with non-negative exponents"
                )));
            }
            let inv = c.recip();
            let rhs: Vec<_> = rhs
                .terms()
                .map(|(rm, rc)| (rm.clone(), rc * &inv))
                .collect();
            rules.push(Rule {
                lhs: m.clone(),
                rhs,
                label: format!("{lhs_src} -> {rhs_src}"),
            });
        }
        validate_rules(&free, &rules, self.unordered)?;

        // Denominators are normalized modulo the relations before localizing.
        let quotient = Arc::new(Ring {
            rules: rules.clone(),
            ..(*free).clone()
        });
        let mut names = self.names.clone();
        let mut dens = Vec::new();
        for (k, (name, src)) in self.denominators.iter().enumerate() {
            let den = Expr::parse(&quotient, src)?;
            if den.is_zero() {
                return Err(Error::InvalidRing(format!(
                    "denominator `{src}` normalizes to zero"
                )));
            }
            if den.as_constant().is_some() {
                return Err(Error::InvalidRing(format!(
                    "denominator `{src}` is a constant; constants are always invertible"
                )));
            }
            let name = match name {
                Some(nm) => nm.clone(),
                None => {
                    let mut nm = format!("u{k}");
                    while names.contains(&nm) {
                        nm.push('_');
                    }
                    nm
                }
            };
            if !parse::is_identifier(&name) || names.contains(&name) {
                return Err(Error::InvalidRing(format!(
                    "denominator name `{name}` is invalid or already used"
                )));
            }
            names.push(name.clone());
            dens.push((name, src.clone(), den));
        }
        let total = names.len();
        let widen = |m: &Monomial| {
            let mut e = m.0.clone();
            e.resize(total, 0);
            Monomial(e)
        };
        let mut all_rules: Vec<Rule> = rules
            .iter()
            .map(|r| Rule {
                lhs: widen(&r.lhs),
                rhs: r.rhs.iter().map(|(m, c)| (widen(m), c.clone())).collect(),
                label: r.label.clone(),
            })
            .collect();
        let mut denominators = Vec::new();
        for (k, (name, src, den)) in dens.into_iter().enumerate() {
            let g = n + k;
            let terms: Vec<(Monomial, Rational)> =
                den.terms().map(|(m, c)| (widen(m), c.clone())).collect();
            // den = c*L + R with L the grlex-leading monomial; u*L -> (1 - u*R)/c.
            let (lead, lead_c) = terms
                .iter()
                .max_by(|a, b| a.0.grlex_cmp(&b.0))
                .cloned()
                .expect("denominator is non-zero");
            let u = Monomial::generator(total, g);
            let inv = lead_c.recip();
            let mut rhs = vec![(Monomial::one(total), inv.clone())];
            for (m, c) in &terms {
                if *m != lead {
                    rhs.push((u.mul(m), -(c * &inv)));
                }
            }
            all_rules.push(Rule {
                lhs: u.mul(&lead),
                rhs,
                label: format!("{name}*({src}) -> 1"),
            });
            denominators.push(Denominator {
                name,
                source: src,
                terms,
                generator: g,
            });
        }
        for i in 0..all_rules.len() {
            for j in 0..i {
                if all_rules[i].lhs == all_rules[j].lhs {
                    return Err(Error::InvalidRing(format!(
                        "rules `{}` and `{}` share a leading monomial",
                        all_rules[j].label, all_rules[i].label
                    )));
                }
            }
        }

        let mut point: Vec<Option<Rational>> = vec![None; total];
        for (name, v) in &self.point {
            let g = self
                .names
                .iter()
                .position(|x| x == name)
                .ok_or_else(|| Error::UnknownGenerator(name.clone()))?;
            point[g] = Some(v.clone());
        }
        let declared_point: Option<Vec<Rational>> = point[..n].iter().cloned().collect();
        if let Some(vals) = &declared_point {
            for rule in &rules {
                let mut rel = Rational::zero();
                for (m, c) in rule.relation_terms() {
                    rel += c * eval_monomial(&m, vals)?;
                }
                if !rel.is_zero() {
                    return Err(Error::InvalidRing(format!(
                        "identity point does not satisfy `{}`",
                        rule.label
                    )));
                }
            }
            for d in &denominators {
                let mut v = Rational::zero();
                for (m, c) in &d.terms {
                    v += c * eval_monomial(&Monomial(m.0[..n].to_vec()), vals)?;
                }
                if !v.is_zero() {
                    point[d.generator] = Some(v.recip());
                }
            }
        }

        laurent.resize(total, false);
        Ok(Arc::new(Ring {
            names,
            laurent,
            declared: n,
            rules: all_rules,
            denominators,
            point,
            step_bound,
        }))
    }
}

fn validate_rules(ring: &Ring, rules: &[Rule], unordered: bool) -> Result<()> {
    for r in rules {
        for (m, _) in &r.rhs {
            if r.lhs.divides(m) && m.0.iter().all(|&e| e >= 0) {
                return Err(Error::InvalidRing(format!(
                    "rule `{}` reintroduces its own leading monomial",
                    r.label
                )));
            }
            if !unordered && m.grlex_cmp(&r.lhs) != Ordering::Less {
                return Err(Error::InvalidRing(format!(
                    "rule `{}` does not decrease in graded order (term {}); reorder generators or orient the rule the other way",
                    r.label,
                    ring.format_monomial(m)
                )));
            }
        }
        for (g, &e) in r.lhs.0.iter().enumerate() {
            if e > 0 && ring.laurent[g] && !unordered {
                return Err(Error::InvalidRing(format!(
                    "rule `{}` rewrites the Laurent generator `{}`",
                    r.label, ring.names[g]
                )));
            }
        }
    }
    Ok(())
}

pub(crate) fn eval_monomial(m: &Monomial, point: &[Rational]) -> Result<Rational> {
    let mut v = Rational::one();
    for (g, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let x = &point[g];
        if e < 0 && x.is_zero() {
            return Err(Error::NotInvertible(format!("generator {g} at the point")));
        }
        let p = num::pow::pow(x.clone(), e.unsigned_abs() as usize);
        v *= if e < 0 { p.recip() } else { p };
    }
    Ok(v)
}
