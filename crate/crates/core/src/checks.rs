//! Check orchestration: each selectable check runs over a fixed spanning
//! set plus seeded random instances, concurrently with the others.
//!
//! Spanning sets:
//! - brackets: generator pairs and triples
//! - connections: generator differential × frame element, plus exact pairs
//! - tensors: all basis index tuples
//! - function-valued checks on bundles: the normal monomials up to the
//!   degree bound

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bundle::{normal_monomials, Bundle};
use crate::calculus::OneForm;
use crate::error::{Error, Result};
use crate::liebialg::{
    check_bicovariant, check_cobracket, check_lie, check_prelie, check_xi_compat, xi_from_connection, LieBialgebra,
    Tensor,
};
use crate::poisson::Manifold;
use crate::report::{CheckRecord, Report, Status};
use crate::spec::Geometry;
use crate::symkernel::{Expr, Monomial, Rational};

/// Every selectable check, in report order.
pub const CHECK_IDS: [&str; 16] = [
    "jacobi",
    "compat",
    "curvature",
    "plg",
    "covariance",
    "bicovariance",
    "prelie",
    "cocycle",
    "xi_compat",
    "transversality",
    "cor44",
    "cor52",
    "induce_base",
    "spin",
    "gamma",
    "leibniz_gap",
];

/// Random instances per check on top of the spanning set.
pub const RANDOM_INSTANCES: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selection {
    All,
    Only(Vec<String>),
}

impl Selection {
    /// Parses `all` or a comma-separated list of check ids.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "all" {
            return Ok(Selection::All);
        }
        let mut out: Vec<String> = vec![];
        for id in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            if !CHECK_IDS.contains(&id) {
                return Err(Error::UnknownCheck(id.to_string()));
            }
            if !out.iter().any(|x| x == id) {
                out.push(id.to_string());
            }
        }
        if out.is_empty() {
            return Err(Error::UnknownCheck(s.to_string()));
        }
        Ok(Selection::Only(out))
    }

    fn ids(&self) -> Vec<&'static str> {
        match self {
            Selection::All => CHECK_IDS.to_vec(),
            Selection::Only(ids) => CHECK_IDS.iter().copied().filter(|c| ids.iter().any(|x| x == c)).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub selection: Selection,
    pub degree_bound: usize,
    pub seed: u64,
    /// Record wall time per check; off by default so reports are reproducible.
    pub timings: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            selection: Selection::All,
            degree_bound: 4,
            seed: 0,
            timings: false,
        }
    }
}

/// Runs the selected checks. A check whose spec block is missing is skipped
/// under [`Selection::All`] and is an error when selected explicitly.
pub fn run_checks(g: &Geometry, opts: &CheckOptions) -> Result<Report> {
    let ids = opts.selection.ids();
    let explicit = matches!(opts.selection, Selection::Only(_));
    for id in &ids {
        if let Err(e) = requirements(g, id) {
            if explicit {
                return Err(e);
            }
        }
    }
    let records: Vec<CheckRecord> = ids
        .par_iter()
        .map(|id| {
            let start = Instant::now();
            let mut record = match requirements(g, id) {
                Err(e) => CheckRecord {
                    id: id.to_string(),
                    inputs: 0,
                    defect: Some(format!("requires {}", missing_what(&e))),
                    status: Status::Skipped,
                    ms: 0,
                },
                Ok(()) => {
                    let mut probe = Probe::new(id, opts);
                    let outcome = run_one(g, id, &mut probe);
                    probe.finish(id, outcome)
                }
            };
            if opts.timings {
                record.ms = start.elapsed().as_millis().max(1) as u64;
            }
            record
        })
        .collect();
    Ok(Report::new(g.name().to_string(), opts.seed, opts.degree_bound, records))
}

fn missing_what(e: &Error) -> String {
    match e {
        Error::Missing(what) => what.clone(),
        other => other.to_string(),
    }
}

/// Spec blocks needed by each check.
pub fn requirements(g: &Geometry, id: &str) -> Result<()> {
    let needs_connection = || g.manifold().require_connection().map(|_| ());
    let needs_form_action = || {
        if g.require_action()?.has_form_action() {
            Ok(())
        } else {
            Err(Error::Missing("action form_action".into()))
        }
    };
    let needs_d2 = || {
        g.manifold()
            .frame()
            .d2()
            .map(|_| ())
            .ok_or_else(|| Error::Missing("frame d2".into()))
    };
    match id {
        "jacobi" => Ok(()),
        "compat" | "curvature" => needs_connection(),
        "plg" => {
            g.require_fibre()?;
            g.require_action().map(|_| ())
        }
        "covariance" => {
            needs_connection()?;
            g.require_fibre()?;
            needs_form_action()
        }
        "cor44" => {
            g.require_fibre()?;
            needs_form_action()?;
            needs_d2()
        }
        "cocycle" => g.require_fibre().map(|_| ()),
        "bicovariance" | "prelie" | "xi_compat" => {
            g.require_fibre()?;
            g.require_xi().map(|_| ())
        }
        "transversality" | "cor52" | "induce_base" => {
            needs_connection()?;
            g.bundle().map(|_| ())
        }
        "spin" | "gamma" | "leibniz_gap" => {
            needs_connection()?;
            g.bundle()?;
            needs_form_action()?;
            g.require_spin().map(|_| ())
        }
        other => Err(Error::UnknownCheck(other.to_string())),
    }
}

/// Seeded generator of random functions and 1-forms.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
    degree_bound: usize,
}

impl Sampler {
    pub fn new(seed: u64, degree_bound: usize) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            degree_bound,
        }
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Non-zero integer in `−3..3`.
    pub fn coefficient(&mut self) -> Rational {
        loop {
            let c: i64 = self.rng.gen_range(-3..=3);
            if c != 0 {
                return Rational::from_integer(c.into());
            }
        }
    }

    /// Sum of up to three random normal monomials with coefficients in
    /// `−3..3`; Laurent generators get random exponent signs.
    pub fn function(&mut self, m: &Manifold) -> Expr {
        let ring = m.ring();
        let monomials = normal_monomials(ring, self.degree_bound);
        let terms = self.rng.gen_range(1..=3);
        let mut acc = Expr::zero(ring);
        for _ in 0..terms {
            let mono = &monomials[self.rng.gen_range(0..monomials.len())];
            let mut exps = mono.exponents().to_vec();
            for (g, e) in exps.iter_mut().enumerate() {
                if ring.is_laurent(g) && self.rng.gen_bool(0.5) {
                    *e = -*e;
                }
            }
            let c = self.coefficient();
            acc = &acc + &Expr::monomial(ring, Monomial::from_exponents(exps), c);
        }
        acc
    }

    /// Random 1-form: either `p dq` or random frame coefficients.
    pub fn one_form(&mut self, m: &Manifold) -> OneForm {
        if self.rng.gen_bool(0.5) {
            let p = self.function(m);
            let q = self.function(m);
            m.frame().pdq(&p, &q)
        } else {
            let coords = (0..m.frame().dim()).map(|_| self.function(m)).collect();
            OneForm::from_coords(coords)
        }
    }
}

/// Accumulates instances and the first non-zero defect of one check.
struct Probe {
    sampler: Sampler,
    degree_bound: usize,
    inputs: usize,
    defect: Option<String>,
    info: bool,
}

impl Probe {
    fn new(id: &str, opts: &CheckOptions) -> Self {
        let offset = CHECK_IDS.iter().position(|c| *c == id).unwrap_or(0) as u64;
        let seed = opts.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(offset);
        Probe {
            sampler: Sampler::new(seed, opts.degree_bound),
            degree_bound: opts.degree_bound,
            inputs: 0,
            defect: None,
            info: false,
        }
    }

    fn function(&mut self, m: &Manifold) -> Expr {
        self.sampler.function(m)
    }

    fn one_form(&mut self, m: &Manifold) -> OneForm {
        self.sampler.one_form(m)
    }

    fn record(&mut self, label: impl FnOnce() -> String, defect: Option<String>) {
        self.inputs += 1;
        if self.defect.is_none() {
            if let Some(d) = defect {
                self.defect = Some(format!("{}: {d}", label()));
            }
        }
    }

    fn scalar(&mut self, label: impl FnOnce() -> String, e: Result<Expr>) {
        let d = match e {
            Ok(e) if e.is_zero() => None,
            Ok(e) => Some(e.to_string()),
            Err(err) => Some(format!("error: {err}")),
        };
        self.record(label, d);
    }

    fn form(&mut self, names: &[String], label: impl FnOnce() -> String, f: Result<OneForm>) {
        let d = match f {
            Ok(f) if f.is_zero() => None,
            Ok(f) => Some(f.display_with(names)),
            Err(err) => Some(format!("error: {err}")),
        };
        self.record(label, d);
    }

    fn tensor(&mut self, l: &LieBialgebra, what: &str, t: &Tensor) {
        self.inputs += t.indices().count();
        if self.defect.is_none() {
            if let Some((idx, v)) = t.first_nonzero() {
                self.defect = Some(format!("{what} {}: {v}", l.format_index(&idx)));
            }
        }
    }

    fn finish(self, id: &str, outcome: Result<()>) -> CheckRecord {
        let (defect, failed) = match outcome {
            Ok(()) => (self.defect.clone(), self.defect.is_some()),
            Err(e) => (Some(self.defect.unwrap_or_else(|| format!("error: {e}"))), true),
        };
        let status = match (failed, self.info) {
            (_, true) => Status::Info,
            (true, false) => Status::Fail,
            (false, false) => Status::Pass,
        };
        CheckRecord {
            id: id.to_string(),
            inputs: self.inputs,
            defect,
            status,
            ms: 0,
        }
    }
}

fn run_one(g: &Geometry, id: &str, p: &mut Probe) -> Result<()> {
    let m = g.manifold();
    match id {
        "jacobi" => jacobi(m, p),
        "compat" => compat(m, p),
        "curvature" => curvature(m, p),
        "plg" => plg(g, p),
        "covariance" => covariance(g, p),
        "bicovariance" => {
            let l = g.require_fibre()?;
            p.tensor(l, "bicovariance", &check_bicovariant(l, g.require_xi()?));
            // Bicovariance of Ξ is a hypothesis only for bundles.
            p.info = g.base().is_none() && p.defect.is_some();
            Ok(())
        }
        "prelie" => {
            let l = g.require_fibre()?;
            p.tensor(l, "pre-Lie", &check_prelie(g.require_xi()?));
            Ok(())
        }
        "cocycle" => {
            let l = g.require_fibre()?;
            let (cojacobi, cocycle) = check_cobracket(l);
            p.tensor(l, "Jacobi", &check_lie(l));
            p.tensor(l, "co-Jacobi", &cojacobi);
            p.tensor(l, "cocycle", &cocycle);
            Ok(())
        }
        "xi_compat" => xi_compat(g, p),
        "transversality" => transversality(g, p),
        "cor44" => cor44(g, p),
        "cor52" => cor52(g, p),
        "induce_base" => induce_base(g, p),
        "spin" => spin(g, p),
        "gamma" => gamma(g, p),
        "leibniz_gap" => leibniz_gap(g, p),
        other => Err(Error::UnknownCheck(other.to_string())),
    }
}

fn generators(m: &Manifold) -> Vec<Expr> {
    (0..m.ring().declared()).map(|g| Expr::generator(m.ring(), g)).collect()
}

fn name(m: &Manifold, g: usize) -> &str {
    m.ring().name(g)
}

fn jacobi(m: &Manifold, p: &mut Probe) -> Result<()> {
    let gens = generators(m);
    let n = gens.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                p.scalar(
                    || format!("({},{},{})", name(m, i), name(m, j), name(m, k)),
                    Ok(m.jacobiator(&gens[i], &gens[j], &gens[k])),
                );
            }
        }
    }
    for _ in 0..RANDOM_INSTANCES {
        let (a, b, c) = (p.function(m), p.function(m), p.function(m));
        p.scalar(|| format!("({a}, {b}, {c})"), Ok(m.jacobiator(&a, &b, &c)));
    }
    Ok(())
}

/// `(dg, eⁱ)` for every declared generator and frame element.
fn spanning_pairs(m: &Manifold) -> Vec<(String, OneForm, String, OneForm)> {
    let frame = m.frame();
    let mut out = vec![];
    for g in 0..m.ring().declared() {
        for i in 0..frame.dim() {
            out.push((
                format!("d{}", name(m, g)),
                frame.generator_differential(g).clone(),
                frame.names()[i].clone(),
                frame.element(i),
            ));
        }
    }
    out
}

/// `(dg, dh)` for every ordered pair of declared generators.
fn exact_pairs(m: &Manifold) -> Vec<(String, OneForm, String, OneForm)> {
    let frame = m.frame();
    let nd = m.ring().declared();
    let mut out = vec![];
    for g in 0..nd {
        for h in 0..nd {
            out.push((
                format!("d{}", name(m, g)),
                frame.generator_differential(g).clone(),
                format!("d{}", name(m, h)),
                frame.generator_differential(h).clone(),
            ));
        }
    }
    out
}

fn random_pairs(m: &Manifold, p: &mut Probe) -> Vec<(String, OneForm, String, OneForm)> {
    let names = m.frame().names();
    (0..RANDOM_INSTANCES)
        .map(|_| {
            let (a, b) = (p.one_form(m), p.one_form(m));
            (a.display_with(names), a, b.display_with(names), b)
        })
        .collect()
}

fn compat(m: &Manifold, p: &mut Probe) -> Result<()> {
    let names = m.frame().names();
    let mut pairs = spanning_pairs(m);
    pairs.extend(random_pairs(m, p));
    for (ln, eta, tn, tau) in pairs {
        p.form(names, || format!("({ln}, {tn})"), m.compatibility_defect(&eta, &tau));
    }
    Ok(())
}

fn curvature(m: &Manifold, p: &mut Probe) -> Result<()> {
    let frame = m.frame();
    let names = frame.names();
    let n = frame.dim();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                p.form(
                    names,
                    || format!("R({},{}){}", names[i], names[j], names[k]),
                    m.curvature(&frame.element(i), &frame.element(j), &frame.element(k)),
                );
            }
        }
    }
    // Tensoriality in each slot on random instances.
    for _ in 0..RANDOM_INSTANCES {
        let f = p.function(m);
        let forms = [p.one_form(m), p.one_form(m), p.one_form(m)];
        let base = m.curvature(&forms[0], &forms[1], &forms[2]);
        for slot in 0..3 {
            let mut scaled = forms.clone();
            scaled[slot] = scaled[slot].scale(&f);
            let defect = match (&base, m.curvature(&scaled[0], &scaled[1], &scaled[2])) {
                (Ok(b), Ok(s)) => Ok(&s - &b.scale(&f)),
                (Err(e), _) => Err(e.clone()),
                (_, Err(e)) => Err(e),
            };
            p.form(names, || format!("tensoriality slot {slot} with f = {f}"), defect);
        }
    }
    Ok(())
}

fn plg(g: &Geometry, p: &mut Probe) -> Result<()> {
    let m = g.manifold();
    let l = g.require_fibre()?;
    let a = g.require_action()?;
    let gens = generators(m);
    let n = gens.len();
    for xi in 0..l.dim() {
        for i in 0..n {
            for j in 0..n {
                p.scalar(
                    || format!("{} on ({},{})", l.names()[xi], name(m, i), name(m, j)),
                    a.plg_action_defect(m, l, xi, &gens[i], &gens[j]),
                );
            }
        }
        for _ in 0..RANDOM_INSTANCES {
            let (u, v) = (p.function(m), p.function(m));
            p.scalar(|| format!("{} on ({u}, {v})", l.names()[xi]), a.plg_action_defect(m, l, xi, &u, &v));
        }
    }
    Ok(())
}

fn form_pairs(m: &Manifold, p: &mut Probe) -> Vec<(String, OneForm, String, OneForm)> {
    let mut pairs = spanning_pairs(m);
    pairs.extend(exact_pairs(m));
    pairs.extend(random_pairs(m, p));
    pairs
}

fn covariance(g: &Geometry, p: &mut Probe) -> Result<()> {
    let m = g.manifold();
    let l = g.require_fibre()?;
    let a = g.require_action()?;
    let names = m.frame().names();
    let pairs = form_pairs(m, p);
    for xi in 0..l.dim() {
        for (ln, eta, tn, tau) in &pairs {
            p.form(
                names,
                || format!("{} on ({ln}, {tn})", l.names()[xi]),
                a.conn_covariance_defect(m, l, xi, eta, tau),
            );
        }
    }
    Ok(())
}

fn cor44(g: &Geometry, p: &mut Probe) -> Result<()> {
    let m = g.manifold();
    let l = g.require_fibre()?;
    let a = g.require_action()?;
    let names = m.frame().names();
    let pairs = form_pairs(m, p);
    for xi in 0..l.dim() {
        for (ln, tau, tn, eta) in &pairs {
            let long = a.cor44_check(m, l, xi, tau, eta);
            let short = a.cor44_check_short(m, l, xi, tau, eta);
            p.form(names, || format!("{} on ({ln}, {tn})", l.names()[xi]), long.clone());
            let agree = match (long, short) {
                (Ok(x), Ok(y)) => Ok(&x - &y),
                (Err(e), _) | (_, Err(e)) => Err(e),
            };
            p.form(names, || format!("Leibnizator forms differ on ({ln}, {tn})"), agree);
        }
    }
    Ok(())
}

fn xi_compat(g: &Geometry, p: &mut Probe) -> Result<()> {
    let l = g.require_fibre()?;
    let xi = g.require_xi()?;
    p.tensor(l, "antisymmetrization", &check_xi_compat(l, xi));
    let m = g.manifold();
    let group = m.connection().is_some()
        && m.frame().dim() == l.dim()
        && m.ring().has_point()
        && m.frame().d2().is_some();
    if group {
        let extracted = xi_from_connection(m)?;
        p.tensor(l, "connection-derived antisymmetrization", &check_xi_compat(l, &extracted));
    }
    Ok(())
}

fn bundle_pairs(b: &Bundle<'_>, p: &mut Probe) -> Vec<(String, OneForm, String, OneForm)> {
    let m = b.total();
    let mut pairs = spanning_pairs(m);
    pairs.extend(random_pairs(m, p));
    pairs
}

fn transversality(g: &Geometry, p: &mut Probe) -> Result<()> {
    let b = g.bundle()?;
    let names = b.fibre().names();
    for (ln, eta, tn, tau) in bundle_pairs(&b, p) {
        for xi in 0..b.fibre().dim() {
            p.scalar(
                || format!("{} on ({ln}, {tn})", names[xi]),
                b.transversality_defect(xi, &eta, &tau),
            );
        }
    }
    Ok(())
}

fn cor52(g: &Geometry, p: &mut Probe) -> Result<()> {
    let b = g.bundle()?;
    let names = b.fibre().names();
    for (ln, eta, tn, tau) in bundle_pairs(&b, p) {
        for xi in 0..b.fibre().dim() {
            p.scalar(|| format!("{} on ({ln}, {tn})", names[xi]), Ok(b.cor52_check(xi, &eta, &tau)));
        }
    }
    Ok(())
}

fn induce_base(g: &Geometry, p: &mut Probe) -> Result<()> {
    let base = g.induce_base()?;
    let m = base.manifold();
    p.inputs += 1;
    jacobi(m, p)?;
    compat(m, p)?;
    curvature(m, p)
}

/// Normal monomials of the total space up to the degree bound, then the
/// random functions.
fn function_corpus(m: &Manifold, p: &mut Probe) -> Vec<Expr> {
    let ring = m.ring();
    let mut out: Vec<Expr> = normal_monomials(ring, p.degree_bound)
        .into_iter()
        .map(|mono| Expr::monomial(ring, mono, Rational::from_integer(1.into())))
        .collect();
    for _ in 0..RANDOM_INSTANCES {
        out.push(p.function(m));
    }
    out
}

fn spin(g: &Geometry, p: &mut Probe) -> Result<()> {
    let b = g.bundle()?;
    let s = g.require_spin()?;
    let defects = s.validate(&b)?;
    p.inputs += 1;
    if let Some((label, d)) = defects.entries.first() {
        p.defect = Some(format!("{label}: {d}"));
    }
    let m = b.total();
    for f in function_corpus(m, p) {
        p.scalar(|| format!("∇_P({f}) horizontal"), s.nabla_p(&b, &f).map(|_| Expr::zero(m.ring())));
    }
    Ok(())
}

fn gamma(g: &Geometry, p: &mut Probe) -> Result<()> {
    let b = g.bundle()?;
    let s = g.require_spin()?;
    let m = b.total();
    let names = m.frame().names();
    let action = b.action();
    for f in function_corpus(m, p) {
        let gf = match s.gamma(&b, &f) {
            Ok(x) => x,
            Err(e) => {
                p.scalar(|| format!("Γ({f})"), Err(e));
                continue;
            }
        };
        p.inputs += 1;
        for xi in 0..b.fibre().dim() {
            let defect = action
                .act_form(m, xi, &gf)
                .and_then(|moved| Ok(&moved - &s.gamma(&b, &action.apply(xi, &f))?));
            p.form(
                names,
                || format!("{}{}Γ({f}) − Γ({}{}{f})", b.fibre().names()[xi], action.chirality().symbol(), b.fibre().names()[xi], action.chirality().symbol()),
                defect,
            );
        }
    }
    Ok(())
}

fn leibniz_gap(g: &Geometry, p: &mut Probe) -> Result<()> {
    let b = g.bundle()?;
    let s = g.require_spin()?;
    let base = g.require_base()?;
    let m = b.total();
    let names = m.frame().names();
    let mut basic: Vec<(String, Expr)> = base.names.iter().cloned().zip(base.images.iter().cloned()).collect();
    for _ in 0..RANDOM_INSTANCES {
        let i = p.sampler.rng().gen_range(0..base.images.len());
        let j = p.sampler.rng().gen_range(0..base.images.len());
        let e = &base.images[i] * &base.images[j];
        basic.push((format!("{}*{}", base.names[i], base.names[j]), e));
    }
    let mut targets = generators(m);
    for _ in 0..RANDOM_INSTANCES {
        targets.push(p.function(m));
    }
    for (an, a) in &basic {
        for q in &targets {
            p.form(names, || format!("(a, p) = ({an}, {q})"), s.leibniz_gap(&b, a, q));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets;
    use num::Zero;

    #[test]
    fn selection_parses_lists_and_dedups() {
        assert!(matches!(Selection::parse(" all "), Ok(Selection::All)));
        match Selection::parse("jacobi, compat,jacobi").unwrap() {
            Selection::Only(ids) => assert_eq!(ids, ["jacobi", "compat"]),
            Selection::All => panic!("expected a list"),
        }
        assert!(matches!(Selection::parse("jacobi,nope"), Err(Error::UnknownCheck(id)) if id == "nope"));
        assert!(matches!(Selection::parse(" , "), Err(Error::UnknownCheck(_))));
    }

    #[test]
    fn sampler_is_deterministic_and_nonzero() {
        let g = datasets::su2_selfaction().unwrap();
        let m = g.manifold();
        let mut s1 = Sampler::new(3, 4);
        let mut s2 = Sampler::new(3, 4);
        for _ in 0..20 {
            assert!(!s1.coefficient().is_zero());
            s2.coefficient();
            assert_eq!(s1.function(m), s2.function(m));
            assert_eq!(s1.one_form(m), s2.one_form(m));
        }
    }

    #[test]
    fn missing_blocks_skip_under_all() {
        let g = datasets::s1_group().unwrap();
        let r = run_checks(&g, &CheckOptions::default()).unwrap();
        let spin = r.checks.iter().find(|c| c.id == "spin").unwrap();
        assert_eq!(spin.status, Status::Skipped);
        assert!(spin.defect.as_deref().unwrap().starts_with("requires"));
        assert_eq!(r.checks.len(), CHECK_IDS.len());
    }

    #[test]
    fn missing_blocks_error_when_selected() {
        let g = datasets::s1_group().unwrap();
        let opts = CheckOptions {
            selection: Selection::parse("gamma").unwrap(),
            ..CheckOptions::default()
        };
        assert!(matches!(run_checks(&g, &opts), Err(Error::Missing(_))));
    }

    #[test]
    fn selected_checks_report_in_canonical_order() {
        let g = datasets::su2_selfaction().unwrap();
        let opts = CheckOptions {
            selection: Selection::parse("compat,jacobi").unwrap(),
            ..CheckOptions::default()
        };
        let r = run_checks(&g, &opts).unwrap();
        let ids: Vec<_> = r.checks.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["jacobi", "compat"]);
        assert!(r.passed());
        assert!(r.checks.iter().all(|c| c.ms == 0));
    }
}
