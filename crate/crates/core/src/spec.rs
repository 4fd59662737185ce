//! JSON geometry specifications: schema types, loading with full
//! validation, and emission of induced base specs.

use std::path::Path;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::action::{Action, Chirality};
use crate::bundle::{BaseSpec, Bundle, InducedBase};
use crate::calculus::{Frame, OneForm, TwoForm};
use crate::error::{Error, Result};
use crate::liebialg::{LieBialgebra, Tensor, Xi};
use crate::poisson::{Connection, Manifold, PoissonStructure};
use crate::spinconn::SpinConnection;
use crate::symkernel::{parse_rational, Expr, Rational, Ring};

/// A coefficient or expression: either a JSON integer or a string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Text(String),
}

impl Value {
    pub fn source(&self) -> String {
        match self {
            Value::Int(n) => n.to_string(),
            Value::Text(s) => s.clone(),
        }
    }

    fn rational(&self) -> Result<Rational> {
        match self {
            Value::Int(n) => Ok(Rational::from_integer((*n).into())),
            Value::Text(s) => parse_rational(s.trim()),
        }
    }
}

impl From<&Expr> for Value {
    fn from(e: &Expr) -> Self {
        Value::Text(e.to_string())
    }
}

pub type Table = IndexMap<String, Value>;
pub type Table2 = IndexMap<String, Table>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub ring: RingBlock,
    pub frame: FrameBlock,
    #[serde(default)]
    pub poisson: Table,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<Table2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibre: Option<FibreBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundle: Option<BundleBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin_connection: Option<SpinBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingBlock {
    pub generators: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub laurent: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<Relation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub denominators: Vec<Denominator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity_point: Option<Table>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_bound: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Relation {
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Denominator {
    Expr(String),
    Named { name: String, expr: String },
}

impl Denominator {
    fn parts(&self) -> (Option<String>, String) {
        match self {
            Denominator::Expr(e) => (None, e.clone()),
            Denominator::Named { name, expr } => (Some(name.clone()), expr.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameBlock {
    pub names: Vec<String>,
    pub differential: Table2,
    pub in_differentials: Table2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2: Option<Table2>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibreBlock {
    pub basis: Vec<String>,
    #[serde(default)]
    pub brackets: Table2,
    #[serde(default)]
    pub cobracket: Table2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_star: Option<Table2>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChiralityName {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionBlock {
    pub chirality: ChiralityName,
    pub fields: Table2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form_action: Option<IndexMap<String, Table2>>,
}

fn default_degree_bound() -> usize {
    6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleBlock {
    pub base_generators: Table,
    #[serde(default)]
    pub base_relations: Vec<Relation>,
    #[serde(default)]
    pub base_denominators: Vec<Denominator>,
    #[serde(default = "default_degree_bound")]
    pub degree_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinBlock {
    pub omega: Table2,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub alpha: Table2,
}

impl GeometrySpec {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }
}

/// A loaded and validated specification.
#[derive(Clone, Debug)]
pub struct Geometry {
    spec: GeometrySpec,
    manifold: Manifold,
    fibre: Option<LieBialgebra>,
    xi: Option<Xi>,
    action: Option<Action>,
    base: Option<BaseSpec>,
    spin: Option<SpinConnection>,
}

impl Geometry {
    pub fn parse(json: &str) -> Result<Self> {
        let spec: GeometrySpec = serde_json::from_str(json).map_err(|e| Error::Spec(e.to_string()))?;
        Self::from_spec(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        Self::parse(&text).map_err(|e| match e {
            Error::Spec(msg) => Error::Spec(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_spec(spec: GeometrySpec) -> Result<Self> {
        let ring = build_ring(&spec.ring)?;
        let frame = build_frame(&ring, &spec.frame)?;
        let poisson = build_poisson(&ring, &spec.poisson)?;
        let connection = spec
            .connection
            .as_ref()
            .map(|c| build_connection(&frame, c))
            .transpose()?;
        let manifold = Manifold::new(frame, poisson, connection)?;
        let (fibre, xi) = match &spec.fibre {
            Some(f) => {
                let (l, x) = build_fibre(f)?;
                (Some(l), x)
            }
            None => (None, None),
        };
        let action = match &spec.action {
            Some(block) => {
                let l = fibre
                    .as_ref()
                    .ok_or_else(|| Error::Spec("action block requires a fibre block".into()))?;
                Some(build_action(&manifold, l.names(), block)?)
            }
            None => None,
        };
        let base = spec
            .bundle
            .as_ref()
            .map(|b| build_base(&manifold, b))
            .transpose()?;
        if base.is_some() && (action.is_none() || xi.is_none()) {
            return Err(Error::Spec("bundle block requires action and fibre xi_star blocks".into()));
        }
        let spin = match &spec.spin_connection {
            Some(block) => {
                let l = fibre
                    .as_ref()
                    .ok_or_else(|| Error::Spec("spin_connection block requires a fibre block".into()))?;
                Some(build_spin(manifold.frame(), l.names(), block)?)
            }
            None => None,
        };
        Ok(Geometry {
            spec,
            manifold,
            fibre,
            xi,
            action,
            base,
            spin,
        })
    }

    pub fn spec(&self) -> &GeometrySpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        self.spec.name.as_deref().unwrap_or("spec")
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.manifold.ring()
    }

    pub fn expr(&self, src: &str) -> Result<Expr> {
        Expr::parse(self.ring(), src)
    }

    pub fn fibre(&self) -> Option<&LieBialgebra> {
        self.fibre.as_ref()
    }

    pub fn xi(&self) -> Option<&Xi> {
        self.xi.as_ref()
    }

    pub fn action(&self) -> Option<&Action> {
        self.action.as_ref()
    }

    pub fn base(&self) -> Option<&BaseSpec> {
        self.base.as_ref()
    }

    pub fn spin(&self) -> Option<&SpinConnection> {
        self.spin.as_ref()
    }

    pub fn require_fibre(&self) -> Result<&LieBialgebra> {
        self.fibre.as_ref().ok_or_else(|| Error::Missing("fibre block".into()))
    }

    pub fn require_xi(&self) -> Result<&Xi> {
        self.xi.as_ref().ok_or_else(|| Error::Missing("fibre xi_star".into()))
    }

    pub fn require_action(&self) -> Result<&Action> {
        self.action.as_ref().ok_or_else(|| Error::Missing("action block".into()))
    }

    pub fn require_base(&self) -> Result<&BaseSpec> {
        self.base.as_ref().ok_or_else(|| Error::Missing("bundle block".into()))
    }

    pub fn require_spin(&self) -> Result<&SpinConnection> {
        self.spin.as_ref().ok_or_else(|| Error::Missing("spin_connection block".into()))
    }

    pub fn bundle(&self) -> Result<Bundle<'_>> {
        self.require_base()?;
        Bundle::new(&self.manifold, self.require_fibre()?, self.require_xi()?, self.require_action()?)
    }

    pub fn induce_base(&self) -> Result<InducedBase> {
        self.bundle()?.induce_base(self.require_base()?)
    }

    /// Frame 1-form from `{frame name: expr}`.
    pub fn one_form(&self, coords: &[(&str, &str)]) -> Result<OneForm> {
        let table: Table = coords
            .iter()
            .map(|(k, v)| (k.to_string(), Value::Text(v.to_string())))
            .collect();
        one_form(self.manifold.frame(), &table, "one_form")
    }
}

fn build_ring(block: &RingBlock) -> Result<Arc<Ring>> {
    let mut b = Ring::builder().generators(block.generators.iter().cloned());
    for name in &block.laurent {
        b = b.laurent(name.clone());
    }
    for r in &block.relations {
        b = b.relation(r.lhs.clone(), r.rhs.clone());
    }
    for d in &block.denominators {
        let (name, expr) = d.parts();
        b = b.denominator(name, expr);
    }
    if let Some(point) = &block.identity_point {
        for (name, v) in point {
            b = b.point(name.clone(), v.rational()?);
        }
    }
    if let Some(bound) = block.step_bound {
        b = b.step_bound(bound);
    }
    b.build()
}

fn expr(ring: &Arc<Ring>, v: &Value, location: &str) -> Result<Expr> {
    Expr::parse(ring, &v.source()).map_err(|e| match e {
        Error::Parse { input, pos, msg } => Error::Parse {
            input,
            pos,
            msg: format!("{msg} (in {location})"),
        },
        other => other,
    })
}

fn declared_index(ring: &Ring, name: &str) -> Result<usize> {
    ring.index(name)
        .filter(|&g| g < ring.declared())
        .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
}

fn frame_index(names: &[String], name: &str, location: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::Spec(format!("unknown frame element `{name}` in {location}")))
}

fn basis_index(names: &[String], name: &str, location: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::Spec(format!("unknown fibre basis element `{name}` in {location}")))
}

fn split_pair<'s>(key: &'s str, sep: char, location: &str) -> Result<(&'s str, &'s str)> {
    let mut it = key.split(sep).map(str::trim);
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        _ => Err(Error::Spec(format!("key `{key}` in {location} must have the form x{sep}y"))),
    }
}

fn coords(names: &[String], ring: &Arc<Ring>, table: &Table, location: &str) -> Result<Vec<Expr>> {
    let mut out = vec![Expr::zero(ring); names.len()];
    for (k, v) in table {
        let i = frame_index(names, k, location)?;
        out[i] = expr(ring, v, location)?;
    }
    Ok(out)
}

fn one_form(frame: &Frame, table: &Table, location: &str) -> Result<OneForm> {
    Ok(OneForm::from_coords(coords(frame.names(), frame.ring(), table, location)?))
}

fn build_frame(ring: &Arc<Ring>, block: &FrameBlock) -> Result<Frame> {
    let names = block.names.clone();
    let n = names.len();
    let mut differential = vec![];
    for g in 0..ring.declared() {
        let name = ring.name(g);
        let row = block
            .differential
            .get(name)
            .ok_or_else(|| Error::Missing(format!("frame.differential entry for `{name}`")))?;
        differential.push(OneForm::from_coords(coords(&names, ring, row, &format!("d{name}"))?));
    }
    for key in block.differential.keys() {
        declared_index(ring, key)?;
    }
    let mut in_diff = vec![];
    for name in &names {
        let row = block
            .in_differentials
            .get(name)
            .ok_or_else(|| Error::Missing(format!("frame.in_differentials entry for `{name}`")))?;
        let mut v = vec![Expr::zero(ring); ring.declared()];
        for (g, c) in row {
            v[declared_index(ring, g)?] = expr(ring, c, &format!("in_differentials.{name}"))?;
        }
        in_diff.push(v);
    }
    for key in block.in_differentials.keys() {
        frame_index(&names, key, "frame.in_differentials")?;
    }
    let d2 = match &block.d2 {
        None => None,
        Some(table) => {
            let mut out = vec![TwoForm::zero(ring, n); n];
            for (key, row) in table {
                let i = frame_index(&names, key, "frame.d2")?;
                for (pair, c) in row {
                    let (p, q) = split_pair(pair, ',', "frame.d2")?;
                    let (p, q) = (frame_index(&names, p, "frame.d2")?, frame_index(&names, q, "frame.d2")?);
                    if p == q {
                        return Err(Error::Spec(format!("diagonal entry `{pair}` in frame.d2")));
                    }
                    out[i].add_component(p, q, &expr(ring, c, &format!("d2.{key}"))?);
                }
            }
            Some(out)
        }
    };
    Frame::new(ring, names, differential, in_diff, d2)
}

fn build_poisson(ring: &Arc<Ring>, table: &Table) -> Result<PoissonStructure> {
    let mut entries = vec![];
    for (key, v) in table {
        let (g, h) = split_pair(key, ',', "poisson")?;
        entries.push((declared_index(ring, g)?, declared_index(ring, h)?, expr(ring, v, &format!("poisson.{key}"))?));
    }
    PoissonStructure::new(ring, entries)
}

fn build_connection(frame: &Frame, table: &Table2) -> Result<Connection> {
    let ring = frame.ring();
    let mut rows = vec![vec![frame.zero_form(); frame.dim()]; ring.declared()];
    for (key, row) in table {
        let (g, i) = split_pair(key, '|', "connection")?;
        let g = declared_index(ring, g)?;
        let i = frame_index(frame.names(), i, "connection")?;
        rows[g][i] = one_form(frame, row, &format!("connection.{key}"))?;
    }
    Connection::new(frame, rows)
}

fn build_fibre(block: &FibreBlock) -> Result<(LieBialgebra, Option<Xi>)> {
    let names = block.basis.clone();
    let n = names.len();
    let mut c = Tensor::zeros(&[n, n, n]);
    let mut seen = Tensor::zeros(&[n, n, n]);
    let one = Rational::from_integer(1.into());
    let put_antisym = |t: &mut Tensor, seen: &mut Tensor, idx: [usize; 3], swapped: [usize; 3], v: Rational, loc: &str| -> Result<()> {
        for (ix, val) in [(idx, v.clone()), (swapped, -v)] {
            if *seen.get(&ix) == one && *t.get(&ix) != val {
                return Err(Error::invariant("fibre data is antisymmetric", loc.to_string(), format!("conflicting value {val}")));
            }
            t.set(&ix, val);
            seen.set(&ix, one.clone());
        }
        Ok(())
    };
    for (key, row) in &block.brackets {
        let (i, j) = split_pair(key, ',', "fibre.brackets")?;
        let (i, j) = (basis_index(&names, i, "fibre.brackets")?, basis_index(&names, j, "fibre.brackets")?);
        for (k, v) in row {
            let k = basis_index(&names, k, "fibre.brackets")?;
            let v = v.rational()?;
            if i == j && v != Rational::from_integer(0.into()) {
                return Err(Error::invariant("bracket is antisymmetric", format!("[{key}]"), "diagonal entry"));
            }
            put_antisym(&mut c, &mut seen, [i, j, k], [j, i, k], v, &format!("fibre.brackets.{key}"))?;
        }
    }
    let mut d = Tensor::zeros(&[n, n, n]);
    let mut seen = Tensor::zeros(&[n, n, n]);
    for (key, row) in &block.cobracket {
        let i = basis_index(&names, key, "fibre.cobracket")?;
        for (pair, v) in row {
            let (j, k) = split_pair(pair, ',', "fibre.cobracket")?;
            let (j, k) = (basis_index(&names, j, "fibre.cobracket")?, basis_index(&names, k, "fibre.cobracket")?);
            let v = v.rational()?;
            if j == k && v != Rational::from_integer(0.into()) {
                return Err(Error::invariant("cobracket is antisymmetric", format!("δ({key})"), "diagonal entry"));
            }
            put_antisym(&mut d, &mut seen, [i, j, k], [i, k, j], v, &format!("fibre.cobracket.{key}"))?;
        }
    }
    let l = LieBialgebra::new(names.clone(), c, d)?;
    let xi = match &block.xi_star {
        None => None,
        Some(table) => {
            let mut x = Tensor::zeros(&[n, n, n]);
            for (key, row) in table {
                let k = basis_index(&names, key, "fibre.xi_star")?;
                for (pair, v) in row {
                    let (i, j) = split_pair(pair, ',', "fibre.xi_star")?;
                    let (i, j) = (basis_index(&names, i, "fibre.xi_star")?, basis_index(&names, j, "fibre.xi_star")?);
                    x.set(&[i, j, k], v.rational()?);
                }
            }
            Some(Xi::new(x)?)
        }
    };
    Ok((l, xi))
}

/// Builds an action block against a manifold and a fibre basis.
pub fn build_action(m: &Manifold, basis: &[String], block: &ActionBlock) -> Result<Action> {
    let frame = m.frame();
    let ring = m.ring();
    for key in block.fields.keys() {
        basis_index(basis, key, "action.fields")?;
    }
    let mut fields = vec![];
    for name in basis {
        let table = block
            .fields
            .get(name)
            .ok_or_else(|| Error::Missing(format!("action field for `{name}`")))?;
        let mut vals: Vec<Option<Expr>> = vec![None; ring.declared()];
        for (g, v) in table {
            vals[declared_index(ring, g)?] = Some(expr(ring, v, &format!("action.fields.{name}"))?);
        }
        let vals = vals
            .into_iter()
            .enumerate()
            .map(|(g, v)| v.ok_or_else(|| Error::Missing(format!("action field `{name}` on `{}`", ring.name(g)))))
            .collect::<Result<Vec<_>>>()?;
        fields.push(frame.field(vals)?);
    }
    let form_action = match &block.form_action {
        None => None,
        Some(table) => {
            for key in table.keys() {
                basis_index(basis, key, "action.form_action")?;
            }
            let mut rows = vec![];
            for name in basis {
                let per = table
                    .get(name)
                    .ok_or_else(|| Error::Missing(format!("form_action entry for `{name}`")))?;
                let mut row = vec![frame.zero_form(); frame.dim()];
                for (f, form) in per {
                    let i = frame_index(frame.names(), f, "action.form_action")?;
                    row[i] = one_form(frame, form, &format!("form_action.{name}.{f}"))?;
                }
                rows.push(row);
            }
            Some(rows)
        }
    };
    let chirality = match block.chirality {
        ChiralityName::Left => Chirality::Left,
        ChiralityName::Right => Chirality::Right,
    };
    Action::new(m, chirality, basis.to_vec(), fields, form_action)
}

fn build_base(m: &Manifold, block: &BundleBlock) -> Result<BaseSpec> {
    let mut names = vec![];
    let mut images = vec![];
    for (name, v) in &block.base_generators {
        names.push(name.clone());
        images.push(expr(m.ring(), v, &format!("bundle.base_generators.{name}"))?);
    }
    Ok(BaseSpec {
        names,
        images,
        relations: block.base_relations.iter().map(|r| (r.lhs.clone(), r.rhs.clone())).collect(),
        denominators: block.base_denominators.iter().map(Denominator::parts).collect(),
        degree_bound: block.degree_bound,
    })
}

fn build_spin(frame: &Frame, basis: &[String], block: &SpinBlock) -> Result<SpinConnection> {
    let forms = |table: &Table2, label: &str, required: bool| -> Result<Vec<OneForm>> {
        for key in table.keys() {
            basis_index(basis, key, label)?;
        }
        basis
            .iter()
            .map(|name| match table.get(name) {
                Some(row) => one_form(frame, row, &format!("{label}.{name}")),
                None if required => Err(Error::Missing(format!("{label} entry for `{name}`"))),
                None => Ok(frame.zero_form()),
            })
            .collect()
    };
    SpinConnection::new(
        forms(&block.omega, "spin_connection.omega", true)?,
        forms(&block.alpha, "spin_connection.alpha", false)?,
    )
}

fn form_table(frame: &Frame, eta: &OneForm) -> Table {
    eta.coords()
        .iter()
        .zip(frame.names())
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, n)| (n.clone(), Value::from(c)))
        .collect()
}

/// Serializable spec of an induced base, optionally carrying an action of a
/// fibre Lie bialgebra pushed down to the base.
pub fn base_spec(base: &InducedBase, action: Option<(&LieBialgebra, Option<&Xi>, &Action)>) -> GeometrySpec {
    let m = base.manifold();
    let ring = m.ring();
    let frame = m.frame();
    let spec = base.spec();
    let nd = ring.declared();
    let denominators = ring
        .denominators()
        .iter()
        .map(|d| Denominator::Named {
            name: d.name().to_string(),
            expr: d.source().to_string(),
        })
        .collect();
    let ring_block = RingBlock {
        generators: spec.names.clone(),
        laurent: vec![],
        relations: spec
            .relations
            .iter()
            .map(|(l, r)| Relation {
                lhs: l.clone(),
                rhs: r.clone(),
            })
            .collect(),
        denominators,
        identity_point: None,
        step_bound: None,
    };
    let differential = (0..nd)
        .map(|g| (ring.name(g).to_string(), form_table(frame, frame.generator_differential(g))))
        .collect();
    let in_differentials = (0..frame.dim())
        .map(|i| {
            let row = frame
                .in_differentials(i)
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(g, c)| (ring.name(g).to_string(), Value::from(c)))
                .collect();
            (frame.names()[i].clone(), row)
        })
        .collect();
    let d2 = frame.d2().map(|d2| {
        d2.iter()
            .enumerate()
            .map(|(i, w)| {
                let row = w
                    .components()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|((p, q), c)| (format!("{},{}", frame.names()[p], frame.names()[q]), Value::from(c)))
                    .collect();
                (frame.names()[i].clone(), row)
            })
            .collect()
    });
    let mut poisson = Table::new();
    for g in 0..nd {
        for h in g + 1..nd {
            poisson.insert(format!("{},{}", ring.name(g), ring.name(h)), Value::from(m.poisson().entry(g, h)));
        }
    }
    let connection = m.connection().map(|c| {
        let mut t = Table2::new();
        for g in 0..nd {
            for i in 0..frame.dim() {
                let row = form_table(frame, c.entry(g, i));
                if !row.is_empty() {
                    t.insert(format!("{}|{}", ring.name(g), frame.names()[i]), row);
                }
            }
        }
        t
    });
    let (fibre, action_block) = match action {
        None => (None, None),
        Some((l, xi, a)) => {
            let fibre = fibre_block(l, xi);
            let fields = a
                .fields()
                .iter()
                .zip(a.basis())
                .map(|(f, name)| {
                    let row = (0..nd)
                        .map(|g| (ring.name(g).to_string(), Value::from(f.derivation().image(g))))
                        .collect();
                    (name.clone(), row)
                })
                .collect();
            let form_action = a.form_action().map(|rows| {
                rows.iter()
                    .zip(a.basis())
                    .map(|(row, name)| {
                        let per = row
                            .iter()
                            .zip(frame.names())
                            .filter(|(f, _)| !f.is_zero())
                            .map(|(f, n)| (n.clone(), form_table(frame, f)))
                            .collect();
                        (name.clone(), per)
                    })
                    .collect()
            });
            let chirality = match a.chirality() {
                Chirality::Left => ChiralityName::Left,
                Chirality::Right => ChiralityName::Right,
            };
            (
                Some(fibre),
                Some(ActionBlock {
                    chirality,
                    fields,
                    form_action,
                }),
            )
        }
    };
    GeometrySpec {
        name: None,
        ring: ring_block,
        frame: FrameBlock {
            names: frame.names().to_vec(),
            differential,
            in_differentials,
            d2,
        },
        poisson,
        connection,
        fibre,
        action: action_block,
        bundle: None,
        spin_connection: None,
    }
}

fn rational_value(r: &Rational) -> Value {
    if r.is_integer() {
        if let Ok(n) = i64::try_from(r.to_integer()) {
            return Value::Int(n);
        }
    }
    Value::Text(r.to_string())
}

fn fibre_block(l: &LieBialgebra, xi: Option<&Xi>) -> FibreBlock {
    let names = l.names();
    let n = l.dim();
    let mut brackets = Table2::new();
    for i in 0..n {
        for j in i + 1..n {
            let row: Table = (0..n)
                .filter(|&k| !num::Zero::is_zero(l.c(i, j, k)))
                .map(|k| (names[k].clone(), rational_value(l.c(i, j, k))))
                .collect();
            if !row.is_empty() {
                brackets.insert(format!("{},{}", names[i], names[j]), row);
            }
        }
    }
    let mut cobracket = Table2::new();
    for i in 0..n {
        let mut row = Table::new();
        for j in 0..n {
            for k in j + 1..n {
                if !num::Zero::is_zero(l.d(i, j, k)) {
                    row.insert(format!("{},{}", names[j], names[k]), rational_value(l.d(i, j, k)));
                }
            }
        }
        if !row.is_empty() {
            cobracket.insert(names[i].clone(), row);
        }
    }
    let xi_star = xi.map(|xi| {
        let mut t = Table2::new();
        for k in 0..n {
            let row: Table = xi
                .star_terms(k)
                .into_iter()
                .map(|(i, j, c)| (format!("{},{}", names[i], names[j]), rational_value(&c)))
                .collect();
            if !row.is_empty() {
                t.insert(names[k].clone(), row);
            }
        }
        t
    });
    FibreBlock {
        basis: names.to_vec(),
        brackets,
        cobracket,
        xi_star,
    }
}

/// Bundled datasets.
pub mod datasets {
    use super::Geometry;
    use crate::error::Result;

    pub const SU2_SELFACTION: &str = include_str!("../data/su2_selfaction.json");
    pub const S1_GROUP: &str = include_str!("../data/s1_group.json");
    pub const SU2_HOPF: &str = include_str!("../data/su2_hopf.json");
    pub const SU2_HOPF_ALPHA: &str = include_str!("../data/su2_hopf_alpha.json");

    /// `(file name, contents)` of every bundled dataset.
    pub const ALL: [(&str, &str); 4] = [
        ("su2_selfaction.json", SU2_SELFACTION),
        ("s1_group.json", S1_GROUP),
        ("su2_hopf.json", SU2_HOPF),
        ("su2_hopf_alpha.json", SU2_HOPF_ALPHA),
    ];

    pub fn su2_selfaction() -> Result<Geometry> {
        Geometry::parse(SU2_SELFACTION)
    }

    pub fn s1_group() -> Result<Geometry> {
        Geometry::parse(S1_GROUP)
    }

    pub fn su2_hopf() -> Result<Geometry> {
        Geometry::parse(SU2_HOPF)
    }

    pub fn su2_hopf_alpha() -> Result<Geometry> {
        Geometry::parse(SU2_HOPF_ALPHA)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1_with(from: &str, to: &str) -> Result<Geometry> {
        let text = datasets::S1_GROUP.replacen(from, to, 1);
        assert_ne!(text, datasets::S1_GROUP, "pattern `{from}` not found");
        Geometry::parse(&text)
    }

    #[test]
    fn s1_loads_with_all_blocks() {
        let g = datasets::s1_group().unwrap();
        assert_eq!(g.name(), "s1_group");
        assert!(g.fibre().is_some() && g.xi().is_some() && g.action().is_some());
        assert!(g.base().is_none() && g.spin().is_none());
        assert!(matches!(g.bundle(), Err(Error::Missing(_))));
        assert!(matches!(g.require_spin(), Err(Error::Missing(_))));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(s1_with("\"poisson\"", "\"poison\"").is_err());
    }

    #[test]
    fn malformed_json_is_a_spec_error() {
        assert!(Geometry::parse("{ \"ring\": ").is_err());
    }

    #[test]
    fn parse_errors_point_into_the_expression() {
        let err = s1_with("\"-t\"", "\"-t +\"").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn unknown_generator_in_connection_is_rejected() {
        assert!(s1_with("\"t|f\"", "\"u|f\"").is_err());
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let err = Geometry::load("/nonexistent/spec.json").unwrap_err();
        assert!(err.to_string().contains("nonexistent"), "{err}");
    }

    #[test]
    fn one_form_reads_frame_coordinates() {
        let g = datasets::su2_selfaction().unwrap();
        let eta = g.one_form(&[("ep", "a"), ("em", "2*b")]).unwrap();
        let f = g.manifold().frame();
        assert_eq!(eta, &f.element(1).scale(&g.expr("a").unwrap()) + &f.element(2).scale(&g.expr("2*b").unwrap()));
        assert!(g.one_form(&[("zz", "a")]).is_err());
    }

    #[test]
    fn serialized_spec_reparses_identically() {
        for (name, text) in datasets::ALL {
            let g = Geometry::parse(text).unwrap();
            let again = Geometry::parse(&g.spec().to_json()).unwrap();
            assert_eq!(again.spec(), g.spec(), "{name}");
        }
    }
}
