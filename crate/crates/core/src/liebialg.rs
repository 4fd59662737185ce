//! Lie bialgebra structure constants and the conditions on the constant
//! tensor `Ξ` of a translation-covariant contravariant connection.

use std::fmt;

use num::Zero;

use crate::calculus::OneForm;
use crate::error::{Error, Result};
use crate::poisson::{Connection, Manifold};
use crate::symkernel::{Expr, Rational};

/// Dense rational tensor in row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<Rational>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        Tensor {
            shape: shape.to_vec(),
            data: vec![Rational::zero(); shape.iter().product()],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (i, n)| {
                debug_assert!(i < n);
                acc * n + i
            })
    }

    pub fn get(&self, idx: &[usize]) -> &Rational {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Rational) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn add_at(&mut self, idx: &[usize], v: &Rational) {
        let o = self.offset(idx);
        self.data[o] += v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Multi-indices in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.data.len()).map(move |mut flat| {
            let mut idx = vec![0; self.shape.len()];
            for (slot, n) in idx.iter_mut().zip(&self.shape).rev() {
                *slot = flat % n;
                flat /= n;
            }
            idx
        })
    }

    /// Non-zero components in row-major order.
    pub fn nonzero(&self) -> impl Iterator<Item = (Vec<usize>, &Rational)> + '_ {
        self.indices().zip(&self.data).filter(|(_, v)| !v.is_zero())
    }

    pub fn first_nonzero(&self) -> Option<(Vec<usize>, Rational)> {
        self.nonzero().next().map(|(i, v)| (i, v.clone()))
    }
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.nonzero().map(|(i, v)| (i, v.to_string())))
            .finish()
    }
}

/// Lie bialgebra on a named basis: `[eᵢ,eⱼ] = Σ c[i][j][k] eₖ`,
/// `δ(eᵢ) = Σ d[i][j][k] eⱼ⊗eₖ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieBialgebra {
    names: Vec<String>,
    brackets: Tensor,
    cobracket: Tensor,
}

impl LieBialgebra {
    pub fn new(names: Vec<String>, brackets: Tensor, cobracket: Tensor) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Spec("fibre basis is empty".into()));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::Spec(format!("duplicate fibre basis name `{name}`")));
            }
        }
        if brackets.shape() != [n, n, n] || cobracket.shape() != [n, n, n] {
            return Err(Error::Spec("structure tensors must be dim × dim × dim".into()));
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if *brackets.get(&[i, j, k]) != -brackets.get(&[j, i, k]) {
                        return Err(Error::invariant(
                            "bracket is antisymmetric",
                            format!("[{},{}]", names[i], names[j]),
                            format!("component on {}", names[k]),
                        ));
                    }
                    if *cobracket.get(&[i, j, k]) != -cobracket.get(&[i, k, j]) {
                        return Err(Error::invariant(
                            "cobracket is antisymmetric",
                            format!("δ({})", names[i]),
                            format!("component {}⊗{}", names[j], names[k]),
                        ));
                    }
                }
            }
        }
        Ok(LieBialgebra {
            names,
            brackets,
            cobracket,
        })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> &Rational {
        self.brackets.get(&[i, j, k])
    }

    pub fn d(&self, i: usize, j: usize, k: usize) -> &Rational {
        self.cobracket.get(&[i, j, k])
    }

    pub fn brackets(&self) -> &Tensor {
        &self.brackets
    }

    pub fn cobracket(&self) -> &Tensor {
        &self.cobracket
    }

    /// Non-zero terms `(j, k, coefficient)` of `δ(eᵢ)`.
    pub fn cobracket_terms(&self, i: usize) -> Vec<(usize, usize, Rational)> {
        let n = self.dim();
        let mut out = vec![];
        for j in 0..n {
            for k in 0..n {
                let v = self.d(i, j, k);
                if !v.is_zero() {
                    out.push((j, k, v.clone()));
                }
            }
        }
        out
    }

    pub fn format_index(&self, idx: &[usize]) -> String {
        let parts: Vec<&str> = idx.iter().map(|&i| self.names[i].as_str()).collect();
        format!("({})", parts.join(","))
    }
}

/// `Ξ*(eₖ) = Σ X[i][j][k] eᵢ⊗eⱼ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Xi {
    x: Tensor,
}

impl Xi {
    pub fn new(x: Tensor) -> Result<Self> {
        let s = x.shape();
        if s.len() != 3 || s[0] != s[1] || s[1] != s[2] {
            return Err(Error::Spec("xi tensor must be dim × dim × dim".into()));
        }
        Ok(Xi { x })
    }

    pub fn zero(dim: usize) -> Self {
        Xi {
            x: Tensor::zeros(&[dim, dim, dim]),
        }
    }

    pub fn dim(&self) -> usize {
        self.x.shape()[0]
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rational {
        self.x.get(&[i, j, k])
    }

    pub fn tensor(&self) -> &Tensor {
        &self.x
    }

    /// Non-zero terms `(i, j, coefficient)` of `Ξ*(eₖ)`.
    pub fn star_terms(&self, k: usize) -> Vec<(usize, usize, Rational)> {
        let n = self.dim();
        let mut out = vec![];
        for i in 0..n {
            for j in 0..n {
                let v = self.get(i, j, k);
                if !v.is_zero() {
                    out.push((i, j, v.clone()));
                }
            }
        }
        out
    }
}

/// `J[i][j][k][m]`: component on `eₘ` of `[eᵢ,[eⱼ,eₖ]] + cyclic`.
fn jacobi_of(c: impl Fn(usize, usize, usize) -> Rational, n: usize) -> Tensor {
    let mut out = Tensor::zeros(&[n, n, n, n]);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for m in 0..n {
                    let mut acc = Rational::zero();
                    for l in 0..n {
                        acc += c(j, k, l) * c(i, l, m);
                        acc += c(k, i, l) * c(j, l, m);
                        acc += c(i, j, l) * c(k, l, m);
                    }
                    out.set(&[i, j, k, m], acc);
                }
            }
        }
    }
    out
}

/// Jacobi identity defect of the bracket.
pub fn check_lie(l: &LieBialgebra) -> Tensor {
    jacobi_of(|i, j, k| l.c(i, j, k).clone(), l.dim())
}

/// Co-Jacobi defect (Jacobi of the dual bracket `[fʲ,fᵏ] = Σ d[i][j][k] fⁱ`)
/// and the 1-cocycle defect
/// `δ([eᵢ,eⱼ]) − ad_{eᵢ}δ(eⱼ) + ad_{eⱼ}δ(eᵢ)` indexed `[i][j][p][q]`.
pub fn check_cobracket(l: &LieBialgebra) -> (Tensor, Tensor) {
    let n = l.dim();
    let cojacobi = jacobi_of(|j, k, i| l.d(i, j, k).clone(), n);
    let ad = |x: usize, y: usize, p: usize, q: usize| {
        let mut acc = Rational::zero();
        for a in 0..n {
            acc += l.d(y, a, q) * l.c(x, a, p);
            acc += l.d(y, p, a) * l.c(x, a, q);
        }
        acc
    };
    let mut cocycle = Tensor::zeros(&[n, n, n, n]);
    for i in 0..n {
        for j in 0..n {
            for p in 0..n {
                for q in 0..n {
                    let mut acc = Rational::zero();
                    for m in 0..n {
                        acc += l.c(i, j, m) * l.d(m, p, q);
                    }
                    acc -= ad(i, j, p, q);
                    acc += ad(j, i, p, q);
                    cocycle.set(&[i, j, p, q], acc);
                }
            }
        }
    }
    (cojacobi, cocycle)
}

/// `Ξ(fⁱ,fʲ) − Ξ(fʲ,fⁱ) − [fⁱ,fʲ]` indexed `[i][j][k]`.
pub fn check_xi_compat(l: &LieBialgebra, xi: &Xi) -> Tensor {
    let n = l.dim();
    let mut out = Tensor::zeros(&[n, n, n]);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.set(&[i, j, k], xi.get(i, j, k) - xi.get(j, i, k) - l.d(k, i, j));
            }
        }
    }
    out
}

/// Defect of
/// `Ξ*_{[η,ξ]} = [Ξ*¹_η,ξ]⊗Ξ*²_η + Ξ*¹_η⊗[Ξ*²_η,ξ] + δ¹_ξ⊗[η,δ²_ξ]`
/// for `η = e_a`, `ξ = e_b`, indexed `[a][b][p][q]`.
pub fn check_bicovariant(l: &LieBialgebra, xi: &Xi) -> Tensor {
    let n = l.dim();
    let mut out = Tensor::zeros(&[n, n, n, n]);
    for a in 0..n {
        for b in 0..n {
            for p in 0..n {
                for q in 0..n {
                    let mut acc = Rational::zero();
                    for m in 0..n {
                        acc += l.c(a, b, m) * xi.get(p, q, m);
                        acc -= xi.get(m, q, a) * l.c(m, b, p);
                        acc -= xi.get(p, m, a) * l.c(m, b, q);
                        acc -= l.d(b, p, m) * l.c(a, m, q);
                    }
                    out.set(&[a, b, p, q], acc);
                }
            }
        }
    }
    out
}

/// Antisymmetrized associator `A(fⁱ,fʲ,fᵏ) − A(fʲ,fⁱ,fᵏ)` with
/// `A(φ,ψ,χ) = Ξ(φ,Ξ(ψ,χ)) − Ξ(Ξ(φ,ψ),χ)`, indexed `[i][j][k][m]`.
pub fn check_prelie(xi: &Xi) -> Tensor {
    let n = xi.dim();
    let assoc = |i: usize, j: usize, k: usize, m: usize| {
        let mut acc = Rational::zero();
        for l in 0..n {
            acc += xi.get(j, k, l) * xi.get(i, l, m);
            acc -= xi.get(i, j, l) * xi.get(l, k, m);
        }
        acc
    };
    let mut out = Tensor::zeros(&[n, n, n, n]);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for m in 0..n {
                    out.set(&[i, j, k, m], assoc(i, j, k, m) - assoc(j, i, k, m));
                }
            }
        }
    }
    out
}

/// Reads `Ξ` off a group connection: `X[i][j][k]` is the coefficient of
/// `eᵏ` in `∇̂_{eⁱ}eʲ`, evaluated at the identity. The coefficients must be
/// constant on the group.
pub fn xi_from_connection(m: &Manifold) -> Result<Xi> {
    let ring = m.ring();
    if !ring.has_point() {
        return Err(Error::Missing("identity point for xi extraction".into()));
    }
    let frame = m.frame();
    let d2 = frame
        .d2()
        .ok_or_else(|| Error::Missing("d2 table for xi extraction".into()))?;
    for (i, w) in d2.iter().enumerate() {
        if let Some((pair, c)) = w.components().find(|(_, c)| c.as_constant().is_none()) {
            return Err(Error::invariant(
                "frame is left-invariant",
                format!("d{}", frame.names()[i]),
                format!(
                    "coefficient {c} on {}^{} is not constant",
                    frame.names()[pair.0],
                    frame.names()[pair.1]
                ),
            ));
        }
    }
    let n = frame.dim();
    let mut x = Tensor::zeros(&[n, n, n]);
    for i in 0..n {
        for j in 0..n {
            let v = m.nabla(&frame.element(i), &frame.element(j))?;
            for (k, coeff) in v.coords().iter().enumerate() {
                let at_identity = coeff.eval_at_point()?;
                if *coeff != Expr::constant(ring, at_identity.clone()) {
                    return Err(Error::NotConstant(format!(
                        "coefficient of {} in ∇̂_{} {} is {coeff}",
                        frame.names()[k],
                        frame.names()[i],
                        frame.names()[j]
                    )));
                }
                x.set(&[i, j, k], at_identity);
            }
        }
    }
    Xi::new(x)
}

/// Translation-covariant connection with constant tensor `Ξ` on the frame:
/// `∇̂_{eⁱ}eʲ = Σ X[i][j][k] eᵏ`.
pub fn connection_from_xi(m: &Manifold, xi: &Xi) -> Result<Connection> {
    let frame = m.frame();
    let ring = m.ring();
    let n = frame.dim();
    if xi.dim() != n {
        return Err(Error::Spec("xi dimension differs from the frame".into()));
    }
    let on_frame: Vec<Vec<OneForm>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    OneForm::from_coords(
                        (0..n).map(|k| Expr::constant(ring, xi.get(i, j, k).clone())).collect(),
                    )
                })
                .collect()
        })
        .collect();
    let table = (0..ring.declared())
        .map(|g| {
            let dg = frame.generator_differential(g);
            (0..n)
                .map(|j| {
                    let mut acc = frame.zero_form();
                    for (i, c) in dg.coords().iter().enumerate() {
                        if !c.is_zero() {
                            acc = &acc + &on_frame[i][j].scale(c);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Connection::new(frame, table)
}
