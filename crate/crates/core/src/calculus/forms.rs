use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use crate::symkernel::{Expr, ExprModule, Rational, Ring};

/// 1-form in frame coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct OneForm {
    coords: Vec<Expr>,
}

impl OneForm {
    pub fn zero(ring: &Arc<Ring>, dim: usize) -> Self {
        OneForm {
            coords: vec![Expr::zero(ring); dim],
        }
    }

    pub fn from_coords(coords: Vec<Expr>) -> Self {
        OneForm { coords }
    }

    /// `coeff · eⁱ`.
    pub fn basis(ring: &Arc<Ring>, dim: usize, i: usize, coeff: Expr) -> Self {
        let mut f = Self::zero(ring, dim);
        f.coords[i] = coeff;
        f
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Expr] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Expr {
        &self.coords[i]
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.coords[0].ring()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Expr::is_zero)
    }

    pub fn scale(&self, p: &Expr) -> OneForm {
        OneForm {
            coords: self.coords.iter().map(|c| c * p).collect(),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> OneForm {
        OneForm {
            coords: self.coords.iter().map(|c| c.scale(r)).collect(),
        }
    }

    /// First non-zero coordinate, for diagnostics.
    pub fn first_nonzero(&self) -> Option<(usize, &Expr)> {
        self.coords.iter().enumerate().find(|(_, c)| !c.is_zero())
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .coords
            .iter()
            .zip(names)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, n)| {
                if c.len() > 1 {
                    format!("({c})*{n}")
                } else {
                    format!("{c}*{n}")
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords.iter().map(|c| c.to_string())).finish()
    }
}

impl ExprModule for OneForm {
    fn add_assign_scaled(&mut self, coeff: &Expr, other: &Self) {
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            if !b.is_zero() {
                *a = &*a + &(coeff * b);
            }
        }
    }
}

impl Add<&OneForm> for &OneForm {
    type Output = OneForm;
    fn add(self, rhs: &OneForm) -> OneForm {
        OneForm {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&OneForm> for &OneForm {
    type Output = OneForm;
    fn sub(self, rhs: &OneForm) -> OneForm {
        OneForm {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Add for OneForm {
    type Output = OneForm;
    fn add(self, rhs: OneForm) -> OneForm {
        &self + &rhs
    }
}

impl Sub for OneForm {
    type Output = OneForm;
    fn sub(self, rhs: OneForm) -> OneForm {
        &self - &rhs
    }
}

impl Neg for &OneForm {
    type Output = OneForm;
    fn neg(self) -> OneForm {
        OneForm {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for OneForm {
    type Output = OneForm;
    fn neg(self) -> OneForm {
        -&self
    }
}

/// 2-form stored on frame pairs `i < j`.
#[derive(Clone, PartialEq, Eq)]
pub struct TwoForm {
    dim: usize,
    coords: Vec<Expr>,
}

pub(crate) fn pair_index(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < dim);
    i * (2 * dim - i - 1) / 2 + (j - i - 1)
}

impl TwoForm {
    pub fn zero(ring: &Arc<Ring>, dim: usize) -> Self {
        TwoForm {
            dim,
            coords: vec![Expr::zero(ring); dim * dim.saturating_sub(1) / 2],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficient of `eⁱ∧eʲ`, antisymmetric in `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> Expr {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.coords[pair_index(self.dim, i, j)].clone(),
            std::cmp::Ordering::Greater => -&self.coords[pair_index(self.dim, j, i)],
            std::cmp::Ordering::Equal => Expr::zero(self.coords_ring()),
        }
    }

    /// Adds `c · eⁱ∧eʲ`.
    pub fn add_component(&mut self, i: usize, j: usize, c: &Expr) {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => {
                let k = pair_index(self.dim, i, j);
                self.coords[k] = &self.coords[k] + c;
            }
            std::cmp::Ordering::Greater => {
                let k = pair_index(self.dim, j, i);
                self.coords[k] = &self.coords[k] - c;
            }
            std::cmp::Ordering::Equal => {}
        }
    }

    fn coords_ring(&self) -> &Arc<Ring> {
        self.coords
            .first()
            .map(Expr::ring)
            .expect("2-forms need at least two frame elements")
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Expr::is_zero)
    }

    pub fn scale(&self, p: &Expr) -> TwoForm {
        TwoForm {
            dim: self.dim,
            coords: self.coords.iter().map(|c| c * p).collect(),
        }
    }

    pub fn components(&self) -> impl Iterator<Item = ((usize, usize), &Expr)> + '_ {
        let dim = self.dim;
        (0..dim)
            .flat_map(move |i| (i + 1..dim).map(move |j| (i, j)))
            .zip(self.coords.iter())
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .components()
            .filter(|(_, c)| !c.is_zero())
            .map(|((i, j), c)| format!("({c})*{}^{}", names[i], names[j]))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Debug for TwoForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.components().map(|(k, c)| (k, c.to_string())))
            .finish()
    }
}

impl Add<&TwoForm> for &TwoForm {
    type Output = TwoForm;
    fn add(self, rhs: &TwoForm) -> TwoForm {
        TwoForm {
            dim: self.dim,
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&TwoForm> for &TwoForm {
    type Output = TwoForm;
    fn sub(self, rhs: &TwoForm) -> TwoForm {
        TwoForm {
            dim: self.dim,
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

/// `η∧τ`.
pub fn wedge(eta: &OneForm, tau: &OneForm) -> TwoForm {
    let n = eta.dim();
    let mut w = TwoForm::zero(eta.ring(), n);
    for i in 0..n {
        for j in i + 1..n {
            let c = &(eta.coord(i) * tau.coord(j)) - &(eta.coord(j) * tau.coord(i));
            w.coords[pair_index(n, i, j)] = c;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_indices_enumerate_upper_triangle() {
        let n = 4;
        let mut seen = vec![];
        for i in 0..n {
            for j in i + 1..n {
                seen.push(pair_index(n, i, j));
            }
        }
        assert_eq!(seen, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn wedge_is_antisymmetric() {
        let r = Ring::builder().generators(["p", "q"]).build().unwrap();
        let e = |s: &str| Expr::parse(&r, s).unwrap();
        let a = OneForm::from_coords(vec![e("p"), e("1"), e("q")]);
        let b = OneForm::from_coords(vec![e("q^2"), e("p"), e("0")]);
        assert_eq!(wedge(&a, &b), {
            let w = wedge(&b, &a);
            TwoForm {
                dim: 3,
                coords: w.coords.iter().map(|c| -c).collect(),
            }
        });
        assert!(wedge(&a, &a).is_zero());
    }
}
