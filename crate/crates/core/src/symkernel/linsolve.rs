use std::collections::BTreeMap;

use num::Zero;

use super::Rational;

/// Sparse exact linear system, rows added incrementally and kept in echelon
/// form keyed by pivot column.
#[derive(Debug, Default)]
pub struct SparseSystem {
    pivots: BTreeMap<usize, (BTreeMap<usize, Rational>, Rational)>,
    inconsistent: bool,
}

impl SparseSystem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `Σ row[c]·x_c = rhs`.
    pub fn push(&mut self, mut row: BTreeMap<usize, Rational>, mut rhs: Rational) {
        row.retain(|_, v| !v.is_zero());
        loop {
            let hit = row
                .keys()
                .find(|c| self.pivots.contains_key(c))
                .copied();
            let Some(c) = hit else { break };
            let factor = row.remove(&c).expect("present");
            let (prow, prhs) = &self.pivots[&c];
            for (k, v) in prow {
                if *k == c {
                    continue;
                }
                let e = row.entry(*k).or_insert_with(Rational::zero);
                *e -= &factor * v;
                if e.is_zero() {
                    row.remove(k);
                }
            }
            rhs -= &factor * prhs;
        }
        let Some((&p, lead)) = row.iter().next() else {
            if !rhs.is_zero() {
                self.inconsistent = true;
            }
            return;
        };
        let inv = lead.recip();
        let row: BTreeMap<usize, Rational> = row.iter().map(|(k, v)| (*k, v * &inv)).collect();
        self.pivots.insert(p, (row, rhs * inv));
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    /// A solution with every free variable set to zero.
    pub fn solve(&self, ncols: usize) -> Option<Vec<Rational>> {
        if self.inconsistent {
            return None;
        }
        let mut x = vec![Rational::zero(); ncols];
        for (p, (row, rhs)) in self.pivots.iter().rev() {
            let mut v = rhs.clone();
            for (c, a) in row {
                if c != p {
                    v -= a * &x[*c];
                }
            }
            x[*p] = v;
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn solves_underdetermined_system() {
        let mut s = SparseSystem::new();
        s.push([(0, r(1)), (1, r(1)), (2, r(1))].into(), r(6));
        s.push([(1, r(1)), (2, r(-1))].into(), r(0));
        s.push([(0, r(2)), (1, r(2)), (2, r(2))].into(), r(12));
        let x = s.solve(3).unwrap();
        assert_eq!(&x[0] + &x[1] + &x[2], r(6));
        assert_eq!(&x[1] - &x[2], r(0));
    }

    #[test]
    fn detects_inconsistency() {
        let mut s = SparseSystem::new();
        s.push([(0, r(1))].into(), r(1));
        s.push([(0, r(2))].into(), r(3));
        assert!(s.solve(1).is_none());
    }
}
