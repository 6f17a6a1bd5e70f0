//! Sparse exact linear algebra over Q.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::poly::Rational;

/// A sparse row: column index to nonzero coefficient.
pub type Row = BTreeMap<usize, Rational>;

/// Incremental row echelon form. Pivot columns are chosen as the smallest
/// column present in a row, so lower-indexed unknowns become pivots first
/// and higher-indexed ones are left free.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    ncols: usize,
    pivots: BTreeMap<usize, Row>,
    inconsistent: bool,
}

fn axpy(target: &mut Row, factor: &Rational, source: &Row) {
    for (&c, v) in source {
        let e = target.entry(c).or_insert_with(Rational::zero);
        *e -= factor * v;
        if e.is_zero() {
            target.remove(&c);
        }
    }
}

impl Echelon {
    /// Rows have columns `0..ncols`; column `ncols` holds the right-hand side
    /// when solving.
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            pivots: BTreeMap::new(),
            inconsistent: false,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    /// Adds the equation `row · x = rhs`.
    pub fn push(&mut self, mut row: Row, rhs: Rational) {
        row.retain(|_, v| !v.is_zero());
        if !rhs.is_zero() {
            row.insert(self.ncols, rhs);
        }
        loop {
            let Some((&c, v)) = row.iter().next() else {
                return;
            };
            if c == self.ncols {
                self.inconsistent = true;
                return;
            }
            match self.pivots.get(&c) {
                Some(p) => {
                    let f = v.clone();
                    axpy(&mut row, &f, p);
                }
                None => {
                    let inv = v.recip();
                    for x in row.values_mut() {
                        *x *= &inv;
                    }
                    self.pivots.insert(c, row);
                    return;
                }
            }
        }
    }

    /// Back-substitutes into reduced row echelon form.
    fn reduce(&mut self) {
        let cols: Vec<usize> = self.pivots.keys().rev().copied().collect();
        for &c in &cols {
            let prow = self.pivots[&c].clone();
            for row in self.pivots.range_mut(..c).map(|(_, r)| r) {
                if let Some(f) = row.get(&c).cloned() {
                    axpy(row, &f, &prow);
                }
            }
        }
    }

    /// A solution with all free unknowns set to zero, if one exists.
    pub fn solve(mut self) -> Option<Vec<Rational>> {
        if self.inconsistent {
            return None;
        }
        self.reduce();
        let mut x = vec![Rational::zero(); self.ncols];
        for (&c, row) in &self.pivots {
            if let Some(v) = row.get(&self.ncols) {
                x[c] = v.clone();
            }
        }
        Some(x)
    }

    /// A basis of the solution space of the homogeneous system.
    pub fn nullspace(mut self) -> Vec<Vec<Rational>> {
        self.reduce();
        let mut out = Vec::new();
        for free in (0..self.ncols).filter(|c| !self.pivots.contains_key(c)) {
            let mut v = vec![Rational::zero(); self.ncols];
            v[free] = Rational::one();
            for (&c, row) in &self.pivots {
                if let Some(a) = row.get(&free) {
                    v[c] = -a.clone();
                }
            }
            out.push(v);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use proptest::prelude::*;

    fn row(entries: &[(usize, i64)]) -> Row {
        entries.iter().map(|&(c, v)| (c, rat(v))).collect()
    }

    #[test]
    fn solves_with_free_variables_zero() {
        let mut e = Echelon::new(3);
        e.push(row(&[(0, 1), (1, 1)]), rat(3));
        e.push(row(&[(1, 1), (2, -1)]), rat(1));
        let x = e.solve().unwrap();
        assert_eq!(x, vec![rat(2), rat(1), rat(0)]);
    }

    #[test]
    fn detects_inconsistency() {
        let mut e = Echelon::new(2);
        e.push(row(&[(0, 1), (1, 1)]), rat(1));
        e.push(row(&[(0, 2), (1, 2)]), rat(3));
        assert!(e.solve().is_none());
    }

    #[test]
    fn nullspace_of_rank_one() {
        let mut e = Echelon::new(3);
        e.push(row(&[(0, 1), (1, 2), (2, 3)]), rat(0));
        let ns = e.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert_eq!(&v[0] + rat(2) * &v[1] + rat(3) * &v[2], rat(0));
        }
    }

    proptest! {
        #[test]
        fn solutions_satisfy_random_systems(
            entries in proptest::collection::vec(proptest::collection::vec(-3i64..4, 4), 1..5),
            x0 in proptest::collection::vec(-3i64..4, 4),
        ) {
            // rhs built from a known solution, so the system is consistent
            let mut e = Echelon::new(4);
            let mut eqs = Vec::new();
            for r in &entries {
                let rhs: i64 = r.iter().zip(&x0).map(|(a, b)| a * b).sum();
                let rr = row(&r.iter().copied().enumerate().collect::<Vec<_>>());
                e.push(rr.clone(), rat(rhs));
                eqs.push((rr, rat(rhs)));
            }
            let x = e.solve().expect("consistent");
            for (rr, rhs) in eqs {
                let lhs = rr.iter().fold(rat(0), |acc, (&c, v)| acc + v * &x[c]);
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
