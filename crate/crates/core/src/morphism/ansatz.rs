//! Bounded-degree linear ansatz solving modulo an ideal.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::groebner::GroebnerBasis;
use crate::linalg::{Echelon, Row};
use crate::poly::{Monomial, Polynomial, Rational};

use super::MorphismError;

/// Linear equations over unknown polynomial entries, each entry a
/// combination of fixed monomials with unknown rational coefficients.
pub(crate) struct Ansatz<'a> {
    gb: &'a GroebnerBasis,
    monomials: &'a [Monomial],
    slots: usize,
    rows: Echelon,
}

impl<'a> Ansatz<'a> {
    pub fn new(gb: &'a GroebnerBasis, monomials: &'a [Monomial], slots: usize) -> Self {
        Ansatz {
            gb,
            monomials,
            slots,
            rows: Echelon::new(slots * monomials.len()),
        }
    }

    fn unknown(&self, slot: usize, m: usize) -> usize {
        slot * self.monomials.len() + m
    }

    /// Adds `Σ coeff · slot + constant ≡ 0` modulo the ideal.
    pub fn equation(&mut self, terms: &[(usize, &Polynomial)], constant: &Polynomial) -> Result<(), MorphismError> {
        let mut rows: BTreeMap<Monomial, Row> = BTreeMap::new();
        for &(slot, coeff) in terms {
            if coeff.is_zero() {
                continue;
            }
            for (mi, m) in self.monomials.iter().enumerate() {
                let p = coeff.mul_term(m, &Rational::one());
                let nf = self.gb.normal_form(&p)?;
                let u = self.unknown(slot, mi);
                for (mono, c) in nf.terms() {
                    let row = rows.entry(mono.clone()).or_default();
                    let e = row.entry(u).or_insert_with(Rational::zero);
                    *e += c;
                }
            }
        }
        let cnf = self.gb.normal_form(constant)?;
        let mut rhs: BTreeMap<Monomial, Rational> = cnf.terms().iter().map(|(m, c)| (m.clone(), -c.clone())).collect();
        for (mono, row) in rows {
            let r = rhs.remove(&mono).unwrap_or_else(Rational::zero);
            self.rows.push(row, r);
        }
        for (_, r) in rhs {
            self.rows.push(Row::new(), r);
        }
        Ok(())
    }

    pub fn solve(self) -> Option<Vec<Polynomial>> {
        let ctx = self.gb.context().clone();
        let monomials = self.monomials;
        let slots = self.slots;
        let x = self.rows.solve()?;
        Some(
            (0..slots)
                .map(|s| {
                    Polynomial::from_terms(
                        &ctx,
                        monomials
                            .iter()
                            .enumerate()
                            .map(|(mi, m)| (m.clone(), x[s * monomials.len() + mi].clone())),
                    )
                })
                .collect(),
        )
    }

    pub fn nullspace(self) -> Vec<Vec<Polynomial>> {
        let ctx = self.gb.context().clone();
        let monomials = self.monomials;
        let slots = self.slots;
        self.rows
            .nullspace()
            .into_iter()
            .map(|x| {
                (0..slots)
                    .map(|s| {
                        Polynomial::from_terms(
                            &ctx,
                            monomials
                                .iter()
                                .enumerate()
                                .map(|(mi, m)| (m.clone(), x[s * monomials.len() + mi].clone())),
                        )
                    })
                    .collect()
            })
            .collect()
    }
}

