//! Buchberger's algorithm on exponent vectors permuted into priority order.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::poly::{Monomial, Rational};

use super::order::{compare_permuted, OrderKind};
use super::{GroebnerConfig, GroebnerError};

/// Terms sorted descending in the order; nonzero coefficients.
pub(crate) type Terms = Vec<(Monomial, Rational)>;

#[derive(Clone, Debug)]
pub(crate) struct GPoly {
    pub terms: Terms,
    mask: u64,
}

fn support_mask(m: &Monomial) -> u64 {
    let mut mask = 0u64;
    for (i, &e) in m.exponents().iter().enumerate() {
        if e > 0 {
            mask |= 1 << (i % 64);
        }
    }
    mask
}

impl GPoly {
    pub fn new(terms: Terms) -> Self {
        let mask = terms.first().map(|(m, _)| support_mask(m)).unwrap_or(0);
        GPoly { terms, mask }
    }

    pub fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }
}

pub(crate) fn sort_terms(kind: OrderKind, terms: &mut Terms) {
    terms.sort_by(|a, b| compare_permuted(kind, &b.0, &a.0));
}

fn make_monic(mut terms: Terms) -> Terms {
    if let Some((_, lc)) = terms.first() {
        if !lc.is_one() {
            let inv = lc.recip();
            for (_, c) in terms.iter_mut() {
                *c *= &inv;
            }
        }
    }
    terms
}

/// `a - c * m * b`, both inputs sorted descending.
fn sub_mul(kind: OrderKind, a: &[(Monomial, Rational)], c: &Rational, m: &Monomial, b: &[(Monomial, Rational)]) -> Terms {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut i = 0;
    let mut bi = b.iter().map(|(bm, bc)| (bm.mul(m), bc * c)).peekable();
    while i < a.len() {
        match bi.peek() {
            None => break,
            Some((bm, _)) => match compare_permuted(kind, &a[i].0, bm) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let (bm, bc) = bi.next().unwrap();
                    out.push((bm, -bc));
                }
                Ordering::Equal => {
                    let (bm, bc) = bi.next().unwrap();
                    let s = &a[i].1 - bc;
                    if !s.is_zero() {
                        out.push((bm, s));
                    }
                    i += 1;
                }
            },
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend(bi.map(|(m, c)| (m, -c)));
    out
}

fn find_divisor<'a>(basis: &'a [GPoly], active: &[usize], m: &Monomial) -> Option<&'a GPoly> {
    let mask = support_mask(m);
    active
        .iter()
        .map(|&k| &basis[k])
        .find(|g| g.mask & !mask == 0 && g.lm().divides(m))
}

/// A monomial ordered by `kind`, for use as a map key.
struct Key {
    kind: OrderKind,
    m: Monomial,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_permuted(self.kind, &self.m, &other.m)
    }
}

/// Full reduction of `p` by the polynomials `basis[active]` (all monic).
pub(crate) fn reduce(kind: OrderKind, p: Terms, basis: &[GPoly], active: &[usize]) -> Terms {
    let mut rem: Terms = Vec::new();
    let mut cur: BTreeMap<Key, Rational> = p.into_iter().map(|(m, c)| (Key { kind, m }, c)).collect();
    while let Some((Key { m: lm, .. }, lc)) = cur.pop_last() {
        match find_divisor(basis, active, &lm) {
            Some(g) => {
                let q = g.lm().quotient_of(&lm);
                for (gm, gc) in &g.terms[1..] {
                    let key = Key { kind, m: gm.mul(&q) };
                    let delta = &lc * gc;
                    match cur.entry(key) {
                        Entry::Vacant(e) => {
                            e.insert(-delta);
                        }
                        Entry::Occupied(mut e) => {
                            *e.get_mut() -= delta;
                            if e.get().is_zero() {
                                e.remove();
                            }
                        }
                    }
                }
            }
            None => rem.push((lm, lc)),
        }
    }
    rem
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    degree: u32,
}

fn spoly(kind: OrderKind, f: &GPoly, g: &GPoly, lcm: &Monomial) -> Terms {
    let mf = f.lm().quotient_of(lcm);
    let mg = g.lm().quotient_of(lcm);
    let lhs: Terms = f.terms[1..].iter().map(|(m, c)| (m.mul(&mf), c.clone())).collect();
    sub_mul(kind, &lhs, &Rational::one(), &mg, &g.terms[1..])
}

/// Returns a reduced monic basis sorted by leading monomial descending.
pub(crate) fn groebner(
    kind: OrderKind,
    gens: Vec<Terms>,
    config: &GroebnerConfig,
) -> Result<Vec<Terms>, GroebnerError> {
    let mut basis: Vec<GPoly> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();
    let mut processed = 0usize;

    let mut input: Vec<Terms> = gens.into_iter().filter(|t| !t.is_empty()).collect();
    // small leading terms first tends to help
    input.sort_by(|a, b| compare_permuted(kind, &a[0].0, &b[0].0));
    for g in input {
        let r = reduce(kind, g, &basis, &active);
        if r.is_empty() {
            continue;
        }
        if r[0].0.is_one() {
            return Ok(vec![vec![(r[0].0.clone(), Rational::one())]]);
        }
        insert(GPoly::new(make_monic(r)), &mut basis, &mut active, &mut pairs, config)?;
    }

    while !pairs.is_empty() {
        let best = (0..pairs.len())
            .min_by(|&a, &b| {
                let (p, q) = (&pairs[a], &pairs[b]);
                p.degree
                    .cmp(&q.degree)
                    .then_with(|| compare_permuted(kind, &p.lcm, &q.lcm))
                    .then_with(|| (p.i, p.j).cmp(&(q.i, q.j)))
            })
            .unwrap();
        let pair = pairs.swap_remove(best);
        processed += 1;
        if processed > config.max_pairs {
            return Err(GroebnerError::PairLimit(config.max_pairs));
        }
        let s = spoly(kind, &basis[pair.i], &basis[pair.j], &pair.lcm);
        let r = reduce(kind, s, &basis, &active);
        if r.is_empty() {
            continue;
        }
        if r[0].0.is_one() {
            return Ok(vec![vec![(r[0].0.clone(), Rational::one())]]);
        }
        insert(GPoly::new(make_monic(r)), &mut basis, &mut active, &mut pairs, config)?;
    }

    // interreduce tails; leading monomials are already pairwise non-dividing
    let mut out = Vec::with_capacity(active.len());
    for (pos, &k) in active.iter().enumerate() {
        let others: Vec<usize> = active
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != pos)
            .map(|(_, &k)| k)
            .collect();
        let g = &basis[k];
        let mut terms = vec![g.terms[0].clone()];
        terms.extend(reduce(kind, g.terms[1..].to_vec(), &basis, &others));
        out.push(terms);
    }
    out.sort_by(|a, b| compare_permuted(kind, &b[0].0, &a[0].0));
    Ok(out)
}

/// Gebauer-Möller update for a new element `h`.
fn insert(
    h: GPoly,
    basis: &mut Vec<GPoly>,
    active: &mut Vec<usize>,
    pairs: &mut Vec<Pair>,
    config: &GroebnerConfig,
) -> Result<(), GroebnerError> {
    let hi = basis.len();
    let hlm = h.lm().clone();
    basis.push(h);

    let cand: Vec<(usize, Monomial, bool)> = active
        .iter()
        .map(|&g| {
            let lm = basis[g].lm();
            (g, lm.lcm(&hlm), lm.is_coprime(&hlm))
        })
        .collect();

    // chain criterion among the new pairs
    let mut kept: Vec<(usize, Monomial, bool)> = Vec::new();
    for (idx, (g, l, coprime)) in cand.iter().enumerate() {
        let dominated = cand[idx + 1..].iter().any(|(_, l2, _)| l2.divides(l))
            || kept.iter().any(|(_, l2, _)| l2.divides(l));
        if *coprime || !dominated {
            kept.push((*g, l.clone(), *coprime));
        }
    }
    // equal lcms: keep only one, preferring a coprime representative
    let mut fresh: Vec<(usize, Monomial)> = Vec::new();
    let mut seen: Vec<(Monomial, bool)> = Vec::new();
    for (g, l, coprime) in kept {
        if let Some(entry) = seen.iter_mut().find(|(m, _)| *m == l) {
            entry.1 |= coprime;
            continue;
        }
        seen.push((l.clone(), coprime));
        fresh.push((g, l));
    }
    // product criterion
    let fresh: Vec<(usize, Monomial)> = fresh
        .into_iter()
        .filter(|(_, l)| !seen.iter().any(|(m, c)| m == l && *c))
        .collect();

    // old pairs removed when h's leading monomial strictly cuts their chain
    pairs.retain(|p| {
        if !hlm.divides(&p.lcm) {
            return true;
        }
        let li = basis[p.i].lm().lcm(&hlm);
        let lj = basis[p.j].lm().lcm(&hlm);
        li == p.lcm || lj == p.lcm
    });

    for (g, l) in fresh {
        let degree = l.degree();
        pairs.push(Pair { i: g, j: hi, lcm: l, degree });
    }

    active.retain(|&g| !hlm.divides(basis[g].lm()));
    active.push(hi);
    if active.len() > config.max_basis {
        return Err(GroebnerError::BasisLimit(config.max_basis));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(e: &[u16], c: i64) -> (Monomial, Rational) {
        (Monomial::from_exponents(e.to_vec()), Rational::from_integer(c.into()))
    }

    #[test]
    fn sub_mul_cancels() {
        let a = vec![t(&[2, 0], 1), t(&[0, 1], 3)];
        let b = vec![t(&[1, 0], 1), t(&[0, 0], 2)];
        let r = sub_mul(OrderKind::GrevLex, &a, &Rational::one(), &Monomial::from_exponents(vec![1, 0]), &b);
        assert_eq!(r, vec![t(&[1, 0], -2), t(&[0, 1], 3)]);
    }
}
