//! Gröbner bases over Q: reduced bases, normal forms, ideal membership and
//! equality, elimination, and the Jacobian smoothness test.

mod basis;
mod order;

use std::sync::Arc;

use thiserror::Error;

use crate::poly::{Context, Monomial, PolyError, Polynomial, Rational};
use crate::presentation::Presentation;

pub use order::{MonomialOrder, OrderKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error("bad monomial order: {0}")]
    BadOrder(String),
    #[error("resource limit exceeded: more than {0} S-pairs")]
    PairLimit(usize),
    #[error("resource limit exceeded: basis larger than {0}")]
    BasisLimit(usize),
    #[error("order has {order} variables but the ring has {ring}")]
    OrderSize { order: usize, ring: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Resource guards for Buchberger runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerConfig {
    pub max_pairs: usize,
    pub max_basis: usize,
}

impl Default for GroebnerConfig {
    fn default() -> Self {
        GroebnerConfig {
            max_pairs: 200_000,
            max_basis: 20_000,
        }
    }
}

/// A reduced Gröbner basis: monic, sorted by leading monomial descending.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    ctx: Arc<Context>,
    order: MonomialOrder,
    internal: Vec<basis::GPoly>,
    polys: Vec<Polynomial>,
}

fn to_internal(order: &MonomialOrder, p: &Polynomial) -> basis::Terms {
    let mut terms: basis::Terms = p
        .terms()
        .iter()
        .map(|(m, c)| (order.permute(m), c.clone()))
        .collect();
    basis::sort_terms(order.kind(), &mut terms);
    terms
}

fn from_internal(order: &MonomialOrder, ctx: &Arc<Context>, terms: &[(Monomial, Rational)]) -> Polynomial {
    Polynomial::from_terms(ctx, terms.iter().map(|(m, c)| (order.unpermute(m), c.clone())))
}

/// Computes the reduced Gröbner basis of the ideal generated by `gens`.
/// The context is taken from the first generator; use [`buchberger_in`]
/// for a possibly empty list.
pub fn buchberger(
    gens: &[Polynomial],
    order: &MonomialOrder,
    config: &GroebnerConfig,
) -> Result<GroebnerBasis, GroebnerError> {
    match gens.first() {
        Some(g) => buchberger_in(g.context(), gens, order, config),
        None => Err(GroebnerError::BadOrder(
            "empty generator list needs an explicit context".into(),
        )),
    }
}

pub fn buchberger_in(
    ctx: &Arc<Context>,
    gens: &[Polynomial],
    order: &MonomialOrder,
    config: &GroebnerConfig,
) -> Result<GroebnerBasis, GroebnerError> {
    if order.num_vars() != ctx.len() {
        return Err(GroebnerError::OrderSize {
            order: order.num_vars(),
            ring: ctx.len(),
        });
    }
    for g in gens {
        if !g.context().same_as(ctx) {
            return Err(PolyError::ContextMismatch {
                left: ctx.to_string(),
                right: g.context().to_string(),
            }
            .into());
        }
    }
    let input = gens.iter().map(|g| to_internal(order, g)).collect();
    let reduced = basis::groebner(order.kind(), input, config)?;
    let polys = reduced.iter().map(|t| from_internal(order, ctx, t)).collect();
    Ok(GroebnerBasis {
        ctx: ctx.clone(),
        order: order.clone(),
        internal: reduced.into_iter().map(basis::GPoly::new).collect(),
        polys,
    })
}

impl GroebnerBasis {
    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    /// Basis elements, in leading-monomial descending order.
    pub fn basis(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.internal.len() == 1 && self.internal[0].lm().is_one()
    }

    /// Leading monomials in context coordinates.
    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.internal.iter().map(|g| self.order.unpermute(g.lm())).collect()
    }

    /// Leading term of `p` under this basis's order.
    pub fn leading_term(&self, p: &Polynomial) -> Option<(Monomial, Rational)> {
        to_internal(&self.order, p)
            .into_iter()
            .next()
            .map(|(m, c)| (self.order.unpermute(&m), c))
    }

    fn check(&self, p: &Polynomial) -> Result<(), GroebnerError> {
        if p.context().same_as(&self.ctx) {
            Ok(())
        } else {
            Err(PolyError::ContextMismatch {
                left: self.ctx.to_string(),
                right: p.context().to_string(),
            }
            .into())
        }
    }

    /// Unique remainder of `p` modulo the ideal.
    pub fn normal_form(&self, p: &Polynomial) -> Result<Polynomial, GroebnerError> {
        self.check(p)?;
        let active: Vec<usize> = (0..self.internal.len()).collect();
        let r = basis::reduce(self.order.kind(), to_internal(&self.order, p), &self.internal, &active);
        Ok(from_internal(&self.order, &self.ctx, &r))
    }

    pub fn contains(&self, p: &Polynomial) -> Result<bool, GroebnerError> {
        Ok(self.normal_form(p)?.is_zero())
    }

    /// Monomials of total degree at most `max_degree` not divisible by any
    /// leading monomial, in context coordinates, sorted by degree and then
    /// descending grevlex.
    pub fn standard_monomials(&self, max_degree: u32) -> Vec<Monomial> {
        let n = self.ctx.len();
        let leads = self.leading_monomials();
        let mut out = Vec::new();
        let mut e = vec![0u16; n];
        fn rec(
            i: usize,
            left: u32,
            e: &mut Vec<u16>,
            leads: &[Monomial],
            out: &mut Vec<Monomial>,
        ) {
            if i == e.len() {
                let m = Monomial::from_exponents(e.clone());
                if !leads.iter().any(|l| l.divides(&m)) {
                    out.push(m);
                }
                return;
            }
            for k in 0..=left {
                e[i] = k as u16;
                rec(i + 1, left - k, e, leads, out);
            }
            e[i] = 0;
        }
        rec(0, max_degree, &mut e, &leads, &mut out);
        out.sort_by(|a, b| {
            a.degree()
                .cmp(&b.degree())
                .then_with(|| crate::poly::grevlex_cmp(b.exponents(), a.exponents()))
        });
        out
    }
}

impl PartialEq for GroebnerBasis {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.ctx.same_as(&other.ctx) && self.polys == other.polys
    }
}

/// Whether two generator lists in the same ring span the same ideal
/// (compares reduced bases).
pub fn ideal_equal(
    ctx: &Arc<Context>,
    a: &[Polynomial],
    b: &[Polynomial],
    config: &GroebnerConfig,
) -> Result<bool, GroebnerError> {
    let order = MonomialOrder::default_for(ctx);
    let ga = buchberger_in(ctx, a, &order, config)?;
    let gb = buchberger_in(ctx, b, &order, config)?;
    Ok(ga == gb)
}

/// Generators of the elimination ideal `I ∩ Q[rest]`, still written in the
/// full ring, where `eliminated` are context indices.
pub fn eliminate(
    ctx: &Arc<Context>,
    gens: &[Polynomial],
    eliminated: &[usize],
    config: &GroebnerConfig,
) -> Result<Vec<Polynomial>, GroebnerError> {
    let order = MonomialOrder::elimination(ctx, eliminated)?;
    let gb = buchberger_in(ctx, gens, &order, config)?;
    Ok(gb
        .basis()
        .iter()
        .filter(|p| p.support().iter().all(|i| !eliminated.contains(i)))
        .cloned()
        .collect())
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(rows: &[Vec<Polynomial>], ctx: &Arc<Context>) -> Polynomial {
    let n = rows.len();
    if n == 0 {
        return Polynomial::one(ctx);
    }
    if n == 1 {
        return rows[0][0].clone();
    }
    let mut acc = Polynomial::zero(ctx);
    for col in 0..n {
        if rows[0][col].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> = rows[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != col)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = &rows[0][col] * &determinant(&minor, ctx);
        acc = if col % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Jacobian matrix: row `a` is the gradient of generator `a`.
pub fn jacobian(v: &Presentation) -> Vec<Vec<Polynomial>> {
    v.generators()
        .iter()
        .map(|f| (0..v.num_vars()).map(|i| f.partial_derivative(i)).collect())
        .collect()
}

/// Smoothness of equidimensional codimension `codim` (default: number of
/// generators): the generators together with all `codim × codim` minors of
/// the Jacobian generate the unit ideal.
pub fn is_smooth(
    v: &Presentation,
    codim: Option<usize>,
    config: &GroebnerConfig,
) -> Result<bool, GroebnerError> {
    let ctx = v.context();
    let c = codim.unwrap_or(v.generators().len());
    let jac = jacobian(v);
    let mut ideal: Vec<Polynomial> = v.generators().to_vec();
    if c > jac.len() || c > v.num_vars() {
        // no minors of that size: the singular locus is everything
        let gb = buchberger_in(ctx, &ideal, &v.default_order(), config)?;
        return Ok(gb.is_unit());
    }
    for rows in subsets(jac.len(), c) {
        for cols in subsets(v.num_vars(), c) {
            let m: Vec<Vec<Polynomial>> = rows
                .iter()
                .map(|&r| cols.iter().map(|&k| jac[r][k].clone()).collect())
                .collect();
            let d = determinant(&m, ctx);
            if !d.is_zero() {
                ideal.push(d);
            }
        }
    }
    let gb = buchberger_in(ctx, &ideal, &v.default_order(), config)?;
    Ok(gb.is_unit())
}

/// Convenience: `1` as a one-element basis check.
pub fn is_unit_ideal(
    ctx: &Arc<Context>,
    gens: &[Polynomial],
    config: &GroebnerConfig,
) -> Result<bool, GroebnerError> {
    Ok(buchberger_in(ctx, gens, &MonomialOrder::default_for(ctx), config)?.is_unit())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn ctx3() -> Arc<Context> {
        Context::from_names(&["x", "y", "z"]).unwrap()
    }

    fn p(ctx: &Arc<Context>, s: &str) -> Polynomial {
        parse(s, ctx).unwrap()
    }

    #[test]
    fn twisted_cubic_basis() {
        let ctx = ctx3();
        let gens = vec![p(&ctx, "y - x^2"), p(&ctx, "z - x^3")];
        let gb = buchberger(&gens, &MonomialOrder::lex(&ctx), &GroebnerConfig::default()).unwrap();
        // lex x > y > z: {x^2 - y, x*y - z, x*z - y^2, y^3 - z^2}
        let expect = ["x^2 - y", "x*y - z", "x*z - y^2", "y^3 - z^2"];
        assert_eq!(gb.len(), 4);
        for e in expect {
            assert!(gb.basis().contains(&p(&ctx, e)), "{e} missing from {:?}", gb.basis());
        }
        assert!(gb.contains(&p(&ctx, "x^4 - y^2")).unwrap());
        assert!(!gb.contains(&p(&ctx, "x - y")).unwrap());
    }

    #[test]
    fn unit_and_zero_ideals() {
        let ctx = ctx3();
        let gb = buchberger(&[p(&ctx, "x"), p(&ctx, "x - 1")], &MonomialOrder::grevlex(&ctx), &GroebnerConfig::default()).unwrap();
        assert!(gb.is_unit());
        assert_eq!(gb.basis(), &[Polynomial::one(&ctx)]);
        let gb = buchberger_in(&ctx, &[], &MonomialOrder::grevlex(&ctx), &GroebnerConfig::default()).unwrap();
        assert!(gb.is_empty());
        assert_eq!(gb.normal_form(&p(&ctx, "x*y + 3")).unwrap(), p(&ctx, "x*y + 3"));
    }

    #[test]
    fn elimination_of_cusp_parametrization() {
        let ctx = Context::from_names(&["t", "x", "y"]).unwrap();
        let gens = vec![p(&ctx, "x - t^2"), p(&ctx, "y - t^3")];
        let elim = eliminate(&ctx, &gens, &[0], &GroebnerConfig::default()).unwrap();
        assert_eq!(elim.len(), 1);
        let f = &elim[0];
        assert!(f == &p(&ctx, "x^3 - y^2") || f == &p(&ctx, "y^2 - x^3"), "{f}");
    }

    #[test]
    fn pair_limit_is_reported() {
        let ctx = ctx3();
        let gens = vec![p(&ctx, "x^2 - y*z"), p(&ctx, "x*y - z^2"), p(&ctx, "x*z - y - 1")];
        let cfg = GroebnerConfig { max_pairs: 1, max_basis: 100 };
        assert_eq!(
            buchberger(&gens, &MonomialOrder::grevlex(&ctx), &cfg).unwrap_err(),
            GroebnerError::PairLimit(1)
        );
    }

    #[test]
    fn smoothness_examples() {
        let cfg = GroebnerConfig::default();
        let smooth = |vars: &[&str], gens: &[&str]| {
            let v = Presentation::from_strings("v", vars, gens).unwrap();
            is_smooth(&v, None, &cfg).unwrap()
        };
        assert!(smooth(&["x", "y"], &["y - x^2"]));
        assert!(smooth(&["x", "y"], &["x^2 + y^2 - 1"]));
        assert!(!smooth(&["x", "y"], &["y^2 - x^3"]));
        assert!(!smooth(&["x", "y"], &["y^2 - x^2 - x^3"]));
        assert!(smooth(&["x", "y", "z"], &["x*z - y^2 + 1"]));
        assert!(smooth(&["x", "y", "z"], &["x^2*z - y^2 + 1"]));
        assert!(smooth(&["x", "y"], &[]));
    }

    #[test]
    fn standard_monomials_of_parabola() {
        let ctx = Context::from_names(&["x", "y"]).unwrap();
        let gb = buchberger(&[p(&ctx, "y - x^2")], &MonomialOrder::grevlex(&ctx), &GroebnerConfig::default()).unwrap();
        // leading monomial x^2
        let sm = gb.standard_monomials(2);
        assert_eq!(sm.len(), 5);
        assert!(!sm.contains(&Monomial::from_exponents(vec![2, 0])));
    }

    #[test]
    fn determinant_small() {
        let ctx = ctx3();
        let m = vec![
            vec![p(&ctx, "x"), p(&ctx, "y"), p(&ctx, "0")],
            vec![p(&ctx, "0"), p(&ctx, "z"), p(&ctx, "1")],
            vec![p(&ctx, "1"), p(&ctx, "0"), p(&ctx, "x")],
        ];
        assert_eq!(determinant(&m, &ctx), p(&ctx, "x^2*z + y"));
    }
}
