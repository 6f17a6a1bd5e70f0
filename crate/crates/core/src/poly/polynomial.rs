use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::monomial::{grevlex_cmp, Monomial};
use super::variable::{Context, Variable};
use super::{PolyError, Rational};

/// Exact multivariate polynomial over the rationals.
///
/// Terms are kept in canonical form: distinct monomials, nonzero
/// coefficients, sorted by descending graded reverse lexicographic order on
/// the context's variable order. Equality is term-list equality.
#[derive(Clone)]
pub struct Polynomial {
    ctx: Arc<Context>,
    terms: Vec<(Monomial, Rational)>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_as(&other.ctx) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero(ctx: &Arc<Context>) -> Self {
        Polynomial {
            ctx: ctx.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(ctx: &Arc<Context>) -> Self {
        Self::constant(ctx, Rational::one())
    }

    pub fn constant(ctx: &Arc<Context>, c: Rational) -> Self {
        let terms = if c.is_zero() {
            Vec::new()
        } else {
            vec![(Monomial::one(ctx.len()), c)]
        };
        Polynomial {
            ctx: ctx.clone(),
            terms,
        }
    }

    pub fn from_int(ctx: &Arc<Context>, c: i64) -> Self {
        Self::constant(ctx, Rational::from_integer(BigInt::from(c)))
    }

    /// The `i`-th variable of the context.
    pub fn var(ctx: &Arc<Context>, i: usize) -> Self {
        Polynomial {
            ctx: ctx.clone(),
            terms: vec![(Monomial::var(ctx.len(), i), Rational::one())],
        }
    }

    pub fn variable(ctx: &Arc<Context>, v: &Variable) -> Result<Self, PolyError> {
        let i = ctx
            .index_of(v)
            .ok_or_else(|| PolyError::UnknownVariable(v.to_string()))?;
        Ok(Self::var(ctx, i))
    }

    pub fn monomial(ctx: &Arc<Context>, m: Monomial, c: Rational) -> Self {
        debug_assert_eq!(m.0.len(), ctx.len());
        let terms = if c.is_zero() { Vec::new() } else { vec![(m, c)] };
        Polynomial {
            ctx: ctx.clone(),
            terms,
        }
    }

    /// Canonicalizes an arbitrary bag of terms.
    pub fn from_terms<I>(ctx: &Arc<Context>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.0.len(), ctx.len());
            accumulate(&mut acc, m, c);
        }
        Self::from_map(ctx, acc)
    }

    pub(crate) fn from_map(ctx: &Arc<Context>, acc: HashMap<Monomial, Rational>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| grevlex_cmp(&b.0 .0, &a.0 .0));
        Polynomial {
            ctx: ctx.clone(),
            terms,
        }
    }

    /// Builds from terms already sorted in storage order with no zero
    /// coefficients and no duplicates.
    pub(crate) fn from_sorted_terms(ctx: &Arc<Context>, terms: Vec<(Monomial, Rational)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| grevlex_cmp(&w[0].0 .0, &w[1].0 .0).is_gt()));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Polynomial {
            ctx: ctx.clone(),
            terms,
        }
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, Rational)> {
        self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .iter()
            .find(|(m, _)| m.is_one())
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u16 {
        self.terms.iter().map(|(m, _)| m.0[i]).max().unwrap_or(0)
    }

    /// Indices of the variables that occur.
    pub fn support(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        for (m, _) in &self.terms {
            s.extend(m.support());
        }
        s
    }

    fn var_weights(&self) -> Vec<u32> {
        self.ctx.vars().iter().map(Variable::weight).collect()
    }

    /// The set of weights (jet levels summed over each monomial) of the terms.
    pub fn weights(&self) -> BTreeSet<u32> {
        let w = self.var_weights();
        self.terms.iter().map(|(m, _)| m.weighted_degree(&w)).collect()
    }

    /// True iff every term has weight `weight` (vacuously true for zero).
    pub fn is_weight_homogeneous(&self, weight: u32) -> bool {
        self.first_term_off_weight(weight).is_none()
    }

    /// The first term whose weight differs from `weight`, printed.
    pub fn first_term_off_weight(&self, weight: u32) -> Option<Polynomial> {
        let w = self.var_weights();
        self.terms
            .iter()
            .find(|(m, _)| m.weighted_degree(&w) != weight)
            .map(|(m, c)| Polynomial::monomial(&self.ctx, m.clone(), c.clone()))
    }

    /// Highest jet level among the variables that occur (plain variables
    /// count as level 0).
    pub fn max_level(&self) -> u32 {
        self.support()
            .into_iter()
            .map(|i| self.ctx.var(i).weight())
            .max()
            .unwrap_or(0)
    }

    fn check_ctx(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.ctx.same_as(&other.ctx) {
            Ok(())
        } else {
            Err(PolyError::ContextMismatch {
                left: self.ctx.to_string(),
                right: other.ctx.to_string(),
            })
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ctx(other)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ctx(other)?;
        Ok(self.merge(other, true))
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ctx(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn merge(&self, other: &Polynomial, negate: bool) -> Polynomial {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match grevlex_cmp(&a[i].0 .0, &b[j].0 .0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for (m, c) in &b[j..] {
            out.push((m.clone(), if negate { -c } else { c.clone() }));
        }
        Polynomial::from_sorted_terms(&self.ctx, out)
    }

    fn mul_unchecked(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(&self.ctx);
        }
        if other.terms.len() == 1 {
            return self.mul_term(&other.terms[0].0, &other.terms[0].1);
        }
        if self.terms.len() == 1 {
            return other.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        let mut acc: HashMap<Monomial, Rational> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                accumulate(&mut acc, ma.mul(mb), ca * cb);
            }
        }
        Polynomial::from_map(&self.ctx, acc)
    }

    /// Multiplication by a single term preserves the term order.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ctx);
        }
        let terms = self
            .terms
            .iter()
            .map(|(mi, ci)| (mi.mul(m), ci * c))
            .collect();
        Polynomial::from_sorted_terms(&self.ctx, terms)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        self.mul_term(&Monomial::one(self.ctx.len()), c)
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut result = Polynomial::one(&self.ctx);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }

    /// Formal partial derivative with respect to the `i`-th variable.
    pub fn partial_derivative(&self, i: usize) -> Polynomial {
        let terms = self.terms.iter().filter(|(m, _)| m.0[i] > 0).map(|(m, c)| {
            let mut e = m.0.clone();
            let k = e[i];
            e[i] -= 1;
            (Monomial(e), c * Rational::from_integer(BigInt::from(k)))
        });
        Polynomial::from_terms(&self.ctx, terms)
    }

    pub fn derivative(&self, v: &Variable) -> Result<Polynomial, PolyError> {
        let i = self
            .ctx
            .index_of(v)
            .ok_or_else(|| PolyError::UnknownVariable(v.to_string()))?;
        Ok(self.partial_derivative(i))
    }

    /// Ring homomorphism sending the `i`-th variable to `images[i]`; all
    /// images must share the context `target`.
    pub fn substitute(
        &self,
        images: &[Polynomial],
        target: &Arc<Context>,
    ) -> Result<Polynomial, PolyError> {
        if images.len() != self.ctx.len() {
            return Err(PolyError::ImageCount {
                expected: self.ctx.len(),
                found: images.len(),
            });
        }
        for img in images {
            if !img.ctx.same_as(target) {
                return Err(PolyError::ContextMismatch {
                    left: target.to_string(),
                    right: img.ctx.to_string(),
                });
            }
        }
        let mut cache = PowerCache::new(images);
        let refs: Vec<&(Monomial, Rational)> = self.terms.iter().collect();
        let mut acc = HashMap::new();
        substitute_rec(&refs, 0, &mut cache, target, &Polynomial::one(target), &mut acc);
        Ok(Polynomial::from_map(target, acc))
    }

    /// Substitution driven by a variable map. Variables that occur in `self`
    /// but have no image are an error.
    pub fn substitute_map(
        &self,
        images: &HashMap<Variable, Polynomial>,
        target: &Arc<Context>,
    ) -> Result<Polynomial, PolyError> {
        let support = self.support();
        let mut full = Vec::with_capacity(self.ctx.len());
        for (i, v) in self.ctx.vars().iter().enumerate() {
            match images.get(v) {
                Some(p) => full.push(p.clone()),
                None if support.contains(&i) => {
                    return Err(PolyError::MissingImage(v.to_string()))
                }
                None => full.push(Polynomial::zero(target)),
            }
        }
        self.substitute(&full, target)
    }

    /// Re-expresses the polynomial in another context by variable identity.
    pub fn embed(&self, target: &Arc<Context>) -> Result<Polynomial, PolyError> {
        if self.ctx.same_as(target) {
            return Ok(self.clone());
        }
        let support = self.support();
        let mut map = vec![usize::MAX; self.ctx.len()];
        for &i in &support {
            let v = self.ctx.var(i);
            map[i] = target
                .index_of(v)
                .ok_or_else(|| PolyError::UnknownVariable(v.to_string()))?;
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = vec![0u16; target.len()];
            for &i in &support {
                e[map[i]] = m.0[i];
            }
            (Monomial(e), c.clone())
        });
        Ok(Polynomial::from_terms(target, terms))
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.ctx.len() {
            return Err(PolyError::ImageCount {
                expected: self.ctx.len(),
                found: point.len(),
            });
        }
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in m.support() {
                t *= num_traits::pow(point[i].clone(), m.0[i] as usize);
            }
            total += t;
        }
        Ok(total)
    }

    /// Splits by powers of the `i`-th variable: returns `c_k` with
    /// `self = sum_k c_k * v^k`, each `c_k` free of `v`.
    pub fn coefficients_in(&self, i: usize) -> Vec<Polynomial> {
        let top = self.degree_in(i) as usize;
        let mut buckets: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); top + 1];
        for (m, c) in &self.terms {
            let k = m.0[i] as usize;
            let mut e = m.0.clone();
            e[i] = 0;
            buckets[k].push((Monomial(e), c.clone()));
        }
        buckets
            .into_iter()
            .map(|b| Polynomial::from_terms(&self.ctx, b))
            .collect()
    }

    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.first().map(|(_, c)| c)
    }

    /// Divides by the leading coefficient (storage order).
    pub fn monic(&self) -> Polynomial {
        match self.leading_coefficient() {
            Some(c) if !c.is_one() => self.scale(&c.recip()),
            _ => self.clone(),
        }
    }
}

pub(crate) fn accumulate(acc: &mut HashMap<Monomial, Rational>, m: Monomial, c: Rational) {
    use std::collections::hash_map::Entry;
    match acc.entry(m) {
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
        }
        Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}

struct PowerCache<'a> {
    images: &'a [Polynomial],
    powers: Vec<Vec<Polynomial>>,
}

impl<'a> PowerCache<'a> {
    fn new(images: &'a [Polynomial]) -> Self {
        PowerCache {
            images,
            powers: vec![Vec::new(); images.len()],
        }
    }

    fn get(&mut self, i: usize, k: u16) -> &Polynomial {
        let k = k as usize;
        let cache = &mut self.powers[i];
        if cache.is_empty() {
            cache.push(Polynomial::one(&self.images[i].ctx));
        }
        while cache.len() <= k {
            let next = cache.last().unwrap().mul_unchecked(&self.images[i]);
            cache.push(next);
        }
        &cache[k]
    }
}

// Horner-style: group terms by the exponent of variable `var`, recurse on
// the remaining variables, and multiply each group's result by the cached
// power once.
fn substitute_rec(
    terms: &[&(Monomial, Rational)],
    var: usize,
    cache: &mut PowerCache<'_>,
    target: &Arc<Context>,
    prefix: &Polynomial,
    acc: &mut HashMap<Monomial, Rational>,
) {
    let nvars = cache.images.len();
    if var == nvars {
        let c: Rational = terms.iter().map(|(_, c)| c.clone()).sum();
        for (m, pc) in &prefix.terms {
            accumulate(acc, m.clone(), pc * &c);
        }
        return;
    }
    let mut groups: Vec<(u16, Vec<&(Monomial, Rational)>)> = Vec::new();
    let mut sorted: Vec<&(Monomial, Rational)> = terms.to_vec();
    sorted.sort_by_key(|(m, _)| m.0[var]);
    for t in sorted {
        let e = t.0 .0[var];
        match groups.last_mut() {
            Some((k, g)) if *k == e => g.push(t),
            _ => groups.push((e, vec![t])),
        }
    }
    for (k, group) in groups {
        if k == 0 {
            substitute_rec(&group, var + 1, cache, target, prefix, acc);
        } else {
            let p = prefix.mul_unchecked(cache.get(var, k));
            if p.is_zero() {
                continue;
            }
            substitute_rec(&group, var + 1, cache, target, &p, acc);
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial context mismatch")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial context mismatch")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial context mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        Polynomial::from_sorted_terms(&self.ctx, terms)
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

pub(crate) fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub(crate) fn fmt_monomial(ctx: &Context, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for i in m.support() {
        let e = m.0[i];
        if e == 1 {
            parts.push(ctx.var(i).to_string());
        } else {
            parts.push(format!("{}^{}", ctx.var(i), e));
        }
    }
    parts.join("*")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                f.write_str(&fmt_rational(&abs))?;
            } else if abs.is_one() {
                f.write_str(&fmt_monomial(&self.ctx, m))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), fmt_monomial(&self.ctx, m))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn ctx() -> Arc<Context> {
        Context::from_names(&["x", "y", "z", "t"]).unwrap()
    }

    fn p(s: &str) -> Polynomial {
        parse(s, &ctx()).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(&p("x + 1") + &p("-x"), p("1"));
        assert_eq!(&p("x*z - y^2") + &Polynomial::zero(&ctx()), p("x*z - y^2"));
        assert_eq!(&p("x*z - y^2 + 1") + &p("y^2"), p("x*z + 1"));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&p("y + x*t") * &p("y - x*t"), p("y^2 - x^2*t^2"));
        assert_eq!(&p("x + 3*y") * &Polynomial::one(&ctx()), p("x + 3*y"));
        assert_eq!(p("x + y").pow(2), p("x^2 + 2*x*y + y^2"));
    }

    #[test]
    fn substitute_examples() {
        let c = ctx();
        let x2 = p("x^2");
        let images = vec![p("x + 1"), p("y"), p("z"), p("t")];
        assert_eq!(x2.substitute(&images, &c).unwrap(), p("x^2 + 2*x + 1"));
        let f = p("x*z - y^2 + 1");
        let ident: Vec<_> = (0..4).map(|i| Polynomial::var(&c, i)).collect();
        assert_eq!(f.substitute(&ident, &c).unwrap(), f);
        let action = vec![p("x"), p("y + x*t"), p("z + 2*y*t + x*t^2"), p("t")];
        assert_eq!(f.substitute(&action, &c).unwrap(), f);
    }

    #[test]
    fn substitute_map_reports_missing_image() {
        let c = ctx();
        let mut images = HashMap::new();
        images.insert(Variable::plain("x"), p("y"));
        let err = p("x*z").substitute_map(&images, &c).unwrap_err();
        assert!(matches!(err, PolyError::MissingImage(ref v) if v == "z"));
        // variables that do not occur need no image
        assert_eq!(p("x^2").substitute_map(&images, &c).unwrap(), p("y^2"));
    }

    #[test]
    fn derivative_examples() {
        let c = ctx();
        let y = c.index_of_name("y").unwrap();
        let x = c.index_of_name("x").unwrap();
        assert_eq!(p("x*z - y^2 + 1").partial_derivative(y), p("-2*y"));
        assert_eq!(p("7/3").partial_derivative(x), Polynomial::zero(&c));
        assert_eq!(p("x^2*z").partial_derivative(x), p("2*x*z"));
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let other = Context::from_names(&["x", "y"]).unwrap();
        let q = parse("x", &other).unwrap();
        assert!(matches!(
            p("x").checked_add(&q),
            Err(PolyError::ContextMismatch { .. })
        ));
        assert!(p("x").checked_mul(&q).is_err());
    }

    #[test]
    fn printing_is_grevlex_descending() {
        assert_eq!(p("1 + z + x*z - y^2").to_string(), "-y^2 + x*z + z + 1");
        assert_eq!(p("-3/4*z^2 + 1/4*x*z^3").to_string(), "1/4*x*z^3 - 3/4*z^2");
        assert_eq!(Polynomial::zero(&ctx()).to_string(), "0");
    }

    #[test]
    fn weights_follow_jet_levels() {
        let c = Context::from_names(&["x#0", "y#1", "z#2"]).unwrap();
        let q = parse("x#0*z#2 + y#1^2", &c).unwrap();
        assert!(q.is_weight_homogeneous(2));
        let r = parse("x#0 + y#1", &c).unwrap();
        assert!(!r.is_weight_homogeneous(1));
        assert_eq!(r.first_term_off_weight(1).unwrap().to_string(), "x#0");
    }

    #[test]
    fn embed_by_identity() {
        let small = Context::from_names(&["y", "x"]).unwrap();
        let q = parse("x*y + y", &small).unwrap();
        assert_eq!(q.embed(&ctx()).unwrap(), p("x*y + y"));
        assert!(p("t").embed(&small).is_err());
    }
}
