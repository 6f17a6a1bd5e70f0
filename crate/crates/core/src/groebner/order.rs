use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::poly::{Context, Monomial};

use super::GroebnerError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderKind {
    GrevLex,
    Lex,
    /// Elimination order: the first `front` variables of the priority list
    /// form a block compared first (grevlex), ties broken by grevlex on the
    /// rest.
    Block { front: usize },
}

/// A monomial order together with a variable priority list (`priority[0]`
/// is the largest variable, given as a context index).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    kind: OrderKind,
    priority: Arc<[usize]>,
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, priority: Vec<usize>) -> Result<Self, GroebnerError> {
        let mut seen = vec![false; priority.len()];
        for &i in &priority {
            if i >= priority.len() || seen[i] {
                return Err(GroebnerError::BadOrder(
                    "priority list must be a permutation of the variables".into(),
                ));
            }
            seen[i] = true;
        }
        if let OrderKind::Block { front } = kind {
            if front > priority.len() {
                return Err(GroebnerError::BadOrder("block larger than variable list".into()));
            }
        }
        Ok(MonomialOrder {
            kind,
            priority: priority.into(),
        })
    }

    pub fn grevlex(ctx: &Context) -> Self {
        MonomialOrder {
            kind: OrderKind::GrevLex,
            priority: (0..ctx.len()).collect(),
        }
    }

    pub fn lex(ctx: &Context) -> Self {
        MonomialOrder {
            kind: OrderKind::Lex,
            priority: (0..ctx.len()).collect(),
        }
    }

    /// Block order eliminating `front` (context indices): those variables
    /// come first in context order, then the rest in context order.
    pub fn elimination(ctx: &Context, front: &[usize]) -> Result<Self, GroebnerError> {
        let mut priority: Vec<usize> = (0..ctx.len()).filter(|i| front.contains(i)).collect();
        let k = priority.len();
        if k != front.len() {
            return Err(GroebnerError::BadOrder("elimination block has bad indices".into()));
        }
        priority.extend((0..ctx.len()).filter(|i| !front.contains(i)));
        Self::new(OrderKind::Block { front: k }, priority)
    }

    /// Grevlex with plain variables first (declaration order), then jet
    /// variables by descending level and ascending position.
    pub fn default_for(ctx: &Context) -> Self {
        let mut priority: Vec<usize> = (0..ctx.len()).collect();
        priority.sort_by_key(|&i| match ctx.var(i).level() {
            None => (0, 0, i),
            Some(j) => (1, u32::MAX - j, i),
        });
        MonomialOrder {
            kind: OrderKind::GrevLex,
            priority: priority.into(),
        }
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn priority(&self) -> &[usize] {
        &self.priority
    }

    pub fn num_vars(&self) -> usize {
        self.priority.len()
    }

    /// Exponent vector permuted into priority order.
    pub(crate) fn permute(&self, m: &Monomial) -> Monomial {
        Monomial::from_exponents(self.priority.iter().map(|&i| m.exponent(i)).collect())
    }

    pub(crate) fn unpermute(&self, m: &Monomial) -> Monomial {
        let mut e = vec![0u16; self.priority.len()];
        for (k, &i) in self.priority.iter().enumerate() {
            e[i] = m.exponent(k);
        }
        Monomial::from_exponents(e)
    }

    /// Compares monomials given in context coordinates.
    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        compare_permuted(self.kind, &self.permute(a), &self.permute(b))
    }
}

pub(crate) fn compare_permuted(kind: OrderKind, a: &Monomial, b: &Monomial) -> Ordering {
    let (a, b) = (a.exponents(), b.exponents());
    match kind {
        OrderKind::GrevLex => crate::poly::grevlex_cmp(a, b),
        OrderKind::Lex => a.cmp(b),
        OrderKind::Block { front } => crate::poly::grevlex_cmp(&a[..front], &b[..front])
            .then_with(|| crate::poly::grevlex_cmp(&a[front..], &b[front..])),
    }
}

impl fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            OrderKind::GrevLex => write!(f, "grevlex")?,
            OrderKind::Lex => write!(f, "lex")?,
            OrderKind::Block { front } => write!(f, "block({front})")?,
        }
        write!(f, "{:?}", &self.priority[..])
    }
}
