//! Finitely presented rings `Q[vars] / (generators)`.

use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::groebner::{buchberger_in, GroebnerBasis, GroebnerConfig, GroebnerError, MonomialOrder};
use crate::poly::{is_identifier, Context, PolyError, Polynomial, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("invalid presentation name '{0}'")]
    InvalidName(String),
    #[error("generator {0} is zero")]
    ZeroGenerator(usize),
    #[error("generator {0} does not live in the presentation's variables")]
    ForeignGenerator(usize),
    #[error("variety variables must be plain coordinates, found {0}")]
    JetVariable(String),
    #[error("variable name collision: {0}")]
    NameCollision(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A ring given by variables and ideal generators, plus a name used in file
/// headers. Clones share a lazily computed Gröbner basis for the default
/// order.
#[derive(Clone)]
pub struct Presentation {
    name: String,
    ctx: Arc<Context>,
    generators: Vec<Polynomial>,
    basis: Arc<Mutex<Option<Arc<GroebnerBasis>>>>,
}

impl Presentation {
    pub fn new(
        name: impl Into<String>,
        ctx: Arc<Context>,
        generators: Vec<Polynomial>,
    ) -> Result<Self, PresentationError> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(PresentationError::InvalidName(name));
        }
        for (i, g) in generators.iter().enumerate() {
            if !g.context().same_as(&ctx) {
                return Err(PresentationError::ForeignGenerator(i));
            }
        }
        Ok(Presentation {
            name,
            ctx,
            generators,
            basis: Arc::new(Mutex::new(None)),
        })
    }

    /// An affine variety: plain ambient variables and nonzero generators.
    pub fn variety(
        name: impl Into<String>,
        ctx: Arc<Context>,
        generators: Vec<Polynomial>,
    ) -> Result<Self, PresentationError> {
        if let Some(v) = ctx.vars().iter().find(|v| v.level().is_some()) {
            return Err(PresentationError::JetVariable(v.to_string()));
        }
        if let Some(i) = generators.iter().position(Polynomial::is_zero) {
            return Err(PresentationError::ZeroGenerator(i));
        }
        Self::new(name, ctx, generators)
    }

    /// Affine space on the given plain variable names.
    pub fn affine_space<S: AsRef<str>>(
        name: impl Into<String>,
        vars: &[S],
    ) -> Result<Self, PresentationError> {
        Self::variety(name, Context::from_names(vars)?, Vec::new())
    }

    /// Parses generator expressions over the given plain variables.
    pub fn from_strings<S: AsRef<str>>(
        name: impl Into<String>,
        vars: &[S],
        generators: &[&str],
    ) -> Result<Self, PresentationError> {
        let ctx = Context::from_names(vars)?;
        let gens = generators
            .iter()
            .map(|g| crate::poly::parse(g, &ctx))
            .collect::<Result<Vec<_>, _>>()?;
        Self::variety(name, ctx, gens)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn num_vars(&self) -> usize {
        self.ctx.len()
    }

    pub fn var(&self, i: usize) -> Polynomial {
        Polynomial::var(&self.ctx, i)
    }

    /// Same ring under another name.
    pub fn renamed(&self, name: impl Into<String>) -> Result<Self, PresentationError> {
        Self::new(name, self.ctx.clone(), self.generators.clone())
    }

    /// `self × A^r`: the same generators in a ring with `extra` appended as
    /// unconstrained variables.
    pub fn with_free_variables(
        &self,
        name: impl Into<String>,
        extra: &[Variable],
    ) -> Result<Self, PresentationError> {
        if extra.is_empty() {
            return self.renamed(name);
        }
        for v in extra {
            if self.ctx.contains(v) {
                return Err(PresentationError::NameCollision(v.to_string()));
            }
        }
        let ctx = self.ctx.extended(extra)?;
        let gens = self
            .generators
            .iter()
            .map(|g| g.embed(&ctx))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(name, ctx, gens)
    }

    /// The default monomial order used for all membership questions about
    /// this ring.
    pub fn default_order(&self) -> MonomialOrder {
        MonomialOrder::default_for(&self.ctx)
    }

    /// Reduced Gröbner basis of the ideal for the default order; computed
    /// once and shared.
    pub fn groebner(&self, config: &GroebnerConfig) -> Result<Arc<GroebnerBasis>, GroebnerError> {
        let mut slot = self.basis.lock().expect("groebner cache poisoned");
        if let Some(gb) = slot.as_ref() {
            return Ok(gb.clone());
        }
        let gb = Arc::new(buchberger_in(&self.ctx, &self.generators, &self.default_order(), config)?);
        *slot = Some(gb.clone());
        Ok(gb)
    }

    /// Parses an expression in this ring's variables.
    pub fn parse(&self, text: &str) -> Result<Polynomial, PolyError> {
        crate::poly::parse(text, &self.ctx)
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Presentation")
            .field("name", &self.name)
            .field("vars", &self.ctx.to_string())
            .field("generators", &self.generators)
            .finish()
    }
}

/// Fresh variable names `prefix1 .. prefixR`.
pub fn numbered_variables(prefix: &str, count: usize, offset: usize) -> Result<Vec<Variable>, PolyError> {
    (1..=count)
        .map(|k| Variable::parse(&format!("{prefix}{}", k + offset)))
        .collect()
}
