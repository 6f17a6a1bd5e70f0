use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::PolyError;

/// A ring variable: either a plain coordinate (`x`) or a jet coordinate
/// (`x#j`, the level-`j` coefficient of `x`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    base: String,
    level: Option<u32>,
}

impl Variable {
    pub fn plain(base: impl Into<String>) -> Self {
        Variable {
            base: base.into(),
            level: None,
        }
    }

    pub fn jet(base: impl Into<String>, level: u32) -> Self {
        Variable {
            base: base.into(),
            level: Some(level),
        }
    }

    pub fn base_name(&self) -> &str {
        &self.base
    }

    pub fn level(&self) -> Option<u32> {
        self.level
    }

    /// Weight under the scaling action: the jet level, 0 for plain variables.
    pub fn weight(&self) -> u32 {
        self.level.unwrap_or(0)
    }

    /// Parses `name` or `name#j`. The name must be a letter followed by
    /// letters, digits or underscores.
    pub fn parse(text: &str) -> Result<Self, PolyError> {
        let (base, level) = match text.split_once('#') {
            Some((b, l)) => {
                let level = l
                    .parse::<u32>()
                    .ok()
                    .filter(|_| !l.is_empty() && l.bytes().all(|c| c.is_ascii_digit()))
                    .ok_or_else(|| PolyError::InvalidName(text.to_string()))?;
                (b, Some(level))
            }
            None => (text, None),
        };
        if !is_identifier(base) {
            return Err(PolyError::InvalidName(text.to_string()));
        }
        Ok(Variable {
            base: base.to_string(),
            level,
        })
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.level {
            Some(j) => write!(f, "{}#{}", self.base, j),
            None => f.write_str(&self.base),
        }
    }
}

/// An ordered list of distinct variables. Every polynomial lives in exactly
/// one context; its exponent vectors are indexed by position here.
#[derive(Debug)]
pub struct Context {
    vars: Vec<Variable>,
    index: HashMap<Variable, usize>,
}

impl Context {
    pub fn new(vars: Vec<Variable>) -> Result<Arc<Self>, PolyError> {
        let mut index = HashMap::with_capacity(vars.len());
        for (i, v) in vars.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(PolyError::DuplicateVariable(v.to_string()));
            }
        }
        Ok(Arc::new(Context { vars, index }))
    }

    /// Builds a context of plain variables from names like `["x", "y"]`.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Arc<Self>, PolyError> {
        let vars = names
            .iter()
            .map(|n| Variable::parse(n.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Context::new(vars)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var(&self, i: usize) -> &Variable {
        &self.vars[i]
    }

    pub fn index_of(&self, v: &Variable) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn index_of_name(&self, name: &str) -> Option<usize> {
        Variable::parse(name).ok().and_then(|v| self.index_of(&v))
    }

    pub fn contains(&self, v: &Variable) -> bool {
        self.index.contains_key(v)
    }

    /// Two contexts are interchangeable iff they list the same variables in
    /// the same order.
    pub fn same_as(&self, other: &Context) -> bool {
        std::ptr::eq(self, other) || self.vars == other.vars
    }

    /// A new context with `extra` appended after the existing variables.
    pub fn extended(&self, extra: &[Variable]) -> Result<Arc<Self>, PolyError> {
        let mut vars = self.vars.clone();
        vars.extend_from_slice(extra);
        Context::new(vars)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
