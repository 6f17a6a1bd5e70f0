//! Jet schemes of affine varieties.
//!
//! For a variety with coordinates `x_1..x_N` and equations `f_1..f_r`, the
//! m-jet ring has variables `x_i#j` (`0 <= j <= m`) and equations `F_{a,k}`,
//! the coefficient of `t^k` in `f_a(sum_j x#j t^j)`. Variable `x_i#j` has
//! weight `j` and `F_{a,k}` is weight-homogeneous of weight `k`.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::morphism::{MorphismError, RingMap};
use crate::poly::{Context, PolyError, Polynomial, Rational, Variable};
use crate::presentation::{Presentation, PresentationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("infinite jet level is not supported: arc spaces have no finite presentation; use a finite level m")]
    InfiniteLevel,
    #[error("invalid jet level '{0}'")]
    BadLevel(String),
    #[error("requested level {requested} exceeds the presentation's level {available}")]
    LevelTooHigh { requested: u32, available: u32 },
    #[error("level must be at least 1 here")]
    ZeroLevel,
    #[error("jet shape mismatch: {0}")]
    Shape(String),
    #[error("base presentation variable {0} already carries a jet level")]
    NotPlain(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

/// Parses a jet level from user input, rejecting the arc space.
pub fn parse_level(text: &str) -> Result<u32, JetError> {
    let t = text.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "oo" | "∞" => Err(JetError::InfiniteLevel),
        _ => t.parse().map_err(|_| JetError::BadLevel(t.to_string())),
    }
}

/// Jet variables `x_i#j` for levels `0..=m`, ordered by level and then by the
/// base variable order.
pub fn jet_context(base: &Context, m: u32) -> Result<Arc<Context>, JetError> {
    let mut vars = Vec::with_capacity(base.len() * (m as usize + 1));
    for j in 0..=m {
        for v in base.vars() {
            if v.level().is_some() {
                return Err(JetError::NotPlain(v.to_string()));
            }
            vars.push(Variable::jet(v.base_name(), j));
        }
    }
    Ok(Context::new(vars)?)
}

/// Rewrites a base polynomial in the level-`j` copies of its variables.
pub fn at_level(p: &Polynomial, jet_ctx: &Arc<Context>, j: u32) -> Result<Polynomial, JetError> {
    let images = p
        .context()
        .vars()
        .iter()
        .map(|v| Polynomial::variable(jet_ctx, &Variable::jet(v.base_name(), j)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(p.substitute(&images, jet_ctx)?)
}

/// The m-jet presentation of a variety.
#[derive(Clone, Debug)]
pub struct JetPresentation {
    base: Presentation,
    level: u32,
    ring: Presentation,
    /// `strata[a][k] = F_{a,k}`
    strata: Vec<Vec<Polynomial>>,
}

/// Builds the m-jet presentation by substituting truncated series and
/// reading off coefficients of `t`.
pub fn jet_equations(v: &Presentation, m: u32) -> Result<JetPresentation, JetError> {
    let ctx = jet_context(v.context(), m)?;
    let n = v.num_vars();
    let mut t_name = String::from("t");
    while v.context().vars().iter().any(|x| x.base_name() == t_name) {
        t_name.push('_');
    }
    let ext = ctx.extended(&[Variable::plain(t_name)])?;
    let t = Polynomial::var(&ext, ext.len() - 1);
    let series: Vec<Polynomial> = (0..n)
        .map(|i| {
            let mut s = Polynomial::zero(&ext);
            for j in 0..=m as usize {
                s = &s + &(&Polynomial::var(&ext, j * n + i) * &t.pow(j as u32));
            }
            s
        })
        .collect();
    let t_index = ext.len() - 1;
    let mut strata = Vec::with_capacity(v.generators().len());
    for f in v.generators() {
        let expanded = f.substitute(&series, &ext)?;
        let coeffs = expanded.coefficients_in(t_index);
        let row = (0..=m as usize)
            .map(|k| match coeffs.get(k) {
                Some(c) => c.embed(&ctx),
                None => Ok(Polynomial::zero(&ctx)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        strata.push(row);
    }
    let mut gens = Vec::new();
    for k in 0..=m as usize {
        for row in &strata {
            gens.push(row[k].clone());
        }
    }
    let ring = Presentation::new(format!("{}_jet{}", v.name(), m), ctx, gens)?;
    Ok(JetPresentation {
        base: v.clone(),
        level: m,
        ring,
        strata,
    })
}

/// One grading defect of a stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GradingViolation {
    /// A term of the wrong weight.
    Weight { generator: usize, level: u32, term: Polynomial },
    /// A variable above the stratum's level.
    Stratification { generator: usize, level: u32, variable: String },
    /// `F(s·γ) - s^k F(γ)` is nonzero.
    Scaling { generator: usize, level: u32, remainder: Polynomial },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradingReport {
    pub strata_checked: usize,
    pub violations: Vec<GradingViolation>,
}

impl GradingReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks weight homogeneity, stratification and the scaling identity for
/// a single polynomial claimed to be a level-`k` stratum.
pub fn check_stratum(p: &Polynomial, generator: usize, k: u32) -> Result<Vec<GradingViolation>, JetError> {
    let mut out = Vec::new();
    if let Some(term) = p.first_term_off_weight(k) {
        out.push(GradingViolation::Weight { generator, level: k, term });
    }
    let ctx = p.context();
    for i in p.support() {
        let var = ctx.var(i);
        if var.weight() > k {
            out.push(GradingViolation::Stratification {
                generator,
                level: k,
                variable: var.to_string(),
            });
            break;
        }
    }
    // scaling x#j -> s^j x#j in the ring extended by a fresh symbol s
    let mut s_name = String::from("s");
    while ctx.vars().iter().any(|v| v.base_name() == s_name) {
        s_name.push('_');
    }
    let ext = ctx.extended(&[Variable::plain(s_name)])?;
    let s = Polynomial::var(&ext, ext.len() - 1);
    let images: Vec<Polynomial> = (0..ctx.len())
        .map(|i| &s.pow(ctx.var(i).weight()) * &Polynomial::var(&ext, i))
        .collect();
    let scaled = p.substitute(&images, &ext)?;
    let expected = &s.pow(k) * &p.embed(&ext)?;
    let diff = &scaled - &expected;
    if !diff.is_zero() {
        out.push(GradingViolation::Scaling { generator, level: k, remainder: diff });
    }
    Ok(out)
}

impl JetPresentation {
    pub fn base(&self) -> &Presentation {
        &self.base
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// The jet ring as a presentation; generators are ordered by level and
    /// then by base generator.
    pub fn ring(&self) -> &Presentation {
        &self.ring
    }

    pub fn context(&self) -> &Arc<Context> {
        self.ring.context()
    }

    /// `F_{a,k}`.
    pub fn stratum(&self, a: usize, k: u32) -> &Polynomial {
        &self.strata[a][k as usize]
    }

    pub fn strata(&self) -> &[Vec<Polynomial>] {
        &self.strata
    }

    pub fn num_generators(&self) -> usize {
        self.strata.len()
    }

    /// The jet variable `x_i#j` as a polynomial.
    pub fn jet_var(&self, i: usize, j: u32) -> Polynomial {
        Polynomial::var(self.context(), j as usize * self.base.num_vars() + i)
    }

    /// `sum_i df_a/dx_i(x#0) * x_i#level`.
    pub fn jacobian_pairing(&self, a: usize, level: u32) -> Result<Polynomial, JetError> {
        if level > self.level {
            return Err(JetError::LevelTooHigh { requested: level, available: self.level });
        }
        let f = &self.base.generators()[a];
        let mut acc = Polynomial::zero(self.context());
        for i in 0..self.base.num_vars() {
            let d = at_level(&f.partial_derivative(i), self.context(), 0)?;
            acc = &acc + &(&d * &self.jet_var(i, level));
        }
        Ok(acc)
    }

    /// Values of all `F_{a,k}` (in generator order) at a truncated series
    /// point given as `gamma[i][j]`, the `t^j` coefficient of coordinate `i`.
    pub fn evaluate_on_jet(&self, gamma: &[Vec<Rational>]) -> Result<Vec<Rational>, JetError> {
        let n = self.base.num_vars();
        let m = self.level as usize;
        if gamma.len() != n {
            return Err(JetError::Shape(format!("expected {n} coordinates, found {}", gamma.len())));
        }
        if let Some(bad) = gamma.iter().position(|g| g.len() != m + 1) {
            return Err(JetError::Shape(format!(
                "coordinate {bad} has {} coefficients, expected {}",
                gamma[bad].len(),
                m + 1
            )));
        }
        let mut point = vec![Rational::zero(); n * (m + 1)];
        for (i, g) in gamma.iter().enumerate() {
            for (j, c) in g.iter().enumerate() {
                point[j * n + i] = c.clone();
            }
        }
        self.ring
            .generators()
            .iter()
            .map(|g| g.evaluate(&point).map_err(JetError::from))
            .collect()
    }

    /// Whether `gamma` is an m-jet of the base variety.
    pub fn is_jet(&self, gamma: &[Vec<Rational>]) -> Result<bool, JetError> {
        Ok(self.evaluate_on_jet(gamma)?.iter().all(Zero::is_zero))
    }

    pub fn check_grading(&self) -> Result<GradingReport, JetError> {
        let mut report = GradingReport::default();
        for (a, row) in self.strata.iter().enumerate() {
            for (k, f) in row.iter().enumerate() {
                report.strata_checked += 1;
                report.violations.extend(check_stratum(f, a, k as u32)?);
            }
        }
        Ok(report)
    }

    /// The truncation `R^(m') -> R^(m)`, `x#j -> x#j`. Also checks that the
    /// level-`m'` presentation is literally the prefix of this one.
    pub fn truncation_map(&self, lower: u32) -> Result<RingMap, JetError> {
        if lower > self.level {
            return Err(JetError::LevelTooHigh { requested: lower, available: self.level });
        }
        let small = jet_equations(&self.base, lower)?;
        let k = small.ring.generators().len();
        for (g, h) in small.ring.generators().iter().zip(&self.ring.generators()[..k]) {
            if &g.embed(self.context())? != h {
                return Err(JetError::Internal(format!("stratum {g} not shared at level {}", self.level)));
            }
        }
        let images = (0..small.context().len())
            .map(|i| Polynomial::var(self.context(), i))
            .collect();
        RingMap::new(small.ring.clone(), self.ring.clone(), images).map_err(morph_err)
    }

    /// The zero section `x#0 -> x`, `x#j -> 0` for `j >= 1`, as a ring map
    /// from the jet ring to the base ring.
    pub fn zero_section(&self) -> Result<RingMap, JetError> {
        let n = self.base.num_vars();
        let base_ctx = self.base.context();
        let images = (0..self.context().len())
            .map(|idx| {
                if idx < n {
                    Polynomial::var(base_ctx, idx)
                } else {
                    Polynomial::zero(base_ctx)
                }
            })
            .collect();
        RingMap::new(self.ring.clone(), self.base.clone(), images).map_err(morph_err)
    }

    /// The projection `X_m -> X` on rings: `x -> x#0`.
    pub fn projection(&self) -> Result<RingMap, JetError> {
        let images = (0..self.base.num_vars()).map(|i| self.jet_var(i, 0)).collect();
        RingMap::new(self.base.clone(), self.ring.clone(), images).map_err(morph_err)
    }
}

fn morph_err(e: MorphismError) -> JetError {
    JetError::Internal(e.to_string())
}

/// Result of restricting the m-jet equations to the zero section's fiber.
#[derive(Clone, Debug)]
pub struct Fiber {
    /// Strata after setting levels `1..m-1` to zero, in the ring of
    /// variables of levels `0` and `m`.
    pub presentation: Presentation,
    /// `(generator, level, remainder)` for every stratum where the
    /// linearization identity fails.
    pub mismatches: Vec<(usize, u32, Polynomial)>,
}

impl Fiber {
    pub fn identity_holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Sets levels `1..m-1` to zero in the m-jet equations and checks that the
/// intermediate strata vanish and the top stratum becomes the Jacobian
/// pairing.
pub fn fiber_over_zero_section(v: &Presentation, m: u32) -> Result<Fiber, JetError> {
    if m == 0 {
        return Err(JetError::ZeroLevel);
    }
    let jets = jet_equations(v, m)?;
    let n = v.num_vars();
    let mut fvars = Vec::with_capacity(2 * n);
    for j in [0, m] {
        for x in v.context().vars() {
            fvars.push(Variable::jet(x.base_name(), j));
        }
    }
    let fctx = Context::new(fvars)?;
    let mut images: HashMap<Variable, Polynomial> = HashMap::new();
    for x in jets.context().vars() {
        let lvl = x.level().unwrap_or(0);
        let img = if lvl == 0 || lvl == m {
            Polynomial::variable(&fctx, x)?
        } else {
            Polynomial::zero(&fctx)
        };
        images.insert(x.clone(), img);
    }
    let mut gens = Vec::new();
    let mut mismatches = Vec::new();
    for a in 0..jets.num_generators() {
        for k in 0..=m {
            let restricted = jets.stratum(a, k).substitute_map(&images, &fctx)?;
            let expected = if k == 0 {
                at_level(&v.generators()[a], &fctx, 0)?
            } else if k < m {
                Polynomial::zero(&fctx)
            } else {
                jets.jacobian_pairing(a, m)?.substitute_map(&images, &fctx)?
            };
            let diff = &restricted - &expected;
            if !diff.is_zero() {
                mismatches.push((a, k, diff));
            }
            if !restricted.is_zero() {
                gens.push(restricted);
            }
        }
    }
    let presentation = Presentation::new(format!("{}_fiber{}", v.name(), m), fctx, gens)?;
    Ok(Fiber { presentation, mismatches })
}

#[cfg(test)]
mod tests;
