//! Additive group actions `A^1 × V -> V` given on rings.

use crate::groebner::GroebnerConfig;
use crate::poly::{Polynomial, Variable};
use crate::presentation::Presentation;

use super::{MorphismError, RingMap, Transcript};

/// Outcome of one law: the transcript, or the failing identity and its
/// normal form.
pub type LawResult = Result<Transcript, (String, Polynomial)>;

#[derive(Clone, Debug)]
pub struct ActionReport {
    pub ideal_preservation: LawResult,
    pub identity: LawResult,
    pub composition: LawResult,
}

impl ActionReport {
    pub fn passed(&self) -> bool {
        self.ideal_preservation.is_ok() && self.identity.is_ok() && self.composition.is_ok()
    }
}

fn fresh(v: &Presentation, base: &str, taken: &[&str]) -> Variable {
    let mut name = base.to_string();
    while v.context().vars().iter().any(|x| x.base_name() == name) || taken.contains(&name.as_str()) {
        name.push('_');
    }
    Variable::plain(name)
}

fn law(
    ring: &Presentation,
    checks: Vec<(String, Polynomial)>,
    config: &GroebnerConfig,
) -> Result<LawResult, MorphismError> {
    let gb = ring.groebner(config)?;
    let mut t = Transcript::default();
    for (label, p) in checks {
        let nf = gb.normal_form(&p)?;
        if !nf.is_zero() {
            return Ok(Err((label, nf)));
        }
        t.push(label, ring.name(), &p);
    }
    Ok(Ok(t))
}

/// Checks an action given as a ring map `k[V] -> k[V][t]` (the target has
/// exactly one extra variable, last): the ideal is preserved, `t = 0` acts
/// trivially, and acting by `s` then `t` equals acting by `s + t`, each
/// modulo the ideal of `V` in the appropriately extended ring.
pub fn verify_additive_action(
    v: &Presentation,
    action: &RingMap,
    config: &GroebnerConfig,
) -> Result<ActionReport, MorphismError> {
    let n = v.num_vars();
    let tctx = action.target().context();
    if !action.source().context().same_as(v.context())
        || tctx.len() != n + 1
        || tctx.vars()[..n] != v.context().vars()[..]
    {
        return Err(MorphismError::Shape(
            "an action must map the variety's ring to the ring with one extra variable appended".into(),
        ));
    }
    let t_var = tctx.var(n).clone();
    let vt = v.with_free_variables(format!("{}_A1", v.name()), &[t_var.clone()])?;
    let images: Vec<Polynomial> = action
        .images()
        .iter()
        .map(|p| p.embed(vt.context()))
        .collect::<Result<_, _>>()?;

    let preservation: Vec<(String, Polynomial)> = v
        .generators()
        .iter()
        .enumerate()
        .map(|(k, g)| Ok((format!("action(g{})", k + 1), g.substitute(&images, vt.context())?)))
        .collect::<Result<_, MorphismError>>()?;
    let ideal_preservation = law(&vt, preservation, config)?;

    let mut at_zero: Vec<Polynomial> = (0..n).map(|i| v.var(i)).collect();
    at_zero.push(Polynomial::zero(v.context()));
    let identity_checks = v
        .context()
        .vars()
        .iter()
        .enumerate()
        .map(|(i, x)| Ok((format!("action({x})|t=0 - {x}"), &images[i].substitute(&at_zero, v.context())? - &v.var(i))))
        .collect::<Result<_, MorphismError>>()?;
    let identity = law(v, identity_checks, config)?;

    // ring V[s, t]
    let s_var = fresh(v, "s", &[t_var.base_name()]);
    let st = vt.with_free_variables(format!("{}_A2", v.name()), &[s_var.clone()])?;
    let ctx = st.context();
    let s = Polynomial::variable(ctx, &s_var)?;
    let t = Polynomial::variable(ctx, &t_var)?;
    let lifted: Vec<Polynomial> = images.iter().map(|p| p.embed(ctx)).collect::<Result<_, _>>()?;
    // a(x, s): images with t replaced by s
    let mut by_s: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(ctx, i)).collect();
    by_s.push(s.clone());
    by_s.push(s.clone());
    let first: Vec<Polynomial> = lifted.iter().map(|p| p.substitute(&by_s, ctx)).collect::<Result<_, _>>()?;
    let mut then_t = first.clone();
    then_t.push(t.clone());
    then_t.push(s.clone());
    let mut by_sum: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(ctx, i)).collect();
    by_sum.push(&s + &t);
    by_sum.push(s.clone());
    let mut comp_checks = Vec::with_capacity(n);
    for (i, x) in v.context().vars().iter().enumerate() {
        let left = lifted[i].substitute(&then_t, ctx)?;
        let right = lifted[i].substitute(&by_sum, ctx)?;
        comp_checks.push((format!("action(action({x}, s), t) - action({x}, s + t)"), &left - &right));
    }
    let composition = law(&st, comp_checks, config)?;

    Ok(ActionReport {
        ideal_preservation,
        identity,
        composition,
    })
}
