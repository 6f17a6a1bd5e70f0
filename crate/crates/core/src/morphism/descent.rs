//! Graded isomorphisms of jet rings and their restriction to the base.

use crate::groebner::GroebnerConfig;
use crate::jets::jet_equations;
use crate::poly::{Polynomial, Variable};
use crate::presentation::Presentation;

use super::{verify_iso, IsoCertificate, MorphismError, RingMap};

/// First source variable whose image, in normal form modulo the target
/// ideal, is not weight-homogeneous of the variable's own weight.
pub fn weight_defect(map: &RingMap, config: &GroebnerConfig) -> Result<Option<(Variable, u32)>, MorphismError> {
    let gb = map.target().groebner(config)?;
    for (var, img) in map.source().context().vars().iter().zip(map.images()) {
        let nf = gb.normal_form(img)?;
        if !nf.is_weight_homogeneous(var.weight()) {
            return Ok(Some((var.clone(), var.weight())));
        }
    }
    Ok(None)
}

fn require_jet(p: &Presentation) -> Result<(), MorphismError> {
    match p.context().vars().iter().find(|v| v.level().is_none()) {
        Some(v) => Err(MorphismError::NotJet(format!("{} has plain variable {v}", p.name()))),
        None => Ok(()),
    }
}

/// Restricts a level-0-only map to the base rings by renaming `x#0 -> x`.
fn restrict(
    map: &RingMap,
    source_base: &Presentation,
    target_base: &Presentation,
) -> Result<RingMap, MorphismError> {
    let tctx = target_base.context();
    let rename: Vec<Polynomial> = map
        .target()
        .context()
        .vars()
        .iter()
        .map(|v| {
            if v.level() == Some(0) {
                Polynomial::variable(tctx, &Variable::plain(v.base_name()))
            } else {
                Ok(Polynomial::zero(tctx))
            }
        })
        .collect::<Result<_, _>>()?;
    let mut images = Vec::with_capacity(source_base.num_vars());
    for x in source_base.context().vars() {
        let img = map
            .image(&Variable::jet(x.base_name(), 0))
            .ok_or_else(|| MorphismError::NotJet(format!("no level-0 copy of {x}")))?;
        images.push(img.substitute(&rename, tctx)?);
    }
    RingMap::new(source_base.clone(), target_base.clone(), images)
}

/// Descends a certificate between jet rings of `source_base` and
/// `target_base` to a certificate between the bases. Both maps must be
/// weight-preserving modulo the ideals; the weight-0 parts are then the
/// base isomorphism.
pub fn descend_equivariant_iso(
    c: &IsoCertificate,
    source_base: &Presentation,
    target_base: &Presentation,
    config: &GroebnerConfig,
) -> Result<IsoCertificate, MorphismError> {
    require_jet(c.source())?;
    require_jet(c.target())?;
    for (name, map) in [("forward", c.forward()), ("backward", c.backward())] {
        if let Some((var, weight)) = weight_defect(map, config)? {
            return Err(MorphismError::NotWeightPreserving {
                map: name,
                variable: var.to_string(),
                weight,
            });
        }
    }
    let fwd = restrict(&c.forward().reduced(config)?, source_base, target_base)?;
    let bwd = restrict(&c.backward().reduced(config)?, target_base, source_base)?;
    verify_iso(fwd, bwd, config)
        .map_err(|e| MorphismError::Internal(format!("restriction of a graded isomorphism failed: {e}")))
}

/// The map of m-jet rings induced by a base ring map `g`:
/// `x_i#j -> coefficient of t^j in g_i(Σ_j y#j t^j)`.
pub fn induce_jet_map(g: &RingMap, m: u32) -> Result<RingMap, MorphismError> {
    let src = jet_equations(g.source(), m)?;
    let tgt = jet_equations(g.target(), m)?;
    induce_between(g, m, src.ring(), tgt.ring())
}

fn induce_between(g: &RingMap, m: u32, src: &Presentation, tgt: &Presentation) -> Result<RingMap, MorphismError> {
    let tctx = tgt.context();
    let w = g.target().num_vars();
    let mut t_name = String::from("t");
    while tctx.vars().iter().any(|x| x.base_name() == t_name) {
        t_name.push('_');
    }
    let ext = tctx.extended(&[Variable::plain(t_name)])?;
    let t_idx = ext.len() - 1;
    let t = Polynomial::var(&ext, t_idx);
    let series: Vec<Polynomial> = (0..w)
        .map(|i| {
            (0..=m as usize).fold(Polynomial::zero(&ext), |acc, j| {
                &acc + &(&Polynomial::var(&ext, j * w + i) * &t.pow(j as u32))
            })
        })
        .collect();
    let n = g.source().num_vars();
    let mut images = vec![Polynomial::zero(tctx); src.num_vars()];
    for (i, gi) in g.images().iter().enumerate() {
        let coeffs = gi.substitute(&series, &ext)?.coefficients_in(t_idx);
        for j in 0..=m as usize {
            images[j * n + i] = match coeffs.get(j) {
                Some(c) => c.embed(tctx)?,
                None => Polynomial::zero(tctx),
            };
        }
    }
    RingMap::new(src.clone(), tgt.clone(), images)
}

/// The certificate of m-jet rings induced by a base certificate.
pub fn induce_jet_certificate(c: &IsoCertificate, m: u32, config: &GroebnerConfig) -> Result<IsoCertificate, MorphismError> {
    let src = jet_equations(c.source(), m)?;
    let tgt = jet_equations(c.target(), m)?;
    let fwd = induce_between(c.forward(), m, src.ring(), tgt.ring())?;
    let bwd = induce_between(c.backward(), m, tgt.ring(), src.ring())?;
    verify_iso(fwd, bwd, config)
}
