//! Ring maps between presented rings and isomorphism certificates.
//!
//! A [`RingMap`] from `P` to `Q` lists, for every variable of `P`, its image
//! in the ring of `Q`. It is well defined when every generator of `P`'s
//! ideal maps into `Q`'s ideal. An [`IsoCertificate`] pairs a forward map
//! `P -> Q` with a backward map `Q -> P` and records the normal-form
//! identities that prove they are mutually inverse.

mod action;
mod ansatz;
mod descent;
mod frame;
mod prolong;

use std::collections::HashMap;
use std::sync::Arc;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::groebner::{ideal_equal, GroebnerBasis, GroebnerConfig, GroebnerError};
use crate::jets::JetError;
use crate::poly::{Context, PolyError, Polynomial, Rational, Variable};
use crate::presentation::{numbered_variables, Presentation, PresentationError};

pub use action::{verify_additive_action, ActionReport};
pub use descent::{descend_equivariant_iso, induce_jet_certificate, induce_jet_map, weight_defect};
pub use frame::{search_frame, verify_frame, CotangentFrame};
pub use prolong::{
    build_prolongation_iso, check_truncation_compatibility, jet_iso_from_stable, trivialize_jets, Prolongation,
    Trivialization, DEFAULT_CORRECTION_BOUND,
};

#[derive(Debug, Clone, Error)]
pub enum MorphismError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("map {map} is not well defined: {identity} has nonzero normal form {remainder}")]
    NotWellDefined {
        map: String,
        identity: String,
        remainder: Polynomial,
    },
    #[error("maps are not mutually inverse: {identity} has nonzero normal form {remainder}")]
    NotInverse { identity: String, remainder: Polynomial },
    #[error("frame check {check}({row}, {col}) fails with remainder {remainder}")]
    Frame {
        check: &'static str,
        row: usize,
        col: usize,
        remainder: Polynomial,
    },
    #[error("no cotangent frame found within degree bound {0}; raise the bound")]
    NoFrame(u32),
    #[error("frame search needs a smooth complete intersection with n = N - r ({0})")]
    FrameShape(String),
    #[error("variety {0} is not smooth")]
    NotSmooth(String),
    #[error("correction terms at level {level} not found within degree bound {bound}; raise the bound")]
    Correction { level: u32, bound: u32 },
    #[error("middle presentations differ: {0}")]
    MiddleMismatch(String),
    #[error("{map} is not weight-preserving: image of {variable} is not homogeneous of weight {weight}")]
    NotWeightPreserving {
        map: &'static str,
        variable: String,
        weight: u32,
    },
    #[error("not a jet presentation: {0}")]
    NotJet(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// One verified identity: `polynomial` reduces to zero modulo `ideal`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    pub label: String,
    pub ideal: String,
    /// SHA-256 of the printed polynomial that was reduced.
    pub digest: String,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in I({}) [{}]", self.label, self.ideal, &self.digest[..16])
    }
}

/// An ordered list of verified identities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub entries: Vec<Identity>,
}

impl Transcript {
    pub fn push(&mut self, label: impl Into<String>, ideal: &str, p: &Polynomial) {
        let digest = hex::encode(Sha256::digest(p.to_string().as_bytes()));
        self.entries.push(Identity {
            label: label.into(),
            ideal: ideal.to_string(),
            digest,
        });
    }

    pub fn extend(&mut self, other: Transcript) {
        self.entries.extend(other.entries);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Hash of the whole transcript; stable across runs.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for e in &self.entries {
            h.update(e.label.as_bytes());
            h.update([0]);
            h.update(e.ideal.as_bytes());
            h.update([0]);
            h.update(e.digest.as_bytes());
            h.update([b'\n']);
        }
        hex::encode(h.finalize())
    }
}

/// Records `label` when `nf`, a normal form modulo the ideal of `ring`,
/// vanishes; `data` is the polynomial the identity was derived from.
fn record(
    ring: &Presentation,
    nf: Polynomial,
    label: String,
    data: &Polynomial,
    transcript: &mut Transcript,
) -> Result<(), (String, Polynomial)> {
    if nf.is_zero() {
        transcript.push(label, ring.name(), data);
        Ok(())
    } else {
        Err((label, nf))
    }
}

fn horner(
    terms: &[(&[u16], &Rational)],
    var: usize,
    images: &[Polynomial],
    gb: &GroebnerBasis,
    ctx: &Arc<Context>,
) -> Result<Polynomial, MorphismError> {
    if var == images.len() {
        let c = terms.iter().fold(Rational::from_integer(0.into()), |acc, (_, c)| acc + *c);
        return Ok(Polynomial::constant(ctx, c));
    }
    let top = terms.iter().map(|(e, _)| e[var]).max().unwrap_or(0);
    if top == 0 {
        return horner(terms, var + 1, images, gb, ctx);
    }
    let mut acc = Polynomial::zero(ctx);
    for k in (0..=top).rev() {
        if !acc.is_zero() {
            acc = gb.normal_form(&(&acc * &images[var]))?;
        }
        let slice: Vec<(&[u16], &Rational)> = terms.iter().filter(|(e, _)| e[var] == k).copied().collect();
        if !slice.is_empty() {
            acc = &acc + &horner(&slice, var + 1, images, gb, ctx)?;
        }
    }
    Ok(acc)
}

/// Images of the source variables in the target ring.
#[derive(Clone, Debug)]
pub struct RingMap {
    source: Presentation,
    target: Presentation,
    images: Vec<Polynomial>,
}

impl RingMap {
    pub fn new(source: Presentation, target: Presentation, images: Vec<Polynomial>) -> Result<Self, MorphismError> {
        if images.len() != source.num_vars() {
            return Err(MorphismError::Shape(format!(
                "{} images for {} source variables",
                images.len(),
                source.num_vars()
            )));
        }
        if let Some(p) = images.iter().find(|p| !p.context().same_as(target.context())) {
            return Err(MorphismError::Shape(format!(
                "image {p} is not in the target ring [{}]",
                target.context()
            )));
        }
        Ok(RingMap { source, target, images })
    }

    /// Builds from `variable -> image` pairs; every source variable needs
    /// exactly one image.
    pub fn from_pairs(
        source: Presentation,
        target: Presentation,
        pairs: &[(Variable, Polynomial)],
    ) -> Result<Self, MorphismError> {
        let mut map: HashMap<&Variable, &Polynomial> = HashMap::new();
        for (v, p) in pairs {
            if !source.context().contains(v) {
                return Err(PolyError::UnknownVariable(v.to_string()).into());
            }
            if map.insert(v, p).is_some() {
                return Err(MorphismError::Shape(format!("two images for {v}")));
            }
        }
        let images = source
            .context()
            .vars()
            .iter()
            .map(|v| {
                map.get(v)
                    .map(|p| (*p).clone())
                    .ok_or_else(|| PolyError::MissingImage(v.to_string()).into())
            })
            .collect::<Result<Vec<_>, MorphismError>>()?;
        Self::new(source, target, images)
    }

    pub fn identity(p: &Presentation) -> Self {
        let images = (0..p.num_vars()).map(|i| p.var(i)).collect();
        RingMap {
            source: p.clone(),
            target: p.clone(),
            images,
        }
    }

    /// `P -> P'` where `P'` is `P` with every variable renamed by `rename`
    /// (variables not listed keep their names).
    pub fn renaming(
        source: &Presentation,
        rename: &[(Variable, Variable)],
        new_name: &str,
    ) -> Result<(Presentation, Self), MorphismError> {
        let lookup: HashMap<&Variable, &Variable> = rename.iter().map(|(a, b)| (a, b)).collect();
        let vars: Vec<Variable> = source
            .context()
            .vars()
            .iter()
            .map(|v| lookup.get(v).map(|w| (*w).clone()).unwrap_or_else(|| v.clone()))
            .collect();
        let ctx = Context::new(vars)?;
        let images: Vec<Polynomial> = (0..ctx.len()).map(|i| Polynomial::var(&ctx, i)).collect();
        let gens = source
            .generators()
            .iter()
            .map(|g| g.substitute(&images, &ctx))
            .collect::<Result<Vec<_>, _>>()?;
        let target = Presentation::new(new_name, ctx, gens)?;
        let map = RingMap::new(source.clone(), target.clone(), images)?;
        Ok((target, map))
    }

    pub fn source(&self) -> &Presentation {
        &self.source
    }

    pub fn target(&self) -> &Presentation {
        &self.target
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    pub fn image(&self, v: &Variable) -> Option<&Polynomial> {
        self.source.context().index_of(v).map(|i| &self.images[i])
    }

    /// Applies the map to a polynomial of the source ring.
    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial, MorphismError> {
        Ok(p.substitute(&self.images, self.target.context())?)
    }

    /// Normal form of the image of `p` modulo the target ideal, reducing
    /// after every multiplication (Horner scheme, one variable at a time).
    /// Equal to `gb.normal_form(self.apply(p))` without the intermediate
    /// blow-up.
    pub fn apply_reduced(&self, p: &Polynomial, gb: &GroebnerBasis) -> Result<Polynomial, MorphismError> {
        if !p.context().same_as(self.source.context()) {
            return Err(PolyError::ContextMismatch {
                left: p.context().to_string(),
                right: self.source.context().to_string(),
            }
            .into());
        }
        let images = self
            .images
            .iter()
            .map(|g| gb.normal_form(g))
            .collect::<Result<Vec<_>, _>>()?;
        let terms: Vec<(&[u16], &Rational)> = p.terms().iter().map(|(m, c)| (m.exponents(), c)).collect();
        horner(&terms, 0, &images, gb, self.target.context())
    }

    /// `other ∘ self` with images reduced modulo the ideal of `other`'s
    /// target.
    pub fn then_reduced(&self, other: &RingMap, config: &GroebnerConfig) -> Result<RingMap, MorphismError> {
        if !self.target.context().same_as(other.source.context()) {
            return Err(MorphismError::Shape(format!(
                "cannot compose: [{}] vs [{}]",
                self.target.context(),
                other.source.context()
            )));
        }
        let gb = other.target.groebner(config)?;
        let images = self
            .images
            .iter()
            .map(|p| other.apply_reduced(p, &gb))
            .collect::<Result<Vec<_>, _>>()?;
        RingMap::new(self.source.clone(), other.target.clone(), images)
    }

    /// `other ∘ self`: first `self: A -> B`, then `other: B -> C`.
    pub fn then(&self, other: &RingMap) -> Result<RingMap, MorphismError> {
        if !self.target.context().same_as(other.source.context()) {
            return Err(MorphismError::Shape(format!(
                "cannot compose: [{}] vs [{}]",
                self.target.context(),
                other.source.context()
            )));
        }
        let images = self
            .images
            .iter()
            .map(|p| other.apply(p))
            .collect::<Result<Vec<_>, _>>()?;
        RingMap::new(self.source.clone(), other.target.clone(), images)
    }

    /// Replaces every image by its normal form modulo the target ideal.
    pub fn reduced(&self, config: &GroebnerConfig) -> Result<RingMap, MorphismError> {
        let gb = self.target.groebner(config)?;
        let images = self
            .images
            .iter()
            .map(|p| gb.normal_form(p))
            .collect::<Result<Vec<_>, _>>()?;
        RingMap::new(self.source.clone(), self.target.clone(), images)
    }

    /// Same map with `extra` appended to both sides as free variables
    /// mapped to themselves.
    pub fn extended(
        &self,
        extra: &[Variable],
        source_name: &str,
        target_name: &str,
    ) -> Result<RingMap, MorphismError> {
        let source = self.source.with_free_variables(source_name, extra)?;
        let target = self.target.with_free_variables(target_name, extra)?;
        let tctx = target.context();
        let mut images = self
            .images
            .iter()
            .map(|p| p.embed(tctx))
            .collect::<Result<Vec<_>, _>>()?;
        for v in extra {
            images.push(Polynomial::variable(tctx, v)?);
        }
        RingMap::new(source, target, images)
    }
}

impl fmt::Display for RingMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "map {} {}", self.source.name(), self.target.name())?;
        for (v, p) in self.source.context().vars().iter().zip(&self.images) {
            writeln!(f, "{v} -> {p}")?;
        }
        write!(f, "end")
    }
}

/// Checks that every generator of the source ideal maps into the target
/// ideal.
pub fn verify_ring_map(map: &RingMap, config: &GroebnerConfig) -> Result<Transcript, MorphismError> {
    let mut t = Transcript::default();
    let label = format!("{}->{}", map.source.name(), map.target.name());
    let gb = map.target.groebner(config)?;
    for (k, g) in map.source.generators().iter().enumerate() {
        let nf = map.apply_reduced(g, &gb)?;
        if let Err((identity, remainder)) = record(&map.target, nf, format!("{label}(g{})", k + 1), g, &mut t) {
            return Err(MorphismError::NotWellDefined { map: label, identity, remainder });
        }
    }
    Ok(t)
}

/// A verified pair of mutually inverse ring maps.
///
/// A certificate is either verified directly (both maps well defined, both
/// round trips the identity modulo the ideals) or, when it is a composite,
/// through its links: every link is verified directly, consecutive rings
/// coincide, and the maps are the reduced composites of the links.
#[derive(Clone, Debug)]
pub struct IsoCertificate {
    forward: RingMap,
    backward: RingMap,
    transcript: Transcript,
    links: Vec<IsoCertificate>,
}

fn check_round_trip(
    first: &RingMap,
    second: &RingMap,
    direction: &str,
    t: &mut Transcript,
    config: &GroebnerConfig,
) -> Result<(), MorphismError> {
    let ring = &first.source;
    let gb = ring.groebner(config)?;
    for (i, v) in ring.context().vars().iter().enumerate() {
        let there = &first.images[i];
        let back = second.apply_reduced(there, &gb)?;
        let nf = gb.normal_form(&(&back - &ring.var(i)))?;
        if let Err((identity, remainder)) = record(ring, nf, format!("{direction}({v}) - {v}"), there, t) {
            return Err(MorphismError::NotInverse { identity, remainder });
        }
    }
    Ok(())
}

/// Verifies both maps and both round trips from scratch.
pub fn verify_iso(forward: RingMap, backward: RingMap, config: &GroebnerConfig) -> Result<IsoCertificate, MorphismError> {
    if !forward.source.context().same_as(backward.target.context())
        || !forward.target.context().same_as(backward.source.context())
    {
        return Err(MorphismError::Shape(
            "backward map must go from the forward target to the forward source".into(),
        ));
    }
    let mut transcript = verify_ring_map(&forward, config)?;
    transcript.extend(verify_ring_map(&backward, config)?);
    check_round_trip(&forward, &backward, "backward∘forward", &mut transcript, config)?;
    check_round_trip(&backward, &forward, "forward∘backward", &mut transcript, config)?;
    Ok(IsoCertificate {
        forward,
        backward,
        transcript,
        links: Vec::new(),
    })
}

/// Verifies a chain `P_0 ≅ P_1 ≅ ... ≅ P_k` link by link and returns the
/// composite `P_0 ≅ P_k`. Consecutive rings must have the same variables and
/// equal ideals. The composite maps are reduced modulo the end ideals but
/// not substituted into each other, which for high-degree links is far
/// cheaper than direct verification.
pub fn verify_chain(links: &[IsoCertificate], config: &GroebnerConfig) -> Result<IsoCertificate, MorphismError> {
    let (first, rest) = links
        .split_first()
        .ok_or_else(|| MorphismError::Shape("empty chain".into()))?;
    let mut verified = vec![first.reverify(config)?];
    let mut transcript = verified[0].transcript.clone();
    for (k, link) in rest.iter().enumerate() {
        let prev = verified.last().expect("nonempty");
        let (b, b2) = (prev.target(), link.source());
        if !b.context().same_as(b2.context()) {
            return Err(MorphismError::MiddleMismatch(format!(
                "link {}: variables [{}] vs [{}]",
                k + 1,
                b.context(),
                b2.context()
            )));
        }
        if !ideal_equal(b.context(), b.generators(), b2.generators(), config)? {
            return Err(MorphismError::MiddleMismatch(format!(
                "link {}: ideals of {} and {} differ",
                k + 1,
                b.name(),
                b2.name()
            )));
        }
        let v = link.reverify(config)?;
        transcript.extend(v.transcript.clone());
        verified.push(v);
    }
    let retarget = |m: &RingMap, source: &Presentation, target: &Presentation| {
        RingMap::new(source.clone(), target.clone(), m.images.clone())
    };
    let mut fwd = verified[0].forward.clone();
    let mut bwd = verified[0].backward.clone();
    for v in &verified[1..] {
        let f = retarget(&v.forward, fwd.target(), v.target())?;
        fwd = fwd.then_reduced(&f, config)?;
        let b = retarget(&v.backward, v.target(), bwd.source())?;
        bwd = b.then_reduced(&bwd, config)?;
    }
    Ok(IsoCertificate {
        forward: fwd,
        backward: bwd,
        transcript,
        links: verified,
    })
}

impl IsoCertificate {
    pub fn forward(&self) -> &RingMap {
        &self.forward
    }

    pub fn backward(&self) -> &RingMap {
        &self.backward
    }

    pub fn source(&self) -> &Presentation {
        &self.forward.source
    }

    pub fn target(&self) -> &Presentation {
        &self.forward.target
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    /// Links of a composite certificate; empty when verified directly.
    pub fn links(&self) -> &[IsoCertificate] {
        &self.links
    }

    /// Re-runs verification on the raw maps, or on the raw links of a
    /// composite, checking that they still produce the same maps.
    pub fn reverify(&self, config: &GroebnerConfig) -> Result<IsoCertificate, MorphismError> {
        if self.links.is_empty() {
            return verify_iso(self.forward.clone(), self.backward.clone(), config);
        }
        let again = verify_chain(&self.links, config)?;
        if again.forward.images != self.forward.images || again.backward.images != self.backward.images {
            return Err(MorphismError::Internal("composite maps differ from their links".into()));
        }
        Ok(again)
    }

    /// The certificate read the other way round; verified again.
    pub fn inverse(&self, config: &GroebnerConfig) -> Result<IsoCertificate, MorphismError> {
        if self.links.is_empty() {
            return verify_iso(self.backward.clone(), self.forward.clone(), config);
        }
        let reversed = self
            .links
            .iter()
            .rev()
            .map(|l| l.inverse(config))
            .collect::<Result<Vec<_>, _>>()?;
        verify_chain(&reversed, config)
    }

    /// `P × A^r ≅ Q × A^r` with the new variables mapped to themselves.
    pub fn extended(
        &self,
        extra: &[Variable],
        source_name: &str,
        target_name: &str,
        config: &GroebnerConfig,
    ) -> Result<IsoCertificate, MorphismError> {
        let f = self.forward.extended(extra, source_name, target_name)?;
        let b = self.backward.extended(extra, target_name, source_name)?;
        verify_iso(f, b, config)
    }
}

/// Certificate for a pure variable renaming of `p`.
pub fn renaming_certificate(
    p: &Presentation,
    rename: &[(Variable, Variable)],
    new_name: &str,
    config: &GroebnerConfig,
) -> Result<IsoCertificate, MorphismError> {
    let (q, fwd) = RingMap::renaming(p, rename, new_name)?;
    let back: Vec<(Variable, Variable)> = rename.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
    let (_, bwd) = RingMap::renaming(&q, &back, p.name())?;
    let bwd = RingMap::new(q, p.clone(), bwd.images.iter().map(|i| i.embed(p.context())).collect::<Result<_, _>>()?)?;
    verify_iso(fwd, bwd, config)
}

/// `c2 ∘ c1` where `c1: A ≅ B` and `c2: B' ≅ C`; `renaming` sends variables
/// of `B` to those of `B'` (unlisted variables keep their names). The middle
/// ideals must agree after renaming. Images are reduced to normal form and
/// the result is verified from scratch.
pub fn compose_certificates(
    c1: &IsoCertificate,
    c2: &IsoCertificate,
    renaming: &[(Variable, Variable)],
    config: &GroebnerConfig,
) -> Result<IsoCertificate, MorphismError> {
    let (fwd, bwd) = compose_maps(c1, c2, renaming, config)?;
    verify_iso(fwd, bwd, config)
}

/// Composition without the final verification.
pub(crate) fn compose_maps(
    c1: &IsoCertificate,
    c2: &IsoCertificate,
    renaming: &[(Variable, Variable)],
    config: &GroebnerConfig,
) -> Result<(RingMap, RingMap), MorphismError> {
    let b = c1.target();
    let b2 = c2.source();
    let (b_renamed, to_b2) = RingMap::renaming(b, renaming, b2.name())?;
    if !b_renamed.context().same_as(b2.context()) {
        return Err(MorphismError::MiddleMismatch(format!(
            "variables [{}] vs [{}]",
            b_renamed.context(),
            b2.context()
        )));
    }
    if !ideal_equal(b2.context(), b_renamed.generators(), b2.generators(), config)? {
        return Err(MorphismError::MiddleMismatch(format!(
            "ideals of {} and {} differ",
            b.name(),
            b2.name()
        )));
    }
    let to_b2 = RingMap::new(b.clone(), b2.clone(), to_b2.images)?;
    let from_b2 = RingMap::new(b2.clone(), b.clone(), {
        let mut inv = vec![Polynomial::zero(b.context()); b2.num_vars()];
        for (i, img) in to_b2.images.iter().enumerate() {
            let j = img.support().into_iter().next().expect("renaming images are variables");
            inv[j] = b.var(i);
        }
        inv
    })?;
    let fwd = c1.forward.then(&to_b2)?.then_reduced(&c2.forward, config)?;
    let bwd = c2.backward.then(&from_b2)?.then_reduced(&c1.backward, config)?;
    Ok((fwd, bwd))
}

/// `P × A^r` with fresh variables `prefix1..prefixr`, named `{P}_A{r}`.
pub fn product_with_affine_space(p: &Presentation, r: usize, prefix: &str) -> Result<Presentation, MorphismError> {
    if r == 0 {
        return Ok(p.clone());
    }
    let extra = numbered_variables(prefix, r, 0)?;
    Ok(p.with_free_variables(format!("{}_A{r}", p.name()), &extra)?)
}
