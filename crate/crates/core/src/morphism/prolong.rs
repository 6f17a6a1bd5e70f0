//! Trivialization of jet schemes of a variety with free differentials:
//! `R^(m) ≅ R^(m-1)[θ_1..θ_n]`, chained down to `V × A^(nm)`.

use std::sync::Arc;

use crate::groebner::{jacobian, GroebnerConfig};
use crate::jets::{at_level, jet_equations, JetError, JetPresentation};
use crate::poly::{Context, Monomial, Polynomial};
use crate::presentation::{numbered_variables, Presentation};

use super::ansatz::Ansatz;
use super::{verify_chain, verify_frame, verify_iso, CotangentFrame, IsoCertificate, MorphismError, RingMap, Transcript};

/// Default degree bound for the correction-term ansatz.
pub const DEFAULT_CORRECTION_BOUND: u32 = 4;

/// Prefix of the free variables added at each level.
pub const THETA: &str = "theta";

/// One level of the trivialization.
#[derive(Clone, Debug)]
pub struct Prolongation {
    pub level: u32,
    /// `R^(m-1)[θ] ≅ R^(m)`; forward sends `θ_k` to `Σ_i a_ki(x#0) x_i#m`.
    pub certificate: IsoCertificate,
    /// Correction terms `h_i`, in the ring of `R^(m-1)`.
    pub corrections: Vec<Polynomial>,
    /// Base-monomial degree at which the corrections were found.
    pub degree: u32,
}

/// `V × A^(nm) ≅ R^(m)` together with the per-level certificates.
#[derive(Clone, Debug)]
pub struct Trivialization {
    pub certificate: IsoCertificate,
    pub steps: Vec<Prolongation>,
}

/// Monomials of weight exactly `w` in the variables listed as
/// `(index, weight)`, all weights positive.
fn weighted_monomials(nvars: usize, vars: &[(usize, u32)], w: u32) -> Vec<Monomial> {
    fn rec(k: usize, left: u32, vars: &[(usize, u32)], e: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if left == 0 {
            out.push(Monomial::from_exponents(e.clone()));
            return;
        }
        if k == vars.len() {
            return;
        }
        let (idx, wt) = vars[k];
        let mut p = 0;
        while p * wt <= left {
            e[idx] = p as u16;
            rec(k + 1, left - p * wt, vars, e, out);
            p += 1;
        }
        e[idx] = 0;
    }
    let mut out = Vec::new();
    rec(0, w, vars, &mut vec![0; nvars], &mut out);
    out
}

/// Monomials of total degree at most `d` in the given variable indices.
fn bounded_monomials(nvars: usize, vars: &[usize], d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    fn rec(k: usize, left: u32, vars: &[usize], e: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if k == vars.len() {
            out.push(Monomial::from_exponents(e.clone()));
            return;
        }
        for p in 0..=left {
            e[vars[k]] = p as u16;
            rec(k + 1, left - p, vars, e, out);
        }
        e[vars[k]] = 0;
    }
    rec(0, d, vars, &mut vec![0; nvars], &mut out);
    out.sort_by_key(|m| m.degree());
    out
}

fn level_zero(p: &Polynomial, ctx: &Arc<Context>) -> Result<Polynomial, MorphismError> {
    Ok(at_level(p, ctx, 0)?)
}

/// Builds `R^(m-1)[θ] ≅ R^(m)` for `m >= 1`. The θ variables are named
/// `theta{(m-1)n+1} .. theta{mn}`.
pub fn build_prolongation_iso(
    v: &Presentation,
    frame: &CotangentFrame,
    m: u32,
    bound: u32,
    config: &GroebnerConfig,
) -> Result<Prolongation, MorphismError> {
    if m == 0 {
        return Err(JetError::ZeroLevel.into());
    }
    verify_frame(v, frame, config)?;
    let lower = jet_equations(v, m - 1)?;
    let upper = jet_equations(v, m)?;
    prolong(v, frame, &lower, &upper, bound, config)
}

fn prolong(
    v: &Presentation,
    frame: &CotangentFrame,
    lower: &JetPresentation,
    upper: &JetPresentation,
    bound: u32,
    config: &GroebnerConfig,
) -> Result<Prolongation, MorphismError> {
    let m = upper.level();
    let n = frame.n;
    let big_n = v.num_vars();
    let thetas = numbered_variables(THETA, n, (m as usize - 1) * n)?;
    let p = lower
        .ring()
        .with_free_variables(format!("{}_A{n}", lower.ring().name()), &thetas)?;
    let q = upper.ring().clone();
    let (pctx, qctx) = (p.context().clone(), q.context().clone());

    // forward P -> Q
    let mut fwd = Vec::with_capacity(pctx.len());
    for var in lower.context().vars() {
        fwd.push(Polynomial::variable(&qctx, var)?);
    }
    for k in 0..n {
        let mut s = Polynomial::zero(&qctx);
        for i in 0..big_n {
            s = &s + &(&level_zero(&frame.a[k][i], &qctx)? * &upper.jet_var(i, m));
        }
        fwd.push(s);
    }
    let forward = RingMap::new(p.clone(), q.clone(), fwd)?;

    // corrections h in the ring of R^(m-1)
    let (corrections, degree) = solve_corrections(v, frame, lower, upper, bound, config)?;

    // backward Q -> P
    let mut bwd = Vec::with_capacity(qctx.len());
    for (idx, var) in qctx.vars().iter().enumerate() {
        if var.level() != Some(m) {
            bwd.push(Polynomial::variable(&pctx, var)?);
            continue;
        }
        let i = idx - m as usize * big_n;
        let mut s = corrections[i].embed(&pctx)?;
        for (k, th) in thetas.iter().enumerate() {
            s = &s + &(&level_zero(&frame.b[i][k], &pctx)? * &Polynomial::variable(&pctx, th)?);
        }
        bwd.push(s);
    }
    let backward = RingMap::new(q, p, bwd)?;
    let certificate = verify_iso(forward, backward, config)?;
    Ok(Prolongation {
        level: m,
        certificate,
        corrections,
        degree,
    })
}

/// Solves `J(x#0)·h + G ≡ 0` and `A(x#0)·h ≡ 0` modulo the level-(m-1)
/// ideal, where `G_a = F_{a,m} - Σ_i ∂f_a/∂x_i(x#0) x_i#m`. The ansatz is
/// weight-m monomials in levels `1..m-1` times base monomials of degree at
/// most `d`, for `d = 0..=bound` and then once more at `bound + 1`.
fn solve_corrections(
    v: &Presentation,
    frame: &CotangentFrame,
    lower: &JetPresentation,
    upper: &JetPresentation,
    bound: u32,
    config: &GroebnerConfig,
) -> Result<(Vec<Polynomial>, u32), MorphismError> {
    let m = upper.level();
    let big_n = v.num_vars();
    let lctx = lower.context();
    let r = v.generators().len();
    let zero = Polynomial::zero(lctx);

    let mut g = Vec::with_capacity(r);
    for a in 0..r {
        let diff = upper.stratum(a, m) - &upper.jacobian_pairing(a, m)?;
        let diff = diff
            .embed(lctx)
            .map_err(|e| MorphismError::Internal(format!("non-top part uses level {m}: {e}")))?;
        g.push(diff);
    }
    let jac: Vec<Vec<Polynomial>> = jacobian(v)
        .iter()
        .map(|row| row.iter().map(|p| level_zero(p, lctx)).collect())
        .collect::<Result<_, _>>()?;
    let a0: Vec<Vec<Polynomial>> = frame
        .a
        .iter()
        .map(|row| row.iter().map(|p| level_zero(p, lctx)).collect())
        .collect::<Result<_, _>>()?;

    if m == 1 {
        // G vanishes identically and h = 0
        if let Some(bad) = g.iter().find(|p| !p.is_zero()) {
            return Err(MorphismError::Internal(format!("level-1 stratum differs from the Jacobian pairing by {bad}")));
        }
        return Ok((vec![zero; big_n], 0));
    }

    let gb = lower.ring().groebner(config)?;
    let upper_vars: Vec<(usize, u32)> = lctx
        .vars()
        .iter()
        .enumerate()
        .filter_map(|(i, var)| var.level().filter(|&l| l >= 1).map(|l| (i, l)))
        .collect();
    let weighted = weighted_monomials(lctx.len(), &upper_vars, m);
    let base_vars: Vec<usize> = (0..big_n).collect();

    let degrees = (0..=bound).chain(std::iter::once(bound + 1));
    for d in degrees {
        let base = bounded_monomials(lctx.len(), &base_vars, d);
        let monos: Vec<Monomial> = weighted
            .iter()
            .flat_map(|w| base.iter().map(move |b| w.mul(b)))
            .collect();
        let mut sys = Ansatz::new(&gb, &monos, big_n);
        for a in 0..r {
            let terms: Vec<(usize, &Polynomial)> = jac[a].iter().enumerate().collect();
            sys.equation(&terms, &g[a])?;
        }
        for row in &a0 {
            let terms: Vec<(usize, &Polynomial)> = row.iter().enumerate().collect();
            sys.equation(&terms, &zero)?;
        }
        if let Some(h) = sys.solve() {
            return Ok((h, d));
        }
    }
    Err(MorphismError::Correction { level: m, bound: bound + 1 })
}

/// Chains the prolongation certificates for levels `1..=m` into
/// `V × A^(nm) ≅ R^(m)`, where `V × A^(nm)` has the extra variables
/// `theta1..theta{nm}`. The composite is verified once more end to end.
pub fn trivialize_jets(
    v: &Presentation,
    frame: &CotangentFrame,
    m: u32,
    bound: u32,
    config: &GroebnerConfig,
) -> Result<Trivialization, MorphismError> {
    verify_frame(v, frame, config)?;
    let n = frame.n;
    let jets: Vec<JetPresentation> = (0..=m).map(|j| jet_equations(v, j)).collect::<Result<_, _>>()?;

    // V ≅ R^(0) by x -> x#0
    let r0 = jets[0].ring();
    let mut fwd = RingMap::new(
        v.clone(),
        r0.clone(),
        (0..v.num_vars()).map(|i| jets[0].jet_var(i, 0)).collect(),
    )?;
    let mut bwd = RingMap::new(r0.clone(), v.clone(), (0..v.num_vars()).map(|i| v.var(i)).collect())?;
    let mut steps = Vec::with_capacity(m as usize);

    for j in 1..=m {
        let step = prolong(v, frame, &jets[j as usize - 1], &jets[j as usize], bound, config)?;
        let new_thetas = numbered_variables(THETA, n, (j as usize - 1) * n)?;
        let src_name = format!("{}_A{}", v.name(), j as usize * n);
        let mid = step.certificate.source();
        let ext_fwd = fwd.extended(&new_thetas, &src_name, mid.name())?;
        let ext_bwd = bwd.extended(&new_thetas, mid.name(), &src_name)?;
        let source = ext_fwd.source().clone();
        // rebind to the step's presentations so the contexts line up
        let ext_fwd = RingMap::new(source.clone(), mid.clone(), ext_fwd.images().to_vec())?;
        let ext_bwd = RingMap::new(mid.clone(), source.clone(), ext_bwd.images().to_vec())?;
        fwd = ext_fwd.then_reduced(step.certificate.forward(), config)?;
        bwd = step.certificate.backward().then_reduced(&ext_bwd, config)?;
        steps.push(step);
    }
    let certificate = verify_iso(fwd, bwd, config)?;
    Ok(Trivialization { certificate, steps })
}

/// Reads a map between rings with `k` variables as one between the first
/// `k` variables of `source` and `target`, the remaining variables (shared
/// by both) mapped to themselves.
fn widened(map: &RingMap, source: &Presentation, target: &Presentation) -> Result<RingMap, MorphismError> {
    let k = map.source().num_vars();
    let tctx = target.context();
    let sub: Vec<Polynomial> = (0..map.target().num_vars()).map(|i| target.var(i)).collect();
    let mut images = map
        .images()
        .iter()
        .map(|p| p.substitute(&sub, tctx))
        .collect::<Result<Vec<_>, _>>()?;
    for var in &source.context().vars()[k..] {
        images.push(Polynomial::variable(tctx, var)?);
    }
    RingMap::new(source.clone(), target.clone(), images)
}

/// Transports a stable isomorphism `V × A^r ≅ W × A^r` to the jet rings:
/// `R_V^(m) ≅ V × A^(nm) ≅ W × A^(nm) ≅ R_W^(m)`. The stable certificate is
/// read positionally on the first `dim V + r` variables of the
/// trivialization sources and extended by the remaining θ's. The result
/// is a composite certificate, verified link by link.
pub fn jet_iso_from_stable(
    stable: &IsoCertificate,
    tv: &Trivialization,
    tw: &Trivialization,
    config: &GroebnerConfig,
) -> Result<IsoCertificate, MorphismError> {
    let (p, q) = (tv.certificate.source(), tw.certificate.source());
    let k = stable.source().num_vars();
    if stable.target().num_vars() != k
        || p.num_vars() != q.num_vars()
        || p.num_vars() < k
        || p.context().vars()[k..] != q.context().vars()[k..]
    {
        return Err(MorphismError::Shape(format!(
            "stable isomorphism on {k} variables does not fit [{}] and [{}]",
            p.context(),
            q.context()
        )));
    }
    let middle = verify_iso(widened(stable.forward(), p, q)?, widened(stable.backward(), q, p)?, config)?;
    verify_chain(&[tv.certificate.inverse(config)?, middle, tw.certificate.clone()], config)
}

/// Checks that the trivializations at levels `m` and `m-1` commute with the
/// truncation `ψ: R^(m-1) -> R^(m)` and the inclusion
/// `ι: V × A^(n(m-1)) -> V × A^(nm)`, both by variable identity:
/// `T_m.fwd ∘ ι ≡ ψ ∘ T_{m-1}.fwd` and `T_m.bwd ∘ ψ ≡ ι ∘ T_{m-1}.bwd`.
pub fn check_truncation_compatibility(
    upper: &IsoCertificate,
    lower: &IsoCertificate,
    psi: &RingMap,
    config: &GroebnerConfig,
) -> Result<Transcript, MorphismError> {
    if !psi.source().context().same_as(lower.target().context())
        || !psi.target().context().same_as(upper.target().context())
    {
        return Err(MorphismError::Shape("truncation map does not match the certificates".into()));
    }
    let big = upper.source();
    let small = lower.source();
    let iota = RingMap::new(
        small.clone(),
        big.clone(),
        small
            .context()
            .vars()
            .iter()
            .map(|var| Polynomial::variable(big.context(), var))
            .collect::<Result<_, _>>()?,
    )?;
    let mut t = Transcript::default();
    let q_gb = upper.target().groebner(config)?;
    for (i, var) in small.context().vars().iter().enumerate() {
        let left = upper.forward().apply(&iota.images()[i])?;
        let right = psi.apply(&lower.forward().images()[i])?;
        let diff = &left - &right;
        let nf = q_gb.normal_form(&diff)?;
        if !nf.is_zero() {
            return Err(MorphismError::NotInverse {
                identity: format!("truncation(forward {var})"),
                remainder: nf,
            });
        }
        t.push(format!("truncation(forward {var})"), upper.target().name(), &diff);
    }
    let p_gb = big.groebner(config)?;
    for (i, var) in lower.target().context().vars().iter().enumerate() {
        let left = upper.backward().apply(&psi.images()[i])?;
        let right = iota.apply(&lower.backward().images()[i])?;
        let diff = &left - &right;
        let nf = p_gb.normal_form(&diff)?;
        if !nf.is_zero() {
            return Err(MorphismError::NotInverse {
                identity: format!("truncation(backward {var})"),
                remainder: nf,
            });
        }
        t.push(format!("truncation(backward {var})"), big.name(), &diff);
    }
    Ok(t)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::builtin;
    use crate::morphism::search_frame;

    #[test]
    fn weighted_monomial_counts() {
        // levels 1 and 2 of three variables at weight 2: 6 quadratics in
        // level 1 plus 3 level-2 variables
        let vars: Vec<(usize, u32)> = (3..9).map(|i| (i, if i < 6 { 1 } else { 2 })).collect();
        assert_eq!(weighted_monomials(9, &vars, 2).len(), 9);
        assert_eq!(weighted_monomials(9, &vars, 3).len(), 10 + 9);
        assert_eq!(bounded_monomials(3, &[0, 1, 2], 2).len(), 10);
    }

    #[test]
    fn affine_line_relabels() {
        let cfg = GroebnerConfig::default();
        let a = builtin("@affine-line").unwrap();
        let f = CotangentFrame::identity(&a);
        let t = trivialize_jets(&a, &f, 3, DEFAULT_CORRECTION_BOUND, &cfg).unwrap();
        assert_eq!(t.certificate.source().num_vars(), 4);
        assert_eq!(t.certificate.forward().images()[3].to_string(), "x#3");
        assert!(t.steps.iter().all(|s| s.corrections.iter().all(Polynomial::is_zero)));
    }

    #[test]
    fn parabola_level_two() {
        let cfg = GroebnerConfig::default();
        let p = builtin("@parabola").unwrap();
        let f = search_frame(&p, 1, 4, &cfg).unwrap();
        let t = trivialize_jets(&p, &f, 2, DEFAULT_CORRECTION_BOUND, &cfg).unwrap();
        assert_eq!(t.certificate.source().name(), "parabola_A2");
        assert!(t.certificate.reverify(&cfg).is_ok());
    }

    #[test]
    fn danielewski_x_level_two_has_corrections() {
        let cfg = GroebnerConfig::default();
        let x = builtin("@danielewski-x").unwrap();
        let f = search_frame(&x, 2, 4, &cfg).unwrap();
        let step = build_prolongation_iso(&x, &f, 2, DEFAULT_CORRECTION_BOUND, &cfg).unwrap();
        assert!(step.corrections.iter().any(|h| !h.is_zero()));
        assert!(step.corrections.iter().all(|h| h.is_weight_homogeneous(2)));
        let one = build_prolongation_iso(&x, &f, 1, DEFAULT_CORRECTION_BOUND, &cfg).unwrap();
        assert!(one.corrections.iter().all(Polynomial::is_zero));
    }
}
