//! Free bases of the module of differentials of a smooth variety.

use crate::groebner::{determinant, is_smooth, jacobian, subsets, GroebnerBasis, GroebnerConfig};
use crate::poly::{Monomial, Polynomial};
use crate::presentation::Presentation;

use super::ansatz::Ansatz;
use super::{MorphismError, Transcript};

/// `ω_k = Σ_i a[k][i] dx_i` and `dx_i = Σ_k b[i][k] ω_k`, with
/// `B·A - I = C·J` modulo the ideal, `J` the Jacobian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CotangentFrame {
    pub n: usize,
    /// n × N
    pub a: Vec<Vec<Polynomial>>,
    /// N × n
    pub b: Vec<Vec<Polynomial>>,
    /// N × r
    pub c: Vec<Vec<Polynomial>>,
}

impl CotangentFrame {
    /// The identity frame of affine space.
    pub fn identity(v: &Presentation) -> Self {
        let n = v.num_vars();
        let ctx = v.context();
        let id: Vec<Vec<Polynomial>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Polynomial::one(ctx) } else { Polynomial::zero(ctx) })
                    .collect()
            })
            .collect();
        CotangentFrame {
            n,
            a: id.clone(),
            b: id,
            c: vec![Vec::new(); n],
        }
    }

    fn check_shape(&self, v: &Presentation) -> Result<(), MorphismError> {
        let big_n = v.num_vars();
        let r = v.generators().len();
        let bad = self.a.len() != self.n
            || self.a.iter().any(|row| row.len() != big_n)
            || self.b.len() != big_n
            || self.b.iter().any(|row| row.len() != self.n)
            || self.c.len() != big_n
            || self.c.iter().any(|row| row.len() != r);
        if bad {
            return Err(MorphismError::Shape(format!(
                "frame must have A {}x{big_n}, B {big_n}x{}, C {big_n}x{r}",
                self.n, self.n
            )));
        }
        let all = self.a.iter().chain(&self.b).chain(&self.c).flatten();
        if all.clone().any(|p| !p.context().same_as(v.context())) {
            return Err(MorphismError::Shape("frame entries must be in the variety's variables".into()));
        }
        Ok(())
    }
}

/// Checks `J·B ≡ 0`, `B·A - I - C·J ≡ 0` and `A·B ≡ I` modulo the ideal.
pub fn verify_frame(v: &Presentation, frame: &CotangentFrame, config: &GroebnerConfig) -> Result<Transcript, MorphismError> {
    frame.check_shape(v)?;
    let gb = v.groebner(config)?;
    let jac = jacobian(v);
    let ctx = v.context();
    let big_n = v.num_vars();
    let mut t = Transcript::default();
    let mut check = |p: Polynomial, check: &'static str, row: usize, col: usize| -> Result<(), MorphismError> {
        let nf = gb.normal_form(&p)?;
        if !nf.is_zero() {
            return Err(MorphismError::Frame { check, row, col, remainder: nf });
        }
        t.push(format!("{check}({row},{col})"), v.name(), &p);
        Ok(())
    };
    for (a, grad) in jac.iter().enumerate() {
        for k in 0..frame.n {
            let mut s = Polynomial::zero(ctx);
            for i in 0..big_n {
                s = &s + &(&grad[i] * &frame.b[i][k]);
            }
            check(s, "relation", a, k)?;
        }
    }
    for i in 0..big_n {
        for i2 in 0..big_n {
            let mut s = if i == i2 { -&Polynomial::one(ctx) } else { Polynomial::zero(ctx) };
            for k in 0..frame.n {
                s = &s + &(&frame.b[i][k] * &frame.a[k][i2]);
            }
            for (a, grad) in jac.iter().enumerate() {
                s = &s - &(&frame.c[i][a] * &grad[i2]);
            }
            check(s, "unimodular", i, i2)?;
        }
    }
    for k in 0..frame.n {
        for k2 in 0..frame.n {
            let mut s = if k == k2 { -&Polynomial::one(ctx) } else { Polynomial::zero(ctx) };
            for i in 0..big_n {
                s = &s + &(&frame.a[k][i] * &frame.b[i][k2]);
            }
            check(s, "inverse", k, k2)?;
        }
    }
    Ok(t)
}

const POOL_LIMIT: usize = 24;
const COMBINATION_LIMIT: usize = 400;

fn max_degree(v: &[Polynomial]) -> u32 {
    v.iter().map(Polynomial::degree).max().unwrap_or(0)
}

fn combinations(len: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = subsets(len, k);
    out.truncate(COMBINATION_LIMIT);
    out
}

/// Searches for a frame whose entries have degree at most `bound`, trying
/// smaller degrees first. Fixed tangent fields for the first `n-1` columns
/// come from a candidate pool; the last column and then `A`, `C` are solved
/// linearly.
pub fn search_frame(
    v: &Presentation,
    n: usize,
    bound: u32,
    config: &GroebnerConfig,
) -> Result<CotangentFrame, MorphismError> {
    let big_n = v.num_vars();
    let r = v.generators().len();
    if n + r != big_n {
        return Err(MorphismError::FrameShape(format!("n = {n}, N = {big_n}, r = {r}")));
    }
    if !is_smooth(v, None, config)? {
        return Err(MorphismError::NotSmooth(v.name().to_string()));
    }
    if r == 0 {
        return Ok(CotangentFrame::identity(v));
    }
    let gb = v.groebner(config)?;
    let jac = jacobian(v);
    let ctx = v.context();

    for d in 0..=bound {
        let monos = gb.standard_monomials(d);
        let mut pool: Vec<Vec<Polynomial>> = Vec::new();
        if r == 1 {
            for i in 0..big_n {
                for j in i + 1..big_n {
                    let mut field = vec![Polynomial::zero(ctx); big_n];
                    field[i] = jac[0][j].clone();
                    field[j] = -&jac[0][i];
                    if max_degree(&field) <= d && field.iter().any(|p| !p.is_zero()) {
                        pool.push(field);
                    }
                }
            }
        }
        if n > 1 {
            let mut tangent = Ansatz::new(&gb, &monos, big_n);
            for grad in &jac {
                let terms: Vec<(usize, &Polynomial)> = grad.iter().enumerate().collect();
                tangent.equation(&terms, &Polynomial::zero(ctx))?;
            }
            for field in tangent.nullspace() {
                if pool.len() >= POOL_LIMIT {
                    break;
                }
                if field.iter().any(|p| !p.is_zero()) {
                    pool.push(field);
                }
            }
        }
        for combo in combinations(pool.len(), n - 1) {
            let fixed: Vec<&Vec<Polynomial>> = combo.iter().map(|&k| &pool[k]).collect();
            let Some(last) = solve_last_column(v, &gb, &jac, &fixed, &monos)? else {
                continue;
            };
            let b: Vec<Vec<Polynomial>> = (0..big_n)
                .map(|i| {
                    let mut row: Vec<Polynomial> = fixed.iter().map(|f| f[i].clone()).collect();
                    row.push(last[i].clone());
                    row
                })
                .collect();
            let Some((a, c)) = solve_a_c(v, &gb, &jac, &b, n, &monos)? else {
                continue;
            };
            let frame = CotangentFrame { n, a, b, c };
            if verify_frame(v, &frame, config).is_ok() {
                return Ok(frame);
            }
        }
    }
    Err(MorphismError::NoFrame(bound))
}

/// Last column `u` of `B`: tangent (`J·u ≡ 0`) with every `n × n` minor of
/// `B` on rows `S` equal to `±` the complementary `r × r` minor of `J`.
fn solve_last_column(
    v: &Presentation,
    gb: &GroebnerBasis,
    jac: &[Vec<Polynomial>],
    fixed: &[&Vec<Polynomial>],
    monos: &[Monomial],
) -> Result<Option<Vec<Polynomial>>, MorphismError> {
    let big_n = v.num_vars();
    let n = fixed.len() + 1;
    let ctx = v.context();
    let mut sys = Ansatz::new(gb, monos, big_n);
    for grad in jac {
        let terms: Vec<(usize, &Polynomial)> = grad.iter().enumerate().collect();
        sys.equation(&terms, &Polynomial::zero(ctx))?;
    }
    for rows in subsets(big_n, n) {
        let comp: Vec<usize> = (0..big_n).filter(|i| !rows.contains(i)).collect();
        let jminor = determinant(
            &jac.iter()
                .map(|g| comp.iter().map(|&c| g[c].clone()).collect())
                .collect::<Vec<_>>(),
            ctx,
        );
        let sign_odd = comp.iter().map(|c| c + 1).sum::<usize>() % 2 == 1;
        let target = if sign_odd { -&jminor } else { jminor };
        // expand det(B_S) along the last column
        let mut coeffs: Vec<(usize, Polynomial)> = Vec::new();
        for (t, &row) in rows.iter().enumerate() {
            let minor: Vec<Vec<Polynomial>> = rows
                .iter()
                .filter(|&&q| q != row)
                .map(|&q| fixed.iter().map(|f| f[q].clone()).collect())
                .collect();
            let cof = determinant(&minor, ctx);
            let cof = if (t + n - 1) % 2 == 1 { -&cof } else { cof };
            coeffs.push((row, cof));
        }
        let terms: Vec<(usize, &Polynomial)> = coeffs.iter().map(|(s, p)| (*s, p)).collect();
        sys.equation(&terms, &-&target)?;
    }
    Ok(sys.solve())
}

/// Solves `B·A - C·J ≡ I` for `A` (n × N) and `C` (N × r).
#[allow(clippy::type_complexity)]
fn solve_a_c(
    v: &Presentation,
    gb: &GroebnerBasis,
    jac: &[Vec<Polynomial>],
    b: &[Vec<Polynomial>],
    n: usize,
    monos: &[Monomial],
) -> Result<Option<(Vec<Vec<Polynomial>>, Vec<Vec<Polynomial>>)>, MorphismError> {
    let big_n = v.num_vars();
    let r = jac.len();
    let ctx = v.context();
    // slots: a[k][i] -> k*N + i, c[i][a] -> n*N + i*r + a
    let slots = n * big_n + big_n * r;
    let mut sys = Ansatz::new(gb, monos, slots);
    let neg_jac: Vec<Vec<Polynomial>> = jac.iter().map(|g| g.iter().map(|p| -p).collect()).collect();
    for i in 0..big_n {
        for i2 in 0..big_n {
            let mut terms: Vec<(usize, &Polynomial)> = Vec::new();
            for k in 0..n {
                terms.push((k * big_n + i2, &b[i][k]));
            }
            for (a, g) in neg_jac.iter().enumerate() {
                terms.push((n * big_n + i * r + a, &g[i2]));
            }
            let constant = if i == i2 { -&Polynomial::one(ctx) } else { Polynomial::zero(ctx) };
            sys.equation(&terms, &constant)?;
        }
    }
    let Some(x) = sys.solve() else {
        return Ok(None);
    };
    let a = (0..n).map(|k| x[k * big_n..(k + 1) * big_n].to_vec()).collect();
    let c = (0..big_n)
        .map(|i| x[n * big_n + i * r..n * big_n + (i + 1) * r].to_vec())
        .collect();
    Ok(Some((a, c)))
}
