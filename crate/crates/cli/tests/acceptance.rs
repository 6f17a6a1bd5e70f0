//! The acceptance suite. Runs every criterion, prints one line each and
//! exits nonzero if any fails or runs past its time bound.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use jetcert::corpus::{builtin, test_corpus};
use jetcert::format::{parse_certificate, write_certificate};
use jetcert::groebner::{buchberger_in, eliminate, is_smooth, GroebnerConfig, MonomialOrder};
use jetcert::jets::{fiber_over_zero_section, jet_equations, JetPresentation};
use jetcert::morphism::{
    check_truncation_compatibility, search_frame, trivialize_jets, verify_additive_action, verify_iso,
    CotangentFrame, RingMap, DEFAULT_CORRECTION_BOUND,
};
use jetcert::poly::ratio;
use jetcert::{parse, Context, Monomial, Polynomial, Presentation, Variable};
use jetcert_cli::{danielewski, Status};

type Outcome = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cfg() -> GroebnerConfig {
    GroebnerConfig::default()
}

fn data(name: &str) -> String {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn frame_for(v: &Presentation) -> CotangentFrame {
    let n = v.num_vars() - v.generators().len();
    search_frame(v, n, 4, &cfg()).unwrap()
}

fn smooth_corpus() -> Vec<Presentation> {
    ["affine-plane", "parabola", "circle", "danielewski-x", "danielewski-y"]
        .iter()
        .map(|n| builtin(n).unwrap())
        .collect()
}

// -- truncated power series oracle ------------------------------------------

/// Product of two series in `t`, dropping powers above `m`.
fn series_mul(a: &[Polynomial], b: &[Polynomial], ctx: &Arc<Context>) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::zero(ctx); a.len()];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate().take(a.len() - i) {
            out[i + j] = &out[i + j] + &(ai * bj);
        }
    }
    out
}

/// Coefficients of `t^0..t^m` of `f(Σ_j x_i#j t^j)`, term by term.
fn oracle_strata(f: &Polynomial, jets: &JetPresentation, m: u32) -> Vec<Polynomial> {
    let ctx = jets.context();
    let n = f.context().len();
    let len = m as usize + 1;
    let series: Vec<Vec<Polynomial>> = (0..n)
        .map(|i| (0..=m).map(|j| jets.jet_var(i, j)).collect())
        .collect();
    let mut one = vec![Polynomial::zero(ctx); len];
    one[0] = Polynomial::one(ctx);
    let mut total = vec![Polynomial::zero(ctx); len];
    for (mono, c) in f.terms() {
        let mut acc = one.clone();
        for i in 0..n {
            for _ in 0..mono.exponent(i) {
                acc = series_mul(&acc, &series[i], ctx);
            }
        }
        for k in 0..len {
            total[k] = &total[k] + &acc[k].scale(c);
        }
    }
    total
}

/// Every term of weight `k` and no variable above level `k`.
fn graded(p: &Polynomial, k: u32) -> bool {
    let vars = p.context().vars();
    p.terms().iter().all(|(mono, _)| {
        let w: u32 = mono.support().map(|i| vars[i].level().unwrap() * u32::from(mono.exponent(i))).sum();
        w == k && mono.support().all(|i| vars[i].level().unwrap() <= k)
    })
}

fn oracle_equivalence() -> Outcome {
    for v in test_corpus() {
        for m in 1..=4 {
            let jets = jet_equations(&v, m).unwrap();
            for (a, f) in v.generators().iter().enumerate() {
                let expected = oracle_strata(f, &jets, m);
                for k in 0..=m {
                    let got = jets.stratum(a, k);
                    ensure(*got == expected[k as usize], || {
                        format!("{} m={m} F[{a},{k}]: {got} != oracle {}", v.name(), expected[k as usize])
                    })?;
                    ensure(graded(got, k), || format!("{} m={m} F[{a},{k}] = {got} is not graded", v.name()))?;
                }
            }
            let report = jets.check_grading().unwrap();
            ensure(report.passed(), || format!("{} m={m}: {:?}", v.name(), report.violations))?;
        }
    }
    Ok(())
}

fn scaling_identity() -> Outcome {
    for v in test_corpus() {
        for m in 1..=3 {
            let jets = jet_equations(&v, m).unwrap();
            let ctx = jets.context();
            let ext = ctx.extended(&[Variable::plain("s")]).unwrap();
            let s = Polynomial::var(&ext, ctx.len());
            let scaled: Vec<Polynomial> = ctx
                .vars()
                .iter()
                .enumerate()
                .map(|(i, x)| &Polynomial::var(&ext, i) * &s.pow(x.level().unwrap()))
                .collect();
            for a in 0..v.generators().len() {
                for k in 0..=m {
                    let f = jets.stratum(a, k);
                    let lhs = f.substitute(&scaled, &ext).unwrap();
                    let rhs = &f.embed(&ext).unwrap() * &s.pow(k);
                    ensure(lhs == rhs, || format!("{} m={m} F[{a},{k}]: {}", v.name(), &lhs - &rhs))?;
                }
            }
        }
    }
    Ok(())
}

fn fiber_identity() -> Outcome {
    for v in test_corpus() {
        for m in 2..=4 {
            let f = fiber_over_zero_section(&v, m).unwrap();
            ensure(f.identity_holds(), || format!("{} m={m}: {:?}", v.name(), f.mismatches))?;
        }
    }
    Ok(())
}

fn prolongation_isos() -> Outcome {
    let cases: &[(&str, u32)] = &[
        ("affine-line", 4),
        ("parabola", 3),
        ("circle", 2),
        ("danielewski-x", 3),
        ("danielewski-y", 3),
    ];
    let config = cfg();
    for &(name, top) in cases {
        let v = builtin(name).unwrap();
        let frame = frame_for(&v);
        for m in 1..=top {
            let start = Instant::now();
            let t = trivialize_jets(&v, &frame, m, DEFAULT_CORRECTION_BOUND, &config)
                .map_err(|e| format!("{name} m={m}: {e}"))?;
            let c = &t.certificate;
            let text = write_certificate(c.forward(), c.backward());
            let (f, b) = parse_certificate(&text, c.source(), c.target()).map_err(|e| format!("{name} m={m}: {e}"))?;
            let again = verify_iso(f, b, &config).map_err(|e| format!("{name} m={m} re-verification: {e}"))?;
            ensure(again.transcript().hash() == c.transcript().hash(), || {
                format!("{name} m={m}: re-verification transcript differs")
            })?;
            let n = v.num_vars() - v.generators().len();
            ensure(c.source().num_vars() == v.num_vars() + n * m as usize, || {
                format!("{name} m={m}: source has {} variables", c.source().num_vars())
            })?;
            let took = start.elapsed();
            ensure(took < Duration::from_secs(300), || format!("{name} m={m} took {took:?}"))?;
        }
    }
    Ok(())
}

fn action(v: &Presentation, images: &[&str]) -> RingMap {
    let target = v.with_free_variables(&format!("{}_t", v.name()), &[Variable::plain("t")]).unwrap();
    let imgs = images.iter().map(|s| target.parse(s).unwrap()).collect();
    RingMap::new(v.clone(), target, imgs).unwrap()
}

fn structural_suite() -> Outcome {
    let config = cfg();
    let x = builtin("danielewski-x").unwrap();
    let y = builtin("danielewski-y").unwrap();
    let actions = [
        (&x, ["x", "y + x*t", "z + 2*y*t + x*t^2"]),
        (&y, ["x", "y + x^2*t", "z + 2*y*t + x^2*t^2"]),
    ];
    for (v, images) in actions {
        let r = verify_additive_action(v, &action(v, &images), &config).unwrap();
        ensure(r.passed(), || format!("{} action: {r:?}", v.name()))?;
    }
    for v in [&x, &y] {
        ensure(is_smooth(v, None, &config).unwrap(), || format!("{} is not smooth", v.name()))?;
        search_frame(v, 2, 4, &config).map_err(|e| format!("{} frame: {e}", v.name()))?;
    }
    let cusp = builtin("cusp").unwrap();
    ensure(!is_smooth(&cusp, None, &config).unwrap(), || "cusp passed the smoothness test".into())
}

fn composite() -> Outcome {
    let config = cfg();
    let text = data("danielewski_cancellation.cert");
    let s = builtin("danielewski-x")
        .unwrap()
        .with_free_variables("danielewski_x_A1", &[Variable::plain("t")])
        .unwrap();
    let t = builtin("danielewski-y")
        .unwrap()
        .with_free_variables("danielewski_y_A1", &[Variable::plain("t")])
        .unwrap();
    let (f, b) = parse_certificate(&text, &s, &t).map_err(|e| e.to_string())?;
    verify_iso(f, b, &config).map_err(|e| format!("cancellation certificate: {e}"))?;
    for m in 1..=2 {
        let (report, cert) = danielewski(m, Some(&text), 4, &config).map_err(|e| e.to_string())?;
        ensure(report.passed(), || report.render())?;
        for name in [
            "cancellation",
            "composite",
            "descent-rejects-composite",
            "descent-accepts-induced-x",
            "descent-accepts-induced-y",
        ] {
            let status = report.record(name).map(|r| r.status);
            ensure(status == Some(Status::Pass), || format!("m={m} {name}: {status:?}"))?;
        }
        let cert = cert.ok_or_else(|| format!("m={m}: no composite certificate"))?;
        cert.reverify(&config).map_err(|e| format!("m={m} re-verification: {e}"))?;
        let (src, tgt) = (cert.source().context().to_string(), cert.target().context().to_string());
        let expected = jet_equations(&builtin("danielewski-x").unwrap(), m).unwrap().context().to_string();
        ensure(src == expected && tgt == expected, || format!("m={m}: rings [{src}] and [{tgt}]"))?;
    }
    Ok(())
}

fn random_poly(rng: &mut StdRng, ctx: &Arc<Context>, terms: usize, deg: u16) -> Polynomial {
    Polynomial::from_terms(
        ctx,
        (0..terms).map(|_| {
            let e = (0..ctx.len()).map(|_| rng.gen_range(0..=deg)).collect();
            (Monomial::from_exponents(e), ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3)))
        }),
    )
}

fn groebner_soundness() -> Outcome {
    let config = cfg();
    let ctx = Context::from_names(&["x", "y", "z"]).unwrap();
    let order = MonomialOrder::grevlex(&ctx);
    let ideals: [&[&str]; 5] = [
        &["y - x^2", "z - x^3"],
        &["x + y + z", "x*y + y*z + z*x", "x*y*z - 1"],
        &["x*z - y^2 + 1", "x^2*z - y^2 + 1"],
        &["x^2 + y^2 + z^2 - 1", "x - y*z", "y^2 - z"],
        &["x*y - z", "y*z - x", "z*x - y"],
    ];
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for gens in ideals {
        let gens: Vec<Polynomial> = gens.iter().map(|g| parse(g, &ctx).unwrap()).collect();
        let reference = buchberger_in(&ctx, &gens, &order, &config).unwrap();
        for _ in 0..20 {
            let mut shuffled: Vec<Polynomial> = gens
                .iter()
                .map(|g| {
                    let mut c = ratio(rng.gen_range(1..=7), rng.gen_range(1..=5));
                    if rng.gen_bool(0.5) {
                        c = -c;
                    }
                    g.scale(&c)
                })
                .collect();
            shuffled.shuffle(&mut rng);
            let gb = buchberger_in(&ctx, &shuffled, &order, &config).unwrap();
            ensure(gb.basis() == reference.basis(), || format!("basis of {gens:?} depends on generator order"))?;
        }
        for _ in 0..10 {
            let combo = gens.iter().fold(Polynomial::zero(&ctx), |acc, g| {
                &acc + &(g * &random_poly(&mut rng, &ctx, 3, 2))
            });
            ensure(reference.contains(&combo).unwrap(), || format!("{combo} not found in {gens:?}"))?;
        }
    }
    let c = Context::from_names(&["t", "x", "y"]).unwrap();
    let gens = [parse("y - t^2", &c).unwrap(), parse("x - t^3", &c).unwrap()];
    let elim = eliminate(&c, &gens, &[0], &config).unwrap();
    let target = parse("x^2 - y^3", &c).unwrap();
    ensure(elim.len() == 1 && elim[0] == target.monic(), || format!("elimination gave {elim:?}"))
}

fn truncation_compatibility() -> Outcome {
    let config = cfg();
    for v in smooth_corpus() {
        let frame = frame_for(&v);
        let t: Vec<_> = (1..=3)
            .map(|m| trivialize_jets(&v, &frame, m, DEFAULT_CORRECTION_BOUND, &config).unwrap())
            .collect();
        for m in 2..=3u32 {
            let psi = jet_equations(&v, m).unwrap().truncation_map(m - 1).unwrap();
            let (upper, lower) = (&t[m as usize - 1], &t[m as usize - 2]);
            check_truncation_compatibility(&upper.certificate, &lower.certificate, &psi, &config)
                .map_err(|e| format!("{} m={m}: {e}", v.name()))?;
        }
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 8] = [
        ("jet-construction oracle equivalence", 10, oracle_equivalence),
        ("scaling identity", 10, scaling_identity),
        ("fiber identity", 10, fiber_identity),
        ("prolongation isomorphisms", 300 * 15, prolongation_isos),
        ("Danielewski structural suite", 120, structural_suite),
        ("Danielewski composite and descent", 300, composite),
        ("Groebner engine soundness", 30, groebner_soundness),
        ("truncation compatibility", 60, truncation_compatibility),
    ];
    let mut failed = 0;
    for (i, (name, bound, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let took = start.elapsed();
        let result = result.and_then(|()| {
            ensure(took < Duration::from_secs(bound), || format!("took {took:.2?}, bound {bound} s"))
        });
        let word = if result.is_ok() { "PASS" } else { "FAIL" };
        println!("ACCEPTANCE {} {name}: {word} ({:.2} s)", i + 1, took.as_secs_f64());
        if let Err(e) = result {
            failed += 1;
            for line in e.lines() {
                println!("    {line}");
            }
        }
    }
    if failed > 0 {
        println!("acceptance: {failed} of 8 criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all 8 criteria passed");
}
