//! Invariants of prolongation, fibers and descent.

use proptest::prelude::*;

use jetcert::corpus::{builtin, test_corpus};
use jetcert::groebner::GroebnerConfig;
use jetcert::jets::fiber_over_zero_section;
use jetcert::morphism::{
    descend_equivariant_iso, induce_jet_certificate, search_frame, trivialize_jets, verify_iso, MorphismError,
    RingMap, DEFAULT_CORRECTION_BOUND,
};
use jetcert::poly::ratio;
use jetcert::{Polynomial, Presentation, Rational, Variable};

fn map(src: &Presentation, tgt: &Presentation, images: &[String]) -> RingMap {
    let imgs = images.iter().map(|s| tgt.parse(s).unwrap()).collect();
    RingMap::new(src.clone(), tgt.clone(), imgs).unwrap()
}

#[test]
fn theta_images_are_graded_and_match_the_frame() {
    let cfg = GroebnerConfig::default();
    for name in ["parabola", "circle", "danielewski-x", "danielewski-y"] {
        let v = builtin(name).unwrap();
        let n = v.num_vars() - v.generators().len();
        let frame = search_frame(&v, n, 4, &cfg).unwrap();
        let t = trivialize_jets(&v, &frame, 3, DEFAULT_CORRECTION_BOUND, &cfg).unwrap();
        for step in &t.steps {
            let m = step.level;
            for k in 1..=n {
                let theta = Variable::plain(format!("theta{}", (m as usize - 1) * n + k));
                let img = step.certificate.forward().image(&theta).unwrap();
                assert!(img.is_weight_homogeneous(m), "{name}: {theta} -> {img}");
                // with the middle levels zeroed this is the frame row A_k
                let jctx = img.context();
                let zeroed: Vec<Polynomial> = jctx
                    .vars()
                    .iter()
                    .enumerate()
                    .map(|(i, x)| match x.level() {
                        Some(l) if l > 0 && l < m => Polynomial::zero(jctx),
                        _ => Polynomial::var(jctx, i),
                    })
                    .collect();
                let at0: Vec<Polynomial> = v
                    .context()
                    .vars()
                    .iter()
                    .map(|x| Polynomial::variable(jctx, &Variable::jet(x.base_name(), 0)).unwrap())
                    .collect();
                let expected = v.context().vars().iter().enumerate().fold(Polynomial::zero(jctx), |acc, (i, x)| {
                    let a = frame.a[k - 1][i].substitute(&at0, jctx).unwrap();
                    &acc + &(&a * &Polynomial::variable(jctx, &Variable::jet(x.base_name(), m)).unwrap())
                });
                let gb = step.certificate.target().groebner(&cfg).unwrap();
                let diff = &img.substitute(&zeroed, jctx).unwrap() - &expected;
                assert!(gb.normal_form(&diff).unwrap().is_zero(), "{name}: {theta} -> {img}");
                // only level-0 and level-m variables appear
                for (mono, _) in img.terms() {
                    for i in mono.support() {
                        let lvl = img.context().var(i).level().unwrap();
                        assert!(lvl == 0 || lvl == m, "{name}: {theta} -> {img}");
                    }
                }
            }
        }
    }
}

#[test]
fn fiber_identity_on_the_corpus() {
    for v in test_corpus() {
        for m in 1..=4 {
            let f = fiber_over_zero_section(&v, m).unwrap();
            assert!(f.identity_holds(), "{} at m={m}: {:?}", v.name(), f.mismatches);
        }
    }
}

fn rotation(u: Rational) -> (Rational, Rational) {
    let one = Rational::from_integer(1.into());
    let d = &one + &u * &u;
    ((&one - &u * &u) / &d, (&u + &u) / &d)
}

fn descends_to_itself(v: &Presentation, fwd: Vec<String>, bwd: Vec<String>, m: u32) {
    let cfg = GroebnerConfig::default();
    let base = verify_iso(map(v, v, &fwd), map(v, v, &bwd), &cfg).unwrap();
    let lifted = induce_jet_certificate(&base, m, &cfg).unwrap();
    let down = descend_equivariant_iso(&lifted, v, v, &cfg).unwrap();
    assert_eq!(down.forward().images(), base.forward().reduced(&cfg).unwrap().images());
    assert_eq!(down.backward().images(), base.backward().reduced(&cfg).unwrap().images());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn circle_rotations_descend(n in -5i64..=5, d in 1i64..=4, m in 1u32..=2) {
        let (a, b) = rotation(ratio(n, d));
        let v = builtin("circle").unwrap();
        descends_to_itself(
            &v,
            vec![format!("({a})*x - ({b})*y"), format!("({b})*x + ({a})*y")],
            vec![format!("({a})*x + ({b})*y"), format!("-({b})*x + ({a})*y")],
            m,
        );
    }

    #[test]
    fn parabola_scalings_descend(n in prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3]), d in 1i64..=3, m in 1u32..=3) {
        let c = ratio(n, d);
        let ci = ratio(d, n);
        let v = builtin("parabola").unwrap();
        descends_to_itself(
            &v,
            vec![format!("({c})*x"), format!("({c})^2*y")],
            vec![format!("({ci})*x"), format!("({ci})^2*y")],
            m,
        );
    }
}

#[test]
fn level_mixing_automorphism_is_rejected() {
    let cfg = GroebnerConfig::default();
    let line = builtin("affine-line").unwrap();
    for m in 1..=3u32 {
        let jets = jetcert::jets::jet_equations(&line, m).unwrap();
        let r = jets.ring();
        let mut f: Vec<String> = r.context().vars().iter().map(|v| v.to_string()).collect();
        let mut b = f.clone();
        f[0] = "x#0 + x#1".into();
        b[0] = "x#0 - x#1".into();
        let c = verify_iso(map(r, r, &f), map(r, r, &b), &cfg).unwrap();
        match descend_equivariant_iso(&c, &line, &line, &cfg) {
            Err(MorphismError::NotWeightPreserving { map, variable, weight }) => {
                assert_eq!((map, variable.as_str(), weight), ("forward", "x#0", 0));
            }
            other => panic!("m={m}: {other:?}"),
        }
    }
}
