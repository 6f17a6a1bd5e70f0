use super::*;
use crate::corpus::{builtin, test_corpus};
use crate::poly::{parse, rat};
use proptest::prelude::*;

/// Truncated power series with polynomial coefficients, `c[k]` the `t^k`
/// coefficient, arithmetic mod `t^(m+1)`.
#[derive(Clone)]
struct Series(Vec<Polynomial>);

impl Series {
    fn constant(ctx: &Arc<Context>, m: usize, c: &Rational) -> Self {
        let mut v = vec![Polynomial::zero(ctx); m + 1];
        v[0] = Polynomial::constant(ctx, c.clone());
        Series(v)
    }

    fn add(&self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn mul(&self, o: &Series) -> Series {
        let m = self.0.len() - 1;
        let ctx = self.0[0].context().clone();
        let mut out = vec![Polynomial::zero(&ctx); m + 1];
        for i in 0..=m {
            for j in 0..=m - i {
                out[i + j] = &out[i + j] + &(&self.0[i] * &o.0[j]);
            }
        }
        Series(out)
    }
}

/// Independent oracle: evaluates `f` on the generic jet by series
/// arithmetic.
fn series_oracle(f: &Polynomial, jet_ctx: &Arc<Context>, m: usize) -> Vec<Polynomial> {
    let n = f.context().len();
    let coords: Vec<Series> = (0..n)
        .map(|i| Series((0..=m).map(|j| Polynomial::var(jet_ctx, j * n + i)).collect()))
        .collect();
    let mut total = Series::constant(jet_ctx, m, &rat(0));
    for (mono, c) in f.terms() {
        let mut term = Series::constant(jet_ctx, m, c);
        for i in 0..n {
            for _ in 0..mono.exponent(i) {
                term = term.mul(&coords[i]);
            }
        }
        total = total.add(&term);
    }
    total.0
}

#[test]
fn affine_space_has_no_equations() {
    let a = builtin("@affine-3").unwrap();
    let j = jet_equations(&a, 4).unwrap();
    assert_eq!(j.context().len(), 15);
    assert!(j.ring().generators().is_empty());
}

#[test]
fn danielewski_x_strata() {
    let x = builtin("@danielewski-x").unwrap();
    let j = jet_equations(&x, 2).unwrap();
    let c = j.context();
    assert_eq!(j.stratum(0, 0), &parse("x#0*z#0 - y#0^2 + 1", c).unwrap());
    assert_eq!(j.stratum(0, 1), &parse("x#0*z#1 + x#1*z#0 - 2*y#0*y#1", c).unwrap());
    assert_eq!(
        j.stratum(0, 2),
        &parse("x#0*z#2 + x#1*z#1 + x#2*z#0 - 2*y#0*y#2 - y#1^2", c).unwrap()
    );
    assert_eq!(j.ring().generators().len(), 3);
    assert_eq!(j.jacobian_pairing(0, 1).unwrap(), *j.stratum(0, 1));
}

#[test]
fn level_zero_is_a_renaming() {
    let p = builtin("@circle").unwrap();
    let j = jet_equations(&p, 0).unwrap();
    assert_eq!(j.ring().generators(), &[parse("x#0^2 + y#0^2 - 1", j.context()).unwrap()]);
}

#[test]
fn oracle_agreement_on_corpus() {
    for v in test_corpus() {
        for m in 1..=4u32 {
            let j = jet_equations(&v, m).unwrap();
            for (a, f) in v.generators().iter().enumerate() {
                let oracle = series_oracle(f, j.context(), m as usize);
                for k in 0..=m {
                    assert_eq!(j.stratum(a, k), &oracle[k as usize], "{} m={m} a={a} k={k}", v.name());
                }
            }
        }
    }
}

#[test]
fn grading_holds_on_corpus() {
    for v in test_corpus() {
        for m in 0..=3 {
            let report = jet_equations(&v, m).unwrap().check_grading().unwrap();
            assert!(report.passed(), "{}: {:?}", v.name(), report.violations);
        }
    }
}

#[test]
fn fake_stratum_is_rejected() {
    let ctx = Context::from_names(&["x#0", "x#1"]).unwrap();
    let fake = parse("x#0 + x#1", &ctx).unwrap();
    let v = check_stratum(&fake, 0, 1).unwrap();
    assert!(v.iter().any(|e| matches!(e, GradingViolation::Weight { .. })));
    assert!(v.iter().any(|e| matches!(e, GradingViolation::Scaling { .. })));
    let strat = parse("x#1", &ctx).unwrap();
    assert!(matches!(
        check_stratum(&strat, 0, 0).unwrap()[..],
        [GradingViolation::Weight { .. }, GradingViolation::Stratification { .. }, GradingViolation::Scaling { .. }]
    ));
}

#[test]
fn evaluate_constant_jets() {
    let x = builtin("@danielewski-x").unwrap();
    let j = jet_equations(&x, 1).unwrap();
    let on = vec![vec![rat(1), rat(0)], vec![rat(1), rat(0)], vec![rat(0), rat(0)]];
    assert_eq!(j.evaluate_on_jet(&on).unwrap(), vec![rat(0), rat(0)]);
    assert!(j.is_jet(&on).unwrap());
    let origin = vec![vec![rat(0), rat(0)]; 3];
    assert_eq!(j.evaluate_on_jet(&origin).unwrap()[0], rat(1));
    assert!(matches!(j.evaluate_on_jet(&origin[..2]), Err(JetError::Shape(_))));
    assert!(matches!(j.evaluate_on_jet(&[vec![rat(0)], vec![rat(0)], vec![rat(0)]]), Err(JetError::Shape(_))));
}

#[test]
fn truncation_and_sections() {
    let x = builtin("@danielewski-x").unwrap();
    let j = jet_equations(&x, 2).unwrap();
    let psi = j.truncation_map(1).unwrap();
    assert_eq!(psi.source().generators().len(), 2);
    assert!(matches!(j.truncation_map(3), Err(JetError::LevelTooHigh { .. })));
    let id = j.truncation_map(2).unwrap();
    assert!(id.images().iter().enumerate().all(|(i, p)| *p == Polynomial::var(j.context(), i)));

    let sigma = j.zero_section().unwrap();
    for a in 0..1 {
        assert_eq!(sigma.apply(j.stratum(a, 0)).unwrap(), x.generators()[a]);
        for k in 1..=2 {
            assert!(sigma.apply(j.stratum(a, k)).unwrap().is_zero());
        }
    }
    let pi = j.projection().unwrap();
    let round = pi.then(&sigma).unwrap();
    for i in 0..3 {
        assert_eq!(round.images()[i], x.var(i));
    }
}

#[test]
fn fiber_identity_examples() {
    let x = builtin("@danielewski-x").unwrap();
    let fib = fiber_over_zero_section(&x, 2).unwrap();
    assert!(fib.identity_holds());
    let c = fib.presentation.context();
    assert!(fib.presentation.generators().contains(&parse("z#0*x#2 - 2*y#0*y#2 + x#0*z#2", c).unwrap()));

    let cusp = builtin("@cusp").unwrap();
    let fib = fiber_over_zero_section(&cusp, 2).unwrap();
    assert!(fib.identity_holds());
    let c = fib.presentation.context();
    assert!(fib.presentation.generators().contains(&parse("-3*x#0^2*x#2 + 2*y#0*y#2", c).unwrap()));
    assert_eq!(fiber_over_zero_section(&cusp, 0).unwrap_err(), JetError::ZeroLevel);
}

#[test]
fn fiber_identity_on_corpus() {
    for v in test_corpus() {
        for m in 1..=4 {
            let fib = fiber_over_zero_section(&v, m).unwrap();
            assert!(fib.identity_holds(), "{} m={m}: {:?}", v.name(), fib.mismatches);
        }
    }
}

#[test]
fn infinite_level_rejected() {
    assert_eq!(parse_level("inf"), Err(JetError::InfiniteLevel));
    assert_eq!(parse_level("∞"), Err(JetError::InfiniteLevel));
    assert_eq!(parse_level(" 3 "), Ok(3));
    assert!(matches!(parse_level("-1"), Err(JetError::BadLevel(_))));
}

proptest! {
    #[test]
    fn evaluation_matches_series_on_random_jets(
        coeffs in proptest::collection::vec(-3i64..4, 9),
        which in 0usize..7,
    ) {
        let v = test_corpus()[which].clone();
        let n = v.num_vars();
        let m = 2usize;
        let j = jet_equations(&v, m as u32).unwrap();
        let gamma: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..=m).map(|k| rat(coeffs[(i * 3 + k) % 9])).collect())
            .collect();
        let values = j.evaluate_on_jet(&gamma).unwrap();
        // series evaluation with numeric coefficients via the oracle
        let mut point = vec![rat(0); n * (m + 1)];
        for i in 0..n {
            for k in 0..=m {
                point[k * n + i] = gamma[i][k].clone();
            }
        }
        for (a, f) in v.generators().iter().enumerate() {
            let oracle = series_oracle(f, j.context(), m);
            for k in 0..=m {
                prop_assert_eq!(&values[k * v.generators().len() + a], &oracle[k].evaluate(&point).unwrap());
            }
        }
    }
}
