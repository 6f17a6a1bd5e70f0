use jetcert::corpus::builtin;
use jetcert::groebner::GroebnerConfig;
use jetcert::morphism::{
    descend_equivariant_iso, jet_iso_from_stable, search_frame, trivialize_jets, verify_iso, MorphismError,
    RingMap, DEFAULT_CORRECTION_BOUND,
};
use jetcert::{Presentation, Variable};

fn map(src: &Presentation, tgt: &Presentation, images: &[&str]) -> RingMap {
    let imgs = images.iter().map(|s| tgt.parse(s).unwrap()).collect();
    RingMap::new(src.clone(), tgt.clone(), imgs).unwrap()
}

#[test]
fn composite_is_verified_and_rejected_by_descent() {
    let cfg = GroebnerConfig::default();
    let x = builtin("danielewski-x").unwrap();
    let y = builtin("danielewski-y").unwrap();
    let t = [Variable::plain("t")];
    let x1 = x.with_free_variables("danielewski_x_A1", &t).unwrap();
    let y1 = y.with_free_variables("danielewski_y_A1", &t).unwrap();
    let stable = verify_iso(
        map(&x1, &y1, &["x", "y + x*t", "x*z + 2*y*t + x*t^2", "1/2*y*z + 3/2*x*z*t + 3/2*y*t^2 + 1/2*x*t^3"]),
        map(
            &y1,
            &x1,
            &[
                "x",
                "y - 1/2*x*y*z + x^2*t",
                "-3/4*z^2 + 1/4*x*z^3 + 2*(y - 1/2*x*y*z)*t + x^2*t^2",
                "1/2*y*z - x*t",
            ],
        ),
        &cfg,
    )
    .unwrap();
    let fx = search_frame(&x, 2, 4, &cfg).unwrap();
    let fy = search_frame(&y, 2, 4, &cfg).unwrap();
    for m in 1..=2 {
        let tx = trivialize_jets(&x, &fx, m, DEFAULT_CORRECTION_BOUND, &cfg).unwrap();
        let ty = trivialize_jets(&y, &fy, m, DEFAULT_CORRECTION_BOUND, &cfg).unwrap();
        let c = jet_iso_from_stable(&stable, &tx, &ty, &cfg).unwrap();
        assert!(c.reverify(&cfg).is_ok());
        assert!(matches!(
            descend_equivariant_iso(&c, &x, &y, &cfg),
            Err(MorphismError::NotWeightPreserving { .. })
        ));
    }
}
