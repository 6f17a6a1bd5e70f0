use jetcert::format::{parse_certificate, parse_frame, write_certificate, write_frame, write_variety};
use jetcert::groebner::{is_smooth, GroebnerConfig};
use jetcert::jets::{fiber_over_zero_section, jet_equations, GradingViolation};
use jetcert::morphism::{
    check_truncation_compatibility, descend_equivariant_iso, induce_jet_certificate, jet_iso_from_stable,
    search_frame, trivialize_jets, verify_additive_action, verify_frame, verify_iso, weight_defect, ActionReport,
    CotangentFrame, IsoCertificate, MorphismError, RingMap, Trivialization,
};
use jetcert::{Presentation, Variable};

use crate::report::{Record, Report, Status};
use crate::{format_err, level, load_variety, read, write, CliError, Command};

/// Witnesses printed for a failing grading check.
const MAX_WITNESSES: usize = 5;

pub(crate) fn dispatch(cmd: &Command, echo: String, config: &GroebnerConfig) -> Result<Report, CliError> {
    let mut report = Report::new(echo);
    match cmd {
        Command::Compute { variety, order, out } => {
            let v = load_variety(&variety.variety)?;
            let m = level(&order.order)?;
            compute(&mut report, &v, m, out.as_deref())?;
        }
        Command::Grading { variety, order } => {
            let v = load_variety(&variety.variety)?;
            grading(&mut report, &v, level(&order.order)?)?;
        }
        Command::Fiber { variety, order } => {
            let v = load_variety(&variety.variety)?;
            fiber(&mut report, &v, level(&order.order)?)?;
        }
        Command::Smooth { variety, codim } => {
            let v = load_variety(&variety.variety)?;
            smooth(&mut report, &v, *codim, config)?;
        }
        Command::FrameCheck { variety, frame, degree_bound, out } => {
            let v = load_variety(&variety.variety)?;
            if let Some(f) = obtain_frame(&mut report, &v, frame.as_deref(), *degree_bound, config)? {
                if let Some(path) = out {
                    write(path, &write_frame(&f))?;
                }
            }
        }
        Command::Trivialize { variety, order, frame, degree_bound, out } => {
            let v = load_variety(&variety.variety)?;
            let m = level(&order.order)?;
            if let Some(f) = obtain_frame(&mut report, &v, frame.as_deref(), *degree_bound, config)? {
                if let Some(t) = trivialize(&mut report, "trivialization", &v, &f, m, *degree_bound, config) {
                    if let Some(path) = out {
                        write(path, &write_certificate(t.certificate.forward(), t.certificate.backward()))?;
                    }
                }
            }
        }
        Command::IsoVerify { source, target, cert } => {
            let s = load_variety(source)?;
            let t = load_variety(target)?;
            let (f, b) = parse_certificate(&read(cert)?, &s, &t).map_err(format_err(cert))?;
            certificate(&mut report, "certificate", f, b, config);
        }
        Command::Descend { source, target, cert, order } => {
            let s = load_variety(source)?;
            let t = load_variety(target)?;
            let m = level(&order.order)?;
            let (js, jt) = (jet_equations(&s, m)?, jet_equations(&t, m)?);
            let (f, b) = parse_certificate(&read(cert)?, js.ring(), jt.ring()).map_err(format_err(cert))?;
            // a weight defect rejects the descent whether or not the maps
            // are inverse, and is far cheaper to find
            if weight_check(&mut report, &f, &b, config) {
                if let Some(c) = certificate(&mut report, "certificate", f, b, config) {
                    descend(&mut report, &c, &s, &t, config);
                }
            } else {
                report.push(Record::skip("certificate", "descent already rejected"));
                report.push(Record::fail("descent", "the certificate is not weight-preserving"));
            }
        }
        Command::Danielewski { order, cert, degree_bound, out } => {
            let m = level(&order.order)?;
            let text = cert.as_deref().map(read).transpose()?;
            let (r, composite) = run_danielewski(report, m, text.as_deref(), cert.as_deref(), *degree_bound, config)?;
            report = r;
            if let (Some(path), Some(c)) = (out, composite) {
                write(path, &write_certificate(c.forward(), c.backward()))?;
            }
        }
    }
    Ok(report)
}

fn compute(report: &mut Report, v: &Presentation, m: u32, out: Option<&str>) -> Result<(), CliError> {
    let j = jet_equations(v, m)?;
    let ring = j.ring();
    let (vars, gens) = (ring.num_vars(), ring.generators().len());
    let expected = (v.num_vars() * (m as usize + 1), v.generators().len() * (m as usize + 1));
    report.push(
        Record::check("jet-equations", (vars, gens) == expected, || {
            format!("expected {} variables and {} generators", expected.0, expected.1)
        })
        .fact("ring", ring.name())
        .fact("variables", vars)
        .fact("generators", gens),
    );
    if let Some(path) = out {
        write(path, &write_variety(ring))?;
    }
    Ok(())
}

fn describe(v: &GradingViolation) -> String {
    match v {
        GradingViolation::Weight { generator, level, term } => {
            format!("F_{},{}: term {term} has the wrong weight", generator + 1, level)
        }
        GradingViolation::Stratification { generator, level, variable } => {
            format!("F_{},{}: contains {variable}", generator + 1, level)
        }
        GradingViolation::Scaling { generator, level, remainder } => {
            format!("F_{},{}: F(s·γ) - s^{level} F(γ) = {remainder}", generator + 1, level)
        }
    }
}

fn grading(report: &mut Report, v: &Presentation, m: u32) -> Result<(), CliError> {
    let g = jet_equations(v, m)?.check_grading()?;
    let kinds: [(&str, fn(&GradingViolation) -> bool); 3] = [
        ("weight-homogeneous", |x| matches!(x, GradingViolation::Weight { .. })),
        ("stratified", |x| matches!(x, GradingViolation::Stratification { .. })),
        ("scaling", |x| matches!(x, GradingViolation::Scaling { .. })),
    ];
    for (name, pick) in kinds {
        let bad: Vec<String> = g.violations.iter().filter(|x| pick(x)).map(describe).collect();
        report.push(
            Record::check(name, bad.is_empty(), || {
                let mut w: Vec<String> = bad.iter().take(MAX_WITNESSES).cloned().collect();
                if bad.len() > MAX_WITNESSES {
                    w.push(format!("... {} more", bad.len() - MAX_WITNESSES));
                }
                w.join("\n")
            })
            .fact("strata", g.strata_checked),
        );
    }
    Ok(())
}

fn fiber(report: &mut Report, v: &Presentation, m: u32) -> Result<(), CliError> {
    let f = fiber_over_zero_section(v, m)?;
    report.push(
        Record::check("fiber-identity", f.identity_holds(), || {
            f.mismatches
                .iter()
                .map(|(a, k, r)| format!("F_{},{}: remainder {r}", a + 1, k))
                .collect::<Vec<_>>()
                .join("\n")
        })
        .fact("fiber-ring", f.presentation.context())
        .fact("generators", f.presentation.generators().len()),
    );
    Ok(())
}

fn smooth(report: &mut Report, v: &Presentation, codim: Option<usize>, config: &GroebnerConfig) -> Result<(), CliError> {
    if codim.is_none() && v.generators().len() > 1 {
        return Err(CliError::Usage(format!(
            "{} has {} generators; pass --codim",
            v.name(),
            v.generators().len()
        )));
    }
    let c = codim.unwrap_or(v.generators().len());
    let r = match is_smooth(v, Some(c), config) {
        Ok(true) => Record::pass("smooth"),
        Ok(false) => Record::fail("smooth", "generators and Jacobian minors do not generate the unit ideal"),
        Err(e) => Record::fail("smooth", e.to_string()),
    };
    report.push(r.fact("variety", v.name()).fact("codim", c));
    Ok(())
}

fn frame_rank(v: &Presentation) -> usize {
    v.num_vars().saturating_sub(v.generators().len())
}

/// Reads and verifies `--frame`, or searches for one. `None` after a
/// failing record.
fn obtain_frame(
    report: &mut Report,
    v: &Presentation,
    path: Option<&str>,
    bound: u32,
    config: &GroebnerConfig,
) -> Result<Option<CotangentFrame>, CliError> {
    match path {
        Some(p) => {
            let f = parse_frame(&read(p)?, v).map_err(format_err(p))?;
            Ok(check_frame(report, "frame", v, f, config))
        }
        None => Ok(find_frame(report, "frame", v, bound, config)),
    }
}

fn check_frame(
    report: &mut Report,
    name: &str,
    v: &Presentation,
    f: CotangentFrame,
    config: &GroebnerConfig,
) -> Option<CotangentFrame> {
    match verify_frame(v, &f, config) {
        Ok(t) => {
            report.push(Record::pass(name).fact("rank", f.n).fact("identities", t.len()).fact("transcript", t.hash()));
            Some(f)
        }
        Err(e) => {
            report.push(Record::fail(name, e.to_string()));
            None
        }
    }
}

fn find_frame(
    report: &mut Report,
    name: &str,
    v: &Presentation,
    bound: u32,
    config: &GroebnerConfig,
) -> Option<CotangentFrame> {
    match search_frame(v, frame_rank(v), bound, config) {
        Ok(f) => {
            let degree = f.b.iter().chain(&f.a).chain(&f.c).flatten().map(|e| e.degree()).max().unwrap_or(0);
            let r = check_frame(report, name, v, f, config)?;
            if let Some(rec) = report.records.last_mut() {
                rec.facts.insert(1, ("degree".into(), degree.to_string()));
            }
            Some(r)
        }
        Err(e) => {
            report.push(Record::fail(name, e.to_string()));
            None
        }
    }
}

fn trivialize(
    report: &mut Report,
    name: &str,
    v: &Presentation,
    f: &CotangentFrame,
    m: u32,
    bound: u32,
    config: &GroebnerConfig,
) -> Option<Trivialization> {
    match trivialize_jets(v, f, m, bound, config) {
        Ok(t) => {
            let degrees: Vec<String> = t.steps.iter().map(|s| s.degree.to_string()).collect();
            report.push(
                Record::pass(name)
                    .fact("isomorphism", format!("{} -> {}", t.certificate.source().name(), t.certificate.target().name()))
                    .fact("correction-degrees", if degrees.is_empty() { "-".into() } else { degrees.join(",") })
                    .fact("identities", t.certificate.transcript().len())
                    .fact("transcript", t.certificate.transcript().hash()),
            );
            Some(t)
        }
        Err(e) => {
            report.push(Record::fail(name, e.to_string()));
            None
        }
    }
}

fn certificate(report: &mut Report, name: &str, f: RingMap, b: RingMap, config: &GroebnerConfig) -> Option<IsoCertificate> {
    match verify_iso(f, b, config) {
        Ok(c) => {
            report.push(cert_record(name, &c));
            Some(c)
        }
        Err(e) => {
            report.push(Record::fail(name, e.to_string()));
            None
        }
    }
}

fn cert_record(name: &str, c: &IsoCertificate) -> Record {
    let mut r = Record::pass(name).fact("isomorphism", format!("{} -> {}", c.source().name(), c.target().name()));
    if !c.links().is_empty() {
        r = r.fact("links", c.links().len());
    }
    r.fact("identities", c.transcript().len()).fact("transcript", c.transcript().hash())
}

fn weight_check(report: &mut Report, f: &RingMap, b: &RingMap, config: &GroebnerConfig) -> bool {
    for (dir, map) in [("forward", f), ("backward", b)] {
        match weight_defect(map, config) {
            Ok(None) => {}
            Ok(Some((var, w))) => {
                report.push(Record::fail(
                    "weight-preserving",
                    format!("{dir} image of {var} is not homogeneous of weight {w}"),
                ));
                return false;
            }
            Err(e) => {
                report.push(Record::fail("weight-preserving", e.to_string()));
                return false;
            }
        }
    }
    report.push(Record::pass("weight-preserving"));
    true
}

fn descend(report: &mut Report, c: &IsoCertificate, s: &Presentation, t: &Presentation, config: &GroebnerConfig) {
    let r = match descend_equivariant_iso(c, s, t, config) {
        Ok(base) => {
            let images: Vec<String> = s
                .context()
                .vars()
                .iter()
                .zip(base.forward().images())
                .map(|(v, p)| format!("{v} -> {p}"))
                .collect();
            Record::pass("descent").fact("base-map", images.join(", "))
        }
        Err(e) => Record::fail("descent", e.to_string()),
    };
    report.push(r);
}

fn action_records(report: &mut Report, side: &str, a: &ActionReport) {
    for (law, res) in [
        ("identity", &a.identity),
        ("composition", &a.composition),
        ("ideal-preservation", &a.ideal_preservation),
    ] {
        let name = format!("action-{side}-{law}");
        report.push(match res {
            Ok(t) => Record::pass(name).fact("transcript", t.hash()),
            Err((identity, rem)) => Record::fail(name, format!("{identity} ≡ {rem}")),
        });
    }
}

struct Side {
    tag: &'static str,
    v: Presentation,
    /// Images of x, y, z under the action, in V[t].
    action: [&'static str; 3],
    /// A base automorphism (the action at t = 1) and its inverse.
    automorphism: [[&'static str; 3]; 2],
}

fn sides() -> [Side; 2] {
    let x = jetcert::corpus::builtin("danielewski-x").expect("built-in");
    let y = jetcert::corpus::builtin("danielewski-y").expect("built-in");
    [
        Side {
            tag: "x",
            v: x,
            action: ["x", "y + x*t", "z + 2*y*t + x*t^2"],
            automorphism: [["x", "y + x", "z + 2*y + x"], ["x", "y - x", "z - 2*y + x"]],
        },
        Side {
            tag: "y",
            v: y,
            action: ["x", "y + x^2*t", "z + 2*y*t + x^2*t^2"],
            automorphism: [["x", "y + x^2", "z + 2*y + x^2"], ["x", "y - x^2", "z - 2*y + x^2"]],
        },
    ]
}

fn parse_map(src: &Presentation, tgt: &Presentation, images: &[&str]) -> RingMap {
    let imgs = images.iter().map(|s| tgt.parse(s).expect("built-in map parses")).collect();
    RingMap::new(src.clone(), tgt.clone(), imgs).expect("built-in map has the right shape")
}

fn halted(report: &Report) -> bool {
    report.records.iter().any(|r| r.status == Status::Fail)
}

/// Runs the Danielewski suite at level `m`. `cancellation` is the text of
/// a certificate for `X × A^1 ≅ Y × A^1`. Returns the report and, when one
/// was built, the verified `X_m ≅ Y_m` certificate.
pub fn danielewski(
    m: u32,
    cancellation: Option<&str>,
    bound: u32,
    config: &GroebnerConfig,
) -> Result<(Report, Option<IsoCertificate>), CliError> {
    let mut echo = format!("danielewski --order {m}");
    if cancellation.is_some() {
        echo.push_str(" --cert <given>");
    }
    run_danielewski(Report::new(echo), m, cancellation, Some("<given>"), bound, config)
}

fn run_danielewski(
    mut report: Report,
    m: u32,
    cancellation: Option<&str>,
    cert_path: Option<&str>,
    bound: u32,
    config: &GroebnerConfig,
) -> Result<(Report, Option<IsoCertificate>), CliError> {
    if m == 0 {
        return Err(CliError::Usage("danielewski needs --order at least 1".into()));
    }
    let sides = sides();
    let t = Variable::plain("t");

    for s in &sides {
        let r = match is_smooth(&s.v, None, config) {
            Ok(true) => Record::pass(format!("smooth-{}", s.tag)),
            Ok(false) => Record::fail(format!("smooth-{}", s.tag), "singular"),
            Err(e) => Record::fail(format!("smooth-{}", s.tag), e.to_string()),
        };
        report.push(r);
    }
    for s in &sides {
        let vt = s.v.with_free_variables(format!("{}_A1", s.v.name()), std::slice::from_ref(&t))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let act = parse_map(&s.v, &vt, &s.action);
        match verify_additive_action(&s.v, &act, config) {
            Ok(a) => action_records(&mut report, s.tag, &a),
            Err(e) => {
                report.push(Record::fail(format!("action-{}", s.tag), e.to_string()));
            }
        }
    }
    if halted(&report) {
        return Ok((report, None));
    }

    let mut frames = Vec::new();
    for s in &sides {
        match find_frame(&mut report, &format!("frame-{}", s.tag), &s.v, bound, config) {
            Some(f) => frames.push(f),
            None => return Ok((report, None)),
        }
    }

    let mut trivs = Vec::new();
    for (s, f) in sides.iter().zip(&frames) {
        match trivialize(&mut report, &format!("trivialize-{}", s.tag), &s.v, f, m, bound, config) {
            Some(tr) => trivs.push(tr),
            None => return Ok((report, None)),
        }
    }

    let mut composite = None;
    match cancellation {
        None => {
            report.push(Record::skip("cancellation", "no cancellation certificate"));
            report.push(Record::skip("composite", "no cancellation certificate"));
            report.push(Record::skip("descent-rejects-composite", "no cancellation certificate"));
        }
        Some(text) => {
            let x1 = sides[0].v.with_free_variables("danielewski_x_A1", std::slice::from_ref(&t))
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let y1 = sides[1].v.with_free_variables("danielewski_y_A1", std::slice::from_ref(&t))
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let path = cert_path.unwrap_or("<cancellation>");
            let (f, b) = parse_certificate(text, &x1, &y1).map_err(format_err(path))?;
            let Some(stable) = certificate(&mut report, "cancellation", f, b, config) else {
                return Ok((report, None));
            };
            match jet_iso_from_stable(&stable, &trivs[0], &trivs[1], config) {
                Ok(c) => {
                    report.push(cert_record("composite", &c));
                    let r = match descend_equivariant_iso(&c, &sides[0].v, &sides[1].v, config) {
                        Err(MorphismError::NotWeightPreserving { map, variable, weight }) => {
                            Record::pass("descent-rejects-composite").fact(
                                "reason",
                                format!("{map} image of {variable} is not homogeneous of weight {weight}"),
                            )
                        }
                        Ok(_) => Record::fail("descent-rejects-composite", "the composite descended to X ≅ Y"),
                        Err(e) => Record::fail("descent-rejects-composite", e.to_string()),
                    };
                    report.push(r);
                    composite = Some(c);
                }
                Err(e) => {
                    report.push(Record::fail("composite", e.to_string()));
                    return Ok((report, None));
                }
            }
        }
    }

    for s in &sides {
        let name = format!("descent-accepts-induced-{}", s.tag);
        let fwd = parse_map(&s.v, &s.v, &s.automorphism[0]);
        let bwd = parse_map(&s.v, &s.v, &s.automorphism[1]);
        let r = verify_iso(fwd, bwd, config)
            .and_then(|base| {
                let lifted = induce_jet_certificate(&base, m, config)?;
                let down = descend_equivariant_iso(&lifted, &s.v, &s.v, config)?;
                Ok((base, down))
            })
            .map(|(base, down)| {
                Record::check(&name, down.forward().images() == base.forward().images(), || {
                    "descended map differs from the base automorphism".into()
                })
            })
            .unwrap_or_else(|e| Record::fail(&name, e.to_string()));
        report.push(r);
    }

    for (s, f) in sides.iter().zip(&frames) {
        let name = format!("truncation-{}", s.tag);
        let r = trivialize_jets(&s.v, f, m - 1, bound, config)
            .and_then(|lower| {
                let psi = jet_equations(&s.v, m)?.truncation_map(m - 1)?;
                let upper = &trivs[if s.tag == "x" { 0 } else { 1 }];
                check_truncation_compatibility(&upper.certificate, &lower.certificate, &psi, config)
            })
            .map(|t| Record::pass(&name).fact("levels", format!("{m},{}", m - 1)).fact("transcript", t.hash()))
            .unwrap_or_else(|e| Record::fail(&name, e.to_string()));
        report.push(r);
    }
    Ok((report, composite))
}
