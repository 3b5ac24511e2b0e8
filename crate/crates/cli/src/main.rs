//! Batch command line for exact divisor theory on abstract tropical curves.
//!
//! Every subcommand reads JSON files, runs one library operation, and writes
//! a canonical JSON envelope `{"payload": .., "status": "ok"}` to standard
//! output (or `--out`), plus a one-line summary to standard error. Failures
//! produce `{"status": "error", "code": .., "message": ..}` with the code
//! repeated as the exit status: 2 usage, 3 unreadable or malformed files,
//! 4 domain errors, 70 violated internal invariants.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Map, Value};

use tropsym_core::curve::same_curve;
use tropsym_core::io;
use tropsym_core::rat::{fmt_rat, rat, rat_int, Rat};
use tropsym_core::refine::minimal_model;
use tropsym_core::{
    act_on_divisor, check_real_1cocycle, coboundary_1d, coboundary_1f, coboundary_2f,
    coboundary_2r, div_1cocycle_witness, enumerate_aut, fixtures, h90_witness, is_class_invariant,
    is_coboundary_1d, is_coboundary_1f, is_coboundary_2f, is_coboundary_2r, is_equivalent,
    mq_2cocycle_witness, pl_equal, pullback, random_divisor, random_function, random_orbit_sum,
    random_point, real_2cocycle_witness, solve_principal, symmetrize_degree0, symmetrize_divisor,
    AutGroup, Automorphism, Cocycle1D, Cocycle1F, Cocycle2F, Cocycle2R, CocycleVerdict, Curve,
    Divisor, Error, PlFunction, Point, PrincipalityResult,
};

#[derive(Parser)]
#[command(
    name = "tropsym",
    version,
    about = "Exact divisor theory and finite symmetries on abstract tropical curves"
)]
struct Cli {
    /// Write the JSON result to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Force the slope mode of loaded function files (Z: integer slopes,
    /// Q: rational slopes).
    #[arg(long, global = true, value_parser = ["Z", "Q"])]
    mode: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a curve file and echo its canonical form.
    Validate { curve: PathBuf },
    /// Suppress 2-valent vertices and print the minimal model.
    MinimalModel { curve: PathBuf },
    /// Enumerate the automorphism group of a curve.
    Aut { curve: PathBuf },
    /// Validate a group file: closure, identity, duplicates, Cayley table.
    GroupCheck { curve: PathBuf, group: PathBuf },
    /// Order of a function at a point (point given as inline JSON).
    Ord {
        curve: PathBuf,
        function: PathBuf,
        point: String,
    },
    /// Principal divisor of a function.
    Div { curve: PathBuf, function: PathBuf },
    /// Value of a function at a point (point given as inline JSON).
    Eval {
        curve: PathBuf,
        function: PathBuf,
        point: String,
    },
    /// Find f with div f = D, or the fractional-slope certificate.
    SolvePrincipal { curve: PathBuf, divisor: PathBuf },
    /// Decide linear equivalence of two divisors.
    Equiv {
        curve: PathBuf,
        a: PathBuf,
        b: PathBuf,
    },
    /// Check the cocycle law for constant values (the answer is zero or a
    /// reasoned violation).
    CocycleCheck { curve: PathBuf, cocycle: PathBuf },
    /// Split a function 1-cocycle by the negated tropical average.
    H90 { curve: PathBuf, cocycle: PathBuf },
    /// Split a constant 2-cocycle by averaging.
    H2rWitness { curve: PathBuf, cocycle: PathBuf },
    /// Split a divisor 1-cocycle by orbit transport.
    DivCocycleWitness { curve: PathBuf, cocycle: PathBuf },
    /// Split a rational-slope function 2-cocycle by averaging.
    Mq2Witness { curve: PathBuf, cocycle: PathBuf },
    /// Witness that a divisor class is fixed by every group element.
    InvariantWitness {
        curve: PathBuf,
        group: PathBuf,
        divisor: PathBuf,
    },
    /// Replace a divisor by the invariant representative of its class.
    Symmetrize {
        curve: PathBuf,
        group: PathBuf,
        divisor: PathBuf,
        /// Insist on degree zero.
        #[arg(long)]
        degree0: bool,
    },
    /// Run the randomized self-checks; seed from --seed or TROPSYM_SEED.
    Selftest {
        #[arg(long)]
        seed: Option<u64>,
    },
}

struct Failure {
    code: u8,
    message: String,
    certificate: Option<Value>,
}

fn classify(e: &Error) -> u8 {
    match e {
        // malformed input files
        Error::DuplicateId(_)
        | Error::UnknownVertex(_)
        | Error::UnknownEdge(_)
        | Error::EmptyCurve
        | Error::Disconnected
        | Error::BadLength(_)
        | Error::BadMultiplicity(_)
        | Error::FiniteLeaf(_)
        | Error::InfiniteInnerEdge(_)
        | Error::DoubleInfiniteEdge(_)
        | Error::BadVertexKind(_)
        | Error::MultiplicityMismatchAt2Valent(_)
        | Error::BadCircleMultiplicity
        | Error::BadPoint(_)
        | Error::BadRational(_)
        | Error::BadInput(_) => 3,
        // violated library invariants
        Error::Internal(_) => 70,
        // honest domain failures
        Error::BaseMismatch
        | Error::EvalAtInfinitePoint(_)
        | Error::NonIntegerSlope(_)
        | Error::NonIntegerOrder { .. }
        | Error::InfiniteAutGroup(_)
        | Error::NotAutomorphism(_)
        | Error::NotClosed(_)
        | Error::MissingIdentity
        | Error::DuplicateElement(_, _)
        | Error::InfiniteOrderComposition
        | Error::DegreeNonzero(_)
        | Error::NotPrincipal { .. }
        | Error::NotInvariantDivisor(_)
        | Error::NotACocycle(_)
        | Error::WellDefinednessViolation(_)
        | Error::NotInvariantClass { .. } => 4,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let certificate = match &e {
            Error::NotPrincipal { edge, slope } => {
                Some(json!({"edge": edge, "slope": slope}))
            }
            Error::NotInvariantClass {
                element,
                edge,
                slope,
            } => Some(json!({"edge": edge, "element": element, "slope": slope})),
            _ => None,
        };
        Failure {
            code: classify(&e),
            message: e.to_string(),
            certificate,
        }
    }
}

fn file_failure(path: &Path, what: &str) -> Failure {
    Failure {
        code: 3,
        message: format!("{what}: {}", path.display()),
        certificate: None,
    }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| file_failure(path, &format!("cannot read file ({e})")))?;
    serde_json::from_str(&text)
        .map_err(|e| file_failure(path, &format!("not valid JSON ({e})")))
}

fn load_curve(path: &Path) -> Result<Arc<Curve>, Failure> {
    Ok(io::curve_from_json(&read_json(path)?)?)
}

fn load_function(
    curve: &Arc<Curve>,
    path: &Path,
    mode: &Option<String>,
) -> Result<PlFunction, Failure> {
    let mut v = read_json(path)?;
    if let (Some(m), Some(obj)) = (mode, v.as_object_mut()) {
        obj.insert("mode".into(), Value::String(m.clone()));
    }
    let f = io::function_from_json(&v)?;
    if !same_curve(f.curve(), curve) {
        return Err(Error::BaseMismatch.into());
    }
    Ok(f)
}

fn load_divisor(curve: &Arc<Curve>, path: &Path) -> Result<Divisor, Failure> {
    Ok(io::divisor_from_json(curve, &read_json(path)?)?)
}

fn load_group(curve: &Arc<Curve>, path: &Path) -> Result<AutGroup, Failure> {
    Ok(io::group_from_json(curve, &read_json(path)?)?)
}

fn parse_point(curve: &Arc<Curve>, s: &str) -> Result<Point, Failure> {
    let v: Value = serde_json::from_str(s).map_err(|e| Failure {
        code: 3,
        message: format!("point argument is not valid JSON ({e})"),
        certificate: None,
    })?;
    let p = io::point_from_json(&v)?;
    Ok(curve.canonical_point(&p)?)
}

fn indexed<'a, I: IntoIterator<Item = &'a Value>>(values: I) -> Value {
    let mut m = Map::new();
    for (i, v) in values.into_iter().enumerate() {
        m.insert(i.to_string(), v.clone());
    }
    Value::Object(m)
}

fn run(cli: &Cli) -> Result<(Value, String), Failure> {
    match &cli.command {
        Command::Validate { curve } => {
            let c = load_curve(curve)?;
            let summary = format!(
                "valid curve: {} vertices, {} edges",
                c.vertices().len(),
                c.edges().len()
            );
            Ok((json!({"curve": io::curve_to_json(&c)}), summary))
        }
        Command::MinimalModel { curve } => {
            let c = load_curve(curve)?;
            let mm = minimal_model(&c)?;
            let min = mm.minimal();
            let summary = format!(
                "minimal model: {} vertices, {} edges",
                min.vertices().len(),
                min.edges().len()
            );
            Ok((json!({"curve": io::curve_to_json(min)}), summary))
        }
        Command::Aut { curve } => {
            let c = load_curve(curve)?;
            let group = enumerate_aut(&c)?;
            let summary = format!("automorphism group of order {}", group.order());
            Ok((
                json!({"order": group.order(), "elements": io::group_to_json(&group)}),
                summary,
            ))
        }
        Command::GroupCheck { curve, group } => {
            let c = load_curve(curve)?;
            let g = load_group(&c, group)?;
            let n = g.order();
            let table: Vec<Vec<usize>> = (0..n)
                .map(|i| (0..n).map(|j| g.mul(i, j)).collect())
                .collect();
            let inverses: Vec<usize> = (0..n).map(|i| g.inv(i)).collect();
            let summary = format!("group of order {n} is valid");
            Ok((
                json!({
                    "order": n,
                    "elements": io::group_to_json(&g),
                    "table": table,
                    "inverses": inverses,
                }),
                summary,
            ))
        }
        Command::Ord {
            curve,
            function,
            point,
        } => {
            let c = load_curve(curve)?;
            let f = load_function(&c, function, &cli.mode)?;
            let p = parse_point(&c, point)?;
            let ord = f.ord_at(&p)?;
            let summary = format!("ord = {}", fmt_rat(&ord));
            Ok((json!({"ord": io::number_to_json(&ord)}), summary))
        }
        Command::Div { curve, function } => {
            let c = load_curve(curve)?;
            let f = load_function(&c, function, &cli.mode)?;
            let d = f.div()?;
            let summary = format!(
                "principal divisor with {} support points",
                d.support().count()
            );
            Ok((io::divisor_to_json(&d), summary))
        }
        Command::Eval {
            curve,
            function,
            point,
        } => {
            let c = load_curve(curve)?;
            let f = load_function(&c, function, &cli.mode)?;
            let p = parse_point(&c, point)?;
            let value = f.eval(&p)?;
            let summary = format!("value = {}", fmt_rat(&value));
            Ok((json!({"value": fmt_rat(&value)}), summary))
        }
        Command::SolvePrincipal { curve, divisor } => {
            let c = load_curve(curve)?;
            let d = load_divisor(&c, divisor)?;
            match solve_principal(&d)? {
                PrincipalityResult::Witness(f) => Ok((
                    json!({"principal": true, "witness": io::function_to_json(&f)?}),
                    "principal: witness found".into(),
                )),
                PrincipalityResult::NotPrincipal { edge, slope } => {
                    let summary =
                        format!("not principal: slope {} forced on `{edge}`", fmt_rat(&slope));
                    Ok((
                        json!({
                            "principal": false,
                            "certificate": {"edge": edge, "slope": fmt_rat(&slope)},
                        }),
                        summary,
                    ))
                }
            }
        }
        Command::Equiv { curve, a, b } => {
            let c = load_curve(curve)?;
            let da = load_divisor(&c, a)?;
            let db = load_divisor(&c, b)?;
            if da.degree() != db.degree() {
                return Ok((
                    json!({"equivalent": false, "reason": "the degrees differ"}),
                    "not equivalent: the degrees differ".into(),
                ));
            }
            match solve_principal(&da.minus(&db)?)? {
                PrincipalityResult::Witness(f) => Ok((
                    json!({"equivalent": true, "witness": io::function_to_json(&f)?}),
                    "equivalent: witness found".into(),
                )),
                PrincipalityResult::NotPrincipal { edge, slope } => {
                    let summary =
                        format!("not equivalent: slope {} forced on `{edge}`", fmt_rat(&slope));
                    Ok((
                        json!({
                            "equivalent": false,
                            "certificate": {"edge": edge, "slope": fmt_rat(&slope)},
                        }),
                        summary,
                    ))
                }
            }
        }
        Command::CocycleCheck { curve, cocycle } => {
            let c = load_curve(curve)?;
            let (group, raw) = io::cocycle1_from_json(&c, &read_json(cocycle)?)?;
            let values = raw
                .iter()
                .map(|v| io::rat_from_json(v, "cocycle value"))
                .collect::<Result<Vec<Rat>, Error>>()?;
            match check_real_1cocycle(&group, &values)? {
                CocycleVerdict::IsCocycle => {
                    Ok((json!({"is_cocycle": true}), "cocycle law holds".into()))
                }
                CocycleVerdict::Violation(why) => Ok((
                    json!({"is_cocycle": false, "violation": why}),
                    "cocycle law fails".into(),
                )),
            }
        }
        Command::H90 { curve, cocycle } => {
            let c = load_curve(curve)?;
            let (group, raw) = io::cocycle1_from_json(&c, &read_json(cocycle)?)?;
            let values = raw
                .iter()
                .map(io::function_from_json)
                .collect::<Result<Vec<_>, Error>>()?;
            for f in &values {
                if !same_curve(f.curve(), &c) {
                    return Err(Error::BaseMismatch.into());
                }
            }
            let phi = Cocycle1F::new(group, values)?;
            let f = h90_witness(&phi)?;
            Ok((
                json!({"witness": io::function_to_json(&f)?}),
                "splitting witness found".into(),
            ))
        }
        Command::H2rWitness { curve, cocycle } => {
            let c = load_curve(curve)?;
            let (group, raw) = io::cocycle2_from_json(&c, &read_json(cocycle)?)?;
            let values = raw
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| io::rat_from_json(v, "cocycle value"))
                        .collect::<Result<Vec<_>, Error>>()
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let phi = Cocycle2R::new(group, values)?;
            let psi = real_2cocycle_witness(&phi)?;
            let out: Vec<Value> = psi.iter().map(io::rat_to_json).collect();
            Ok((
                json!({"psi": indexed(&out)}),
                "splitting cochain found".into(),
            ))
        }
        Command::DivCocycleWitness { curve, cocycle } => {
            let c = load_curve(curve)?;
            let (group, raw) = io::cocycle1_from_json(&c, &read_json(cocycle)?)?;
            let values = raw
                .iter()
                .map(|v| io::divisor_from_json(&c, v))
                .collect::<Result<Vec<_>, Error>>()?;
            let phi = Cocycle1D::new(group, values)?;
            let e = div_1cocycle_witness(&phi)?;
            Ok((
                json!({"witness": io::divisor_to_json(&e)}),
                "splitting divisor found".into(),
            ))
        }
        Command::Mq2Witness { curve, cocycle } => {
            let c = load_curve(curve)?;
            let (group, raw) = io::cocycle2_from_json(&c, &read_json(cocycle)?)?;
            let values = raw
                .iter()
                .map(|row| {
                    row.iter()
                        .map(io::function_from_json)
                        .collect::<Result<Vec<_>, Error>>()
                })
                .collect::<Result<Vec<_>, Error>>()?;
            for row in &values {
                for f in row {
                    if !same_curve(f.curve(), &c) {
                        return Err(Error::BaseMismatch.into());
                    }
                }
            }
            let phi = Cocycle2F::new(group, values)?;
            let psi = mq_2cocycle_witness(&phi)?;
            let out = psi
                .iter()
                .map(io::function_to_json)
                .collect::<Result<Vec<_>, Error>>()?;
            Ok((
                json!({"psi": indexed(&out)}),
                "splitting cochain found".into(),
            ))
        }
        Command::InvariantWitness {
            curve,
            group,
            divisor,
        } => {
            let c = load_curve(curve)?;
            let g = load_group(&c, group)?;
            let d = load_divisor(&c, divisor)?;
            for i in 0..g.order() {
                let delta = act_on_divisor(g.element(i), &d)?.minus(&d)?;
                if let PrincipalityResult::NotPrincipal { edge, slope } = solve_principal(&delta)?
                {
                    let summary = format!("class moves under element {i}");
                    return Ok((
                        json!({
                            "invariant": false,
                            "element": i,
                            "certificate": {"edge": edge, "slope": fmt_rat(&slope)},
                        }),
                        summary,
                    ));
                }
            }
            let witnesses = is_class_invariant(&g, &d)?
                .ok_or_else(|| Error::Internal("per-element witnesses vanished".into()))?;
            let out = witnesses
                .iter()
                .map(io::function_to_json)
                .collect::<Result<Vec<_>, Error>>()?;
            Ok((
                json!({"invariant": true, "witnesses": indexed(&out)}),
                "class is invariant".into(),
            ))
        }
        Command::Symmetrize {
            curve,
            group,
            divisor,
            degree0,
        } => {
            let c = load_curve(curve)?;
            let g = load_group(&c, group)?;
            let d = load_divisor(&c, divisor)?;
            let report = if *degree0 {
                symmetrize_degree0(&g, &d)?
            } else {
                symmetrize_divisor(&g, &d)?
            };
            let witnesses = report
                .witnesses
                .iter()
                .map(io::function_to_json)
                .collect::<Result<Vec<_>, Error>>()?;
            let adjusted = report
                .adjusted
                .iter()
                .map(io::function_to_json)
                .collect::<Result<Vec<_>, Error>>()?;
            let mut constants = Map::new();
            for (i, row) in report.constants.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    constants.insert(format!("{i},{j}"), io::rat_to_json(v));
                }
            }
            let psi: Vec<Value> = report.psi.iter().map(io::rat_to_json).collect();
            let payload = json!({
                "input": io::divisor_to_json(&report.input),
                "witnesses": indexed(&witnesses),
                "constants": constants,
                "psi": indexed(&psi),
                "adjusted": indexed(&adjusted),
                "average": io::function_to_json(&report.average)?,
                "invariant_divisor": io::divisor_to_json(&report.output)["terms"].clone(),
                "checks": {
                    "witness_defects_constant": true,
                    "cocycle_law": true,
                    "output_invariant": true,
                    "output_equivalent": true,
                },
            });
            let summary = format!(
                "invariant representative with {} support points",
                report.output.support().count()
            );
            Ok((payload, summary))
        }
        Command::Selftest { seed } => {
            let seed = match seed {
                Some(s) => *s,
                None => match std::env::var("TROPSYM_SEED") {
                    Err(_) => 0,
                    Ok(s) => s.parse().map_err(|_| Failure {
                        code: 2,
                        message: "TROPSYM_SEED must be an unsigned integer".into(),
                        certificate: None,
                    })?,
                },
            };
            let checks = selftest(seed)?;
            let n = checks.len();
            Ok((
                json!({"seed": seed, "checks": checks}),
                format!("selftest: {n} checks passed (seed {seed})"),
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// Self-checks
// ---------------------------------------------------------------------------

fn internal(msg: String) -> Error {
    Error::Internal(msg)
}

fn leaf_swap(curve: &Arc<Curve>, a: &str, b: &str, ea: &str, eb: &str) -> Result<AutGroup, Error> {
    let (a, b, ea, eb) = (a.to_string(), b.to_string(), ea.to_string(), eb.to_string());
    let c2 = curve.clone();
    let swap = Automorphism::from_action(curve, move |p| {
        Ok(match c2.canonical_point(p)? {
            Point::Vertex(v) => Point::Vertex(if v.0 == a {
                b.clone().into()
            } else if v.0 == b {
                a.clone().into()
            } else {
                v
            }),
            Point::Edge { edge, offset } => Point::Edge {
                edge: if edge.0 == ea {
                    eb.clone().into()
                } else if edge.0 == eb {
                    ea.clone().into()
                } else {
                    edge
                },
                offset,
            },
        })
    })?;
    tropsym_core::validate_group(curve, &[Automorphism::identity(curve), swap])
}

fn selftest(seed: u64) -> Result<Vec<Value>, Error> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut checks: Vec<Value> = Vec::new();
    let mut record = |name: &str, cases: usize| {
        checks.push(json!({"name": name, "cases": cases, "ok": true}));
    };

    // symmetric groups on stars; infinite groups rejected
    let star3 = fixtures::star(3);
    let s3 = enumerate_aut(&star3)?;
    if s3.order() != 6 || enumerate_aut(&fixtures::star(4))?.order() != 24 {
        return Err(internal("star leaf permutations missed".into()));
    }
    for c in [
        fixtures::circle(rat_int(1), rat_int(2)),
        fixtures::segment(),
    ] {
        match enumerate_aut(&c) {
            Err(Error::InfiniteAutGroup(_)) => {}
            other => {
                return Err(internal(format!(
                    "expected an infinite symmetry report, got {other:?}"
                )))
            }
        }
    }
    record("automorphism-enumeration", 4);

    // the star's class group is the degree map
    let origin = Point::vertex("O");
    for _ in 0..8 {
        let deg = rng.gen_range(-5..=5i64);
        let d = random_divisor(&star3, &mut rng, deg)?;
        let target = Divisor::single(&star3, origin.clone(), rat_int(deg))?;
        let f = is_equivalent(&d, &target)?
            .ok_or_else(|| internal("divisor not equivalent to its degree at O".into()))?;
        if f.div()? != d.minus(&target)? {
            return Err(internal("equivalence witness has the wrong divisor".into()));
        }
    }
    record("star-class-group", 8);

    // principal divisors have degree zero
    let all = [
        fixtures::star(3),
        fixtures::segment(),
        fixtures::circle(rat_int(1), rat_int(2)),
        fixtures::theta112(),
    ];
    for c in &all {
        for _ in 0..5 {
            if random_function(c, &mut rng)?.div()?.degree() != rat_int(0) {
                return Err(internal("a principal divisor has nonzero degree".into()));
            }
        }
    }
    record("degree-conservation", 20);

    // distinct points on circles are never equivalent
    let mut circle_cases = 0;
    for _ in 0..5 {
        let a = rat(rng.gen_range(1..=6), rng.gen_range(1..=3));
        let b = rat(rng.gen_range(1..=6), rng.gen_range(1..=3));
        let c = fixtures::circle(a, b);
        for _ in 0..3 {
            let p = c.canonical_point(&random_point(&c, &mut rng))?;
            let q = c.canonical_point(&random_point(&c, &mut rng))?;
            if p == q {
                continue;
            }
            let d = Divisor::new(&c, vec![(p, rat_int(1)), (q, rat_int(-1))])?;
            if !matches!(
                solve_principal(&d)?,
                PrincipalityResult::NotPrincipal { .. }
            ) {
                return Err(internal("two circle points came out equivalent".into()));
            }
            circle_cases += 1;
        }
    }
    record("circle-certificates", circle_cases);

    // splitting function 1-cocycles
    let seg = fixtures::segment();
    let z2_seg = leaf_swap(&seg, "I1", "I2", "e1", "e2")?;
    let theta = fixtures::theta112();
    let z2_theta = leaf_swap(&theta, "", "", "e1", "e2")?;
    let groups: Vec<(&Arc<Curve>, &AutGroup)> =
        vec![(&star3, &s3), (&seg, &z2_seg), (&theta, &z2_theta)];
    for (c, g) in &groups {
        for _ in 0..3 {
            let f = random_function(c, &mut rng)?;
            let phi = coboundary_1f(g, &f)?;
            let w = h90_witness(&phi)?;
            if !is_coboundary_1f(&phi, &w)? {
                return Err(internal("tropical averaging failed to split".into()));
            }
        }
    }
    record("hilbert-90", 9);

    // splitting constant 2-cocycles, recovering normalized seeds
    for _ in 0..4 {
        let seed2 = vec![rat_int(0), rat(rng.gen_range(-6..=6), rng.gen_range(1..=3))];
        let phi = coboundary_2r(&z2_seg, &seed2)?;
        if real_2cocycle_witness(&phi)? != seed2 {
            return Err(internal("averaging failed to recover the seed".into()));
        }
        let seed6: Vec<Rat> = (0..6)
            .map(|_| rat(rng.gen_range(-6..=6), rng.gen_range(1..=3)))
            .collect();
        let phi = coboundary_2r(&s3, &seed6)?;
        if !is_coboundary_2r(&phi, &real_2cocycle_witness(&phi)?)? {
            return Err(internal("averaging failed to split".into()));
        }
    }
    record("constant-2-cocycles", 8);

    // splitting divisor 1-cocycles
    for _ in 0..4 {
        let deg = rng.gen_range(-3..=3);
        let e0 = random_divisor(&star3, &mut rng, deg)?;
        let phi = coboundary_1d(&s3, &e0)?;
        let e = div_1cocycle_witness(&phi)?;
        if !is_coboundary_1d(&phi, &e)? {
            return Err(internal("orbit transport failed to split".into()));
        }
    }
    record("divisor-cocycles", 4);

    // splitting rational-slope 2-cocycles
    for _ in 0..3 {
        let half = random_function(&seg, &mut rng)?
            .into_rational_mode()
            .trop_scale(&rat(1, 2))?;
        let phi = coboundary_2f(&z2_seg, &[PlFunction::zero(&seg), half])?;
        if !is_coboundary_2f(&phi, &mq_2cocycle_witness(&phi)?)? {
            return Err(internal("rational averaging failed to split".into()));
        }
    }
    record("rational-2-cocycles", 3);

    // the symmetrization pipeline
    let p = Divisor::single(&star3, Point::on_edge("e1", rat_int(1)), rat_int(1))?;
    let report = symmetrize_divisor(&s3, &p)?;
    if report.output != Divisor::single(&star3, origin.clone(), rat_int(1))? {
        return Err(internal("leaf point did not symmetrize to the center".into()));
    }
    for _ in 0..3 {
        let base = random_orbit_sum(&s3, &mut rng)?;
        let f = random_function(&star3, &mut rng)?;
        let d = base.plus(&f.div()?)?;
        let rep = symmetrize_divisor(&s3, &d)?;
        for i in 0..s3.order() {
            if act_on_divisor(s3.element(i), &rep.output)? != rep.output {
                return Err(internal("symmetrized divisor moves".into()));
            }
        }
        if is_equivalent(&d, &rep.output)?.is_none() {
            return Err(internal("symmetrized divisor left the class".into()));
        }
    }
    record("symmetrization", 4);

    // pullback is a left action matching the pushforward on divisors
    for _ in 0..2 {
        let f = random_function(&star3, &mut rng)?;
        for i in 0..s3.order() {
            for j in 0..s3.order() {
                let lhs = pullback(s3.element(s3.mul(i, j)), &f)?;
                let rhs = pullback(s3.element(i), &pullback(s3.element(j), &f)?)?;
                if !pl_equal(&lhs, &rhs)? {
                    return Err(internal("pullback is not a left action".into()));
                }
            }
        }
        let g = s3.element(1);
        if act_on_divisor(g, &f.div()?)? != pullback(g, &f)?.div()? {
            return Err(internal("pushforward disagrees with pullback".into()));
        }
    }
    record("action-compatibility", 2);

    Ok(checks)
}

// ---------------------------------------------------------------------------
// Envelope plumbing
// ---------------------------------------------------------------------------

fn emit(out: &Option<PathBuf>, envelope: &Value) -> Result<(), Failure> {
    let text = io::canonical_json(envelope);
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => fs::write(path, text)
            .map_err(|e| file_failure(path, &format!("cannot write file ({e})"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((payload, summary)) => {
            let envelope = json!({"status": "ok", "payload": payload});
            if let Err(f) = emit(&cli.out, &envelope) {
                eprintln!("error: {}", f.message);
                return ExitCode::from(f.code);
            }
            eprintln!("{summary}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            let mut envelope = json!({"status": "error", "code": f.code, "message": f.message});
            if let Some(cert) = &f.certificate {
                envelope["certificate"] = cert.clone();
            }
            let _ = emit(&cli.out, &envelope);
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
