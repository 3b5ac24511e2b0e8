//! End-to-end acceptance checks. Each test prints one `ACCEPTANCE n: PASS`
//! line; every threshold (counts, time budgets, exact values) is pinned in
//! the code below.

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use tropsym_core::rat::{rat, rat_int, Rat};
use tropsym_core::{
    act_on_divisor, coboundary_1d, coboundary_1f, coboundary_2f, coboundary_2r,
    div_1cocycle_witness, enumerate_aut, fixtures, h90_witness, is_coboundary_1d,
    is_coboundary_1f, is_coboundary_2f, is_coboundary_2r, is_equivalent, mq_2cocycle_witness,
    random_divisor, random_function, random_orbit_sum, random_point, real_2cocycle_witness,
    solve_principal, symmetrize_divisor, AutGroup, Automorphism, Curve, Divisor, Error,
    PlFunction, Point, PrincipalityResult,
};

fn rng_for(tag: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(0x7fb2_a641 ^ tag)
}

fn swap_group(curve: &Arc<Curve>, va: &str, vb: &str, ea: &str, eb: &str) -> AutGroup {
    let (va, vb, ea, eb) = (
        va.to_string(),
        vb.to_string(),
        ea.to_string(),
        eb.to_string(),
    );
    let c2 = curve.clone();
    let swap = Automorphism::from_action(curve, move |p| {
        Ok(match c2.canonical_point(p)? {
            Point::Vertex(v) => Point::Vertex(if v.0 == va {
                vb.clone().into()
            } else if v.0 == vb {
                va.clone().into()
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
    })
    .expect("swap is an automorphism");
    tropsym_core::validate_group(curve, &[Automorphism::identity(curve), swap])
        .expect("swap group is valid")
}

#[test]
fn acceptance_01_automorphism_counts() {
    let clock = Instant::now();
    for (n, expected) in [(3usize, 6u64), (4, 24), (5, 120)] {
        let g = enumerate_aut(&fixtures::star(n)).expect("stars have finite symmetries");
        assert_eq!(
            g.order() as u64,
            expected,
            "ACCEPTANCE 1: FAIL, the {n}-star must have {expected} symmetries"
        );
    }
    for c in [
        fixtures::circle(rat_int(1), rat_int(2)),
        fixtures::circle(rat(1, 3), rat(1, 3)),
        fixtures::segment(),
    ] {
        assert!(
            matches!(enumerate_aut(&c), Err(Error::InfiniteAutGroup(_))),
            "ACCEPTANCE 1: FAIL, circles and lines must report an infinite group"
        );
    }
    let elapsed = clock.elapsed();
    assert!(
        elapsed < Duration::from_secs(5),
        "ACCEPTANCE 1: FAIL, took {elapsed:?} (budget 5 s)"
    );
    println!("ACCEPTANCE 1: PASS, star orders 6/24/120 exact, infinite groups rejected, {elapsed:?}");
}

#[test]
fn acceptance_02_star_picard_group() {
    let clock = Instant::now();
    let star3 = fixtures::star(3);
    let origin = Point::vertex("O");
    let mut rng = rng_for(2);
    let (mut vertex_support, mut leaf_support) = (0usize, 0usize);
    for _ in 0..50 {
        let deg = rng.gen_range(-5..=5i64);
        let d = random_divisor(&star3, &mut rng, deg).unwrap();
        for p in d.support() {
            match p {
                Point::Vertex(_) => vertex_support += 1,
                Point::Edge { .. } => leaf_support += 1,
            }
        }
        let target = Divisor::single(&star3, origin.clone(), rat_int(deg)).unwrap();
        let f = is_equivalent(&d, &target)
            .unwrap()
            .expect("ACCEPTANCE 2: FAIL, every divisor must match its degree at O");
        assert_eq!(
            f.div().unwrap(),
            d.minus(&target).unwrap(),
            "ACCEPTANCE 2: FAIL, witness divisor mismatch"
        );
    }
    assert!(vertex_support > 0 && leaf_support > 0);
    let elapsed = clock.elapsed();
    assert!(
        elapsed < Duration::from_secs(10),
        "ACCEPTANCE 2: FAIL, took {elapsed:?} (budget 10 s)"
    );
    println!("ACCEPTANCE 2: PASS, 50 random divisors equivalent to d*O with verified witnesses, {elapsed:?}");
}

#[test]
fn acceptance_03_degree_conservation() {
    let fixtures4 = [
        fixtures::star(3),
        fixtures::theta112(),
        fixtures::circle(rat_int(1), rat_int(2)),
        fixtures::segment(),
    ];
    let mut rng = rng_for(3);
    for k in 0..100 {
        let c = &fixtures4[k % 4];
        let f = random_function(c, &mut rng).unwrap();
        assert_eq!(
            f.div().unwrap().degree(),
            rat_int(0),
            "ACCEPTANCE 3: FAIL, principal divisors must have degree zero"
        );
    }
    println!("ACCEPTANCE 3: PASS, 100 random principal divisors have degree zero exactly");
}

#[test]
fn acceptance_04_kernel_of_div_is_constants() {
    let fixtures4 = [
        fixtures::star(3),
        fixtures::theta112(),
        fixtures::circle(rat_int(1), rat_int(2)),
        fixtures::segment(),
    ];
    for c in &fixtures4 {
        match solve_principal(&Divisor::zero(c)).unwrap() {
            PrincipalityResult::Witness(f) => assert_eq!(
                f.constant_value(),
                Some(&rat_int(0)),
                "ACCEPTANCE 4: FAIL, the zero divisor must solve to the constant 0"
            ),
            PrincipalityResult::NotPrincipal { .. } => {
                panic!("ACCEPTANCE 4: FAIL, the zero divisor is principal")
            }
        }
    }
    let mut rng = rng_for(4);
    for k in 0..50 {
        let c = &fixtures4[k % 4];
        let g = random_function(c, &mut rng).unwrap();
        let w = match solve_principal(&g.div().unwrap()).unwrap() {
            PrincipalityResult::Witness(w) => w,
            PrincipalityResult::NotPrincipal { .. } => {
                panic!("ACCEPTANCE 4: FAIL, div g is principal by construction")
            }
        };
        // div(g / w) = 0 by construction, so the quotient must be constant
        let f = g.trop_div(&w).unwrap();
        assert!(
            f.is_constant(),
            "ACCEPTANCE 4: FAIL, a function with zero divisor must be constant"
        );
    }
    println!("ACCEPTANCE 4: PASS, div kernel is the constants on all fixtures (50 random cases)");
}

#[test]
fn acceptance_05_circle_certificates_match_the_two_arc_oracle() {
    let mut rng = rng_for(5);
    let mut checked = 0usize;
    for _ in 0..20 {
        let a = rat(rng.gen_range(1..=9), rng.gen_range(1..=4));
        let b = rat(rng.gen_range(1..=9), rng.gen_range(1..=4));
        let c = fixtures::circle(a.clone(), b.clone());
        let total = &a + &b;
        let mut pairs = 0usize;
        while pairs < 20 {
            let p = c.canonical_point(&random_point(&c, &mut rng)).unwrap();
            let q = c.canonical_point(&random_point(&c, &mut rng)).unwrap();
            if p == q {
                continue;
            }
            pairs += 1;
            // position along the loop measured from A through e1
            let pos = |pt: &Point| -> Rat {
                match pt {
                    Point::Vertex(v) if v.0 == "A" => rat_int(0),
                    Point::Vertex(_) => a.clone(),
                    Point::Edge { edge, offset } if edge.0 == "e1" => offset.clone(),
                    Point::Edge { offset, .. } => &total - offset,
                }
            };
            let (mut lo, mut hi) = (pos(&p), pos(&q));
            if lo > hi {
                std::mem::swap(&mut lo, &mut hi);
            }
            let d_in = &hi - &lo;
            let d_out = &total - &d_in;
            // brute-force 2x2 solve by Cramer's rule:
            //   d_in*t_in + d_out*t_out = 0,  t_in - t_out = 1
            let det = -&d_in - &d_out;
            let t_in = -&d_out / &det;
            let t_out = &d_in / &det;
            assert_eq!(&d_in * &t_in + &d_out * &t_out, rat_int(0));
            assert_eq!(&t_in - &t_out, rat_int(1));
            // the reported edge is the first piece of e1, starting at A
            let mut first_cut = a.clone();
            for pt in [&p, &q] {
                if let Point::Edge { edge, offset } = pt {
                    if edge.0 == "e1" && offset < &first_cut {
                        first_cut = offset.clone();
                    }
                }
            }
            let mid = &first_cut / &rat_int(2);
            let expected = if lo < mid && mid < hi {
                abs(&t_in)
            } else {
                abs(&t_out)
            };
            let d = Divisor::new(&c, vec![(p, rat_int(1)), (q, rat_int(-1))]).unwrap();
            match solve_principal(&d).unwrap() {
                PrincipalityResult::Witness(_) => {
                    panic!("ACCEPTANCE 5: FAIL, distinct circle points are never equivalent")
                }
                PrincipalityResult::NotPrincipal { slope, .. } => assert_eq!(
                    slope,
                    expected,
                    "ACCEPTANCE 5: FAIL, certificate slope disagrees with the arc oracle"
                ),
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 400);
    println!("ACCEPTANCE 5: PASS, 400 circle certificates match the independent 2x2 arc solve");
}

fn abs(r: &Rat) -> Rat {
    if r < &rat_int(0) {
        -r
    } else {
        r.clone()
    }
}

#[test]
fn acceptance_06_tropical_hilbert_90() {
    let clock = Instant::now();
    let star3 = fixtures::star(3);
    let s3 = enumerate_aut(&star3).unwrap();
    let seg = fixtures::segment();
    let z2_seg = swap_group(&seg, "I1", "I2", "e1", "e2");
    let theta = fixtures::theta112();
    let z2_theta = swap_group(&theta, "", "", "e1", "e2");
    let mut rng = rng_for(6);
    let mut done = 0usize;
    let plans: [(&Arc<Curve>, &AutGroup, usize); 3] = [
        (&star3, &s3, 68),
        (&seg, &z2_seg, 66),
        (&theta, &z2_theta, 66),
    ];
    for (c, g, count) in plans {
        for _ in 0..count {
            let f = random_function(c, &mut rng).unwrap();
            let phi = coboundary_1f(g, &f).unwrap();
            let w = h90_witness(&phi).unwrap();
            assert!(
                is_coboundary_1f(&phi, &w).unwrap(),
                "ACCEPTANCE 6: FAIL, pullback(h, f) - f must equal phi(h) for all h"
            );
            done += 1;
        }
    }
    assert_eq!(done, 200);
    let elapsed = clock.elapsed();
    assert!(
        elapsed < Duration::from_secs(30),
        "ACCEPTANCE 6: FAIL, took {elapsed:?} (budget 30 s)"
    );
    println!("ACCEPTANCE 6: PASS, 200 function cocycles split exactly, {elapsed:?}");
}

#[test]
fn acceptance_07_second_cohomology_witnesses() {
    let star3 = fixtures::star(3);
    let s3 = enumerate_aut(&star3).unwrap();
    let seg = fixtures::segment();
    let z2 = swap_group(&seg, "I1", "I2", "e1", "e2");
    let mut rng = rng_for(7);
    let rr = |rng: &mut ChaCha20Rng| rat(rng.gen_range(-8..=8), rng.gen_range(1..=4));

    // constant coefficients
    for k in 0..200 {
        if k % 2 == 0 {
            let seed: Vec<Rat> = (0..6).map(|_| rr(&mut rng)).collect();
            let phi = coboundary_2r(&s3, &seed).unwrap();
            let psi = real_2cocycle_witness(&phi).unwrap();
            assert!(
                is_coboundary_2r(&phi, &psi).unwrap(),
                "ACCEPTANCE 7: FAIL, d(psi) must equal phi"
            );
        } else {
            // normalized seed over Z/2: the witness must reproduce it exactly
            let seed = vec![rat_int(0), rr(&mut rng)];
            let phi = coboundary_2r(&z2, &seed).unwrap();
            assert_eq!(
                real_2cocycle_witness(&phi).unwrap(),
                seed,
                "ACCEPTANCE 7: FAIL, the averaging witness must reproduce a normalized seed"
            );
        }
    }

    // function coefficients with rational slopes
    for k in 0..200 {
        let (c, g): (&Arc<Curve>, &AutGroup) = if k % 2 == 0 { (&seg, &z2) } else { (&star3, &s3) };
        let mut seed = vec![PlFunction::zero(c).into_rational_mode()];
        for _ in 1..g.order() {
            let f = random_function(c, &mut rng).unwrap().into_rational_mode();
            seed.push(f.trop_scale(&rat(1, 2)).unwrap());
        }
        let phi = coboundary_2f(g, &seed).unwrap();
        let psi = mq_2cocycle_witness(&phi).unwrap();
        assert!(
            is_coboundary_2f(&phi, &psi).unwrap(),
            "ACCEPTANCE 7: FAIL, d(psi) must equal phi for function coefficients"
        );
    }
    println!("ACCEPTANCE 7: PASS, 200 constant and 200 function 2-coboundaries split, seeds recovered");
}

#[test]
fn acceptance_08_divisor_cocycle_witnesses() {
    let star3 = fixtures::star(3);
    let s3 = enumerate_aut(&star3).unwrap();
    let seg = fixtures::segment();
    let z2 = swap_group(&seg, "I1", "I2", "e1", "e2");
    let mut rng = rng_for(8);
    for k in 0..200 {
        let (c, g): (&Arc<Curve>, &AutGroup) = if k % 2 == 0 { (&star3, &s3) } else { (&seg, &z2) };
        let seed = if k % 10 == 0 {
            // force a mix of fixed, stabilized, and free support
            let center = if k % 2 == 0 { "O" } else { "M" };
            Divisor::new(
                c,
                vec![
                    (Point::vertex(center), rat_int(2)),
                    (Point::on_edge("e1", rat(3, 2)), rat_int(-1)),
                    (Point::on_edge("e2", rat(1, 3)), rat_int(1)),
                ],
            )
            .unwrap()
        } else {
            let deg = rng.gen_range(-3..=3);
            random_divisor(c, &mut rng, deg).unwrap()
        };
        let phi = coboundary_1d(g, &seed).unwrap();
        let e = div_1cocycle_witness(&phi).unwrap();
        assert!(
            is_coboundary_1d(&phi, &e).unwrap(),
            "ACCEPTANCE 8: FAIL, gE - E must equal phi(g) for all g"
        );
    }
    println!("ACCEPTANCE 8: PASS, 200 divisor cocycles split by orbit transport");
}

#[test]
fn acceptance_09_symmetrization_pipeline() {
    let clock = Instant::now();
    let star3 = fixtures::star(3);
    let s3 = enumerate_aut(&star3).unwrap();
    let mut rng = rng_for(9);
    for _ in 0..100 {
        let base = random_orbit_sum(&s3, &mut rng).unwrap();
        let f = random_function(&star3, &mut rng).unwrap();
        let d = base.plus(&f.div().unwrap()).unwrap();
        let report = symmetrize_divisor(&s3, &d).unwrap();
        for i in 0..s3.order() {
            assert_eq!(
                act_on_divisor(s3.element(i), &report.output).unwrap(),
                report.output,
                "ACCEPTANCE 9: FAIL, the output must be invariant under every element"
            );
        }
        assert!(
            is_equivalent(&d, &report.output).unwrap().is_some(),
            "ACCEPTANCE 9: FAIL, the output must stay in the input class"
        );
    }
    // hand-checked instance: a leaf point moves to the center
    let p = Divisor::single(&star3, Point::on_edge("e1", rat_int(1)), rat_int(1)).unwrap();
    let report = symmetrize_divisor(&s3, &p).unwrap();
    assert_eq!(
        report.output,
        Divisor::single(&star3, Point::vertex("O"), rat_int(1)).unwrap(),
        "ACCEPTANCE 9: FAIL, the leaf point must symmetrize to O"
    );
    let elapsed = clock.elapsed();
    assert!(
        elapsed < Duration::from_secs(60),
        "ACCEPTANCE 9: FAIL, took {elapsed:?} (budget 60 s)"
    );
    println!(
        "ACCEPTANCE 9: PASS, 100 random invariant classes symmetrized, hand instance gives O, {elapsed:?}"
    );
}

#[test]
fn acceptance_10_non_invariant_class_certificate() {
    let c = fixtures::circle(rat_int(1), rat_int(2));
    let len = |p: &Point| match p {
        Point::Edge { edge, offset } => {
            let full = if edge.0 == "e1" { rat_int(1) } else { rat_int(2) };
            Point::Edge {
                edge: edge.clone(),
                offset: &full - offset,
            }
        }
        v => v.clone(),
    };
    let c2 = c.clone();
    let refl = Automorphism::from_action(&c, move |p| {
        Ok(match c2.canonical_point(p)? {
            Point::Vertex(v) => Point::Vertex(if v.0 == "A" {
                "B".into()
            } else {
                "A".into()
            }),
            p => len(&p),
        })
    })
    .unwrap();
    let g = tropsym_core::validate_group(&c, &[Automorphism::identity(&c), refl]).unwrap();
    let a = Divisor::single(&c, Point::vertex("A"), rat_int(1)).unwrap();
    match tropsym_core::symmetrize_divisor(&g, &a) {
        Err(Error::NotInvariantClass {
            element,
            edge,
            slope,
        }) => {
            assert_eq!(element, 1);
            assert_eq!(edge, "e1");
            assert_eq!(
                slope, "2/3",
                "ACCEPTANCE 10: FAIL, the certificate must carry slope 2/3"
            );
        }
        other => panic!("ACCEPTANCE 10: FAIL, expected a non-invariant certificate, got {other:?}"),
    }
    println!("ACCEPTANCE 10: PASS, the asymmetric circle class is rejected with slope 2/3 on e1");
}

#[test]
fn acceptance_11_deterministic_cli_outputs() {
    let bin = env!("CARGO_BIN_EXE_tropsym");
    let dir = tempfile::tempdir().unwrap();
    let star3 = fixtures::star(3);
    let s3 = enumerate_aut(&star3).unwrap();
    let curve_path = dir.path().join("star3.curve");
    std::fs::write(
        &curve_path,
        tropsym_core::io::canonical_json(&tropsym_core::io::curve_to_json(&star3)),
    )
    .unwrap();
    let group_path = dir.path().join("s3.group");
    std::fs::write(
        &group_path,
        tropsym_core::io::canonical_json(&tropsym_core::io::group_to_json(&s3)),
    )
    .unwrap();
    let p = Divisor::single(&star3, Point::on_edge("e1", rat_int(1)), rat_int(1)).unwrap();
    let div_path = dir.path().join("P.div");
    std::fs::write(
        &div_path,
        tropsym_core::io::canonical_json(&tropsym_core::io::divisor_to_json(&p)),
    )
    .unwrap();

    let runs: Vec<Vec<String>> = vec![
        vec!["selftest".into()],
        vec!["validate".into(), curve_path.display().to_string()],
        vec!["aut".into(), curve_path.display().to_string()],
        vec![
            "symmetrize".into(),
            curve_path.display().to_string(),
            group_path.display().to_string(),
            div_path.display().to_string(),
        ],
    ];
    for args in &runs {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let out = Command::new(bin)
                .args(args)
                .env("TROPSYM_SEED", "20260816")
                .output()
                .unwrap();
            assert!(
                out.status.success(),
                "ACCEPTANCE 11: FAIL, `{args:?}` errored: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            outputs.push(out.stdout);
        }
        assert_eq!(
            outputs[0], outputs[1],
            "ACCEPTANCE 11: FAIL, `{args:?}` is not byte-stable under a fixed seed"
        );
    }
    println!("ACCEPTANCE 11: PASS, selftest and subcommand outputs are byte-identical across runs");
}
