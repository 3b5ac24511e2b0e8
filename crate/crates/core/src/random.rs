//! Seeded random generators for property tests and the self-test suite.
//! Everything is exact: offsets, radii and values are small rationals, so a
//! fixed seed reproduces identical objects bit for bit.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::Zero;
use rand::Rng;

use crate::automorphism::AutGroup;
use crate::curve::{Curve, EdgeLength, Point};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::plfn::{EdgeProfile, PlFunction, SlopeMode};
use crate::rat::{rat, rat_int, Rat};
use crate::refine::refine;

/// `max(radius - d(x, center), 0)`: the tent of height `radius` around a
/// point, cut off at the zero level. Slopes are -1, 0, 1 everywhere, so this
/// is a rational function on any curve; sums and maxima of tents give the
/// generic test functions below.
pub fn ramp(curve: &Arc<Curve>, center: &Point, radius: &Rat) -> Result<PlFunction> {
    if curve.is_infinite_point(center)? {
        return Err(Error::BadInput(
            "a ramp center must be at finite distance".into(),
        ));
    }
    if radius <= &Rat::zero() {
        return Ok(PlFunction::zero(curve));
    }

    // make the center a vertex, then read off where the distance function
    // bends (shortest paths switch ends) or crosses the radius
    let r1 = refine(curve, std::slice::from_ref(center))?;
    let fine1 = r1.refined();
    let mut dist = vec![None; fine1.vertices().len()];
    for (vi, v) in fine1.vertices().iter().enumerate() {
        if v.infinite {
            continue;
        }
        match curve.distance(r1.vertex_point(vi), center)? {
            EdgeLength::Finite(x) => dist[vi] = Some(x),
            EdgeLength::Infinite => {
                return Err(Error::Internal(
                    "a finite vertex sits at infinite distance".into(),
                ))
            }
        }
    }

    let mut cuts: BTreeSet<Point> = BTreeSet::new();
    cuts.insert(curve.canonical_point(center)?);
    for e in fine1.edges() {
        let du = dist[e.ends[0]].clone().expect("finite end first");
        let mut marks: Vec<Rat> = Vec::new();
        match &e.length {
            EdgeLength::Finite(l) => {
                let dv = dist[e.ends[1]].clone().expect("finite edge");
                // d(t) = min(du + t, dv + l - t) bends once at most
                let tstar = (&dv - &du + l) / rat_int(2);
                let t1 = tstar.clone().max(Rat::zero()).min(l.clone());
                if tstar > Rat::zero() && &tstar < l {
                    marks.push(tstar);
                }
                let c1 = radius - &du;
                if c1 > Rat::zero() && c1 < t1 {
                    marks.push(c1);
                }
                let c2 = l + &dv - radius;
                if c2 > t1 && &c2 < l {
                    marks.push(c2);
                }
            }
            EdgeLength::Infinite => {
                if radius > &du {
                    marks.push(radius - &du);
                }
            }
        }
        for m in marks {
            cuts.insert(r1.to_base(&Point::on_edge(e.id.0.clone(), m))?);
        }
    }

    let all: Vec<Point> = cuts.into_iter().collect();
    let r2 = refine(curve, &all)?;
    let fine2 = r2.refined();
    let mut values = std::collections::BTreeMap::new();
    for (vi, v) in fine2.vertices().iter().enumerate() {
        if v.infinite {
            continue;
        }
        let d = match curve.distance(r2.vertex_point(vi), center)? {
            EdgeLength::Finite(x) => x,
            EdgeLength::Infinite => unreachable!("finite vertices are connected"),
        };
        let h = (radius - d).max(Rat::zero());
        values.insert(v.id.0.clone(), h);
    }
    PlFunction::new(fine2, SlopeMode::Integer, values, Default::default())?.to_base(&r2)
}

/// Small random rational with numerator in `[-bound, bound]` and denominator
/// in `{1, 2, 3, 4}`.
pub fn random_rat<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Rat {
    rat(rng.gen_range(-bound..=bound), rng.gen_range(1..=4))
}

fn random_interior<R: Rng + ?Sized>(curve: &Arc<Curve>, rng: &mut R, ei: usize) -> Point {
    let e = curve.edge(ei);
    let offset = match &e.length {
        EdgeLength::Finite(l) => {
            let m = rng.gen_range(2..=5i64);
            l * rat(rng.gen_range(1..m), m)
        }
        EdgeLength::Infinite => rat(rng.gen_range(1..=8), rng.gen_range(1..=2)),
    };
    Point::on_edge(e.id.0.clone(), offset)
}

/// A uniform-ish random point: a vertex, or a rational interior point of a
/// random edge.
pub fn random_point<R: Rng + ?Sized>(curve: &Arc<Curve>, rng: &mut R) -> Point {
    if rng.gen_range(0..10) < 3 {
        let vi = rng.gen_range(0..curve.vertices().len());
        Point::Vertex(curve.vertex(vi).id.clone())
    } else {
        let ei = rng.gen_range(0..curve.edges().len());
        random_interior(curve, rng, ei)
    }
}

/// Like `random_point` but never an infinite vertex, so the result is always
/// at finite distance.
pub fn random_finite_point<R: Rng + ?Sized>(curve: &Arc<Curve>, rng: &mut R) -> Point {
    loop {
        let p = random_point(curve, rng);
        if let Point::Vertex(v) = &p {
            let vi = curve.vertex_index(v).expect("generated from the curve");
            if curve.vertex(vi).infinite {
                continue;
            }
        }
        return p;
    }
}

/// A random rational function: a constant plus one to three tents and leaf
/// tails, mixed with both classical addition and pointwise maximum.
pub fn random_function<R: Rng + ?Sized>(curve: &Arc<Curve>, rng: &mut R) -> Result<PlFunction> {
    let infinite_edges: Vec<usize> = curve
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.length.is_finite())
        .map(|(ei, _)| ei)
        .collect();
    let mut f = PlFunction::constant(curve, random_rat(rng, 3));
    for _ in 0..rng.gen_range(1..=3) {
        let kind = rng.gen_range(0..6);
        let ing = if kind < 4 {
            let center = random_finite_point(curve, rng);
            let radius = rat(rng.gen_range(1..=6), rng.gen_range(1..=3));
            let tent = ramp(curve, &center, &radius)?;
            if rng.gen() {
                tent
            } else {
                tent.neg()
            }
        } else if kind == 4 && !infinite_edges.is_empty() {
            // flat until a break, then an unbounded piece of integer slope
            let ei = infinite_edges[rng.gen_range(0..infinite_edges.len())];
            let slope = rat_int(*[-2i64, -1, 1, 2].get(rng.gen_range(0..4)).unwrap());
            let start = rat(rng.gen_range(1..=5), rng.gen_range(1..=2));
            let values = curve
                .vertices()
                .iter()
                .filter(|v| !v.infinite)
                .map(|v| (v.id.0.clone(), Rat::zero()))
                .collect();
            let profiles = [(
                curve.edge(ei).id.0.clone(),
                EdgeProfile {
                    breaks: vec![(start, Rat::zero())],
                    leaf_slope: Some(slope),
                },
            )]
            .into();
            PlFunction::new(curve, SlopeMode::Integer, values, profiles)?
        } else {
            PlFunction::constant(curve, random_rat(rng, 3))
        };
        f = if rng.gen() { f.plus(&ing)? } else { f.trop_add(&ing)? };
    }
    Ok(f)
}

/// A random divisor of the requested degree, supported on one to four
/// points.
pub fn random_divisor<R: Rng + ?Sized>(
    curve: &Arc<Curve>,
    rng: &mut R,
    degree: i64,
) -> Result<Divisor> {
    let mut pts: BTreeSet<Point> = BTreeSet::new();
    for _ in 0..rng.gen_range(1..=4) {
        pts.insert(curve.canonical_point(&random_point(curve, rng))?);
    }
    let pts: Vec<Point> = pts.into_iter().collect();
    let mut coeffs: Vec<i64> = pts.iter().map(|_| rng.gen_range(-3..=3)).collect();
    let partial: i64 = coeffs[..coeffs.len() - 1].iter().sum();
    *coeffs.last_mut().unwrap() = degree - partial;
    Divisor::new(
        curve,
        pts.into_iter()
            .zip(coeffs)
            .map(|(p, c)| (p, rat_int(c)))
            .collect(),
    )
}

/// A random sum of full group orbits with integer weights; invariant under
/// the group by construction. Orbits of fixed points contribute single
/// points with multiplied weight.
pub fn random_orbit_sum<R: Rng + ?Sized>(group: &AutGroup, rng: &mut R) -> Result<Divisor> {
    let curve = group.base();
    let mut d = Divisor::zero(curve);
    for _ in 0..rng.gen_range(1..=2) {
        let p = random_point(curve, rng);
        let mut c = rng.gen_range(-2..=2i64);
        if c == 0 {
            c = 1;
        }
        for i in 0..group.order() {
            let q = group.element(i).act_on_point(&p)?;
            d = d.plus(&Divisor::single(curve, q, rat_int(c))?)?;
        }
    }
    Ok(d)
}
