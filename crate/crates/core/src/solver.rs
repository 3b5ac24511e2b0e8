//! Membership in the group of principal divisors.
//!
//! A degree-0 divisor is principal exactly when the multiplicity-weighted
//! Laplacian system for vertex potentials has integral slopes everywhere.
//! The kernel of div is the constants, so after refining the support into
//! the vertex set the witness is linear on every edge (an interior bend
//! would contribute to div f), and the whole question is one exact solve.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::automorphism::AutGroup;
use crate::curve::{same_curve, EdgeLength, Point};
use crate::divisor::{act_on_divisor, Divisor};
use crate::error::{Error, Result};
use crate::linalg;
use crate::plfn::{pl_equal, pullback, EdgeProfile, PlFunction, SlopeMode};
use crate::rat::{abs, fmt_rat, is_integer, rat_int, to_i64, Rat};
use crate::refine::{refine, Refinement};

/// Outcome of the principality test.
#[derive(Debug, Clone)]
pub enum PrincipalityResult {
    /// `div(f)` equals the queried divisor; `f` is normalized to value 0 at
    /// the lexicographically smallest finite vertex.
    Witness(PlFunction),
    /// The system forces a fractional slope; the first offending edge in
    /// edge order, with the slope magnitude.
    NotPrincipal { edge: String, slope: Rat },
}

impl PrincipalityResult {
    pub fn witness(self) -> Result<PlFunction> {
        match self {
            PrincipalityResult::Witness(f) => Ok(f),
            PrincipalityResult::NotPrincipal { edge, slope } => Err(Error::NotPrincipal {
                edge,
                slope: fmt_rat(&slope),
            }),
        }
    }
}

/// Base edge a refined edge came from, for user-facing certificates.
fn home_edge_id(r: &Refinement, refined_edge: usize) -> Result<String> {
    let e = r.refined().edge(refined_edge);
    let probe = match &e.length {
        EdgeLength::Finite(l) => l * crate::rat::rat(1, 2),
        EdgeLength::Infinite => rat_int(1),
    };
    match r.to_base(&Point::Edge {
        edge: e.id.clone(),
        offset: probe,
    })? {
        Point::Edge { edge, .. } => Ok(edge.0),
        Point::Vertex(_) => Err(Error::Internal("edge interiors stay interior".into())),
    }
}

/// Decide whether `d0` is the divisor of a rational function, returning the
/// normalized witness or the first non-integral forced slope.
pub fn solve_principal(d0: &Divisor) -> Result<PrincipalityResult> {
    let curve = d0.curve();
    for (p, a) in d0.iter() {
        if !is_integer(a) {
            return Err(Error::NonIntegerOrder {
                point: p.to_string(),
                value: fmt_rat(a),
            });
        }
    }
    let deg = d0.degree();
    if !deg.is_zero() {
        return Err(Error::DegreeNonzero(to_i64(&deg).ok_or_else(|| {
            Error::Internal("divisor degree exceeds machine range".into())
        })?));
    }

    let support: Vec<Point> = d0.support().cloned().collect();
    let r = refine(curve, &support)?;
    let fine = r.refined();
    let dd = d0.on_refined(&r)?;

    // leaf slopes first: the coefficient at each infinite point is m * slope,
    // a divisibility constraint independent of the finite part
    let mut leaf_slope: Vec<Option<Rat>> = vec![None; fine.edges().len()];
    for (ei, e) in fine.edges().iter().enumerate() {
        if e.length.is_finite() {
            continue;
        }
        let w = e.ends[1];
        let a = dd.coeff(&Point::Vertex(fine.vertex(w).id.clone()))?;
        let lam = a / rat_int(e.multiplicity as i64);
        if !is_integer(&lam) {
            return Ok(PrincipalityResult::NotPrincipal {
                edge: home_edge_id(&r, ei)?,
                slope: abs(&lam),
            });
        }
        leaf_slope[ei] = Some(lam);
    }

    // weighted Laplacian over the finite vertices, weight = mult/length;
    // the flux at v must be the coefficient there, with each incident leaf
    // folding its infinite-point coefficient in
    let finite: Vec<usize> = (0..fine.vertices().len())
        .filter(|&vi| !fine.vertex(vi).infinite)
        .collect();
    let col: BTreeMap<usize, usize> = finite.iter().enumerate().map(|(c, &vi)| (vi, c)).collect();
    let n = finite.len();
    let mut a = vec![vec![Rat::zero(); n]; n];
    let mut b = vec![Rat::zero(); n];
    for (row, &vi) in finite.iter().enumerate() {
        b[row] = -dd.coeff(&Point::Vertex(fine.vertex(vi).id.clone()))?;
        for &(ei, _) in fine.incident(vi) {
            let e = fine.edge(ei);
            match &e.length {
                EdgeLength::Infinite => {
                    let w = fine.vertex(e.ends[1]).id.clone();
                    b[row] -= dd.coeff(&Point::Vertex(w))?;
                }
                EdgeLength::Finite(l) => {
                    if e.is_loop() {
                        continue;
                    }
                    let u = if e.ends[0] == vi { e.ends[1] } else { e.ends[0] };
                    let w = rat_int(e.multiplicity as i64) / l;
                    a[row][col[&vi]] += &w;
                    a[row][col[&u]] -= &w;
                }
            }
        }
    }
    // pin one potential: the Laplacian rows are dependent (both sides sum
    // to zero), so replacing one equation keeps the full flux system
    let pin = col[&fine.base_vertex()];
    for c in 0..n {
        a[pin][c] = Rat::zero();
    }
    a[pin][pin] = Rat::from_integer(1.into());
    b[pin] = Rat::zero();
    let x = linalg::solve(&a, &b)
        .ok_or_else(|| Error::Internal("the pinned Laplacian of a connected curve is regular".into()))?;

    // principal iff every finite-edge slope is an integer
    for (ei, e) in fine.edges().iter().enumerate() {
        if let EdgeLength::Finite(l) = &e.length {
            let s = (&x[col[&e.ends[1]]] - &x[col[&e.ends[0]]]) / l;
            if !is_integer(&s) {
                return Ok(PrincipalityResult::NotPrincipal {
                    edge: home_edge_id(&r, ei)?,
                    slope: abs(&s),
                });
            }
        }
    }

    let values: BTreeMap<String, Rat> = finite
        .iter()
        .map(|&vi| (fine.vertex(vi).id.0.clone(), x[col[&vi]].clone()))
        .collect();
    let profiles: BTreeMap<String, EdgeProfile> = fine
        .edges()
        .iter()
        .enumerate()
        .filter_map(|(ei, e)| {
            leaf_slope[ei].clone().map(|lam| {
                (
                    e.id.0.clone(),
                    EdgeProfile {
                        breaks: Vec::new(),
                        leaf_slope: Some(lam),
                    },
                )
            })
        })
        .collect();
    let f = PlFunction::new(fine, SlopeMode::Integer, values, profiles)?.to_base(&r)?;
    let v0 = Point::Vertex(curve.vertex(curve.base_vertex()).id.clone());
    let f = f.add_constant(&-f.eval(&v0)?);

    if f.div()? != *d0 {
        return Err(Error::Internal(
            "the solved potentials do not reproduce the divisor".into(),
        ));
    }
    Ok(PrincipalityResult::Witness(f))
}

/// Linear equivalence: `Some(f)` with `d = e + div(f)` iff `d ~ e`.
pub fn is_equivalent(d: &Divisor, e: &Divisor) -> Result<Option<PlFunction>> {
    if !same_curve(d.curve(), e.curve()) {
        return Err(Error::BaseMismatch);
    }
    if d.degree() != e.degree() {
        return Ok(None);
    }
    match solve_principal(&d.minus(e)?)? {
        PrincipalityResult::Witness(f) => Ok(Some(f)),
        PrincipalityResult::NotPrincipal { .. } => Ok(None),
    }
}

/// Witness a principal divisor fixed by every group element with a function
/// fixed by every group element. Invariance of the normalized witness is
/// automatic: each `pullback(g,f) - f` is a constant, and `g` to that
/// constant is a homomorphism into the rationals, hence zero on a finite
/// group; it is still asserted.
pub fn invariant_principal_witness(group: &AutGroup, e: &Divisor) -> Result<PlFunction> {
    if !same_curve(group.base(), e.curve()) {
        return Err(Error::BaseMismatch);
    }
    for (i, g) in group.elements().iter().enumerate() {
        if act_on_divisor(g, e)? != *e {
            return Err(Error::NotInvariantDivisor(i));
        }
    }
    let f = solve_principal(e)?.witness()?;
    for g in group.elements() {
        if !pl_equal(&pullback(g, &f)?, &f)? {
            return Err(Error::Internal(
                "the normalized witness of an invariant divisor moved under the group".into(),
            ));
        }
    }
    Ok(f)
}
