//! Replacing a divisor by a genuinely invariant one inside its equivalence
//! class, whenever the class itself is fixed by the symmetry group.
//!
//! The witnesses `f_g` of `gD - D` form a 1-cochain whose coboundary
//! `c(g,h) = f_{gh} - f_g - g·f_h` lands in constants (all three functions
//! share a divisor). Averaging splits `c`, the corrected cochain is an honest
//! cocycle, and the tropical averaging witness `F` then moves `D` to the
//! invariant representative `D - div(F)`.

use num_traits::Zero;

use crate::automorphism::AutGroup;
use crate::cohomology::{h90_witness, real_2cocycle_witness, Cocycle1F, Cocycle2R};
use crate::curve::same_curve;
use crate::divisor::{act_on_divisor, Divisor};
use crate::error::{Error, Result};
use crate::plfn::PlFunction;
use crate::rat::{fmt_rat, Rat};
use crate::solver::{solve_principal, PrincipalityResult};

/// Every intermediate object of the symmetrization pipeline, in order.
#[derive(Debug, Clone)]
pub struct InvariantizationReport {
    pub input: Divisor,
    pub group: AutGroup,
    /// `witnesses[g]` solves `div f = gD - D`, normalized to 0 at the base
    /// vertex; the identity entry is the zero function.
    pub witnesses: Vec<PlFunction>,
    /// `constants[g][h] = f_{gh} - f_g - g·f_h`, each a constant function.
    pub constants: Vec<Vec<Rat>>,
    /// Splits the constants: `constants[g][h] = psi[g] + psi[h] - psi[gh]`.
    pub psi: Vec<Rat>,
    /// `adjusted[g] = witnesses[g] + psi[g]`, an exact cocycle.
    pub adjusted: Vec<PlFunction>,
    /// `-max_g adjusted[g]`.
    pub average: PlFunction,
    /// `input - div(average)`, fixed by every group element.
    pub output: Divisor,
}

fn class_witnesses(group: &AutGroup, d: &Divisor) -> Result<Option<Vec<(usize, PlFunction)>>> {
    let mut out = Vec::with_capacity(group.order());
    for i in 0..group.order() {
        let delta = act_on_divisor(group.element(i), d)?.minus(d)?;
        match solve_principal(&delta)? {
            PrincipalityResult::Witness(f) => out.push((i, f)),
            PrincipalityResult::NotPrincipal { .. } => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Whether the class of `d` is fixed by the whole group, i.e. `gD - D` is
/// principal for every `g`. On success returns the witnesses, indexed like
/// the group elements.
pub fn is_class_invariant(group: &AutGroup, d: &Divisor) -> Result<Option<Vec<PlFunction>>> {
    if !same_curve(d.curve(), group.base()) {
        return Err(Error::BaseMismatch);
    }
    Ok(class_witnesses(group, d)?.map(|ws| ws.into_iter().map(|(_, f)| f).collect()))
}

/// Produce the invariant representative of the class of `d`, with every
/// intermediate stage exposed for inspection.
pub fn symmetrize_divisor(group: &AutGroup, d: &Divisor) -> Result<InvariantizationReport> {
    if !same_curve(d.curve(), group.base()) {
        return Err(Error::BaseMismatch);
    }
    let n = group.order();

    let mut witnesses = Vec::with_capacity(n);
    for i in 0..n {
        let delta = act_on_divisor(group.element(i), d)?.minus(d)?;
        match solve_principal(&delta)? {
            PrincipalityResult::Witness(f) => witnesses.push(f),
            PrincipalityResult::NotPrincipal { edge, slope } => {
                return Err(Error::NotInvariantClass {
                    element: i,
                    edge,
                    slope: fmt_rat(&slope),
                })
            }
        }
    }

    // f_{gh} and f_g + g·f_h witness the same divisor, so they differ by a
    // constant; a non-constant difference means a solver bug.
    let mut constants = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let diff = witnesses[group.mul(i, j)]
                .trop_div(&witnesses[i])?
                .trop_div(&crate::plfn::pullback(group.element(i), &witnesses[j])?)?;
            match diff.constant_value() {
                Some(c) => row.push(c.clone()),
                None => {
                    return Err(Error::Internal(format!(
                        "witness defect at elements ({i}, {j}) is not constant"
                    )))
                }
            }
        }
        constants.push(row);
    }

    // the defect is a 2-cocycle for the trivial action; averaging splits it
    let defect = Cocycle2R::new(group.clone(), constants.clone())?;
    let psi = real_2cocycle_witness(&defect)?;

    let adjusted: Vec<PlFunction> = witnesses
        .iter()
        .zip(&psi)
        .map(|(f, c)| f.add_constant(c))
        .collect();
    // constructing the cocycle re-verifies the corrected relation exactly
    let cocycle = Cocycle1F::new(group.clone(), adjusted.clone()).map_err(|e| {
        Error::Internal(format!("adjusted witnesses fail the cocycle relation: {e}"))
    })?;

    let average = h90_witness(&cocycle)?;
    let output = d.minus(&average.div()?)?;
    for i in 0..n {
        if act_on_divisor(group.element(i), &output)? != output {
            return Err(Error::Internal(format!(
                "symmetrized divisor moves under element {i}"
            )));
        }
    }

    Ok(InvariantizationReport {
        input: d.clone(),
        group: group.clone(),
        witnesses,
        constants,
        psi,
        adjusted,
        average,
        output,
    })
}

/// `symmetrize_divisor` restricted to degree zero, the natural home of the
/// construction.
pub fn symmetrize_degree0(group: &AutGroup, d: &Divisor) -> Result<InvariantizationReport> {
    let deg = d.degree();
    if !deg.is_zero() {
        return Err(Error::DegreeNonzero(crate::rat::to_i64(&deg).ok_or_else(
            || Error::Internal("divisor degree exceeds machine range".into()),
        )?));
    }
    let report = symmetrize_divisor(group, d)?;
    if !report.output.degree().is_zero() {
        return Err(Error::Internal(
            "symmetrization changed the degree".into(),
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::{enumerate_aut, validate_group, Automorphism};
    use crate::curve::Point;
    use crate::fixtures;
    use crate::rat::{rat, rat_int};
    use crate::solver::is_equivalent;
    use num_traits::Zero;

    #[test]
    fn leaf_point_on_the_tripod_symmetrizes_to_the_center() {
        let star = fixtures::star(3);
        let group = enumerate_aut(&star).unwrap();
        let d = Divisor::single(&star, Point::on_edge("e1", rat_int(1)), rat_int(1)).unwrap();
        let report = symmetrize_divisor(&group, &d).unwrap();
        assert_eq!(
            report.output,
            Divisor::single(&star, Point::vertex("O"), rat_int(1)).unwrap()
        );
        for row in &report.constants {
            assert!(row.iter().all(Rat::is_zero));
        }
        assert!(report.psi.iter().all(Rat::is_zero));
        assert!(is_equivalent(&d, &report.output).unwrap().is_some());
        assert!(is_class_invariant(&group, &d).unwrap().is_some());
    }

    #[test]
    fn invariant_input_is_returned_unchanged() {
        let star = fixtures::star(3);
        let group = enumerate_aut(&star).unwrap();
        let d = Divisor::single(&star, Point::vertex("O"), rat_int(2)).unwrap();
        let report = symmetrize_divisor(&group, &d).unwrap();
        assert!(report.average.is_constant());
        assert_eq!(report.output, d);
    }

    #[test]
    fn asymmetric_circle_class_is_rejected_with_the_fractional_slope() {
        let circle = fixtures::circle(rat_int(1), rat_int(2));
        let refl = Automorphism::from_action(&circle, |p| {
            Ok(match circle.canonical_point(p).unwrap() {
                Point::Vertex(v) => {
                    Point::vertex(if v.0 == "A" { "B" } else { "A" })
                }
                Point::Edge { edge, offset } => {
                    let len = if edge.0 == "e1" { rat_int(1) } else { rat_int(2) };
                    Point::Edge { edge, offset: len - offset }
                }
            })
        })
        .unwrap();
        let group =
            validate_group(&circle, &[Automorphism::identity(&circle), refl]).unwrap();
        let d = Divisor::single(&circle, Point::vertex("A"), rat_int(1)).unwrap();
        assert!(is_class_invariant(&group, &d).unwrap().is_none());
        match symmetrize_divisor(&group, &d) {
            Err(Error::NotInvariantClass { element, edge, slope }) => {
                assert_eq!(element, 1);
                assert_eq!(edge, "e1");
                assert_eq!(slope, "2/3");
            }
            other => panic!("expected a class invariance failure, got {other:?}"),
        }
    }

    #[test]
    fn degree_zero_pipeline_on_the_segment() {
        let seg = fixtures::segment();
        let swap = Automorphism::from_action(&seg, |p| {
            Ok(match seg.canonical_point(p).unwrap() {
                Point::Vertex(v) => Point::Vertex(match v.0.as_str() {
                    "I1" => "I2".into(),
                    "I2" => "I1".into(),
                    m => m.into(),
                }),
                Point::Edge { edge, offset } => Point::Edge {
                    edge: if edge.0 == "e1" { "e2".into() } else { "e1".into() },
                    offset,
                },
            })
        })
        .unwrap();
        let group = validate_group(&seg, &[Automorphism::identity(&seg), swap]).unwrap();
        let p = Point::on_edge("e1", rat_int(1));
        let gp = Point::on_edge("e2", rat_int(1));
        let d = Divisor::new(&seg, vec![(p.clone(), rat_int(1)), (gp.clone(), rat_int(-1))])
            .unwrap();
        let report = symmetrize_degree0(&group, &d).unwrap();
        let expected = Divisor::new(
            &seg,
            vec![
                (Point::vertex("M"), rat_int(2)),
                (p, rat_int(-1)),
                (gp, rat_int(-1)),
            ],
        )
        .unwrap();
        assert_eq!(report.output, expected);
        assert!(is_equivalent(&d, &report.output).unwrap().is_some());

        let bad = Divisor::single(&seg, Point::vertex("M"), rat_int(1)).unwrap();
        assert!(matches!(
            symmetrize_degree0(&group, &bad),
            Err(Error::DegreeNonzero(1))
        ));
    }

    #[test]
    fn fractional_offsets_stay_exact() {
        let star = fixtures::star(3);
        let group = enumerate_aut(&star).unwrap();
        let d = Divisor::new(
            &star,
            vec![
                (Point::on_edge("e2", rat(7, 3)), rat_int(1)),
                (Point::vertex("O"), rat_int(1)),
            ],
        )
        .unwrap();
        let report = symmetrize_divisor(&group, &d).unwrap();
        for i in 0..group.order() {
            assert_eq!(
                act_on_divisor(group.element(i), &report.output).unwrap(),
                report.output
            );
        }
        assert!(is_equivalent(&d, &report.output).unwrap().is_some());
        assert_eq!(report.output.degree(), rat_int(2));
    }
}
