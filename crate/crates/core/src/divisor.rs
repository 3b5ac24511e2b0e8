//! Divisors: finite formal sums of points with rational coefficients.
//!
//! Coefficients are rational rather than integral because pointwise slopes of
//! rational-slope functions produce rational orders, and averaging over a
//! group leaves ℚ-coefficients even when the input is integral. Integrality
//! is a property ([`Divisor::is_integral`]) callers demand where they need it.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::automorphism::Automorphism;
use crate::curve::{same_curve, Curve, Point};
use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Debug)]
pub struct Divisor {
    curve: Arc<Curve>,
    /// Canonical points to nonzero coefficients.
    coeffs: BTreeMap<Point, Rat>,
}

impl PartialEq for Divisor {
    fn eq(&self, other: &Self) -> bool {
        same_curve(&self.curve, &other.curve) && self.coeffs == other.coeffs
    }
}
impl Eq for Divisor {}

impl Divisor {
    pub fn zero(curve: &Arc<Curve>) -> Self {
        Divisor {
            curve: Arc::clone(curve),
            coeffs: BTreeMap::new(),
        }
    }

    /// Sum the given terms, canonicalizing points and dropping zeros.
    pub fn new(curve: &Arc<Curve>, terms: Vec<(Point, Rat)>) -> Result<Self> {
        let mut coeffs: BTreeMap<Point, Rat> = BTreeMap::new();
        for (p, c) in terms {
            let p = curve.canonical_point(&p)?;
            let entry = coeffs.entry(p).or_insert_with(Rat::zero);
            *entry += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(Divisor {
            curve: Arc::clone(curve),
            coeffs,
        })
    }

    pub fn single(curve: &Arc<Curve>, point: Point, coeff: Rat) -> Result<Self> {
        Divisor::new(curve, vec![(point, coeff)])
    }

    pub fn curve(&self) -> &Arc<Curve> {
        &self.curve
    }

    pub fn coeff(&self, p: &Point) -> Result<Rat> {
        let p = self.curve.canonical_point(p)?;
        Ok(self.coeffs.get(&p).cloned().unwrap_or_else(Rat::zero))
    }

    /// Points with nonzero coefficient, in canonical order.
    pub fn support(&self) -> impl Iterator<Item = &Point> {
        self.coeffs.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, &Rat)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Rat {
        self.coeffs.values().fold(Rat::zero(), |a, c| a + c)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(crate::rat::is_integer)
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|c| *c >= Rat::zero())
    }

    fn check_base(&self, other: &Divisor) -> Result<()> {
        if same_curve(&self.curve, &other.curve) {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }

    pub fn plus(&self, other: &Divisor) -> Result<Divisor> {
        self.check_base(other)?;
        let mut coeffs = self.coeffs.clone();
        for (p, c) in &other.coeffs {
            let entry = coeffs.entry(p.clone()).or_insert_with(Rat::zero);
            *entry += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(Divisor {
            curve: Arc::clone(&self.curve),
            coeffs,
        })
    }

    pub fn minus(&self, other: &Divisor) -> Result<Divisor> {
        self.plus(&other.neg())
    }

    pub fn neg(&self) -> Divisor {
        Divisor {
            curve: Arc::clone(&self.curve),
            coeffs: self.coeffs.iter().map(|(p, c)| (p.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, r: &Rat) -> Divisor {
        if r.is_zero() {
            return Divisor::zero(&self.curve);
        }
        Divisor {
            curve: Arc::clone(&self.curve),
            coeffs: self.coeffs.iter().map(|(p, c)| (p.clone(), c * r)).collect(),
        }
    }

    /// The same divisor in the coordinates of a refinement of its curve.
    pub fn on_refined(&self, r: &crate::refine::Refinement) -> Result<Divisor> {
        if !same_curve(&self.curve, r.base()) {
            return Err(Error::BaseMismatch);
        }
        let terms = self
            .coeffs
            .iter()
            .map(|(p, c)| Ok((r.to_refined(p)?, c.clone())))
            .collect::<Result<Vec<_>>>()?;
        Divisor::new(r.refined(), terms)
    }

    /// The same divisor in base coordinates, given it lives on `r.refined()`.
    pub fn to_base(&self, r: &crate::refine::Refinement) -> Result<Divisor> {
        if !same_curve(&self.curve, r.refined()) {
            return Err(Error::BaseMismatch);
        }
        let terms = self
            .coeffs
            .iter()
            .map(|(p, c)| Ok((r.to_base(p)?, c.clone())))
            .collect::<Result<Vec<_>>>()?;
        Divisor::new(r.base(), terms)
    }
}

/// Pushforward of a divisor along a symmetry: `g · Σ a_P (P) = Σ a_P (gP)`.
/// A left action compatible with `div`: `act_on_divisor(g, div f)` equals
/// `div(pullback(g, f))`.
pub fn act_on_divisor(g: &Automorphism, d: &Divisor) -> Result<Divisor> {
    if !same_curve(d.curve(), g.base()) {
        return Err(Error::BaseMismatch);
    }
    let terms = d
        .coeffs
        .iter()
        .map(|(p, c)| Ok((g.act_on_point(p)?, c.clone())))
        .collect::<Result<Vec<_>>>()?;
    Divisor::new(d.curve(), terms)
}

impl std::fmt::Display for Divisor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}({})", crate::rat::fmt_rat(c), p)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rat::{rat, rat_int};

    #[test]
    fn construction_canonicalizes_and_merges() {
        let c = fixtures::circle(rat_int(1), rat_int(2));
        // offset 0 on e1 is the vertex A; terms at the same point merge
        let d = Divisor::new(
            &c,
            vec![
                (Point::on_edge("e1", rat_int(0)), rat_int(2)),
                (Point::vertex("A"), rat_int(-1)),
                (Point::on_edge("e2", rat(1, 2)), rat_int(3)),
            ],
        )
        .unwrap();
        assert_eq!(d.coeff(&Point::vertex("A")).unwrap(), rat_int(1));
        assert_eq!(d.degree(), rat_int(4));
        assert_eq!(d.support().count(), 2);

        // cancelling terms vanish from the support
        let e = Divisor::new(
            &c,
            vec![
                (Point::vertex("B"), rat_int(1)),
                (Point::on_edge("e1", rat_int(1)), rat_int(-1)),
            ],
        )
        .unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn arithmetic() {
        let c = fixtures::star(3);
        let p = Point::on_edge("e1", rat_int(2));
        let d1 = Divisor::single(&c, Point::vertex("O"), rat_int(1)).unwrap();
        let d2 = Divisor::single(&c, p.clone(), rat_int(2)).unwrap();
        let s = d1.plus(&d2).unwrap();
        assert_eq!(s.degree(), rat_int(3));
        assert_eq!(s.minus(&d2).unwrap(), d1);
        assert_eq!(d1.minus(&d1).unwrap(), Divisor::zero(&c));
        assert!(s.is_effective());
        assert!(!d1.minus(&d2).unwrap().is_effective());
        let half = d2.scale(&rat(1, 2));
        assert_eq!(half.coeff(&p).unwrap(), rat_int(1));
        assert!(half.is_integral());
        assert!(!d2.scale(&rat(1, 3)).is_integral());
    }

    #[test]
    fn mixing_curves_is_an_error() {
        let a = fixtures::star(3);
        let b = fixtures::segment();
        let da = Divisor::single(&a, Point::vertex("O"), rat_int(1)).unwrap();
        let db = Divisor::single(&b, Point::vertex("M"), rat_int(1)).unwrap();
        assert!(matches!(da.plus(&db), Err(Error::BaseMismatch)));
    }

    #[test]
    fn refinement_round_trip() {
        let c = fixtures::star(3);
        let p = Point::on_edge("e1", rat_int(1));
        let q = Point::on_edge("e1", rat(5, 2));
        let d = Divisor::new(&c, vec![(p, rat_int(1)), (q, rat_int(-1))]).unwrap();
        let r = crate::refine::refine(&c, &[Point::on_edge("e1", rat_int(1))]).unwrap();
        let fine = d.on_refined(&r).unwrap();
        assert_eq!(fine.coeff(&Point::vertex("e1@1/1")).unwrap(), rat_int(1));
        assert_eq!(fine.to_base(&r).unwrap(), d);
    }
}
