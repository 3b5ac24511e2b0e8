//! Cocycles of a finite symmetry group with values in constants, rational
//! functions, and divisors, plus the explicit witnesses showing the relevant
//! cohomology vanishes.
//!
//! The 1-cocycle law is `phi(gh) = phi(g) + g·phi(h)` with the pullback
//! action on functions and the pushforward action on divisors; constants
//! carry the trivial action. Every cocycle type verifies its law on
//! construction: each witness formula silently misbehaves on non-cocycles,
//! so failing fast with the violated relation is the only sane contract.

use num_traits::Zero;

use crate::automorphism::AutGroup;
use crate::curve::same_curve;
use crate::divisor::{act_on_divisor, Divisor};
use crate::error::{Error, Result};
use crate::plfn::{pl_equal, pullback, PlFunction};
use crate::rat::{fmt_rat, rat, Rat};

fn check_len<T>(group: &AutGroup, values: &[T]) -> Result<()> {
    if values.len() != group.order() {
        return Err(Error::BadInput(format!(
            "expected one value per group element ({}), got {}",
            group.order(),
            values.len()
        )));
    }
    Ok(())
}

/// A 1-cocycle with values in the rational functions.
#[derive(Debug, Clone)]
pub struct Cocycle1F {
    group: AutGroup,
    values: Vec<PlFunction>,
}

impl Cocycle1F {
    /// Verify `phi(g_i g_j) = phi(g_i) + g_i phi(g_j)` on every pair.
    pub fn new(group: AutGroup, values: Vec<PlFunction>) -> Result<Cocycle1F> {
        check_len(&group, &values)?;
        for f in &values {
            if !same_curve(f.curve(), group.base()) {
                return Err(Error::BaseMismatch);
            }
        }
        let n = group.order();
        for i in 0..n {
            for j in 0..n {
                let expected = values[i].plus(&pullback(group.element(i), &values[j])?)?;
                if !pl_equal(&values[group.mul(i, j)], &expected)? {
                    return Err(Error::NotACocycle(format!(
                        "function relation fails at elements ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Cocycle1F { group, values })
    }

    pub fn group(&self) -> &AutGroup {
        &self.group
    }

    pub fn value(&self, i: usize) -> &PlFunction {
        &self.values[i]
    }

    pub fn values(&self) -> &[PlFunction] {
        &self.values
    }
}

/// A 2-cocycle with rational values and trivial action.
#[derive(Debug, Clone)]
pub struct Cocycle2R {
    group: AutGroup,
    values: Vec<Vec<Rat>>,
}

impl Cocycle2R {
    pub fn new(group: AutGroup, values: Vec<Vec<Rat>>) -> Result<Cocycle2R> {
        check_len(&group, &values)?;
        for row in &values {
            check_len(&group, row)?;
        }
        let n = group.order();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let lhs = &values[j][k] - &values[group.mul(i, j)][k]
                        + &values[i][group.mul(j, k)]
                        - &values[i][j];
                    if !lhs.is_zero() {
                        return Err(Error::NotACocycle(format!(
                            "constant relation fails at elements ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(Cocycle2R { group, values })
    }

    pub fn group(&self) -> &AutGroup {
        &self.group
    }

    pub fn value(&self, i: usize, j: usize) -> &Rat {
        &self.values[i][j]
    }
}

/// A 1-cocycle with values in divisors.
#[derive(Debug, Clone)]
pub struct Cocycle1D {
    group: AutGroup,
    values: Vec<Divisor>,
}

impl Cocycle1D {
    pub fn new(group: AutGroup, values: Vec<Divisor>) -> Result<Cocycle1D> {
        check_len(&group, &values)?;
        for d in &values {
            if !same_curve(d.curve(), group.base()) {
                return Err(Error::BaseMismatch);
            }
        }
        let n = group.order();
        for i in 0..n {
            for j in 0..n {
                let expected = values[i].plus(&act_on_divisor(group.element(i), &values[j])?)?;
                if values[group.mul(i, j)] != expected {
                    return Err(Error::NotACocycle(format!(
                        "divisor relation fails at elements ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Cocycle1D { group, values })
    }

    pub fn group(&self) -> &AutGroup {
        &self.group
    }

    pub fn value(&self, i: usize) -> &Divisor {
        &self.values[i]
    }

    pub fn values(&self) -> &[Divisor] {
        &self.values
    }
}

/// A 2-cocycle with values in rational-slope functions.
#[derive(Debug, Clone)]
pub struct Cocycle2F {
    group: AutGroup,
    values: Vec<Vec<PlFunction>>,
}

impl Cocycle2F {
    /// Values are forced into the rational-slope mode: the witness divides
    /// by the group order, which only exists there.
    pub fn new(group: AutGroup, values: Vec<Vec<PlFunction>>) -> Result<Cocycle2F> {
        check_len(&group, &values)?;
        for row in &values {
            check_len(&group, row)?;
            for f in row {
                if !same_curve(f.curve(), group.base()) {
                    return Err(Error::BaseMismatch);
                }
            }
        }
        let values: Vec<Vec<PlFunction>> = values
            .into_iter()
            .map(|row| row.into_iter().map(PlFunction::into_rational_mode).collect())
            .collect();
        let n = group.order();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let lhs = pullback(group.element(i), &values[j][k])?
                        .trop_div(&values[group.mul(i, j)][k])?
                        .plus(&values[i][group.mul(j, k)])?
                        .trop_div(&values[i][j])?;
                    if !pl_equal(&lhs, &PlFunction::zero(group.base()))? {
                        return Err(Error::NotACocycle(format!(
                            "function relation fails at elements ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(Cocycle2F { group, values })
    }

    pub fn group(&self) -> &AutGroup {
        &self.group
    }

    pub fn value(&self, i: usize, j: usize) -> &PlFunction {
        &self.values[i][j]
    }
}

/// Whether a constant family is a 1-cocycle. The action is trivial and the
/// group finite, so the only 1-cocycle is zero: any nonzero additive family
/// contradicts torsion via `ord(g) * phi(g) = phi(g^ord) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CocycleVerdict {
    IsCocycle,
    Violation(String),
}

pub fn check_real_1cocycle(group: &AutGroup, phi: &[Rat]) -> Result<CocycleVerdict> {
    check_len(group, phi)?;
    for (i, v) in phi.iter().enumerate() {
        if i != group.identity() && !v.is_zero() {
            let ord = group.element(i).order();
            return Ok(CocycleVerdict::Violation(format!(
                "element {i} has order {ord}, so additivity along its powers forces {ord} * {} to vanish",
                fmt_rat(v)
            )));
        }
    }
    let n = group.order();
    for i in 0..n {
        for j in 0..n {
            let sum = &phi[i] + &phi[j];
            if sum != phi[group.mul(i, j)] {
                return Ok(CocycleVerdict::Violation(format!(
                    "phi({i}) + phi({j}) = {} but phi of the composite is {}",
                    fmt_rat(&sum),
                    fmt_rat(&phi[group.mul(i, j)])
                )));
            }
        }
    }
    Ok(CocycleVerdict::IsCocycle)
}

/// The vanishing-H1 witness for function cocycles: the negated pointwise
/// maximum `f = -max_g phi(g)` satisfies `pullback(h, f) - f = phi(h)`.
pub fn h90_witness(phi: &Cocycle1F) -> Result<PlFunction> {
    let mut s = phi.values[0].clone();
    for f in &phi.values[1..] {
        s = s.trop_add(f)?;
    }
    let f = s.neg();
    for (i, v) in phi.values.iter().enumerate() {
        let delta = pullback(phi.group.element(i), &f)?.trop_div(&f)?;
        if !pl_equal(&delta, v)? {
            return Err(Error::Internal(format!(
                "tropical averaging failed the coboundary identity at element {i}"
            )));
        }
    }
    Ok(f)
}

/// The vanishing-H2 witness for constant cocycles: averaging
/// `psi(g) = (1/|G|) sum_h phi(g,h)` satisfies
/// `phi(g1,g2) = psi(g1) + psi(g2) - psi(g1 g2)`.
pub fn real_2cocycle_witness(phi: &Cocycle2R) -> Result<Vec<Rat>> {
    let n = phi.group.order();
    let scale = rat(1, n as i64);
    let psi: Vec<Rat> = (0..n)
        .map(|i| phi.values[i].iter().sum::<Rat>() * &scale)
        .collect();
    for i in 0..n {
        for j in 0..n {
            if &psi[i] + &psi[j] - &psi[phi.group.mul(i, j)] != phi.values[i][j] {
                return Err(Error::Internal(format!(
                    "averaging failed the coboundary identity at elements ({i}, {j})"
                )));
            }
        }
    }
    Ok(psi)
}

/// The vanishing-H1 witness for divisor cocycles. Each orbit is handled by
/// the coset transport formula: at the point `Q = hP` of the orbit of the
/// canonically smallest representative `P`, the witness coefficient is the
/// negated coefficient of `Q` in `phi(h)`, which is the same for every `h`
/// carrying `P` to `Q` (asserted; a failure means the input is no cocycle).
pub fn div_1cocycle_witness(phi: &Cocycle1D) -> Result<Divisor> {
    let group = &phi.group;
    let curve = group.base();
    let n = group.order();

    let mut seeds: std::collections::BTreeSet<crate::curve::Point> = std::collections::BTreeSet::new();
    for d in &phi.values {
        seeds.extend(d.support().cloned());
    }

    let mut assigned: std::collections::BTreeSet<crate::curve::Point> = std::collections::BTreeSet::new();
    let mut terms: Vec<(crate::curve::Point, Rat)> = Vec::new();
    for p in &seeds {
        if assigned.contains(p) {
            continue;
        }
        // the orbit of the seed, then the orbit's canonical representative
        let mut orbit: std::collections::BTreeSet<crate::curve::Point> = std::collections::BTreeSet::new();
        for i in 0..n {
            orbit.insert(group.element(i).act_on_point(p)?);
        }
        let rep = orbit.iter().next().expect("orbits are nonempty").clone();
        for q in &orbit {
            assigned.insert(q.clone());
            let mut coeff: Option<Rat> = None;
            for i in 0..n {
                if group.element(i).act_on_point(&rep)? != *q {
                    continue;
                }
                let a = phi.values[i].coeff(q)?;
                match &coeff {
                    None => coeff = Some(a),
                    Some(c) if *c != a => {
                        return Err(Error::WellDefinednessViolation(format!(
                            "two transports of {rep} to {q} disagree: {} vs {}",
                            fmt_rat(c),
                            fmt_rat(&a)
                        )))
                    }
                    Some(_) => {}
                }
            }
            let coeff = coeff.expect("the orbit of rep covers q");
            if !coeff.is_zero() {
                terms.push((q.clone(), -coeff));
            }
        }
    }
    let e = Divisor::new(curve, terms)?;
    for i in 0..n {
        let delta = act_on_divisor(group.element(i), &e)?.minus(&e)?;
        if delta != phi.values[i] {
            return Err(Error::Internal(format!(
                "orbit transport failed the coboundary identity at element {i}"
            )));
        }
    }
    Ok(e)
}

/// The vanishing-H2 witness for rational-slope function cocycles: the same
/// averaging as for constants, using that |G|-th parts exist in this mode;
/// satisfies `phi(g1,g2) = psi(g1) + g1 psi(g2) - psi(g1 g2)`.
pub fn mq_2cocycle_witness(phi: &Cocycle2F) -> Result<Vec<PlFunction>> {
    let group = &phi.group;
    let n = group.order();
    let scale = rat(1, n as i64);
    let mut psi: Vec<PlFunction> = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = phi.values[i][0].clone();
        for f in &phi.values[i][1..] {
            s = s.plus(f)?;
        }
        psi.push(s.trop_scale(&scale)?);
    }
    for i in 0..n {
        for j in 0..n {
            let expected = psi[i]
                .plus(&pullback(group.element(i), &psi[j])?)?
                .trop_div(&psi[group.mul(i, j)])?;
            if !pl_equal(&expected, &phi.values[i][j])? {
                return Err(Error::Internal(format!(
                    "averaging failed the coboundary identity at elements ({i}, {j})"
                )));
            }
        }
    }
    Ok(psi)
}

// ---------------------------------------------------------------------------
// Coboundaries
// ---------------------------------------------------------------------------

/// The coboundary `phi(g) = pullback(g, f) - f`, verified on construction.
pub fn coboundary_1f(group: &AutGroup, f: &PlFunction) -> Result<Cocycle1F> {
    let values = group
        .elements()
        .iter()
        .map(|g| pullback(g, f)?.trop_div(f))
        .collect::<Result<Vec<_>>>()?;
    Cocycle1F::new(group.clone(), values)
}

/// The coboundary `phi(g) = gE - E`.
pub fn coboundary_1d(group: &AutGroup, e: &Divisor) -> Result<Cocycle1D> {
    let values = group
        .elements()
        .iter()
        .map(|g| act_on_divisor(g, e)?.minus(e))
        .collect::<Result<Vec<_>>>()?;
    Cocycle1D::new(group.clone(), values)
}

/// The coboundary `phi(g1,g2) = psi(g1) + psi(g2) - psi(g1 g2)`.
pub fn coboundary_2r(group: &AutGroup, psi: &[Rat]) -> Result<Cocycle2R> {
    check_len(group, psi)?;
    let n = group.order();
    let values = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| &psi[i] + &psi[j] - &psi[group.mul(i, j)])
                .collect()
        })
        .collect();
    Cocycle2R::new(group.clone(), values)
}

/// The coboundary `phi(g1,g2) = psi(g1) + g1 psi(g2) - psi(g1 g2)`.
pub fn coboundary_2f(group: &AutGroup, psi: &[PlFunction]) -> Result<Cocycle2F> {
    check_len(group, psi)?;
    let n = group.order();
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(
                psi[i]
                    .plus(&pullback(group.element(i), &psi[j])?)?
                    .trop_div(&psi[group.mul(i, j)])?,
            );
        }
        values.push(row);
    }
    Cocycle2F::new(group.clone(), values)
}

// ---------------------------------------------------------------------------
// Coboundary tests
// ---------------------------------------------------------------------------

pub fn is_coboundary_1f(phi: &Cocycle1F, f: &PlFunction) -> Result<bool> {
    if !same_curve(f.curve(), phi.group.base()) {
        return Err(Error::BaseMismatch);
    }
    for (i, v) in phi.values.iter().enumerate() {
        let delta = pullback(phi.group.element(i), f)?.trop_div(f)?;
        if !pl_equal(&delta, v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_coboundary_1d(phi: &Cocycle1D, e: &Divisor) -> Result<bool> {
    if !same_curve(e.curve(), phi.group.base()) {
        return Err(Error::BaseMismatch);
    }
    for (i, v) in phi.values.iter().enumerate() {
        if act_on_divisor(phi.group.element(i), e)?.minus(e)? != *v {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_coboundary_2r(phi: &Cocycle2R, psi: &[Rat]) -> Result<bool> {
    check_len(&phi.group, psi)?;
    let n = phi.group.order();
    for i in 0..n {
        for j in 0..n {
            if &psi[i] + &psi[j] - &psi[phi.group.mul(i, j)] != phi.values[i][j] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn is_coboundary_2f(phi: &Cocycle2F, psi: &[PlFunction]) -> Result<bool> {
    check_len(&phi.group, psi)?;
    for f in psi {
        if !same_curve(f.curve(), phi.group.base()) {
            return Err(Error::BaseMismatch);
        }
    }
    let n = phi.group.order();
    for i in 0..n {
        for j in 0..n {
            let expected = psi[i]
                .plus(&pullback(phi.group.element(i), &psi[j])?)?
                .trop_div(&psi[phi.group.mul(i, j)])?;
            if !pl_equal(&expected, &phi.values[i][j])? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
