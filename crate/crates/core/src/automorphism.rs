//! Isometries of a curve, stored simplicially, and their finite groups.
//!
//! An automorphism carries a refinement of the base curve together with a
//! vertex bijection and an oriented edge bijection of the refined curve. The
//! refinement is part of the data, not a detail: a 2-valent vertex may land
//! in the interior of an edge (a circle rotation, say), and only after
//! cutting at the orbit of the vertex set does the map become simplicial.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::Zero;

use crate::curve::{same_curve, Curve, EdgeLength, Point};
use crate::error::{Error, Result};
use crate::rat::{rat, rat_int, Rat};
use crate::refine::{minimal_model, refine, Refinement};

/// Orbit-closure budget for maps given as raw point functions. A genuine
/// finite-order isometry of our curves stabilizes far below this; a
/// translation along an end drifts forever and is cut off here.
const ORBIT_CAP: usize = 20_000;

#[derive(Debug, Clone)]
pub struct Automorphism {
    refinement: Arc<Refinement>,
    /// refined vertex index -> image vertex index
    vmap: Vec<usize>,
    /// refined edge index -> (image edge index, reversed)
    emap: Vec<(usize, bool)>,
}

impl Automorphism {
    /// The identity map, on the trivial refinement.
    pub fn identity(curve: &Arc<Curve>) -> Automorphism {
        let r = refine(curve, &[]).expect("the trivial refinement always exists");
        Automorphism {
            vmap: (0..r.refined().vertices().len()).collect(),
            emap: (0..r.refined().edges().len()).map(|e| (e, false)).collect(),
            refinement: Arc::new(r),
        }
    }

    /// Assemble from explicit maps on a refinement, checking every invariant:
    /// bijectivity, incidence, kinds, lengths, multiplicities, and that
    /// nothing reverses an edge running to infinity.
    pub fn from_parts(
        refinement: Arc<Refinement>,
        vmap: Vec<usize>,
        emap: Vec<(usize, bool)>,
    ) -> Result<Automorphism> {
        let fine = refinement.refined();
        let nv = fine.vertices().len();
        let ne = fine.edges().len();
        if vmap.len() != nv || emap.len() != ne {
            return Err(Error::NotAutomorphism(
                "map sizes do not match the refined curve".into(),
            ));
        }
        let mut vseen = vec![false; nv];
        for (i, &j) in vmap.iter().enumerate() {
            if j >= nv || vseen[j] {
                return Err(Error::NotAutomorphism(
                    "vertex map is not a bijection".into(),
                ));
            }
            vseen[j] = true;
            if fine.vertex(i).infinite != fine.vertex(j).infinite {
                return Err(Error::NotAutomorphism(format!(
                    "vertex `{}` changes kind",
                    fine.vertex(i).id
                )));
            }
        }
        let mut eseen = vec![false; ne];
        for (i, &(j, rev)) in emap.iter().enumerate() {
            if j >= ne || eseen[j] {
                return Err(Error::NotAutomorphism("edge map is not a bijection".into()));
            }
            eseen[j] = true;
            let e = fine.edge(i);
            let t = fine.edge(j);
            if e.length != t.length {
                return Err(Error::NotAutomorphism(format!(
                    "edge `{}` changes length",
                    e.id
                )));
            }
            if e.multiplicity != t.multiplicity {
                return Err(Error::NotAutomorphism(format!(
                    "edge `{}` changes multiplicity",
                    e.id
                )));
            }
            if !e.length.is_finite() && rev {
                return Err(Error::NotAutomorphism(format!(
                    "edge `{}` runs to infinity and cannot reverse",
                    e.id
                )));
            }
            let (ta, tb) = if rev {
                (t.ends[1], t.ends[0])
            } else {
                (t.ends[0], t.ends[1])
            };
            if vmap[e.ends[0]] != ta || vmap[e.ends[1]] != tb {
                return Err(Error::NotAutomorphism(format!(
                    "edge `{}` is not carried onto `{}` compatibly with the vertex map",
                    e.id, t.id
                )));
            }
        }
        Ok(Automorphism {
            refinement,
            vmap,
            emap,
        })
    }

    /// Build from an arbitrary point map by closing the vertex set under the
    /// action, refining there, and reading the simplicial maps off probe
    /// points. The map must be an isometry; anything else is rejected.
    pub fn from_action<F>(curve: &Arc<Curve>, action: F) -> Result<Automorphism>
    where
        F: Fn(&Point) -> Result<Point>,
    {
        from_action_capped(curve, &action, ORBIT_CAP, &|| Error::InfiniteOrderComposition)
    }

    pub fn base(&self) -> &Arc<Curve> {
        self.refinement.base()
    }

    pub fn refinement(&self) -> &Arc<Refinement> {
        &self.refinement
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vmap
    }

    pub fn edge_map(&self) -> &[(usize, bool)] {
        &self.emap
    }

    fn map_refined(&self, p: &Point) -> Result<Point> {
        let fine = self.refinement.refined();
        match fine.canonical_point(p)? {
            Point::Vertex(v) => {
                let vi = fine.vertex_index(&v)?;
                Ok(Point::Vertex(fine.vertex(self.vmap[vi]).id.clone()))
            }
            Point::Edge { edge, offset } => {
                let ei = fine.edge_index(&edge)?;
                let (ej, rev) = self.emap[ei];
                let off = if rev {
                    let l = fine
                        .edge(ei)
                        .length
                        .as_finite()
                        .expect("only finite edges reverse");
                    l - &offset
                } else {
                    offset
                };
                Ok(Point::Edge {
                    edge: fine.edge(ej).id.clone(),
                    offset: off,
                })
            }
        }
    }

    /// Image of a base point.
    pub fn act_on_point(&self, p: &Point) -> Result<Point> {
        let q = self.refinement.to_refined(p)?;
        self.refinement.to_base(&self.map_refined(&q)?)
    }

    pub fn is_identity(&self) -> bool {
        self.vmap.iter().enumerate().all(|(i, &j)| i == j)
            && self.emap.iter().enumerate().all(|(i, &(j, r))| i == j && !r)
    }

    /// `g.compose(&h)` is the map `p -> g(h(p))`.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        if !same_curve(self.base(), other.base()) {
            return Err(Error::BaseMismatch);
        }
        if self.refinement.same_cuts(&other.refinement) {
            let vmap = other.vmap.iter().map(|&v| self.vmap[v]).collect();
            let emap = other
                .emap
                .iter()
                .map(|&(e, r)| {
                    let (e2, r2) = self.emap[e];
                    (e2, r ^ r2)
                })
                .collect();
            return Ok(Automorphism {
                refinement: Arc::clone(&self.refinement),
                vmap,
                emap,
            });
        }
        // Different refinements: the composite may fail to stabilize any
        // finite cut set (two reflections of a line compose to a translation),
        // so test the ends for drift before closing an orbit.
        let action = |p: &Point| self.act_on_point(&other.act_on_point(p)?);
        self.check_end_drift(other, &action)?;
        from_action_capped(self.base(), &action, ORBIT_CAP, &|| {
            Error::Internal("a drift-free composition overran the orbit budget".into())
        })
    }

    /// Far out on every infinite edge both factors act rigidly, so the
    /// composite shifts each end by a constant. A cycle of ends with nonzero
    /// net shift is a translation: the composite has infinite order.
    fn check_end_drift<F>(&self, other: &Automorphism, action: &F) -> Result<()>
    where
        F: Fn(&Point) -> Result<Point>,
    {
        let base = self.base();
        let inf: Vec<usize> = (0..base.edges().len())
            .filter(|&ei| !base.edge(ei).length.is_finite())
            .collect();
        if inf.is_empty() {
            return Ok(());
        }
        let mut t0 = rat_int(2);
        for r in [&self.refinement, &other.refinement] {
            for &ei in &inf {
                if let Some(last) = r.cuts(ei).last() {
                    t0 += last;
                }
            }
        }
        let mut sigma: BTreeMap<usize, (usize, Rat)> = BTreeMap::new();
        for &ei in &inf {
            let at = |off: Rat| -> Result<Point> {
                action(&Point::Edge {
                    edge: base.edge(ei).id.clone(),
                    offset: off,
                })
            };
            match (at(t0.clone())?, at(&t0 + rat_int(1))?) {
                (
                    Point::Edge { edge: f1, offset: u1 },
                    Point::Edge { edge: f2, offset: u2 },
                ) if f1 == f2 && &u2 - &u1 == rat_int(1) => {
                    let fi = base.edge_index(&f1)?;
                    if base.edge(fi).length.is_finite() {
                        return Err(Error::Internal(
                            "a tail probe of a composition left the ends".into(),
                        ));
                    }
                    sigma.insert(ei, (fi, &u1 - &t0));
                }
                _ => {
                    return Err(Error::Internal(
                        "tail probes of a composition are not rigid".into(),
                    ))
                }
            }
        }
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        for &start in &inf {
            if seen.contains(&start) {
                continue;
            }
            let mut i = start;
            let mut total = Rat::zero();
            loop {
                seen.insert(i);
                let (j, s) = &sigma[&i];
                total += s;
                i = *j;
                if i == start {
                    break;
                }
                if seen.contains(&i) {
                    return Err(Error::Internal("the end map is not a permutation".into()));
                }
            }
            if !total.is_zero() {
                return Err(Error::InfiniteOrderComposition);
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Automorphism {
        let mut vmap = vec![0usize; self.vmap.len()];
        for (i, &j) in self.vmap.iter().enumerate() {
            vmap[j] = i;
        }
        let mut emap = vec![(0usize, false); self.emap.len()];
        for (i, &(j, rev)) in self.emap.iter().enumerate() {
            emap[j] = (i, rev);
        }
        Automorphism {
            refinement: Arc::clone(&self.refinement),
            vmap,
            emap,
        }
    }

    /// Order of the map in the automorphism group: the lcm of its cycle
    /// lengths, with an edge cycle doubled when its net orientation flips.
    pub fn order(&self) -> u64 {
        let mut ord: u64 = 1;
        let mut seen = vec![false; self.vmap.len()];
        for s in 0..self.vmap.len() {
            if seen[s] {
                continue;
            }
            let (mut len, mut i) = (0u64, s);
            while !seen[i] {
                seen[i] = true;
                i = self.vmap[i];
                len += 1;
            }
            ord = num_integer::lcm(ord, len);
        }
        let mut seen = vec![false; self.emap.len()];
        for s in 0..self.emap.len() {
            if seen[s] {
                continue;
            }
            let (mut len, mut flip, mut i) = (0u64, false, s);
            while !seen[i] {
                seen[i] = true;
                let (j, r) = self.emap[i];
                flip ^= r;
                i = j;
                len += 1;
            }
            ord = num_integer::lcm(ord, if flip { 2 * len } else { len });
        }
        ord
    }

    /// Pointwise agreement, decided on finitely many probes of the union
    /// refinement: every refined vertex plus two interior points per refined
    /// edge. Two isometries that are simplicial away from these cuts and
    /// agree on all probes agree everywhere.
    fn agrees_with(&self, other: &Automorphism) -> bool {
        let mut cuts = self.refinement.cut_points();
        cuts.extend(other.refinement.cut_points());
        let r = refine(self.base(), &cuts).expect("cut points of a refinement are valid");
        let fine = r.refined();
        let same_at = |p: &Point| -> bool {
            match (self.act_on_point(p), other.act_on_point(p)) {
                (Ok(a), Ok(b)) => a == b,
                _ => false,
            }
        };
        for v in fine.vertices() {
            let p = r
                .to_base(&Point::Vertex(v.id.clone()))
                .expect("refined vertices have base points");
            if !same_at(&p) {
                return false;
            }
        }
        for e in fine.edges() {
            let offsets = match &e.length {
                EdgeLength::Finite(l) => [l * rat(1, 3), l * rat(1, 2)],
                EdgeLength::Infinite => [rat_int(1), rat_int(2)],
            };
            for off in offsets {
                let p = r
                    .to_base(&Point::Edge {
                        edge: e.id.clone(),
                        offset: off,
                    })
                    .expect("probe offsets are interior");
                if !same_at(&p) {
                    return false;
                }
            }
        }
        true
    }
}

impl PartialEq for Automorphism {
    fn eq(&self, other: &Self) -> bool {
        if !same_curve(self.base(), other.base()) {
            return false;
        }
        if self.refinement.same_cuts(&other.refinement) {
            return self.vmap == other.vmap && self.emap == other.emap;
        }
        self.agrees_with(other)
    }
}

impl Eq for Automorphism {}

fn from_action_capped(
    curve: &Arc<Curve>,
    action: &dyn Fn(&Point) -> Result<Point>,
    cap: usize,
    overflow: &dyn Fn() -> Error,
) -> Result<Automorphism> {
    let mut pts: BTreeSet<Point> = curve
        .vertices()
        .iter()
        .map(|v| Point::Vertex(v.id.clone()))
        .collect();
    let mut queue: Vec<Point> = pts.iter().cloned().collect();
    while let Some(p) = queue.pop() {
        let q = curve.canonical_point(&action(&p)?)?;
        if pts.insert(q.clone()) {
            if pts.len() > cap {
                return Err(overflow());
            }
            queue.push(q);
        }
    }
    let cut_list: Vec<Point> = pts.into_iter().collect();
    let r = Arc::new(refine(curve, &cut_list)?);
    simplicialize(&r, &|p| action(p))
}

/// Read the simplicial maps of `action` off the given refinement. The
/// refinement's vertex set must be carried into itself; each refined edge
/// image is pinned by one interior probe and confirmed by a second.
fn simplicialize(
    refinement: &Arc<Refinement>,
    action: &dyn Fn(&Point) -> Result<Point>,
) -> Result<Automorphism> {
    let fine = refinement.refined();
    let nv = fine.vertices().len();
    let mut vmap = vec![0usize; nv];
    for (vi, slot) in vmap.iter_mut().enumerate() {
        let img = action(refinement.vertex_point(vi))?;
        match refinement.to_refined(&img)? {
            Point::Vertex(w) => *slot = fine.vertex_index(&w)?,
            Point::Edge { edge, .. } => {
                return Err(Error::NotAutomorphism(format!(
                    "vertex `{}` maps into the interior of `{}`; the refinement does not cover the action",
                    fine.vertex(vi).id, edge
                )));
            }
        }
    }

    let mut emap = vec![(0usize, false); fine.edges().len()];
    for (ei, e) in fine.edges().iter().enumerate() {
        let probe_off = match &e.length {
            EdgeLength::Finite(l) => l * rat(1, 3),
            EdgeLength::Infinite => rat_int(1),
        };
        let probe = refinement.to_base(&Point::Edge {
            edge: e.id.clone(),
            offset: probe_off.clone(),
        })?;
        let img = refinement.to_refined(&action(&probe)?)?;
        let (ti, off) = match img {
            Point::Edge { edge, offset } => (fine.edge_index(&edge)?, offset),
            Point::Vertex(w) => {
                return Err(Error::NotAutomorphism(format!(
                    "the interior of edge `{}` meets vertex `{}` under the map",
                    e.id, w
                )));
            }
        };
        let t = fine.edge(ti);
        let rev = match (&e.length, &t.length) {
            (EdgeLength::Infinite, EdgeLength::Infinite)
                if off == probe_off && vmap[e.ends[0]] == t.ends[0] =>
            {
                false
            }
            (EdgeLength::Finite(l), EdgeLength::Finite(l2)) if l == l2 => {
                if off == probe_off && vmap[e.ends[0]] == t.ends[0] && vmap[e.ends[1]] == t.ends[1]
                {
                    false
                } else if l2 - &off == probe_off
                    && vmap[e.ends[0]] == t.ends[1]
                    && vmap[e.ends[1]] == t.ends[0]
                {
                    true
                } else {
                    return Err(Error::NotAutomorphism(format!(
                        "edge `{}` is not carried isometrically onto `{}`",
                        e.id, t.id
                    )));
                }
            }
            _ => {
                return Err(Error::NotAutomorphism(format!(
                    "edge `{}` changes length",
                    e.id
                )));
            }
        };
        if e.multiplicity != t.multiplicity {
            return Err(Error::NotAutomorphism(format!(
                "edge `{}` changes multiplicity",
                e.id
            )));
        }
        emap[ei] = (ti, rev);
    }

    let a = Automorphism::from_parts(Arc::clone(refinement), vmap, emap)?;

    // confirm against the raw map at an independent interior point per edge
    for e in fine.edges() {
        let off = match &e.length {
            EdgeLength::Finite(l) => l * rat(1, 2),
            EdgeLength::Infinite => rat_int(2),
        };
        let p = refinement.to_base(&Point::Edge {
            edge: e.id.clone(),
            offset: off,
        })?;
        if a.base().canonical_point(&action(&p)?)? != a.act_on_point(&p)? {
            return Err(Error::NotAutomorphism(format!(
                "the point map is not an isometry along edge `{}`",
                e.id
            )));
        }
    }
    Ok(a)
}

// ---------------------------------------------------------------------------
// Groups
// ---------------------------------------------------------------------------

/// A finite group of automorphisms on one shared refinement: the identity
/// comes first, the rest follow in canonical (vertex map, edge map) order,
/// and composition is tabulated.
#[derive(Debug, Clone)]
pub struct AutGroup {
    base: Arc<Curve>,
    refinement: Arc<Refinement>,
    elements: Vec<Automorphism>,
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
}

impl AutGroup {
    pub fn base(&self) -> &Arc<Curve> {
        &self.base
    }

    /// The refinement all elements are expressed on.
    pub fn refinement(&self) -> &Arc<Refinement> {
        &self.refinement
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Automorphism] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Automorphism {
        &self.elements[i]
    }

    /// Index of `elements[i] ∘ elements[j]`.
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn inv(&self, i: usize) -> usize {
        self.inverses[i]
    }

    /// Index of the identity (always 0 by the canonical order).
    pub fn identity(&self) -> usize {
        0
    }
}

/// Check that `elements` really is a group of automorphisms of `curve`:
/// rebase everything onto one common refinement, reject duplicates, require
/// the identity, and tabulate composition. This is also the entry path for
/// finite subgroups of the infinite groups of circles and lines.
pub fn validate_group(curve: &Arc<Curve>, elements: &[Automorphism]) -> Result<AutGroup> {
    for g in elements {
        if !same_curve(curve, g.base()) {
            return Err(Error::BaseMismatch);
        }
    }
    if elements.is_empty() {
        return Err(Error::MissingIdentity);
    }
    let n = elements.len();

    // Stabilize the union of all cut sets under every element. A genuine
    // group settles after one growth pass, and no orbit exceeds the group
    // order, which bounds both loops.
    let mut pts: BTreeSet<Point> = curve
        .vertices()
        .iter()
        .map(|v| Point::Vertex(v.id.clone()))
        .collect();
    for g in elements {
        pts.extend(g.refinement().cut_points());
    }
    let size_cap = pts.len() * n;
    let mut stable = false;
    for _ in 0..=n {
        stable = true;
        let snapshot: Vec<Point> = pts.iter().cloned().collect();
        for g in elements {
            for p in &snapshot {
                if pts.insert(g.act_on_point(p)?) {
                    stable = false;
                }
            }
        }
        if pts.len() > size_cap {
            return Err(Error::NotClosed(format!(
                "stabilizing the cut set needs more than {size_cap} points"
            )));
        }
        if stable {
            break;
        }
    }
    if !stable {
        return Err(Error::NotClosed("the cut set does not stabilize".into()));
    }

    let cut_list: Vec<Point> = pts.into_iter().collect();
    let r = Arc::new(refine(curve, &cut_list)?);
    let mut rebased: Vec<Automorphism> = Vec::with_capacity(n);
    for g in elements {
        let h = simplicialize(&r, &|p| g.act_on_point(p))
            .map_err(|e| Error::Internal(format!("rebasing onto the common refinement: {e}")))?;
        rebased.push(h);
    }

    for i in 0..n {
        for j in (i + 1)..n {
            if rebased[i].vmap == rebased[j].vmap && rebased[i].emap == rebased[j].emap {
                return Err(Error::DuplicateElement(i, j));
            }
        }
    }
    if !rebased.iter().any(Automorphism::is_identity) {
        return Err(Error::MissingIdentity);
    }

    let mut order_idx: Vec<usize> = (0..n).collect();
    order_idx.sort_by(|&a, &b| {
        (&rebased[a].vmap, &rebased[a].emap).cmp(&(&rebased[b].vmap, &rebased[b].emap))
    });
    let elements: Vec<Automorphism> = order_idx.into_iter().map(|i| rebased[i].clone()).collect();
    if !elements[0].is_identity() {
        return Err(Error::Internal(
            "the identity is the lexicographic minimum, yet did not sort first".into(),
        ));
    }

    let index: BTreeMap<(Vec<usize>, Vec<(usize, bool)>), usize> = elements
        .iter()
        .enumerate()
        .map(|(i, g)| ((g.vmap.clone(), g.emap.clone()), i))
        .collect();
    let mut table = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            let c = elements[i].compose(&elements[j])?;
            table[i][j] = *index.get(&(c.vmap, c.emap)).ok_or_else(|| {
                Error::NotClosed(format!("the composite of elements {i} and {j} is missing"))
            })?;
        }
    }
    let mut inverses = vec![0usize; n];
    for i in 0..n {
        inverses[i] = (0..n).find(|&j| table[i][j] == 0).ok_or_else(|| {
            Error::Internal("a closed finite set of bijections contains inverses".into())
        })?;
    }

    Ok(AutGroup {
        base: Arc::clone(curve),
        refinement: r,
        elements,
        table,
        inverses,
    })
}

/// The full automorphism group, enumerated on the minimal model and carried
/// back to the curve. Circles and lines are rejected: their groups are
/// infinite, and finite subgroups must be supplied to `validate_group`
/// explicitly.
pub fn enumerate_aut(curve: &Arc<Curve>) -> Result<AutGroup> {
    let mm = minimal_model(curve)?;
    let k = mm.minimal();
    if k.is_circle() {
        return Err(Error::InfiniteAutGroup(
            "the curve is a circle; rotations by every arc length exist, so supply a finite subgroup to validate_group".into(),
        ));
    }
    let finite: Vec<usize> = (0..k.vertices().len())
        .filter(|&vi| !k.vertex(vi).infinite)
        .collect();
    if finite.len() == 1
        && k.vertex_valence(finite[0]) == 2
        && k.incident(finite[0])
            .iter()
            .all(|&(ei, _)| !k.edge(ei).length.is_finite())
    {
        return Err(Error::InfiniteAutGroup(
            "the curve is a line; translations exist, so supply a finite subgroup to validate_group".into(),
        ));
    }

    let symmetries = graph_automorphisms(k)?;
    let mut lifted = Vec::with_capacity(symmetries.len());
    for gk in &symmetries {
        let cap = curve.vertices().len() * gk.order() as usize + 1;
        let action = |p: &Point| mm.from_min(&gk.act_on_point(&mm.to_min(p)?)?);
        lifted.push(from_action_capped(curve, &action, cap, &|| {
            Error::Internal("lifting a minimal-model symmetry overran its orbit bound".into())
        })?);
    }
    validate_group(curve, &lifted).map_err(|e| match e {
        e @ (Error::InfiniteAutGroup(_) | Error::Internal(_)) => e,
        other => Error::Internal(format!("enumerated symmetries failed group checks: {other}")),
    })
}

type EdgeKey = (Option<Rat>, u64);

/// All simplicial self-maps of a minimal curve preserving lengths,
/// multiplicities and kinds: backtracking over vertex images filtered by
/// incidence signatures, then every edge matching within each parallel
/// class, with both orientations for every loop.
fn graph_automorphisms(k: &Arc<Curve>) -> Result<Vec<Automorphism>> {
    let nv = k.vertices().len();
    let ne = k.edges().len();
    let triv = Arc::new(refine(k, &[])?);

    let vsig: Vec<(bool, Vec<(EdgeKey, bool)>)> = (0..nv)
        .map(|vi| {
            let mut prof: Vec<(EdgeKey, bool)> = k
                .incident(vi)
                .iter()
                .map(|&(ei, _)| {
                    let e = k.edge(ei);
                    (
                        (e.length.as_finite().cloned(), e.multiplicity),
                        e.ends[0] == e.ends[1],
                    )
                })
                .collect();
            prof.sort();
            (k.vertex(vi).infinite, prof)
        })
        .collect();

    let mut classes: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (ei, e) in k.edges().iter().enumerate() {
        let key = (e.ends[0].min(e.ends[1]), e.ends[0].max(e.ends[1]));
        classes.entry(key).or_default().push(ei);
    }
    let profile = |eis: &[usize]| -> Vec<EdgeKey> {
        let mut v: Vec<EdgeKey> = eis
            .iter()
            .map(|&ei| {
                let e = k.edge(ei);
                (e.length.as_finite().cloned(), e.multiplicity)
            })
            .collect();
        v.sort();
        v
    };
    let pair_profiles: BTreeMap<(usize, usize), Vec<EdgeKey>> = classes
        .iter()
        .map(|(&key, eis)| (key, profile(eis)))
        .collect();

    fn extend_vertex(
        vi: usize,
        nv: usize,
        vsig: &[(bool, Vec<(EdgeKey, bool)>)],
        pair_profiles: &BTreeMap<(usize, usize), Vec<EdgeKey>>,
        img: &mut [usize],
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        if vi == nv {
            out.push(img.to_vec());
            return;
        }
        'cand: for wj in 0..nv {
            if used[wj] || vsig[vi] != vsig[wj] {
                continue;
            }
            for u in 0..=vi {
                let key = (u.min(vi), u.max(vi));
                let iu = if u == vi { wj } else { img[u] };
                let tkey = (iu.min(wj), iu.max(wj));
                if pair_profiles.get(&key) != pair_profiles.get(&tkey) {
                    continue 'cand;
                }
            }
            img[vi] = wj;
            used[wj] = true;
            extend_vertex(vi + 1, nv, vsig, pair_profiles, img, used, out);
            img[vi] = usize::MAX;
            used[wj] = false;
        }
    }

    let mut vmaps: Vec<Vec<usize>> = Vec::new();
    let mut img = vec![usize::MAX; nv];
    let mut used = vec![false; nv];
    extend_vertex(0, nv, &vsig, &pair_profiles, &mut img, &mut used, &mut vmaps);

    let mut out: Vec<Automorphism> = Vec::new();
    for vmap in &vmaps {
        let mut partials: Vec<Vec<(usize, bool)>> = vec![vec![(usize::MAX, false); ne]];
        for (&(a, b), eis) in &classes {
            let (ta, tb) = (vmap[a], vmap[b]);
            let tis = &classes[&(ta.min(tb), ta.max(tb))];
            let bucket = |list: &[usize]| -> BTreeMap<EdgeKey, Vec<usize>> {
                let mut m: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
                for &ei in list {
                    let e = k.edge(ei);
                    m.entry((e.length.as_finite().cloned(), e.multiplicity))
                        .or_default()
                        .push(ei);
                }
                m
            };
            let bsrc = bucket(eis);
            let btgt = bucket(tis);
            for (lm, src) in &bsrc {
                let tgt = &btgt[lm];
                let mut next: Vec<Vec<(usize, bool)>> = Vec::new();
                for perm in orderings(tgt.len()) {
                    let mut stems = partials.clone();
                    for (si, &ei) in src.iter().enumerate() {
                        let ti = tgt[perm[si]];
                        let e = k.edge(ei);
                        let t = k.edge(ti);
                        let options: Vec<(usize, bool)> = if e.ends[0] == e.ends[1] {
                            vec![(ti, false), (ti, true)]
                        } else {
                            vec![(ti, vmap[e.ends[0]] != t.ends[0])]
                        };
                        stems = stems
                            .into_iter()
                            .flat_map(|stem| {
                                options.iter().map(move |&o| {
                                    let mut s2 = stem.clone();
                                    s2[ei] = o;
                                    s2
                                })
                            })
                            .collect();
                    }
                    next.extend(stems);
                }
                partials = next;
            }
        }
        for emap in partials {
            let a = Automorphism::from_parts(Arc::clone(&triv), vmap.clone(), emap)
                .map_err(|e| Error::Internal(format!("an enumerated symmetry is invalid: {e}")))?;
            out.push(a);
        }
    }
    Ok(out)
}

fn orderings(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in orderings(n - 1) {
        for pos in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{EdgeSpec, VertexId};
    use crate::fixtures;
    use crate::rat::rat;

    fn leaf_image(g: &Automorphism, leaf: &str) -> String {
        match g.act_on_point(&Point::vertex(leaf)).unwrap() {
            Point::Vertex(VertexId(v)) => v,
            p => panic!("a leaf went to {p}"),
        }
    }

    fn find<'a>(group: &'a AutGroup, spec: &[(&str, &str)]) -> &'a Automorphism {
        group
            .elements()
            .iter()
            .find(|g| spec.iter().all(|(from, to)| leaf_image(g, from) == *to))
            .expect("no element realizes the leaf permutation")
    }

    #[test]
    fn tripod_group_is_the_symmetric_group() {
        let c = fixtures::star(3);
        let group = enumerate_aut(&c).unwrap();
        assert_eq!(group.order(), 6);
        assert!(group.element(0).is_identity());

        let s12 = find(&group, &[("I1", "I2"), ("I2", "I1"), ("I3", "I3")]);
        let s23 = find(&group, &[("I1", "I1"), ("I2", "I3"), ("I3", "I2")]);
        assert_eq!(s12.order(), 2);
        assert!(s12.compose(s12).unwrap().is_identity());

        // apply s23 first, then s12: the 3-cycle I1 -> I2 -> I3 -> I1
        let cycle = s12.compose(s23).unwrap();
        assert_eq!(leaf_image(&cycle, "I1"), "I2");
        assert_eq!(leaf_image(&cycle, "I2"), "I3");
        assert_eq!(leaf_image(&cycle, "I3"), "I1");
        assert_eq!(cycle.order(), 3);
        assert!(group.elements().iter().any(|g| g == &cycle));

        // the table agrees with direct composition
        let i12 = group.elements().iter().position(|g| g == s12).unwrap();
        let i23 = group.elements().iter().position(|g| g == s23).unwrap();
        assert_eq!(group.element(group.mul(i12, i23)), &cycle);
        assert_eq!(group.mul(i12, group.inv(i12)), group.identity());
    }

    #[test]
    fn enumerated_elements_preserve_distances() {
        let c = fixtures::star(4);
        let group = enumerate_aut(&c).unwrap();
        assert_eq!(group.order(), 24);
        let probes = [
            Point::vertex("O"),
            Point::on_edge("e1", rat(1, 2)),
            Point::on_edge("e2", rat_int(3)),
            Point::on_edge("e4", rat(7, 5)),
        ];
        for g in group.elements() {
            for p in &probes {
                for q in &probes {
                    let (gp, gq) = (g.act_on_point(p).unwrap(), g.act_on_point(q).unwrap());
                    assert_eq!(c.distance(p, q).unwrap(), c.distance(&gp, &gq).unwrap());
                }
            }
        }
    }

    #[test]
    fn parallel_arcs_give_order_four() {
        let c = fixtures::theta112();
        let group = enumerate_aut(&c).unwrap();
        assert_eq!(group.order(), 4);
        // the two length-1 arcs can swap; the length-2 arc can only reverse
        let mids: Vec<Point> = group
            .elements()
            .iter()
            .map(|g| g.act_on_point(&Point::on_edge("e3", rat_int(1))).unwrap())
            .collect();
        assert!(mids.iter().all(|p| *p == Point::on_edge("e3", rat_int(1))));
    }

    #[test]
    fn a_loop_reverses_in_place() {
        // one loop plus one leaf: only the loop orientation is free
        let c = Arc::new(
            crate::curve::Curve::new(
                vec![("O".into(), false), ("I1".into(), true)],
                vec![
                    EdgeSpec {
                        id: "l0".into(),
                        ends: ("O".into(), "O".into()),
                        length: EdgeLength::Finite(rat_int(1)),
                        multiplicity: 1,
                    },
                    EdgeSpec {
                        id: "e1".into(),
                        ends: ("O".into(), "I1".into()),
                        length: EdgeLength::Infinite,
                        multiplicity: 1,
                    },
                ],
            )
            .unwrap(),
        );
        let group = enumerate_aut(&c).unwrap();
        assert_eq!(group.order(), 2);
        let flip = group.element(1);
        assert_eq!(flip.order(), 2);
        assert_eq!(
            flip.act_on_point(&Point::on_edge("l0", rat(1, 4))).unwrap(),
            Point::on_edge("l0", rat(3, 4))
        );
    }

    #[test]
    fn circle_and_line_groups_are_infinite() {
        assert!(matches!(
            enumerate_aut(&fixtures::circle(rat_int(1), rat_int(2))),
            Err(Error::InfiniteAutGroup(_))
        ));
        assert!(matches!(
            enumerate_aut(&fixtures::segment()),
            Err(Error::InfiniteAutGroup(_))
        ));
    }

    #[test]
    fn marked_interior_points_do_not_shrink_the_group() {
        // a tripod with one leaf subdivided at distance 1: still S3, and the
        // extra vertex travels into the interiors of the other leaves
        let c = Arc::new(
            crate::curve::Curve::new(
                vec![
                    ("O".into(), false),
                    ("C".into(), false),
                    ("I1".into(), true),
                    ("I2".into(), true),
                    ("I3".into(), true),
                ],
                vec![
                    EdgeSpec {
                        id: "a".into(),
                        ends: ("O".into(), "C".into()),
                        length: EdgeLength::Finite(rat_int(1)),
                        multiplicity: 1,
                    },
                    EdgeSpec {
                        id: "a2".into(),
                        ends: ("C".into(), "I1".into()),
                        length: EdgeLength::Infinite,
                        multiplicity: 1,
                    },
                    EdgeSpec {
                        id: "e2".into(),
                        ends: ("O".into(), "I2".into()),
                        length: EdgeLength::Infinite,
                        multiplicity: 1,
                    },
                    EdgeSpec {
                        id: "e3".into(),
                        ends: ("O".into(), "I3".into()),
                        length: EdgeLength::Infinite,
                        multiplicity: 1,
                    },
                ],
            )
            .unwrap(),
        );
        let group = enumerate_aut(&c).unwrap();
        assert_eq!(group.order(), 6);
        let g = group
            .elements()
            .iter()
            .find(|g| leaf_image(g, "I1") == "I2")
            .unwrap();
        assert_eq!(
            g.act_on_point(&Point::vertex("C")).unwrap(),
            Point::on_edge("e2", rat_int(1))
        );
    }

    #[test]
    fn reflection_groups_validate_on_circles_and_lines() {
        // line: reflect at the midpoint vertex
        let seg = fixtures::segment();
        let refl = Automorphism::from_action(&seg, |p| {
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
        assert_eq!(refl.order(), 2);
        let group = validate_group(&seg, &[Automorphism::identity(&seg), refl.clone()]).unwrap();
        assert_eq!(group.order(), 2);
        assert_eq!(group.mul(1, 1), 0);
        assert_eq!(group.inv(1), 1);
        assert!(matches!(
            validate_group(&seg, &[refl]),
            Err(Error::MissingIdentity)
        ));

        // circle: reflect across the axis through both arc midpoints
        let circ = fixtures::circle(rat_int(1), rat_int(2));
        let refl = Automorphism::from_action(&circ, |p| {
            Ok(match circ.canonical_point(p).unwrap() {
                Point::Vertex(v) => {
                    Point::Vertex(if v.0 == "A" { "B".into() } else { "A".into() })
                }
                Point::Edge { edge, offset } => {
                    let l = if edge.0 == "e1" { rat_int(1) } else { rat_int(2) };
                    Point::Edge {
                        edge,
                        offset: l - offset,
                    }
                }
            })
        })
        .unwrap();
        assert_eq!(
            refl.act_on_point(&Point::on_edge("e1", rat(1, 2))).unwrap(),
            Point::on_edge("e1", rat(1, 2))
        );
        let group = validate_group(&circ, &[Automorphism::identity(&circ), refl]).unwrap();
        assert_eq!(group.order(), 2);
    }

    #[test]
    fn rotations_rebase_onto_a_shared_refinement() {
        // rotate the (1,2)-circle one unit forward: order 3, with a cut
        let circ = fixtures::circle(rat_int(1), rat_int(2));
        let rot = Automorphism::from_action(&circ, |p| {
            // arc position: A = 0, B = 1 across e1, back to A = 3 across e2;
            // both edge offsets are measured from A
            let pos = match circ.canonical_point(p).unwrap() {
                Point::Vertex(v) => {
                    if v.0 == "A" {
                        Rat::zero()
                    } else {
                        rat_int(1)
                    }
                }
                Point::Edge { edge, offset } => {
                    if edge.0 == "e1" {
                        offset
                    } else {
                        rat_int(3) - offset
                    }
                }
            };
            let pos = (pos + rat_int(1)) % rat_int(3);
            Ok(if pos.is_zero() {
                Point::vertex("A")
            } else if pos == rat_int(1) {
                Point::vertex("B")
            } else if pos < rat_int(1) {
                Point::on_edge("e1", pos)
            } else {
                Point::on_edge("e2", rat_int(3) - pos)
            })
        })
        .unwrap();
        assert_eq!(rot.order(), 3);
        let rot2 = rot.compose(&rot).unwrap();
        let back = rot2.compose(&rot).unwrap();
        assert!(back.is_identity());
        // equality across different refinements
        assert_eq!(back, Automorphism::identity(&circ));
        assert_eq!(rot.inverse(), rot2);

        let group =
            validate_group(&circ, &[Automorphism::identity(&circ), rot.clone(), rot2.clone()])
                .unwrap();
        assert_eq!(group.order(), 3);
        assert_eq!(group.mul(1, 1), 2);

        assert!(matches!(
            validate_group(&circ, &[Automorphism::identity(&circ), rot.clone()]),
            Err(Error::NotClosed(_))
        ));
        assert!(matches!(
            validate_group(
                &circ,
                &[Automorphism::identity(&circ), rot.clone(), rot2, rot.clone()]
            ),
            Err(Error::DuplicateElement(1, 3))
        ));
    }

    #[test]
    fn pullback_and_pushforward_are_compatible_left_actions() {
        use crate::divisor::{act_on_divisor, Divisor};
        use crate::plfn::{pl_equal, pullback, EdgeProfile, PlFunction, SlopeMode};

        let c = fixtures::star(3);
        let group = enumerate_aut(&c).unwrap();
        let s12 = find(&group, &[("I1", "I2"), ("I2", "I1"), ("I3", "I3")]);
        let s23 = find(&group, &[("I1", "I1"), ("I2", "I3"), ("I3", "I2")]);

        // ramp rising to 1 along the first leaf, flat elsewhere
        let ramp = |leaf: &str| {
            PlFunction::new(
                &c,
                SlopeMode::Integer,
                [("O".to_string(), Rat::zero())].into(),
                [(
                    leaf.to_string(),
                    EdgeProfile {
                        breaks: vec![(rat_int(1), rat_int(1))],
                        leaf_slope: Some(Rat::zero()),
                    },
                )]
                .into(),
            )
            .unwrap()
        };
        let f = ramp("e1");

        let moved = pullback(s12, &f).unwrap();
        assert!(pl_equal(&moved, &ramp("e2")).unwrap());
        assert_eq!(moved.eval(&Point::on_edge("e2", rat(1, 2))).unwrap(), rat(1, 2));
        assert!(pl_equal(&pullback(group.element(0), &f).unwrap(), &f).unwrap());

        let both = s12.compose(s23).unwrap();
        let stepwise = pullback(s12, &pullback(s23, &f).unwrap()).unwrap();
        assert!(pl_equal(&pullback(&both, &f).unwrap(), &stepwise).unwrap());

        // div intertwines the two actions
        assert_eq!(
            act_on_divisor(s12, &f.div().unwrap()).unwrap(),
            pullback(s12, &f).unwrap().div().unwrap()
        );

        let d = Divisor::new(
            &c,
            vec![
                (Point::on_edge("e1", rat(1, 2)), rat_int(2)),
                (Point::vertex("I3"), rat_int(-2)),
            ],
        )
        .unwrap();
        let gd = act_on_divisor(s12, &d).unwrap();
        assert_eq!(gd.coeff(&Point::on_edge("e2", rat(1, 2))).unwrap(), rat_int(2));
        assert_eq!(gd.degree(), d.degree());
    }

    #[test]
    fn line_reflections_compose_to_a_translation() {
        let seg = fixtures::segment();
        // reflect at M, and at the point two units toward I1
        let r1 = Automorphism::from_action(&seg, |p| {
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
        let r2 = Automorphism::from_action(&seg, |p| {
            // coordinates: e1 = [0, inf), e2 = (-inf, 0]; reflect at 2
            let x = match seg.canonical_point(p).unwrap() {
                Point::Vertex(v) => match v.0.as_str() {
                    "M" => Rat::zero(),
                    "I1" => return Ok(Point::vertex("I2")),
                    _ => return Ok(Point::vertex("I1")),
                },
                Point::Edge { edge, offset } => {
                    if edge.0 == "e1" {
                        offset
                    } else {
                        -offset
                    }
                }
            };
            let y = rat_int(4) - x;
            Ok(if y.is_zero() {
                Point::vertex("M")
            } else if y > Rat::zero() {
                Point::Edge {
                    edge: "e1".into(),
                    offset: y,
                }
            } else {
                Point::Edge {
                    edge: "e2".into(),
                    offset: -y,
                }
            })
        })
        .unwrap();
        assert_eq!(r2.order(), 2);
        assert!(matches!(
            r2.compose(&r1),
            Err(Error::InfiniteOrderComposition)
        ));
    }
}
