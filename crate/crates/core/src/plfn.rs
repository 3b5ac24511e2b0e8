//! Continuous piecewise-linear functions on a curve.
//!
//! A function is stored by its values at the finite vertices plus, per edge,
//! the interior breakpoints (offset, value). On an infinite edge the final
//! unbounded piece is recorded by its `leaf_slope`: the slope read in the
//! chart that parameterizes the curve *away from* the infinite point, so a
//! function climbing toward infinity has a negative leaf slope and
//! `ord` at the infinite point is `multiplicity * leaf_slope`.
//!
//! The representation is kept minimal: a stored breakpoint always has
//! different slopes on its two sides. That makes structural equality
//! coincide with pointwise equality (the declared slope mode is ignored).

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::curve::{Curve, EdgeLength, Point};
use crate::curve::same_curve;
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::rat::{fmt_rat, is_integer, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlopeMode {
    /// Slopes must be integers.
    Integer,
    /// Slopes may be arbitrary rationals.
    Rational,
}

impl SlopeMode {
    fn join(self, other: SlopeMode) -> SlopeMode {
        if self == SlopeMode::Integer && other == SlopeMode::Integer {
            SlopeMode::Integer
        } else {
            SlopeMode::Rational
        }
    }
}

/// Shape of a function along one edge.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EdgeProfile {
    /// Interior breakpoints as (offset, value), strictly increasing offsets.
    pub breaks: Vec<(Rat, Rat)>,
    /// Slope of the unbounded piece, away from the infinite point.
    /// `Some` exactly on infinite edges.
    pub leaf_slope: Option<Rat>,
}

#[derive(Clone, Debug)]
pub struct PlFunction {
    curve: Arc<Curve>,
    mode: SlopeMode,
    /// Indexed by vertex; entries at infinite vertices stay zero and unused.
    vertex_values: Vec<Rat>,
    /// Indexed by edge.
    profiles: Vec<EdgeProfile>,
}

impl PartialEq for PlFunction {
    /// Pointwise equality; the slope mode is bookkeeping, not data.
    fn eq(&self, other: &Self) -> bool {
        same_curve(&self.curve, &other.curve)
            && self.vertex_values == other.vertex_values
            && self.profiles == other.profiles
    }
}
impl Eq for PlFunction {}

impl PlFunction {
    pub fn constant(curve: &Arc<Curve>, value: Rat) -> Self {
        let profiles = curve
            .edges()
            .iter()
            .map(|e| EdgeProfile {
                breaks: Vec::new(),
                leaf_slope: if e.length.is_finite() {
                    None
                } else {
                    Some(Rat::zero())
                },
            })
            .collect();
        let vertex_values = curve
            .vertices()
            .iter()
            .map(|v| if v.infinite { Rat::zero() } else { value.clone() })
            .collect();
        PlFunction {
            curve: Arc::clone(curve),
            mode: SlopeMode::Integer,
            vertex_values,
            profiles,
        }
    }

    pub fn zero(curve: &Arc<Curve>) -> Self {
        PlFunction::constant(curve, Rat::zero())
    }

    /// Build a function from values at the finite vertices and per-edge
    /// profiles. Edges without a profile are linear (leaf slope 0).
    pub fn new(
        curve: &Arc<Curve>,
        mode: SlopeMode,
        values: BTreeMap<String, Rat>,
        profiles: BTreeMap<String, EdgeProfile>,
    ) -> Result<Self> {
        let mut vertex_values = vec![Rat::zero(); curve.vertices().len()];
        let mut seen = vec![false; curve.vertices().len()];
        for (id, v) in values {
            let vi = curve.vertex_index(&crate::curve::VertexId(id.clone()))?;
            if curve.vertex(vi).infinite {
                return Err(Error::BadInput(format!(
                    "value given at infinite point {id}; values live on finite vertices"
                )));
            }
            vertex_values[vi] = v;
            seen[vi] = true;
        }
        for (vi, v) in curve.vertices().iter().enumerate() {
            if !v.infinite && !seen[vi] {
                return Err(Error::BadInput(format!("missing value at vertex {}", v.id)));
            }
        }

        let mut edge_profiles: Vec<EdgeProfile> = curve
            .edges()
            .iter()
            .map(|e| EdgeProfile {
                breaks: Vec::new(),
                leaf_slope: if e.length.is_finite() {
                    None
                } else {
                    Some(Rat::zero())
                },
            })
            .collect();
        for (id, profile) in profiles {
            let ei = curve.edge_index(&crate::curve::EdgeId(id.clone()))?;
            let edge = curve.edge(ei);
            for w in profile.breaks.windows(2) {
                if w[0].0 >= w[1].0 {
                    return Err(Error::BadInput(format!(
                        "breakpoints on edge {id} must have strictly increasing offsets"
                    )));
                }
            }
            if let Some((t, _)) = profile.breaks.first() {
                if *t <= Rat::zero() {
                    return Err(Error::BadInput(format!(
                        "breakpoint offset on edge {id} must be positive"
                    )));
                }
            }
            if let (Some((t, _)), EdgeLength::Finite(l)) = (profile.breaks.last(), &edge.length) {
                if t >= l {
                    return Err(Error::BadInput(format!(
                        "breakpoint offset on edge {id} must stay below the edge length"
                    )));
                }
            }
            let leaf_slope = match (&edge.length, profile.leaf_slope) {
                (EdgeLength::Finite(_), None) => None,
                (EdgeLength::Finite(_), Some(_)) => {
                    return Err(Error::BadInput(format!(
                        "finite edge {id} cannot carry a leaf slope"
                    )))
                }
                (EdgeLength::Infinite, s) => Some(s.unwrap_or_else(Rat::zero)),
            };
            edge_profiles[ei] = EdgeProfile {
                breaks: profile.breaks,
                leaf_slope,
            };
        }

        let f = PlFunction {
            curve: Arc::clone(curve),
            mode,
            vertex_values,
            profiles: edge_profiles,
        };
        if mode == SlopeMode::Integer {
            for ei in 0..curve.edges().len() {
                for s in f.edge_slopes(ei) {
                    if !is_integer(&s) {
                        return Err(Error::NonIntegerSlope(format!(
                            "slope {} on edge `{}`",
                            fmt_rat(&s),
                            curve.edge(ei).id.0
                        )));
                    }
                }
            }
        }
        Ok(f.normalized())
    }

    pub fn curve(&self) -> &Arc<Curve> {
        &self.curve
    }

    pub fn mode(&self) -> SlopeMode {
        self.mode
    }

    pub fn profile(&self, ei: usize) -> &EdgeProfile {
        &self.profiles[ei]
    }

    pub fn vertex_value(&self, vi: usize) -> &Rat {
        &self.vertex_values[vi]
    }

    /// Nodes along an edge: (0, value at first end), the breakpoints, and on
    /// finite edges (length, value at second end).
    fn nodes(&self, ei: usize) -> Vec<(Rat, Rat)> {
        let e = self.curve.edge(ei);
        let mut out = Vec::with_capacity(self.profiles[ei].breaks.len() + 2);
        out.push((Rat::zero(), self.vertex_values[e.ends[0]].clone()));
        out.extend(self.profiles[ei].breaks.iter().cloned());
        if let EdgeLength::Finite(l) = &e.length {
            out.push((l.clone(), self.vertex_values[e.ends[1]].clone()));
        }
        out
    }

    /// All slopes along an edge in parameter direction, tail slope last on
    /// infinite edges (as the away-from-infinity leaf slope).
    fn edge_slopes(&self, ei: usize) -> Vec<Rat> {
        let nodes = self.nodes(ei);
        let mut out = Vec::new();
        for w in nodes.windows(2) {
            out.push((&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0));
        }
        if let Some(ls) = &self.profiles[ei].leaf_slope {
            out.push(ls.clone());
        }
        out
    }

    fn eval_on_edge(&self, ei: usize, t: &Rat) -> Rat {
        let nodes = self.nodes(ei);
        let tail = self.profiles[ei].leaf_slope.as_ref();
        // last node at or before t
        let k = nodes.partition_point(|(off, _)| off <= t);
        debug_assert!(k >= 1, "offsets are nonnegative");
        let (t0, w0) = &nodes[k - 1];
        if t0 == t {
            return w0.clone();
        }
        match nodes.get(k) {
            Some((t1, w1)) => w0 + (w1 - w0) * (t - t0) / (t1 - t0),
            None => {
                let ls = tail.expect("past the last node only on infinite edges");
                w0 - ls * (t - t0)
            }
        }
    }

    /// Evaluate at a point. Infinite points are outside the domain; the
    /// behaviour at infinity is captured by `ord_at` instead.
    pub fn eval(&self, p: &Point) -> Result<Rat> {
        match self.curve.canonical_point(p)? {
            Point::Vertex(v) => {
                let vi = self.curve.vertex_index(&v)?;
                if self.curve.vertex(vi).infinite {
                    return Err(Error::EvalAtInfinitePoint(v.0));
                }
                Ok(self.vertex_values[vi].clone())
            }
            Point::Edge { edge, offset } => {
                let ei = self.curve.edge_index(&edge)?;
                Ok(self.eval_on_edge(ei, &offset))
            }
        }
    }

    /// Outgoing slope into edge `ei` from its end in the given slot.
    fn outgoing_slope(&self, ei: usize, slot: u8) -> Rat {
        let nodes = self.nodes(ei);
        if slot == 0 {
            match nodes.get(1) {
                Some((t1, w1)) => (w1 - &nodes[0].1) / t1,
                None => {
                    // no breaks on an infinite edge: the tail starts at the vertex
                    -self.profiles[ei]
                        .leaf_slope
                        .clone()
                        .expect("finite edges have two endpoint nodes")
                }
            }
        } else {
            let n = nodes.len();
            let (t1, w1) = &nodes[n - 1];
            let (t0, w0) = &nodes[n - 2];
            (w0 - w1) / (t1 - t0)
        }
    }

    /// Order of vanishing at a point: the multiplicity-weighted sum of
    /// outgoing slopes there.
    pub fn ord_at(&self, p: &Point) -> Result<Rat> {
        match self.curve.canonical_point(p)? {
            Point::Vertex(v) => {
                let vi = self.curve.vertex_index(&v)?;
                if self.curve.vertex(vi).infinite {
                    let (ei, _) = self.curve.incident(vi)[0];
                    let m = rat_mult(self.curve.edge(ei).multiplicity);
                    let ls = self.profiles[ei].leaf_slope.as_ref().unwrap();
                    return Ok(m * ls);
                }
                let mut total = Rat::zero();
                for &(ei, slot) in self.curve.incident(vi) {
                    let m = rat_mult(self.curve.edge(ei).multiplicity);
                    total += m * self.outgoing_slope(ei, slot);
                }
                Ok(total)
            }
            Point::Edge { edge, offset } => {
                let ei = self.curve.edge_index(&edge)?;
                let profile = &self.profiles[ei];
                match profile.breaks.binary_search_by(|(t, _)| t.cmp(&offset)) {
                    Err(_) => Ok(Rat::zero()),
                    Ok(i) => {
                        let nodes = self.nodes(ei);
                        let k = i + 1; // position within the node list
                        let (t, w) = &nodes[k];
                        let (t0, w0) = &nodes[k - 1];
                        let left = (w0 - w) / (t - t0);
                        let right = match nodes.get(k + 1) {
                            Some((t1, w1)) => (w1 - w) / (t1 - t),
                            None => -profile.leaf_slope.clone().unwrap(),
                        };
                        let m = rat_mult(self.curve.edge(ei).multiplicity);
                        Ok(m * (left + right))
                    }
                }
            }
        }
    }

    /// The divisor of the function: `ord_at` summed over its support.
    pub fn div(&self) -> Result<Divisor> {
        let mut terms: Vec<(Point, Rat)> = Vec::new();
        for v in self.curve.vertices() {
            let p = Point::Vertex(v.id.clone());
            terms.push((p.clone(), self.ord_at(&p)?));
        }
        for (ei, profile) in self.profiles.iter().enumerate() {
            let id = &self.curve.edge(ei).id;
            for (t, _) in &profile.breaks {
                let p = Point::Edge {
                    edge: id.clone(),
                    offset: t.clone(),
                };
                terms.push((p.clone(), self.ord_at(&p)?));
            }
        }
        Divisor::new(&self.curve, terms)
    }

    pub fn is_constant(&self) -> bool {
        let all_flat = self.profiles.iter().all(|p| {
            p.breaks.is_empty() && p.leaf_slope.as_ref().map_or(true, |ls| ls.is_zero())
        });
        if !all_flat {
            return false;
        }
        let mut finite = self
            .curve
            .vertices()
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.infinite)
            .map(|(vi, _)| &self.vertex_values[vi]);
        match finite.next() {
            None => true,
            Some(first) => finite.all(|v| v == first),
        }
    }

    pub fn constant_value(&self) -> Option<&Rat> {
        if !self.is_constant() {
            return None;
        }
        self.curve
            .vertices()
            .iter()
            .enumerate()
            .find(|(_, v)| !v.infinite)
            .map(|(vi, _)| &self.vertex_values[vi])
    }

    /// Drop breakpoints whose two sides have equal slope.
    fn normalized(mut self) -> Self {
        for ei in 0..self.profiles.len() {
            if self.profiles[ei].breaks.is_empty() {
                continue;
            }
            let nodes = self.nodes(ei);
            let tail = self.profiles[ei].leaf_slope.clone();
            let last_fixed = if tail.is_some() {
                nodes.len() // every node from index 1 on is a removable break
            } else {
                nodes.len() - 1
            };
            let mut kept: Vec<(Rat, Rat)> = Vec::with_capacity(nodes.len());
            kept.push(nodes[0].clone());
            for (i, node) in nodes.iter().enumerate().skip(1) {
                if i >= last_fixed {
                    kept.push(node.clone());
                    continue;
                }
                let prev = kept.last().unwrap();
                let slope_in = (&node.1 - &prev.1) / (&node.0 - &prev.0);
                let slope_out = match nodes.get(i + 1) {
                    Some((t1, w1)) => (w1 - &node.1) / (t1 - &node.0),
                    None => -tail.clone().expect("interior node without successor"),
                };
                if slope_in != slope_out {
                    kept.push(node.clone());
                }
            }
            let last = if tail.is_some() { kept.len() } else { kept.len() - 1 };
            self.profiles[ei].breaks = kept[1..last].to_vec();
        }
        self
    }

    fn check_base(&self, other: &PlFunction) -> Result<()> {
        if same_curve(&self.curve, &other.curve) {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }

    /// Pointwise combination over the union of breakpoints. With
    /// `crossings`, offsets where the two functions cross are inserted first
    /// (needed for max, pointless for sums).
    fn combine(
        &self,
        other: &PlFunction,
        crossings: bool,
        value: impl Fn(&Rat, &Rat) -> Rat,
        leaf: impl Fn(&Rat, &Rat) -> Rat,
    ) -> Result<PlFunction> {
        self.check_base(other)?;
        let curve = &self.curve;
        let mut vertex_values = Vec::with_capacity(curve.vertices().len());
        for (vi, v) in curve.vertices().iter().enumerate() {
            if v.infinite {
                vertex_values.push(Rat::zero());
            } else {
                vertex_values.push(value(&self.vertex_values[vi], &other.vertex_values[vi]));
            }
        }
        let mut profiles = Vec::with_capacity(curve.edges().len());
        for (ei, e) in curve.edges().iter().enumerate() {
            let mut offsets: BTreeSet<Rat> = BTreeSet::new();
            offsets.insert(Rat::zero());
            for (t, _) in &self.profiles[ei].breaks {
                offsets.insert(t.clone());
            }
            for (t, _) in &other.profiles[ei].breaks {
                offsets.insert(t.clone());
            }
            if let EdgeLength::Finite(l) = &e.length {
                offsets.insert(l.clone());
            }
            let mut ts: Vec<Rat> = offsets.into_iter().collect();
            if crossings {
                let mut extra = Vec::new();
                for w in ts.windows(2) {
                    let d1 = self.eval_on_edge(ei, &w[0]) - other.eval_on_edge(ei, &w[0]);
                    let d2 = self.eval_on_edge(ei, &w[1]) - other.eval_on_edge(ei, &w[1]);
                    if d1.is_zero() || d2.is_zero() || d1.is_positive() == d2.is_positive() {
                        continue;
                    }
                    extra.push(&w[0] + (&w[1] - &w[0]) * &d1 / (&d1 - &d2));
                }
                if !e.length.is_finite() {
                    // crossing of the two unbounded tail rays
                    let lf = self.profiles[ei].leaf_slope.as_ref().unwrap();
                    let lg = other.profiles[ei].leaf_slope.as_ref().unwrap();
                    if lf != lg {
                        let last = ts.last().unwrap();
                        let d = self.eval_on_edge(ei, last) - other.eval_on_edge(ei, last);
                        if !d.is_zero() {
                            let step = &d / (lf - lg);
                            if step.is_positive() {
                                extra.push(last + step);
                            }
                        }
                    }
                }
                ts.extend(extra);
                ts.sort();
                ts.dedup();
            }
            let leaf_slope = match (&self.profiles[ei].leaf_slope, &other.profiles[ei].leaf_slope)
            {
                (Some(a), Some(b)) => Some(leaf(a, b)),
                _ => None,
            };
            let interior_end = if e.length.is_finite() {
                ts.len() - 1
            } else {
                ts.len()
            };
            let breaks = ts[1..interior_end]
                .iter()
                .map(|t| {
                    (
                        t.clone(),
                        value(&self.eval_on_edge(ei, t), &other.eval_on_edge(ei, t)),
                    )
                })
                .collect();
            profiles.push(EdgeProfile { breaks, leaf_slope });
        }
        Ok(PlFunction {
            curve: Arc::clone(curve),
            mode: self.mode.join(other.mode),
            vertex_values,
            profiles,
        }
        .normalized())
    }

    /// Tropical addition: the pointwise maximum.
    pub fn trop_add(&self, other: &PlFunction) -> Result<PlFunction> {
        // toward infinity the ray with the smaller away-slope dominates
        self.combine(other, true, |a, b| a.max(b).clone(), |a, b| a.min(b).clone())
    }

    /// Tropical multiplication: the pointwise sum.
    pub fn trop_mul(&self, other: &PlFunction) -> Result<PlFunction> {
        self.plus(other)
    }

    pub fn plus(&self, other: &PlFunction) -> Result<PlFunction> {
        self.combine(other, false, |a, b| a + b, |a, b| a + b)
    }

    /// Tropical division: the pointwise difference.
    pub fn trop_div(&self, other: &PlFunction) -> Result<PlFunction> {
        self.combine(other, false, |a, b| a - b, |a, b| a - b)
    }

    pub fn neg(&self) -> PlFunction {
        let mut out = self.clone();
        for v in out.vertex_values.iter_mut() {
            *v = -v.clone();
        }
        for p in out.profiles.iter_mut() {
            for (_, w) in p.breaks.iter_mut() {
                *w = -w.clone();
            }
            if let Some(ls) = p.leaf_slope.as_mut() {
                *ls = -ls.clone();
            }
        }
        out
    }

    /// Multiply all values (hence all slopes) by a rational scalar. In
    /// integer-slope mode the scalar must be an integer; switch to rational
    /// mode first (`into_rational_mode`) to scale by a proper fraction.
    pub fn trop_scale(&self, r: &Rat) -> Result<PlFunction> {
        if self.mode == SlopeMode::Integer && !is_integer(r) {
            return Err(Error::NonIntegerSlope(format!(
                "scaling by {} in integer-slope mode",
                fmt_rat(r)
            )));
        }
        let mut out = self.clone();
        for (vi, v) in out.vertex_values.iter_mut().enumerate() {
            if !out.curve.vertex(vi).infinite {
                *v = &*v * r;
            }
        }
        for p in out.profiles.iter_mut() {
            for (_, w) in p.breaks.iter_mut() {
                *w = &*w * r;
            }
            if let Some(ls) = p.leaf_slope.as_mut() {
                *ls = &*ls * r;
            }
        }
        if r.is_zero() {
            return Ok(out.normalized());
        }
        Ok(out)
    }

    /// Add a constant everywhere (slopes are unchanged, so the mode is kept).
    pub fn add_constant(&self, c: &Rat) -> PlFunction {
        let mut out = self.clone();
        for (vi, v) in out.vertex_values.iter_mut().enumerate() {
            if !out.curve.vertex(vi).infinite {
                *v = &*v + c;
            }
        }
        for p in out.profiles.iter_mut() {
            for (_, w) in p.breaks.iter_mut() {
                *w = &*w + c;
            }
        }
        out
    }

    /// Force the rational slope mode (for presenting integral data in ℚ).
    pub fn into_rational_mode(mut self) -> PlFunction {
        self.mode = SlopeMode::Rational;
        self
    }

    /// The same function on a refinement of its curve.
    pub fn on_refined(&self, r: &crate::refine::Refinement) -> Result<PlFunction> {
        if !same_curve(&self.curve, r.base()) {
            return Err(Error::BaseMismatch);
        }
        let fine = r.refined();
        let mut vertex_values = Vec::with_capacity(fine.vertices().len());
        for v in fine.vertices() {
            if v.infinite {
                vertex_values.push(Rat::zero());
            } else {
                vertex_values.push(self.eval(&r.to_base(&Point::Vertex(v.id.clone()))?)?);
            }
        }
        let mut profiles: Vec<EdgeProfile> = fine
            .edges()
            .iter()
            .map(|e| EdgeProfile {
                breaks: Vec::new(),
                leaf_slope: if e.length.is_finite() {
                    None
                } else {
                    Some(Rat::zero())
                },
            })
            .collect();
        for (ei, e) in self.curve.edges().iter().enumerate() {
            let cuts = r.cuts(ei);
            // distribute breaks among the segments
            for (t, w) in &self.profiles[ei].breaks {
                if cuts.binary_search(t).is_ok() {
                    continue; // the break became a vertex of the refinement
                }
                let fine_p = r.to_refined(&Point::Edge {
                    edge: e.id.clone(),
                    offset: t.clone(),
                })?;
                match fine_p {
                    Point::Edge { edge, offset } => {
                        let sei = fine.edge_index(&edge)?;
                        profiles[sei].breaks.push((offset, w.clone()));
                    }
                    Point::Vertex(_) => unreachable!("non-cut offsets stay interior"),
                }
            }
            if let Some(ls) = &self.profiles[ei].leaf_slope {
                // the unbounded tail belongs to the final segment
                let last = Point::Edge {
                    edge: e.id.clone(),
                    offset: cuts.last().map_or_else(rat_one, |c| c + rat_one()),
                };
                if let Point::Edge { edge, .. } = r.to_refined(&last)? {
                    let sei = fine.edge_index(&edge)?;
                    profiles[sei].leaf_slope = Some(ls.clone());
                }
            }
        }
        for p in profiles.iter_mut() {
            p.breaks.sort_by(|a, b| a.0.cmp(&b.0));
        }
        Ok(PlFunction {
            curve: Arc::clone(fine),
            mode: self.mode,
            vertex_values,
            profiles,
        }
        .normalized())
    }

    /// Pull a function on `r.refined()` back to the base curve.
    pub fn to_base(&self, r: &crate::refine::Refinement) -> Result<PlFunction> {
        if !same_curve(&self.curve, r.refined()) {
            return Err(Error::BaseMismatch);
        }
        let base = r.base();
        let fine = r.refined();
        let mut vertex_values = vec![Rat::zero(); base.vertices().len()];
        let mut profiles: Vec<EdgeProfile> = base
            .edges()
            .iter()
            .map(|e| EdgeProfile {
                breaks: Vec::new(),
                leaf_slope: if e.length.is_finite() {
                    None
                } else {
                    Some(Rat::zero())
                },
            })
            .collect();
        for (vi, v) in fine.vertices().iter().enumerate() {
            if v.infinite {
                continue;
            }
            match r.to_base(&Point::Vertex(v.id.clone()))? {
                Point::Vertex(b) => {
                    vertex_values[base.vertex_index(&b)?] = self.vertex_values[vi].clone();
                }
                Point::Edge { edge, offset } => {
                    let ei = base.edge_index(&edge)?;
                    profiles[ei]
                        .breaks
                        .push((offset, self.vertex_values[vi].clone()));
                }
            }
        }
        for (sei, e) in fine.edges().iter().enumerate() {
            for (t, w) in &self.profiles[sei].breaks {
                match r.to_base(&Point::Edge {
                    edge: e.id.clone(),
                    offset: t.clone(),
                })? {
                    Point::Edge { edge, offset } => {
                        let ei = base.edge_index(&edge)?;
                        profiles[ei].breaks.push((offset, w.clone()));
                    }
                    Point::Vertex(_) => unreachable!("interior points stay interior"),
                }
            }
            if let Some(ls) = &self.profiles[sei].leaf_slope {
                // locate the base edge this unbounded segment came from
                let probe = Point::Edge {
                    edge: e.id.clone(),
                    offset: rat_one(),
                };
                if let Point::Edge { edge, .. } = r.to_base(&probe)? {
                    let ei = base.edge_index(&edge)?;
                    profiles[ei].leaf_slope = Some(ls.clone());
                }
            }
        }
        for p in profiles.iter_mut() {
            p.breaks.sort_by(|a, b| a.0.cmp(&b.0));
        }
        Ok(PlFunction {
            curve: Arc::clone(base),
            mode: self.mode,
            vertex_values,
            profiles,
        }
        .normalized())
    }
}

fn rat_mult(m: u64) -> Rat {
    crate::rat::rat_int(m as i64)
}

/// Pointwise equality of two functions on the same base curve. The stored
/// form is canonical (no removable breakpoints), so this is structural
/// equality after a base check; the slope mode is ignored.
pub fn pl_equal(f: &PlFunction, g: &PlFunction) -> Result<bool> {
    if !same_curve(f.curve(), g.curve()) {
        return Err(Error::BaseMismatch);
    }
    Ok(f == g)
}

/// Pullback of `f` along the symmetry `g`: the function `p -> f(g⁻¹(p))`.
/// A left action, so `pullback(g1∘g2, f) = pullback(g1, pullback(g2, f))`,
/// and `div` intertwines it with the pushforward of divisors.
pub fn pullback(g: &crate::automorphism::Automorphism, f: &PlFunction) -> Result<PlFunction> {
    let curve = f.curve();
    if !same_curve(curve, g.base()) {
        return Err(Error::BaseMismatch);
    }
    let h = g.inverse();

    // gf bends exactly at g-images of bends of f, and g-images of vertices
    // must be pinned too when they land in edge interiors
    let mut cuts: Vec<Point> = Vec::new();
    for v in curve.vertices() {
        if !v.infinite {
            cuts.push(g.act_on_point(&Point::Vertex(v.id.clone()))?);
        }
    }
    for (ei, e) in curve.edges().iter().enumerate() {
        for (t, _) in &f.profiles[ei].breaks {
            cuts.push(g.act_on_point(&Point::Edge {
                edge: e.id.clone(),
                offset: t.clone(),
            })?);
        }
    }
    let r = crate::refine::refine(curve, &cuts)?;
    let fine = r.refined();

    let mut values: BTreeMap<String, Rat> = BTreeMap::new();
    for v in fine.vertices() {
        if v.infinite {
            continue;
        }
        let p = r.to_base(&Point::Vertex(v.id.clone()))?;
        values.insert(v.id.0.clone(), f.eval(&h.act_on_point(&p)?)?);
    }

    // each unbounded refined edge inherits the slope f carries on the end
    // that h sends its infinite point to
    let mut profiles: BTreeMap<String, EdgeProfile> = BTreeMap::new();
    for e in fine.edges() {
        if e.length.is_finite() {
            continue;
        }
        let inf = Point::Vertex(fine.vertex(e.ends[1]).id.clone());
        let src = match h.act_on_point(&r.to_base(&inf)?)? {
            Point::Vertex(w) => curve.vertex_index(&w)?,
            p => return Err(Error::Internal(format!("an infinite point moved to {p}"))),
        };
        let (src_edge, _) = curve.incident(src)[0];
        profiles.insert(
            e.id.0.clone(),
            EdgeProfile {
                breaks: Vec::new(),
                leaf_slope: f.profiles[src_edge].leaf_slope.clone(),
            },
        );
    }

    PlFunction::new(fine, f.mode, values, profiles)?.to_base(&r)
}

fn rat_one() -> Rat {
    crate::rat::rat_int(1)
}
