//! Moving between models of one metric object.
//!
//! `refine` subdivides edges at interior points and yields a [`Refinement`]
//! that translates points both ways. `minimal_model` goes the other way:
//! it suppresses every suppressible 2-valent vertex and yields a
//! [`MinimalModel`] with the same two-way translation. A 2-valent finite
//! vertex is suppressible unless its two incident edges are both infinite
//! (nothing may join two infinite points directly); on a circle exactly one
//! vertex, the lexicographically smallest, survives.
//!
//! Synthesized ids are deterministic: a cut at offset `p/q` on edge `e`
//! becomes vertex `e@p/q`, and the segments of `e` become `e.0`, `e.1`, ...
//! (primed with `'` on the rare collision with a preexisting id).

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::Zero;

use crate::curve::{Curve, EdgeId, EdgeLength, EdgeSpec, Point, VertexId};
use crate::error::{Error, Result};
use crate::rat::{fmt_rat, Rat};

#[derive(Debug)]
struct EdgeSplit {
    /// Strictly increasing interior offsets.
    cuts: Vec<Rat>,
    cut_vertex_ids: Vec<VertexId>,
    /// `cuts.len() + 1` segment ids; just the base id when there are no cuts.
    segment_ids: Vec<EdgeId>,
    /// Whether the segment's canonical orientation opposes the base edge's.
    seg_reversed: Vec<bool>,
}

#[derive(Debug)]
pub struct Refinement {
    base: Arc<Curve>,
    refined: Arc<Curve>,
    splits: Vec<EdgeSplit>,
    /// refined vertex index -> point of the base curve
    vertex_points: Vec<Point>,
    /// refined edge index -> (base edge index, segment number)
    edge_home: Vec<(usize, usize)>,
}

fn fresh(candidate: String, used: &mut BTreeSet<String>) -> String {
    let mut c = candidate;
    while used.contains(&c) {
        c.push('\'');
    }
    used.insert(c.clone());
    c
}

/// Subdivide `base` at the given points (vertex points are ignored).
pub fn refine(base: &Arc<Curve>, points: &[Point]) -> Result<Refinement> {
    let mut cuts_per_edge: Vec<BTreeSet<Rat>> = vec![BTreeSet::new(); base.edges().len()];
    for p in points {
        if let Point::Edge { edge, offset } = base.canonical_point(p)? {
            cuts_per_edge[base.edge_index(&edge)?].insert(offset);
        }
    }

    let mut used_vids: BTreeSet<String> =
        base.vertices().iter().map(|v| v.id.0.clone()).collect();
    let mut used_eids: BTreeSet<String> = base.edges().iter().map(|e| e.id.0.clone()).collect();

    let mut vertices: Vec<(String, bool)> = base
        .vertices()
        .iter()
        .map(|v| (v.id.0.clone(), v.infinite))
        .collect();
    let mut edge_specs: Vec<EdgeSpec> = Vec::new();
    let mut splits: Vec<EdgeSplit> = Vec::new();

    for (ei, e) in base.edges().iter().enumerate() {
        let cuts: Vec<Rat> = cuts_per_edge[ei].iter().cloned().collect();
        if cuts.is_empty() {
            edge_specs.push(EdgeSpec {
                id: e.id.0.clone(),
                ends: (
                    base.vertex(e.ends[0]).id.0.clone(),
                    base.vertex(e.ends[1]).id.0.clone(),
                ),
                length: e.length.clone(),
                multiplicity: e.multiplicity,
            });
            splits.push(EdgeSplit {
                cuts,
                cut_vertex_ids: Vec::new(),
                segment_ids: vec![e.id.clone()],
                seg_reversed: vec![false],
            });
            continue;
        }
        let mut cut_vertex_ids = Vec::with_capacity(cuts.len());
        for off in &cuts {
            let vid = fresh(format!("{}@{}", e.id, fmt_rat(off)), &mut used_vids);
            vertices.push((vid.clone(), false));
            cut_vertex_ids.push(VertexId(vid));
        }
        // Node ids along the edge: end0, cuts..., end1.
        let mut node_ids: Vec<String> = Vec::with_capacity(cuts.len() + 2);
        node_ids.push(base.vertex(e.ends[0]).id.0.clone());
        node_ids.extend(cut_vertex_ids.iter().map(|v| v.0.clone()));
        node_ids.push(base.vertex(e.ends[1]).id.0.clone());

        let mut segment_ids = Vec::with_capacity(cuts.len() + 1);
        for k in 0..=cuts.len() {
            let sid = fresh(format!("{}.{}", e.id, k), &mut used_eids);
            let length = if k < cuts.len() {
                let lo = if k == 0 { Rat::zero() } else { cuts[k - 1].clone() };
                EdgeLength::Finite(&cuts[k] - &lo)
            } else {
                match &e.length {
                    EdgeLength::Finite(l) => EdgeLength::Finite(l - &cuts[k - 1]),
                    EdgeLength::Infinite => EdgeLength::Infinite,
                }
            };
            edge_specs.push(EdgeSpec {
                id: sid.clone(),
                ends: (node_ids[k].clone(), node_ids[k + 1].clone()),
                length,
                multiplicity: e.multiplicity,
            });
            segment_ids.push(EdgeId(sid));
        }
        splits.push(EdgeSplit {
            cuts,
            cut_vertex_ids,
            segment_ids,
            seg_reversed: Vec::new(), // filled in below
        });
    }

    let refined = Arc::new(
        Curve::new(vertices, edge_specs)
            .map_err(|e| Error::Internal(format!("refinement of a valid curve failed: {e}")))?,
    );

    // Resolve orientation of each segment against its canonical form, and
    // build the reverse lookup tables.
    let mut vertex_points: Vec<Point> = refined
        .vertices()
        .iter()
        .map(|v| Point::Vertex(v.id.clone()))
        .collect();
    let mut edge_home = vec![(usize::MAX, usize::MAX); refined.edges().len()];
    for (ei, split) in splits.iter_mut().enumerate() {
        let base_edge = base.edge(ei);
        for (k, off) in split.cuts.iter().enumerate() {
            let idx = refined.vertex_index(&split.cut_vertex_ids[k])?;
            vertex_points[idx] = Point::Edge {
                edge: base_edge.id.clone(),
                offset: off.clone(),
            };
        }
        split.seg_reversed = Vec::with_capacity(split.segment_ids.len());
        for (k, sid) in split.segment_ids.iter().enumerate() {
            let sei = refined.edge_index(sid)?;
            edge_home[sei] = (ei, k);
            let chain_start: &VertexId = if k == 0 {
                &base.vertex(base_edge.ends[0]).id
            } else {
                &split.cut_vertex_ids[k - 1]
            };
            let canonical_first = &refined.vertex(refined.edge(sei).ends[0]).id;
            let reversed = if split.cuts.is_empty() {
                false // unsplit edges are carried over verbatim
            } else {
                canonical_first != chain_start
            };
            split.seg_reversed.push(reversed);
        }
    }

    Ok(Refinement {
        base: Arc::clone(base),
        refined,
        splits,
        vertex_points,
        edge_home,
    })
}

impl Refinement {
    pub fn base(&self) -> &Arc<Curve> {
        &self.base
    }

    pub fn refined(&self) -> &Arc<Curve> {
        &self.refined
    }

    /// Interior cut offsets of a base edge.
    pub fn cuts(&self, base_edge: usize) -> &[Rat] {
        &self.splits[base_edge].cuts
    }

    /// Base point of a refined vertex.
    pub fn vertex_point(&self, refined_vertex: usize) -> &Point {
        &self.vertex_points[refined_vertex]
    }

    /// Whether `other` refines the same base at exactly the same points
    /// (and therefore produces an identical refined curve).
    pub fn same_cuts(&self, other: &Refinement) -> bool {
        crate::curve::same_curve(&self.base, &other.base)
            && self.splits.len() == other.splits.len()
            && (0..self.splits.len()).all(|ei| self.splits[ei].cuts == other.splits[ei].cuts)
    }

    /// All cut points in base coordinates.
    pub fn cut_points(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for (ei, split) in self.splits.iter().enumerate() {
            for off in &split.cuts {
                out.push(Point::Edge {
                    edge: self.base.edge(ei).id.clone(),
                    offset: off.clone(),
                });
            }
        }
        out
    }

    /// Bounds of segment `k` of a base edge as `(start, end)` offsets.
    fn segment_bounds(&self, base_edge: usize, k: usize) -> (Rat, Option<Rat>) {
        let split = &self.splits[base_edge];
        let start = if k == 0 {
            Rat::zero()
        } else {
            split.cuts[k - 1].clone()
        };
        let end = if k < split.cuts.len() {
            Some(split.cuts[k].clone())
        } else {
            self.base.edge(base_edge).length.as_finite().cloned()
        };
        (start, end)
    }

    /// Translate a base point into refined coordinates.
    pub fn to_refined(&self, p: &Point) -> Result<Point> {
        match self.base.canonical_point(p)? {
            Point::Vertex(v) => Ok(Point::Vertex(v)),
            Point::Edge { edge, offset } => {
                let ei = self.base.edge_index(&edge)?;
                let split = &self.splits[ei];
                match split.cuts.binary_search(&offset) {
                    Ok(i) => Ok(Point::Vertex(split.cut_vertex_ids[i].clone())),
                    Err(k) => {
                        let (start, end) = self.segment_bounds(ei, k);
                        let mut local = &offset - &start;
                        if split.seg_reversed[k] {
                            let len = end.expect("reversed segments are finite") - &start;
                            local = &len - &local;
                        }
                        Ok(Point::Edge {
                            edge: split.segment_ids[k].clone(),
                            offset: local,
                        })
                    }
                }
            }
        }
    }

    /// Translate a refined point back into base coordinates.
    pub fn to_base(&self, p: &Point) -> Result<Point> {
        match self.refined.canonical_point(p)? {
            Point::Vertex(v) => {
                let idx = self.refined.vertex_index(&v)?;
                Ok(self.vertex_points[idx].clone())
            }
            Point::Edge { edge, offset } => {
                let sei = self.refined.edge_index(&edge)?;
                let (ei, k) = self.edge_home[sei];
                let (start, end) = self.segment_bounds(ei, k);
                let local = if self.splits[ei].seg_reversed[k] {
                    let len = end.expect("reversed segments are finite") - &start;
                    &len - &offset
                } else {
                    offset
                };
                Ok(Point::Edge {
                    edge: self.base.edge(ei).id.clone(),
                    offset: &start + &local,
                })
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Minimal model
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EdgeSpan {
    pub min_edge: usize,
    /// Minimal-edge offset of the base edge's offset 0.
    pub start: Rat,
    /// If set, base offset `t` sits at minimal offset `start - t`, else `start + t`.
    pub reversed: bool,
}

#[derive(Debug)]
struct Piece {
    lo: Rat,
    hi: Option<Rat>, // None on the final piece of an infinite chain
    base_edge: usize,
    /// Base vertex sitting at minimal offset `lo`, when `lo > 0`.
    node_at_lo: Option<usize>,
}

#[derive(Debug)]
pub struct MinimalModel {
    base: Arc<Curve>,
    minimal: Arc<Curve>,
    /// base vertex index -> point of the minimal curve
    vertex_images: Vec<Point>,
    /// base edge index -> placement inside a minimal edge
    spans: Vec<EdgeSpan>,
    /// minimal edge index -> constituent base pieces, increasing `lo`
    covers: Vec<Vec<Piece>>,
}

pub fn minimal_model(base: &Arc<Curve>) -> Result<MinimalModel> {
    let n = base.vertices().len();
    let mut kept = vec![false; n];
    if base.is_circle() {
        kept[0] = true; // vertices are sorted by id, so 0 is the smallest
    } else {
        for vi in 0..n {
            if base.vertex_valence(vi) != 2 {
                kept[vi] = true;
                continue;
            }
            let inc = base.incident(vi);
            let both_infinite = inc[0].0 != inc[1].0
                && !base.edge(inc[0].0).length.is_finite()
                && !base.edge(inc[1].0).length.is_finite();
            kept[vi] = both_infinite;
        }
    }

    // Walk maximal chains between kept vertices.
    struct Chain {
        start: usize,
        end: usize,
        pieces: Vec<(usize, bool)>, // (base edge, traversed ends[0] -> ends[1])
    }
    let mut visited = vec![false; base.edges().len()];
    let mut chains: Vec<Chain> = Vec::new();
    for k in 0..n {
        if !kept[k] {
            continue;
        }
        for &(ei0, slot0) in base.incident(k) {
            if visited[ei0] {
                continue;
            }
            let mut pieces = Vec::new();
            let (mut ei, mut slot) = (ei0, slot0);
            let end = loop {
                visited[ei] = true;
                pieces.push((ei, slot == 0));
                let next_v = base.edge(ei).ends[1 - slot as usize];
                if kept[next_v] {
                    break next_v;
                }
                let inc = base.incident(next_v);
                let (nei, nslot) = inc
                    .iter()
                    .copied()
                    .find(|&(e, _)| e != ei)
                    .expect("2-valent vertex has a second edge");
                ei = nei;
                slot = nslot;
            };
            chains.push(Chain {
                start: k,
                end,
                pieces,
            });
        }
    }
    debug_assert!(visited.iter().all(|&v| v));

    // Assemble the minimal curve.
    let mut vertices: Vec<(String, bool)> = Vec::new();
    for (vi, v) in base.vertices().iter().enumerate() {
        if kept[vi] {
            vertices.push((v.id.0.clone(), v.infinite));
        }
    }
    let mut edge_specs = Vec::with_capacity(chains.len());
    let mut chain_ids: Vec<EdgeId> = Vec::with_capacity(chains.len());
    for chain in &chains {
        let id = chain
            .pieces
            .iter()
            .map(|&(ei, _)| &base.edge(ei).id)
            .min()
            .expect("chains are nonempty")
            .clone();
        let mut length = EdgeLength::Finite(Rat::zero());
        for &(ei, _) in &chain.pieces {
            length = match (&length, &base.edge(ei).length) {
                (EdgeLength::Finite(a), EdgeLength::Finite(b)) => EdgeLength::Finite(a + b),
                _ => EdgeLength::Infinite,
            };
        }
        let multiplicity = base.edge(chain.pieces[0].0).multiplicity;
        edge_specs.push(EdgeSpec {
            id: id.0.clone(),
            ends: (
                base.vertex(chain.start).id.0.clone(),
                base.vertex(chain.end).id.0.clone(),
            ),
            length,
            multiplicity,
        });
        chain_ids.push(id);
    }
    let minimal = Arc::new(
        Curve::new(vertices, edge_specs)
            .map_err(|e| Error::Internal(format!("minimal model failed validation: {e}")))?,
    );

    // Orient each chain to match its minimal edge and lay out the pieces.
    let mut vertex_images: Vec<Point> = base
        .vertices()
        .iter()
        .map(|v| Point::Vertex(v.id.clone()))
        .collect();
    let mut spans: Vec<Option<EdgeSpan>> = vec![None; base.edges().len()];
    let mut covers: Vec<Vec<Piece>> = (0..minimal.edges().len()).map(|_| Vec::new()).collect();

    for (ci, chain) in chains.iter_mut().enumerate() {
        let mei = minimal.edge_index(&chain_ids[ci])?;
        let min_edge = minimal.edge(mei);
        let canon_first = &minimal.vertex(min_edge.ends[0]).id;
        if chain.start != chain.end && canon_first != &base.vertex(chain.start).id {
            std::mem::swap(&mut chain.start, &mut chain.end);
            chain.pieces.reverse();
            for p in chain.pieces.iter_mut() {
                p.1 = !p.1;
            }
        }
        let mut pos = Rat::zero();
        for (idx, &(ei, forward)) in chain.pieces.iter().enumerate() {
            let node_at_lo = if idx == 0 {
                None
            } else {
                // the base vertex between the previous piece and this one
                let prev = chain.pieces[idx - 1];
                let pv = if prev.1 {
                    base.edge(prev.0).ends[1]
                } else {
                    base.edge(prev.0).ends[0]
                };
                vertex_images[pv] = Point::Edge {
                    edge: min_edge.id.clone(),
                    offset: pos.clone(),
                };
                Some(pv)
            };
            match base.edge(ei).length.clone() {
                EdgeLength::Finite(l) => {
                    let start = if forward { pos.clone() } else { &pos + &l };
                    spans[ei] = Some(EdgeSpan {
                        min_edge: mei,
                        start,
                        reversed: !forward,
                    });
                    covers[mei].push(Piece {
                        lo: pos.clone(),
                        hi: Some(&pos + &l),
                        base_edge: ei,
                        node_at_lo,
                    });
                    pos = &pos + &l;
                }
                EdgeLength::Infinite => {
                    debug_assert!(forward, "infinite pieces run toward the infinite point");
                    spans[ei] = Some(EdgeSpan {
                        min_edge: mei,
                        start: pos.clone(),
                        reversed: false,
                    });
                    covers[mei].push(Piece {
                        lo: pos.clone(),
                        hi: None,
                        base_edge: ei,
                        node_at_lo,
                    });
                }
            }
        }
    }

    let spans = spans
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Internal("every base edge lies on a chain".into()))?;

    Ok(MinimalModel {
        base: Arc::clone(base),
        minimal,
        vertex_images,
        spans,
        covers,
    })
}

impl MinimalModel {
    pub fn base(&self) -> &Arc<Curve> {
        &self.base
    }

    pub fn minimal(&self) -> &Arc<Curve> {
        &self.minimal
    }

    pub fn vertex_image(&self, base_vertex: usize) -> &Point {
        &self.vertex_images[base_vertex]
    }

    pub fn edge_span(&self, base_edge: usize) -> &EdgeSpan {
        &self.spans[base_edge]
    }

    /// Translate a base point into minimal coordinates.
    pub fn to_min(&self, p: &Point) -> Result<Point> {
        match self.base.canonical_point(p)? {
            Point::Vertex(v) => Ok(self.vertex_images[self.base.vertex_index(&v)?].clone()),
            Point::Edge { edge, offset } => {
                let span = &self.spans[self.base.edge_index(&edge)?];
                let off = if span.reversed {
                    &span.start - &offset
                } else {
                    &span.start + &offset
                };
                Ok(Point::Edge {
                    edge: self.minimal.edge(span.min_edge).id.clone(),
                    offset: off,
                })
            }
        }
    }

    /// Translate a minimal point back into base coordinates.
    pub fn from_min(&self, p: &Point) -> Result<Point> {
        match self.minimal.canonical_point(p)? {
            Point::Vertex(v) => Ok(Point::Vertex(v)), // kept vertices keep their ids
            Point::Edge { edge, offset } => {
                let mei = self.minimal.edge_index(&edge)?;
                for piece in &self.covers[mei] {
                    if offset == piece.lo {
                        let vi = piece
                            .node_at_lo
                            .ok_or_else(|| Error::Internal("piece boundary without node".into()))?;
                        return Ok(Point::Vertex(self.base.vertex(vi).id.clone()));
                    }
                    let inside =
                        offset > piece.lo && piece.hi.as_ref().map_or(true, |hi| offset < *hi);
                    if inside {
                        let span = &self.spans[piece.base_edge];
                        let t = if span.reversed {
                            &span.start - &offset
                        } else {
                            &offset - &span.start
                        };
                        return Ok(Point::Edge {
                            edge: self.base.edge(piece.base_edge).id.clone(),
                            offset: t,
                        });
                    }
                }
                Err(Error::Internal(format!(
                    "minimal point {p:?} not covered by any piece"
                )))
            }
        }
    }
}
