//! Metric graphs with infinite leaves.
//!
//! A `Curve` is a connected graph whose edges carry a positive rational length
//! or `Infinite` length, plus a positive integer multiplicity. 1-valent
//! vertices are exactly the endpoints of infinite edges and are flagged
//! `infinite`; the metric lives on everything else. Construction validates the
//! whole structure, so a `Curve` value is always well formed.
//!
//! Point coordinates: a point is either a model vertex or an interior point of
//! an edge given by an offset. Offsets are measured from the edge's canonical
//! first endpoint, which is the lexicographically smaller vertex id, except on
//! infinite edges where it is always the finite endpoint.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rat::{fmt_rat, Rat};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub String);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub String);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_string())
    }
}

impl From<String> for VertexId {
    fn from(s: String) -> Self {
        VertexId(s)
    }
}

impl From<&str> for EdgeId {
    fn from(s: &str) -> Self {
        EdgeId(s.to_string())
    }
}

impl From<String> for EdgeId {
    fn from(s: String) -> Self {
        EdgeId(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeLength {
    Finite(Rat),
    Infinite,
}

impl EdgeLength {
    pub fn is_finite(&self) -> bool {
        matches!(self, EdgeLength::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            EdgeLength::Finite(l) => Some(l),
            EdgeLength::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: VertexId,
    pub infinite: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    /// Vertex indices in canonical order: lexicographically smaller id first;
    /// on infinite edges the finite endpoint first. Loops repeat the vertex.
    pub ends: [usize; 2],
    pub length: EdgeLength,
    pub multiplicity: u64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }
}

/// Raw edge description accepted by [`Curve::new`]; endpoint order is free.
#[derive(Debug, Clone)]
pub struct EdgeSpec {
    pub id: String,
    pub ends: (String, String),
    pub length: EdgeLength,
    pub multiplicity: u64,
}

/// A point of the curve: a model vertex or an interior point of an edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Point {
    Vertex(VertexId),
    Edge { edge: EdgeId, offset: Rat },
}

impl Point {
    pub fn vertex(id: impl Into<String>) -> Point {
        Point::Vertex(VertexId(id.into()))
    }

    pub fn on_edge(id: impl Into<String>, offset: Rat) -> Point {
        Point::Edge {
            edge: EdgeId(id.into()),
            offset,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Vertex(v) => write!(f, "vertex `{v}`"),
            Point::Edge { edge, offset } => write!(f, "edge `{edge}` at {}", fmt_rat(offset)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    /// vertex index -> (edge index, end slot 0|1); loops appear twice.
    incidence: Vec<Vec<(usize, u8)>>,
    circle: bool,
}

/// Two handles to the same curve, either shared or structurally equal.
pub fn same_curve(a: &Arc<Curve>, b: &Arc<Curve>) -> bool {
    Arc::ptr_eq(a, b) || a.as_ref() == b.as_ref()
}

impl Curve {
    /// Build and fully validate a curve. Vertices are `(id, infinite)` pairs.
    pub fn new(vertices: Vec<(String, bool)>, edges: Vec<EdgeSpec>) -> Result<Curve> {
        if vertices.is_empty() {
            return Err(Error::EmptyCurve);
        }
        let mut vs: Vec<Vertex> = vertices
            .into_iter()
            .map(|(id, infinite)| Vertex {
                id: VertexId(id),
                infinite,
            })
            .collect();
        vs.sort_by(|a, b| a.id.cmp(&b.id));
        for w in vs.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::DuplicateId(w[0].id.0.clone()));
            }
        }
        let vertex_index = |id: &str| -> Result<usize> {
            vs.binary_search_by(|v| v.id.0.as_str().cmp(id))
                .map_err(|_| Error::UnknownVertex(id.to_string()))
        };

        let mut es: Vec<Edge> = Vec::with_capacity(edges.len());
        for spec in edges {
            if let EdgeLength::Finite(l) = &spec.length {
                if *l <= Rat::zero() {
                    return Err(Error::BadLength(spec.id));
                }
            }
            if spec.multiplicity == 0 {
                return Err(Error::BadMultiplicity(spec.id));
            }
            let a = vertex_index(&spec.ends.0)?;
            let b = vertex_index(&spec.ends.1)?;
            es.push(Edge {
                id: EdgeId(spec.id),
                ends: [a, b],
                length: spec.length,
                multiplicity: spec.multiplicity,
            });
        }
        es.sort_by(|a, b| a.id.cmp(&b.id));
        for w in es.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::DuplicateId(w[0].id.0.clone()));
            }
        }

        // Canonical endpoint order.
        for e in &mut es {
            let [a, b] = e.ends;
            let flip = match e.length {
                EdgeLength::Infinite => {
                    if vs[a].infinite && vs[b].infinite {
                        return Err(Error::DoubleInfiniteEdge(e.id.0.clone()));
                    }
                    vs[a].infinite
                }
                EdgeLength::Finite(_) => vs[b].id < vs[a].id,
            };
            if flip {
                e.ends = [b, a];
            }
        }

        let mut incidence = vec![Vec::new(); vs.len()];
        for (ei, e) in es.iter().enumerate() {
            incidence[e.ends[0]].push((ei, 0));
            incidence[e.ends[1]].push((ei, 1));
        }

        // Connectivity.
        let mut seen = vec![false; vs.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(ei, slot) in &incidence[v] {
                let w = es[ei].ends[1 - slot as usize];
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Disconnected);
        }

        // Vertex kinds against incidence.
        for (vi, v) in vs.iter().enumerate() {
            let val = incidence[vi].len();
            if val == 1 {
                let (ei, _) = incidence[vi][0];
                match es[ei].length {
                    EdgeLength::Finite(_) => return Err(Error::FiniteLeaf(v.id.0.clone())),
                    EdgeLength::Infinite => {
                        if !v.infinite {
                            return Err(Error::BadVertexKind(v.id.0.clone()));
                        }
                    }
                }
            } else if v.infinite {
                return Err(Error::BadVertexKind(v.id.0.clone()));
            }
        }

        // Every infinite edge must end at exactly one infinite point (the
        // two-infinite-endpoints case was rejected above).
        for e in &es {
            if !e.length.is_finite() && !vs[e.ends[1]].infinite {
                return Err(Error::InfiniteInnerEdge(e.id.0.clone()));
            }
        }

        let circle = vs.iter().all(|v| !v.infinite)
            && incidence.iter().all(|inc| inc.len() == 2)
            && !es.is_empty();

        if circle {
            let m = es[0].multiplicity;
            if es.iter().any(|e| e.multiplicity != m) {
                return Err(Error::BadCircleMultiplicity);
            }
        } else {
            for (vi, v) in vs.iter().enumerate() {
                if v.infinite || incidence[vi].len() != 2 {
                    continue;
                }
                let (e1, _) = incidence[vi][0];
                let (e2, _) = incidence[vi][1];
                if e1 != e2 && es[e1].multiplicity != es[e2].multiplicity {
                    return Err(Error::MultiplicityMismatchAt2Valent(v.id.0.clone()));
                }
            }
        }

        Ok(Curve {
            vertices: vs,
            edges: es,
            incidence,
            circle,
        })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, vi: usize) -> &Vertex {
        &self.vertices[vi]
    }

    pub fn edge(&self, ei: usize) -> &Edge {
        &self.edges[ei]
    }

    pub fn vertex_index(&self, id: &VertexId) -> Result<usize> {
        self.vertices
            .binary_search_by(|v| v.id.cmp(id))
            .map_err(|_| Error::UnknownVertex(id.0.clone()))
    }

    pub fn edge_index(&self, id: &EdgeId) -> Result<usize> {
        self.edges
            .binary_search_by(|e| e.id.cmp(id))
            .map_err(|_| Error::UnknownEdge(id.0.clone()))
    }

    /// Edge ends incident to a vertex, `(edge index, end slot)`.
    pub fn incident(&self, vi: usize) -> &[(usize, u8)] {
        &self.incidence[vi]
    }

    pub fn vertex_valence(&self, vi: usize) -> usize {
        self.incidence[vi].len()
    }

    /// Whether the curve is homeomorphic to a circle.
    pub fn is_circle(&self) -> bool {
        self.circle
    }

    /// Lexicographically smallest finite vertex; every valid curve has one.
    pub fn base_vertex(&self) -> usize {
        self.vertices
            .iter()
            .position(|v| !v.infinite)
            .expect("validated curve has a finite vertex")
    }

    /// Validate a point against this curve and put it in canonical form:
    /// offsets `0` and `length` collapse to the corresponding endpoint.
    pub fn canonical_point(&self, p: &Point) -> Result<Point> {
        match p {
            Point::Vertex(v) => {
                self.vertex_index(v)?;
                Ok(p.clone())
            }
            Point::Edge { edge, offset } => {
                let ei = self.edge_index(edge)?;
                let e = &self.edges[ei];
                if offset.is_zero() {
                    return Ok(Point::Vertex(self.vertices[e.ends[0]].id.clone()));
                }
                if *offset < Rat::zero() {
                    return Err(Error::BadPoint(format!(
                        "offset {} on edge `{edge}` is negative",
                        fmt_rat(offset)
                    )));
                }
                if let EdgeLength::Finite(len) = &e.length {
                    if offset == len {
                        return Ok(Point::Vertex(self.vertices[e.ends[1]].id.clone()));
                    }
                    if offset > len {
                        return Err(Error::BadPoint(format!(
                            "offset {} exceeds length {} of edge `{edge}`",
                            fmt_rat(offset),
                            fmt_rat(len)
                        )));
                    }
                }
                Ok(p.clone())
            }
        }
    }

    /// Valence of any point: vertices use the model, interior points are 2.
    pub fn valence(&self, p: &Point) -> Result<usize> {
        match self.canonical_point(p)? {
            Point::Vertex(v) => Ok(self.vertex_valence(self.vertex_index(&v)?)),
            Point::Edge { .. } => Ok(2),
        }
    }

    pub fn is_infinite_point(&self, p: &Point) -> Result<bool> {
        match self.canonical_point(p)? {
            Point::Vertex(v) => Ok(self.vertices[self.vertex_index(&v)?].infinite),
            Point::Edge { .. } => Ok(false),
        }
    }

    /// Shortest-path distance. `Infinite` whenever either point is infinite.
    pub fn distance(self: &Arc<Curve>, p: &Point, q: &Point) -> Result<EdgeLength> {
        let p = self.canonical_point(p)?;
        let q = self.canonical_point(q)?;
        if self.is_infinite_point(&p)? || self.is_infinite_point(&q)? {
            return Ok(EdgeLength::Infinite);
        }
        if p == q {
            return Ok(EdgeLength::Finite(Rat::zero()));
        }
        let refinement = crate::refine::refine(self, &[p.clone(), q.clone()])?;
        let fine = refinement.refined();
        let pv = match refinement.to_refined(&p)? {
            Point::Vertex(v) => fine.vertex_index(&v)?,
            _ => unreachable!("refined at p"),
        };
        let qv = match refinement.to_refined(&q)? {
            Point::Vertex(v) => fine.vertex_index(&v)?,
            _ => unreachable!("refined at q"),
        };
        let dist = fine.vertex_distances(pv);
        match &dist[qv] {
            Some(d) => Ok(EdgeLength::Finite(d.clone())),
            None => Err(Error::Internal(
                "finite part of a connected curve is connected".into(),
            )),
        }
    }

    /// Dijkstra over finite edges from a finite vertex; `None` marks infinite
    /// points (never reached along finite edges).
    pub(crate) fn vertex_distances(&self, from: usize) -> Vec<Option<Rat>> {
        let mut dist: Vec<Option<Rat>> = vec![None; self.vertices.len()];
        let mut done = vec![false; self.vertices.len()];
        dist[from] = Some(Rat::zero());
        let mut heap: BinaryHeap<Reverse<(Rat, usize)>> = BinaryHeap::new();
        heap.push(Reverse((Rat::zero(), from)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            for &(ei, slot) in &self.incidence[v] {
                let e = &self.edges[ei];
                let len = match &e.length {
                    EdgeLength::Finite(l) => l,
                    EdgeLength::Infinite => continue,
                };
                let w = e.ends[1 - slot as usize];
                let nd = &d + len;
                if dist[w].as_ref().map_or(true, |old| nd < *old) {
                    dist[w] = Some(nd.clone());
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        dist
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rat::{rat, rat_int};

    fn edge(id: &str, a: &str, b: &str, length: EdgeLength, m: u64) -> EdgeSpec {
        EdgeSpec {
            id: id.into(),
            ends: (a.into(), b.into()),
            length,
            multiplicity: m,
        }
    }

    #[test]
    fn star3_is_valid_and_canonical() {
        let c = fixtures::star(3);
        assert_eq!(c.vertices().len(), 4);
        assert_eq!(c.edges().len(), 3);
        assert!(!c.is_circle());
        // Canonical order is finite endpoint first on infinite edges.
        for e in c.edges() {
            assert!(!c.vertex(e.ends[0]).infinite);
            assert!(c.vertex(e.ends[1]).infinite);
        }
        assert_eq!(c.vertex(c.base_vertex()).id.0, "O");
    }

    #[test]
    fn validation_rejects_each_defect() {
        // finite leaf
        let err = Curve::new(
            vec![("A".into(), false), ("B".into(), false)],
            vec![edge("e", "A", "B", EdgeLength::Finite(rat_int(1)), 1)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::FiniteLeaf(_)));

        // infinite edge between 2-valent finite vertices
        let err = Curve::new(
            vec![("A".into(), false), ("B".into(), false)],
            vec![
                edge("e1", "A", "B", EdgeLength::Infinite, 1),
                edge("e2", "A", "B", EdgeLength::Finite(rat_int(1)), 1),
                edge("e3", "A", "B", EdgeLength::Finite(rat_int(1)), 1),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InfiniteInnerEdge(_)));

        // two infinite endpoints on one edge
        let err = Curve::new(
            vec![("I1".into(), true), ("I2".into(), true)],
            vec![edge("e", "I1", "I2", EdgeLength::Infinite, 1)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DoubleInfiniteEdge(_)));

        // disconnected
        let err = Curve::new(
            vec![
                ("A".into(), false),
                ("B".into(), false),
                ("C".into(), false),
                ("D".into(), false),
            ],
            vec![
                edge("e1", "A", "B", EdgeLength::Finite(rat_int(1)), 1),
                edge("e2", "B", "A", EdgeLength::Finite(rat_int(1)), 1),
                edge("e3", "C", "D", EdgeLength::Finite(rat_int(1)), 1),
                edge("e4", "D", "C", EdgeLength::Finite(rat_int(1)), 1),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Disconnected));

        // multiplicity jump across a 2-valent vertex
        let err = Curve::new(
            vec![
                ("I1".into(), true),
                ("I2".into(), true),
                ("M".into(), false),
            ],
            vec![
                edge("e1", "M", "I1", EdgeLength::Infinite, 1),
                edge("e2", "M", "I2", EdgeLength::Infinite, 2),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::MultiplicityMismatchAt2Valent(_)));

        // circle with mixed multiplicities
        let err = Curve::new(
            vec![("A".into(), false), ("B".into(), false)],
            vec![
                edge("e1", "A", "B", EdgeLength::Finite(rat_int(1)), 1),
                edge("e2", "A", "B", EdgeLength::Finite(rat_int(2)), 2),
            ],
        )
        .unwrap_err();
        assert_eq!(err, Error::BadCircleMultiplicity);

        // duplicate ids
        let err = Curve::new(
            vec![("A".into(), false), ("A".into(), false)],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateId(_)));

        // end of an infinite edge not marked as an infinite point
        let err = Curve::new(
            vec![
                ("M".into(), false),
                ("I1".into(), false),
                ("I2".into(), true),
            ],
            vec![
                edge("e1", "M", "I1", EdgeLength::Infinite, 1),
                edge("e2", "M", "I2", EdgeLength::Infinite, 1),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::BadVertexKind(_)));
    }

    #[test]
    fn degenerate_curves() {
        // single vertex, no edges
        let c = Curve::new(vec![("P".into(), false)], vec![]).unwrap();
        assert!(!c.is_circle());
        assert_eq!(c.vertex_valence(0), 0);

        // single vertex with a loop is a circle
        let c = Curve::new(
            vec![("A".into(), false)],
            vec![edge("e", "A", "A", EdgeLength::Finite(rat_int(3)), 2)],
        )
        .unwrap();
        assert!(c.is_circle());
        assert_eq!(c.vertex_valence(0), 2);
    }

    #[test]
    fn point_canonicalization() {
        let c = fixtures::circle(rat_int(1), rat_int(2));
        // offset 0 collapses to the first endpoint, full length to the second
        assert_eq!(
            c.canonical_point(&Point::on_edge("e1", rat_int(0))).unwrap(),
            Point::vertex("A")
        );
        assert_eq!(
            c.canonical_point(&Point::on_edge("e1", rat_int(1))).unwrap(),
            Point::vertex("B")
        );
        assert_eq!(
            c.canonical_point(&Point::on_edge("e2", rat(1, 2))).unwrap(),
            Point::on_edge("e2", rat(1, 2))
        );
        assert!(c.canonical_point(&Point::on_edge("e1", rat(3, 2))).is_err());
        assert!(c.canonical_point(&Point::on_edge("zz", rat(1, 2))).is_err());
        assert!(c.canonical_point(&Point::vertex("zz")).is_err());

        let s = fixtures::star(3);
        // any positive offset is interior to an infinite edge
        assert_eq!(
            s.canonical_point(&Point::on_edge("e1", rat_int(100))).unwrap(),
            Point::on_edge("e1", rat_int(100))
        );
    }

    #[test]
    fn valences() {
        let s = fixtures::star(3);
        assert_eq!(s.valence(&Point::vertex("O")).unwrap(), 3);
        assert_eq!(s.valence(&Point::vertex("I1")).unwrap(), 1);
        assert_eq!(s.valence(&Point::on_edge("e1", rat(1, 2))).unwrap(), 2);
    }

    #[test]
    fn distances_on_circle_and_star() {
        let c = fixtures::circle(rat_int(1), rat_int(2));
        let d = c
            .distance(&Point::vertex("A"), &Point::vertex("B"))
            .unwrap();
        assert_eq!(d, EdgeLength::Finite(rat_int(1)));
        // e2 is parameterized from A, so offset 1/2 sits 1/2 away from A
        let d = c
            .distance(&Point::on_edge("e2", rat(1, 2)), &Point::vertex("A"))
            .unwrap();
        assert_eq!(d, EdgeLength::Finite(rat(1, 2)));
        // two interior points on opposite arcs
        let d = c
            .distance(
                &Point::on_edge("e1", rat(1, 2)),
                &Point::on_edge("e2", rat(1, 2)),
            )
            .unwrap();
        assert_eq!(d, EdgeLength::Finite(rat_int(1)));

        let s = fixtures::star(3);
        let d = s
            .distance(&Point::on_edge("e1", rat_int(2)), &Point::on_edge("e2", rat_int(3)))
            .unwrap();
        assert_eq!(d, EdgeLength::Finite(rat_int(5)));
        let d = s.distance(&Point::vertex("I1"), &Point::vertex("O")).unwrap();
        assert_eq!(d, EdgeLength::Infinite);
        // distance through a leaf point to itself
        let p = Point::on_edge("e1", rat(7, 3));
        assert_eq!(s.distance(&p, &p).unwrap(), EdgeLength::Finite(rat_int(0)));
    }
}
