//! JSON formats for everything the command line reads and writes.
//!
//! Rationals travel as `"p/q"` strings (integers are also accepted bare or
//! as JSON numbers). A function or automorphism is serialized on the
//! refinement that realizes its breaks as vertices, so the file format needs
//! no separate break syntax: cut vertices carry the kinks, edge profiles
//! reduce to leaf slopes. Output is canonical: keys are sorted, arrays follow
//! storage order, and re-serializing a parsed object reproduces the bytes.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::automorphism::{validate_group, AutGroup, Automorphism};
use crate::curve::{same_curve, Curve, EdgeLength, EdgeSpec, Point};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::plfn::{EdgeProfile, PlFunction, SlopeMode};
use crate::rat::{fmt_rat, is_integer, parse_rat, rat_int, to_i64, Rat};
use crate::refine::{refine, Refinement};

fn bad(msg: impl Into<String>) -> Error {
    Error::BadInput(msg.into())
}

fn obj<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| bad(format!("{what}: expected an object")))
}

fn get<'a>(m: &'a Map<String, Value>, k: &str, what: &str) -> Result<&'a Value> {
    m.get(k)
        .ok_or_else(|| bad(format!("{what}: missing field `{k}`")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| bad(format!("{what}: expected a string")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a [Value]> {
    v.as_array()
        .map(Vec::as_slice)
        .ok_or_else(|| bad(format!("{what}: expected an array")))
}

pub fn rat_to_json(r: &Rat) -> Value {
    Value::String(fmt_rat(r))
}

pub fn rat_from_json(v: &Value, what: &str) -> Result<Rat> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(rat_int)
            .ok_or_else(|| bad(format!("{what}: number out of range"))),
        Value::String(s) => parse_rat(s),
        _ => Err(bad(format!("{what}: expected a rational"))),
    }
}

/// Integer coefficients print as JSON numbers, anything else as `"p/q"`.
pub fn number_to_json(r: &Rat) -> Value {
    if is_integer(r) {
        if let Some(n) = to_i64(r) {
            return json!(n);
        }
    }
    rat_to_json(r)
}

// ---------------------------------------------------------------------------
// Curves and points
// ---------------------------------------------------------------------------

pub fn curve_to_json(c: &Curve) -> Value {
    let vertices: Vec<Value> = c
        .vertices()
        .iter()
        .map(|v| json!({"id": v.id.0, "infinite": v.infinite}))
        .collect();
    let edges: Vec<Value> = c
        .edges()
        .iter()
        .map(|e| {
            let length = match &e.length {
                EdgeLength::Finite(l) => Value::String(fmt_rat(l)),
                EdgeLength::Infinite => Value::String("inf".into()),
            };
            json!({
                "id": e.id.0,
                "ends": [c.vertex(e.ends[0]).id.0, c.vertex(e.ends[1]).id.0],
                "length": length,
                "multiplicity": e.multiplicity,
            })
        })
        .collect();
    json!({"vertices": vertices, "edges": edges})
}

pub fn curve_from_json(v: &Value) -> Result<Arc<Curve>> {
    let m = obj(v, "curve")?;
    let mut vertices = Vec::new();
    for vv in as_array(get(m, "vertices", "curve")?, "vertices")? {
        let vm = obj(vv, "vertex")?;
        let id = as_str(get(vm, "id", "vertex")?, "vertex id")?.to_string();
        let infinite = get(vm, "infinite", "vertex")?
            .as_bool()
            .ok_or_else(|| bad("vertex `infinite`: expected a bool"))?;
        vertices.push((id, infinite));
    }
    let mut edges = Vec::new();
    for ev in as_array(get(m, "edges", "curve")?, "edges")? {
        let em = obj(ev, "edge")?;
        let id = as_str(get(em, "id", "edge")?, "edge id")?.to_string();
        let ends = as_array(get(em, "ends", "edge")?, "edge ends")?;
        if ends.len() != 2 {
            return Err(bad(format!("edge `{id}`: ends must list two vertices")));
        }
        let ends = (
            as_str(&ends[0], "edge end")?.to_string(),
            as_str(&ends[1], "edge end")?.to_string(),
        );
        let length = match get(em, "length", "edge")? {
            Value::String(s) if s == "inf" => EdgeLength::Infinite,
            other => EdgeLength::Finite(rat_from_json(other, "edge length")?),
        };
        let multiplicity = match em.get("multiplicity") {
            None => 1,
            Some(mv) => mv
                .as_u64()
                .ok_or_else(|| bad(format!("edge `{id}`: multiplicity must be a positive integer")))?,
        };
        edges.push(EdgeSpec {
            id,
            ends,
            length,
            multiplicity,
        });
    }
    Ok(Arc::new(Curve::new(vertices, edges)?))
}

pub fn point_to_json(p: &Point) -> Value {
    match p {
        Point::Vertex(v) => json!({"vertex": v.0}),
        Point::Edge { edge, offset } => json!({"edge": edge.0, "offset": fmt_rat(offset)}),
    }
}

pub fn point_from_json(v: &Value) -> Result<Point> {
    let m = obj(v, "point")?;
    if let Some(id) = m.get("vertex") {
        return Ok(Point::vertex(as_str(id, "point vertex")?));
    }
    let edge = as_str(get(m, "edge", "point")?, "point edge")?;
    let offset = rat_from_json(get(m, "offset", "point")?, "point offset")?;
    Ok(Point::on_edge(edge, offset))
}

// ---------------------------------------------------------------------------
// Divisors
// ---------------------------------------------------------------------------

pub fn divisor_to_json(d: &Divisor) -> Value {
    let terms: Vec<Value> = d
        .support()
        .map(|p| {
            let c = d.coeff(p).expect("support points have coefficients");
            json!({"point": point_to_json(p), "coeff": number_to_json(&c)})
        })
        .collect();
    json!({"terms": terms})
}

pub fn divisor_from_json(curve: &Arc<Curve>, v: &Value) -> Result<Divisor> {
    let m = obj(v, "divisor")?;
    let mut terms = Vec::new();
    for tv in as_array(get(m, "terms", "divisor")?, "divisor terms")? {
        let tm = obj(tv, "divisor term")?;
        let p = point_from_json(get(tm, "point", "divisor term")?)?;
        let c = rat_from_json(get(tm, "coeff", "divisor term")?, "divisor coefficient")?;
        terms.push((p, c));
    }
    Divisor::new(curve, terms)
}

// ---------------------------------------------------------------------------
// Refinements, functions, automorphisms
// ---------------------------------------------------------------------------

pub fn refinement_to_json(r: &Refinement) -> Value {
    let base = r.base();
    let mut cuts = Map::new();
    for (ei, e) in base.edges().iter().enumerate() {
        let offs = r.cuts(ei);
        if !offs.is_empty() {
            cuts.insert(
                e.id.0.clone(),
                Value::Array(offs.iter().map(rat_to_json).collect()),
            );
        }
    }
    json!({"base": curve_to_json(base), "cuts": cuts})
}

/// Accepts either a refinement spec `{"base": .., "cuts": ..}` or a bare
/// curve (meaning the trivial refinement).
pub fn refinement_from_json(v: &Value) -> Result<Refinement> {
    let m = obj(v, "refinement")?;
    if m.contains_key("vertices") {
        let base = curve_from_json(v)?;
        return refine(&base, &[]);
    }
    let base = curve_from_json(get(m, "base", "refinement")?)?;
    let mut points = Vec::new();
    if let Some(cv) = m.get("cuts") {
        for (edge, offsets) in obj(cv, "cuts")? {
            for ov in as_array(offsets, "cut offsets")? {
                points.push(Point::on_edge(
                    edge.clone(),
                    rat_from_json(ov, "cut offset")?,
                ));
            }
        }
    }
    refine(&base, &points)
}

pub fn function_to_json(f: &PlFunction) -> Result<Value> {
    let curve = f.curve();
    let mut pts = Vec::new();
    for (ei, e) in curve.edges().iter().enumerate() {
        for (t, _) in &f.profile(ei).breaks {
            pts.push(Point::on_edge(e.id.0.clone(), t.clone()));
        }
    }
    let r = refine(curve, &pts)?;
    let fine = r.refined();
    let mut values = Map::new();
    for (vi, v) in fine.vertices().iter().enumerate() {
        if !v.infinite {
            values.insert(v.id.0.clone(), rat_to_json(&f.eval(r.vertex_point(vi))?));
        }
    }
    let mut leaf_slopes = Map::new();
    for e in fine.edges() {
        if e.length.is_finite() {
            continue;
        }
        let probe = r.to_base(&Point::on_edge(e.id.0.clone(), rat_int(1)))?;
        let base_ei = match &probe {
            Point::Edge { edge, .. } => curve.edge_index(edge)?,
            Point::Vertex(_) => return Err(Error::Internal("tail probe hit a vertex".into())),
        };
        let slope = f
            .profile(base_ei)
            .leaf_slope
            .clone()
            .ok_or_else(|| Error::Internal("infinite edge without a leaf slope".into()))?;
        leaf_slopes.insert(e.id.0.clone(), rat_to_json(&slope));
    }
    Ok(json!({
        "mode": match f.mode() { SlopeMode::Integer => "Z", SlopeMode::Rational => "Q" },
        "refinement": refinement_to_json(&r),
        "values": values,
        "leaf_slopes": leaf_slopes,
    }))
}

pub fn function_from_json(v: &Value) -> Result<PlFunction> {
    let m = obj(v, "function")?;
    let mode = match as_str(get(m, "mode", "function")?, "function mode")? {
        "Z" => SlopeMode::Integer,
        "Q" => SlopeMode::Rational,
        other => return Err(bad(format!("function mode must be Z or Q, got `{other}`"))),
    };
    let r = refinement_from_json(get(m, "refinement", "function")?)?;
    let mut values = BTreeMap::new();
    for (id, val) in obj(get(m, "values", "function")?, "function values")? {
        values.insert(id.clone(), rat_from_json(val, "function value")?);
    }
    let mut profiles: BTreeMap<String, EdgeProfile> = BTreeMap::new();
    if let Some(ls) = m.get("leaf_slopes") {
        for (id, val) in obj(ls, "leaf_slopes")? {
            profiles.insert(
                id.clone(),
                EdgeProfile {
                    breaks: Vec::new(),
                    leaf_slope: Some(rat_from_json(val, "leaf slope")?),
                },
            );
        }
    }
    PlFunction::new(r.refined(), mode, values, profiles)?.to_base(&r)
}

pub fn automorphism_to_json(g: &Automorphism) -> Value {
    let r = g.refinement();
    let fine = r.refined();
    let mut vertex_map = Map::new();
    for (vi, v) in fine.vertices().iter().enumerate() {
        vertex_map.insert(
            v.id.0.clone(),
            Value::String(fine.vertex(g.vertex_map()[vi]).id.0.clone()),
        );
    }
    let mut edge_map = Map::new();
    for (ei, e) in fine.edges().iter().enumerate() {
        let (ti, rev) = g.edge_map()[ei];
        edge_map.insert(
            e.id.0.clone(),
            json!({"to": fine.edge(ti).id.0, "reversed": rev}),
        );
    }
    json!({
        "refinement": refinement_to_json(r),
        "vertex_map": vertex_map,
        "edge_map": edge_map,
    })
}

pub fn automorphism_from_json(v: &Value) -> Result<Automorphism> {
    let m = obj(v, "automorphism")?;
    let r = Arc::new(refinement_from_json(get(m, "refinement", "automorphism")?)?);
    let fine = r.refined();
    let vm = obj(get(m, "vertex_map", "automorphism")?, "vertex_map")?;
    let mut vmap = Vec::with_capacity(fine.vertices().len());
    for v in fine.vertices() {
        let img = as_str(
            get(vm, &v.id.0, "vertex_map")?,
            "vertex image",
        )?;
        vmap.push(fine.vertex_index(&img.into())?);
    }
    let em = obj(get(m, "edge_map", "automorphism")?, "edge_map")?;
    let mut emap = Vec::with_capacity(fine.edges().len());
    for e in fine.edges() {
        let entry = obj(get(em, &e.id.0, "edge_map")?, "edge image")?;
        let to = as_str(get(entry, "to", "edge image")?, "edge image")?;
        let reversed = get(entry, "reversed", "edge image")?
            .as_bool()
            .ok_or_else(|| bad("edge image `reversed`: expected a bool"))?;
        emap.push((fine.edge_index(&to.into())?, reversed));
    }
    Automorphism::from_parts(r, vmap, emap)
}

pub fn group_to_json(g: &AutGroup) -> Value {
    Value::Array(g.elements().iter().map(automorphism_to_json).collect())
}

pub fn group_elements_from_json(v: &Value) -> Result<Vec<Automorphism>> {
    as_array(v, "group")?
        .iter()
        .map(automorphism_from_json)
        .collect()
}

/// Parse a group file and canonicalize it against `curve`; all validation
/// diagnostics refer to positions in the file's element list.
pub fn group_from_json(curve: &Arc<Curve>, v: &Value) -> Result<AutGroup> {
    let els = group_elements_from_json(v)?;
    for e in &els {
        if !same_curve(e.base(), curve) {
            return Err(Error::BaseMismatch);
        }
    }
    validate_group(curve, &els)
}

// ---------------------------------------------------------------------------
// Cocycles
// ---------------------------------------------------------------------------

/// Group plus the permutation sending each file position to the canonical
/// index, so values keyed by file positions can be reindexed.
fn cocycle_parts<'a>(
    curve: &Arc<Curve>,
    v: &'a Value,
) -> Result<(AutGroup, Vec<usize>, &'a Map<String, Value>)> {
    let m = obj(v, "cocycle")?;
    let els = group_elements_from_json(get(m, "group", "cocycle")?)?;
    for e in &els {
        if !same_curve(e.base(), curve) {
            return Err(Error::BaseMismatch);
        }
    }
    let group = validate_group(curve, &els)?;
    let mut perm = Vec::with_capacity(els.len());
    for e in &els {
        let pos = group
            .elements()
            .iter()
            .position(|g| g == e)
            .ok_or_else(|| Error::Internal("validated element missing from the group".into()))?;
        perm.push(pos);
    }
    let values = obj(get(m, "values", "cocycle")?, "cocycle values")?;
    Ok((group, perm, values))
}

/// Parse `{"group": .., "values": {"<i>": ..}}`; the returned values are in
/// canonical element order.
pub fn cocycle1_from_json(curve: &Arc<Curve>, v: &Value) -> Result<(AutGroup, Vec<Value>)> {
    let (group, perm, values) = cocycle_parts(curve, v)?;
    let n = group.order();
    let mut out: Vec<Option<Value>> = vec![None; n];
    for (k, val) in values {
        let i: usize = k
            .parse()
            .map_err(|_| bad(format!("cocycle key `{k}`: expected an element index")))?;
        if i >= n {
            return Err(bad(format!("cocycle key `{k}` exceeds the group order")));
        }
        out[perm[i]] = Some(val.clone());
    }
    let out = out
        .into_iter()
        .enumerate()
        .map(|(i, o)| o.ok_or_else(|| bad(format!("cocycle is missing a value at element {i}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((group, out))
}

/// Parse `{"group": .., "values": {"<i>,<j>": ..}}` (canonical order again).
pub fn cocycle2_from_json(curve: &Arc<Curve>, v: &Value) -> Result<(AutGroup, Vec<Vec<Value>>)> {
    let (group, perm, values) = cocycle_parts(curve, v)?;
    let n = group.order();
    let mut out: Vec<Vec<Option<Value>>> = vec![vec![None; n]; n];
    for (k, val) in values {
        let (a, b) = k
            .split_once(',')
            .ok_or_else(|| bad(format!("cocycle key `{k}`: expected `i,j`")))?;
        let i: usize = a.parse().map_err(|_| bad(format!("cocycle key `{k}`")))?;
        let j: usize = b.parse().map_err(|_| bad(format!("cocycle key `{k}`")))?;
        if i >= n || j >= n {
            return Err(bad(format!("cocycle key `{k}` exceeds the group order")));
        }
        out[perm[i]][perm[j]] = Some(val.clone());
    }
    let out = out
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, o)| {
                    o.ok_or_else(|| {
                        bad(format!("cocycle is missing a value at elements ({i}, {j})"))
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((group, out))
}

pub fn cocycle1_to_json(group: &AutGroup, values: &[Value]) -> Value {
    let mut m = Map::new();
    for (i, v) in values.iter().enumerate() {
        m.insert(i.to_string(), v.clone());
    }
    json!({"group": group_to_json(group), "values": m})
}

pub fn cocycle2_to_json(group: &AutGroup, values: &[Vec<Value>]) -> Value {
    let mut m = Map::new();
    for (i, row) in values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m.insert(format!("{i},{j}"), v.clone());
        }
    }
    json!({"group": group_to_json(group), "values": m})
}

/// Pretty-printed with sorted keys and a trailing newline: the one canonical
/// byte form used everywhere.
pub fn canonical_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
