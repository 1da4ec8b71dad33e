//! JSON graph file format.
//!
//! ```json
//! {
//!   "ambient": {"kind": "euclidean"},
//!   "vertices": [{"id": "a", "pos": [0, 0, 0]}, ...],
//!   "arcs": [{"id": "e0", "from": "a", "to": "b",
//!             "geometry": {"kind": "segment"}}, ...]
//! }
//! ```
//!
//! Geometry kinds: `segment` (optional `"a"`, `"b"`, defaulting to the vertex
//! positions), `circular` (`center`, `normal` or `axis`+`axis2`, optional `axis`,
//! `radius`, `angle0`, `angle1`), `polyline` (`points`) and `chain` (`pieces`,
//! a list of geometries). Curved ambients use 4 embedding coordinates.

use serde_json::{json, Map, Value};

use crate::arc::{ArcGeometry, CircularArc};
use crate::error::{Error, Result};
use crate::graph::EmbeddedGraph;
use crate::space::{ModelSpace, Vec4};

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(format!("{ctx}: missing `{key}`")))
}

fn as_obj<'a>(v: &'a Value, ctx: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(format!("{ctx}: expected an object")))
}

fn as_str<'a>(v: &'a Value, ctx: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema(format!("{ctx}: expected a string")))
}

fn as_f64(v: &Value, ctx: &str) -> Result<f64> {
    let x = v.as_f64().ok_or_else(|| schema(format!("{ctx}: expected a number")))?;
    if !x.is_finite() {
        return Err(schema(format!("{ctx}: non-finite number")));
    }
    Ok(x)
}

fn as_vec(v: &Value, len: usize, ctx: &str) -> Result<Vec4> {
    let a = v.as_array().ok_or_else(|| schema(format!("{ctx}: expected an array")))?;
    if a.len() != len {
        return Err(schema(format!("{ctx}: expected {len} coordinates, got {}", a.len())));
    }
    let mut out = Vec4::zeros();
    for (i, x) in a.iter().enumerate() {
        out[i] = as_f64(x, ctx)?;
    }
    Ok(out)
}

pub fn parse_ambient(v: &Value) -> Result<ModelSpace> {
    let o = as_obj(v, "ambient")?;
    let kind = as_str(field(o, "kind", "ambient")?, "ambient.kind")?;
    let kappa = || -> Result<f64> { as_f64(field(o, "kappa", "ambient")?, "ambient.kappa") };
    let s = match kind {
        "euclidean" => ModelSpace::Euclidean,
        "hyperbolic" => ModelSpace::Hyperbolic { kappa: kappa()? },
        "spherical" => ModelSpace::Spherical { kappa: kappa()? },
        k => return Err(schema(format!("unknown ambient kind `{k}`"))),
    };
    s.check_kappa().map_err(|e| schema(e.to_string()))?;
    Ok(s)
}

fn parse_geometry(v: &Value, n: usize, from: &Vec4, to: &Vec4, ctx: &str) -> Result<ArcGeometry> {
    let o = as_obj(v, ctx)?;
    let kind = as_str(field(o, "kind", ctx)?, ctx)?;
    let opt_vec = |k: &str, len: usize| -> Result<Option<Vec4>> {
        o.get(k).map(|x| as_vec(x, len, &format!("{ctx}.{k}"))).transpose()
    };
    match kind {
        "segment" => {
            let a = opt_vec("a", n)?.unwrap_or(*from);
            let b = opt_vec("b", n)?.unwrap_or(*to);
            Ok(ArcGeometry::Segment { a, b })
        }
        "circular" => {
            let center = as_vec(field(o, "center", ctx)?, n, &format!("{ctx}.center"))?;
            let num = |k: &str| -> Result<f64> { as_f64(field(o, k, ctx)?, &format!("{ctx}.{k}")) };
            let c = CircularArc::new(
                center,
                opt_vec("normal", 3)?,
                opt_vec("axis", n)?,
                opt_vec("axis2", n)?,
                num("radius")?,
                num("angle0")?,
                num("angle1")?,
            )?;
            Ok(ArcGeometry::Circular(c))
        }
        "polyline" => {
            let pts = field(o, "points", ctx)?
                .as_array()
                .ok_or_else(|| schema(format!("{ctx}.points: expected an array")))?
                .iter()
                .map(|p| as_vec(p, n, &format!("{ctx}.points")))
                .collect::<Result<Vec<_>>>()?;
            ArcGeometry::polyline(pts)
        }
        "chain" => {
            let pieces = field(o, "pieces", ctx)?
                .as_array()
                .ok_or_else(|| schema(format!("{ctx}.pieces: expected an array")))?;
            if pieces.is_empty() {
                return Err(schema(format!("{ctx}.pieces: empty chain")));
            }
            let mut out = Vec::with_capacity(pieces.len());
            for (i, p) in pieces.iter().enumerate() {
                // Segment pieces must give explicit endpoints.
                let sub = parse_geometry(p, n, &Vec4::repeat(f64::NAN), &Vec4::repeat(f64::NAN), &format!("{ctx}.pieces[{i}]"))?;
                if let ArcGeometry::Segment { a, b } = &sub {
                    if a.iter().chain(b.iter()).any(|x| x.is_nan()) {
                        return Err(schema(format!("{ctx}.pieces[{i}]: segment pieces need `a` and `b`")));
                    }
                }
                out.push(sub);
            }
            Ok(ArcGeometry::Chain(out))
        }
        k => Err(schema(format!("{ctx}: unknown geometry kind `{k}`"))),
    }
}

pub fn graph_from_value(v: &Value) -> Result<EmbeddedGraph> {
    let o = as_obj(v, "graph")?;
    let space = parse_ambient(field(o, "ambient", "graph")?)?;
    let n = space.coord_len();
    let mut verts = Vec::new();
    for (i, vv) in field(o, "vertices", "graph")?
        .as_array()
        .ok_or_else(|| schema("vertices: expected an array"))?
        .iter()
        .enumerate()
    {
        let ctx = format!("vertices[{i}]");
        let vo = as_obj(vv, &ctx)?;
        let id = as_str(field(vo, "id", &ctx)?, &ctx)?.to_string();
        let pos = field(vo, "pos", &ctx)?
            .as_array()
            .ok_or_else(|| schema(format!("{ctx}.pos: expected an array")))?
            .iter()
            .map(|x| as_f64(x, &ctx))
            .collect::<Result<Vec<_>>>()?;
        verts.push((id, space.point_from_coords(&pos)?));
    }
    let mut arcs = Vec::new();
    for (i, av) in field(o, "arcs", "graph")?
        .as_array()
        .ok_or_else(|| schema("arcs: expected an array"))?
        .iter()
        .enumerate()
    {
        let ctx = format!("arcs[{i}]");
        let ao = as_obj(av, &ctx)?;
        let id = as_str(field(ao, "id", &ctx)?, &ctx)?.to_string();
        let from = as_str(field(ao, "from", &ctx)?, &ctx)?.to_string();
        let to = as_str(field(ao, "to", &ctx)?, &ctx)?.to_string();
        let lookup = |name: &str| {
            verts.iter().find(|(vid, _)| vid == name).map(|(_, p)| *p).ok_or_else(|| Error::UnknownVertex(name.to_string()))
        };
        let (pf, pt) = (lookup(&from)?, lookup(&to)?);
        let geom = parse_geometry(field(ao, "geometry", &ctx)?, n, &pf, &pt, &format!("{ctx}.geometry"))?;
        arcs.push((id, from, to, geom));
    }
    let mut g = EmbeddedGraph::new(space, verts, arcs)?;
    if let Some(notes) = o.get("notes") {
        for nv in notes.as_array().ok_or_else(|| schema("notes: expected an array"))? {
            g.notes.push(as_str(nv, "notes")?.to_string());
        }
    }
    Ok(g)
}

pub fn graph_from_json(text: &str) -> Result<EmbeddedGraph> {
    let v: Value = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    graph_from_value(&v)
}

fn coords(space: &ModelSpace, p: &Vec4) -> Value {
    json!(space.coords(p))
}

fn geometry_value(space: &ModelSpace, g: &ArcGeometry) -> Value {
    let n = space.coord_len();
    match g {
        ArcGeometry::Segment { a, b } => json!({"kind": "segment", "a": coords(space, a), "b": coords(space, b)}),
        ArcGeometry::Circular(c) => {
            let mut m = Map::new();
            m.insert("kind".into(), json!("circular"));
            m.insert("center".into(), coords(space, &c.center));
            if let Some(nv) = &c.normal {
                m.insert("normal".into(), json!(nv.as_slice()[..3].to_vec()));
            }
            if let Some(a) = &c.axis {
                m.insert("axis".into(), json!(a.as_slice()[..n].to_vec()));
            }
            if let Some(a) = &c.axis2 {
                m.insert("axis2".into(), json!(a.as_slice()[..n].to_vec()));
            }
            m.insert("radius".into(), json!(c.radius));
            m.insert("angle0".into(), json!(c.angle0));
            m.insert("angle1".into(), json!(c.angle1));
            Value::Object(m)
        }
        ArcGeometry::Polyline(s) => {
            json!({"kind": "polyline", "points": s.points.iter().map(|p| coords(space, p)).collect::<Vec<_>>()})
        }
        ArcGeometry::Chain(p) => {
            json!({"kind": "chain", "pieces": p.iter().map(|x| geometry_value(space, x)).collect::<Vec<_>>()})
        }
    }
}

pub fn graph_to_value(g: &EmbeddedGraph) -> Value {
    let s = &g.space;
    let ambient = match *s {
        ModelSpace::Euclidean => json!({"kind": "euclidean"}),
        ModelSpace::Hyperbolic { kappa } => json!({"kind": "hyperbolic", "kappa": kappa}),
        ModelSpace::Spherical { kappa } => json!({"kind": "spherical", "kappa": kappa}),
    };
    let vertices: Vec<Value> = g.vertices.iter().map(|v| json!({"id": v.id, "pos": coords(s, &v.pos)})).collect();
    let arcs: Vec<Value> = g
        .arcs
        .iter()
        .map(|a| {
            json!({
                "id": a.id,
                "from": g.vertices[a.from].id,
                "to": g.vertices[a.to].id,
                "geometry": geometry_value(s, &a.geometry),
            })
        })
        .collect();
    let mut m = Map::new();
    m.insert("ambient".into(), ambient);
    m.insert("vertices".into(), Value::Array(vertices));
    m.insert("arcs".into(), Value::Array(arcs));
    if !g.notes.is_empty() {
        m.insert("notes".into(), json!(g.notes));
    }
    Value::Object(m)
}

pub fn graph_to_json(g: &EmbeddedGraph) -> String {
    serde_json::to_string_pretty(&graph_to_value(g)).expect("graph values always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_parses_with_default_segment_ends() {
        let text = r#"{
            "ambient": {"kind": "euclidean"},
            "vertices": [{"id": "a", "pos": [0, 0, 0]}, {"id": "b", "pos": [1, 0, 0]}],
            "arcs": [
                {"id": "e0", "from": "a", "to": "b", "geometry": {"kind": "segment"}},
                {"id": "e1", "from": "b", "to": "a", "geometry":
                    {"kind": "circular", "center": [0.5, 0, 0], "normal": [0, 0, 1],
                     "radius": 0.5, "angle0": 0, "angle1": 3.141592653589793}}
            ]
        }"#;
        let g = graph_from_json(text).unwrap();
        assert_eq!(g.arcs.len(), 2);
        assert!(g.validate().is_empty(), "{:?}", g.validate());
        let back = graph_from_json(&graph_to_json(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(graph_from_json("{"), Err(Error::Schema(_))));
        assert!(matches!(graph_from_json(r#"{"ambient": {"kind": "flat"}, "vertices": [], "arcs": []}"#), Err(Error::Schema(_))));
        let bad_len = r#"{"ambient": {"kind": "euclidean"}, "vertices": [{"id": "a", "pos": [0, 0]}], "arcs": []}"#;
        assert!(matches!(graph_from_json(bad_len), Err(Error::Schema(_))));
        let hyp = r#"{"ambient": {"kind": "hyperbolic", "kappa": -1}, "vertices": [], "arcs": []}"#;
        assert!(matches!(graph_from_json(hyp), Err(Error::Schema(_))));
    }
}
