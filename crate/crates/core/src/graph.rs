//! Embedded graphs, regularity checks and combinatorial utilities.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arc::{ArcGeometry, End};
use crate::error::{Error, Result};
use crate::space::{ModelSpace, Vec4};

/// Number of samples per arc used by the injectivity test.
pub const N_CHECK: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Incidence {
    pub arc: usize,
    pub end: End,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphVertex {
    pub id: String,
    pub pos: Vec4,
    pub incidences: Vec<Incidence>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphArc {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub geometry: ArcGeometry,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedGraph {
    pub space: ModelSpace,
    pub vertices: Vec<GraphVertex>,
    pub arcs: Vec<GraphArc>,
    /// Free-form remarks carried along with the graph (e.g. by built-in examples).
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub code: String,
    pub location: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: &str) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    fn push(&mut self, code: &str, location: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation { code: code.into(), location: location.into(), message: message.into() });
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// Closed walk on the edge-doubled multigraph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerCircuit {
    pub steps: Vec<(String, Direction)>,
}

impl EmbeddedGraph {
    /// Builds a graph from vertex and arc lists, resolving ids. Incidences are
    /// recorded in arc order, start before finish.
    pub fn new(
        space: ModelSpace,
        vertices: Vec<(String, Vec4)>,
        arcs: Vec<(String, String, String, ArcGeometry)>,
    ) -> Result<Self> {
        space.check_kappa()?;
        let mut index = HashMap::new();
        let mut verts = Vec::with_capacity(vertices.len());
        for (i, (id, pos)) in vertices.into_iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId(id));
            }
            verts.push(GraphVertex { id, pos, incidences: Vec::new() });
        }
        let mut arc_ids = HashMap::new();
        let mut out = Vec::with_capacity(arcs.len());
        for (k, (id, from, to, geometry)) in arcs.into_iter().enumerate() {
            if arc_ids.insert(id.clone(), k).is_some() || index.contains_key(&id) {
                return Err(Error::DuplicateId(id));
            }
            let f = *index.get(&from).ok_or(Error::UnknownVertex(from))?;
            let t = *index.get(&to).ok_or(Error::UnknownVertex(to))?;
            verts[f].incidences.push(Incidence { arc: k, end: End::Start });
            verts[t].incidences.push(Incidence { arc: k, end: End::Finish });
            out.push(GraphArc { id, from: f, to: t, geometry });
        }
        Ok(EmbeddedGraph { space, vertices: verts, arcs: out, notes: Vec::new() })
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertices.iter().position(|v| v.id == id).ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn arc_index(&self, id: &str) -> Result<usize> {
        self.arcs.iter().position(|a| a.id == id).ok_or_else(|| Error::UnknownArc(id.to_string()))
    }

    pub fn valence(&self, v: usize) -> usize {
        self.vertices[v].incidences.len()
    }

    /// Points sampled along every arc (endpoints included).
    pub fn sample_points(&self, per_arc: usize) -> Vec<Vec4> {
        let n = per_arc.max(2);
        let mut out = Vec::with_capacity(self.arcs.len() * n);
        for a in &self.arcs {
            for i in 0..n {
                out.push(a.geometry.point(&self.space, i as f64 / (n - 1) as f64));
            }
        }
        out
    }

    /// Largest distance between sampled points (ambient chord length in Euclidean space).
    pub fn diameter(&self) -> f64 {
        let pts = self.sample_points(16);
        let mut d: f64 = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                d = d.max(self.space.dist(&pts[i], &pts[j]));
            }
        }
        d
    }

    /// Connected components as lists of vertex indices.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let c = out.len();
            let mut stack = vec![s];
            comp[s] = c;
            let mut members = Vec::new();
            while let Some(v) = stack.pop() {
                members.push(v);
                for inc in &self.vertices[v].incidences {
                    let a = &self.arcs[inc.arc];
                    for w in [a.from, a.to] {
                        if comp[w] == usize::MAX {
                            comp[w] = c;
                            stack.push(w);
                        }
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Checks the regularity assumptions; violations are returned as data.
    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let s = &self.space;
        if s.check_kappa().is_err() {
            r.push("BAD_KAPPA", "ambient", "curvature scale must be finite and positive");
            return r;
        }
        for v in &self.vertices {
            if !s.contains(&v.pos) {
                r.push("OFF_MODEL", format!("vertex {}", v.id), "position is not on the model space");
            }
            if v.incidences.len() < 2 {
                r.push("VALENCE_LT_2", format!("vertex {}", v.id), format!("valence {}", v.incidences.len()));
            }
        }
        let diam = self.diameter();
        let tol_pos = 1e-9 * diam.max(f64::MIN_POSITIVE);
        for a in &self.arcs {
            let loc = format!("arc {}", a.id);
            let g = &a.geometry;
            if let ArcGeometry::Polyline(sp) = g {
                if sp.points.len() < 4 {
                    r.push("POLYLINE_TOO_SHORT", &loc, format!("{} samples, need at least 4", sp.points.len()));
                }
            }
            if let ArcGeometry::Chain(p) = g {
                if p.is_empty() {
                    r.push("EMPTY_CHAIN", &loc, "chain has no pieces");
                    continue;
                }
            }
            for (end, vi) in [(End::Start, a.from), (End::Finish, a.to)] {
                let p = g.point(s, end.param());
                let d = s.dist(&p, &self.vertices[vi].pos);
                if !(d <= tol_pos) {
                    r.push(
                        "ENDPOINT_MISMATCH",
                        &loc,
                        format!("{} is {:.3e} from vertex {}", end.name(), d, self.vertices[vi].id),
                    );
                }
            }
            self.check_arc_samples(a, &mut r);
        }
        if let ModelSpace::Spherical { kappa } = *s {
            let pts = self.sample_points(16);
            let lim = std::f64::consts::FRAC_PI_2 / kappa;
            let worst = pts
                .iter()
                .enumerate()
                .flat_map(|(i, p)| pts[i + 1..].iter().map(move |q| s.dist(p, q)))
                .fold(0.0, f64::max);
            if worst >= lim {
                r.push("CONVEXITY_BALL", "graph", format!("diameter {worst:.6} exceeds π/(2κ)"));
            }
        }
        r
    }

    fn check_arc_samples(&self, a: &GraphArc, r: &mut ValidationReport) {
        let s = &self.space;
        let loc = format!("arc {}", a.id);
        let mut breaks = a.geometry.breakpoints();
        breaks.sort_by(f64::total_cmp);
        // Speed at Gauss-Kronrod nodes of each smooth piece, plus the ends.
        let mut nodes = vec![0.0, 1.0];
        for w in breaks.windows(2) {
            for i in 0..8 {
                nodes.push(w[0] + (w[1] - w[0]) * (i as f64 + 0.5) / 8.0);
            }
        }
        for t in nodes {
            let j = a.geometry.jet(s, t);
            let sp = s.norm(&j.vel);
            if !(sp > 0.0 && sp.is_finite()) {
                r.push("ZERO_SPEED", &loc, format!("|γ'| vanishes at t = {t}"));
                break;
            }
            if !s.is_euclidean() && !s.contains(&j.pos) {
                r.push("OFF_MODEL", &loc, format!("point at t = {t} is off the model"));
                break;
            }
        }
        let pts: Vec<Vec4> = (0..=N_CHECK).map(|i| a.geometry.point(s, i as f64 / N_CHECK as f64)).collect();
        // Local step at each sample: the shorter of its two neighbouring gaps.
        let gaps: Vec<f64> = pts.windows(2).map(|w| s.dist(&w[0], &w[1])).collect();
        let step: Vec<f64> = (0..pts.len())
            .map(|i| {
                let l = if i > 0 { gaps[i - 1] } else { f64::INFINITY };
                let r = gaps.get(i).copied().unwrap_or(f64::INFINITY);
                l.min(r)
            })
            .collect();
        let closed = a.from == a.to;
        'outer: for i in 0..pts.len() {
            for j in i + 2..pts.len() {
                if closed && i == 0 && j == N_CHECK {
                    continue;
                }
                if s.dist(&pts[i], &pts[j]) < 0.25 * step[i].min(step[j]) {
                    r.push("NON_INJECTIVE", &loc, format!("samples {i} and {j} nearly coincide"));
                    break 'outer;
                }
            }
        }
    }

    /// Unit tangents at a vertex, one per incidence, pointing into the arcs.
    pub fn vertex_tangents(&self, vertex_id: &str) -> Result<Vec<Vec4>> {
        let v = self.vertex_index(vertex_id)?;
        self.tangents_at(v)
    }

    pub fn tangents_at(&self, v: usize) -> Result<Vec<Vec4>> {
        self.vertices[v]
            .incidences
            .iter()
            .map(|inc| self.arcs[inc.arc].geometry.end_tangent(&self.space, inc.end))
            .collect()
    }

    /// Euler circuit of the multigraph in which every arc is doubled, built by
    /// Hierholzer's algorithm. Each arc is traversed once in each direction.
    pub fn doubled_euler_circuit(&self) -> Result<EulerCircuit> {
        if self.arcs.is_empty() || !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let edges: Vec<(usize, usize)> = self.arcs.iter().map(|a| (a.from, a.to)).collect();
        let walk = doubled_circuit(self.vertices.len(), &edges, self.arcs[0].from);
        Ok(EulerCircuit { steps: walk.into_iter().map(|(k, d)| (self.arcs[k].id.clone(), d)).collect() })
    }

    /// Applies a similarity `x ↦ scale·R·x + shift` to a Euclidean graph.
    pub fn transformed(&self, rot: &nalgebra::Matrix3<f64>, scale: f64, shift: &crate::space::Vec3) -> Result<Self> {
        if !self.space.is_euclidean() {
            return Err(Error::WrongSpace { expected: "euclidean" });
        }
        let mut g = self.clone();
        for v in &mut g.vertices {
            v.pos = (rot * v.pos.xyz() * scale + shift).push(0.0);
        }
        for a in &mut g.arcs {
            a.geometry = a.geometry.transformed(rot, scale, shift)?;
        }
        Ok(g)
    }

    /// Re-embeds a Euclidean graph in a curved model through the projective
    /// chart at the model origin (geodesics stay geodesics, distortion O(κ²)).
    pub fn lifted(&self, space: ModelSpace) -> Result<Self> {
        if !self.space.is_euclidean() {
            return Err(Error::WrongSpace { expected: "euclidean" });
        }
        space.check_kappa()?;
        if space.is_euclidean() {
            return Ok(self.clone());
        }
        let k = space.kappa();
        let mut g = self.clone();
        g.space = space;
        for v in &mut g.vertices {
            v.pos = lift_point(&space, &v.pos)?;
        }
        for a in &mut g.arcs {
            a.geometry = a.geometry.lifted(k)?;
        }
        Ok(g)
    }
}

/// Image of a Euclidean point under the projective chart at the model origin.
pub fn lift_point(space: &ModelSpace, p: &Vec4) -> Result<Vec4> {
    if space.is_euclidean() {
        return Ok(Vec4::new(p.x, p.y, p.z, 0.0));
    }
    let k = space.kappa();
    let raw = Vec4::new(p.x, p.y, p.z, 1.0 / k);
    if matches!(space, ModelSpace::Hyperbolic { .. }) && k * p.xyz().norm() >= 1.0 {
        return Err(Error::OffModel(format!("point {:?} lies outside the Klein ball of radius 1/κ", p.xyz())));
    }
    Ok(space.normalize_point(&raw))
}

/// Hierholzer's algorithm on a connected multigraph with every edge doubled.
/// Returns `(edge, direction)` steps of a closed walk starting at `start`.
pub fn doubled_circuit(n_vertices: usize, edges: &[(usize, usize)], start: usize) -> Vec<(usize, Direction)> {
    // Half-edge 2k is edge k forward, 2k+1 is edge k backward; each is used once.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n_vertices];
    for (k, &(a, b)) in edges.iter().enumerate() {
        adj[a].push(2 * k);
        adj[b].push(2 * k + 1);
    }
    let head = |h: usize| if h % 2 == 0 { edges[h / 2].1 } else { edges[h / 2].0 };
    let mut used = vec![false; 2 * edges.len()];
    let mut ptr = vec![0usize; n_vertices];
    let mut stack: Vec<(usize, Option<usize>)> = vec![(start, None)];
    let mut out = Vec::with_capacity(2 * edges.len());
    while let Some(&(v, _)) = stack.last() {
        let mut advanced = false;
        while ptr[v] < adj[v].len() {
            let h = adj[v][ptr[v]];
            ptr[v] += 1;
            if !used[h] {
                used[h] = true;
                stack.push((head(h), Some(h)));
                advanced = true;
                break;
            }
        }
        if !advanced {
            let (_, h) = stack.pop().unwrap();
            if let Some(h) = h {
                out.push(h);
            }
        }
    }
    out.reverse();
    out.into_iter()
        .map(|h| (h / 2, if h % 2 == 0 { Direction::Forward } else { Direction::Backward }))
        .collect()
}

/// Checks that `steps` is a closed walk using each edge exactly twice.
pub fn is_doubled_circuit(edges: &[(usize, usize)], steps: &[(usize, Direction)]) -> bool {
    if steps.len() != 2 * edges.len() {
        return false;
    }
    let mut count = vec![0usize; edges.len()];
    let ends = |&(k, d): &(usize, Direction)| match d {
        Direction::Forward => edges[k],
        Direction::Backward => (edges[k].1, edges[k].0),
    };
    for (i, s) in steps.iter().enumerate() {
        count[s.0] += 1;
        let (_, b) = ends(s);
        let (a2, _) = ends(&steps[(i + 1) % steps.len()]);
        if b != a2 {
            return false;
        }
    }
    count.iter().all(|&c| c == 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> EmbeddedGraph {
        let p = |x: f64, y: f64| Vec4::new(x, y, 0.0, 0.0);
        let vs = vec![("a".into(), p(0., 0.)), ("b".into(), p(1., 0.)), ("c".into(), p(1., 1.)), ("d".into(), p(0., 1.))];
        let es = [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")];
        let arcs = es
            .iter()
            .enumerate()
            .map(|(i, (f, t))| {
                let pa = vs.iter().find(|v| v.0 == *f).unwrap().1;
                let pb = vs.iter().find(|v| v.0 == *t).unwrap().1;
                (format!("e{i}"), f.to_string(), t.to_string(), ArcGeometry::segment(pa, pb))
            })
            .collect();
        EmbeddedGraph::new(ModelSpace::Euclidean, vs, arcs).unwrap()
    }

    #[test]
    fn square_validates_and_has_corner_tangents() {
        let g = square();
        assert!(g.validate().is_empty(), "{:?}", g.validate());
        let t = g.vertex_tangents("a").unwrap();
        assert_eq!(t.len(), 2);
        assert!((t[0] - Vec4::x()).norm() < 1e-15);
        assert!((t[1] - Vec4::y()).norm() < 1e-15);
    }

    #[test]
    fn displaced_endpoint_is_reported() {
        let mut g = square();
        g.vertices[1].pos.x += 1e-3;
        assert!(g.validate().has("ENDPOINT_MISMATCH"));
    }

    #[test]
    fn unknown_and_duplicate_ids_fail() {
        let v = vec![("a".to_string(), Vec4::zeros()), ("a".to_string(), Vec4::x())];
        assert_eq!(EmbeddedGraph::new(ModelSpace::Euclidean, v, vec![]), Err(Error::DuplicateId("a".into())));
        let v = vec![("a".to_string(), Vec4::zeros())];
        let arcs = vec![("e".into(), "a".into(), "zz".into(), ArcGeometry::segment(Vec4::zeros(), Vec4::x()))];
        assert_eq!(EmbeddedGraph::new(ModelSpace::Euclidean, v, arcs), Err(Error::UnknownVertex("zz".into())));
    }

    #[test]
    fn doubled_circuit_on_square() {
        let g = square();
        let c = g.doubled_euler_circuit().unwrap();
        assert_eq!(c.steps.len(), 8);
        let edges: Vec<_> = g.arcs.iter().map(|a| (a.from, a.to)).collect();
        let steps: Vec<_> = c.steps.iter().map(|(id, d)| (g.arc_index(id).unwrap(), *d)).collect();
        assert!(is_doubled_circuit(&edges, &steps));
    }

    #[test]
    fn disconnected_graph_has_no_circuit() {
        let p = |x: f64| Vec4::new(x, 0.0, 0.0, 0.0);
        let vs = vec![("a".into(), p(0.)), ("b".into(), p(1.)), ("c".into(), p(5.)), ("d".into(), p(6.))];
        let arcs = vec![
            ("e0".into(), "a".into(), "b".into(), ArcGeometry::segment(p(0.), p(1.))),
            ("e1".into(), "c".into(), "d".into(), ArcGeometry::segment(p(5.), p(6.))),
        ];
        let g = EmbeddedGraph::new(ModelSpace::Euclidean, vs, arcs).unwrap();
        assert_eq!(g.doubled_euler_circuit(), Err(Error::Disconnected));
        assert_eq!(g.components().len(), 2);
    }
}
