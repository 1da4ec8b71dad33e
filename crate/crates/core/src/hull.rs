//! Convex hulls of sampled graphs, taken in a chart where geodesics are straight.
//!
//! In the projective chart of a model space, geodesically convex sets are
//! exactly the convex sets, so the geodesic hull of a point set is the
//! ordinary hull of its chart image. The hull is computed in the affine span
//! of the points (dimension 0–3).

use std::collections::HashMap;

use nalgebra::{Matrix3, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::EmbeddedGraph;
use crate::space::{ModelSpace, ProjectiveChart, Vec3, Vec4};

/// Axes along which the points extend less than this fraction of the widest
/// extent are treated as flat.
const FLAT: f64 = 1e-6;

/// Half-space `normal · x ≤ offset` in local coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec3,
    pub offset: f64,
}

#[derive(Clone, Debug)]
pub struct Hull {
    chart: ProjectiveChart,
    origin: Vec3,
    basis: Vec<Vec3>,
    pub halfspaces: Vec<HalfSpace>,
    /// Local coordinates of the input points.
    pub points: Vec<Vec3>,
    pub lo: Vec3,
    pub hi: Vec3,
    pub scale: f64,
}

impl Hull {
    /// Hull of `per_arc` samples along every arc of the graph.
    pub fn of_graph(graph: &EmbeddedGraph, per_arc: usize) -> Result<Hull> {
        Hull::of_points(&graph.space, &graph.sample_points(per_arc))
    }

    pub fn of_points(space: &ModelSpace, pts: &[Vec4]) -> Result<Hull> {
        if pts.is_empty() {
            return Err(Error::BadParams("hull of an empty point set".into()));
        }
        let center = match space {
            ModelSpace::Euclidean => Vec4::zeros(),
            _ => {
                let m: Vec4 = pts.iter().sum::<Vec4>() / pts.len() as f64;
                space.normalize_point(&m)
            }
        };
        let chart = space.chart(&center);
        let cp: Vec<Vec3> = pts.iter().map(|p| chart.to_chart(p)).collect();
        let origin: Vec3 = cp.iter().sum::<Vec3>() / cp.len() as f64;
        let mut cov = Matrix3::zeros();
        for p in &cp {
            let d = p - origin;
            cov += d * d.transpose();
        }
        let eig = SymmetricEigen::new(cov);
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        // Small eigenvalues carry eigensolver noise of order ε·top, so the
        // span is decided by the actual extent of the points along each axis.
        let extent = |v: &Vec3| {
            let (lo, hi) = cp.iter().map(|p| (p - origin).dot(v)).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
            hi - lo
        };
        let mut axes: Vec<(Vec3, f64)> = order
            .iter()
            .map(|&i| {
                let mut v: Vec3 = eig.eigenvectors.column(i).into();
                // Deterministic sign.
                let k = v.iamax();
                if v[k] < 0.0 {
                    v = -v;
                }
                (v, extent(&v))
            })
            .collect();
        let top = axes.iter().map(|a| a.1).fold(0.0, f64::max);
        axes.retain(|a| top > 0.0 && a.1 > FLAT * top);
        let basis: Vec<Vec3> = axes.into_iter().map(|a| a.0).collect();
        let local: Vec<Vec3> = cp
            .iter()
            .map(|p| {
                let d = p - origin;
                let mut x = Vec3::zeros();
                for (i, b) in basis.iter().enumerate() {
                    x[i] = d.dot(b);
                }
                x
            })
            .collect();
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for x in &local {
            lo = lo.inf(x);
            hi = hi.sup(x);
        }
        for i in basis.len()..3 {
            lo[i] = 0.0;
            hi[i] = 0.0;
        }
        let scale = (hi - lo).norm().max(f64::MIN_POSITIVE);
        let halfspaces = match basis.len() {
            0 => Vec::new(),
            1 => vec![
                HalfSpace { normal: Vec3::x(), offset: hi.x },
                HalfSpace { normal: -Vec3::x(), offset: -lo.x },
            ],
            k => {
                // Hulls are affine invariant: build on axes stretched to unit
                // extent, which keeps thin point sets well conditioned.
                let mut ext = Vec3::repeat(1.0);
                for i in 0..k {
                    ext[i] = hi[i] - lo[i];
                }
                let unit: Vec<Vec3> = local.iter().map(|x| x.component_div(&ext)).collect();
                let hs = if k == 2 { hull_2d(&unit) } else { hull_3d(&unit, 1.0) };
                hs.into_iter()
                    .map(|h| {
                        let n = h.normal.component_div(&ext);
                        let l = n.norm();
                        HalfSpace { normal: n / l, offset: h.offset / l }
                    })
                    .collect()
            }
        };
        if basis.len() >= 2 && halfspaces.is_empty() {
            return Err(Error::BadParams("degenerate point set for a convex hull".into()));
        }
        Ok(Hull { chart, origin, basis, halfspaces, points: local, lo, hi, scale })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn space(&self) -> ModelSpace {
        self.chart.space()
    }

    /// Signed distance-like excess of `x` over the hull (≤ 0 inside).
    pub fn excess(&self, x: &Vec3) -> f64 {
        self.halfspaces.iter().map(|h| h.normal.dot(x) - h.offset).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains_local(&self, x: &Vec3, tol: f64) -> bool {
        self.excess(x) <= tol
    }

    pub fn to_model(&self, x: &Vec3) -> Vec4 {
        let mut c = self.origin;
        for (i, b) in self.basis.iter().enumerate() {
            c += b * x[i];
        }
        self.chart.from_chart(&c)
    }

    pub fn to_local(&self, p: &Vec4) -> Vec3 {
        let d = self.chart.to_chart(p) - self.origin;
        let mut x = Vec3::zeros();
        for (i, b) in self.basis.iter().enumerate() {
            x[i] = d.dot(b);
        }
        x
    }

    /// Up to `n` Halton points of the bounding box that lie inside the hull.
    pub fn halton_points(&self, n: usize) -> Vec<Vec3> {
        let k = self.dim();
        let mut out = Vec::with_capacity(n);
        if k == 0 {
            out.push(Vec3::zeros());
            return out;
        }
        let bases = [2u64, 3, 5];
        let mut i = 1u64;
        while out.len() < n && i < 400 * n as u64 + 1000 {
            let mut x = Vec3::zeros();
            for d in 0..k {
                x[d] = self.lo[d] + (self.hi[d] - self.lo[d]) * halton(i, bases[d]);
            }
            if self.contains_local(&x, 0.0) {
                out.push(x);
            }
            i += 1;
        }
        out
    }
}

/// Radical-inverse of `i` in base `b`.
pub fn halton(mut i: u64, b: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

fn cross2(o: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Monotone-chain hull in the plane; returns outward edge half-planes.
fn hull_2d(pts: &[Vec3]) -> Vec<HalfSpace> {
    let mut p: Vec<Vec3> = pts.to_vec();
    p.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    p.dedup();
    if p.len() < 3 {
        return Vec::new();
    }
    let mut h: Vec<Vec3> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = h.len();
        let iter: Box<dyn Iterator<Item = &Vec3>> = if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for q in iter {
            while h.len() >= start + 2 && cross2(&h[h.len() - 2], &h[h.len() - 1], q) <= 0.0 {
                h.pop();
            }
            h.push(*q);
        }
        h.pop();
    }
    let n = h.len();
    (0..n)
        .filter_map(|i| {
            let (a, b) = (h[i], h[(i + 1) % n]);
            let e = b - a;
            let nrm = Vec3::new(e.y, -e.x, 0.0);
            let l = nrm.norm();
            (l > 0.0).then(|| HalfSpace { normal: nrm / l, offset: (nrm / l).dot(&a) })
        })
        .collect()
}

struct Face {
    v: [usize; 3],
    n: Vec3,
    c: f64,
    alive: bool,
}

fn make_face(p: &[Vec3], v: [usize; 3], interior: &Vec3) -> Face {
    let n = (p[v[1]] - p[v[0]]).cross(&(p[v[2]] - p[v[0]]));
    let l = n.norm();
    let n = if l > 0.0 { n / l } else { n };
    let c = n.dot(&p[v[0]]);
    debug_assert!(n.dot(interior) - c <= 1e-9 * (1.0 + c.abs()));
    Face { v, n, c, alive: true }
}

/// Incremental 3-D hull; returns outward facet half-spaces.
fn hull_3d(p: &[Vec3], scale: f64) -> Vec<HalfSpace> {
    let eps = 1e-9 * scale;
    let n = p.len();
    // Initial tetrahedron from extreme points.
    let i0 = (0..n).min_by(|&a, &b| p[a].x.total_cmp(&p[b].x)).unwrap();
    let i1 = (0..n).max_by(|&a, &b| (p[a] - p[i0]).norm().total_cmp(&(p[b] - p[i0]).norm())).unwrap();
    let d01 = (p[i1] - p[i0]).normalize();
    let line_dist = |k: usize| {
        let w = p[k] - p[i0];
        (w - d01 * w.dot(&d01)).norm()
    };
    let i2 = (0..n).max_by(|&a, &b| line_dist(a).total_cmp(&line_dist(b))).unwrap();
    let nrm = (p[i1] - p[i0]).cross(&(p[i2] - p[i0])).normalize();
    let plane_dist = |k: usize| (p[k] - p[i0]).dot(&nrm).abs();
    let i3 = (0..n).max_by(|&a, &b| plane_dist(a).total_cmp(&plane_dist(b))).unwrap();
    if plane_dist(i3) <= eps {
        return Vec::new();
    }
    let interior = (p[i0] + p[i1] + p[i2] + p[i3]) / 4.0;
    let mut faces: Vec<Face> = Vec::new();
    let orient = |a: usize, b: usize, c: usize| -> [usize; 3] {
        let n = (p[b] - p[a]).cross(&(p[c] - p[a]));
        if n.dot(&(interior - p[a])) > 0.0 {
            [a, c, b]
        } else {
            [a, b, c]
        }
    };
    for f in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        faces.push(make_face(p, orient(f[0], f[1], f[2]), &interior));
    }
    let mut edge_face: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            edge_face.insert((f.v[k], f.v[(k + 1) % 3]), fi);
        }
    }
    for q in 0..n {
        if [i0, i1, i2, i3].contains(&q) {
            continue;
        }
        let visible: Vec<usize> =
            (0..faces.len()).filter(|&fi| faces[fi].alive && faces[fi].n.dot(&p[q]) - faces[fi].c > eps).collect();
        if visible.is_empty() {
            continue;
        }
        let mut horizon = Vec::new();
        for &fi in &visible {
            let v = faces[fi].v;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                match edge_face.get(&(b, a)) {
                    Some(&other) if visible.contains(&other) => {}
                    _ => horizon.push((a, b)),
                }
            }
        }
        for &fi in &visible {
            faces[fi].alive = false;
            let v = faces[fi].v;
            for k in 0..3 {
                edge_face.remove(&(v[k], v[(k + 1) % 3]));
            }
        }
        for (a, b) in horizon {
            let fi = faces.len();
            faces.push(make_face(p, [a, b, q], &interior));
            for (x, y) in [(a, b), (b, q), (q, a)] {
                edge_face.insert((x, y), fi);
            }
        }
    }
    faces
        .into_iter()
        .filter(|f| f.alive && f.n.norm() > 0.0)
        .map(|f| HalfSpace { normal: f.n, offset: f.c })
        .collect()
}
