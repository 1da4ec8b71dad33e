//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{Matrix3, Rotation3};
use netcurv::{ArcGeometry, CircularArc, EmbeddedGraph, ModelSpace, QuadratureConfig, Vec3, Vec4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

pub fn unit3(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

pub fn p3(v: Vec3) -> Vec4 {
    v.push(0.0)
}

/// `d` random unit directions, pairwise at least `min_sep` apart.
pub fn random_dirs(rng: &mut ChaCha8Rng, d: usize, min_sep: f64) -> Vec<Vec3> {
    loop {
        let dirs: Vec<Vec3> = (0..d).map(|_| unit3(rng)).collect();
        let ok = (0..d).all(|i| (i + 1..d).all(|j| dirs[i].dot(&dirs[j]).clamp(-1.0, 1.0).acos() > min_sep));
        if ok {
            return dirs;
        }
    }
}

pub fn random_rotation(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    let axis = unit3(rng);
    let angle = rng.gen_range(0.0..PI);
    *Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle).matrix()
}

fn ids(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Closed space curve, star-shaped about the z-axis, cut into `k` spline
/// arcs meeting at valence-2 vertices (generally with corners).
pub fn random_closed_curve(rng: &mut ChaCha8Rng, k: usize) -> EmbeddedGraph {
    let n = 12 * k;
    let (a1, a2, a3, a4) = (rng.gen_range(-0.25..0.25), rng.gen_range(-0.15..0.15), rng.gen_range(-0.3..0.3), rng.gen_range(-0.2..0.2));
    let ph = rng.gen_range(0.0..2.0 * PI);
    // Vertex heights are jittered so that the joins are genuine corners.
    let jitter: Vec<f64> = (0..k).map(|_| rng.gen_range(-0.2..0.2)).collect();
    let point = |i: usize| {
        let th = 2.0 * PI * i as f64 / n as f64;
        let r = 1.0 + a1 * (2.0 * th + ph).cos() + a2 * (3.0 * th).sin();
        let z = a3 * (th + ph).sin() + a4 * (2.0 * th).cos() + if i % 12 == 0 { jitter[i / 12] } else { 0.0 };
        Vec4::new(r * th.cos(), r * th.sin(), z, 0.0)
    };
    let vid = ids("v", k);
    let verts: Vec<(String, Vec4)> = (0..k).map(|j| (vid[j].clone(), point(12 * j))).collect();
    let arcs = (0..k)
        .map(|j| {
            let pts: Vec<Vec4> = (0..=12).map(|i| point((12 * j + i) % n)).collect();
            (format!("a{j}"), vid[j].clone(), vid[(j + 1) % k].clone(), ArcGeometry::polyline(pts).unwrap())
        })
        .collect();
    EmbeddedGraph::new(ModelSpace::Euclidean, verts, arcs).unwrap()
}

/// Theta graph: three bulging spline arcs between two poles.
pub fn random_theta(rng: &mut ChaCha8Rng) -> EmbeddedGraph {
    let top = Vec3::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2), 1.0);
    let bot = Vec3::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2), -1.0);
    let base = rng.gen_range(0.0..2.0 * PI);
    let verts = vec![("s".to_string(), p3(bot)), ("n".to_string(), p3(top))];
    let arcs = (0..3)
        .map(|i| {
            let phi = base + 2.0 * PI * i as f64 / 3.0 + rng.gen_range(-0.5..0.5);
            let w = Vec3::new(phi.cos(), phi.sin(), 0.0);
            let amp = rng.gen_range(0.3..1.5);
            let skew = rng.gen_range(-0.4..0.4);
            let pts: Vec<Vec4> = (0..=10)
                .map(|j| {
                    let s = j as f64 / 10.0;
                    let bulge = (PI * s).sin() * (amp + skew * (s - 0.5));
                    p3(bot + (top - bot) * s + w * bulge)
                })
                .collect();
            (format!("a{i}"), "s".to_string(), "n".to_string(), ArcGeometry::polyline(pts).unwrap())
        })
        .collect();
    EmbeddedGraph::new(ModelSpace::Euclidean, verts, arcs).unwrap()
}

/// Random graph from a handful of families, in the unit-ish ball.
pub fn random_graph(rng: &mut ChaCha8Rng) -> EmbeddedGraph {
    match rng.gen_range(0..4) {
        0 => {
            let k = rng.gen_range(2..5);
            random_closed_curve(rng, k)
        }
        1 => random_theta(rng),
        2 => random_circle_net(rng),
        _ => {
            let g = random_theta(rng);
            let rot = random_rotation(rng);
            g.transformed(&rot, 0.8, &Vec3::zeros()).unwrap()
        }
    }
}

/// A circle cut at random points plus a chord through its interior.
pub fn random_circle_net(rng: &mut ChaCha8Rng) -> EmbeddedGraph {
    let r = rng.gen_range(0.6..1.2);
    let a0 = rng.gen_range(0.0..PI);
    let a1 = a0 + rng.gen_range(0.8 * PI..1.2 * PI);
    let normal = unit3(rng);
    let c = CircularArc::new(Vec4::zeros(), Some(p3(normal)), None, None, r, 0.0, 1.0).unwrap();
    let (u, v) = c.basis();
    let at = |a: f64| (u * a.cos() + v * a.sin()) * r;
    let lift = rng.gen_range(0.2..0.5);
    let mid = (at(a0) + at(a1)) * 0.5 + p3(normal) * lift;
    let verts = vec![("p".to_string(), at(a0)), ("q".to_string(), at(a1))];
    let arc = |b0: f64, b1: f64| ArcGeometry::Circular(CircularArc::new(Vec4::zeros(), None, Some(u), Some(v), r, b0, b1).unwrap());
    let arcs = vec![
        ("c0".to_string(), "p".to_string(), "q".to_string(), arc(a0, a1)),
        ("c1".to_string(), "q".to_string(), "p".to_string(), arc(a1, a0 + 2.0 * PI)),
        (
            "bow".to_string(),
            "p".to_string(),
            "q".to_string(),
            ArcGeometry::polyline(vec![at(a0), at(a0) * 0.6 + mid * 0.4, mid, at(a1) * 0.6 + mid * 0.4, at(a1)]).unwrap(),
        ),
    ];
    EmbeddedGraph::new(ModelSpace::Euclidean, verts, arcs).unwrap()
}

/// Smallest sine of the angle between an arc and the geodesic to the apex,
/// and smallest distance to the apex, over dense samples.
pub fn radial_clearance(g: &EmbeddedGraph, apex: &Vec4) -> (f64, f64) {
    let s = g.space;
    let (mut sin_min, mut dist_min) = (f64::INFINITY, f64::INFINITY);
    for a in &g.arcs {
        for i in 0..=400 {
            let j = a.geometry.jet(&s, i as f64 / 400.0);
            let d = s.dist(&j.pos, apex);
            dist_min = dist_min.min(d);
            if let Ok(u) = s.initial_direction(&j.pos, apex) {
                let perp = j.vel - u * s.inner(&j.vel, &u);
                sin_min = sin_min.min(s.norm(&perp) / s.norm(&j.vel));
            } else {
                sin_min = 0.0;
            }
        }
    }
    (sin_min, dist_min)
}

/// Random apex near the graph with the arcs well away from radial tangency.
pub fn admissible_apex(rng: &mut ChaCha8Rng, g: &EmbeddedGraph, spread: f64) -> Option<Vec4> {
    for _ in 0..200 {
        let p = Vec3::new(rng.gen_range(-spread..spread), rng.gen_range(-spread..spread), rng.gen_range(-spread..spread));
        let apex = p3(p);
        let (sin, dist) = radial_clearance(g, &apex);
        if sin > 0.05 && dist > 0.05 {
            return Some(apex);
        }
    }
    None
}

/// Random admissible (graph, apex) pair in Euclidean space.
pub fn random_instance(rng: &mut ChaCha8Rng) -> (EmbeddedGraph, Vec4) {
    loop {
        let g = random_graph(rng);
        if let Some(a) = admissible_apex(rng, &g, 0.8) {
            return (g, a);
        }
    }
}

/// Random admissible (graph, apex) pair in a curved model: a Euclidean
/// instance scaled into a ball of radius `0.6/κ` and lifted.
pub fn random_curved_instance(rng: &mut ChaCha8Rng, space: ModelSpace) -> (EmbeddedGraph, Vec4) {
    let k = space.kappa();
    loop {
        let g = random_graph(rng);
        let scale = rng.gen_range(0.2..0.4) / k;
        let g = g.transformed(&Matrix3::identity(), scale, &Vec3::zeros()).unwrap();
        let Ok(lifted) = g.lifted(space) else { continue };
        let p = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (0.8 * scale);
        let Ok(apex) = netcurv::graph::lift_point(&space, &p3(p)) else { continue };
        let (sin, dist) = radial_clearance(&lifted, &apex);
        if sin > 0.05 && dist > 0.05 * scale && lifted.validate().is_empty() {
            return (lifted, apex);
        }
    }
}

/// Random connected multigraph (loops and parallel edges allowed).
pub fn random_multigraph(rng: &mut ChaCha8Rng) -> (usize, Vec<(usize, usize)>) {
    let n = rng.gen_range(1..9);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for _ in 0..rng.gen_range(1..8) {
        edges.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    (n, edges)
}
