//! Curvature integrals along arcs and the total curvature of a graph.

use serde::{Deserialize, Serialize};

use crate::arc::ArcGeometry;
use crate::error::{Error, Result};
use crate::graph::EmbeddedGraph;
use crate::quadrature::{integrate_breaks, Integral, QuadratureConfig};
use crate::space::{ModelSpace, Vec4};
use crate::steiner::{self, SteinerResult};

/// Minimum sine of the angle between an arc and the radial direction.
pub const TOL_TANGENCY: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcTerm {
    pub id: String,
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexTerm {
    pub id: String,
    pub valence: usize,
    pub steiner: SteinerResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TotalCurvatureReport {
    pub per_arc: Vec<ArcTerm>,
    pub per_vertex: Vec<VertexTerm>,
    pub arc_sum: f64,
    pub vertex_sum: f64,
    pub total: f64,
    /// Sum of the quadrature error estimates.
    pub error_estimate: f64,
}

/// Geodesic curvature density `|k⃗| |γ'|` at parameter `t`.
fn curvature_density(g: &ArcGeometry, s: &ModelSpace, t: f64) -> f64 {
    let j = g.jet(s, t);
    let speed2 = s.inner(&j.vel, &j.vel);
    let a = s.tangent_project(&j.pos, &j.acc);
    let perp = a - j.vel * (s.inner(&a, &j.vel) / speed2);
    s.norm(&perp) / speed2.sqrt()
}

/// `∫ |k⃗| ds` along one arc.
pub fn arc_curvature_integral(arc: &ArcGeometry, space: &ModelSpace, cfg: &QuadratureConfig) -> Result<Integral> {
    if let ArcGeometry::Segment { .. } = arc {
        return Ok(Integral::ZERO);
    }
    integrate_breaks(|t| Ok(curvature_density(arc, space, t)), &arc.breakpoints(), cfg)
}

/// `Σ ∫|k⃗| ds + Σ tc(q)`.
pub fn total_curvature(graph: &EmbeddedGraph, cfg: &QuadratureConfig) -> Result<TotalCurvatureReport> {
    total_curvature_seeded(graph, cfg, 0)
}

pub fn total_curvature_seeded(graph: &EmbeddedGraph, cfg: &QuadratureConfig, seed: u64) -> Result<TotalCurvatureReport> {
    cfg.check()?;
    let mut per_arc = Vec::with_capacity(graph.arcs.len());
    let mut error = 0.0;
    for a in &graph.arcs {
        let i = arc_curvature_integral(&a.geometry, &graph.space, cfg)?;
        error += i.error;
        per_arc.push(ArcTerm { id: a.id.clone(), value: i.value, error: i.error });
    }
    let mut per_vertex = Vec::with_capacity(graph.vertices.len());
    for (vi, v) in graph.vertices.iter().enumerate() {
        if v.incidences.len() < 2 {
            return Err(Error::BadParams(format!("vertex {} has valence {}", v.id, v.incidences.len())));
        }
        let r = steiner::vertex_tc_at(graph, vi, seed)?;
        per_vertex.push(VertexTerm { id: v.id.clone(), valence: v.incidences.len(), steiner: r });
    }
    let arc_sum: f64 = per_arc.iter().map(|a| a.value).sum();
    let vertex_sum: f64 = per_vertex.iter().map(|v| v.steiner.tc).sum();
    Ok(TotalCurvatureReport { per_arc, per_vertex, arc_sum, vertex_sum, total: arc_sum + vertex_sum, error_estimate: error })
}

/// Unit normal to the arc in the plane of its tangent and the direction to
/// the apex, pointing away from the apex; also returns the sine of the angle
/// between the arc and the radial direction.
pub(crate) fn cone_normal(s: &ModelSpace, pos: &Vec4, tau: &Vec4, apex: &Vec4) -> Result<(Vec4, f64)> {
    let u = s.initial_direction(pos, apex)?;
    let w = -(u - tau * s.inner(&u, tau));
    let sin = s.norm(&w);
    Ok((w / sin, sin))
}

/// Smallest distance from `apex` to the arc, from dense samples refined by
/// golden-section search.
pub fn distance_to_arc(arc: &ArcGeometry, space: &ModelSpace, apex: &Vec4) -> f64 {
    let n = 256;
    let d = |t: f64| space.dist(&arc.point(space, t), apex);
    let (mut bi, mut bd) = (0, f64::INFINITY);
    for i in 0..=n {
        let v = d(i as f64 / n as f64);
        if v < bd {
            bi = i;
            bd = v;
        }
    }
    let (mut lo, mut hi) = ((bi as f64 - 1.0).max(0.0) / n as f64, (bi as f64 + 1.0).min(n as f64) / n as f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > 1e-12 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if d(x1) <= d(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    bd.min(d(0.5 * (lo + hi)))
}

fn check_apex_off_arc(arc: &ArcGeometry, label: &str, apex: &Vec4, space: &ModelSpace) -> Result<()> {
    let scale = 1.0 + apex.norm();
    if !(distance_to_arc(arc, space, apex) > 1e-9 * scale) {
        return Err(Error::ApexOnArc(label.to_string()));
    }
    Ok(())
}

fn apex_guard(s: &ModelSpace, pos: &Vec4, apex: &Vec4, label: &str) -> Result<()> {
    let d = s.dist(pos, apex);
    let scale = 1.0 + pos.norm();
    if !(d > 1e-12 * scale) {
        return Err(Error::ApexOnArc(label.to_string()));
    }
    Ok(())
}

/// `−∫ k⃗·ν_C ds` along one arc, where `ν_C` is the unit normal in the plane
/// of the tangent and the direction to the apex, pointing away from the apex.
pub fn signed_cone_curvature_integral(
    arc: &ArcGeometry,
    label: &str,
    apex: &Vec4,
    space: &ModelSpace,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    check_apex_off_arc(arc, label, apex, space)?;
    let s = *space;
    let f = |t: f64| -> Result<f64> {
        let j = arc.jet(&s, t);
        apex_guard(&s, &j.pos, apex, label)?;
        let speed = s.norm(&j.vel);
        let tau = j.vel / speed;
        let (nu, sin) = cone_normal(&s, &j.pos, &tau, apex)?;
        if sin <= TOL_TANGENCY {
            return Err(Error::RadialTangency(label.to_string()));
        }
        let a = s.tangent_project(&j.pos, &j.acc);
        let perp = a - tau * s.inner(&a, &tau);
        Ok(-s.inner(&perp, &nu) / speed)
    };
    integrate_breaks(f, &arc.breakpoints(), cfg)
}

/// Length of the radial projection of one arc onto the unit sphere of
/// directions at the apex.
pub fn arc_projection_length(
    arc: &ArcGeometry,
    label: &str,
    apex: &Vec4,
    space: &ModelSpace,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    check_apex_off_arc(arc, label, apex, space)?;
    let s = *space;
    let f = |t: f64| -> Result<f64> {
        let j = arc.jet(&s, t);
        apex_guard(&s, &j.pos, apex, label)?;
        let w = s.chord_direction(apex, &j.pos);
        let dw = s.tangent_project(apex, &j.vel);
        let n = s.norm(&w);
        let perp = dw - w * (s.inner(&dw, &w) / (n * n));
        Ok(s.norm(&perp) / n)
    };
    integrate_breaks(f, &arc.breakpoints(), cfg)
}

/// Total length of the radial projection of the graph from `apex`.
pub fn projection_length(graph: &EmbeddedGraph, apex: &Vec4, cfg: &QuadratureConfig) -> Result<f64> {
    let mut total = 0.0;
    for a in &graph.arcs {
        total += arc_projection_length(&a.geometry, &a.id, apex, &graph.space, cfg)
            .map_err(|e| if let Error::ApexOnArc(_) = e { Error::ApexOnGraph } else { e })?
            .value;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc::CircularArc;
    use std::f64::consts::PI;

    #[test]
    fn full_circle_has_total_curvature_two_pi() {
        let c = CircularArc::new(Vec4::zeros(), Some(Vec4::z()), None, None, 3.0, 0.0, 2.0 * PI).unwrap();
        let r = arc_curvature_integral(&ArcGeometry::Circular(c), &ModelSpace::Euclidean, &QuadratureConfig::default()).unwrap();
        assert!((r.value - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn circle_about_apex() {
        let s = ModelSpace::Euclidean;
        let c = ArcGeometry::Circular(CircularArc::new(Vec4::zeros(), Some(Vec4::z()), None, None, 2.0, 0.0, 2.0 * PI).unwrap());
        let cfg = QuadratureConfig::default();
        let k = signed_cone_curvature_integral(&c, "c", &Vec4::zeros(), &s, &cfg).unwrap();
        assert!((k.value - 2.0 * PI).abs() < 1e-9);
        let p = arc_projection_length(&c, "c", &Vec4::zeros(), &s, &cfg).unwrap();
        assert!((p.value - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn segment_is_straight() {
        let s = ModelSpace::Euclidean;
        let g = ArcGeometry::segment(Vec4::x(), Vec4::y());
        let cfg = QuadratureConfig::default();
        assert_eq!(arc_curvature_integral(&g, &s, &cfg).unwrap().value, 0.0);
        let apex = Vec4::new(0.2, 0.1, 1.0, 0.0);
        assert!(signed_cone_curvature_integral(&g, "e", &apex, &s, &cfg).unwrap().value.abs() < 1e-14);
    }

    #[test]
    fn radial_segment_is_rejected() {
        let s = ModelSpace::Euclidean;
        let g = ArcGeometry::segment(Vec4::x(), Vec4::x() * 2.0);
        let r = signed_cone_curvature_integral(&g, "e", &Vec4::zeros(), &s, &QuadratureConfig::default());
        assert_eq!(r, Err(Error::RadialTangency("e".into())));
        let r = arc_projection_length(&g, "e", &Vec4::x(), &s, &QuadratureConfig::default());
        assert_eq!(r, Err(Error::ApexOnArc("e".into())));
    }
}
