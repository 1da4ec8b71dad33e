//! Geodesic cones in constant-curvature models: induced and comparison areas,
//! extremal areas over the hull, and curvature-corrected classification.
//!
//! For an apex `p` and a point `γ(t)` at distance `r`, write `v⊥` for the part
//! of `γ'` orthogonal to the geodesic through `p`. The comparison area is
//! `∫ |v⊥| Φ(r) dt` with `Φ(r) = tanh(κr/2)/κ` (hyperbolic), `tan(κr/2)/κ`
//! (spherical) or `r/2` (Euclidean), and the comparison density is
//! `(1/2π) ∫ |v⊥| κ/sinh(κr) dt` (`sin` on the sphere, `1/r` in flat space).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::classify::{classify_value, Classification, BAND};
use crate::curvature::{distance_to_arc, total_curvature, TOL_TANGENCY};
use crate::error::{Error, Result};
use crate::graph::EmbeddedGraph;
use crate::hull::Hull;
use crate::quadrature::{integrate, integrate_breaks, Integral, QuadratureConfig};
use crate::search::{lipschitz_minimize, nelder_mead};
use crate::space::{Jet, ModelSpace, Vec3, Vec4};

pub const DEFAULT_BUDGET: usize = 16384;

pub const NOTE_APPROXIMATE: &str = "APPROXIMATE: the extremal cone area comes from a budgeted search over the hull; \
     the correction uses its certified bound, so the reported class is never stronger than the exact one";

/// Radial integral `∫₀ʳ σ(s)/σ(r) ds` of the comparison metric.
pub fn comparison_phi(space: &ModelSpace, r: f64) -> f64 {
    match *space {
        ModelSpace::Euclidean => 0.5 * r,
        ModelSpace::Hyperbolic { kappa } => (0.5 * kappa * r).tanh() / kappa,
        ModelSpace::Spherical { kappa } => (0.5 * kappa * r).tan() / kappa,
    }
}

/// Link-length factor `σ'(0)/σ(r)` of the comparison metric.
fn comparison_psi(space: &ModelSpace, r: f64) -> f64 {
    match *space {
        ModelSpace::Euclidean => 1.0 / r,
        ModelSpace::Hyperbolic { kappa } => kappa / (kappa * r).sinh(),
        ModelSpace::Spherical { kappa } => kappa / (kappa * r).sin(),
    }
}

/// `(|v⊥|, r, sin)` at one point of an arc, or `None` at the apex itself.
fn radial_split(s: &ModelSpace, j: &Jet, apex: &Vec4) -> Result<Option<(f64, f64, f64)>> {
    let r = s.dist(&j.pos, apex);
    if r == 0.0 {
        return Ok(None);
    }
    let u = s.initial_direction(&j.pos, apex)?;
    let perp = s.norm(&(j.vel - u * s.inner(&j.vel, &u)));
    let speed = s.norm(&j.vel);
    Ok(Some((perp, r, perp / speed)))
}

fn check_off_graph(graph: &EmbeddedGraph, apex: &Vec4) -> Result<()> {
    let scale = 1.0 + apex.norm();
    for a in &graph.arcs {
        if !(distance_to_arc(&a.geometry, &graph.space, apex) > 1e-9 * scale) {
            return Err(Error::ApexOnGraph);
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonCone {
    pub area: f64,
    pub density: f64,
    pub error_estimate: f64,
}

/// Area and apex density of the cone in the comparison metric. Requires the
/// graph to be nowhere tangent to the geodesics through the apex.
pub fn cone_area_comparison(graph: &EmbeddedGraph, apex: &Vec4, cfg: &QuadratureConfig) -> Result<ComparisonCone> {
    cfg.check()?;
    check_off_graph(graph, apex)?;
    let s = graph.space;
    let (mut area, mut link, mut err) = (0.0, 0.0, 0.0);
    for a in &graph.arcs {
        let split = |t: f64| -> Result<(f64, f64)> {
            let (perp, r, sin) = radial_split(&s, &a.geometry.jet(&s, t), apex)?.ok_or(Error::ApexOnGraph)?;
            if sin <= TOL_TANGENCY {
                return Err(Error::RadialTangency(a.id.clone()));
            }
            Ok((perp, r))
        };
        let breaks = a.geometry.breakpoints();
        let ia = integrate_breaks(|t| split(t).map(|(p, r)| p * comparison_phi(&s, r)), &breaks, cfg)?;
        let il = integrate_breaks(|t| split(t).map(|(p, r)| p * comparison_psi(&s, r)), &breaks, cfg)?;
        area += ia.value;
        link += il.value;
        err += ia.error + il.error / (2.0 * PI);
    }
    Ok(ComparisonCone { area, density: link / (2.0 * PI), error_estimate: err })
}

/// Comparison area without the tangency requirement (the integrand stays
/// bounded), used as the search objective. In constant curvature it equals
/// the induced area of the geodesic cone.
pub fn comparison_area_relaxed(graph: &EmbeddedGraph, apex: &Vec4, cfg: &QuadratureConfig) -> Result<Integral> {
    let s = graph.space;
    let mut total = Integral::ZERO;
    for a in &graph.arcs {
        let f = |t: f64| -> Result<f64> {
            Ok(radial_split(&s, &a.geometry.jet(&s, t), apex)?.map_or(0.0, |(p, r, _)| p * comparison_phi(&s, r)))
        };
        total = total + integrate_breaks(f, &a.geometry.breakpoints(), cfg)?;
    }
    Ok(total)
}

/// Derivative at `x ∈ [a, b]` of a vector function by Richardson-extrapolated
/// second-order differences, one-sided near the ends.
fn fd_derivative<G: FnMut(f64) -> Vec4>(mut g: G, x: f64, a: f64, b: f64, h: f64) -> Vec4 {
    if x - 2.0 * h >= a && x + 2.0 * h <= b {
        let d1 = (g(x + h) - g(x - h)) / (2.0 * h);
        let d2 = (g(x + 2.0 * h) - g(x - 2.0 * h)) / (4.0 * h);
        (d1 * 4.0 - d2) / 3.0
    } else {
        let sgn = if x + 4.0 * h <= b { 1.0 } else { -1.0 };
        let k = sgn * h;
        let (g0, g1, g2, g4) = (g(x), g(x + k), g(x + 2.0 * k), g(x + 4.0 * k));
        let d1 = (g1 * 4.0 - g0 * 3.0 - g2) / (2.0 * k);
        let d2 = (g2 * 4.0 - g0 * 3.0 - g4) / (4.0 * k);
        (d1 * 4.0 - d2) / 3.0
    }
}

/// Area of the geodesic cone in the metric induced from the model: the fans
/// `F(t, ρ) = exp_p(ρ log_p γ(t))` integrated with the area element
/// `√(EG − F²)`, whose coefficients come from finite differences.
pub fn cone_area_induced(graph: &EmbeddedGraph, apex: &Vec4, cfg: &QuadratureConfig) -> Result<Integral> {
    cfg.check()?;
    check_off_graph(graph, apex)?;
    let s = graph.space;
    let mut total = Integral::ZERO;
    for arc in &graph.arcs {
        let breaks = arc.geometry.breakpoints();
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let ht = cfg.fd_step * (b - a);
            let outer = |t: f64| -> Result<f64> {
                let log = |x: f64| s.log(apex, &arc.geometry.point(&s, x));
                let v0 = log(t)?;
                // Logs on the stencil in t, computed once per outer node.
                let mut stencil: Vec<(f64, Vec4)> = Vec::with_capacity(8);
                for k in [-4.0, -2.0, -1.0, 1.0, 2.0, 4.0] {
                    let x = t + k * ht;
                    if x >= a && x <= b {
                        stencil.push((x, log(x)?));
                    }
                }
                stencil.push((t, v0));
                let vt = |x: f64| stencil.iter().find(|(y, _)| *y == x).map(|e| e.1).expect("stencil point");
                let inner = |rho: f64| -> Result<f64> {
                    let ft = fd_derivative(|x| s.exp(apex, &(vt(x) * rho)), t, a, b, ht);
                    let fr = fd_derivative(|r| s.exp(apex, &(v0 * r)), rho, 0.0, 1.0, cfg.fd_step);
                    let (e, f, g) = (s.inner(&ft, &ft), s.inner(&ft, &fr), s.inner(&fr, &fr));
                    Ok((e * g - f * f).max(0.0).sqrt())
                };
                Ok(integrate(inner, 0.0, 1.0, cfg)?.value)
            };
            total = total + integrate(outer, a, b, cfg)?;
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeAreaReport {
    pub apex: Vec<f64>,
    pub area_induced: f64,
    pub area_comparison: f64,
    pub density_comparison: f64,
    pub error_estimate: f64,
}

pub fn cone_area(graph: &EmbeddedGraph, apex: &Vec4, cfg: &QuadratureConfig) -> Result<ConeAreaReport> {
    let c = cone_area_comparison(graph, apex, cfg)?;
    let i = cone_area_induced(graph, apex, cfg)?;
    Ok(ConeAreaReport {
        apex: graph.space.coords(apex),
        area_induced: i.value,
        area_comparison: c.area,
        density_comparison: c.density,
        error_estimate: c.error_estimate + i.error,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalArea {
    pub apex: Vec<f64>,
    /// Best value found at an apex inside the hull.
    pub value: f64,
    /// Certified bound on the extremum: lower for a minimum, upper for a maximum.
    pub certified_bound: f64,
    pub bound_kind: BoundKind,
    pub evaluations: usize,
    pub budget: usize,
    pub hull_dim: usize,
    pub approximate: bool,
}

/// Geodesic length of the graph.
pub fn graph_length(graph: &EmbeddedGraph, cfg: &QuadratureConfig) -> Result<Integral> {
    let s = graph.space;
    let mut total = Integral::ZERO;
    for a in &graph.arcs {
        total = total + integrate_breaks(|t| Ok(s.norm(&a.geometry.jet(&s, t).vel)), &a.geometry.breakpoints(), cfg)?;
    }
    Ok(total)
}

/// Lipschitz constant of the cone area in the apex over the search box.
fn area_lipschitz(graph: &EmbeddedGraph, hull: &Hull, cfg: &QuadratureConfig) -> Result<f64> {
    let len = graph_length(graph, cfg)?;
    let len = (len.value + len.error) * (1.0 + 1e-9);
    let ModelSpace::Spherical { kappa } = graph.space else {
        return Ok(len);
    };
    // Farthest graph point from the padded box, via its corners.
    let samples = graph.sample_points(64);
    let gap = graph
        .arcs
        .iter()
        .flat_map(|a| {
            let pts: Vec<Vec4> = (0..=64).map(|i| a.geometry.point(&graph.space, i as f64 / 64.0)).collect();
            pts.windows(2).map(|w| graph.space.dist(&w[0], &w[1])).collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);
    let k = hull.dim();
    let mut far: f64 = 0.0;
    for mask in 0..(1usize << k) {
        let mut x = Vec3::zeros();
        for i in 0..k {
            let pad = 0.1 * (hull.hi[i] - hull.lo[i]) + 1e-12 * hull.scale;
            x[i] = if mask >> i & 1 == 1 { hull.hi[i] + pad } else { hull.lo[i] - pad };
        }
        let c = hull.to_model(&x);
        for q in &samples {
            far = far.max(graph.space.dist(&c, q));
        }
    }
    let d = far + gap;
    if kappa * d >= PI {
        return Ok(f64::INFINITY);
    }
    Ok(len / (0.5 * kappa * d).cos().powi(2))
}

/// Margin, relative to the hull scale, by which the sampled hull is inflated
/// before cells are discarded, so that it covers the hull of the arcs.
const HULL_MARGIN: f64 = 0.05;

fn extremal_area(graph: &EmbeddedGraph, cfg: &QuadratureConfig, budget: usize, maximize: bool) -> Result<ExtremalArea> {
    cfg.check()?;
    if budget < 4 {
        return Err(Error::BadParams(format!("budget must be at least 4, got {budget}")));
    }
    let sign = if maximize { -1.0 } else { 1.0 };
    let hull = Hull::of_graph(graph, 32)?;
    let lip = area_lipschitz(graph, &hull, cfg)?;
    let mut best: Option<(Vec3, f64)> = None;
    let evaluations = std::cell::Cell::new(0usize);
    // `on_graph` marks apexes taken from the arcs themselves, which lie in the
    // geodesic hull even where they bulge past the sampled one.
    let mut eval_at = |x: &Vec3, on_graph: bool| -> Option<(f64, f64)> {
        evaluations.set(evaluations.get() + 1);
        let v = comparison_area_relaxed(graph, &hull.to_model(x), cfg).ok()?;
        let y = sign * v.value;
        if (on_graph || hull.contains_local(x, 0.0)) && best.map_or(true, |b| y < b.1) {
            best = Some((*x, y));
        }
        Some((y, v.error))
    };

    let bb_budget = budget / 2;
    let bb = lipschitz_minimize_inflated(&hull, |x| eval_at(x, false), lip, bb_budget);
    let n_halton = (budget / 4).min(512);
    let mut halton_best: Option<(Vec3, f64)> = None;
    for x in hull.halton_points(n_halton) {
        if let Some((y, _)) = eval_at(&x, false) {
            if halton_best.map_or(true, |b| y < b.1) {
                halton_best = Some((x, y));
            }
        }
    }
    // Extremal apexes often sit on the graph, which is on the hull boundary
    // where the simplex search stalls: scan the arcs and refine in parameter.
    let mut remaining = budget.saturating_sub(bb_budget + n_halton);
    let arc_budget = remaining / 4;
    let per_arc = (arc_budget / (2 * graph.arcs.len().max(1))).clamp(0, 64);
    let mut arc_best: Option<(Vec3, f64)> = None;
    if per_arc >= 4 {
        let local = |a: usize, t: f64| hull.to_local(&graph.arcs[a].geometry.point(&graph.space, t));
        let mut scan: Vec<(f64, usize, f64)> = Vec::new();
        for a in 0..graph.arcs.len() {
            for i in 0..=per_arc {
                let t = i as f64 / per_arc as f64;
                if let Some((y, _)) = eval_at(&local(a, t), true) {
                    scan.push((y, a, t));
                }
            }
        }
        scan.sort_by(|p, q| p.0.total_cmp(&q.0));
        let h = 1.0 / per_arc as f64;
        let golden = 0.5 * (5f64.sqrt() - 1.0);
        for &(y0, a, t0) in scan.iter().take(3) {
            let (mut lo, mut hi) = ((t0 - h).max(0.0), (t0 + h).min(1.0));
            let mut f = |t: f64| eval_at(&local(a, t), true).map_or(f64::INFINITY, |v| v.0);
            let (mut c, mut d) = (hi - golden * (hi - lo), lo + golden * (hi - lo));
            let (mut fc, mut fd) = (f(c), f(d));
            for _ in 0..40 {
                if fc < fd {
                    hi = d;
                    d = c;
                    fd = fc;
                    c = hi - golden * (hi - lo);
                    fc = f(c);
                } else {
                    lo = c;
                    c = d;
                    fc = fd;
                    d = lo + golden * (hi - lo);
                    fd = f(d);
                }
            }
            let (t, y) = if fc < fd { (c, fc) } else { (d, fd) };
            let (t, y) = if y < y0 { (t, y) } else { (t0, y0) };
            if arc_best.map_or(true, |b| y < b.1) {
                arc_best = Some((local(a, t), y));
            }
        }
    }
    remaining = budget.saturating_sub(evaluations.get());
    let step = 0.05 * hull.scale;
    let starts: Vec<Vec3> = halton_best.into_iter().chain(arc_best).map(|b| b.0).chain(bb.best_x).collect();
    for (i, x0) in starts.iter().enumerate() {
        let share = remaining / starts.len() + if i == 0 { remaining % starts.len() } else { 0 };
        nelder_mead(
            |x| if hull.contains_local(x, 0.0) { eval_at(x, false).map_or(f64::INFINITY, |v| v.0) } else { f64::INFINITY },
            *x0,
            hull.dim(),
            step,
            1e-8,
            200,
            share,
        );
    }
    let (x, y) = best.ok_or(Error::ApexOnGraph)?;
    let bound = if maximize { -bb.lower_bound } else { bb.lower_bound.max(0.0) };
    Ok(ExtremalArea {
        apex: graph.space.coords(&hull.to_model(&x)),
        value: sign * y,
        certified_bound: bound,
        bound_kind: if maximize { BoundKind::Upper } else { BoundKind::Lower },
        evaluations: evaluations.get(),
        budget,
        hull_dim: hull.dim(),
        approximate: true,
    })
}

/// Branch-and-bound on a hull whose half-spaces are pushed out by the margin.
fn lipschitz_minimize_inflated<F>(hull: &Hull, f: F, lip: f64, budget: usize) -> crate::search::BranchAndBound
where
    F: FnMut(&Vec3) -> Option<(f64, f64)>,
{
    let mut wide = hull.clone();
    for h in &mut wide.halfspaces {
        h.offset += HULL_MARGIN * hull.scale;
    }
    let mut r = lipschitz_minimize(&wide, f, lip, budget);
    // Points recorded by the search must lie in the true hull.
    if let Some(x) = r.best_x {
        if !hull.contains_local(&x, 0.0) {
            r.best_x = None;
        }
    }
    r
}

/// Smallest cone area over apexes in the hull (Euclidean or hyperbolic).
pub fn min_cone_area(graph: &EmbeddedGraph, cfg: &QuadratureConfig, budget: usize) -> Result<ExtremalArea> {
    if let ModelSpace::Spherical { .. } = graph.space {
        return Err(Error::WrongSpace { expected: "euclidean or hyperbolic" });
    }
    extremal_area(graph, cfg, budget, false)
}

/// Largest comparison cone area over apexes in the hull (spherical).
pub fn max_spherical_cone_area(graph: &EmbeddedGraph, cfg: &QuadratureConfig, budget: usize) -> Result<ExtremalArea> {
    if !matches!(graph.space, ModelSpace::Spherical { .. }) {
        return Err(Error::WrongSpace { expected: "spherical" });
    }
    extremal_area(graph, cfg, budget, true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectedClassification {
    pub tc: f64,
    /// `tc − κ²·A` (hyperbolic, `A` a certified lower bound of the minimum
    /// area) or `tc + κ²·Â` (spherical, `Â` a certified upper bound of the
    /// maximum area).
    pub corrected_tc: f64,
    pub classification: Classification,
    pub extremal: ExtremalArea,
}

pub fn corrected_classify(graph: &EmbeddedGraph, cfg: &QuadratureConfig, budget: usize) -> Result<CorrectedClassification> {
    let k2 = graph.space.kappa().powi(2);
    let (extremal, corrected_from) = match graph.space {
        ModelSpace::Euclidean => return Err(Error::WrongSpace { expected: "hyperbolic or spherical" }),
        ModelSpace::Hyperbolic { .. } => {
            let e = min_cone_area(graph, cfg, budget)?;
            let c = -k2 * e.certified_bound;
            (e, c)
        }
        ModelSpace::Spherical { .. } => {
            let e = max_spherical_cone_area(graph, cfg, budget)?;
            let c = k2 * e.certified_bound;
            (e, c)
        }
    };
    let tc = total_curvature(graph, cfg)?.total;
    let corrected_tc = tc + corrected_from;
    let mut classification = classify_value(corrected_tc, BAND);
    classification.notes.push(NOTE_APPROXIMATE.to_string());
    classification.notes.extend(graph.notes.iter().cloned());
    Ok(CorrectedClassification { tc, corrected_tc, classification, extremal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc::{ArcGeometry, CircularArc};

    fn circle_graph(space: ModelSpace, center: Vec4, u: Vec4, v: Vec4, radius: f64) -> EmbeddedGraph {
        let arcs = (0..2)
            .map(|i| {
                let c = CircularArc::new(center, None, Some(u), Some(v), radius, i as f64 * PI, (i + 1) as f64 * PI).unwrap();
                (format!("a{i}"), format!("v{i}"), format!("v{}", (i + 1) % 2), ArcGeometry::Circular(c))
            })
            .collect::<Vec<_>>();
        let verts = (0..2)
            .map(|i| (format!("v{i}"), arcs[i].3.point(&space, 0.0)))
            .collect();
        EmbeddedGraph::new(space, verts, arcs).unwrap()
    }

    #[test]
    fn disc_areas() {
        let cfg = QuadratureConfig::default();
        let g = circle_graph(ModelSpace::Euclidean, Vec4::zeros(), Vec4::x(), Vec4::y(), 2.0);
        let r = cone_area(&g, &Vec4::zeros(), &cfg).unwrap();
        assert!((r.area_induced - 4.0 * PI).abs() < 1e-6, "{r:?}");
        assert!((r.area_comparison - 4.0 * PI).abs() < 1e-9);
        assert!((r.density_comparison - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hemisphere() {
        let s = ModelSpace::spherical(1.0);
        let g = circle_graph(s, Vec4::zeros(), Vec4::x(), Vec4::y(), 1.0);
        let r = cone_area(&g, &Vec4::w(), &QuadratureConfig::default()).unwrap();
        assert!((r.area_induced - 2.0 * PI).abs() < 1e-5, "{r:?}");
        assert!((r.area_comparison - 2.0 * PI).abs() < 1e-9);
        assert!((r.density_comparison - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hyperbolic_disc() {
        let s = ModelSpace::hyperbolic(1.0);
        // Circle at distance 1 from the origin (0, 0, 0, 1).
        let g = circle_graph(s, Vec4::w() * 1f64.cosh(), Vec4::x(), Vec4::y(), 1f64.sinh());
        let r = cone_area(&g, &Vec4::w(), &QuadratureConfig::default()).unwrap();
        let want = 2.0 * PI * (1f64.cosh() - 1.0);
        assert!((r.area_induced - want).abs() < 1e-5, "{r:?}");
        assert!((r.area_comparison - want).abs() < 1e-9);
    }

    #[test]
    fn fd_derivative_is_accurate_everywhere() {
        let g = |x: f64| Vec4::new(x.sin(), x * x * x, x.exp(), 0.0);
        let dg = |x: f64| Vec4::new(x.cos(), 3.0 * x * x, x.exp(), 0.0);
        for x in [0.0, 0.3, 0.5, 0.99999, 1.0] {
            assert!((fd_derivative(g, x, 0.0, 1.0, 1e-5) - dg(x)).norm() < 1e-8, "{x}");
        }
    }
}
