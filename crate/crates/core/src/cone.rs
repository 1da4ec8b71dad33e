//! Area density of the cone over a graph, by Gauss–Bonnet and by radial
//! projection, and the Euclidean classifier.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::arc::{ArcGeometry, End};
use crate::classify::{classify_value, Classification, BAND};
use crate::curvature::{projection_length, signed_cone_curvature_integral, total_curvature, ArcTerm};
use crate::error::{Error, Result};
use crate::graph::EmbeddedGraph;
use crate::hull::Hull;
use crate::quadrature::QuadratureConfig;
use crate::search::nelder_mead;
use crate::space::{ModelSpace, Vec4};

/// Angle in `[0, π]` between the tangent at an endpoint (pointing into the
/// arc) and the direction from the endpoint toward the apex.
pub fn endpoint_angle(arc: &ArcGeometry, end: End, apex: &Vec4, space: &ModelSpace) -> Result<f64> {
    let q = arc.point(space, end.param());
    if !(space.dist(&q, apex) > 1e-12 * (1.0 + q.norm())) {
        return Err(Error::EndpointIsApex);
    }
    let t = arc.end_tangent(space, end)?;
    let u = space.initial_direction(&q, apex)?;
    let c = space.inner(&t, &u);
    Ok(space.norm(&(u - t * c)).atan2(c))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndpointTerm {
    pub arc: String,
    pub end: End,
    /// `π/2 − β`.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussBonnetTerms {
    pub per_arc_signed: Vec<ArcTerm>,
    pub endpoint_angle_terms: Vec<EndpointTerm>,
    /// `Σ −∫k⃗·ν_C ds + Σ (π/2 − β)`.
    pub sum: f64,
    pub error_estimate: f64,
}

/// Boundary terms of Gauss–Bonnet on the cone from `apex`, in any model.
pub fn gauss_bonnet_terms(graph: &EmbeddedGraph, apex: &Vec4, cfg: &QuadratureConfig) -> Result<GaussBonnetTerms> {
    cfg.check()?;
    let s = &graph.space;
    let mut per_arc_signed = Vec::with_capacity(graph.arcs.len());
    let mut endpoint_angle_terms = Vec::with_capacity(2 * graph.arcs.len());
    let mut sum = 0.0;
    let mut error = 0.0;
    for a in &graph.arcs {
        let i = signed_cone_curvature_integral(&a.geometry, &a.id, apex, s, cfg)?;
        sum += i.value;
        error += i.error;
        per_arc_signed.push(ArcTerm { id: a.id.clone(), value: i.value, error: i.error });
        for end in [End::Start, End::Finish] {
            let v = FRAC_PI_2 - endpoint_angle(&a.geometry, end, apex, s)?;
            sum += v;
            endpoint_angle_terms.push(EndpointTerm { arc: a.id.clone(), end, value: v });
        }
    }
    Ok(GaussBonnetTerms { per_arc_signed, endpoint_angle_terms, sum, error_estimate: error })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeDensityReport {
    pub apex: Vec<f64>,
    pub density_gb: f64,
    pub density_projection: f64,
    pub per_arc_signed: Vec<ArcTerm>,
    pub endpoint_angle_terms: Vec<EndpointTerm>,
    pub discrepancy: f64,
}

fn require_euclidean(s: &ModelSpace) -> Result<()> {
    if s.is_euclidean() {
        Ok(())
    } else {
        Err(Error::WrongSpace { expected: "euclidean" })
    }
}

/// Density of the Euclidean cone at its apex, computed both ways.
pub fn cone_density_gb(graph: &EmbeddedGraph, apex: &Vec4, cfg: &QuadratureConfig) -> Result<ConeDensityReport> {
    require_euclidean(&graph.space)?;
    let gb = gauss_bonnet_terms(graph, apex, cfg)?;
    let density_gb = gb.sum / (2.0 * PI);
    let density_projection = projection_length(graph, apex, cfg)? / (2.0 * PI);
    Ok(ConeDensityReport {
        apex: graph.space.coords(apex),
        density_gb,
        density_projection,
        per_arc_signed: gb.per_arc_signed,
        endpoint_angle_terms: gb.endpoint_angle_terms,
        discrepancy: (density_gb - density_projection).abs(),
    })
}

/// `tc(Γ)/2π`, an upper bound for the density of a spanning minimal surface.
pub fn density_upper_bound(graph: &EmbeddedGraph, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(total_curvature(graph, cfg)?.total / (2.0 * PI))
}

/// Thresholds applied to the total curvature of a Euclidean graph.
pub fn classify(graph: &EmbeddedGraph, cfg: &QuadratureConfig) -> Result<Classification> {
    require_euclidean(&graph.space)?;
    let tc = total_curvature(graph, cfg)?.total;
    let mut c = classify_value(tc, BAND);
    c.notes.extend(graph.notes.iter().cloned());
    Ok(c)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullMaximum {
    pub apex: Vec<f64>,
    pub density: f64,
    pub evaluations: usize,
}

/// Largest projection density over apexes in the convex hull of the graph:
/// `samples` Halton points followed by a Nelder–Mead polish of the best.
pub fn max_cone_density_over_hull(graph: &EmbeddedGraph, cfg: &QuadratureConfig, samples: usize) -> Result<HullMaximum> {
    if samples == 0 {
        return Err(Error::BadParams("samples must be at least 1".into()));
    }
    cfg.check()?;
    let hull = Hull::of_graph(graph, 32)?;
    let mut evaluations = 0;
    let mut density = |x: &crate::space::Vec3| -> Option<f64> {
        evaluations += 1;
        if !hull.contains_local(x, 0.0) {
            return None;
        }
        projection_length(graph, &hull.to_model(x), cfg).ok().map(|l| l / (2.0 * PI))
    };
    let mut best: Option<(crate::space::Vec3, f64)> = None;
    for x in hull.halton_points(samples) {
        if let Some(v) = density(&x) {
            if best.map_or(true, |b| v > b.1) {
                best = Some((x, v));
            }
        }
    }
    let (x0, v0) = best.ok_or(Error::ApexOnGraph)?;
    let step = 0.05 * hull.scale;
    let nm = nelder_mead(|x| density(x).map_or(f64::INFINITY, |v| -v), x0, hull.dim(), step, 1e-8, 200, 2000);
    let (x, v) = if -nm.value > v0 { (nm.x, -nm.value) } else { (x0, v0) };
    Ok(HullMaximum { apex: graph.space.coords(&hull.to_model(&x)), density: v, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{threshold_t, SingularityClass};
    use crate::examples::{builtin_example, football, tetrahedron};

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn endpoint_angles() {
        let s = ModelSpace::Euclidean;
        let g = tetrahedron().unwrap();
        let b = endpoint_angle(&g.arcs[0].geometry, End::Start, &Vec4::zeros(), &s).unwrap();
        assert!((b - (2.0f64 / 3.0).sqrt().acos()).abs() < 1e-12);
        let seg = ArcGeometry::segment(Vec4::x(), Vec4::x() * 2.0);
        assert!(endpoint_angle(&seg, End::Finish, &Vec4::zeros(), &s).unwrap().abs() < 1e-12);
        assert_eq!(endpoint_angle(&seg, End::Start, &Vec4::x(), &s), Err(Error::EndpointIsApex));
    }

    #[test]
    fn known_densities() {
        for (name, want) in [("greatCircle", 1.0), ("yGraph", 1.5), ("tetrahedron", threshold_t() / (2.0 * PI))] {
            let r = cone_density_gb(&builtin_example(name, &[]).unwrap(), &Vec4::zeros(), &cfg()).unwrap();
            assert!((r.density_gb - want).abs() < 1e-9, "{name}: {}", r.density_gb);
            assert!((r.density_projection - want).abs() < 1e-9, "{name}: {}", r.density_projection);
        }
    }

    #[test]
    fn football_bound_and_classes() {
        let g = football(0.8, 0.8).unwrap();
        assert!((density_upper_bound(&g, &cfg()).unwrap() - 1.5).abs() < 1e-8);
        let c = classify(&tetrahedron().unwrap(), &cfg()).unwrap();
        assert_eq!(c.class, SingularityClass::AtWorstYUnlessTCone);
        assert!(c.boundary);
        let wrong = g.lifted(ModelSpace::hyperbolic(0.1)).unwrap();
        assert!(matches!(classify(&wrong, &cfg()), Err(Error::WrongSpace { .. })));
    }

    #[test]
    fn hull_maximum_of_circle_is_at_centre() {
        let g = builtin_example("greatCircle", &[4.0]).unwrap();
        let m = max_cone_density_over_hull(&g, &cfg(), 64).unwrap();
        assert!((m.density - 1.0).abs() < 1e-4, "{m:?}");
    }
}
