//! SVG of the radial projection of a graph onto the unit sphere of directions
//! at an apex, drawn in orthographic projection.

use std::fmt::Write;

use netcurv::{EmbeddedGraph, Error, Result, Vec3, Vec4};

/// Largest angle between consecutive samples of a projected arc.
pub const MAX_STEP: f64 = 0.01;

const SIZE: f64 = 512.0;
const RADIUS: f64 = 240.0;

pub struct Plot {
    pub svg: String,
    pub axis: Vec3,
    pub samples: usize,
    pub max_step: f64,
}

fn direction(g: &EmbeddedGraph, apex: &Vec4, p: &Vec4) -> Result<Vec3> {
    let d = g.space.initial_direction(apex, p)?;
    let f = g.space.to_frame(apex, &d);
    let n = f.norm();
    if !(n > 0.0) {
        return Err(Error::ApexOnGraph);
    }
    Ok(f / n)
}

fn angle(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Samples `t ↦ Π(γ(t))` on `[0, 1]`, bisecting until neighbours are at
/// most [`MAX_STEP`] apart.
fn sample_arc(g: &EmbeddedGraph, apex: &Vec4, arc: usize, out: &mut Vec<Vec3>) -> Result<()> {
    let geom = &g.arcs[arc].geometry;
    let at = |t: f64| direction(g, apex, &geom.point(&g.space, t));
    let n0 = 64;
    let mut stack: Vec<(f64, Vec3)> = Vec::new();
    let first = at(0.0)?;
    out.push(first);
    let mut prev = (0.0, first);
    for i in 1..=n0 {
        let t = i as f64 / n0 as f64;
        stack.push((t, at(t)?));
        while let Some(&(t1, d1)) = stack.last() {
            let (t0, d0) = prev;
            if angle(&d0, &d1) <= MAX_STEP || t1 - t0 < 1e-12 {
                out.push(d1);
                prev = (t1, d1);
                stack.pop();
            } else {
                let tm = 0.5 * (t0 + t1);
                stack.push((tm, at(tm)?));
            }
        }
    }
    Ok(())
}

fn plot_axis(g: &EmbeddedGraph, apex: &Vec4) -> Vec3 {
    let pts = g.sample_points(32);
    let mean = pts.iter().fold(Vec4::zeros(), |a, p| a + p) / pts.len().max(1) as f64;
    let centroid = if g.space.is_euclidean() { mean } else { g.space.normalize_point(&mean) };
    match direction(g, apex, &centroid) {
        Ok(a) if a.iter().all(|x| x.is_finite()) => a,
        _ => Vec3::z(),
    }
}

/// Orthographic view along the apex-to-centroid axis (or `axis` if given).
pub fn plot(g: &EmbeddedGraph, apex: &Vec4, axis: Option<Vec3>) -> Result<Plot> {
    let axis = match axis {
        Some(a) if a.norm() > 0.0 => a.normalize(),
        Some(_) => return Err(Error::BadParams("view axis must be nonzero".into())),
        None => plot_axis(g, apex),
    };
    let helper = if axis.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let u = helper.cross(&axis).normalize();
    let w = axis.cross(&u);
    let screen = |d: &Vec3| (SIZE / 2.0 + RADIUS * d.dot(&u), SIZE / 2.0 - RADIUS * d.dot(&w));

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(svg, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r##"  <circle cx="{c}" cy="{c}" r="{RADIUS}" fill="none" stroke="#999" stroke-width="1"/>"##,
        c = SIZE / 2.0
    );
    let mut samples = 0;
    let mut max_step: f64 = 0.0;
    for (k, a) in g.arcs.iter().enumerate() {
        let mut pts = Vec::new();
        sample_arc(g, apex, k, &mut pts)?;
        samples += pts.len();
        for p in pts.windows(2) {
            max_step = max_step.max(angle(&p[0], &p[1]));
        }
        // Split into runs on the near (solid) and far (dashed) hemisphere.
        let mut runs: Vec<(bool, Vec<Vec3>)> = Vec::new();
        for p in &pts {
            let front = p.dot(&axis) >= 0.0;
            match runs.last_mut() {
                Some((f, run)) if *f == front => run.push(*p),
                Some((_, run)) => {
                    let last = *run.last().unwrap();
                    runs.push((front, vec![last, *p]));
                }
                None => runs.push((front, vec![*p])),
            }
        }
        let _ = writeln!(svg, r#"  <g id="{}">"#, xml_escape(&a.id));
        for (front, run) in runs {
            let coords: Vec<String> = run
                .iter()
                .map(|d| {
                    let (x, y) = screen(d);
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            let style = if front { r##"stroke="#1f4e99" stroke-width="2""## } else { r##"stroke="#8aa" stroke-width="1" stroke-dasharray="4 3""## };
            let _ = writeln!(svg, r#"    <polyline fill="none" {style} points="{}"/>"#, coords.join(" "));
        }
        let _ = writeln!(svg, "  </g>");
    }
    svg.push_str("</svg>\n");
    Ok(Plot { svg, axis, samples, max_step })
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
