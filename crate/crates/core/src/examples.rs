//! Built-in example graphs in Euclidean space.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::arc::{ArcGeometry, CircularArc};
use crate::error::{Error, Result};
use crate::graph::EmbeddedGraph;
use crate::space::{ModelSpace, Vec4};

pub const EXAMPLE_NAMES: [&str; 8] =
    ["greatCircle", "yGraph", "tetrahedron", "cube", "football", "elevenOvals", "theta", "handcuff"];

pub const NOTE_ELEVEN_OVALS: &str = "eleven ovals contribute 2π each and every crossing vertex contributes 0, so tc = 22π; \
     the total 44π quoted for this net does not follow from the definition, and neither value is below 2πC_T";

fn p3(x: f64, y: f64, z: f64) -> Vec4 {
    Vec4::new(x, y, z, 0.0)
}

type Arcs = Vec<(String, String, String, ArcGeometry)>;

/// Parses `NAME` or `NAME:p1,p2,...`.
pub fn parse_example_spec(spec: &str) -> Result<(String, Vec<f64>)> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n, Some(r)),
        None => (spec, None),
    };
    let params = match rest {
        None => Vec::new(),
        Some(r) if r.trim().is_empty() => Vec::new(),
        Some(r) => r
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| Error::BadParams(format!("`{s}` is not a number"))))
            .collect::<Result<_>>()?,
    };
    Ok((name.to_string(), params))
}

pub fn builtin_example(name: &str, params: &[f64]) -> Result<EmbeddedGraph> {
    let no_params = || {
        if params.is_empty() {
            Ok(())
        } else {
            Err(Error::BadParams(format!("{name} takes no parameters")))
        }
    };
    match name {
        "greatCircle" => {
            let n = match params {
                [] => 2,
                [n] if *n >= 2.0 && n.fract() == 0.0 && *n <= 1e6 => *n as usize,
                _ => return Err(Error::BadParams("greatCircle takes one integer n ≥ 2".into())),
            };
            great_circle(n)
        }
        "yGraph" => {
            no_params()?;
            y_graph()
        }
        "tetrahedron" => {
            no_params()?;
            tetrahedron()
        }
        "cube" => {
            no_params()?;
            cube()
        }
        "football" => match params {
            [] => football(0.8, 0.8),
            [a, b] => football(*a, *b),
            _ => Err(Error::BadParams("football takes two angles α⁺, α⁻".into())),
        },
        "elevenOvals" => {
            no_params()?;
            eleven_ovals()
        }
        "theta" => match params {
            [] => theta(&[0.4, 0.7, 1.0]),
            [a, b, c] => theta(&[*a, *b, *c]),
            _ => Err(Error::BadParams("theta takes three end angles".into())),
        },
        "handcuff" => {
            no_params()?;
            handcuff()
        }
        _ => Err(Error::UnknownExample(name.to_string())),
    }
}

/// Unit circle in the xy-plane split into `n` arcs.
pub fn great_circle(n: usize) -> Result<EmbeddedGraph> {
    if n < 2 {
        return Err(Error::BadParams("greatCircle needs n ≥ 2".into()));
    }
    let step = 2.0 * PI / n as f64;
    let verts: Vec<(String, Vec4)> =
        (0..n).map(|i| (format!("v{i}"), p3((i as f64 * step).cos(), (i as f64 * step).sin(), 0.0))).collect();
    let arcs = (0..n)
        .map(|i| {
            let c = CircularArc::new(Vec4::zeros(), Some(Vec4::z()), Some(Vec4::x()), None, 1.0, i as f64 * step, (i + 1) as f64 * step)?;
            Ok((format!("a{i}"), format!("v{i}"), format!("v{}", (i + 1) % n), ArcGeometry::Circular(c)))
        })
        .collect::<Result<Arcs>>()?;
    EmbeddedGraph::new(ModelSpace::Euclidean, verts, arcs)
}

/// Three unit semicircles from the north to the south pole in half-planes at 2π/3.
pub fn y_graph() -> Result<EmbeddedGraph> {
    let verts = vec![("north".to_string(), p3(0.0, 0.0, 1.0)), ("south".to_string(), p3(0.0, 0.0, -1.0))];
    let arcs = (0..3)
        .map(|k| {
            let phi = 2.0 * PI * k as f64 / 3.0;
            let n = p3(-phi.sin(), phi.cos(), 0.0);
            let c = CircularArc::new(Vec4::zeros(), Some(n), Some(Vec4::z()), None, 1.0, 0.0, PI)?;
            Ok((format!("a{k}"), "north".to_string(), "south".to_string(), ArcGeometry::Circular(c)))
        })
        .collect::<Result<Arcs>>()?;
    EmbeddedGraph::new(ModelSpace::Euclidean, verts, arcs)
}

fn straight_graph(verts: Vec<(String, Vec4)>, edges: &[(usize, usize)]) -> Result<EmbeddedGraph> {
    let arcs = edges
        .iter()
        .enumerate()
        .map(|(k, &(i, j))| {
            (format!("e{k}"), verts[i].0.clone(), verts[j].0.clone(), ArcGeometry::segment(verts[i].1, verts[j].1))
        })
        .collect();
    EmbeddedGraph::new(ModelSpace::Euclidean, verts, arcs)
}

/// Edges of the regular tetrahedron inscribed in the unit sphere.
pub fn tetrahedron() -> Result<EmbeddedGraph> {
    let s = 1.0 / 3f64.sqrt();
    let pts = [p3(s, s, s), p3(s, -s, -s), p3(-s, s, -s), p3(-s, -s, s)];
    let verts = pts.iter().enumerate().map(|(i, p)| (format!("t{i}"), *p)).collect();
    straight_graph(verts, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
}

/// Edges of the cube `[-1, 1]³`.
pub fn cube() -> Result<EmbeddedGraph> {
    let mut verts = Vec::new();
    for i in 0..8 {
        let c = |b: usize| if i >> b & 1 == 1 { 1.0 } else { -1.0 };
        verts.push((format!("c{i}"), p3(c(0), c(1), c(2))));
    }
    let mut edges = Vec::new();
    for i in 0..8usize {
        for b in 0..3 {
            let j = i ^ (1 << b);
            if i < j {
                edges.push((i, j));
            }
        }
    }
    straight_graph(verts, &edges)
}

/// Convex arc from `(0, 0, -1)` to `(0, 0, 1)` in the half-plane at azimuth
/// `phi`, leaving the axis at angle `am` and returning at angle `ap`. Two
/// circular pieces joined with a tangent parallel to the axis, so the arc
/// turns by exactly `am + ap`.
fn axis_arc(phi: f64, ap: f64, am: f64) -> Result<ArcGeometry> {
    let e = p3(phi.cos(), phi.sin(), 0.0);
    let z = Vec4::z();
    // r1 (1 − cos am) = r2 (1 − cos ap) = h, r1 sin am + r2 sin ap = 2.
    let ratio = (1.0 - am.cos()) / (1.0 - ap.cos());
    let r1 = 2.0 / (am.sin() + ratio * ap.sin());
    let r2 = r1 * ratio;
    let h = r1 * (1.0 - am.cos());
    let zm = -1.0 + r1 * am.sin();
    let c1 = e * (h - r1) + z * zm;
    let c2 = e * (h - r2) + z * zm;
    let lower = CircularArc::new(c1, None, Some(e), Some(z), r1, -am, 0.0)?;
    let upper = CircularArc::new(c2, None, Some(e), Some(z), r2, 0.0, ap)?;
    Ok(ArcGeometry::Chain(vec![ArcGeometry::Circular(lower), ArcGeometry::Circular(upper)]))
}

fn check_angle(a: f64) -> Result<()> {
    if a > 0.0 && a < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::BadParams(format!("end angle {a} must lie in (0, π/2)")))
    }
}

/// Theta graph of three congruent arcs in half-planes at mutual dihedral angle
/// 2π/3, meeting the axis at angles `ap` (top) and `am` (bottom).
pub fn football(ap: f64, am: f64) -> Result<EmbeddedGraph> {
    check_angle(ap)?;
    check_angle(am)?;
    let verts = vec![("qm".to_string(), p3(0.0, 0.0, -1.0)), ("qp".to_string(), p3(0.0, 0.0, 1.0))];
    let arcs = (0..3)
        .map(|k| Ok((format!("a{k}"), "qm".to_string(), "qp".to_string(), axis_arc(2.0 * PI * k as f64 / 3.0, ap, am)?)))
        .collect::<Result<Arcs>>()?;
    EmbeddedGraph::new(ModelSpace::Euclidean, verts, arcs)
}

/// Asymmetric theta graph: arcs at azimuths 0, π/2 and 6π/5 with the given
/// end angles (equal at both poles).
pub fn theta(angles: &[f64; 3]) -> Result<EmbeddedGraph> {
    let phis = [0.0, FRAC_PI_2, 1.2 * PI];
    let verts = vec![("qm".to_string(), p3(0.0, 0.0, -1.0)), ("qp".to_string(), p3(0.0, 0.0, 1.0))];
    let arcs = (0..3)
        .map(|k| {
            check_angle(angles[k])?;
            Ok((format!("a{k}"), "qm".to_string(), "qp".to_string(), axis_arc(phis[k], angles[k], angles[k])?))
        })
        .collect::<Result<Arcs>>()?;
    EmbeddedGraph::new(ModelSpace::Euclidean, verts, arcs)
}

/// Two unit circles joined by a segment.
pub fn handcuff() -> Result<EmbeddedGraph> {
    let verts = vec![("left".to_string(), p3(-1.0, 0.0, 0.0)), ("right".to_string(), p3(1.0, 0.0, 0.0))];
    let ring = |cx: f64, a0: f64| CircularArc::new(p3(cx, 0.0, 0.0), Some(Vec4::z()), Some(Vec4::x()), None, 1.0, a0, a0 + 2.0 * PI);
    let arcs = vec![
        ("loopL".to_string(), "left".to_string(), "left".to_string(), ArcGeometry::Circular(ring(-2.0, 0.0)?)),
        ("bar".to_string(), "left".to_string(), "right".to_string(), ArcGeometry::segment(p3(-1.0, 0.0, 0.0), p3(1.0, 0.0, 0.0))),
        ("loopR".to_string(), "right".to_string(), "right".to_string(), ArcGeometry::Circular(ring(2.0, PI)?)),
    ];
    EmbeddedGraph::new(ModelSpace::Euclidean, verts, arcs)
}

const Z_LEVELS: [f64; 6] = [-0.4, -0.24, -0.08, 0.08, 0.24, 0.4];
const Y_LEVELS: [f64; 5] = [-0.4, -0.2, 0.0, 0.2, 0.4];

/// Eleven stadium curves (unit straight sides, semicircular caps of radius 1):
/// six in planes `z = c`, five in planes `y = c`. Every pair from different
/// families crosses twice on straight sides, giving 60 valence-4 vertices.
pub fn eleven_ovals() -> Result<EmbeddedGraph> {
    let mut verts = Vec::new();
    for (k, &z) in Z_LEVELS.iter().enumerate() {
        for (j, &y) in Y_LEVELS.iter().enumerate() {
            for (side, x) in [("p", 1.0), ("m", -1.0)] {
                verts.push((format!("x{k}{j}{side}"), p3(x, y, z)));
            }
        }
    }
    let mut arcs = Vec::new();
    for (k, &z) in Z_LEVELS.iter().enumerate() {
        let ids: Vec<String> = (0..Y_LEVELS.len()).map(|j| format!("x{k}{j}")).collect();
        stadium(&mut arcs, &format!("z{k}"), |s, t| p3(s, t, z), Vec4::y(), &Y_LEVELS, &ids)?;
    }
    for (j, &y) in Y_LEVELS.iter().enumerate() {
        let ids: Vec<String> = (0..Z_LEVELS.len()).map(|k| format!("x{k}{j}")).collect();
        stadium(&mut arcs, &format!("y{j}"), |s, t| p3(s, y, t), Vec4::z(), &Z_LEVELS, &ids)?;
    }
    Ok(EmbeddedGraph::new(ModelSpace::Euclidean, verts, arcs)?.with_note(NOTE_ELEVEN_OVALS))
}

/// Stadium `|s| ≤ 1` sides at `s = ±1`, `t ∈ [-1/2, 1/2]`, cut at the crossing
/// levels `cuts` (ascending) on both sides. `ids[i]` + `p`/`m` name the cut
/// vertices at `s = ±1`.
fn stadium<F>(arcs: &mut Arcs, name: &str, at: F, et: Vec4, cuts: &[f64], ids: &[String]) -> Result<()>
where
    F: Fn(f64, f64) -> Vec4,
{
    let n = cuts.len();
    let mut k = 0;
    let mut push = |from: String, to: String, g: ArcGeometry| {
        arcs.push((format!("{name}_{k}"), from, to, g));
        k += 1;
    };
    let cap = |top: bool| -> Result<ArcGeometry> {
        let (t, a0) = if top { (0.5, 0.0) } else { (-0.5, PI) };
        Ok(ArcGeometry::Circular(CircularArc::new(at(0.0, t), None, Some(Vec4::x()), Some(et), 1.0, a0, a0 + PI)?))
    };
    // Up the s = +1 side.
    for i in 0..n - 1 {
        push(format!("{}p", ids[i]), format!("{}p", ids[i + 1]), ArcGeometry::segment(at(1.0, cuts[i]), at(1.0, cuts[i + 1])));
    }
    // Over the top cap.
    push(
        format!("{}p", ids[n - 1]),
        format!("{}m", ids[n - 1]),
        ArcGeometry::Chain(vec![
            ArcGeometry::segment(at(1.0, cuts[n - 1]), at(1.0, 0.5)),
            cap(true)?,
            ArcGeometry::segment(at(-1.0, 0.5), at(-1.0, cuts[n - 1])),
        ]),
    );
    // Down the s = −1 side.
    for i in (1..n).rev() {
        push(format!("{}m", ids[i]), format!("{}m", ids[i - 1]), ArcGeometry::segment(at(-1.0, cuts[i]), at(-1.0, cuts[i - 1])));
    }
    // Under the bottom cap.
    push(
        format!("{}m", ids[0]),
        format!("{}p", ids[0]),
        ArcGeometry::Chain(vec![
            ArcGeometry::segment(at(-1.0, cuts[0]), at(-1.0, -0.5)),
            cap(false)?,
            ArcGeometry::segment(at(1.0, -0.5), at(1.0, cuts[0])),
        ]),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_examples_validate() {
        for name in EXAMPLE_NAMES {
            let g = builtin_example(name, &[]).unwrap();
            let r = g.validate();
            assert!(r.is_empty(), "{name}: {r:?}");
            assert!(g.is_connected(), "{name}");
        }
    }

    #[test]
    fn eleven_ovals_shape() {
        let g = eleven_ovals().unwrap();
        assert_eq!(g.vertices.len(), 60);
        assert!((0..60).all(|v| g.valence(v) == 4));
    }

    #[test]
    fn spec_parsing_and_errors() {
        assert_eq!(parse_example_spec("football:0.3,0.5").unwrap(), ("football".into(), vec![0.3, 0.5]));
        assert_eq!(parse_example_spec("cube").unwrap(), ("cube".into(), vec![]));
        assert!(matches!(builtin_example("dodecahedron", &[]), Err(Error::UnknownExample(_))));
        assert!(matches!(builtin_example("football", &[1.6, 0.3]), Err(Error::BadParams(_))));
        assert!(matches!(builtin_example("cube", &[1.0]), Err(Error::BadParams(_))));
    }
}
