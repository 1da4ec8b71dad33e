//! Parametric arc primitives.
//!
//! Arcs are parametrized over `t ∈ [0, 1]`. In the curved models an arc is
//! stored as a curve in embedding coordinates and evaluated through the radial
//! projection onto the model ([`ModelSpace::normalize_jet`]); straight chords
//! therefore become geodesics and circles lying on the model stay put.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Jet, ModelSpace, Vec3, Vec4};

#[derive(Clone, Debug, PartialEq)]
pub enum ArcGeometry {
    Segment { a: Vec4, b: Vec4 },
    Circular(CircularArc),
    Polyline(Spline),
    /// Consecutive pieces sharing endpoints; piece `k` covers `t ∈ [k/n, (k+1)/n]`.
    Chain(Vec<ArcGeometry>),
}

/// Circle `center + radius (cos θ u + sin θ v)` for `θ` between `angle0` and `angle1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CircularArc {
    pub center: Vec4,
    pub radius: f64,
    pub angle0: f64,
    pub angle1: f64,
    /// Plane normal (3-coordinate models).
    pub normal: Option<Vec4>,
    /// Direction of `θ = 0`.
    pub axis: Option<Vec4>,
    /// Direction of `θ = π/2` (4-coordinate models, where a normal does not fix the plane).
    pub axis2: Option<Vec4>,
    u: Vec4,
    v: Vec4,
}

impl CircularArc {
    pub fn new(
        center: Vec4,
        normal: Option<Vec4>,
        axis: Option<Vec4>,
        axis2: Option<Vec4>,
        radius: f64,
        angle0: f64,
        angle1: f64,
    ) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Schema(format!("circular arc radius must be positive, got {radius}")));
        }
        let sweep = angle1 - angle0;
        if !sweep.is_finite() || sweep == 0.0 || sweep.abs() > 2.0 * std::f64::consts::PI + 1e-12 {
            return Err(Error::Schema(format!("bad circular arc angle interval [{angle0}, {angle1}]")));
        }
        let (u, v) = if let Some(a2) = axis2 {
            let a = axis.ok_or_else(|| Error::Schema("`axis2` requires `axis`".into()))?;
            let u = unit4(&a)?;
            let v = unit4(&(a2 - u * a2.dot(&u)))?;
            (u, v)
        } else {
            let n = normal.ok_or_else(|| Error::Schema("circular arc needs `normal` or `axis`+`axis2`".into()))?;
            if n.w != 0.0 {
                return Err(Error::Schema("`normal` must be a 3-vector; use `axis`/`axis2` in 4 coordinates".into()));
            }
            let n = unit4(&n)?.xyz();
            let a = match axis {
                Some(a) => a.xyz(),
                None => default_perpendicular(&n),
            };
            let u = a - n * a.dot(&n);
            let un = u.norm();
            if un < 1e-12 * a.norm().max(1.0) {
                return Err(Error::Schema("circular arc axis is parallel to its normal".into()));
            }
            let u = u / un;
            let v = n.cross(&u);
            (u.push(0.0), v.push(0.0))
        };
        Ok(CircularArc { center, radius, angle0, angle1, normal, axis, axis2, u, v })
    }

    pub fn basis(&self) -> (Vec4, Vec4) {
        (self.u, self.v)
    }

    fn raw_jet(&self, t: f64) -> Jet {
        let s = self.angle1 - self.angle0;
        let th = self.angle0 + t * s;
        let (sn, cs) = th.sin_cos();
        let r = self.radius;
        Jet {
            pos: self.center + (self.u * cs + self.v * sn) * r,
            vel: (self.v * cs - self.u * sn) * (r * s),
            acc: (self.u * cs + self.v * sn) * (-r * s * s),
        }
    }
}

fn unit4(v: &Vec4) -> Result<Vec4> {
    let n = v.norm();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::Schema("zero direction vector".into()));
    }
    Ok(v / n)
}

fn default_perpendicular(n: &Vec3) -> Vec3 {
    let axes = [Vec3::x(), Vec3::y(), Vec3::z()];
    let mut best = axes[0];
    for a in &axes[1..] {
        if a.dot(n).abs() < best.dot(n).abs() {
            best = *a;
        }
    }
    best
}

/// Natural cubic spline through sample points, chord-length parametrized and
/// rescaled to `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spline {
    pub points: Vec<Vec4>,
    knots: Vec<f64>,
    second: Vec<Vec4>,
}

impl Spline {
    pub fn new(points: Vec<Vec4>) -> Result<Self> {
        let n = points.len();
        if n < 2 {
            return Err(Error::Schema("polyline needs at least two points".into()));
        }
        let mut knots = vec![0.0; n];
        for i in 1..n {
            let h = (points[i] - points[i - 1]).norm();
            if h == 0.0 {
                return Err(Error::Schema(format!("polyline has repeated point at index {i}")));
            }
            knots[i] = knots[i - 1] + h;
        }
        let total = knots[n - 1];
        for k in knots.iter_mut() {
            *k /= total;
        }
        knots[n - 1] = 1.0;

        // Tridiagonal system for the second derivatives, natural end conditions.
        let mut second = vec![Vec4::zeros(); n];
        if n > 2 {
            let m = n - 2;
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut rhs = vec![Vec4::zeros(); m];
            for j in 0..m {
                let i = j + 1;
                let h0 = knots[i] - knots[i - 1];
                let h1 = knots[i + 1] - knots[i];
                diag[j] = 2.0 * (h0 + h1);
                upper[j] = h1;
                rhs[j] = ((points[i + 1] - points[i]) / h1 - (points[i] - points[i - 1]) / h0) * 6.0;
            }
            for j in 1..m {
                let lower = knots[j + 1] - knots[j];
                let w = lower / diag[j - 1];
                diag[j] -= w * upper[j - 1];
                let prev = rhs[j - 1];
                rhs[j] -= prev * w;
            }
            second[m] = rhs[m - 1] / diag[m - 1];
            for j in (0..m - 1).rev() {
                second[j + 1] = (rhs[j] - second[j + 2] * upper[j]) / diag[j];
            }
        }
        Ok(Spline { points, knots, second })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    fn raw_jet(&self, t: f64) -> Jet {
        let n = self.knots.len();
        let i = match self.knots.partition_point(|&k| k <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let (s0, s1) = (self.knots[i], self.knots[i + 1]);
        let h = s1 - s0;
        let (p0, p1) = (self.points[i], self.points[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let a = s1 - t;
        let b = t - s0;
        Jet {
            pos: m0 * (a * a * a / (6.0 * h))
                + m1 * (b * b * b / (6.0 * h))
                + (p0 / h - m0 * (h / 6.0)) * a
                + (p1 / h - m1 * (h / 6.0)) * b,
            vel: m1 * (b * b / (2.0 * h)) - m0 * (a * a / (2.0 * h)) + (p1 - p0) / h - (m1 - m0) * (h / 6.0),
            acc: m0 * (a / h) + m1 * (b / h),
        }
    }
}

impl ArcGeometry {
    pub fn segment(a: Vec4, b: Vec4) -> Self {
        ArcGeometry::Segment { a, b }
    }

    pub fn polyline(points: Vec<Vec4>) -> Result<Self> {
        Ok(ArcGeometry::Polyline(Spline::new(points)?))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ArcGeometry::Segment { .. } => "segment",
            ArcGeometry::Circular(_) => "circular",
            ArcGeometry::Polyline(_) => "polyline",
            ArcGeometry::Chain(_) => "chain",
        }
    }

    /// Jet of the underlying embedding-space curve. Parameters outside `[0, 1]`
    /// extend the first/last smooth piece.
    pub fn raw_jet(&self, t: f64) -> Jet {
        match self {
            ArcGeometry::Segment { a, b } => Jet { pos: a + (b - a) * t, vel: b - a, acc: Vec4::zeros() },
            ArcGeometry::Circular(c) => c.raw_jet(t),
            ArcGeometry::Polyline(s) => s.raw_jet(t),
            ArcGeometry::Chain(pieces) => {
                let n = pieces.len() as f64;
                let k = ((t * n).floor().max(0.0) as usize).min(pieces.len() - 1);
                let j = pieces[k].raw_jet(t * n - k as f64);
                Jet { pos: j.pos, vel: j.vel * n, acc: j.acc * (n * n) }
            }
        }
    }

    /// Jet of the arc in the model space.
    pub fn jet(&self, space: &ModelSpace, t: f64) -> Jet {
        space.normalize_jet(&self.raw_jet(t))
    }

    pub fn point(&self, space: &ModelSpace, t: f64) -> Vec4 {
        space.normalize_point(&self.raw_jet(t).pos)
    }

    /// Parameters where the arc may fail to be C², including 0 and 1.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            ArcGeometry::Segment { .. } | ArcGeometry::Circular(_) => vec![0.0, 1.0],
            ArcGeometry::Polyline(s) => s.knots.clone(),
            ArcGeometry::Chain(pieces) => {
                let n = pieces.len() as f64;
                let mut out = vec![0.0];
                for (k, p) in pieces.iter().enumerate() {
                    for b in p.breakpoints().into_iter().skip(1) {
                        out.push((k as f64 + b) / n);
                    }
                }
                if let Some(last) = out.last_mut() {
                    *last = 1.0;
                }
                out
            }
        }
    }

    /// Unit tangent at an endpoint, pointing into the arc.
    pub fn end_tangent(&self, space: &ModelSpace, end: End) -> Result<Vec4> {
        let (t, sign) = match end {
            End::Start => (0.0, 1.0),
            End::Finish => (1.0, -1.0),
        };
        let j = self.jet(space, t);
        let n = space.norm(&j.vel);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::BadParams("arc has zero speed at an endpoint".into()));
        }
        Ok(j.vel * (sign / n))
    }

    /// Applies `x ↦ scale·R·x + shift` to a Euclidean arc. `rot` must be a rotation.
    pub fn transformed(&self, rot: &Matrix3<f64>, scale: f64, shift: &Vec3) -> Result<Self> {
        let pt = |p: &Vec4| (rot * p.xyz() * scale + shift).push(0.0);
        let dir = |p: &Vec4| (rot * p.xyz()).push(0.0);
        Ok(match self {
            ArcGeometry::Segment { a, b } => ArcGeometry::Segment { a: pt(a), b: pt(b) },
            ArcGeometry::Circular(c) => ArcGeometry::Circular(CircularArc::new(
                pt(&c.center),
                c.normal.as_ref().map(dir),
                Some(dir(&c.u)),
                c.axis2.map(|_| dir(&c.v)),
                c.radius * scale,
                c.angle0,
                c.angle1,
            )?),
            ArcGeometry::Polyline(s) => ArcGeometry::polyline(s.points.iter().map(pt).collect())?,
            ArcGeometry::Chain(p) => {
                ArcGeometry::Chain(p.iter().map(|g| g.transformed(rot, scale, shift)).collect::<Result<_>>()?)
            }
        })
    }

    /// Re-embeds a Euclidean arc in a curved model through the projective
    /// chart at the model origin: `x ↦ (x, 1/κ)` followed by radial projection.
    pub fn lifted(&self, kappa: f64) -> Result<Self> {
        let pt = |p: &Vec4| Vec4::new(p.x, p.y, p.z, 1.0 / kappa);
        Ok(match self {
            ArcGeometry::Segment { a, b } => ArcGeometry::Segment { a: pt(a), b: pt(b) },
            ArcGeometry::Circular(c) => ArcGeometry::Circular(CircularArc::new(
                pt(&c.center),
                None,
                Some(c.u),
                Some(c.v),
                c.radius,
                c.angle0,
                c.angle1,
            )?),
            ArcGeometry::Polyline(s) => ArcGeometry::polyline(s.points.iter().map(pt).collect())?,
            ArcGeometry::Chain(p) => ArcGeometry::Chain(p.iter().map(|g| g.lifted(kappa)).collect::<Result<_>>()?),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    Start,
    Finish,
}

impl End {
    pub fn param(self) -> f64 {
        match self {
            End::Start => 0.0,
            End::Finish => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            End::Start => "start",
            End::Finish => "finish",
        }
    }
}
