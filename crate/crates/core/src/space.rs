//! Ambient model spaces.
//!
//! Every point is stored as a [`Vec4`] of embedding coordinates:
//!
//! * Euclidean space uses `(x, y, z, 0)`.
//! * The round sphere of curvature `κ²` is `{x ∈ R⁴ : |x|² = 1/κ²}`.
//! * Hyperbolic space of curvature `−κ²` is the upper sheet of the hyperboloid
//!   `{x : x² + y² + z² − w² = −1/κ², w > 0}` with the Minkowski product.
//!
//! Geodesics in the curved models are intersections with 2-planes through the
//! origin, so all primitives below have closed forms.

use nalgebra::{Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Vec4 = Vector4<f64>;

/// A point of the ambient model, in embedding coordinates.
pub type AmbientPoint = Vec4;

/// Relative tolerance for the model-membership invariant.
pub const MODEL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpace {
    Euclidean,
    Hyperbolic { kappa: f64 },
    Spherical { kappa: f64 },
}

/// Position, velocity and acceleration of a curve at one parameter value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub pos: Vec4,
    pub vel: Vec4,
    pub acc: Vec4,
}

impl ModelSpace {
    pub fn hyperbolic(kappa: f64) -> Self {
        ModelSpace::Hyperbolic { kappa }
    }

    pub fn spherical(kappa: f64) -> Self {
        ModelSpace::Spherical { kappa }
    }

    /// Curvature scale `κ` (zero for Euclidean space).
    pub fn kappa(&self) -> f64 {
        match *self {
            ModelSpace::Euclidean => 0.0,
            ModelSpace::Hyperbolic { kappa } | ModelSpace::Spherical { kappa } => kappa,
        }
    }

    /// Sectional curvature of the model.
    pub fn curvature(&self) -> f64 {
        match *self {
            ModelSpace::Euclidean => 0.0,
            ModelSpace::Hyperbolic { kappa } => -kappa * kappa,
            ModelSpace::Spherical { kappa } => kappa * kappa,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpace::Euclidean => "euclidean",
            ModelSpace::Hyperbolic { .. } => "hyperbolic",
            ModelSpace::Spherical { .. } => "spherical",
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self, ModelSpace::Euclidean)
    }

    /// Number of coordinates used in files for this model.
    pub fn coord_len(&self) -> usize {
        if self.is_euclidean() {
            3
        } else {
            4
        }
    }

    pub fn check_kappa(&self) -> Result<()> {
        let k = self.kappa();
        if !self.is_euclidean() && !(k.is_finite() && k > 0.0) {
            return Err(Error::BadParams(format!("kappa must be finite and positive, got {k}")));
        }
        Ok(())
    }

    /// Builds a point from file coordinates (3 for Euclidean, 4 otherwise).
    pub fn point_from_coords(&self, c: &[f64]) -> Result<Vec4> {
        if c.len() != self.coord_len() {
            return Err(Error::Schema(format!(
                "{} points need {} coordinates, got {}",
                self.name(),
                self.coord_len(),
                c.len()
            )));
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(Error::Schema("non-finite coordinate".into()));
        }
        Ok(if self.is_euclidean() {
            Vec4::new(c[0], c[1], c[2], 0.0)
        } else {
            Vec4::new(c[0], c[1], c[2], c[3])
        })
    }

    pub fn coords(&self, p: &Vec4) -> Vec<f64> {
        p.as_slice()[..self.coord_len()].to_vec()
    }

    /// The model's bilinear form on embedding coordinates.
    #[inline]
    pub fn inner(&self, a: &Vec4, b: &Vec4) -> f64 {
        match self {
            ModelSpace::Hyperbolic { .. } => a.x * b.x + a.y * b.y + a.z * b.z - a.w * b.w,
            _ => a.dot(b),
        }
    }

    /// Norm of a tangent (spacelike) vector.
    #[inline]
    pub fn norm(&self, v: &Vec4) -> f64 {
        self.inner(v, v).max(0.0).sqrt()
    }

    /// Distinguished base point: the origin, or the "north pole" `(0,0,0,1/κ)`.
    pub fn origin(&self) -> Vec4 {
        match self {
            ModelSpace::Euclidean => Vec4::zeros(),
            _ => Vec4::new(0.0, 0.0, 0.0, 1.0 / self.kappa()),
        }
    }

    /// Relative violation of the model-membership equation.
    pub fn membership_residual(&self, p: &Vec4) -> f64 {
        match *self {
            ModelSpace::Euclidean => p.w.abs(),
            ModelSpace::Spherical { kappa } => (kappa * kappa * p.norm_squared() - 1.0).abs(),
            ModelSpace::Hyperbolic { kappa } => {
                let r = (kappa * kappa * self.inner(p, p) + 1.0).abs();
                if p.w <= 0.0 {
                    f64::INFINITY
                } else {
                    r
                }
            }
        }
    }

    pub fn contains(&self, p: &Vec4) -> bool {
        self.membership_residual(p) <= MODEL_TOL
    }

    /// Radial projection of an embedding vector onto the model.
    pub fn normalize_point(&self, x: &Vec4) -> Vec4 {
        match *self {
            ModelSpace::Euclidean => Vec4::new(x.x, x.y, x.z, 0.0),
            ModelSpace::Spherical { kappa } => x / (kappa * x.norm()),
            ModelSpace::Hyperbolic { kappa } => {
                let s = (-self.inner(x, x)).max(0.0).sqrt();
                x / (kappa * s)
            }
        }
    }

    /// Orthogonal projection of `v` onto the tangent space at `p`.
    pub fn tangent_project(&self, p: &Vec4, v: &Vec4) -> Vec4 {
        match *self {
            ModelSpace::Euclidean => Vec4::new(v.x, v.y, v.z, 0.0),
            ModelSpace::Spherical { kappa } => v - p * (kappa * kappa * self.inner(v, p)),
            ModelSpace::Hyperbolic { kappa } => v + p * (kappa * kappa * self.inner(v, p)),
        }
    }

    /// Unnormalized direction at `p` toward `q`, computed without cancellation.
    /// Its derivative in `q` is the tangent projection at `p`.
    pub fn chord_direction(&self, p: &Vec4, q: &Vec4) -> Vec4 {
        let d = q - p;
        match *self {
            ModelSpace::Euclidean => d,
            ModelSpace::Spherical { kappa } => d + p * (0.5 * kappa * kappa * d.norm_squared()),
            ModelSpace::Hyperbolic { kappa } => d - p * (0.5 * kappa * kappa * self.inner(&d, &d)),
        }
    }

    /// Geodesic distance.
    pub fn dist(&self, p: &Vec4, q: &Vec4) -> f64 {
        let d = q - p;
        match *self {
            ModelSpace::Euclidean => d.norm(),
            ModelSpace::Spherical { kappa } => {
                let chord = d.norm();
                2.0 / kappa * (0.5 * kappa * chord).min(1.0).asin()
            }
            ModelSpace::Hyperbolic { kappa } => {
                let chord = self.inner(&d, &d).max(0.0).sqrt();
                2.0 / kappa * (0.5 * kappa * chord).asinh()
            }
        }
    }

    /// Unit initial direction of the minimizing geodesic from `p` to `q`.
    pub fn initial_direction(&self, p: &Vec4, q: &Vec4) -> Result<Vec4> {
        let w = self.chord_direction(p, q);
        let n = self.norm(&w);
        if n == 0.0 || !n.is_finite() {
            return Err(if (q - p).norm() > 0.0 {
                Error::AntipodalPair
            } else {
                Error::BadParams("coincident points have no direction".into())
            });
        }
        if let ModelSpace::Spherical { kappa } = *self {
            if self.dist(p, q) >= std::f64::consts::PI / kappa * (1.0 - 1e-12) {
                return Err(Error::AntipodalPair);
            }
        }
        Ok(w / n)
    }

    /// Logarithm map: tangent vector at `p` of length `dist(p, q)` pointing to `q`.
    pub fn log(&self, p: &Vec4, q: &Vec4) -> Result<Vec4> {
        if (q - p).norm() == 0.0 {
            return Ok(Vec4::zeros());
        }
        Ok(self.initial_direction(p, q)? * self.dist(p, q))
    }

    /// Exponential map at `p` of the tangent vector `v`.
    pub fn exp(&self, p: &Vec4, v: &Vec4) -> Vec4 {
        let n = self.norm(v);
        match *self {
            ModelSpace::Euclidean => p + v,
            ModelSpace::Spherical { kappa } => {
                let x = kappa * n;
                p * x.cos() + v * sinc(x)
            }
            ModelSpace::Hyperbolic { kappa } => {
                let x = kappa * n;
                p * x.cosh() + v * sinhc(x)
            }
        }
    }

    /// Point at fraction `t` along the minimizing geodesic from `p` to `q`.
    pub fn geodesic(&self, p: &Vec4, q: &Vec4, t: f64) -> Result<Vec4> {
        if self.is_euclidean() {
            return Ok(p + (q - p) * t);
        }
        let v = self.log(p, q)?;
        Ok(self.exp(p, &(v * t)))
    }

    /// Orthonormal basis of the tangent space at `p`, deterministic in `p`.
    pub fn tangent_frame(&self, p: &Vec4) -> [Vec4; 3] {
        if self.is_euclidean() {
            return [Vec4::x(), Vec4::y(), Vec4::z()];
        }
        let axes = [Vec4::x(), Vec4::y(), Vec4::z(), Vec4::w()];
        let mut cand: Vec<Vec4> = axes.iter().map(|a| self.tangent_project(p, a)).collect();
        // Start from the projections that survive best.
        cand.sort_by(|a, b| self.norm(b).total_cmp(&self.norm(a)));
        let mut basis: Vec<Vec4> = Vec::with_capacity(3);
        for c in cand {
            let mut v = c;
            for b in &basis {
                v -= b * self.inner(&v, b);
            }
            let n = self.norm(&v);
            if n > 1e-8 * self.norm(&c).max(1.0) {
                basis.push(v / n);
            }
            if basis.len() == 3 {
                break;
            }
        }
        [basis[0], basis[1], basis[2]]
    }

    /// Coordinates of a tangent vector at `p` in [`Self::tangent_frame`].
    pub fn to_frame(&self, p: &Vec4, v: &Vec4) -> Vec3 {
        let f = self.tangent_frame(p);
        Vec3::new(self.inner(v, &f[0]), self.inner(v, &f[1]), self.inner(v, &f[2]))
    }

    /// Parallel transport of a tangent vector at `p` along the geodesic to `q`.
    pub fn transport(&self, p: &Vec4, q: &Vec4, x: &Vec4) -> Result<Vec4> {
        if self.is_euclidean() {
            return Ok(*x);
        }
        let d = self.dist(p, q);
        if d == 0.0 {
            return Ok(*x);
        }
        let u = self.initial_direction(p, q)?;
        let k = self.kappa();
        let c = self.inner(&u, x);
        Ok(match self {
            ModelSpace::Spherical { .. } => x + (u * ((k * d).cos() - 1.0) - p * (k * (k * d).sin())) * c,
            _ => x + (u * ((k * d).cosh() - 1.0) + p * (k * (k * d).sinh())) * c,
        })
    }

    /// Maps a Euclidean point `(x,y,z)` into the model through the exponential
    /// map at [`Self::origin`], reading it as a tangent vector there.
    pub fn lift_point(&self, e: &Vec4) -> Vec4 {
        let v = Vec4::new(e.x, e.y, e.z, 0.0);
        self.exp(&self.origin(), &v)
    }

    /// Lifts a Euclidean tangent vector based at `e` to the lifted point,
    /// by parallel transport from the origin.
    pub fn lift_vector(&self, e: &Vec4, v: &Vec4) -> Vec4 {
        let v = Vec4::new(v.x, v.y, v.z, 0.0);
        if self.is_euclidean() {
            return v;
        }
        let o = self.origin();
        let q = self.lift_point(e);
        self.transport(&o, &q, &v).unwrap_or(v)
    }

    /// Converts a jet of an embedding-space curve into the jet of its radial
    /// projection onto the model.
    pub fn normalize_jet(&self, raw: &Jet) -> Jet {
        let kappa = self.kappa();
        let sign = match self {
            ModelSpace::Euclidean => {
                return Jet {
                    pos: Vec4::new(raw.pos.x, raw.pos.y, raw.pos.z, 0.0),
                    vel: Vec4::new(raw.vel.x, raw.vel.y, raw.vel.z, 0.0),
                    acc: Vec4::new(raw.acc.x, raw.acc.y, raw.acc.z, 0.0),
                }
            }
            ModelSpace::Spherical { .. } => 1.0,
            ModelSpace::Hyperbolic { .. } => -1.0,
        };
        let (x, x1, x2) = (raw.pos, raw.vel, raw.acc);
        let n = (sign * self.inner(&x, &x)).sqrt();
        let n1 = sign * self.inner(&x, &x1) / n;
        let n2 = (sign * (self.inner(&x1, &x1) + self.inner(&x, &x2)) - n1 * n1) / n;
        let f = 1.0 / (kappa * n);
        let f1 = -n1 / (kappa * n * n);
        let f2 = -(n2 / (n * n) - 2.0 * n1 * n1 / (n * n * n)) / kappa;
        Jet {
            pos: x * f,
            vel: x1 * f + x * f1,
            acc: x2 * f + x1 * (2.0 * f1) + x * f2,
        }
    }

    /// Projection chart in which geodesics are straight lines: identity for
    /// Euclidean space, the gnomonic chart on the sphere and the Klein chart on
    /// the hyperboloid, centred at `center`.
    pub fn chart(&self, center: &Vec4) -> ProjectiveChart {
        ProjectiveChart::new(*self, *center)
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

/// Chart `M → R³` that straightens geodesics. Convex sets in the model map to
/// convex sets of the chart.
#[derive(Clone, Debug)]
pub struct ProjectiveChart {
    space: ModelSpace,
    center: Vec4,
    frame: [Vec4; 3],
}

impl ProjectiveChart {
    fn new(space: ModelSpace, center: Vec4) -> Self {
        let frame = space.tangent_frame(&center);
        ProjectiveChart { space, center, frame }
    }

    pub fn space(&self) -> ModelSpace {
        self.space
    }

    pub fn to_chart(&self, p: &Vec4) -> Vec3 {
        let s = &self.space;
        let x = match s {
            ModelSpace::Euclidean => p - self.center,
            _ => {
                // Rescale p so that it lies on the tangent hyperplane at the centre.
                let k2 = s.kappa() * s.kappa();
                let lambda = match s {
                    ModelSpace::Spherical { .. } => 1.0 / (k2 * s.inner(p, &self.center)),
                    _ => -1.0 / (k2 * s.inner(p, &self.center)),
                };
                p * lambda - self.center
            }
        };
        Vec3::new(s.inner(&x, &self.frame[0]), s.inner(&x, &self.frame[1]), s.inner(&x, &self.frame[2]))
    }

    pub fn from_chart(&self, c: &Vec3) -> Vec4 {
        let v = self.frame[0] * c.x + self.frame[1] * c.y + self.frame[2] * c.z;
        self.space.normalize_point(&(self.center + v))
    }
}
