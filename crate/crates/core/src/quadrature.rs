//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Finite-difference step used where metric coefficients are differentiated numerically.
    pub fd_step: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { rel_tol: 1e-9, abs_tol: 1e-13, max_subdivisions: 2000, fd_step: 1e-5 }
    }
}

impl QuadratureConfig {
    pub fn with_tol(tol: f64) -> Result<Self> {
        let c = QuadratureConfig { rel_tol: tol, ..Default::default() };
        c.check()?;
        Ok(c)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return Err(Error::BadParams(format!("tolerance must lie in (0, 1e-3], got {}", self.rel_tol)));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::BadParams("max_subdivisions must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

impl std::ops::Add for Integral {
    type Output = Integral;
    fn add(self, o: Integral) -> Integral {
        Integral { value: self.value + o.value, error: self.error + o.error, intervals: self.intervals + o.intervals }
    }
}

impl Integral {
    pub const ZERO: Integral = Integral { value: 0.0, error: 0.0, intervals: 0 };
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error).then_with(|| o.a.total_cmp(&self.a))
    }
}

fn qk15<F>(f: &mut F, a: f64, b: f64) -> Result<Piece>
where
    F: FnMut(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x)?;
        let f2 = f(c + x)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kron += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kron * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kron * h;
    let resabs = resabs * h.abs();
    let resasc = resasc * h.abs();
    let mut error = ((kron - gauss) * h).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    if !value.is_finite() {
        return Err(Error::QuadratureNonconverged { error: f64::INFINITY, intervals: 1 });
    }
    Ok(Piece { a, b, value, error })
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_breaks(f, &[a, b], cfg)
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, never placing a node on an
/// interior break. Subdivision is global: the interval with the largest error
/// estimate is bisected until the total error meets the tolerance.
pub fn integrate_breaks<F>(mut f: F, breaks: &[f64], cfg: &QuadratureConfig) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    let span = (breaks[breaks.len() - 1] - breaks[0]).abs();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let p = qk15(&mut f, w[0], w[1])?;
            value += p.value;
            error += p.error;
            heap.push(p);
        }
    }
    let mut intervals = heap.len();
    // Pieces that cannot be split further without hitting round-off.
    let mut frozen_error = 0.0;
    let mut frozen_value = 0.0;
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if error <= tol {
            break;
        }
        if heap.is_empty() {
            if frozen_error <= tol.max(1e3 * f64::EPSILON * value.abs()) {
                break;
            }
            return Err(Error::QuadratureNonconverged { error, intervals });
        }
        if intervals >= cfg.max_subdivisions {
            return Err(Error::QuadratureNonconverged { error, intervals });
        }
        let p = heap.pop().unwrap();
        let mid = 0.5 * (p.a + p.b);
        if p.b - p.a <= 1e-13 * span.max(1e-300) || mid <= p.a || mid >= p.b {
            frozen_error += p.error;
            frozen_value += p.value;
            continue;
        }
        let l = qk15(&mut f, p.a, mid)?;
        let r = qk15(&mut f, mid, p.b)?;
        value += l.value + r.value - p.value;
        error += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
        intervals += 1;
    }
    // Re-sum to avoid drift from the running updates.
    let mut pieces = heap.into_vec();
    pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = pieces.iter().map(|p| p.value).sum::<f64>() + frozen_value;
    let error = pieces.iter().map(|p| p.error).sum::<f64>() + frozen_error;
    Ok(Integral { value, error, intervals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let cfg = QuadratureConfig::default();
        let r = integrate(|x| Ok(x.powi(6) - 3.0 * x), 0.0, 2.0, &cfg).unwrap();
        assert!((r.value - (128.0 / 7.0 - 6.0)).abs() < 1e-13);
    }

    #[test]
    fn kink_needs_subdivision() {
        let cfg = QuadratureConfig::default();
        let r = integrate(|x: f64| Ok((x - 0.3).abs().sqrt()), 0.0, 1.0, &cfg).unwrap();
        let exact = 2.0 / 3.0 * (0.3f64.powf(1.5) + 0.7f64.powf(1.5));
        assert!((r.value - exact).abs() < 1e-9);
        assert!(r.intervals > 1);
    }

    #[test]
    fn breaks_split_the_domain() {
        let cfg = QuadratureConfig::default();
        let r = integrate_breaks(|x: f64| Ok(if x < 0.5 { 1.0 } else { 2.0 }), &[0.0, 0.5, 1.0], &cfg).unwrap();
        assert!((r.value - 1.5).abs() < 1e-15);
        assert_eq!(r.intervals, 2);
    }

    #[test]
    fn errors_propagate() {
        let cfg = QuadratureConfig::default();
        let r = integrate(|x| if x > 0.9 { Err(Error::ApexOnGraph) } else { Ok(x) }, 0.0, 1.0, &cfg);
        assert_eq!(r, Err(Error::ApexOnGraph));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = QuadratureConfig { max_subdivisions: 3, ..Default::default() };
        let r = integrate(|x: f64| Ok((1.0 / x.max(1e-300)).sqrt().sin() / x.sqrt()), 0.0, 1.0, &cfg);
        assert!(matches!(r, Err(Error::QuadratureNonconverged { .. })));
    }
}
