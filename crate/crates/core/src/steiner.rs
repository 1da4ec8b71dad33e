//! Vertex contributions to total curvature.
//!
//! For unit tangents `T_1..T_d` at a vertex, `tc(q) = dπ/2 − min_e Σ_ℓ ∠(T_ℓ, e)`
//! where `e` ranges over the unit sphere; the minimizer is the spherical
//! Steiner (Fermat) point of the tangents.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::EmbeddedGraph;
use crate::space::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SteinerMethod {
    Valence2Exact,
    Valence3Exact,
    Valence4Candidates,
    GeneralDescent,
    GridOracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Number of candidate points evaluated (exact methods, grid oracle).
    pub candidates: usize,
    /// Riemannian gradient norm of the smooth terms at `e0`.
    pub residual: f64,
    pub restarts: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinerResult {
    pub e0: Vec3,
    pub angle_sum: f64,
    pub tc: f64,
    pub method: SteinerMethod,
    pub certificate: Certificate,
}

impl SteinerResult {
    fn new(d: usize, e0: Vec3, angle_sum: f64, method: SteinerMethod, certificate: Certificate) -> Self {
        SteinerResult { e0, angle_sum, tc: d as f64 * FRAC_PI_2 - angle_sum, method, certificate }
    }
}

/// Values closer than this are treated as ties.
const TIE: f64 = 1e-12;

/// `Σ_ℓ ∠(T_ℓ, e)`; angles via `atan2`, which stays accurate near 0 and π.
pub fn angle_objective(dirs: &[Vec3], e: &Vec3) -> f64 {
    dirs.iter().map(|t| t.cross(e).norm().atan2(t.dot(e))).sum()
}

fn check_config(dirs: &[Vec3]) -> Result<()> {
    if dirs.len() < 2 {
        return Err(Error::BadParams(format!("need at least two directions, got {}", dirs.len())));
    }
    for t in dirs {
        if !((t.norm() - 1.0).abs() <= 1e-9) {
            return Err(Error::BadParams(format!("direction {t:?} is not a unit vector")));
        }
    }
    Ok(())
}

fn lex_less(a: &Vec3, b: &Vec3) -> bool {
    for i in 0..3 {
        if a[i] != b[i] {
            return a[i] < b[i];
        }
    }
    false
}

/// Keeps the best `(value, e)` pair: smaller value, ties broken lexicographically.
#[derive(Clone, Copy, Debug)]
struct Best {
    value: f64,
    e: Vec3,
}

impl Best {
    fn empty() -> Self {
        Best { value: f64::INFINITY, e: Vec3::zeros() }
    }

    fn offer(&mut self, value: f64, e: Vec3) {
        if value < self.value - TIE || ((value - self.value).abs() <= TIE && lex_less(&e, &self.e)) {
            self.value = value;
            self.e = e;
        }
    }
}

/// Orthonormal basis of the plane orthogonal to `e`.
fn tangent_basis(e: &Vec3) -> (Vec3, Vec3) {
    let a = if e.x.abs() < 0.6 { Vec3::x() } else if e.y.abs() < 0.6 { Vec3::y() } else { Vec3::z() };
    let u = (a - e * a.dot(e)).normalize();
    (u, e.cross(&u))
}

fn exp_sphere(e: &Vec3, v: &Vec3) -> Vec3 {
    let n = v.norm();
    if n == 0.0 {
        return *e;
    }
    (e * n.cos() + v * (n.sin() / n)).normalize()
}

/// Unit tangent at `e` pointing toward `t`, with the distance; `None` when `t = ±e`.
fn toward(e: &Vec3, t: &Vec3) -> Option<(Vec3, f64)> {
    let w = t - e * t.dot(e);
    let s = w.norm();
    if s < 1e-14 {
        return None;
    }
    let d = s.atan2(t.dot(e));
    Some((w / s, d))
}

/// Riemannian gradient of the smooth terms at `e` (singular terms dropped).
fn gradient(dirs: &[Vec3], e: &Vec3) -> Vec3 {
    let mut g = Vec3::zeros();
    for t in dirs {
        if let Some((xi, _)) = toward(e, t) {
            g -= xi;
        }
    }
    g
}

/// Newton iteration on the smooth part; only accepts non-increasing steps.
fn newton_polish(dirs: &[Vec3], e: Vec3) -> Vec3 {
    let mut e = e;
    let mut fe = angle_objective(dirs, &e);
    for _ in 0..40 {
        if dirs.iter().any(|t| t.dot(&e).abs() > 1.0 - 1e-14) {
            break;
        }
        let (u, v) = tangent_basis(&e);
        let mut g = [0.0; 2];
        let mut h = [[0.0; 2]; 2];
        for t in dirs {
            let Some((xi, d)) = toward(&e, t) else { continue };
            let x = [xi.dot(&u), xi.dot(&v)];
            g[0] -= x[0];
            g[1] -= x[1];
            let c = d.cos() / d.sin();
            for i in 0..2 {
                for j in 0..2 {
                    let id = if i == j { 1.0 } else { 0.0 };
                    h[i][j] += c * (id - x[i] * x[j]);
                }
            }
        }
        let gn = (g[0] * g[0] + g[1] * g[1]).sqrt();
        if gn < 1e-15 {
            break;
        }
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if !(det > 0.0 && h[0][0] > 0.0) {
            break;
        }
        let s0 = -(h[1][1] * g[0] - h[0][1] * g[1]) / det;
        let s1 = -(-h[1][0] * g[0] + h[0][0] * g[1]) / det;
        let step = u * s0 + v * s1;
        if step.norm() > 0.5 {
            break;
        }
        let cand = exp_sphere(&e, &step);
        let fc = angle_objective(dirs, &cand);
        let gc = gradient(dirs, &cand).norm();
        if fc < fe || (fc <= fe + 1e-14 && gc < gn) {
            e = cand;
            fe = fc;
        } else {
            break;
        }
    }
    e
}

/// Damped Riemannian Weiszfeld iteration for the spherical Fermat point.
/// Returns the final point and whether the step norm fell below tolerance.
fn weiszfeld(dirs: &[Vec3], start: Vec3) -> (Vec3, bool) {
    let mut e = start.normalize();
    for _ in 0..200 {
        let mut num = Vec3::zeros();
        let mut den = 0.0;
        for t in dirs {
            if let Some((xi, d)) = toward(&e, t) {
                num += xi; // log_e(t) / d = xi
                den += 1.0 / d;
            } else if t.dot(&e) > 0.0 {
                // Sitting on a data point: Weiszfeld is stuck there.
                return (e, false);
            }
        }
        if den == 0.0 {
            return (e, false);
        }
        let step = num / den * 0.5;
        e = exp_sphere(&e, &step);
        if step.norm() < 1e-12 {
            return (e, true);
        }
    }
    (e, false)
}

/// Deterministic quasi-uniform points (Fibonacci lattice), optionally rotated.
fn fibonacci_points(n: usize, rot: Option<&nalgebra::Rotation3<f64>>) -> Vec<Vec3> {
    let ga = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).sqrt();
            let p = Vec3::new(r * (i as f64 * ga).cos(), r * (i as f64 * ga).sin(), z);
            match rot {
                Some(q) => q * p,
                None => p,
            }
        })
        .collect()
}

/// Exact valence-3 Steiner point: the global minimum over the three tangents
/// and every balanced interior point found by Weiszfeld from a fixed start set.
pub fn steiner_valence3(dirs: &[Vec3]) -> Result<SteinerResult> {
    check_config(dirs)?;
    if dirs.len() != 3 {
        return Err(Error::BadParams("valence-3 solver needs exactly three directions".into()));
    }
    let mut best = Best::empty();
    let mut count = 0;
    for t in dirs {
        best.offer(angle_objective(dirs, t), *t);
        count += 1;
    }
    let mut starts = Vec::new();
    let s = dirs[0] + dirs[1] + dirs[2];
    if s.norm() > 1e-12 {
        starts.push(s.normalize());
        starts.push(-s.normalize());
    }
    let n = (dirs[1] - dirs[0]).cross(&(dirs[2] - dirs[0]));
    if n.norm() > 1e-12 {
        starts.push(n.normalize());
        starts.push(-n.normalize());
    }
    for i in 0..3 {
        let m = dirs[i] + dirs[(i + 1) % 3];
        if m.norm() > 1e-12 {
            starts.push(m.normalize());
        }
    }
    starts.extend(fibonacci_points(12, None));
    let mut interior = 0;
    for st in starts {
        let (e, _) = weiszfeld(dirs, st);
        let e = newton_polish(dirs, e);
        count += 1;
        let near_vertex = dirs.iter().any(|t| (t - e).norm() < 1e-6);
        if near_vertex || gradient(dirs, &e).norm() > 1e-8 {
            continue;
        }
        interior += 1;
        best.offer(angle_objective(dirs, &e), e);
    }
    if interior == 0 && dirs.iter().all(|t| gradient(dirs, t).norm() > 1.0) {
        // No balanced point and no tangent is optimal: fall back to the grid.
        let g = steiner_grid_oracle(dirs, 0.01)?;
        best.offer(g.angle_sum, g.e0);
        count += g.certificate.candidates;
    }
    let residual = gradient(dirs, &best.e).norm();
    Ok(SteinerResult::new(
        3,
        best.e,
        best.value,
        SteinerMethod::Valence3Exact,
        Certificate { candidates: count, residual, restarts: interior },
    ))
}

/// Minimizes the objective over the great circle spanned by `a` and `b`.
fn minimize_on_circle(dirs: &[Vec3], a: &Vec3, b: &Vec3) -> (f64, Vec3) {
    let u = a.normalize();
    let v = (b - u * b.dot(&u)).normalize();
    let at = |th: f64| u * th.cos() + v * th.sin();
    let n = 2048;
    let vals: Vec<f64> = (0..n).map(|i| angle_objective(dirs, &at(2.0 * PI * i as f64 / n as f64))).collect();
    let mut best = Best::empty();
    let h = 2.0 * PI / n as f64;
    for i in 0..n {
        let (l, r) = (vals[(i + n - 1) % n], vals[(i + 1) % n]);
        if vals[i] > l || vals[i] > r {
            continue;
        }
        // Golden-section search on the bracket around a discrete local minimum.
        let (mut lo, mut hi) = ((i as f64 - 1.0) * h, (i as f64 + 1.0) * h);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let mut f1 = angle_objective(dirs, &at(x1));
        let mut f2 = angle_objective(dirs, &at(x2));
        while hi - lo > 1e-13 {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = angle_objective(dirs, &at(x1));
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = angle_objective(dirs, &at(x2));
            }
        }
        let e = at(0.5 * (lo + hi));
        best.offer(angle_objective(dirs, &e), e);
        best.offer(vals[i], at(i as f64 * h));
    }
    (best.value, best.e)
}

/// Valence-4 Steiner point by candidate enumeration: the tangents themselves and
/// the intersections of great circles through complementary pairs.
pub fn steiner_valence4(dirs: &[Vec3]) -> Result<SteinerResult> {
    check_config(dirs)?;
    if dirs.len() != 4 {
        return Err(Error::BadParams("valence-4 solver needs exactly four directions".into()));
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if (dirs[i] - dirs[j]).norm() < 1e-12 {
                return Err(Error::DuplicateDirection);
            }
        }
    }
    let mut best = Best::empty();
    let mut count = 0;
    for t in dirs {
        best.offer(angle_objective(dirs, t), *t);
        count += 1;
    }
    let mut restarts = 0;
    let pairings = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))];
    for ((i, j), (k, m)) in pairings {
        let n1 = dirs[i].cross(&dirs[j]);
        let n2 = dirs[k].cross(&dirs[m]);
        let deg1 = n1.norm() < 1e-12;
        let deg2 = n2.norm() < 1e-12;
        match (deg1, deg2) {
            (true, true) => {} // the objective is constant (2π); tangents already cover it
            (true, false) => {
                let (f, e) = minimize_on_circle(dirs, &dirs[k], &dirs[m]);
                best.offer(f, e);
                restarts += 1;
            }
            (false, true) => {
                let (f, e) = minimize_on_circle(dirs, &dirs[i], &dirs[j]);
                best.offer(f, e);
                restarts += 1;
            }
            (false, false) => {
                let x = n1.cross(&n2);
                if x.norm() < 1e-12 * n1.norm() * n2.norm() {
                    // All four tangents lie on one great circle.
                    let (f, e) = minimize_on_circle(dirs, &dirs[i], &dirs[j]);
                    best.offer(f, e);
                    restarts += 1;
                } else {
                    let x = x.normalize();
                    for e in [x, -x] {
                        best.offer(angle_objective(dirs, &e), e);
                        count += 1;
                    }
                }
            }
        }
    }
    let residual = gradient(dirs, &best.e).norm();
    Ok(SteinerResult::new(
        4,
        best.e,
        best.value,
        SteinerMethod::Valence4Candidates,
        Certificate { candidates: count, residual, restarts },
    ))
}

/// Projected subgradient descent with step halving from one start.
fn descend(dirs: &[Vec3], start: Vec3) -> (f64, Vec3) {
    let mut e = start.normalize();
    let mut fe = angle_objective(dirs, &e);
    let mut step: f64 = 0.5;
    for _ in 0..500 {
        let g = gradient(dirs, &e);
        let gn = g.norm();
        if gn < 1e-10 {
            break;
        }
        let dir = -g / gn;
        let mut s = step;
        let mut moved = false;
        while s > 1e-15 {
            let cand = exp_sphere(&e, &(dir * s));
            let fc = angle_objective(dirs, &cand);
            if fc < fe {
                e = cand;
                fe = fc;
                moved = true;
                break;
            }
            s *= 0.5;
        }
        if !moved {
            break;
        }
        step = (2.0 * s).min(1.0);
    }
    let p = newton_polish(dirs, e);
    let fp = angle_objective(dirs, &p);
    if fp <= fe {
        (fp, p)
    } else {
        (fe, e)
    }
}

/// True when the directions split into antipodal pairs. The objective is then
/// the constant `dπ/2` and `tc = 0`.
fn antipodal_pairing(dirs: &[Vec3]) -> bool {
    if dirs.len() % 2 != 0 {
        return false;
    }
    let mut used = vec![false; dirs.len()];
    for i in 0..dirs.len() {
        if used[i] {
            continue;
        }
        match (i + 1..dirs.len()).find(|&j| !used[j] && (dirs[i] + dirs[j]).norm() < 1e-12) {
            Some(j) => {
                used[i] = true;
                used[j] = true;
            }
            None => return false,
        }
    }
    true
}

/// General-valence Steiner point by multistart subgradient descent.
pub fn steiner_general(dirs: &[Vec3], seed: u64) -> Result<SteinerResult> {
    check_config(dirs)?;
    if antipodal_pairing(dirs) {
        let e = dirs.iter().copied().fold(dirs[0], |a, t| if lex_less(&t, &a) { t } else { a });
        return Ok(SteinerResult::new(
            dirs.len(),
            e,
            dirs.len() as f64 * PI / 2.0,
            SteinerMethod::GeneralDescent,
            Certificate { candidates: 0, residual: 0.0, restarts: 0 },
        ));
    }
    let mut starts: Vec<Vec3> = dirs.to_vec();
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            let m = dirs[i] + dirs[j];
            if m.norm() > 1e-12 {
                starts.push(m.normalize());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axis = Vec3::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
    let rot = nalgebra::Rotation3::new(axis.normalize() * rng.gen_range(0.0..PI));
    starts.extend(fibonacci_points(32, Some(&rot)));
    let mut best = Best::empty();
    for st in &starts {
        let (f, e) = descend(dirs, *st);
        best.offer(f, e);
    }
    let residual = gradient(dirs, &best.e).norm();
    Ok(SteinerResult::new(
        dirs.len(),
        best.e,
        best.value,
        SteinerMethod::GeneralDescent,
        Certificate { candidates: starts.len(), residual, restarts: starts.len() },
    ))
}

/// Latitude-ring grid on the unit sphere with covering radius at most `delta`:
/// rings at polar spacing `π/J ≤ delta`, each with points spaced at most
/// `delta` along the ring.
struct RingGrid {
    delta: f64,
    theta: Vec<f64>,
    count: Vec<usize>,
}

impl RingGrid {
    fn new(delta: f64) -> Self {
        let j = (PI / delta).ceil() as usize;
        let dt = PI / j as f64;
        let theta: Vec<f64> = (0..j).map(|i| (i as f64 + 0.5) * dt).collect();
        let count = theta.iter().map(|t| ((2.0 * PI * t.sin() / delta).ceil() as usize).max(1)).collect();
        RingGrid { delta, theta, count }
    }

    fn len(&self) -> usize {
        self.count.iter().sum()
    }

    fn phase(&self, ring: usize, k: usize) -> f64 {
        (k as f64 + 0.5 * (ring % 2) as f64) * 2.0 * PI / self.count[ring] as f64
    }

    fn point(&self, ring: usize, k: usize) -> Vec3 {
        let (st, ct) = self.theta[ring].sin_cos();
        let (sp, cp) = self.phase(ring, k).sin_cos();
        Vec3::new(st * cp, st * sp, ct)
    }

    /// Index ranges (per ring, possibly wrapping) of points within angular distance `r` of `g`.
    fn cap_ranges(&self, g: &Vec3, r: f64, out: &mut Vec<(usize, i64, i64)>) {
        let tg = g.z.clamp(-1.0, 1.0).acos();
        let pg = g.y.atan2(g.x);
        let dt = PI / self.theta.len() as f64;
        let lo = (((tg - r) / dt - 0.5).floor().max(0.0)) as usize;
        let hi = ((((tg + r) / dt - 0.5).ceil()) as usize).min(self.theta.len() - 1);
        for ring in lo..=hi {
            let tj = self.theta[ring];
            let m = self.count[ring] as i64;
            let denom = tg.sin() * tj.sin();
            let c = if denom <= 1e-300 { -2.0 } else { (r.cos() - tg.cos() * tj.cos()) / denom };
            if c > 1.0 {
                continue;
            }
            if c <= -1.0 {
                out.push((ring, 0, m - 1));
                continue;
            }
            let half = c.acos();
            let step = 2.0 * PI / m as f64;
            let off = 0.5 * (ring % 2) as f64;
            let k0 = ((pg - half) / step - off).floor() as i64 - 1;
            let k1 = ((pg + half) / step - off).ceil() as i64 + 1;
            if k1 - k0 + 1 >= m {
                out.push((ring, 0, m - 1));
            } else {
                out.push((ring, k0, k1));
            }
        }
    }
}

/// Brute-force Steiner point over a sphere grid of covering radius
/// `resolution`, followed by a descent polish. The returned angle sum is within
/// `d · resolution` of the true minimum.
///
/// The grid is scanned coarse-to-fine: a cell can only contain the minimizer
/// if its centre value is within `d·δ` of the best value at that level, so
/// only neighbourhoods of such cells are refined.
pub fn steiner_grid_oracle(dirs: &[Vec3], resolution: f64) -> Result<SteinerResult> {
    check_config(dirs)?;
    if !(resolution > 0.0 && resolution <= 0.1) {
        return Err(Error::BadParams(format!("grid resolution must lie in (0, 0.1], got {resolution}")));
    }
    let d = dirs.len() as f64;
    let mut levels = vec![resolution];
    while *levels.last().unwrap() * 3.0 < 0.06 {
        let l = *levels.last().unwrap() * 3.0;
        levels.push(l);
    }
    levels.reverse();

    let coarse = RingGrid::new(levels[0]);
    let mut pts: Vec<(Vec3, f64)> = Vec::with_capacity(coarse.len());
    for ring in 0..coarse.theta.len() {
        for k in 0..coarse.count[ring] {
            let p = coarse.point(ring, k);
            pts.push((p, angle_objective(dirs, &p)));
        }
    }
    let mut evaluated = pts.len();
    let mut delta = coarse.delta;
    for &next in &levels[1..] {
        let fmin = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let grid = RingGrid::new(next);
        let mut ranges = Vec::new();
        for (p, f) in &pts {
            if *f <= fmin + d * delta {
                grid.cap_ranges(p, delta + next, &mut ranges);
            }
        }
        pts = scan(&grid, ranges, dirs);
        evaluated += pts.len();
        delta = next;
    }
    let mut best = Best::empty();
    for (p, f) in &pts {
        best.offer(*f, *p);
    }
    let (fp, ep) = descend(dirs, best.e);
    best.offer(fp, ep);
    let residual = gradient(dirs, &best.e).norm();
    Ok(SteinerResult::new(
        dirs.len(),
        best.e,
        best.value,
        SteinerMethod::GridOracle,
        Certificate { candidates: evaluated, residual, restarts: levels.len() },
    ))
}

/// Evaluates every grid point in the union of the given ring ranges.
fn scan(grid: &RingGrid, mut ranges: Vec<(usize, i64, i64)>, dirs: &[Vec3]) -> Vec<(Vec3, f64)> {
    // Normalise wrapped ranges into [0, m) pieces, then merge per ring.
    let mut flat: Vec<(usize, i64, i64)> = Vec::with_capacity(ranges.len());
    for (ring, a, b) in ranges.drain(..) {
        let m = grid.count[ring] as i64;
        let a2 = a.rem_euclid(m);
        let b2 = a2 + (b - a);
        if b2 < m {
            flat.push((ring, a2, b2));
        } else {
            flat.push((ring, a2, m - 1));
            flat.push((ring, 0, (b2 - m).min(m - 1)));
        }
    }
    flat.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < flat.len() {
        let (ring, a, mut b) = flat[i];
        i += 1;
        while i < flat.len() && flat[i].0 == ring && flat[i].1 <= b + 1 {
            b = b.max(flat[i].2);
            i += 1;
        }
        for k in a..=b {
            let p = grid.point(ring, k as usize);
            out.push((p, angle_objective(dirs, &p)));
        }
    }
    out
}

/// Root in `(0, π/2)` of `3(π/2 − β) = 3π/2 − 4 arcsin(√3/2 · sin β)`, i.e. of
/// `3β = 4 arcsin(√3/2 · sin β)`, by bisection.
pub fn solve_r0() -> f64 {
    let h = |b: f64| 3.0 * b - 4.0 * (0.75f64.sqrt() * b.sin()).asin();
    let (mut lo, mut hi) = (0.1, FRAC_PI_2);
    debug_assert!(h(lo) < 0.0 && h(hi) > 0.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed form of the vertex contribution for three tangents making equal
/// angles `β` with a common axis and equally spaced around it.
pub fn equilateral_tc(beta: f64) -> f64 {
    if beta <= solve_r0() {
        3.0 * (FRAC_PI_2 - beta)
    } else {
        1.5 * PI - 4.0 * (0.75f64.sqrt() * beta.sin()).asin()
    }
}

/// Picks the solver by valence.
pub fn steiner(dirs: &[Vec3], seed: u64) -> Result<SteinerResult> {
    check_config(dirs)?;
    match dirs.len() {
        2 => {
            let (a, b) = (dirs[0], dirs[1]);
            let ang = a.cross(&b).norm().atan2(a.dot(&b));
            let e = if lex_less(&b, &a) { b } else { a };
            Ok(SteinerResult::new(
                2,
                e,
                ang,
                SteinerMethod::Valence2Exact,
                Certificate { candidates: 2, residual: 0.0, restarts: 0 },
            ))
        }
        3 => steiner_valence3(dirs),
        4 => steiner_valence4(dirs),
        _ => {
            let r = steiner_general(dirs, seed)?;
            if cfg!(debug_assertions) && r.certificate.restarts > 0 {
                let g = steiner_grid_oracle(dirs, 0.005)?;
                debug_assert!(
                    r.angle_sum <= g.angle_sum + 1e-9,
                    "descent {} worse than grid oracle {}",
                    r.angle_sum,
                    g.angle_sum
                );
            }
            Ok(r)
        }
    }
}

/// Vertex contribution `tc(q)`; tangents are expressed in an orthonormal frame
/// of the tangent space at the vertex.
pub fn vertex_tc(graph: &EmbeddedGraph, vertex_id: &str) -> Result<SteinerResult> {
    let v = graph.vertex_index(vertex_id)?;
    vertex_tc_at(graph, v, 0)
}

pub fn vertex_tc_at(graph: &EmbeddedGraph, v: usize, seed: u64) -> Result<SteinerResult> {
    let pos = graph.vertices[v].pos;
    let dirs: Vec<Vec3> = graph
        .tangents_at(v)?
        .iter()
        .map(|t| graph.space.to_frame(&pos, t).normalize())
        .collect();
    steiner(&dirs, seed)
}
