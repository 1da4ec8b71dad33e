//! Derivative-free minimization over a hull: Nelder–Mead and a Lipschitz
//! branch-and-bound that certifies a lower bound.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::hull::Hull;
use crate::space::Vec3;

#[derive(Clone, Debug)]
pub struct NelderMead {
    pub x: Vec3,
    pub value: f64,
    pub evaluations: usize,
}

/// Nelder–Mead on the first `dim` coordinates of `x0`. Stops when the simplex
/// values agree within `tol`, after `max_iter` iterations, or when `max_evals`
/// evaluations are spent.
pub fn nelder_mead<F>(mut f: F, x0: Vec3, dim: usize, step: f64, tol: f64, max_iter: usize, max_evals: usize) -> NelderMead
where
    F: FnMut(&Vec3) -> f64,
{
    let mut evals = 0usize;
    let mut eval = |x: &Vec3, evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let f0 = eval(&x0, &mut evals);
    if dim == 0 || max_evals <= 1 {
        return NelderMead { x: x0, value: f0, evaluations: evals };
    }
    let mut simplex: Vec<(Vec3, f64)> = vec![(x0, f0)];
    for i in 0..dim {
        let mut x = x0;
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let by_value = |a: &(Vec3, f64), b: &(Vec3, f64)| a.1.total_cmp(&b.1);
    for _ in 0..max_iter {
        simplex.sort_by(by_value);
        let (best, worst) = (simplex[0].1, simplex[dim].1);
        if (worst - best).abs() <= tol * (1.0 + best.abs()) || evals + 2 > max_evals {
            break;
        }
        let centroid: Vec3 = simplex[..dim].iter().map(|s| s.0).sum::<Vec3>() / dim as f64;
        let xw = simplex[dim].0;
        let xr = centroid + (centroid - xw);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = centroid + (centroid - xw) * 2.0;
            let fe = eval(&xe, &mut evals);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[dim].1 {
                let xc = centroid + (xr - centroid) * 0.5;
                (xc, eval(&xc, &mut evals))
            } else {
                let xc = centroid + (xw - centroid) * 0.5;
                (xc, eval(&xc, &mut evals))
            };
            if fc < fr.min(simplex[dim].1) {
                simplex[dim] = (xc, fc);
            } else {
                if evals + dim > max_evals {
                    break;
                }
                let x0 = simplex[0].0;
                for s in simplex.iter_mut().skip(1) {
                    s.0 = x0 + (s.0 - x0) * 0.5;
                    s.1 = eval(&s.0, &mut evals);
                }
            }
        }
    }
    simplex.sort_by(by_value);
    NelderMead { x: simplex[0].0, value: simplex[0].1, evaluations: evals }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchAndBound {
    /// Best point found inside the hull (local coordinates).
    pub best_x: Option<Vec3>,
    pub best_value: f64,
    /// Certified lower bound of the minimum over the hull.
    pub lower_bound: f64,
    pub evaluations: usize,
    pub cells: usize,
}

struct Cell {
    lo: Vec3,
    hi: Vec3,
    bound: f64,
    seq: usize,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    // Max-heap: smallest bound first, then oldest.
    fn cmp(&self, o: &Self) -> Ordering {
        o.bound.total_cmp(&self.bound).then(o.seq.cmp(&self.seq))
    }
}

/// Minimizes a function that is `lip`-Lipschitz in geodesic distance over the
/// hull. `f` returns the value and an absolute error bound, or `None` where it
/// cannot be evaluated. The cells examined for a smaller budget are a prefix of
/// those for a larger one, so the lower bound never decreases with the budget.
pub fn lipschitz_minimize<F>(hull: &Hull, mut f: F, lip: f64, budget: usize) -> BranchAndBound
where
    F: FnMut(&Vec3) -> Option<(f64, f64)>,
{
    let k = hull.dim();
    let space = hull.space();
    let mut lo = hull.lo;
    let mut hi = hull.hi;
    for i in 0..k {
        let pad = 0.1 * (hi[i] - lo[i]) + 1e-12 * hull.scale;
        lo[i] -= pad;
        hi[i] += pad;
    }
    let margin = 1e-9 * hull.scale;
    let radius = |c: &Vec3, lo: &Vec3, hi: &Vec3| {
        let pc = hull.to_model(c);
        let mut r: f64 = 0.0;
        for mask in 0..(1usize << k) {
            let mut x = *c;
            for i in 0..k {
                x[i] = if mask >> i & 1 == 1 { hi[i] } else { lo[i] };
            }
            r = r.max(space.dist(&pc, &hull.to_model(&x)));
        }
        r
    };
    let outside = |lo: &Vec3, hi: &Vec3| {
        hull.halfspaces.iter().any(|h| {
            // Minimum of n·x over the box.
            let mut m = 0.0;
            for i in 0..k {
                m += if h.normal[i] >= 0.0 { h.normal[i] * lo[i] } else { h.normal[i] * hi[i] };
            }
            m - h.offset > margin
        })
    };
    let mut out = BranchAndBound { best_x: None, best_value: f64::INFINITY, lower_bound: f64::NEG_INFINITY, evaluations: 0, cells: 1 };
    let mut visit = |c: &Vec3, lo: &Vec3, hi: &Vec3, parent: f64, out: &mut BranchAndBound| -> f64 {
        out.evaluations += 1;
        match f(c) {
            Some((v, err)) if v.is_finite() => {
                if hull.contains_local(c, 0.0) && v < out.best_value {
                    out.best_value = v;
                    out.best_x = Some(*c);
                }
                parent.max(v - err.abs() - lip * radius(c, lo, hi))
            }
            _ => parent,
        }
    };
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    let c0 = (lo + hi) * 0.5;
    if budget > 0 {
        let b = visit(&c0, &lo, &hi, f64::NEG_INFINITY, &mut out);
        heap.push(Cell { lo, hi, bound: b, seq });
    } else {
        heap.push(Cell { lo, hi, bound: f64::NEG_INFINITY, seq });
    }
    seq += 1;
    while out.evaluations + 2 <= budget && k > 0 {
        let Some(cell) = heap.pop() else { break };
        let mut axis = 0;
        for i in 1..k {
            if cell.hi[i] - cell.lo[i] > cell.hi[axis] - cell.lo[axis] {
                axis = i;
            }
        }
        let mid = 0.5 * (cell.lo[axis] + cell.hi[axis]);
        let mut halves = [(cell.lo, cell.hi), (cell.lo, cell.hi)];
        halves[0].1[axis] = mid;
        halves[1].0[axis] = mid;
        for (clo, chi) in halves {
            if outside(&clo, &chi) {
                continue;
            }
            let c = (clo + chi) * 0.5;
            let b = visit(&c, &clo, &chi, cell.bound, &mut out);
            heap.push(Cell { lo: clo, hi: chi, bound: b, seq });
            seq += 1;
            out.cells += 1;
        }
    }
    let leaf_min = heap.iter().map(|c| c.bound).fold(f64::INFINITY, f64::min);
    out.lower_bound = leaf_min.min(out.best_value);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{ModelSpace, Vec4};

    fn square() -> Hull {
        let pts: Vec<Vec4> = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
            .iter()
            .map(|c| Vec4::new(c[0], c[1], 0.0, 0.0))
            .collect();
        Hull::of_points(&ModelSpace::Euclidean, &pts).unwrap()
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let r = nelder_mead(|x| (x.x - 0.3).powi(2) + 2.0 * (x.y + 0.1).powi(2), Vec3::zeros(), 2, 0.1, 1e-14, 500, 5000);
        assert!((r.x.x - 0.3).abs() < 1e-5 && (r.x.y + 0.1).abs() < 1e-5);
    }

    #[test]
    fn branch_and_bound_brackets_the_minimum() {
        let h = square();
        let target = h.to_local(&Vec4::new(0.7, 0.2, 0.0, 0.0));
        let f = |x: &Vec3| Some(((x - target).norm(), 0.0));
        let small = lipschitz_minimize(&h, f, 1.0, 40);
        let big = lipschitz_minimize(&h, f, 1.0, 400);
        assert!(small.lower_bound <= big.lower_bound);
        assert!(big.lower_bound <= 0.0 && big.lower_bound > -0.05);
        assert!(big.best_value < 0.05);
        assert!(small.lower_bound <= small.best_value);
    }
}
