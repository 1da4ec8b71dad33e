mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use netcurv::steiner::*;
use netcurv::{Error, Vec3};

/// Brute force: Fibonacci lattice, then a shrinking pattern search around the
/// best few lattice points. Shares no code with the library solvers.
fn brute_force(dirs: &[Vec3]) -> f64 {
    let f = |e: &Vec3| dirs.iter().map(|t| t.cross(e).norm().atan2(t.dot(e))).sum::<f64>();
    let n = 100_000;
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut pts: Vec<(f64, Vec3)> = (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let e = Vec3::new(r * (golden * i as f64).cos(), r * (golden * i as f64).sin(), z);
            (f(&e), e)
        })
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = pts[0].0;
    for &(v0, e0) in pts.iter().take(8) {
        let (mut v, mut e, mut h) = (v0, e0, 0.01);
        while h > 1e-12 {
            let a = if e.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
            let u = e.cross(&a).normalize();
            let w = e.cross(&u);
            let mut moved = false;
            for k in 0..8 {
                let th = k as f64 * PI / 4.0;
                let c = (e + (u * th.cos() + w * th.sin()) * h).normalize();
                let fc = f(&c);
                if fc < v {
                    v = fc;
                    e = c;
                    moved = true;
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        best = best.min(v);
    }
    for t in dirs {
        best = best.min(f(t));
    }
    best
}

fn planar(d: usize) -> Vec<Vec3> {
    (0..d)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / d as f64;
            Vec3::new(a.cos(), a.sin(), 0.0)
        })
        .collect()
}

fn equilateral(beta: f64) -> Vec<Vec3> {
    (0..3)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / 3.0;
            Vec3::new(beta.sin() * a.cos(), beta.sin() * a.sin(), beta.cos())
        })
        .collect()
}

#[test]
fn solvers_match_brute_force() {
    let mut rng = common::rng(5);
    for d in [3usize, 4, 5, 6] {
        for _ in 0..6 {
            let dirs = common::random_dirs(&mut rng, d, 0.05);
            let r = steiner(&dirs, 0).unwrap();
            let b = brute_force(&dirs);
            assert!(r.angle_sum <= b + 1e-9, "d={d}: solver {} brute force {b}", r.angle_sum);
            assert!(r.angle_sum >= b - 1e-6, "d={d}: solver {} below brute force {b}", r.angle_sum);
        }
    }
}

#[test]
fn equilateral_branches() {
    let r0 = solve_r0();
    assert!((r0 - 1.33458).abs() < 5e-5);
    let h = |b: f64| 3.0 * b - 4.0 * (0.75f64.sqrt() * b.sin()).asin();
    assert!(h(r0).abs() < 1e-10);
    assert!(h(r0 - 1e-6) * h(r0 + 1e-6) < 0.0);
    for beta in [0.3, 0.8, 1.2, r0, 1.4, 1.5] {
        let r = steiner_valence3(&equilateral(beta)).unwrap();
        let want = if beta <= r0 { 3.0 * (FRAC_PI_2 - beta) } else { 1.5 * PI - 4.0 * (0.75f64.sqrt() * beta.sin()).asin() };
        assert!((r.tc - want).abs() < 1e-9, "β={beta}: {} vs {want}", r.tc);
    }
    let balanced = steiner_valence3(&planar(3)).unwrap();
    assert!((balanced.tc - PI / 6.0).abs() < 1e-12);
}

#[test]
fn objective_examples() {
    let s = 1.0 / 3f64.sqrt();
    let v = Vec3::new(s, s, s);
    let tet: Vec<Vec3> = [Vec3::new(s, -s, -s), Vec3::new(-s, s, -s), Vec3::new(-s, -s, s)].iter().map(|w| (w - v).normalize()).collect();
    let to_center = -v;
    assert!((angle_objective(&tet, &to_center) - 3.0 * (2.0f64 / 3.0).sqrt().acos()).abs() < 1e-12);
    let g = steiner_grid_oracle(&tet, 0.002).unwrap();
    assert!((g.tc - 3.0 * (FRAC_PI_2 - (2.0f64 / 3.0).sqrt().acos())).abs() < 3.0 * 0.002);
}

#[test]
fn valence_two_and_antipodal_pairs() {
    let mut rng = common::rng(8);
    for _ in 0..20 {
        let a = common::unit3(&mut rng);
        let b = common::unit3(&mut rng);
        let r = steiner(&[a, b], 0).unwrap();
        assert!((r.tc - (PI - a.dot(&b).acos())).abs() < 1e-12);
        let pairs = [a, -a, b, -b];
        assert!(steiner_valence4(&pairs).unwrap().tc.abs() < 1e-10);
        assert!(steiner_grid_oracle(&[a, -a], 0.01).unwrap().tc.abs() < 1e-10);
    }
    let y = Vec3::y();
    let z = Vec3::z();
    assert!(steiner_valence4(&[y, -y, z, -z]).unwrap().tc.abs() < 1e-12);
    assert_eq!(steiner_valence4(&[y, y, z, -z]).unwrap_err(), Error::DuplicateDirection);
}

#[test]
fn regular_spherical_square_uses_closer_centre() {
    let b: f64 = 0.6;
    let dirs: Vec<Vec3> = (0..4)
        .map(|i| {
            let a = FRAC_PI_2 * i as f64;
            Vec3::new(b.sin() * a.cos(), b.sin() * a.sin(), b.cos())
        })
        .collect();
    let r = steiner_valence4(&dirs).unwrap();
    assert!((r.e0 - Vec3::z()).norm() < 1e-9, "{:?}", r.e0);
}

#[test]
fn planar_star_parity() {
    for d in [3usize, 4, 5, 6] {
        let dirs = planar(d);
        let r = steiner(&dirs, 0).unwrap();
        let pole = d as f64 * FRAC_PI_2;
        if d % 2 == 0 {
            assert!(r.tc.abs() < 1e-9, "d={d}: {}", r.tc);
        } else {
            assert!(r.angle_sum < pole - 1e-3, "d={d}: pole should not be optimal");
            assert!(dirs.iter().any(|t| (t - r.e0).norm() < 1e-6), "d={d}: e0 {:?}", r.e0);
        }
    }
}

#[test]
fn valence_three_bounds() {
    let mut rng = common::rng(3);
    for _ in 0..300 {
        let dirs = common::random_dirs(&mut rng, 3, 1e-3);
        let r = steiner_valence3(&dirs).unwrap();
        assert!(r.tc >= PI / 6.0 - 1e-9);
        let at_t = dirs.iter().map(|t| angle_objective(&dirs, t)).fold(f64::INFINITY, f64::min);
        assert!(at_t <= 4.0 * PI / 3.0 + 1e-12);
    }
}

#[test]
fn rotation_invariance() {
    let mut rng = common::rng(21);
    for d in [3usize, 4, 5] {
        for _ in 0..20 {
            let dirs = common::random_dirs(&mut rng, d, 0.05);
            let rot = common::random_rotation(&mut rng);
            let rotated: Vec<Vec3> = dirs.iter().map(|t| rot * t).collect();
            let a = steiner(&dirs, 0).unwrap();
            let b = steiner(&rotated, 0).unwrap();
            assert!((a.tc - b.tc).abs() < 1e-10, "d={d}: {} vs {}", a.tc, b.tc);
            assert!((angle_objective(&rotated, &(rot * a.e0)) - b.angle_sum).abs() < 1e-10);
        }
    }
}

#[test]
fn subadditivity() {
    let mut rng = common::rng(13);
    for _ in 0..50 {
        let all = common::random_dirs(&mut rng, 5, 0.05);
        let (c1, c2) = all.split_at(2);
        let tu = steiner(&all, 0).unwrap().tc;
        let t1 = steiner(c1, 0).unwrap().tc;
        let t2 = steiner(c2, 0).unwrap().tc;
        assert!(tu <= t1 + t2 + 1e-9);
    }
    // Shared Steiner point: two balanced triples about the same pole.
    let a = equilateral(0.5);
    let b: Vec<Vec3> = equilateral(0.9).iter().map(|t| Vec3::new(-t.x, t.y, t.z)).collect();
    let mut u = a.clone();
    u.extend(&b);
    let sum = steiner(&a, 0).unwrap().tc + steiner(&b, 0).unwrap().tc;
    assert!((steiner(&u, 0).unwrap().tc - sum).abs() < 1e-9);
}

#[test]
fn interior_valence_four_minimizers_are_balanced() {
    let mut rng = common::rng(17);
    let mut seen = 0;
    for _ in 0..400 {
        let dirs = common::random_dirs(&mut rng, 4, 0.05);
        let r = steiner_valence4(&dirs).unwrap();
        if dirs.iter().all(|t| t.dot(&r.e0).clamp(-1.0, 1.0).acos() > 0.01) {
            seen += 1;
            let xi: Vec<Vec3> = dirs.iter().map(|t| (t - r.e0 * t.dot(&r.e0)).normalize()).collect();
            let mut paired = [false; 4];
            for i in 0..4 {
                for j in 0..4 {
                    if i != j && (xi[i] + xi[j]).norm() < 1e-6 {
                        paired[i] = true;
                    }
                }
            }
            assert!(paired.iter().all(|&p| p), "ξ not in antipodal pairs: {xi:?}");
        }
    }
    assert!(seen > 10);
}
