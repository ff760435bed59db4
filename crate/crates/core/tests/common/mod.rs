//! Test-only oracles, independent of the optimiser's search path.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::Matrix3;

/// `2√(t₁² + t₂²)` from the two largest singular values of the correlation
/// matrix.
pub fn closed_form(t: &[[f64; 3]; 3]) -> f64 {
    let m = Matrix3::from_fn(|i, j| t[i][j]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    2.0 * (sv[0] * sv[0] + sv[1] * sv[1]).sqrt()
}

fn unit(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn frame(theta: f64, phi: f64, psi: f64) -> ([f64; 3], [f64; 3]) {
    let c = unit(theta, phi);
    let e1 = [theta.cos() * phi.cos(), theta.cos() * phi.sin(), -theta.sin()];
    let e2 = [-phi.sin(), phi.cos(), 0.0];
    let d = [0, 1, 2].map(|k| psi.cos() * e1[k] + psi.sin() * e2[k]);
    (c, d)
}

fn mat_vec(t: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| t[i][0] * v[0] + t[i][1] * v[1] + t[i][2] * v[2])
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `S` for angles `[θ₁, φ₁, θ₂, φ₂, θ_c, φ_c, ψ]`, written out term by term.
pub fn s_of_angles(t: &[[f64; 3]; 3], p: &[f64; 7]) -> f64 {
    let m = unit(p[0], p[1]);
    let n = unit(p[2], p[3]);
    let (c, d) = frame(p[4], p[5], p[6]);
    let (tc, td) = (mat_vec(t, &c), mat_vec(t, &d));
    let e11 = dot(&m, &tc);
    let e12 = dot(&m, &td);
    let e21 = dot(&n, &tc);
    let e22 = dot(&n, &td);
    ((e11 + e21).powi(2) + (e12 + e22).powi(2)).sqrt()
        + ((e11 - e21).powi(2) + (e12 - e22).powi(2)).sqrt()
}

/// Exhaustive grid at `step_deg` resolution. Alice's directions and Bob's
/// `c` range over a hemisphere and `ψ` over `[0, π)`, which loses nothing:
/// `S` is invariant under flipping any single direction.
/// Returns the best value and its angles.
pub fn grid_max(t: &[[f64; 3]; 3], step_deg: f64) -> (f64, [f64; 7]) {
    let step = step_deg.to_radians();
    let n_theta = (0.5 * PI / step).round() as usize;
    let n_phi = (2.0 * PI / step).round() as usize;
    let n_psi = (PI / step).round() as usize;
    let mut dirs = Vec::new();
    for i in 0..=n_theta {
        for j in 0..n_phi {
            dirs.push((i as f64 * step, j as f64 * step));
        }
    }

    let mut best = (f64::NEG_INFINITY, [0.0; 7]);
    let mut proj = vec![(0.0, 0.0); dirs.len()];
    for &(tc, pc) in &dirs {
        for k in 0..n_psi {
            let psi = k as f64 * step;
            let (c, d) = frame(tc, pc, psi);
            let (tvc, tvd) = (mat_vec(t, &c), mat_vec(t, &d));
            for (slot, &(th, ph)) in proj.iter_mut().zip(&dirs) {
                let m = unit(th, ph);
                *slot = (dot(&m, &tvc), dot(&m, &tvd));
            }
            for (a, pa) in proj.iter().enumerate() {
                for (b, pb) in proj.iter().enumerate() {
                    let s = (pa.0 + pb.0).hypot(pa.1 + pb.1) + (pa.0 - pb.0).hypot(pa.1 - pb.1);
                    if s > best.0 {
                        best = (s, [dirs[a].0, dirs[a].1, dirs[b].0, dirs[b].1, tc, pc, psi]);
                    }
                }
            }
        }
    }
    best
}

/// Coordinate pattern search: try `±h` along each angle, halve `h` when no
/// move improves, stop below `h_min`.
pub fn compass_refine(t: &[[f64; 3]; 3], start: [f64; 7], h0: f64, h_min: f64) -> (f64, [f64; 7]) {
    let mut x = start;
    let mut fx = s_of_angles(t, &x);
    let mut h = h0;
    while h >= h_min {
        let mut moved = false;
        for k in 0..7 {
            for sign in [1.0, -1.0] {
                let mut y = x;
                y[k] += sign * h;
                let fy = s_of_angles(t, &y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    moved = true;
                }
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    (fx, x)
}

/// Grid search followed by pattern-search refinement.
pub fn grid_oracle(t: &[[f64; 3]; 3], step_deg: f64) -> f64 {
    let (_, at) = grid_max(t, step_deg);
    compass_refine(t, at, step_deg.to_radians() / 2.0, 1e-10).0
}
