//! Independent oracles: dense matrices written straight from the stencils,
//! a dense LU solve, and loop-sum versions of the invariants.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rlw_core::ModelParams;

pub type Dense = Vec<Vec<f64>>;

fn circulant(n: usize, left: f64, centre: f64, right: f64) -> Dense {
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][(i + n - 1) % n] += left;
        m[i][i] += centre;
        m[i][(i + 1) % n] += right;
    }
    m
}

pub fn dense_a(n: usize, h: f64) -> Dense {
    circulant(n, h / 8.0, 6.0 * h / 8.0, h / 8.0)
}

pub fn dense_b(n: usize, h: f64) -> Dense {
    circulant(n, 1.0 / h, -2.0 / h, 1.0 / h)
}

pub fn dense_c(n: usize) -> Dense {
    circulant(n, -0.5, 0.0, 0.5)
}

pub fn dense_m(n: usize, h: f64, sigma: f64) -> Dense {
    let a = dense_a(n, h);
    let b = dense_b(n, h);
    (0..n).map(|i| (0..n).map(|j| a[i][j] - sigma * b[i][j]).collect()).collect()
}

pub fn matvec(m: &Dense, x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// Gaussian elimination with partial pivoting on a copy of `m`.
#[allow(clippy::needless_range_loop)]
pub fn dense_solve(m: &Dense, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut a: Vec<Vec<f64>> = m.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, p);
        x.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            x[i] -= f * x[k];
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (x[k] - s) / a[k][k];
    }
    x
}

pub fn inner(u: &[f64], v: &[f64], h: f64) -> f64 {
    let mut s = 0.0;
    for j in 0..u.len() {
        s += u[j] * v[j];
    }
    h * s
}

pub fn max_diff(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

pub fn max_abs(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

/// `M (next - curr)/τ + C F(curr, next)`, evaluated with dense matrices.
pub fn fiep_residual(curr: &[f64], next: &[f64], h: f64, tau: f64, p: &ModelParams) -> Vec<f64> {
    let n = curr.len();
    let f: Vec<f64> = (0..n)
        .map(|j| {
            let (x, y) = (curr[j], next[j]);
            p.gamma / 6.0 * (y * y + x * y + x * x) + p.a / 2.0 * (x + y)
        })
        .collect();
    let du: Vec<f64> = (0..n).map(|j| (next[j] - curr[j]) / tau).collect();
    let lhs = matvec(&dense_m(n, h, p.sigma), &du);
    let rhs = matvec(&dense_c(n), &f);
    (0..n).map(|j| lhs[j] + rhs[j]).collect()
}

/// `M (next - prev)/(2τ) + C G(prev, curr, next)`.
pub fn liep_residual(prev: &[f64], curr: &[f64], next: &[f64], h: f64, tau: f64, p: &ModelParams) -> Vec<f64> {
    let n = curr.len();
    let g: Vec<f64> = (0..n)
        .map(|j| p.a * curr[j] + p.gamma / 6.0 * curr[j] * (prev[j] + curr[j] + next[j]))
        .collect();
    let du: Vec<f64> = (0..n).map(|j| (next[j] - prev[j]) / (2.0 * tau)).collect();
    let lhs = matvec(&dense_m(n, h, p.sigma), &du);
    let rhs = matvec(&dense_c(n), &g);
    (0..n).map(|j| lhs[j] + rhs[j]).collect()
}

/// Residuals of one quadratized step from `(u_b, v_b)` to `(u⁺, v⁺)`:
/// `M (u⁺ - u_b)/Δ + C g = 0` with
/// `g = γ(v⁺ + v_b)/12 + a(u⁺ + u_b)/2 + γ w (u⁺ + u_b)/6`,
/// and `v⁺ - v_b - 2w(u⁺ - u_b) = 0`.
#[allow(clippy::too_many_arguments)]
pub fn quad_residual(
    u_base: &[f64],
    v_base: &[f64],
    w: &[f64],
    u_next: &[f64],
    v_next: &[f64],
    h: f64,
    dt: f64,
    p: &ModelParams,
) -> (Vec<f64>, Vec<f64>) {
    let n = u_base.len();
    let grad: Vec<f64> = (0..n)
        .map(|j| {
            let us = u_next[j] + u_base[j];
            let vs = v_next[j] + v_base[j];
            p.gamma / 12.0 * vs + p.a / 2.0 * us + p.gamma / 6.0 * w[j] * us
        })
        .collect();
    let du: Vec<f64> = (0..n).map(|j| (u_next[j] - u_base[j]) / dt).collect();
    let lhs = matvec(&dense_m(n, h, p.sigma), &du);
    let rhs = matvec(&dense_c(n), &grad);
    let r_u = (0..n).map(|j| lhs[j] + rhs[j]).collect();
    let r_v = (0..n)
        .map(|j| v_next[j] - v_base[j] - 2.0 * w[j] * (u_next[j] - u_base[j]))
        .collect();
    (r_u, r_v)
}

pub fn cubic_energy_loop(u: &[f64], h: f64, p: &ModelParams) -> f64 {
    let mut s = 0.0;
    for &x in u {
        s += p.gamma * x.powi(3) / 6.0 + p.a * x.powi(2) / 2.0;
    }
    h * s
}
