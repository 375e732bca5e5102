//! Cyclic tridiagonal matrices and their factorization.
//!
//! Row `i` of a [`CyclicTridiag`] reads
//! `lower[i]·x[i-1] + diag[i]·x[i] + upper[i]·x[i+1]` with indices taken
//! modulo `n`, so `lower[0]` and `upper[n-1]` are the wrap-around corners.
//! The factorization runs a partially pivoted tridiagonal LU (the LAPACK
//! `gttrf` elimination) on the matrix with its corners removed and restores
//! them with a rank-one Sherman–Morrison correction.

use crate::error::{Result, RlwError};
use crate::grid::check_len;

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiag {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl CyclicTridiag {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_len(diag.len(), lower.len())?;
        check_len(diag.len(), upper.len())?;
        if diag.len() < 3 {
            return Err(RlwError::invalid("n", "cyclic tridiagonal needs at least 3 rows"));
        }
        Ok(CyclicTridiag { lower, diag, upper })
    }

    /// Constant-coefficient circulant with stencil `[left, centre, right]`.
    pub fn circulant(n: usize, left: f64, centre: f64, right: f64) -> Result<Self> {
        Self::new(vec![left; n], vec![centre; n], vec![right; n])
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.lower
            .iter()
            .chain(&self.diag)
            .chain(&self.upper)
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        check_len(n, x.len())?;
        Ok((0..n)
            .map(|i| {
                let prev = x[(i + n - 1) % n];
                let next = x[(i + 1) % n];
                self.lower[i] * prev + self.diag[i] * x[i] + self.upper[i] * next
            })
            .collect())
    }

    /// Factors the matrix, refusing any pivot with magnitude below `pivot_floor`.
    pub fn factor(&self, pivot_floor: f64) -> Result<CyclicLu> {
        let n = self.len();
        let corner_top = self.lower[0];
        let corner_bottom = self.upper[n - 1];

        let mut diag = self.diag.clone();
        let mut correction = None;
        if corner_top != 0.0 || corner_bottom != 0.0 {
            let gamma = if diag[0] != 0.0 { -diag[0] } else { -1.0 };
            diag[0] -= gamma;
            diag[n - 1] -= corner_bottom * corner_top / gamma;
            correction = Some((gamma, corner_bottom, corner_top / gamma));
        }

        let lu = TridiagLu::factor(
            self.lower[1..].to_vec(),
            diag,
            self.upper[..n - 1].to_vec(),
            pivot_floor,
        )?;

        let correction = match correction {
            None => None,
            Some((gamma, bottom, tail)) => {
                let mut u = vec![0.0; n];
                u[0] = gamma;
                u[n - 1] = bottom;
                let z = lu.solve(u);
                let denom = 1.0 + z[0] + tail * z[n - 1];
                if denom.abs() < pivot_floor.max(f64::EPSILON) {
                    return Err(RlwError::Singular {
                        row: n - 1,
                        pivot: denom,
                        threshold: pivot_floor,
                    });
                }
                Some(Correction { z, tail, denom })
            }
        };
        Ok(CyclicLu { lu, correction })
    }
}

#[derive(Debug, Clone)]
struct Correction {
    z: Vec<f64>,
    tail: f64,
    denom: f64,
}

/// Reusable factorization of a [`CyclicTridiag`].
#[derive(Debug, Clone)]
pub struct CyclicLu {
    lu: TridiagLu,
    correction: Option<Correction>,
}

impl CyclicLu {
    pub fn len(&self) -> usize {
        self.lu.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lu.d.is_empty()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), b.len())?;
        let mut y = self.lu.solve(b.to_vec());
        if let Some(c) = &self.correction {
            let n = y.len();
            let k = (y[0] + c.tail * y[n - 1]) / c.denom;
            for (yi, zi) in y.iter_mut().zip(&c.z) {
                *yi -= k * zi;
            }
        }
        Ok(y)
    }
}

/// Partially pivoted LU of a plain tridiagonal matrix.
#[derive(Debug, Clone)]
struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(mut dl: Vec<f64>, mut d: Vec<f64>, mut du: Vec<f64>, pivot_floor: f64) -> Result<Self> {
        let n = d.len();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if let Some((row, &pivot)) = d.iter().enumerate().find(|(_, p)| p.abs() < pivot_floor) {
            return Err(RlwError::Singular {
                row,
                pivot,
                threshold: pivot_floor,
            });
        }
        Ok(TridiagLu { dl, d, du, du2, swapped })
    }

    fn solve(&self, mut b: Vec<f64>) -> Vec<f64> {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
        b
    }
}
