//! Uniform periodic mesh, nodal grid functions and the discrete inner product.
//!
//! The mesh stores `N` nodes `x_j = x_left + j h` for `j = 0..N`; node `N` is
//! identified with node 0, so every grid function has exactly `N` entries and
//! neighbour indexing wraps modulo `N`.

use std::ops::{Deref, DerefMut};

use crate::error::{Result, RlwError};

/// Physical constants of `u_t + a u_x - σ u_xxt + (γ u²/2)_x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub a: f64,
    pub sigma: f64,
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(a: f64, sigma: f64, gamma: f64) -> Result<Self> {
        let params = ModelParams { a, sigma, gamma };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("a", self.a), ("sigma", self.sigma), ("gamma", self.gamma)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(RlwError::invalid(name, format!("must be positive, got {value}")));
            }
        }
        Ok(())
    }
}

impl Default for ModelParams {
    /// `a = σ = γ = 1`.
    fn default() -> Self {
        ModelParams {
            a: 1.0,
            sigma: 1.0,
            gamma: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    pub x_left: f64,
    pub x_right: f64,
    pub n_cells: usize,
    pub h: f64,
}

/// Smallest mesh the three-point stencils can live on without aliasing.
pub const MIN_CELLS: usize = 4;

pub fn build_grid(x_left: f64, x_right: f64, n_cells: usize) -> Result<PeriodicGrid> {
    if !(x_left.is_finite() && x_right.is_finite()) || x_right <= x_left {
        return Err(RlwError::invalid(
            "domain",
            format!("need x_right > x_left, got [{x_left}, {x_right}]"),
        ));
    }
    if n_cells < MIN_CELLS {
        return Err(RlwError::invalid(
            "n_cells",
            format!("need at least {MIN_CELLS} cells, got {n_cells}"),
        ));
    }
    Ok(PeriodicGrid {
        x_left,
        x_right,
        n_cells,
        h: (x_right - x_left) / n_cells as f64,
    })
}

impl PeriodicGrid {
    /// Builds a grid from a target mesh width; the span must hold a whole number of cells.
    pub fn with_spacing(x_left: f64, x_right: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(RlwError::invalid("h", format!("must be positive, got {h}")));
        }
        let cells = (x_right - x_left) / h;
        let n = cells.round();
        if (cells - n).abs() > 1e-9 * cells.max(1.0) {
            return Err(RlwError::invalid(
                "h",
                format!("span {} is not a multiple of {h}", x_right - x_left),
            ));
        }
        build_grid(x_left, x_right, n as usize)
    }

    pub fn len(&self) -> usize {
        self.n_cells
    }

    pub fn is_empty(&self) -> bool {
        self.n_cells == 0
    }

    pub fn node(&self, j: usize) -> f64 {
        self.x_left + j as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_cells).map(|j| self.node(j)).collect()
    }

    /// Samples `f` at every node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction((0..self.n_cells).map(|j| f(self.node(j))).collect())
    }
}

/// Nodal values `u_0, …, u_{N-1}` of a function on the mesh.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridFunction(pub Vec<f64>);

impl GridFunction {
    pub fn zeros(n: usize) -> Self {
        GridFunction(vec![0.0; n])
    }

    pub fn constant(n: usize, value: f64) -> Self {
        GridFunction(vec![value; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self + k * other`, elementwise.
    pub fn axpy(&self, k: f64, other: &GridFunction) -> GridFunction {
        GridFunction(self.0.iter().zip(&other.0).map(|(x, y)| x + k * y).collect())
    }

    pub fn scaled(&self, k: f64) -> GridFunction {
        GridFunction(self.0.iter().map(|x| k * x).collect())
    }
}

impl From<Vec<f64>> for GridFunction {
    fn from(v: Vec<f64>) -> Self {
        GridFunction(v)
    }
}

impl Deref for GridFunction {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for GridFunction {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(RlwError::LengthMismatch { expected, found })
    }
}

/// `(u, v)_h = h Σ u_j v_j`.
pub fn discrete_inner(u: &[f64], v: &[f64], h: f64) -> Result<f64> {
    check_len(u.len(), v.len())?;
    Ok(h * u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>())
}

/// `‖u‖_h = (u, u)_h^{1/2}`.
pub fn discrete_norm(u: &[f64], h: f64) -> f64 {
    (h * u.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

/// Elementwise product `u ⊙ v`.
pub fn hadamard(u: &[f64], v: &[f64]) -> Result<GridFunction> {
    check_len(u.len(), v.len())?;
    Ok(GridFunction(u.iter().zip(v).map(|(x, y)| x * y).collect()))
}
