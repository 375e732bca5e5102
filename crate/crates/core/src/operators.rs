//! Mass, stiffness and central-difference matrices of the modified finite
//! volume discretization, and repeated solves with `M = A - σB`.
//!
//! All three matrices are three-point circulants on the periodic mesh:
//!
//! * `A = (h/8)·[1, 6, 1]` (dual-cell integral of the piecewise-linear trial space)
//! * `B = (1/h)·[1, -2, 1]` (central second difference)
//! * `C = (1/2)·[-1, 0, 1]` (flux difference across the dual cell)
//!
//! In Dirichlet mode the first and last rows of the assembled system are
//! replaced by identity rows of `M` (and zero rows of `C`), which pins the
//! two boundary nodes at their initial values.

use crate::error::Result;
use crate::grid::{check_len, GridFunction, ModelParams, PeriodicGrid};
use crate::tridiag::{CyclicLu, CyclicTridiag};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryMode {
    Periodic,
    /// `u_0 = left`, `u_{N-1} = right` for all time.
    Dirichlet { left: f64, right: f64 },
}

impl BoundaryMode {
    pub fn is_periodic(&self) -> bool {
        matches!(self, BoundaryMode::Periodic)
    }
}

pub fn stencil_a(h: f64) -> [f64; 3] {
    [h / 8.0, 6.0 * h / 8.0, h / 8.0]
}

pub fn stencil_b(h: f64) -> [f64; 3] {
    [1.0 / h, -2.0 / h, 1.0 / h]
}

pub const STENCIL_C: [f64; 3] = [-0.5, 0.0, 0.5];

/// Relative pivot floor for factorizations of `M` (scaled by `h`) and of the
/// per-step matrices (scaled by their largest entry).
pub const PIVOT_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct SpatialOperators {
    grid: PeriodicGrid,
    params: ModelParams,
    boundary: BoundaryMode,
    a: CyclicTridiag,
    b: CyclicTridiag,
    c: CyclicTridiag,
    m: CyclicTridiag,
    m_lu: CyclicLu,
}

fn bounded(n: usize, stencil: [f64; 3], boundary: BoundaryMode, edge_diag: f64) -> Result<CyclicTridiag> {
    let mut m = CyclicTridiag::circulant(n, stencil[0], stencil[1], stencil[2])?;
    if !boundary.is_periodic() {
        for row in [0, n - 1] {
            m.lower[row] = 0.0;
            m.diag[row] = edge_diag;
            m.upper[row] = 0.0;
        }
    }
    Ok(m)
}

pub fn assemble_operators(
    grid: PeriodicGrid,
    params: ModelParams,
    boundary: BoundaryMode,
) -> Result<SpatialOperators> {
    params.validate()?;
    let n = grid.n_cells;
    let h = grid.h;
    let a = bounded(n, stencil_a(h), boundary, 1.0)?;
    let b = bounded(n, stencil_b(h), boundary, 0.0)?;
    let c = bounded(n, STENCIL_C, boundary, 0.0)?;
    let combine = |x: &[f64], y: &[f64]| -> Vec<f64> {
        x.iter().zip(y).map(|(p, q)| p - params.sigma * q).collect()
    };
    let m = CyclicTridiag::new(
        combine(&a.lower, &b.lower),
        combine(&a.diag, &b.diag),
        combine(&a.upper, &b.upper),
    )?;
    let m_lu = m.factor(PIVOT_FLOOR * h)?;
    Ok(SpatialOperators {
        grid,
        params,
        boundary,
        a,
        b,
        c,
        m,
        m_lu,
    })
}

impl SpatialOperators {
    pub fn periodic(grid: PeriodicGrid, params: ModelParams) -> Result<Self> {
        assemble_operators(grid, params, BoundaryMode::Periodic)
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn boundary(&self) -> BoundaryMode {
        self.boundary
    }

    pub fn h(&self) -> f64 {
        self.grid.h
    }

    pub fn len(&self) -> usize {
        self.grid.n_cells
    }

    pub fn is_empty(&self) -> bool {
        self.grid.n_cells == 0
    }

    pub fn matrix_a(&self) -> &CyclicTridiag {
        &self.a
    }

    pub fn matrix_b(&self) -> &CyclicTridiag {
        &self.b
    }

    pub fn matrix_c(&self) -> &CyclicTridiag {
        &self.c
    }

    pub fn matrix_m(&self) -> &CyclicTridiag {
        &self.m
    }

    pub fn apply_a(&self, u: &[f64]) -> Result<GridFunction> {
        self.a.apply(u).map(GridFunction)
    }

    pub fn apply_b(&self, u: &[f64]) -> Result<GridFunction> {
        self.b.apply(u).map(GridFunction)
    }

    pub fn apply_c(&self, u: &[f64]) -> Result<GridFunction> {
        self.c.apply(u).map(GridFunction)
    }

    pub fn apply_m(&self, u: &[f64]) -> Result<GridFunction> {
        self.m.apply(u).map(GridFunction)
    }

    /// Solves `M x = b` with the factorization prepared at assembly.
    pub fn solve_m(&self, b: &[f64]) -> Result<GridFunction> {
        self.m_lu.solve(b).map(GridFunction)
    }

    /// `scale·M + C·diag(d)`, the left-hand side of every linear-implicit step.
    pub fn step_matrix(&self, scale: f64, d: &[f64]) -> Result<CyclicTridiag> {
        let n = self.len();
        check_len(n, d.len())?;
        let (m, c) = (&self.m, &self.c);
        let lower = (0..n)
            .map(|i| scale * m.lower[i] + c.lower[i] * d[(i + n - 1) % n])
            .collect();
        let diag = (0..n).map(|i| scale * m.diag[i] + c.diag[i] * d[i]).collect();
        let upper = (0..n)
            .map(|i| scale * m.upper[i] + c.upper[i] * d[(i + 1) % n])
            .collect();
        CyclicTridiag::new(lower, diag, upper)
    }

    /// Factors and solves a step matrix built by [`Self::step_matrix`].
    pub fn solve_step(&self, matrix: &CyclicTridiag, rhs: &[f64]) -> Result<GridFunction> {
        let lu = matrix.factor(PIVOT_FLOOR * matrix.max_abs())?;
        lu.solve(rhs).map(GridFunction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    fn ops(n: usize, h: f64) -> SpatialOperators {
        let grid = build_grid(0.0, n as f64 * h, n).unwrap();
        SpatialOperators::periodic(grid, ModelParams::default()).unwrap()
    }

    #[test]
    fn first_rows_match_stencils() {
        let ops = ops(4, 1.0);
        let e0 = [1.0, 0.0, 0.0, 0.0];
        // Column j of row 0 is read off by applying the transpose; with
        // symmetric A that is A e_0, with skew C it is -C e_0.
        let a_col = ops.apply_a(&e0).unwrap();
        assert_eq!(a_col.0, vec![6.0 / 8.0, 1.0 / 8.0, 0.0, 1.0 / 8.0]);
        let c_col = ops.apply_c(&e0).unwrap();
        let row0: Vec<f64> = c_col.iter().map(|v| -v).collect();
        assert_eq!(row0, vec![0.0, 0.5, 0.0, -0.5]);
    }

    #[test]
    fn c_of_ramp() {
        let ops = ops(4, 1.0);
        assert_eq!(ops.apply_c(&[0.0, 1.0, 2.0, 3.0]).unwrap().0, vec![-1.0, 1.0, 1.0, -1.0]);
        assert_eq!(ops.apply_c(&[2.5; 4]).unwrap().0, vec![0.0; 4]);
    }

    #[test]
    fn row_sum_identities() {
        let ops = ops(10, 0.3);
        let ones = vec![1.0; 10];
        for v in ops.apply_a(&ones).unwrap().iter() {
            assert!((v - 0.3).abs() < 1e-15);
        }
        assert!(ops.apply_b(&ones).unwrap().max_abs() < 1e-13);
        let x = ops.solve_m(&[0.3; 10]).unwrap();
        for v in x.iter() {
            assert!((v - 1.0).abs() < 1e-13);
        }
        assert_eq!(ops.solve_m(&[0.0; 10]).unwrap().0, vec![0.0; 10]);
    }

    #[test]
    fn dirichlet_rows_pin_boundary() {
        let grid = build_grid(0.0, 8.0, 8).unwrap();
        let ops = assemble_operators(
            grid,
            ModelParams::default(),
            BoundaryMode::Dirichlet { left: 1.0, right: 0.0 },
        )
        .unwrap();
        let u: Vec<f64> = (0..8).map(|i| i as f64 * 0.5).collect();
        let mu = ops.apply_m(&u).unwrap();
        assert_eq!(mu[0], u[0]);
        assert_eq!(mu[7], u[7]);
        let cu = ops.apply_c(&u).unwrap();
        assert_eq!((cu[0], cu[7]), (0.0, 0.0));
        assert_eq!(cu[3], 0.5);
        let x = ops.solve_m(&mu).unwrap();
        for (xi, ui) in x.iter().zip(&u) {
            assert!((xi - ui).abs() < 1e-13);
        }
    }

    #[test]
    fn step_matrix_matches_composition() {
        let ops = ops(6, 0.5);
        let d = [0.1, 0.4, -0.3, 0.2, 0.7, 0.0];
        let s = ops.step_matrix(2.0, &d).unwrap();
        let x = [1.0, -2.0, 0.5, 3.0, 0.0, 1.5];
        let lhs = s.apply(&x).unwrap();
        let dx: Vec<f64> = d.iter().zip(&x).map(|(a, b)| a * b).collect();
        let mx = ops.apply_m(&x).unwrap();
        let cdx = ops.apply_c(&dx).unwrap();
        for i in 0..6 {
            assert!((lhs[i] - (2.0 * mx[i] + cdx[i])).abs() < 1e-14);
        }
        let back = ops.solve_step(&s, &lhs).unwrap();
        for (b, xi) in back.iter().zip(&x) {
            assert!((b - xi).abs() < 1e-12);
        }
    }
}
