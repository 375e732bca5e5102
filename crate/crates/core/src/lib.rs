//! Energy-conserving solvers for the regularized long-wave equation
//!
//! `u_t + a u_x - σ u_xxt + (γ u²/2)_x = 0`
//!
//! on a uniform periodic mesh. Space is discretized with a modified finite
//! volume method (piecewise-linear trial space, dual-cell test space, central
//! second difference), giving `M du/dt = -C ∇H` with constant circulant
//! matrices. Four time integrators conserve a discrete energy exactly:
//! a fully implicit discrete-gradient scheme and three linear-implicit
//! schemes that need one O(N) solve per step.

pub mod config;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod invariants;
pub mod operators;
pub mod output;
pub mod schemes;
pub mod tridiag;

pub use error::{Result, RlwError};
pub use grid::{build_grid, discrete_inner, discrete_norm, hadamard, GridFunction, ModelParams, PeriodicGrid};
pub use invariants::{analytic_invariants, energy_cubic, energy_liep, energy_quad, mass, EnergyKind};
pub use operators::{assemble_operators, BoundaryMode, SpatialOperators};
pub use schemes::{NonlinearSolveConfig, SchemeId, SchemeState, SolveStats, Stepper, TimeConfig};
