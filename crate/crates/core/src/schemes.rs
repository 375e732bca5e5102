//! The four energy-conserving time integrators.
//!
//! Every scheme advances the semi-discrete system `M du/dt = -C ∇H(u)`:
//!
//! * **FIEP**: fully implicit discrete-gradient midpoint. One nonlinear
//!   solve per step; conserves the cubic energy.
//! * **LIEP**: three-level linear-implicit discrete gradient. Conserves a
//!   two-level energy on `(uⁿ, uⁿ⁺¹)`; started by one FIEP step.
//! * **LICN** / **LILF**: linear-implicit Crank–Nicolson / leap-frog on the
//!   system quadratized with `v = u²`. They conserve `h Σ (γuv/6 + au²/2)`
//!   and share the same two-level quadratized start.
//!
//! For the quadratized schemes the auxiliary variable is advanced by
//! `vⁿ⁺¹ - vᵏ = 2 w ⊙ (uⁿ⁺¹ - uᵏ)` with `w` the extrapolated (LICN) or
//! current (LILF) level. Eliminating `v` leaves the cyclic tridiagonal system
//! `[s M + C diag(a/2 + γw/3)] uⁿ⁺¹ = s M uᵏ - C(γvᵏ/6 + a uᵏ/2)`, so each
//! linear step costs a single O(N) solve. It is solved for the increment
//! `uⁿ⁺¹ - uᵏ`, whose right-hand side is `C` applied to a vector; this keeps
//! the mass drift at roundoff.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, RlwError};
use crate::grid::{check_len, GridFunction};
use crate::invariants::{energy_cubic, energy_liep, energy_quad, EnergyKind};
use crate::operators::SpatialOperators;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeId {
    Fiep,
    Liep,
    Licn,
    Lilf,
}

impl SchemeId {
    pub const ALL: [SchemeId; 4] = [SchemeId::Fiep, SchemeId::Liep, SchemeId::Licn, SchemeId::Lilf];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeId::Fiep => "FIEP",
            SchemeId::Liep => "LIEP",
            SchemeId::Licn => "LICN",
            SchemeId::Lilf => "LILF",
        }
    }

    pub fn energy_kind(&self) -> EnergyKind {
        match self {
            SchemeId::Fiep => EnergyKind::Cubic,
            SchemeId::Liep => EnergyKind::LiepTwoLevel,
            SchemeId::Licn | SchemeId::Lilf => EnergyKind::Quadratic,
        }
    }

    /// True for the schemes that need one linear solve per step.
    pub fn is_linear(&self) -> bool {
        !matches!(self, SchemeId::Fiep)
    }

    pub fn is_quadratized(&self) -> bool {
        matches!(self, SchemeId::Licn | SchemeId::Lilf)
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = RlwError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "FIEP" => Ok(SchemeId::Fiep),
            "LIEP" => Ok(SchemeId::Liep),
            "LICN" => Ok(SchemeId::Licn),
            "LILF" => Ok(SchemeId::Lilf),
            _ => Err(RlwError::invalid(
                "scheme",
                format!("unknown scheme `{s}` (expected FIEP, LIEP, LICN or LILF)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeConfig {
    pub tau: f64,
    pub t_end: f64,
    pub n_steps: usize,
}

impl TimeConfig {
    pub fn new(tau: f64, t_end: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(RlwError::invalid("tau", format!("must be positive, got {tau}")));
        }
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(RlwError::invalid("t_end", format!("must be non-negative, got {t_end}")));
        }
        let n_steps = (t_end / tau).round();
        if (n_steps * tau - t_end).abs() > 1e-12 * t_end.max(tau) {
            return Err(RlwError::invalid(
                "t_end",
                format!("{t_end} is not a whole number of steps of {tau}"),
            ));
        }
        Ok(TimeConfig {
            tau,
            t_end,
            n_steps: n_steps as usize,
        })
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.tau
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearSolveConfig {
    /// Max-norm bound on the change between successive iterates.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NonlinearSolveConfig {
    fn default() -> Self {
        NonlinearSolveConfig {
            tol: 1e-13,
            max_iter: 200,
        }
    }
}

impl NonlinearSolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(RlwError::invalid("nl_tol", format!("must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(RlwError::invalid("nl_max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

/// Solver work counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Solves with the constant matrix `M`.
    pub m_solves: usize,
    /// Factor-and-solve of a per-step linear system.
    pub step_solves: usize,
    pub fixed_point_iterations: usize,
}

impl SolveStats {
    pub fn linear_solves(&self) -> usize {
        self.m_solves + self.step_solves
    }
}

/// Time-level data carried between steps.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeState {
    pub scheme: SchemeId,
    pub u_curr: GridFunction,
    pub u_prev: Option<GridFunction>,
    pub v_curr: Option<GridFunction>,
    pub v_prev: Option<GridFunction>,
    pub step_index: usize,
}

impl SchemeState {
    /// State at `n = 0`; quadratized schemes start from `v⁰ = u⁰ ⊙ u⁰`.
    pub fn initial(scheme: SchemeId, u0: GridFunction) -> Self {
        let v_curr = scheme
            .is_quadratized()
            .then(|| GridFunction(u0.iter().map(|x| x * x).collect()));
        SchemeState {
            scheme,
            u_curr: u0,
            u_prev: None,
            v_curr,
            v_prev: None,
            step_index: 0,
        }
    }

    fn advanced(&self, u_next: GridFunction, v_next: Option<GridFunction>) -> Self {
        SchemeState {
            scheme: self.scheme,
            u_prev: Some(self.u_curr.clone()),
            u_curr: u_next,
            v_prev: if v_next.is_some() { self.v_curr.clone() } else { None },
            v_curr: v_next,
            step_index: self.step_index + 1,
        }
    }

    fn prev(&self) -> Result<&GridFunction> {
        self.u_prev.as_ref().ok_or(RlwError::MissingLevel("previous solution"))
    }

    fn v(&self) -> Result<&GridFunction> {
        self.v_curr.as_ref().ok_or(RlwError::MissingLevel("auxiliary v"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub solution: GridFunction,
    pub iterations: usize,
    /// Max-norm of the last update.
    pub last_update: f64,
}

/// Picard iteration `x ← map(x)` until successive iterates agree to `cfg.tol`.
pub fn fixed_point_solve<F>(mut map: F, init: GridFunction, cfg: &NonlinearSolveConfig) -> Result<FixedPoint>
where
    F: FnMut(&GridFunction) -> Result<GridFunction>,
{
    cfg.validate()?;
    let mut x = init;
    let mut update = f64::INFINITY;
    for iteration in 1..=cfg.max_iter {
        let next = map(&x)?;
        check_len(x.len(), next.len())?;
        update = next.iter().zip(x.iter()).fold(0.0, |m, (p, q)| m.max((p - q).abs()));
        if !update.is_finite() {
            break;
        }
        x = next;
        if update <= cfg.tol {
            return Ok(FixedPoint {
                solution: x,
                iterations: iteration,
                last_update: update,
            });
        }
    }
    Err(RlwError::NonConvergence {
        iterations: cfg.max_iter,
        residual: update,
    })
}

/// Discrete variational derivative `F(uⁿ, uⁿ⁺¹)` of the cubic energy.
pub fn discrete_gradient(u_n: &[f64], u_np1: &[f64], ops: &SpatialOperators) -> GridFunction {
    let p = ops.params();
    GridFunction(
        u_n.iter()
            .zip(u_np1)
            .map(|(&x, &y)| p.gamma / 6.0 * (y * y + x * y + x * x) + p.a / 2.0 * (y + x))
            .collect(),
    )
}

/// Three-level discrete derivative `G(uⁿ⁻¹, uⁿ, uⁿ⁺¹)`.
pub fn three_level_gradient(u_prev: &[f64], u_n: &[f64], u_next: &[f64], ops: &SpatialOperators) -> GridFunction {
    let p = ops.params();
    GridFunction(
        u_prev
            .iter()
            .zip(u_n)
            .zip(u_next)
            .map(|((&z, &x), &y)| p.a * x + p.gamma / 6.0 * x * (y + x + z))
            .collect(),
    )
}

/// Solves `M(x - uⁿ)/τ = -C F(uⁿ, x)` by fixed-point iteration from `x = uⁿ`.
fn fiep_solve(
    u_n: &GridFunction,
    ops: &SpatialOperators,
    tau: f64,
    nl: &NonlinearSolveConfig,
    stats: &mut SolveStats,
) -> Result<GridFunction> {
    check_len(ops.len(), u_n.len())?;
    let mut m_solves = 0;
    let result = fixed_point_solve(
        |x| {
            let flux = ops.apply_c(&discrete_gradient(u_n, x, ops))?;
            let incr = ops.solve_m(&flux)?;
            m_solves += 1;
            Ok(u_n.axpy(-tau, &incr))
        },
        u_n.clone(),
        nl,
    );
    stats.m_solves += m_solves;
    let fp = result?;
    stats.fixed_point_iterations += fp.iterations;
    Ok(fp.solution)
}

pub fn fiep_step(
    state: &SchemeState,
    ops: &SpatialOperators,
    tau: f64,
    nl: &NonlinearSolveConfig,
    stats: &mut SolveStats,
) -> Result<SchemeState> {
    let next = fiep_solve(&state.u_curr, ops, tau, nl, stats)?;
    Ok(state.advanced(next, None))
}

/// First level `u¹` for LIEP, from the same nonlinear system FIEP solves.
pub fn two_level_startup(
    u0: &GridFunction,
    ops: &SpatialOperators,
    tau: f64,
    nl: &NonlinearSolveConfig,
    stats: &mut SolveStats,
) -> Result<GridFunction> {
    fiep_solve(u0, ops, tau, nl, stats)
}

pub fn liep_step(
    state: &SchemeState,
    ops: &SpatialOperators,
    tau: f64,
    stats: &mut SolveStats,
) -> Result<SchemeState> {
    let u = &state.u_curr;
    let up = state.prev()?;
    check_len(ops.len(), u.len())?;
    check_len(u.len(), up.len())?;
    let p = ops.params();
    let g6 = p.gamma / 6.0;
    let scale = 1.0 / (2.0 * tau);

    // Solved for the increment uⁿ⁺¹ - uⁿ⁻¹, whose right-hand side lies in the range of C.
    let weight: Vec<f64> = u.iter().map(|x| g6 * x).collect();
    let matrix = ops.step_matrix(scale, &weight)?;
    let explicit: Vec<f64> = u
        .iter()
        .zip(up.iter())
        .map(|(&x, &z)| -(p.a * x + g6 * x * (x + 2.0 * z)))
        .collect();
    let rhs = ops.apply_c(&explicit)?;
    let incr = ops.solve_step(&matrix, &rhs)?;
    let next = up.axpy(1.0, &incr);
    stats.step_solves += 1;
    Ok(state.advanced(next, None))
}

/// One linear step of the quadratized system from base level `(u_base, v_base)`
/// with weight `w` and time scale `scale` (`1/τ` or `1/(2τ)`).
fn quadratized_solve(
    ops: &SpatialOperators,
    w: &[f64],
    u_base: &[f64],
    v_base: &[f64],
    scale: f64,
    stats: &mut SolveStats,
) -> Result<(GridFunction, GridFunction)> {
    let n = ops.len();
    check_len(n, w.len())?;
    check_len(n, u_base.len())?;
    check_len(n, v_base.len())?;
    let p = ops.params();
    let d: Vec<f64> = w.iter().map(|x| p.a / 2.0 + p.gamma / 3.0 * x).collect();
    let matrix = ops.step_matrix(scale, &d)?;
    let explicit: Vec<f64> = u_base
        .iter()
        .zip(v_base)
        .zip(w)
        .map(|((&u, &v), &w)| -(p.gamma / 6.0 * v + p.a * u + p.gamma / 3.0 * w * u))
        .collect();
    let rhs = ops.apply_c(&explicit)?;
    let incr = ops.solve_step(&matrix, &rhs)?;
    stats.step_solves += 1;
    let u_next = GridFunction((0..n).map(|j| u_base[j] + incr[j]).collect());
    let v_next = GridFunction((0..n).map(|j| v_base[j] + 2.0 * w[j] * incr[j]).collect());
    Ok((u_next, v_next))
}

/// Two-level start for LICN and LILF: returns `(u¹, v¹)` with `v⁰ = u⁰ ⊙ u⁰`.
pub fn licn_startup(
    u0: &GridFunction,
    ops: &SpatialOperators,
    tau: f64,
    stats: &mut SolveStats,
) -> Result<(GridFunction, GridFunction)> {
    let v0: Vec<f64> = u0.iter().map(|x| x * x).collect();
    quadratized_solve(ops, u0, u0, &v0, 1.0 / tau, stats)
}

pub fn licn_step(
    state: &SchemeState,
    ops: &SpatialOperators,
    tau: f64,
    stats: &mut SolveStats,
) -> Result<SchemeState> {
    let u = &state.u_curr;
    let up = state.prev()?;
    let v = state.v()?;
    check_len(u.len(), up.len())?;
    let extrapolated: Vec<f64> = u.iter().zip(up.iter()).map(|(x, z)| 1.5 * x - 0.5 * z).collect();
    let (u_next, v_next) = quadratized_solve(ops, &extrapolated, u, v, 1.0 / tau, stats)?;
    Ok(state.advanced(u_next, Some(v_next)))
}

pub fn lilf_step(
    state: &SchemeState,
    ops: &SpatialOperators,
    tau: f64,
    stats: &mut SolveStats,
) -> Result<SchemeState> {
    let up = state.prev()?;
    let vp = state.v_prev.as_ref().ok_or(RlwError::MissingLevel("previous auxiliary v"))?;
    state.v()?;
    let (u_next, v_next) = quadratized_solve(ops, &state.u_curr, up, vp, 1.0 / (2.0 * tau), stats)?;
    Ok(state.advanced(u_next, Some(v_next)))
}

/// Advances any scheme one level, running its startup step at `n = 0`.
pub fn advance(
    state: &SchemeState,
    ops: &SpatialOperators,
    tau: f64,
    nl: &NonlinearSolveConfig,
    stats: &mut SolveStats,
) -> Result<SchemeState> {
    match (state.scheme, state.step_index) {
        (SchemeId::Fiep, _) => fiep_step(state, ops, tau, nl, stats),
        (SchemeId::Liep, 0) => {
            let u1 = two_level_startup(&state.u_curr, ops, tau, nl, stats)?;
            Ok(state.advanced(u1, None))
        }
        (SchemeId::Liep, _) => liep_step(state, ops, tau, stats),
        (SchemeId::Licn | SchemeId::Lilf, 0) => {
            let (u1, v1) = licn_startup(&state.u_curr, ops, tau, stats)?;
            Ok(state.advanced(u1, Some(v1)))
        }
        (SchemeId::Licn, _) => licn_step(state, ops, tau, stats),
        (SchemeId::Lilf, _) => lilf_step(state, ops, tau, stats),
    }
}

/// Owns the operators and state of one run.
#[derive(Debug, Clone)]
pub struct Stepper {
    ops: SpatialOperators,
    tau: f64,
    nl: NonlinearSolveConfig,
    state: SchemeState,
    stats: SolveStats,
}

impl Stepper {
    pub fn new(
        ops: SpatialOperators,
        scheme: SchemeId,
        u0: GridFunction,
        tau: f64,
        nl: NonlinearSolveConfig,
    ) -> Result<Self> {
        check_len(ops.len(), u0.len())?;
        if !(tau.is_finite() && tau > 0.0) {
            return Err(RlwError::invalid("tau", format!("must be positive, got {tau}")));
        }
        nl.validate()?;
        Ok(Stepper {
            ops,
            tau,
            nl,
            state: SchemeState::initial(scheme, u0),
            stats: SolveStats::default(),
        })
    }

    pub fn advance(&mut self) -> Result<()> {
        let next = advance(&self.state, &self.ops, self.tau, &self.nl, &mut self.stats)
            .map_err(|e| e.at_step(self.state.step_index + 1, (self.state.step_index + 1) as f64 * self.tau))?;
        self.state = next;
        Ok(())
    }

    pub fn state(&self) -> &SchemeState {
        &self.state
    }

    pub fn ops(&self) -> &SpatialOperators {
        &self.ops
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn time(&self) -> f64 {
        self.state.step_index as f64 * self.tau
    }

    pub fn solution(&self) -> &GridFunction {
        &self.state.u_curr
    }

    /// The scheme's conserved energy at the current level. For LIEP the
    /// two-level functional needs the next level, so this returns the value
    /// for level `n - 1` (and `None` at `n = 0`).
    pub fn energy(&self) -> Option<f64> {
        let h = self.ops.h();
        let p = self.ops.params();
        let s = &self.state;
        match s.scheme {
            SchemeId::Fiep => Some(energy_cubic(&s.u_curr, h, p)),
            SchemeId::Liep => s
                .u_prev
                .as_ref()
                .map(|up| energy_liep(up, &s.u_curr, h, p).expect("levels share the grid")),
            SchemeId::Licn | SchemeId::Lilf => s
                .v_curr
                .as_ref()
                .map(|v| energy_quad(&s.u_curr, v, h, p).expect("levels share the grid")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, ModelParams};

    fn ops(n: usize, h: f64) -> SpatialOperators {
        let grid = build_grid(0.0, n as f64 * h, n).unwrap();
        SpatialOperators::periodic(grid, ModelParams::default()).unwrap()
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in SchemeId::ALL {
            assert_eq!(s.name().parse::<SchemeId>().unwrap(), s);
        }
        assert_eq!("licn".parse::<SchemeId>().unwrap(), SchemeId::Licn);
        assert!("CN".parse::<SchemeId>().is_err());
    }

    #[test]
    fn time_config() {
        let t = TimeConfig::new(0.1, 16.0).unwrap();
        assert_eq!(t.n_steps, 160);
        assert!((t.time(t.n_steps) - 16.0).abs() < 1e-12);
        assert!(TimeConfig::new(0.0, 1.0).is_err());
        assert!(TimeConfig::new(-0.1, 1.0).is_err());
        assert!(TimeConfig::new(0.3, 1.0).is_err());
    }

    #[test]
    fn fixed_point_identity_and_affine() {
        let cfg = NonlinearSolveConfig::default();
        let init = GridFunction(vec![1.0, -2.0, 3.0]);
        let fp = fixed_point_solve(|x| Ok(x.clone()), init.clone(), &cfg).unwrap();
        assert_eq!(fp.iterations, 1);
        assert_eq!(fp.solution, init);

        let fp = fixed_point_solve(
            |x| Ok(GridFunction(x.iter().map(|v| v / 2.0 + 1.0).collect())),
            GridFunction::zeros(1),
            &cfg,
        )
        .unwrap();
        assert!((fp.solution[0] - 2.0).abs() <= cfg.tol);
    }

    #[test]
    fn fixed_point_reports_nonconvergence() {
        let cfg = NonlinearSolveConfig { tol: 1e-13, max_iter: 5 };
        let err = fixed_point_solve(
            |x| Ok(GridFunction(x.iter().map(|v| 2.0 * v + 1.0).collect())),
            GridFunction::zeros(2),
            &cfg,
        )
        .unwrap_err();
        assert!(matches!(err, RlwError::NonConvergence { iterations: 5, .. }));
        assert!(NonlinearSolveConfig { tol: 0.0, max_iter: 3 }.validate().is_err());
    }

    #[test]
    fn zero_state_is_fixed() {
        let ops = ops(12, 0.5);
        let nl = NonlinearSolveConfig::default();
        for scheme in SchemeId::ALL {
            let mut st = Stepper::new(ops.clone(), scheme, GridFunction::zeros(12), 0.1, nl).unwrap();
            for _ in 0..4 {
                st.advance().unwrap();
            }
            assert_eq!(st.solution().0, vec![0.0; 12], "{scheme}");
            if let Some(v) = &st.state().v_curr {
                assert_eq!(v.0, vec![0.0; 12]);
            }
        }
    }

    #[test]
    fn three_level_steps_need_history() {
        let ops = ops(8, 0.5);
        let mut stats = SolveStats::default();
        let s0 = SchemeState::initial(SchemeId::Liep, GridFunction::zeros(8));
        assert!(matches!(
            liep_step(&s0, &ops, 0.1, &mut stats),
            Err(RlwError::MissingLevel(_))
        ));
        let s0 = SchemeState::initial(SchemeId::Lilf, GridFunction::zeros(8));
        assert!(lilf_step(&s0, &ops, 0.1, &mut stats).is_err());
        assert!(licn_step(&s0, &ops, 0.1, &mut stats).is_err());
    }

    #[test]
    fn startup_shares_fiep_path() {
        let ops = ops(16, 0.5);
        let nl = NonlinearSolveConfig::default();
        let u0 = ops.grid().sample(|x| 0.3 * (-(x - 4.0) * (x - 4.0)).exp());
        let mut stats = SolveStats::default();
        let u1 = two_level_startup(&u0, &ops, 0.1, &nl, &mut stats).unwrap();
        let state = fiep_step(&SchemeState::initial(SchemeId::Fiep, u0), &ops, 0.1, &nl, &mut stats).unwrap();
        assert_eq!(u1, state.u_curr);
    }

    #[test]
    fn initial_v_is_square() {
        let s = SchemeState::initial(SchemeId::Licn, GridFunction(vec![1.0, -2.0, 3.0]));
        assert_eq!(s.v_curr.unwrap().0, vec![1.0, 4.0, 9.0]);
        assert!(SchemeState::initial(SchemeId::Fiep, GridFunction(vec![1.0])).v_curr.is_none());
    }
}
