//! Initial conditions, exact solutions, error norms and the experiment driver.

use crate::error::{Result, RlwError};
use crate::grid::{check_len, GridFunction, ModelParams, PeriodicGrid};
use crate::invariants::{analytic_invariants, energy_cubic, energy_liep, mass, EnergyKind};
use crate::operators::{assemble_operators, BoundaryMode};
use crate::schemes::{NonlinearSolveConfig, SchemeId, SolveStats, Stepper, TimeConfig};

fn sech2(z: f64) -> f64 {
    let c = z.cosh();
    1.0 / (c * c)
}

/// Width `m` and speed `v` of the solitary wave with parameter `c`.
fn solitary_shape(c: f64, params: &ModelParams) -> (f64, f64) {
    let v = params.a + params.gamma * c;
    ((params.gamma * c / (v * params.sigma)).sqrt() / 2.0, v)
}

/// `3c sech²(m(x - v t - x0))`, the travelling solitary wave of amplitude `3c`.
pub fn exact_solitary(x: f64, t: f64, params: &ModelParams, c: f64, x0: f64) -> f64 {
    let (m, v) = solitary_shape(c, params);
    3.0 * c * sech2(m * (x - v * t - x0))
}

pub fn ic_single(grid: &PeriodicGrid, params: &ModelParams, c: f64, x0: f64) -> GridFunction {
    grid.sample(|x| exact_solitary(x, 0.0, params, c, x0))
}

/// Superposition of solitary profiles, one per `(c_i, x_i)`.
pub fn ic_three_wave(grid: &PeriodicGrid, params: &ModelParams, waves: &[(f64, f64)]) -> Result<GridFunction> {
    if waves.is_empty() {
        return Err(RlwError::invalid("waves", "need at least one wave"));
    }
    if let Some(&(c, _)) = waves.iter().find(|(c, _)| !(c.is_finite() && *c > 0.0)) {
        return Err(RlwError::invalid("waves", format!("wave speeds must be positive, got {c}")));
    }
    Ok(grid.sample(|x| {
        waves
            .iter()
            .map(|&(c, xi)| exact_solitary(x, 0.0, params, c, xi))
            .sum()
    }))
}

pub const THREE_WAVE_PRESET: [(f64, f64); 3] = [(1.0, -20.0), (0.5, 15.0), (0.25, 45.0)];

/// `exp(-(x - 7)²)`.
pub fn ic_maxwellian(grid: &PeriodicGrid) -> GridFunction {
    grid.sample(|x| (-(x - 7.0) * (x - 7.0)).exp())
}

/// `(U0/2)(1 - tanh((x - x0)/d))`.
pub fn ic_undular_bore(grid: &PeriodicGrid, u0: f64, x0: f64, d: f64) -> Result<GridFunction> {
    if !(d.is_finite() && d > 0.0) {
        return Err(RlwError::invalid("d", format!("must be positive, got {d}")));
    }
    Ok(grid.sample(|x| u0 / 2.0 * (1.0 - ((x - x0) / d).tanh())))
}

/// `(h Σ |u_exact - u_num|²)^{1/2}`.
pub fn l2_error(u_num: &[f64], u_exact: &[f64], h: f64) -> Result<f64> {
    check_len(u_exact.len(), u_num.len())?;
    Ok((h * u_num.iter().zip(u_exact).map(|(a, b)| (b - a) * (b - a)).sum::<f64>()).sqrt())
}

pub fn linf_error(u_num: &[f64], u_exact: &[f64]) -> Result<f64> {
    check_len(u_exact.len(), u_num.len())?;
    Ok(u_num.iter().zip(u_exact).fold(0.0, |m, (a, b)| m.max((b - a).abs())))
}

/// `log(err1/err2) / log(δ1/δ2)`.
pub fn convergence_order(err1: f64, err2: f64, delta1: f64, delta2: f64) -> Result<f64> {
    for (name, v) in [("err1", err1), ("err2", err2), ("delta1", delta1), ("delta2", delta2)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(RlwError::invalid(name, format!("must be positive, got {v}")));
        }
    }
    if delta1 == delta2 {
        return Err(RlwError::invalid("delta2", "step sizes must differ"));
    }
    Ok((err1 / err2).ln() / (delta1 / delta2).ln())
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_len(xs.len(), ys.len())?;
    if xs.len() < 2 {
        return Err(RlwError::invalid("samples", "need at least two points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(RlwError::invalid("samples", "abscissae are all equal"));
    }
    Ok(sxy / sxx)
}

/// Linear growth rates `(M1, M3)` of mass and energy for the undular bore:
/// `M1 = U0 + U0²/2`, `M3 = U0²/2 + γU0³/2 + γU0⁴/8`.
pub fn bore_growth_rates(u0: f64, params: &ModelParams) -> (f64, f64) {
    let g = params.gamma;
    let m1 = u0 + u0 * u0 / 2.0;
    let m3 = u0 * u0 / 2.0 + g * u0.powi(3) / 2.0 + g * u0.powi(4) / 8.0;
    (m1, m3)
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    SingleSoliton { c: f64, x0: f64 },
    ThreeWave { waves: Vec<(f64, f64)> },
    Maxwellian,
    /// Inflow bore; runs with the boundary nodes pinned at `u0` and `0`.
    UndularBore { u0: f64, x0: f64, d: f64 },
    Custom { values: Vec<f64> },
}

impl InitialCondition {
    pub fn name(&self) -> &'static str {
        match self {
            InitialCondition::SingleSoliton { .. } => "single_soliton",
            InitialCondition::ThreeWave { .. } => "three_wave",
            InitialCondition::Maxwellian => "maxwellian",
            InitialCondition::UndularBore { .. } => "undular_bore",
            InitialCondition::Custom { .. } => "custom",
        }
    }

    pub fn boundary(&self) -> BoundaryMode {
        match *self {
            InitialCondition::UndularBore { u0, .. } => BoundaryMode::Dirichlet { left: u0, right: 0.0 },
            _ => BoundaryMode::Periodic,
        }
    }

    pub fn sample(&self, grid: &PeriodicGrid, params: &ModelParams) -> Result<GridFunction> {
        let mut u = match self {
            InitialCondition::SingleSoliton { c, x0 } => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(RlwError::invalid("c", format!("must be positive, got {c}")));
                }
                ic_single(grid, params, *c, *x0)
            }
            InitialCondition::ThreeWave { waves } => ic_three_wave(grid, params, waves)?,
            InitialCondition::Maxwellian => ic_maxwellian(grid),
            InitialCondition::UndularBore { u0, x0, d } => ic_undular_bore(grid, *u0, *x0, *d)?,
            InitialCondition::Custom { values } => {
                check_len(grid.n_cells, values.len())?;
                GridFunction(values.clone())
            }
        };
        if let BoundaryMode::Dirichlet { left, right } = self.boundary() {
            let n = u.len();
            u[0] = left;
            u[n - 1] = right;
        }
        if !u.is_finite() {
            return Err(RlwError::invalid("initial condition", "non-finite values"));
        }
        Ok(u)
    }

    /// Exact solution at `(x, t)` where one is known.
    pub fn exact(&self, params: &ModelParams) -> Option<impl Fn(f64, f64) -> f64> {
        match *self {
            InitialCondition::SingleSoliton { c, x0 } => {
                let p = *params;
                Some(move |x: f64, t: f64| exact_solitary(x, t, &p, c, x0))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub ic: InitialCondition,
    pub params: ModelParams,
    pub x_left: f64,
    pub x_right: f64,
    pub n_cells: usize,
    pub tau: f64,
    pub t_end: f64,
    pub scheme: SchemeId,
    pub nl: NonlinearSolveConfig,
    /// Error norms are evaluated every this many steps (0 disables them).
    pub report_every: usize,
    pub snapshot_times: Vec<f64>,
}

impl ExperimentSpec {
    fn preset(ic: InitialCondition, params: ModelParams, domain: (f64, f64), h: f64, tau: f64, t_end: f64, scheme: SchemeId) -> Self {
        let n_cells = ((domain.1 - domain.0) / h).round() as usize;
        ExperimentSpec {
            ic,
            params,
            x_left: domain.0,
            x_right: domain.1,
            n_cells,
            tau,
            t_end,
            scheme,
            nl: NonlinearSolveConfig::default(),
            report_every: 0,
            snapshot_times: Vec::new(),
        }
    }

    /// Single solitary wave, `c = 0.1`, `τ = 0.1`, `h = 0.125` on `[-40, 60]` to `T = 16`,
    /// with error norms every `t = 4`.
    pub fn single_soliton_table(scheme: SchemeId) -> Self {
        let mut spec = Self::preset(
            InitialCondition::SingleSoliton { c: 0.1, x0: 0.0 },
            ModelParams::default(),
            (-40.0, 60.0),
            0.125,
            0.1,
            16.0,
            scheme,
        );
        spec.report_every = 40;
        spec
    }

    /// Long conservation run: `c = 1/3`, `τ = 0.05`, `h = 0.1` on `[-60, 200]` to `T = 75`.
    pub fn conservation_run(scheme: SchemeId) -> Self {
        Self::preset(
            InitialCondition::SingleSoliton { c: 1.0 / 3.0, x0: 0.0 },
            ModelParams::default(),
            (-60.0, 200.0),
            0.1,
            0.05,
            75.0,
            scheme,
        )
    }

    /// Interaction of three solitary waves on `[-200, 400]`, `h = 0.25`, `τ = 0.05`, `T = 400`.
    pub fn three_wave(scheme: SchemeId) -> Self {
        let mut spec = Self::preset(
            InitialCondition::ThreeWave {
                waves: THREE_WAVE_PRESET.to_vec(),
            },
            ModelParams::default(),
            (-200.0, 400.0),
            0.25,
            0.05,
            400.0,
            scheme,
        );
        spec.snapshot_times = vec![0.0, 40.0, 80.0, 120.0, 200.0, 400.0];
        spec
    }

    /// Maxwellian pulse on `[-40, 100]`, `h = τ = 0.05`, `T = 55`.
    pub fn maxwellian(scheme: SchemeId, sigma: f64) -> Self {
        let mut spec = Self::preset(
            InitialCondition::Maxwellian,
            ModelParams { a: 1.0, sigma, gamma: 1.0 },
            (-40.0, 100.0),
            0.05,
            0.05,
            55.0,
            scheme,
        );
        spec.snapshot_times = vec![0.0, 55.0];
        spec
    }

    /// Undular bore, `U0 = 0.1`, `σ = 1/6`, `γ = 1.5`, `h = 0.24`, `τ = 0.1`, `T = 250`
    /// on `[-80, 400]` with pinned boundary values.
    pub fn undular_bore(scheme: SchemeId, d: f64) -> Self {
        let mut spec = Self::preset(
            InitialCondition::UndularBore { u0: 0.1, x0: 0.0, d },
            ModelParams {
                a: 1.0,
                sigma: 1.0 / 6.0,
                gamma: 1.5,
            },
            (-80.0, 400.0),
            0.24,
            0.1,
            250.0,
            scheme,
        );
        spec.snapshot_times = vec![0.0, 50.0, 100.0, 150.0, 200.0, 250.0];
        spec
    }

    pub fn grid(&self) -> Result<PeriodicGrid> {
        crate::grid::build_grid(self.x_left, self.x_right, self.n_cells)
    }

    pub fn time_config(&self) -> Result<TimeConfig> {
        TimeConfig::new(self.tau, self.t_end)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.grid()?;
        self.time_config()?;
        self.nl.validate()?;
        if let Some(t) = self.snapshot_times.iter().find(|t| !(t.is_finite() && **t >= 0.0 && **t <= self.t_end + 1e-12)) {
            return Err(RlwError::invalid("snapshot_times", format!("{t} is outside [0, t_end]")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordRow {
    pub step: usize,
    pub t: f64,
    pub mass: f64,
    /// The scheme's own conserved energy. For LIEP this is the two-level
    /// functional on `(uⁿ, uⁿ⁺¹)`, so the run takes one step past `t_end`
    /// to close the last row.
    pub energy: f64,
    pub cubic_energy: f64,
    pub max_u: f64,
    pub l2_error: Option<f64>,
    pub linf_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub scheme: SchemeId,
    pub energy_kind: EnergyKind,
    pub x: Vec<f64>,
    pub rows: Vec<RecordRow>,
    pub snapshots: Vec<Snapshot>,
    pub stats: SolveStats,
}

impl RunRecord {
    pub fn initial(&self) -> &RecordRow {
        &self.rows[0]
    }

    pub fn final_row(&self) -> &RecordRow {
        self.rows.last().expect("a record always holds the initial row")
    }

    /// Row at the step nearest to time `t`.
    pub fn at_time(&self, t: f64) -> Option<&RecordRow> {
        self.rows
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }

    pub fn max_mass_drift(&self) -> f64 {
        let m0 = self.initial().mass;
        self.rows.iter().fold(0.0, |m, r| m.max((r.mass - m0).abs()))
    }

    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.initial().energy;
        self.rows.iter().fold(0.0, |m, r| m.max((r.energy - e0).abs()))
    }
}

/// Runs one experiment from `t = 0` to `t_end`, recording invariants at every step.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunRecord> {
    spec.validate()?;
    let grid = spec.grid()?;
    let time = spec.time_config()?;
    let params = spec.params;
    let ops = assemble_operators(grid, params, spec.ic.boundary())?;
    let u0 = spec.ic.sample(&grid, &params)?;
    let exact = spec.ic.exact(&params);
    let x = grid.nodes();
    let h = grid.h;

    let snapshot_steps: Vec<usize> = spec
        .snapshot_times
        .iter()
        .map(|t| (t / time.tau).round() as usize)
        .collect();

    let mut stepper = Stepper::new(ops, spec.scheme, u0, time.tau, spec.nl)?;
    let mut rows: Vec<RecordRow> = Vec::with_capacity(time.n_steps + 1);
    let mut snapshots = Vec::new();
    let is_liep = spec.scheme == SchemeId::Liep;

    for step in 0..=time.n_steps {
        if step > 0 {
            stepper.advance()?;
        }
        let u = stepper.solution();
        let t = time.time(step);
        let (l2, linf) = match &exact {
            Some(f) if spec.report_every > 0 && step % spec.report_every == 0 => {
                let ex: Vec<f64> = x.iter().map(|&xj| f(xj, t)).collect();
                (Some(l2_error(u, &ex, h)?), Some(linf_error(u, &ex)?))
            }
            _ => (None, None),
        };
        if is_liep {
            // Close the previous row now that its successor level exists.
            if let (Some(prev), Some(e)) = (rows.last_mut(), stepper.energy()) {
                prev.energy = e;
            }
        }
        for _ in snapshot_steps.iter().filter(|&&s| s == step) {
            snapshots.push(Snapshot { t, u: u.0.clone() });
        }
        rows.push(RecordRow {
            step,
            t,
            mass: mass(u, h),
            energy: stepper.energy().unwrap_or(f64::NAN),
            cubic_energy: energy_cubic(u, h, &params),
            max_u: u.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            l2_error: l2,
            linf_error: linf,
        });
    }
    if is_liep {
        stepper.advance()?;
        let s = stepper.state();
        let up = s.u_prev.as_ref().expect("advanced state has history");
        let e = energy_liep(up, &s.u_curr, h, &params)?;
        rows.last_mut().expect("initial row exists").energy = e;
    }

    Ok(RunRecord {
        scheme: spec.scheme,
        energy_kind: spec.scheme.energy_kind(),
        x,
        rows,
        snapshots,
        stats: stepper.stats(),
    })
}

/// One refinement level of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepLevel {
    pub h: f64,
    pub tau: f64,
    pub l2: f64,
    pub linf: f64,
    /// Order relative to the previous (coarser) level.
    pub order_l2: Option<f64>,
    pub order_linf: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub scheme: SchemeId,
    pub params: ModelParams,
    pub c: f64,
    pub x_left: f64,
    pub x_right: f64,
    pub t_end: f64,
    /// Mesh widths; each level runs with `τ = h`.
    pub spacings: Vec<f64>,
    pub nl: NonlinearSolveConfig,
}

impl SweepSpec {
    /// `c = 1` on `[-40, 60]` to `T = 1` with `τ = h ∈ {0.2, 0.1, 0.05, 0.025, 0.0125}`.
    pub fn standard(scheme: SchemeId) -> Self {
        SweepSpec {
            scheme,
            params: ModelParams::default(),
            c: 1.0,
            x_left: -40.0,
            x_right: 60.0,
            t_end: 1.0,
            spacings: vec![0.2, 0.1, 0.05, 0.025, 0.0125],
            nl: NonlinearSolveConfig::default(),
        }
    }
}

pub fn convergence_sweep(sweep: &SweepSpec) -> Result<Vec<SweepLevel>> {
    let mut levels: Vec<SweepLevel> = Vec::with_capacity(sweep.spacings.len());
    for &h in &sweep.spacings {
        let grid = PeriodicGrid::with_spacing(sweep.x_left, sweep.x_right, h)?;
        let spec = ExperimentSpec {
            ic: InitialCondition::SingleSoliton { c: sweep.c, x0: 0.0 },
            params: sweep.params,
            x_left: sweep.x_left,
            x_right: sweep.x_right,
            n_cells: grid.n_cells,
            tau: h,
            t_end: sweep.t_end,
            scheme: sweep.scheme,
            nl: sweep.nl,
            report_every: 0,
            snapshot_times: Vec::new(),
        };
        let time = spec.time_config()?;
        let mut spec = spec;
        spec.report_every = time.n_steps.max(1);
        let record = run_experiment(&spec)?;
        let last = record.final_row();
        let (l2, linf) = (
            last.l2_error.expect("errors reported at the final step"),
            last.linf_error.expect("errors reported at the final step"),
        );
        let (order_l2, order_linf) = match levels.last() {
            Some(prev) => (
                Some(convergence_order(prev.l2, l2, prev.h, h)?),
                Some(convergence_order(prev.linf, linf, prev.h, h)?),
            ),
            None => (None, None),
        };
        levels.push(SweepLevel {
            h,
            tau: h,
            l2,
            linf,
            order_l2,
            order_linf,
        });
    }
    Ok(levels)
}

/// Least-squares slopes of `log(error)` against `log(h)` over all levels.
pub fn fitted_orders(levels: &[SweepLevel]) -> Result<(f64, f64)> {
    let lh: Vec<f64> = levels.iter().map(|l| l.h.ln()).collect();
    let l2: Vec<f64> = levels.iter().map(|l| l.l2.ln()).collect();
    let li: Vec<f64> = levels.iter().map(|l| l.linf.ln()).collect();
    Ok((least_squares_slope(&lh, &l2)?, least_squares_slope(&lh, &li)?))
}

/// Table row at one reporting time.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub l2: Option<f64>,
    pub linf: Option<f64>,
}

/// Rows at every reported step of a run (the rows with error norms, or
/// just the initial row when none were requested).
pub fn table_rows(record: &RunRecord) -> Vec<TableRow> {
    record
        .rows
        .iter()
        .filter(|r| r.step == 0 || r.l2_error.is_some())
        .map(|r| TableRow {
            t: r.t,
            mass: r.mass,
            energy: r.energy,
            l2: if r.step == 0 { None } else { r.l2_error },
            linf: if r.step == 0 { None } else { r.linf_error },
        })
        .collect()
}

/// Analytic mass and energy for a single-soliton spec.
pub fn analytic_row(spec: &ExperimentSpec) -> Option<(f64, f64)> {
    match spec.ic {
        InitialCondition::SingleSoliton { c, .. } => analytic_invariants(c, &spec.params)
            .ok()
            .map(|inv| (inv.mass, inv.energy)),
        _ => None,
    }
}
