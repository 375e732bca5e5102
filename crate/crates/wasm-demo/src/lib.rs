//! Browser bindings: step a preset in time, read back the profile and its
//! invariants, and run a small convergence study.

use rlw_core::experiments::{convergence_sweep, fitted_orders, ExperimentSpec, InitialCondition, SweepSpec};
use rlw_core::{assemble_operators, mass, ModelParams, RlwError, SchemeId, Stepper};
use wasm_bindgen::prelude::*;

fn js(e: RlwError) -> JsError {
    JsError::new(&e.to_string())
}

fn preset(name: &str, scheme: SchemeId) -> Result<ExperimentSpec, RlwError> {
    let spec = match name {
        "soliton" => ExperimentSpec {
            ic: InitialCondition::SingleSoliton { c: 1.0, x0: 0.0 },
            t_end: 30.0,
            ..ExperimentSpec::single_soliton_table(scheme)
        },
        "table" => ExperimentSpec::single_soliton_table(scheme),
        "three_wave" => ExperimentSpec::three_wave(scheme),
        "maxwellian" => ExperimentSpec::maxwellian(scheme, 0.01),
        "bore" => ExperimentSpec::undular_bore(scheme, 2.0),
        other => return Err(RlwError::invalid("preset", format!("unknown preset `{other}`"))),
    };
    Ok(spec)
}

#[wasm_bindgen]
pub struct Simulation {
    stepper: Stepper,
    ic: InitialCondition,
    params: ModelParams,
    x: Vec<f64>,
    mass0: f64,
    energy0: Option<f64>,
}

#[wasm_bindgen]
impl Simulation {
    /// `preset` is one of `soliton`, `table`, `three_wave`, `maxwellian`, `bore`.
    #[wasm_bindgen(constructor)]
    pub fn new(preset_name: &str, scheme: &str) -> Result<Simulation, JsError> {
        let scheme: SchemeId = scheme.parse().map_err(js)?;
        let spec = preset(preset_name, scheme).map_err(js)?;
        Simulation::from_spec(&spec).map_err(js)
    }

    pub fn advance(&mut self, steps: usize) -> Result<(), JsError> {
        for _ in 0..steps {
            self.stepper.advance().map_err(js)?;
            if self.energy0.is_none() {
                self.energy0 = self.stepper.energy();
            }
        }
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.stepper.time()
    }

    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    pub fn u(&self) -> Vec<f64> {
        self.stepper.solution().0.clone()
    }

    /// Exact profile at the current time, empty when none is known.
    pub fn exact(&self) -> Vec<f64> {
        let t = self.time();
        match self.ic.exact(&self.params) {
            Some(f) => self.x.iter().map(|&x| f(x, t)).collect(),
            None => Vec::new(),
        }
    }

    pub fn mass_drift(&self) -> f64 {
        mass(self.stepper.solution(), self.stepper.ops().h()) - self.mass0
    }

    /// Drift of the scheme's own energy; zero until the energy is defined.
    pub fn energy_drift(&self) -> f64 {
        match (self.energy0, self.stepper.energy()) {
            (Some(e0), Some(e)) => e - e0,
            _ => 0.0,
        }
    }

    pub fn linear_solves(&self) -> usize {
        self.stepper.stats().linear_solves()
    }
}

impl Simulation {
    pub fn from_spec(spec: &ExperimentSpec) -> Result<Simulation, RlwError> {
        spec.validate()?;
        let grid = spec.grid()?;
        let ops = assemble_operators(grid, spec.params, spec.ic.boundary())?;
        let u0 = spec.ic.sample(&grid, &spec.params)?;
        let mass0 = mass(&u0, grid.h);
        let stepper = Stepper::new(ops, spec.scheme, u0, spec.tau, spec.nl)?;
        let energy0 = stepper.energy();
        Ok(Simulation {
            stepper,
            ic: spec.ic.clone(),
            params: spec.params,
            x: grid.nodes(),
            mass0,
            energy0,
        })
    }
}

/// Errors at `T = 1` for `τ = h = 0.2, 0.1, ...`: returns
/// `[h, L2, Linf]` per level followed by the fitted `[order_L2, order_Linf]`.
#[wasm_bindgen]
pub fn convergence_study(scheme: &str, levels: usize) -> Result<Vec<f64>, JsError> {
    let scheme: SchemeId = scheme.parse().map_err(js)?;
    study(scheme, levels).map_err(js)
}

pub fn study(scheme: SchemeId, levels: usize) -> Result<Vec<f64>, RlwError> {
    if !(2..=5).contains(&levels) {
        return Err(RlwError::invalid("levels", "must be between 2 and 5"));
    }
    let mut sweep = SweepSpec::standard(scheme);
    sweep.spacings.truncate(levels);
    let rows = convergence_sweep(&sweep)?;
    let (o2, oi) = fitted_orders(&rows)?;
    let mut out: Vec<f64> = rows.iter().flat_map(|l| [l.h, l.l2, l.linf]).collect();
    out.extend([o2, oi]);
    Ok(out)
}
