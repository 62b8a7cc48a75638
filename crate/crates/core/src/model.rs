use crate::epidemic::{Engine, EpidemicParams, InterventionEffect, InterventionPath, PhaseSchedule};
use crate::error::{Error, Result};
use crate::loss::EconomicParams;

/// A fully resolved epidemic-economy world: dynamics, a frozen phase
/// schedule and the economic valuation.
#[derive(Debug, Clone)]
pub struct Model {
    engine: Engine,
    econ: EconomicParams,
    /// Whole days of the horizon falling in each phase. Day `d` belongs to
    /// the phase containing time `d`.
    phase_days: Vec<u32>,
}

impl Model {
    pub fn new(
        params: EpidemicParams,
        effects: InterventionEffect,
        schedule: PhaseSchedule,
        econ: EconomicParams,
    ) -> Result<Self> {
        econ.validate()?;
        if effects.alphabet_size() != EconomicParams::LEVELS {
            return Err(Error::validation(
                "effects.contact_cut",
                format!(
                    "{} intensity levels given but incomes are defined for {}",
                    effects.alphabet_size(),
                    EconomicParams::LEVELS
                ),
            ));
        }
        let engine = Engine::new(params, effects, schedule)?;
        let mut phase_days = vec![0u32; engine.n_phases()];
        for d in 0..engine.params().horizon_days {
            phase_days[engine.schedule().phase_at(f64::from(d))] += 1;
        }
        Ok(Model {
            engine,
            econ,
            phase_days,
        })
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn econ(&self) -> &EconomicParams {
        &self.econ
    }

    pub fn schedule(&self) -> &PhaseSchedule {
        self.engine.schedule()
    }

    pub fn n_phases(&self) -> usize {
        self.engine.n_phases()
    }

    pub fn alphabet(&self) -> usize {
        self.engine.effects().alphabet_size()
    }

    pub fn lambda(&self) -> f64 {
        self.econ.lambda
    }

    pub fn days_in_phase(&self, phase: usize) -> u32 {
        self.phase_days[phase]
    }

    /// Same world, different value of a death.
    pub fn with_lambda(&self, lambda: f64) -> Result<Model> {
        let mut m = self.clone();
        m.econ.lambda = lambda;
        m.econ.validate()?;
        Ok(m)
    }

    pub fn check_path(&self, path: &InterventionPath) -> Result<()> {
        path.check(self.n_phases(), self.alphabet())
    }
}
