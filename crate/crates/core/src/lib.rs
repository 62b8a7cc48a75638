//! Epidemic intervention paths, their economic and social losses, and the
//! fiscal ledgers that finance them.
//!
//! The pieces compose in one direction: a [`Scenario`] resolves into a
//! [`Model`]; the model simulates paths ([`epidemic`]), prices them
//! ([`loss`]) and ranks them ([`optimizer`]). [`debt`] is independent.

pub mod debt;
pub mod epidemic;
pub mod error;
pub mod loss;
pub mod model;
pub mod optimizer;
pub mod report;
pub mod rk4;
pub mod scenario;

pub use debt::{compare_financing, run_ledger, Financing, FinancingComparison, GenerationalLedger, LedgerConfig};
pub use epidemic::{
    derive_schedule, peak_stats, Engine, EpidemicParams, InterventionEffect, InterventionPath, Milestones,
    PhaseSchedule, State, Trajectory,
};
pub use error::{Error, Result};
pub use loss::{combined_loss, EconomicParams, LossBreakdown};
pub use model::Model;
pub use optimizer::{lambda_sweep, optimize, Method, OptimizationResult};
pub use scenario::{load_scenario, Scenario, ScheduleSpec};
