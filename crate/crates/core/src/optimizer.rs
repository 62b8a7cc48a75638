//! Search over intervention paths for the minimum combined loss.
//!
//! Paths are ranked by `(cpl, path)` so ties resolve to the lexicographically
//! smaller intensity vector regardless of evaluation order.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::epidemic::{InterventionPath, State};
use crate::error::{Error, Result};
use crate::loss::{combined, combined_loss, IncomeLedger, LossBreakdown};
use crate::model::Model;

pub const MAX_PATHS: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[serde(rename = "enum")]
    Enumeration,
    Dp,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enum" | "enumeration" => Ok(Method::Enumeration),
            "dp" => Ok(Method::Dp),
            other => Err(Error::validation(
                "method",
                format!("expected enum or dp, got {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedPath {
    pub path: InterventionPath,
    pub el: f64,
    pub tsl: f64,
    pub cpl: f64,
}

fn rank_order(a: &RankedPath, b: &RankedPath) -> Ordering {
    a.cpl.total_cmp(&b.cpl).then_with(|| a.path.cmp(&b.path))
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizationResult {
    pub method: Method,
    pub best_path: InterventionPath,
    pub best_loss: LossBreakdown,
    /// Every evaluated path, best first.
    pub ranking: Vec<RankedPath>,
}

pub fn path_space_size(n_phases: usize, alphabet: usize) -> Result<u128> {
    let size = (alphabet as u128).checked_pow(n_phases as u32).unwrap_or(u128::MAX);
    if size > MAX_PATHS {
        return Err(Error::Capacity { size, limit: MAX_PATHS });
    }
    Ok(size)
}

/// All paths in lexicographic order.
pub fn all_paths(n_phases: usize, alphabet: usize) -> Vec<InterventionPath> {
    let mut out = vec![Vec::with_capacity(n_phases)];
    for _ in 0..n_phases {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..alphabet as u8).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(InterventionPath::from_vec_unchecked).collect()
}

/// Economic loss and deaths for one path, stepping phase by phase.
pub fn evaluate(model: &Model, path: &InterventionPath) -> Result<RankedPath> {
    model.check_path(path)?;
    let engine = model.engine();
    let mut state = engine.initial_state();
    let mut income = IncomeLedger::default();
    for (phase, &i) in path.intensities().iter().enumerate() {
        state = engine.run_phase(phase, i, state, None)?;
        income.add_days(model.econ(), i, model.days_in_phase(phase));
    }
    Ok(leaf(model, path.clone(), &state, &income))
}

fn leaf(model: &Model, path: InterventionPath, state: &State, income: &IncomeLedger) -> RankedPath {
    let tsl = model.engine().deaths_of(state);
    let el = income.economic_loss;
    RankedPath {
        path,
        el,
        tsl,
        cpl: combined(el, model.lambda(), tsl),
    }
}

fn finish(model: &Model, method: Method, mut ranking: Vec<RankedPath>) -> Result<OptimizationResult> {
    ranking.sort_by(rank_order);
    let best_path = ranking[0].path.clone();
    let best_loss = combined_loss(model, &best_path)?;
    Ok(OptimizationResult {
        method,
        best_path,
        best_loss,
        ranking,
    })
}

/// Evaluates every path in parallel and ranks them.
pub fn optimize_enumerate(model: &Model) -> Result<OptimizationResult> {
    path_space_size(model.n_phases(), model.alphabet())?;
    let ranking = all_paths(model.n_phases(), model.alphabet())
        .par_iter()
        .map(|p| evaluate(model, p))
        .collect::<Result<Vec<_>>>()?;
    finish(model, Method::Enumeration, ranking)
}

/// Backward recursion over the tree of phase-boundary states. Each node holds
/// the exact epidemic state and income ledger reached by its prefix, so every
/// phase segment is integrated once per distinct prefix and leaf costs match
/// [`evaluate`] bit for bit.
///
/// Above [`MAX_PATHS`] the full ranking is not kept; the result then ranks
/// only the optimum.
pub fn optimize_dp(model: &Model) -> Result<OptimizationResult> {
    let keep_all = path_space_size(model.n_phases(), model.alphabet()).is_ok();
    let mut leaves = Vec::new();
    let mut prefix = Vec::with_capacity(model.n_phases());
    let best = descend(
        model,
        0,
        model.engine().initial_state(),
        IncomeLedger::default(),
        &mut prefix,
        keep_all.then_some(&mut leaves),
    )?;
    if !keep_all {
        leaves.push(best.clone());
    }
    let result = finish(model, Method::Dp, leaves)?;
    debug_assert_eq!(result.best_path, best.path);
    Ok(result)
}

fn descend(
    model: &Model,
    phase: usize,
    state: State,
    income: IncomeLedger,
    prefix: &mut Vec<u8>,
    mut leaves: Option<&mut Vec<RankedPath>>,
) -> Result<RankedPath> {
    if phase == model.n_phases() {
        let node = leaf(
            model,
            InterventionPath::from_vec_unchecked(prefix.clone()),
            &state,
            &income,
        );
        if let Some(leaves) = leaves {
            leaves.push(node.clone());
        }
        return Ok(node);
    }
    let mut best: Option<RankedPath> = None;
    for i in 0..model.alphabet() as u8 {
        let next_state = model.engine().run_phase(phase, i, state, None)?;
        let mut next_income = income;
        next_income.add_days(model.econ(), i, model.days_in_phase(phase));
        prefix.push(i);
        let child = descend(model, phase + 1, next_state, next_income, prefix, leaves.as_deref_mut())?;
        prefix.pop();
        // children arrive in lexicographic order, so strict < keeps the
        // smaller path on ties
        if best.as_ref().is_none_or(|b| child.cpl < b.cpl) {
            best = Some(child);
        }
    }
    Ok(best.expect("alphabet is non-empty"))
}

pub fn optimize(model: &Model, method: Method) -> Result<OptimizationResult> {
    match method {
        Method::Enumeration => optimize_enumerate(model),
        Method::Dp => optimize_dp(model),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    /// One-based phase number.
    pub phase: usize,
    pub alt_intensity: u8,
    pub delta_cpl: f64,
}

/// CPL change from every single-phase deviation. An optimal path has no
/// negative entry.
pub fn deviation_check(model: &Model, path: &InterventionPath) -> Result<Vec<Deviation>> {
    let base = evaluate(model, path)?;
    let mut out = Vec::new();
    for phase in 0..path.len() {
        for alt in 0..model.alphabet() as u8 {
            if alt == path.intensities()[phase] {
                continue;
            }
            let other = evaluate(model, &path.with_phase(phase, alt))?;
            out.push(Deviation {
                phase: phase + 1,
                alt_intensity: alt,
                delta_cpl: other.cpl - base.cpl,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub lambda: f64,
    pub path: InterventionPath,
    pub el: f64,
    pub tsl: f64,
    pub cpl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaSweep {
    pub lambda_grid: Vec<f64>,
    pub entries: Vec<SweepEntry>,
}

/// Optimal path at each value of a death. Simulations do not depend on
/// lambda, so every path is evaluated once and re-ranked per grid point.
pub fn lambda_sweep(model: &Model, grid: &[f64]) -> Result<LambdaSweep> {
    if grid.is_empty() {
        return Err(Error::validation("lambdas", "grid must not be empty"));
    }
    if grid.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(Error::validation("lambdas", "values must be finite and >= 0"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::validation("lambdas", "grid must be strictly ascending"));
    }
    path_space_size(model.n_phases(), model.alphabet())?;
    let evaluated = all_paths(model.n_phases(), model.alphabet())
        .par_iter()
        .map(|p| evaluate(model, p))
        .collect::<Result<Vec<_>>>()?;
    let entries = grid
        .iter()
        .map(|&lambda| {
            let best = evaluated
                .iter()
                .map(|r| RankedPath {
                    cpl: combined(r.el, lambda, r.tsl),
                    ..r.clone()
                })
                .min_by(rank_order)
                .expect("path space is non-empty");
            SweepEntry {
                lambda,
                path: best.path,
                el: best.el,
                tsl: best.tsl,
                cpl: best.cpl,
            }
        })
        .collect();
    Ok(LambdaSweep {
        lambda_grid: grid.to_vec(),
        entries,
    })
}
