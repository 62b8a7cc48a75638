//! Deterministic SIR dynamics with an importation term, driven by a phased
//! intervention path.
//!
//! State is `(S, I, R, C)` where `C` counts cumulative infections (seeds,
//! domestic transmission and importations). Imported cases enter `I`
//! directly without leaving `S`, so `S + I + R` grows exactly at the
//! importation rate. Deaths are `ifr * C`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rk4::rk4_step;

fn default_step_days() -> f64 {
    0.25
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpidemicParams {
    pub population: f64,
    pub initial_infected: f64,
    /// Baseline transmission rate per day.
    pub beta0: f64,
    /// Recovery rate per day.
    pub gamma: f64,
    /// Infection fatality ratio.
    pub ifr: f64,
    /// Baseline importations per day.
    pub import_rate: f64,
    pub horizon_days: u32,
    #[serde(default = "default_step_days")]
    pub step_days: f64,
}

impl EpidemicParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("population", self.population),
            ("initial_infected", self.initial_infected),
            ("beta0", self.beta0),
            ("gamma", self.gamma),
            ("ifr", self.ifr),
            ("import_rate", self.import_rate),
            ("step_days", self.step_days),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::validation(format!("epidemic.{name}"), "must be finite"));
            }
        }
        if self.population <= 0.0 {
            return Err(Error::validation(
                "epidemic.population",
                format!("must be > 0, got {}", self.population),
            ));
        }
        if !(0.0..=1.0).contains(&self.ifr) {
            return Err(Error::validation(
                "epidemic.ifr",
                format!("must lie in [0, 1], got {}", self.ifr),
            ));
        }
        for (name, v) in [
            ("beta0", self.beta0),
            ("gamma", self.gamma),
            ("import_rate", self.import_rate),
        ] {
            if v < 0.0 {
                return Err(Error::validation(
                    format!("epidemic.{name}"),
                    format!("must be >= 0, got {v}"),
                ));
            }
        }
        if self.initial_infected < 0.0 || self.initial_infected > self.population {
            return Err(Error::validation(
                "epidemic.initial_infected",
                format!("must lie in [0, population], got {}", self.initial_infected),
            ));
        }
        if self.horizon_days == 0 {
            return Err(Error::validation("epidemic.horizon_days", "must be a positive integer"));
        }
        if !(self.step_days > 0.0 && self.step_days <= 1.0) {
            return Err(Error::validation(
                "epidemic.step_days",
                format!("must lie in (0, 1], got {}", self.step_days),
            ));
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        f64::from(self.horizon_days)
    }
}

/// Fractional cuts applied to transmission and importation, indexed by
/// intervention intensity. Index 0 is "no intervention" and must be 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterventionEffect {
    pub contact_cut: Vec<f64>,
    pub import_cut: Vec<f64>,
}

impl InterventionEffect {
    pub fn alphabet_size(&self) -> usize {
        self.contact_cut.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.contact_cut.is_empty() {
            return Err(Error::validation(
                "effects.contact_cut",
                "must list at least intensity 0",
            ));
        }
        if self.contact_cut.len() != self.import_cut.len() {
            return Err(Error::validation(
                "effects.import_cut",
                format!(
                    "length {} differs from contact_cut length {}",
                    self.import_cut.len(),
                    self.contact_cut.len()
                ),
            ));
        }
        for (name, cuts) in [("contact_cut", &self.contact_cut), ("import_cut", &self.import_cut)] {
            let field = format!("effects.{name}");
            if cuts[0] != 0.0 {
                return Err(Error::validation(
                    field,
                    format!("intensity 0 must have cut 0, got {}", cuts[0]),
                ));
            }
            if let Some(v) = cuts.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::validation(field, format!("cuts must lie in [0, 1], got {v}")));
            }
            if cuts.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::validation(field, "cuts must be non-decreasing in intensity"));
            }
        }
        Ok(())
    }
}

/// Phase cut points in days. `boundaries.len() + 1` phases partition
/// `[0, horizon]`; phase `p` covers `[b[p-1], b[p])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSchedule {
    pub boundaries: Vec<f64>,
}

impl PhaseSchedule {
    pub fn new(boundaries: Vec<f64>, horizon: f64) -> Result<Self> {
        let schedule = PhaseSchedule { boundaries };
        schedule.validate(horizon)?;
        Ok(schedule)
    }

    pub fn validate(&self, horizon: f64) -> Result<()> {
        let b = &self.boundaries;
        if b.iter().any(|t| !t.is_finite()) {
            return Err(Error::validation("schedule.boundaries", "must be finite"));
        }
        if let (Some(first), Some(last)) = (b.first(), b.last()) {
            if *first <= 0.0 || *last >= horizon {
                return Err(Error::validation(
                    "schedule.boundaries",
                    format!("must lie strictly inside (0, {horizon}), got {b:?}"),
                ));
            }
        }
        if b.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation(
                "schedule.boundaries",
                format!("must be strictly increasing, got {b:?}"),
            ));
        }
        Ok(())
    }

    pub fn n_phases(&self) -> usize {
        self.boundaries.len() + 1
    }

    /// Zero-based phase containing time `t`.
    pub fn phase_at(&self, t: f64) -> usize {
        self.boundaries.partition_point(|&b| b <= t)
    }
}

/// Thresholds used to cut the baseline run into four phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Milestones {
    /// Prevalence `I / population` that marks the start of domestic spread.
    pub spread_threshold: f64,
    /// Fraction of the baseline peak below which new infections count as tail.
    pub tail_threshold: f64,
}

impl Milestones {
    pub fn validate(&self) -> Result<()> {
        if !(self.spread_threshold > 0.0 && self.spread_threshold < 1.0) {
            return Err(Error::validation(
                "schedule.milestones.spread_threshold",
                format!("must lie in (0, 1), got {}", self.spread_threshold),
            ));
        }
        if !(self.tail_threshold > 0.0 && self.tail_threshold < 1.0) {
            return Err(Error::validation(
                "schedule.milestones.tail_threshold",
                format!("must lie in (0, 1), got {}", self.tail_threshold),
            ));
        }
        Ok(())
    }
}

/// One intensity per phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InterventionPath(Vec<u8>);

impl InterventionPath {
    pub fn new(intensities: Vec<u8>, n_phases: usize, alphabet: usize) -> Result<Self> {
        let path = InterventionPath(intensities);
        path.check(n_phases, alphabet)?;
        Ok(path)
    }

    pub fn zeros(n_phases: usize) -> Self {
        InterventionPath(vec![0; n_phases])
    }

    pub(crate) fn from_vec_unchecked(v: Vec<u8>) -> Self {
        InterventionPath(v)
    }

    pub fn check(&self, n_phases: usize, alphabet: usize) -> Result<()> {
        if self.0.len() != n_phases {
            return Err(Error::validation(
                "path",
                format!("expected {n_phases} intensities (one per phase), got {}", self.0.len()),
            ));
        }
        if let Some(i) = self.0.iter().find(|&&i| usize::from(i) >= alphabet) {
            return Err(Error::validation(
                "path",
                format!("intensity {i} outside alphabet 0..{}", alphabet - 1),
            ));
        }
        Ok(())
    }

    pub fn intensities(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// First `keep` phases follow `self`, the rest are intensity 0.
    pub fn prefix(&self, keep: usize) -> Self {
        let v = self
            .0
            .iter()
            .enumerate()
            .map(|(p, &i)| if p < keep { i } else { 0 })
            .collect();
        InterventionPath(v)
    }

    pub fn with_phase(&self, phase: usize, intensity: u8) -> Self {
        let mut v = self.0.clone();
        v[phase] = intensity;
        InterventionPath(v)
    }
}

impl fmt::Display for InterventionPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl FromStr for InterventionPath {
    type Err = Error;

    /// Parses `"0,2,1,0"` (commas optional: `"0210"` also works).
    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<u8> = if s.contains(',') {
            s.split(',')
                .map(|tok| tok.trim().parse::<u8>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::validation("path", format!("cannot parse {s:?}: {e}")))?
        } else {
            s.trim()
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as u8))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::validation("path", format!("cannot parse {s:?}")))?
        };
        Ok(InterventionPath(digits))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub susceptible: f64,
    pub infected: f64,
    pub recovered: f64,
    pub cumulative_infections: f64,
}

impl State {
    fn to_array(self) -> [f64; 4] {
        [
            self.susceptible,
            self.infected,
            self.recovered,
            self.cumulative_infections,
        ]
    }

    fn from_array(y: [f64; 4]) -> Self {
        State {
            susceptible: y[0],
            infected: y[1],
            recovered: y[2],
            cumulative_infections: y[3],
        }
    }

    fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Sampled trajectory. One sample per integrator node, phase boundaries
/// included, final sample at the horizon.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub population: f64,
    pub ifr: f64,
    pub step_days: f64,
    pub times: Vec<f64>,
    pub susceptible: Vec<f64>,
    pub infected: Vec<f64>,
    pub recovered: Vec<f64>,
    pub new_infections: Vec<f64>,
    pub cumulative_infections: Vec<f64>,
    pub cumulative_deaths: Vec<f64>,
    pub intensity_at: Vec<u8>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn total_deaths(&self) -> f64 {
        self.cumulative_deaths.last().copied().unwrap_or(0.0)
    }

    fn push(&mut self, t: f64, state: &State, new_infections: f64, intensity: u8) {
        self.times.push(t);
        self.susceptible.push(state.susceptible);
        self.infected.push(state.infected);
        self.recovered.push(state.recovered);
        self.new_infections.push(new_infections);
        self.cumulative_infections.push(state.cumulative_infections);
        self.cumulative_deaths.push(self.ifr * state.cumulative_infections);
        self.intensity_at.push(intensity);
    }
}

#[derive(Debug, Clone, Copy)]
struct Rates {
    beta: f64,
    import: f64,
}

/// Precomputed time grid and phase spans for one (params, effects, schedule)
/// triple. Whole-path simulation and phase-by-phase stepping share the same
/// arithmetic, so both give bit-identical states.
#[derive(Debug, Clone)]
pub struct Engine {
    params: EpidemicParams,
    effects: InterventionEffect,
    schedule: PhaseSchedule,
    grid: Vec<f64>,
    /// Grid index range `[start, end]` of each phase.
    spans: Vec<(usize, usize)>,
}

impl Engine {
    pub fn new(params: EpidemicParams, effects: InterventionEffect, schedule: PhaseSchedule) -> Result<Self> {
        params.validate()?;
        effects.validate()?;
        schedule.validate(params.horizon())?;
        let grid = time_grid(params.horizon(), params.step_days, &schedule.boundaries);
        let mut cuts = vec![0usize];
        for b in &schedule.boundaries {
            // boundaries are inserted into the grid, so this lookup is exact
            let k = grid.partition_point(|t| t < b);
            cuts.push(k);
        }
        cuts.push(grid.len() - 1);
        let spans = cuts.windows(2).map(|w| (w[0], w[1])).collect();
        Ok(Engine {
            params,
            effects,
            schedule,
            grid,
            spans,
        })
    }

    pub fn params(&self) -> &EpidemicParams {
        &self.params
    }

    pub fn effects(&self) -> &InterventionEffect {
        &self.effects
    }

    pub fn schedule(&self) -> &PhaseSchedule {
        &self.schedule
    }

    pub fn n_phases(&self) -> usize {
        self.schedule.n_phases()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn initial_state(&self) -> State {
        let i0 = self.params.initial_infected;
        State {
            susceptible: self.params.population - i0,
            infected: i0,
            recovered: 0.0,
            cumulative_infections: i0,
        }
    }

    fn rates(&self, intensity: u8) -> Rates {
        let i = usize::from(intensity);
        Rates {
            beta: self.params.beta0 * (1.0 - self.effects.contact_cut[i]),
            import: self.params.import_rate * (1.0 - self.effects.import_cut[i]),
        }
    }

    fn incidence(&self, state: &State, rates: Rates) -> f64 {
        rates.beta * state.susceptible * state.infected / self.params.population + rates.import
    }

    /// Instantaneous derivative of `(S, I, R, C)`.
    fn derivative(&self, y: &[f64; 4], rates: Rates) -> [f64; 4] {
        let transmission = rates.beta * y[0] * y[1] / self.params.population;
        let recovery = self.params.gamma * y[1];
        [
            -transmission,
            transmission + rates.import - recovery,
            recovery,
            transmission + rates.import,
        ]
    }

    /// Advances `state` across one phase at fixed `intensity`. When `sink` is
    /// given, the state at every grid node of the phase (excluding its end
    /// point) is recorded.
    pub fn run_phase(
        &self,
        phase: usize,
        intensity: u8,
        mut state: State,
        mut sink: Option<&mut Trajectory>,
    ) -> Result<State> {
        let rates = self.rates(intensity);
        let (start, end) = self.spans[phase];
        for k in start..end {
            let t = self.grid[k];
            if let Some(traj) = sink.as_deref_mut() {
                traj.push(t, &state, self.incidence(&state, rates), intensity);
            }
            let dt = self.grid[k + 1] - t;
            let y = rk4_step(&state.to_array(), dt, |y| self.derivative(y, rates));
            state = State::from_array(y);
            if !state.is_finite() {
                return Err(Error::Integration { step: k, time: t });
            }
        }
        Ok(state)
    }

    pub fn simulate(&self, path: &InterventionPath) -> Result<Trajectory> {
        path.check(self.n_phases(), self.effects.alphabet_size())?;
        let mut traj = Trajectory {
            population: self.params.population,
            ifr: self.params.ifr,
            step_days: self.params.step_days,
            ..Trajectory::default()
        };
        let mut state = self.initial_state();
        for (phase, &intensity) in path.intensities().iter().enumerate() {
            state = self.run_phase(phase, intensity, state, Some(&mut traj))?;
        }
        let last = *path.intensities().last().expect("at least one phase");
        let rates = self.rates(last);
        traj.push(self.params.horizon(), &state, self.incidence(&state, rates), last);
        Ok(traj)
    }

    /// State at the horizon, without recording samples.
    pub fn final_state(&self, path: &InterventionPath) -> Result<State> {
        path.check(self.n_phases(), self.effects.alphabet_size())?;
        let mut state = self.initial_state();
        for (phase, &intensity) in path.intensities().iter().enumerate() {
            state = self.run_phase(phase, intensity, state, None)?;
        }
        Ok(state)
    }

    /// Cumulative deaths at the horizon.
    pub fn deaths(&self, path: &InterventionPath) -> Result<f64> {
        Ok(self.deaths_of(&self.final_state(path)?))
    }

    pub fn deaths_of(&self, state: &State) -> f64 {
        self.params.ifr * state.cumulative_infections
    }
}

/// Multiples of `step` up to `horizon`, plus the horizon itself and every
/// phase boundary.
fn time_grid(horizon: f64, step: f64, boundaries: &[f64]) -> Vec<f64> {
    let n = (horizon / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|k| k as f64 * step).filter(|&t| t < horizon).collect();
    grid.extend_from_slice(boundaries);
    grid.push(horizon);
    grid.sort_by(f64::total_cmp);
    // keep exact boundary values when they sit within rounding of a grid node
    let mut out: Vec<f64> = Vec::with_capacity(grid.len());
    for t in grid {
        match out.last_mut() {
            Some(prev) if (t - *prev).abs() < 1e-9 => {
                if boundaries.contains(&t) || t == horizon {
                    *prev = t;
                }
            }
            _ => out.push(t),
        }
    }
    out
}

pub fn simulate(
    params: &EpidemicParams,
    effects: &InterventionEffect,
    schedule: &PhaseSchedule,
    path: &InterventionPath,
) -> Result<Trajectory> {
    Engine::new(params.clone(), effects.clone(), schedule.clone())?.simulate(path)
}

/// Trajectory with no intervention in any phase.
pub fn baseline(params: &EpidemicParams, effects: &InterventionEffect, schedule: &PhaseSchedule) -> Result<Trajectory> {
    simulate(params, effects, schedule, &InterventionPath::zeros(schedule.n_phases()))
}

/// Cuts the horizon into four phases from the baseline run: start of domestic
/// spread, baseline peak, and onset of the tail.
pub fn derive_schedule(
    params: &EpidemicParams,
    effects: &InterventionEffect,
    milestones: &Milestones,
) -> Result<PhaseSchedule> {
    milestones.validate()?;
    let single = PhaseSchedule { boundaries: vec![] };
    let traj = baseline(params, effects, &single)?;
    let stats = peak_stats(&traj);
    if stats.peak_height <= 0.0 || stats.local_maxima == 0 {
        return Err(Error::ScheduleDerivation("baseline epidemic never peaks".into()));
    }
    if stats.local_maxima > 1 {
        return Err(Error::ScheduleDerivation(format!(
            "baseline has {} local maxima, expected a single peak",
            stats.local_maxima
        )));
    }
    let n = params.population;
    let t1 = traj
        .times
        .iter()
        .zip(&traj.infected)
        .find(|(_, &i)| i / n >= milestones.spread_threshold)
        .map(|(&t, _)| t)
        .ok_or_else(|| Error::ScheduleDerivation("prevalence never reaches spread_threshold".into()))?;
    let k_peak = argmax(&traj.new_infections);
    let t2 = traj.times[k_peak];
    let floor = milestones.tail_threshold * stats.peak_height;
    let t3 = (k_peak..traj.len())
        .find(|&k| traj.new_infections[k] < floor)
        .map(|k| traj.times[k])
        .ok_or_else(|| Error::ScheduleDerivation("new infections never fall below tail_threshold".into()))?;
    let horizon = params.horizon();
    if !(0.0 < t1 && t1 < t2 && t2 < t3 && t3 < horizon) {
        return Err(Error::ScheduleDerivation(format!(
            "milestones out of order: t1={t1}, t2={t2}, t3={t3}, horizon={horizon}"
        )));
    }
    PhaseSchedule::new(vec![t1, t2, t3], horizon)
}

/// First index of the maximum.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (k, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = k;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakStats {
    pub peak_time: f64,
    pub peak_height: f64,
    pub second_peak_time: Option<f64>,
    pub second_peak_height: f64,
    pub local_maxima: usize,
    pub attack_rate: f64,
    pub total_deaths: f64,
}

/// Half-width (in samples) of the strict-monotonicity window used to call a
/// local maximum: one day's worth of steps.
pub fn peak_window(step_days: f64) -> usize {
    ((1.0 / step_days).round() as usize).max(1)
}

/// Indices `k` where `v` rises strictly over the `w` samples before `k` and
/// falls strictly over the `w` samples after.
pub fn local_maxima(v: &[f64], w: usize) -> Vec<usize> {
    if v.len() < 2 * w + 1 {
        return Vec::new();
    }
    (w..v.len() - w)
        .filter(|&k| (k - w..k).all(|j| v[j] < v[j + 1]) && (k..k + w).all(|j| v[j] > v[j + 1]))
        .collect()
}

pub fn peak_stats(traj: &Trajectory) -> PeakStats {
    let total_deaths = traj.total_deaths();
    let attack_rate = traj.cumulative_infections.last().copied().unwrap_or(0.0) / traj.population;
    if traj.is_empty() {
        return PeakStats {
            peak_time: 0.0,
            peak_height: 0.0,
            second_peak_time: None,
            second_peak_height: 0.0,
            local_maxima: 0,
            attack_rate: 0.0,
            total_deaths: 0.0,
        };
    }
    let k = argmax(&traj.new_infections);
    let maxima = local_maxima(&traj.new_infections, peak_window(traj.step_days));
    let second = maxima
        .iter()
        .filter(|&&j| j > k)
        .max_by(|&&a, &&b| traj.new_infections[a].total_cmp(&traj.new_infections[b]));
    PeakStats {
        peak_time: traj.times[k],
        peak_height: traj.new_infections[k],
        second_peak_time: second.map(|&j| traj.times[j]),
        second_peak_height: second.map_or(0.0, |&j| traj.new_infections[j]),
        local_maxima: maxima.len(),
        attack_rate,
        total_deaths,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn params() -> EpidemicParams {
        EpidemicParams {
            population: 1e6,
            initial_infected: 10.0,
            beta0: 0.3,
            gamma: 0.1,
            ifr: 0.005,
            import_rate: 1.0,
            horizon_days: 200,
            step_days: 0.25,
        }
    }

    fn effects() -> InterventionEffect {
        InterventionEffect {
            contact_cut: vec![0.0, 0.4, 0.75],
            import_cut: vec![0.0, 0.9, 0.95],
        }
    }

    fn four_phase() -> PhaseSchedule {
        PhaseSchedule::new(vec![20.0, 50.0, 90.0], 200.0).unwrap()
    }

    #[test]
    fn no_transmission_seed_deaths() {
        let p = EpidemicParams {
            beta0: 0.0,
            import_rate: 0.0,
            initial_infected: 10.0,
            ifr: 0.01,
            ..params()
        };
        let traj = baseline(&p, &effects(), &four_phase()).unwrap();
        assert!((traj.total_deaths() - 0.1).abs() < 1e-12);
        assert!(traj.new_infections.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn zero_ifr_means_zero_deaths() {
        let p = EpidemicParams { ifr: 0.0, ..params() };
        for s in ["0,0,0,0", "2,2,2,2", "0,2,1,0"] {
            let traj = simulate(&p, &effects(), &four_phase(), &s.parse().unwrap()).unwrap();
            assert!(traj.cumulative_deaths.iter().all(|&d| d == 0.0));
        }
    }

    #[test]
    fn wrong_path_length_is_validation_error() {
        let err = simulate(&params(), &effects(), &four_phase(), &"0,1,2".parse().unwrap()).unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
        assert!(err.to_string().contains("expected 4"));
    }

    #[test]
    fn overflow_reports_step() {
        let p = EpidemicParams {
            beta0: 1e300,
            population: 1.0,
            initial_infected: 0.5,
            ..params()
        };
        let err = baseline(&p, &effects(), &four_phase()).unwrap_err();
        assert!(matches!(err, Error::Integration { step: 0, .. }), "{err}");
    }

    #[test]
    fn baseline_equals_all_zero_path() {
        let a = baseline(&params(), &effects(), &four_phase()).unwrap();
        let b = simulate(&params(), &effects(), &four_phase(), &InterventionPath::zeros(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_contains_boundaries_and_horizon() {
        let g = time_grid(10.0, 0.3, &[1.0, 4.45]);
        assert_eq!(*g.last().unwrap(), 10.0);
        assert!(g.contains(&1.0) && g.contains(&4.45));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn phase_at_is_left_closed() {
        let s = four_phase();
        assert_eq!(s.phase_at(0.0), 0);
        assert_eq!(s.phase_at(19.99), 0);
        assert_eq!(s.phase_at(20.0), 1);
        assert_eq!(s.phase_at(90.0), 3);
        assert_eq!(s.phase_at(200.0), 3);
    }

    #[test]
    fn schedule_rejects_unordered() {
        assert!(PhaseSchedule::new(vec![20.0, 10.0, 90.0], 200.0).is_err());
        assert!(PhaseSchedule::new(vec![0.0, 10.0, 90.0], 200.0).is_err());
        assert!(PhaseSchedule::new(vec![10.0, 20.0, 200.0], 200.0).is_err());
    }

    #[test]
    fn effects_validation() {
        let mut e = effects();
        e.contact_cut[0] = 0.1;
        assert!(e.validate().is_err());
        let mut e = effects();
        e.import_cut = vec![0.0, 0.9, 0.5];
        assert!(e.validate().is_err());
        let mut e = effects();
        e.contact_cut[2] = 1.5;
        assert!(e.validate().is_err());
    }

    #[test]
    fn path_parsing() {
        let p: InterventionPath = "0,2,1,0".parse().unwrap();
        assert_eq!(p.intensities(), &[0, 2, 1, 0]);
        assert_eq!(p.to_string(), "0,2,1,0");
        assert_eq!("0210".parse::<InterventionPath>().unwrap(), p);
        assert!("0,x".parse::<InterventionPath>().is_err());
        assert!(InterventionPath::new(vec![0, 3, 0, 0], 4, 3).is_err());
        assert_eq!(p.prefix(2).intensities(), &[0, 2, 0, 0]);
    }

    #[test]
    fn flat_curve_has_no_peaks() {
        let traj = Trajectory {
            population: 1.0,
            step_days: 0.25,
            times: (0..20).map(|k| k as f64).collect(),
            new_infections: vec![0.0; 20],
            cumulative_infections: vec![0.0; 20],
            cumulative_deaths: vec![0.0; 20],
            ..Trajectory::default()
        };
        let s = peak_stats(&traj);
        assert_eq!(s.peak_height, 0.0);
        assert_eq!(s.second_peak_height, 0.0);
        assert_eq!(s.local_maxima, 0);
    }

    #[test]
    fn local_maxima_window() {
        let v = [0.0, 1.0, 2.0, 3.0, 2.0, 1.0, 0.0, 1.0, 0.5, 0.0];
        assert_eq!(local_maxima(&v, 1), vec![3, 7]);
        assert_eq!(local_maxima(&v, 2), vec![3]);
        // plateau is not a strict maximum
        assert!(local_maxima(&[0.0, 1.0, 1.0, 0.0], 1).is_empty());
    }

    #[test]
    fn derive_fails_without_epidemic() {
        let p = EpidemicParams {
            beta0: 0.0,
            import_rate: 0.0,
            ..params()
        };
        let m = Milestones {
            spread_threshold: 1e-3,
            tail_threshold: 0.05,
        };
        let err = derive_schedule(&p, &effects(), &m).unwrap_err();
        assert!(matches!(err, Error::ScheduleDerivation(_)));
        assert!(err.to_string().contains("boundaries"));
    }

    #[test]
    fn derived_schedule_is_ordered_and_t2_is_peak() {
        let m = Milestones {
            spread_threshold: 1e-3,
            tail_threshold: 0.05,
        };
        let s = derive_schedule(&params(), &effects(), &m).unwrap();
        let b = &s.boundaries;
        assert!(0.0 < b[0] && b[0] < b[1] && b[1] < b[2] && b[2] < 200.0);
        let traj = baseline(&params(), &effects(), &s).unwrap();
        let k = argmax(&traj.new_infections);
        assert_eq!(traj.times[k], b[1]);
    }

    #[test]
    fn conservation_matches_import_inflow() {
        // d(S+I+R)/dt = import rate exactly, so over any interval the total
        // grows by the integral of the (piecewise constant) importation.
        let e = effects();
        let s = four_phase();
        let path: InterventionPath = "1,2,0,1".parse().unwrap();
        let traj = simulate(&params(), &e, &s, &path).unwrap();
        for k in 0..traj.len() - 1 {
            let dt = traj.times[k + 1] - traj.times[k];
            let i = usize::from(traj.intensity_at[k]);
            let inflow = params().import_rate * (1.0 - e.import_cut[i]) * dt;
            let before = traj.susceptible[k] + traj.infected[k] + traj.recovered[k];
            let after = traj.susceptible[k + 1] + traj.infected[k + 1] + traj.recovered[k + 1];
            assert!(((after - before) - inflow).abs() <= 1e-9 * after, "step {k}");
        }
    }
}
