//! Social loss, economic loss and their combination.

use serde::{Deserialize, Serialize};

use crate::epidemic::{InterventionEffect, InterventionPath};
use crate::error::{Error, Result};
use crate::model::Model;

/// Daily income under each intervention level, and the currency value of one
/// death.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomicParams {
    /// Income per day with no intervention.
    pub y_peace: f64,
    /// Income per day under intensity 1.
    pub y_moral: f64,
    /// Income per day on the first day of a lockdown (intensity 2).
    pub y_min: f64,
    /// Per-day rise of the lockdown income floor over consecutive lockdown
    /// days. The floor never exceeds `y_moral`.
    #[serde(default)]
    pub escalation_rate: f64,
    /// Currency value of one death.
    pub lambda: f64,
}

impl EconomicParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("y_peace", self.y_peace),
            ("y_moral", self.y_moral),
            ("y_min", self.y_min),
            ("escalation_rate", self.escalation_rate),
            ("lambda", self.lambda),
        ] {
            if !v.is_finite() {
                return Err(Error::validation(format!("econ.{name}"), "must be finite"));
            }
        }
        if !(self.y_peace >= self.y_moral && self.y_moral >= self.y_min && self.y_min >= 0.0) {
            return Err(Error::validation(
                "econ.y_min",
                format!(
                    "incomes must satisfy y_peace >= y_moral >= y_min >= 0, got {} / {} / {}",
                    self.y_peace, self.y_moral, self.y_min
                ),
            ));
        }
        if self.lambda < 0.0 {
            return Err(Error::validation(
                "econ.lambda",
                format!("must be >= 0, got {}", self.lambda),
            ));
        }
        if self.escalation_rate < 0.0 {
            return Err(Error::validation(
                "econ.escalation_rate",
                format!("must be >= 0, got {}", self.escalation_rate),
            ));
        }
        Ok(())
    }

    /// Number of intensity levels with a defined income.
    pub const LEVELS: usize = 3;

    /// Income on a day at `intensity`, where `lockdown_streak` counts the
    /// consecutive lockdown days before this one.
    pub fn daily_income(&self, intensity: u8, lockdown_streak: u32) -> f64 {
        match intensity {
            0 => self.y_peace,
            1 => self.y_moral,
            _ => (self.y_min + self.escalation_rate * f64::from(lockdown_streak)).min(self.y_moral),
        }
    }
}

/// Running day-by-day income gap. Carries the lockdown streak across phase
/// boundaries.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IncomeLedger {
    pub economic_loss: f64,
    pub lockdown_streak: u32,
}

impl IncomeLedger {
    /// Books one day and returns that day's income.
    pub fn add_day(&mut self, econ: &EconomicParams, intensity: u8) -> f64 {
        let y = econ.daily_income(intensity, self.lockdown_streak);
        self.lockdown_streak = if intensity >= 2 { self.lockdown_streak + 1 } else { 0 };
        self.economic_loss += (econ.y_peace - y).max(0.0);
        y
    }

    pub fn add_days(&mut self, econ: &EconomicParams, intensity: u8, days: u32) {
        for _ in 0..days {
            self.add_day(econ, intensity);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SocialLosses {
    pub msl: f64,
    pub tsl: f64,
    /// Deaths averted attributed to each phase, phase 1 first.
    pub sg_per_phase: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossBreakdown {
    pub path: InterventionPath,
    /// Deaths with no intervention.
    pub msl: f64,
    /// Realized deaths under the path.
    pub sl: f64,
    /// Same as `sl`; named for the phase-sum decomposition
    /// `tsl = msl - sum(sg_per_phase)`.
    pub tsl: f64,
    pub sg_per_phase: Vec<f64>,
    pub el: f64,
    pub lambda: f64,
    pub cpl: f64,
    /// `el` over the income the economy would earn in peacetime across the
    /// horizon.
    pub el_share_of_peacetime_income: f64,
}

/// Deaths decomposed phase by phase: `sg[P] = D(prefix_{P-1}) - D(prefix_P)`
/// where `prefix_P` follows `path` in its first `P` phases and is 0 after.
pub fn social_losses(model: &Model, path: &InterventionPath) -> Result<SocialLosses> {
    model.check_path(path)?;
    let n = path.len();
    let mut deaths = Vec::with_capacity(n + 1);
    for keep in 0..=n {
        let prefix = path.prefix(keep);
        // prefix_k == prefix_{k-1} when phase k is at intensity 0
        if keep > 0 && path.intensities()[keep - 1] == 0 {
            let prev = deaths[keep - 1];
            deaths.push(prev);
        } else {
            deaths.push(model.engine().deaths(&prefix)?);
        }
    }
    let sg_per_phase = deaths.windows(2).map(|w| w[0] - w[1]).collect();
    Ok(SocialLosses {
        msl: deaths[0],
        tsl: deaths[n],
        sg_per_phase,
    })
}

/// Sum over days of the peacetime income minus the income earned under the
/// path.
pub fn economic_loss(model: &Model, path: &InterventionPath) -> Result<f64> {
    model.check_path(path)?;
    let mut ledger = IncomeLedger::default();
    for (phase, &i) in path.intensities().iter().enumerate() {
        ledger.add_days(model.econ(), i, model.days_in_phase(phase));
    }
    Ok(ledger.economic_loss)
}

/// Income on each day of the horizon under `path`.
pub fn daily_incomes(model: &Model, path: &InterventionPath) -> Result<Vec<f64>> {
    model.check_path(path)?;
    let mut ledger = IncomeLedger::default();
    let mut out = Vec::with_capacity(model.engine().params().horizon_days as usize);
    for (phase, &i) in path.intensities().iter().enumerate() {
        for _ in 0..model.days_in_phase(phase) {
            out.push(ledger.add_day(model.econ(), i));
        }
    }
    Ok(out)
}

pub fn combined_loss(model: &Model, path: &InterventionPath) -> Result<LossBreakdown> {
    let social = social_losses(model, path)?;
    let el = economic_loss(model, path)?;
    let lambda = model.econ().lambda;
    let peacetime = model.econ().y_peace * model.engine().params().horizon();
    Ok(LossBreakdown {
        path: path.clone(),
        msl: social.msl,
        sl: social.tsl,
        tsl: social.tsl,
        sg_per_phase: social.sg_per_phase,
        el,
        lambda,
        cpl: combined(el, lambda, social.tsl),
        el_share_of_peacetime_income: if peacetime > 0.0 { el / peacetime } else { 0.0 },
    })
}

/// `el + lambda * deaths`. Every code path that ranks paths goes through here.
#[inline]
pub fn combined(el: f64, lambda: f64, deaths: f64) -> f64 {
    el + lambda * deaths
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub intensity: f64,
    pub health_capital: f64,
    pub income: f64,
    pub label: Option<&'static str>,
}

const LABELS: [&str; 3] = ["peacetime", "moral_imperative", "lockdown"];

/// Income against health capital as intensity varies continuously over
/// `[0, top]`. Health capital interpolates `contact_cut` linearly and is
/// normalized to 1 at the top intensity; income is
/// `y_peace - (y_peace - y_min) * H^gamma_exp`, flat near peacetime for
/// `gamma_exp > 1`. Integer intensities are always included and labeled.
pub fn frontier(
    econ: &EconomicParams,
    effects: &InterventionEffect,
    gamma_exp: f64,
    samples: usize,
) -> Result<Vec<FrontierPoint>> {
    if !(gamma_exp.is_finite() && gamma_exp > 1.0) {
        return Err(Error::validation(
            "gamma_exp",
            format!("must be > 1 for a flat trade-off near peacetime, got {gamma_exp}"),
        ));
    }
    if samples < 3 {
        return Err(Error::validation("samples", format!("must be >= 3, got {samples}")));
    }
    econ.validate()?;
    effects.validate()?;
    let cuts = &effects.contact_cut;
    let top = cuts.len() - 1;
    if top == 0 || cuts[top] <= 0.0 {
        return Err(Error::validation(
            "effects.contact_cut",
            "top intensity must cut contacts to normalize health capital",
        ));
    }
    let span = top as f64;
    let mut grid: Vec<f64> = (0..samples).map(|k| span * k as f64 / (samples - 1) as f64).collect();
    grid.extend((0..=top).map(|k| k as f64));
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let gap = econ.y_peace - econ.y_min;
    Ok(grid
        .into_iter()
        .map(|i| {
            let lo = (i.floor() as usize).min(top - 1);
            let frac = i - lo as f64;
            let cut = cuts[lo] + (cuts[lo + 1] - cuts[lo]) * frac;
            let h = (cut / cuts[top]).clamp(0.0, 1.0);
            let label = if i.fract() == 0.0 {
                LABELS.get(i as usize).copied()
            } else {
                None
            };
            FrontierPoint {
                intensity: i,
                health_capital: h,
                income: econ.y_peace - gap * h.powf(gamma_exp),
                label,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epidemic::{EpidemicParams, PhaseSchedule};

    fn econ() -> EconomicParams {
        EconomicParams {
            y_peace: 100.0,
            y_moral: 97.0,
            y_min: 90.0,
            escalation_rate: 0.0,
            lambda: 1.0,
        }
    }

    fn effects() -> InterventionEffect {
        InterventionEffect {
            contact_cut: vec![0.0, 0.4, 0.75],
            import_cut: vec![0.0, 0.9, 0.95],
        }
    }

    fn model_with(econ: EconomicParams, ifr: f64) -> Model {
        let params = EpidemicParams {
            population: 1e6,
            initial_infected: 10.0,
            beta0: 0.3,
            gamma: 0.1,
            ifr,
            import_rate: 1.0,
            horizon_days: 120,
            step_days: 0.25,
        };
        let schedule = PhaseSchedule::new(vec![15.0, 40.5, 80.0], 120.0).unwrap();
        Model::new(params, effects(), schedule, econ).unwrap()
    }

    #[test]
    fn zero_path_has_no_gain_and_no_economic_loss() {
        let m = model_with(econ(), 0.005);
        let b = combined_loss(&m, &InterventionPath::zeros(4)).unwrap();
        assert!(b.sg_per_phase.iter().all(|&g| g == 0.0));
        assert_eq!(b.tsl, b.msl);
        assert_eq!(b.el, 0.0);
    }

    #[test]
    fn zero_ifr_zeroes_social_losses() {
        let m = model_with(econ(), 0.0);
        let s = social_losses(&m, &"2,1,2,0".parse().unwrap()).unwrap();
        assert_eq!(s.msl, 0.0);
        assert_eq!(s.tsl, 0.0);
        assert!(s.sg_per_phase.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn full_lockdown_economic_loss() {
        let m = model_with(econ(), 0.005);
        let el = economic_loss(&m, &"2,2,2,2".parse().unwrap()).unwrap();
        assert_eq!(el, 120.0 * 10.0);
    }

    #[test]
    fn escalation_raises_floor_up_to_moral_level() {
        let e = EconomicParams {
            escalation_rate: 1.0,
            ..econ()
        };
        assert_eq!(e.daily_income(2, 0), 90.0);
        assert_eq!(e.daily_income(2, 3), 93.0);
        assert_eq!(e.daily_income(2, 50), 97.0);
        let mut ledger = IncomeLedger::default();
        ledger.add_days(&e, 2, 3);
        assert_eq!(ledger.economic_loss, 10.0 + 9.0 + 8.0);
        ledger.add_day(&e, 1);
        assert_eq!(ledger.lockdown_streak, 0);
    }

    #[test]
    fn lambda_zero_cpl_is_el() {
        let m = model_with(EconomicParams { lambda: 0.0, ..econ() }, 0.005);
        let b = combined_loss(&m, &"1,2,0,1".parse().unwrap()).unwrap();
        assert_eq!(b.cpl, b.el);
    }

    #[test]
    fn lambda_one_without_economic_loss_is_deaths() {
        let m = model_with(econ(), 0.005);
        let b = combined_loss(&m, &InterventionPath::zeros(4)).unwrap();
        assert_eq!(b.cpl, b.tsl);
    }

    #[test]
    fn telescoping_holds() {
        let m = model_with(econ(), 0.005);
        for s in ["0,2,1,0", "1,1,0,0", "2,2,2,2", "1,0,2,1"] {
            let b = combined_loss(&m, &s.parse().unwrap()).unwrap();
            let sum: f64 = b.sg_per_phase.iter().sum();
            assert!((b.msl - sum - b.tsl).abs() <= 1e-9 * b.msl);
        }
    }

    #[test]
    fn frontier_anchors() {
        let pts = frontier(&econ(), &effects(), 2.0, 50).unwrap();
        let first = &pts[0];
        assert_eq!((first.health_capital, first.income), (0.0, 100.0));
        assert_eq!(first.label, Some("peacetime"));
        let last = pts.last().unwrap();
        assert_eq!((last.health_capital, last.income), (1.0, 90.0));
        assert_eq!(last.label, Some("lockdown"));
        assert!(pts
            .iter()
            .any(|p| p.label == Some("moral_imperative") && p.intensity == 1.0));
    }

    #[test]
    fn frontier_flat_at_peacetime() {
        // the one-sided slope over [0, h] is gap * h for gamma_exp = 2, so it
        // vanishes with h; 1e-6 * y_peace at h = 1e-4 needs a gap under 1%
        let e = EconomicParams {
            y_min: 99.5,
            y_moral: 99.8,
            ..econ()
        };
        let h = 1e-4;
        let y = |h: f64| e.y_peace - (e.y_peace - e.y_min) * h.powf(2.0);
        assert!((y(0.0) - y(h)) / h < 1e-6 * e.y_peace);
        let wide = econ();
        let y = |h: f64| wide.y_peace - (wide.y_peace - wide.y_min) * h.powf(2.0);
        assert!((y(0.0) - y(h)) / h <= (wide.y_peace - wide.y_min) * h * (1.0 + 1e-6));

        let pts = frontier(&wide, &effects(), 2.0, 401).unwrap();
        let p = &pts[1];
        let slope = (pts[0].income - p.income) / p.health_capital;
        assert!(slope < 0.1, "{slope}");
    }

    #[test]
    fn frontier_is_concave_in_health_capital() {
        let pts = frontier(&econ(), &effects(), 2.5, 60).unwrap();
        let slopes: Vec<f64> = pts
            .windows(2)
            .filter(|w| w[1].health_capital > w[0].health_capital)
            .map(|w| (w[1].income - w[0].income) / (w[1].health_capital - w[0].health_capital))
            .collect();
        for w in slopes.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{w:?}");
        }
    }

    #[test]
    fn frontier_rejects_bad_curvature() {
        assert!(frontier(&econ(), &effects(), 1.0, 10).is_err());
        assert!(frontier(&econ(), &effects(), 2.0, 2).is_err());
    }

    #[test]
    fn econ_validation() {
        let bad = EconomicParams {
            y_moral: 101.0,
            ..econ()
        };
        assert!(bad.validate().is_err());
        let bad = EconomicParams { lambda: -1.0, ..econ() };
        assert!(bad.validate().unwrap_err().to_string().contains("econ.lambda"));
    }
}
