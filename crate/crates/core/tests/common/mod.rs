#![allow(dead_code)]

use std::path::PathBuf;

use epiloss::{load_scenario, Model, Scenario};

pub const FIXTURES: [&str; 5] = [
    "early_containment",
    "late_response",
    "premature_relaxation",
    "default",
    "lockdown_two_percent",
];

pub fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

pub fn fixture(name: &str) -> Scenario {
    load_scenario(scenario_dir().join(format!("{name}.json"))).expect("fixture loads")
}

pub fn fixture_model(name: &str) -> Model {
    fixture(name).model().expect("fixture resolves")
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

use epiloss::{EconomicParams, EpidemicParams, InterventionEffect, ScheduleSpec};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A valid four-phase scenario with explicit boundaries drawn from `rng`.
pub fn random_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let horizon_days = rng.gen_range(40..=220u32);
    let step_days = [0.25, 0.5, 1.0][rng.gen_range(0..3)];
    let population = 10f64.powf(rng.gen_range(4.0..7.0));
    let c1 = rng.gen_range(0.0..0.6);
    let m1 = rng.gen_range(0.0..0.9);
    let mut b: Vec<f64> = (0..3)
        .map(|_| (rng.gen_range(1.0..f64::from(horizon_days) - 1.0) * 4.0).round() / 4.0)
        .collect();
    b.sort_by(f64::total_cmp);
    for k in 1..3 {
        if b[k] <= b[k - 1] {
            b[k] = b[k - 1] + 0.25;
        }
    }
    let y_peace = rng.gen_range(50.0..2000.0);
    let y_moral = y_peace * rng.gen_range(0.9..1.0);
    let y_min = y_moral * rng.gen_range(0.85..1.0);
    Scenario {
        name: "random".into(),
        version: "1".into(),
        epidemic: EpidemicParams {
            population,
            initial_infected: rng.gen_range(0.0..100.0),
            beta0: rng.gen_range(0.08..0.6),
            gamma: rng.gen_range(0.05..0.3),
            ifr: rng.gen_range(1e-4..0.02),
            import_rate: rng.gen_range(0.0..10.0),
            horizon_days,
            step_days,
        },
        effects: InterventionEffect {
            contact_cut: vec![0.0, c1, rng.gen_range(c1..0.95)],
            import_cut: vec![0.0, m1, rng.gen_range(m1..1.0)],
        },
        schedule: ScheduleSpec::Boundaries(b),
        econ: EconomicParams {
            y_peace,
            y_moral,
            y_min,
            escalation_rate: if rng.gen_bool(0.5) {
                0.0
            } else {
                rng.gen_range(0.0..2.0)
            },
            lambda: 10f64.powf(rng.gen_range(-1.0..3.0)),
        },
    }
}

pub fn random_path(rng: &mut ChaCha8Rng, n: usize) -> epiloss::InterventionPath {
    let v: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3u8)).collect();
    epiloss::InterventionPath::new(v, n, 3).unwrap()
}

/// Summary of a new-infection curve measured by a forward-Euler run.
#[derive(Debug, Clone, Copy)]
pub struct OracleStats {
    pub peak_time: f64,
    pub peak_height: f64,
    pub attack_rate: f64,
}

/// Forward Euler with a fixed small step, written independently of the
/// library engine. Intensity switches at the given boundaries.
pub fn euler_oracle(s: &Scenario, boundaries: &[f64], path: &[u8], dt: f64) -> OracleStats {
    let e = &s.epidemic;
    let n = e.population;
    let (mut sus, mut inf, mut cum) = (n - e.initial_infected, e.initial_infected, e.initial_infected);
    let steps = (f64::from(e.horizon_days) / dt).round() as usize;
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 0..=steps {
        let t = k as f64 * dt;
        let phase = boundaries.iter().filter(|&&b| b <= t + 1e-12).count();
        let i = usize::from(path[phase]);
        let beta = e.beta0 * (1.0 - s.effects.contact_cut[i]);
        let imp = e.import_rate * (1.0 - s.effects.import_cut[i]);
        let transmission = beta * sus * inf / n;
        let incidence = transmission + imp;
        if incidence > best.1 {
            best = (t, incidence);
        }
        if k == steps {
            break;
        }
        sus -= dt * transmission;
        inf += dt * (incidence - e.gamma * inf);
        cum += dt * incidence;
    }
    OracleStats {
        peak_time: best.0,
        peak_height: best.1,
        attack_rate: cum / n,
    }
}
