//! Scenario documents: strict JSON with every default written back out.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::epidemic::{derive_schedule, EpidemicParams, InterventionEffect, Milestones, PhaseSchedule};
use crate::error::{Error, Result};
use crate::loss::EconomicParams;
use crate::model::Model;

fn default_version() -> String {
    "1".to_string()
}

/// Either explicit cut points or milestones resolved against the baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleSpec {
    Boundaries(Vec<f64>),
    Milestones(Milestones),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default = "default_version")]
    pub version: String,
    pub epidemic: EpidemicParams,
    pub effects: InterventionEffect,
    pub schedule: ScheduleSpec,
    pub econ: EconomicParams,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Scenario = serde_json::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::validation("name", "must not be empty"));
        }
        self.epidemic.validate()?;
        self.effects.validate()?;
        self.econ.validate()?;
        match &self.schedule {
            ScheduleSpec::Boundaries(b) => PhaseSchedule { boundaries: b.clone() }.validate(self.epidemic.horizon())?,
            ScheduleSpec::Milestones(m) => m.validate()?,
        }
        Ok(())
    }

    /// SHA-256 of the compact JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("scenario serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    /// Phase schedule, derived from the baseline when given as milestones.
    pub fn resolve_schedule(&self) -> Result<PhaseSchedule> {
        match &self.schedule {
            ScheduleSpec::Boundaries(b) => PhaseSchedule::new(b.clone(), self.epidemic.horizon()),
            ScheduleSpec::Milestones(m) => derive_schedule(&self.epidemic, &self.effects, m),
        }
    }

    pub fn model(&self) -> Result<Model> {
        self.validate()?;
        let schedule = self.resolve_schedule()?;
        Model::new(self.epidemic.clone(), self.effects.clone(), schedule, self.econ.clone())
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    Scenario::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
        "name": "t",
        "epidemic": {"population": 1e6, "initial_infected": 10, "beta0": 0.3, "gamma": 0.1,
                     "ifr": 0.005, "import_rate": 1, "horizon_days": 200},
        "effects": {"contact_cut": [0, 0.4, 0.75], "import_cut": [0, 0.9, 0.95]},
        "schedule": {"boundaries": [20, 50, 90]},
        "econ": {"y_peace": 100, "y_moral": 98, "y_min": 94, "lambda": 1}
    }"#;

    #[test]
    fn defaults_are_echoed() {
        let s = Scenario::from_json(DOC).unwrap();
        assert_eq!(s.version, "1");
        assert_eq!(s.epidemic.step_days, 0.25);
        assert_eq!(s.econ.escalation_rate, 0.0);
        let out = s.to_json();
        assert!(out.contains("\"step_days\": 0.25"));
        assert!(out.contains("\"escalation_rate\": 0.0"));
    }

    #[test]
    fn bad_ifr_names_field() {
        let doc = DOC.replace("\"ifr\": 0.005", "\"ifr\": 1.5");
        let err = Scenario::from_json(&doc).unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
        assert!(err.to_string().contains("epidemic.ifr"), "{err}");
    }

    #[test]
    fn unknown_field_rejected() {
        let doc = DOC.replace("\"gamma\": 0.1,", "\"gamma\": 0.1, \"gama\": 0.2,");
        let err = Scenario::from_json(&doc).unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert!(message.contains("gama"), "{message}");
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = Scenario::from_json("{\n  \"name\": \"x\",\n  oops\n}").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn schedule_outside_horizon_rejected() {
        let doc = DOC.replace("[20, 50, 90]", "[20, 50, 250]");
        assert!(Scenario::from_json(&doc).is_err());
    }

    #[test]
    fn hash_changes_with_content() {
        let a = Scenario::from_json(DOC).unwrap();
        let mut b = a.clone();
        b.econ.lambda = 2.0;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), a.clone().hash());
        assert_eq!(a.hash().len(), 64);
    }
}
