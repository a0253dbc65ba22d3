use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveTime;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ProblemInstance;
use crate::online::{BaselineKind, DEFAULT_EPSILON};

/// A policy evaluated by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PolicyId {
    Offline,
    Pcr,
    AdaptivePcr,
    Baseline(BaselineKind),
}

impl PolicyId {
    pub fn name(self) -> &'static str {
        match self {
            PolicyId::Offline => "offline",
            PolicyId::Pcr => "pcr",
            PolicyId::AdaptivePcr => "adaptive_pcr",
            PolicyId::Baseline(k) => k.name(),
        }
    }
}

impl fmt::Display for PolicyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "offline" => Ok(PolicyId::Offline),
            "pcr" => Ok(PolicyId::Pcr),
            "adaptive_pcr" => Ok(PolicyId::AdaptivePcr),
            other => other.parse().map(PolicyId::Baseline),
        }
    }
}

impl TryFrom<String> for PolicyId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PolicyId> for String {
    fn from(p: PolicyId) -> String {
        p.name().to_string()
    }
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_slot_minutes() -> u32 {
    15
}

fn default_rhc_window() -> usize {
    5
}

fn default_episodes() -> usize {
    20
}

/// Experiment settings, read from a flat TOML document. See the README for
/// the field reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub horizon: usize,
    /// Storage capacity for single-instance commands (`cr`, `oracle`);
    /// experiments derive it from `capacity_rates` instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<f64>,
    pub delta_max: f64,
    pub d_lb: f64,
    pub d_ub: f64,
    /// Capacities as fractions of the average episode energy.
    pub capacity_rates: Vec<f64>,
    pub policies: Vec<PolicyId>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_slot_minutes")]
    pub slot_minutes: u32,
    /// First slot of the daily on-peak window, `HH:MM`.
    pub window_start: String,
    #[serde(default = "default_rhc_window")]
    pub rhc_window: usize,
    /// Synthetic episode count when none is given on the command line.
    #[serde(default = "default_episodes")]
    pub episodes: usize,
    /// Demand spacing of the `oracle` grid; eight intervals when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_demand_step: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).context(path.display().to_string()))?;
        Self::from_toml_str(&text).map_err(|e| e.context(path.display().to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        self.instance_with(self.capacity.unwrap_or(1.0))?;
        if self.policies.is_empty() {
            return Err(Error::InvalidConfig("policies must not be empty".into()));
        }
        if let Some(r) = self.capacity_rates.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
            return Err(Error::InvalidConfig(format!("capacity rate {r} outside (0, 1]")));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!("epsilon {} must be positive", self.epsilon)));
        }
        if self.slot_minutes == 0 {
            return Err(Error::InvalidConfig("slot_minutes must be positive".into()));
        }
        if let Some(step) = self.oracle_demand_step {
            if !(step > 0.0 && step.is_finite()) {
                return Err(Error::InvalidConfig(format!("oracle_demand_step {step} must be positive")));
            }
        }
        if self.rhc_window == 0 {
            return Err(Error::InvalidConfig("rhc_window must be at least 1".into()));
        }
        let start = self.window_start_time()?;
        let minutes = start.signed_duration_since(NaiveTime::MIN).num_minutes();
        if minutes + (self.horizon as i64) * i64::from(self.slot_minutes) > 24 * 60 {
            return Err(Error::InvalidConfig(format!(
                "window of {} slots from {} crosses midnight",
                self.horizon, self.window_start
            )));
        }
        Ok(())
    }

    pub fn window_start_time(&self) -> Result<NaiveTime> {
        NaiveTime::parse_from_str(&self.window_start, "%H:%M")
            .or_else(|_| NaiveTime::parse_from_str(&self.window_start, "%H:%M:%S"))
            .map_err(|_| Error::InvalidConfig(format!("window_start `{}` is not HH:MM", self.window_start)))
    }

    /// The instance with capacity `c`.
    pub fn instance_with(&self, capacity: f64) -> Result<ProblemInstance> {
        ProblemInstance::new(self.horizon, capacity, self.delta_max, self.d_lb, self.d_ub)
    }

    /// The single-instance view; requires `capacity`.
    pub fn instance(&self) -> Result<ProblemInstance> {
        let c = self.capacity.ok_or(Error::MissingParameter("capacity"))?;
        self.instance_with(c)
    }
}
