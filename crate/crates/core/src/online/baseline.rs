use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DemandProfile, DischargeSchedule, ProblemInstance, TOL};
use crate::offline::solve_offline_slice;

/// Comparison policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BaselineKind {
    /// Shave everything above the midpoint of the demand bounds.
    #[serde(rename = "THR_half")]
    ThrHalf,
    /// Shave everything above a historical average of offline peaks.
    #[serde(rename = "THR_avg")]
    ThrAvg,
    /// Spend `c / T` every slot.
    #[serde(rename = "Eql_Dis")]
    EqlDis,
    /// Spend a fixed share of each slot's demand.
    #[serde(rename = "Eql_Per")]
    EqlPer,
    /// Receding horizon, guessing `d_lb` beyond the window.
    #[serde(rename = "RHC_lb")]
    RhcLb,
    /// Receding horizon, guessing `d_ub` beyond the window.
    #[serde(rename = "RHC_ub")]
    RhcUb,
    /// Receding horizon, guessing the midpoint beyond the window.
    #[serde(rename = "RHC_half")]
    RhcHalf,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 7] = [
        BaselineKind::ThrHalf,
        BaselineKind::ThrAvg,
        BaselineKind::EqlDis,
        BaselineKind::EqlPer,
        BaselineKind::RhcLb,
        BaselineKind::RhcUb,
        BaselineKind::RhcHalf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::ThrHalf => "THR_half",
            BaselineKind::ThrAvg => "THR_avg",
            BaselineKind::EqlDis => "Eql_Dis",
            BaselineKind::EqlPer => "Eql_Per",
            BaselineKind::RhcLb => "RHC_lb",
            BaselineKind::RhcUb => "RHC_ub",
            BaselineKind::RhcHalf => "RHC_half",
        }
    }

    pub fn is_receding(self) -> bool {
        matches!(self, BaselineKind::RhcLb | BaselineKind::RhcUb | BaselineKind::RhcHalf)
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaselineKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidPolicy(s.to_string()))
    }
}

/// A baseline and its parameters. Unused parameters are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselinePolicy {
    pub kind: BaselineKind,
    /// Shaving threshold for `THR_avg`, kWh.
    pub threshold: Option<f64>,
    /// Share of demand discharged by `Eql_Per`.
    pub rate: Option<f64>,
    /// Look-ahead window of the receding-horizon kinds, slots.
    pub window: usize,
}

impl BaselinePolicy {
    pub const DEFAULT_WINDOW: usize = 5;

    pub fn new(kind: BaselineKind) -> Self {
        BaselinePolicy {
            kind,
            threshold: None,
            rate: None,
            window: Self::DEFAULT_WINDOW,
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = Some(threshold);
        self
    }

    pub fn with_rate(mut self, rate: f64) -> Self {
        self.rate = Some(rate);
        self
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            BaselineKind::ThrAvg => match self.threshold {
                None => return Err(Error::MissingParameter("threshold")),
                Some(x) if !x.is_finite() => {
                    return Err(Error::InvalidPolicy(format!("THR_avg threshold {x}")))
                }
                _ => {}
            },
            BaselineKind::EqlPer => match self.rate {
                None => return Err(Error::MissingParameter("rate")),
                Some(r) if !(0.0..=1.0).contains(&r) => {
                    return Err(Error::InvalidPolicy(format!("Eql_Per rate {r} outside [0, 1]")))
                }
                _ => {}
            },
            k if k.is_receding() && self.window == 0 => {
                return Err(Error::InvalidPolicy(format!("{k} window must be at least 1")))
            }
            _ => {}
        }
        Ok(())
    }
}

pub fn run_baseline(policy: &BaselinePolicy, inst: &ProblemInstance, d: &DemandProfile) -> Result<DischargeSchedule> {
    let inst = inst.validate()?;
    policy.validate()?;
    inst.check_len(d.len())?;
    let t_len = inst.horizon;
    let mut schedule = DischargeSchedule::with_capacity(t_len);
    let remaining = |s: &DischargeSchedule| (inst.capacity - s.used_capacity()).max(0.0);
    match policy.kind {
        BaselineKind::ThrHalf | BaselineKind::ThrAvg => {
            let threshold = match policy.kind {
                BaselineKind::ThrHalf => inst.mid_demand(),
                _ => policy.threshold.unwrap(),
            };
            for &x in d.iter() {
                let delta = inst.delta_max.min((x - threshold).max(0.0)).min(remaining(&schedule));
                schedule.push(delta);
            }
        }
        BaselineKind::EqlDis => {
            let share = inst.capacity / t_len as f64;
            for &x in d.iter() {
                schedule.push(share.min(inst.delta_max).min(x));
            }
        }
        BaselineKind::EqlPer => {
            let rate = policy.rate.unwrap();
            for &x in d.iter() {
                schedule.push((rate * x).min(inst.delta_max).min(remaining(&schedule)));
            }
        }
        kind => {
            let guess = match kind {
                BaselineKind::RhcLb => inst.d_lb,
                BaselineKind::RhcUb => inst.d_ub,
                _ => inst.mid_demand(),
            };
            let mut horizon = Vec::with_capacity(t_len);
            for t in 0..t_len {
                let left = remaining(&schedule);
                if left <= TOL {
                    schedule.push(0.0);
                    continue;
                }
                let seen = (t + policy.window).min(t_len);
                horizon.clear();
                horizon.extend_from_slice(&d.values()[t..seen]);
                horizon.resize(t_len - t, guess);
                let plan = solve_offline_slice(&horizon, left, inst.delta_max);
                schedule.push(plan.schedule.values()[0].min(left));
            }
        }
    }
    Ok(schedule)
}
