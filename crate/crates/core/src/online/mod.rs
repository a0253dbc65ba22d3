//! Online discharge policies.
//!
//! Every policy consumes demands one slot at a time and commits each
//! discharge irrevocably. [`OnlineState`] carries what a policy may know at
//! slot `t`: the observed demands, its own past actions and the ratio it is
//! currently pursuing.

mod adaptive;
mod baseline;
mod pcr;

pub use adaptive::{
    adaptive_cr, build_adacr_threshold, run_adaptive, run_adaptive_with, worst_case_inventory, AdaCrLayout,
    AdaCrThreshold, AdaptiveCrResult, AdaptiveRun, DEFAULT_EPSILON,
};
pub use baseline::{run_baseline, BaselineKind, BaselinePolicy};
pub use pcr::{pcr_discharges_unchecked, pcr_step, run_pcr};

use crate::error::{Error, Result};
use crate::model::{DischargeSchedule, ProblemInstance, TOL};
use crate::offline::reduction_of;

/// Observed demands, committed actions and running statistics of one
/// online episode.
#[derive(Debug, Clone)]
pub struct OnlineState {
    instance: ProblemInstance,
    observed: Vec<f64>,
    actions: DischargeSchedule,
    running_max: f64,
    /// `max_{k < t} (d_k - delta_k)`, zero before the first action.
    running_online_peak: f64,
    current_ratio: f64,
    /// `sigma(d^t)` for the latest observed slot.
    reference_reduction: f64,
    reference: Vec<f64>,
    scratch: Vec<f64>,
}

impl OnlineState {
    /// A fresh episode pursuing `ratio` (the optimal ratio for static and
    /// adaptive policies alike at the start).
    pub fn new(instance: ProblemInstance, ratio: f64) -> Result<Self> {
        let instance = instance.validate()?;
        if !(ratio >= 1.0) {
            return Err(Error::InvalidRatio(ratio));
        }
        Ok(OnlineState {
            instance,
            observed: Vec::with_capacity(instance.horizon),
            actions: DischargeSchedule::with_capacity(instance.horizon),
            running_max: f64::NEG_INFINITY,
            running_online_peak: 0.0,
            current_ratio: ratio,
            reference_reduction: 0.0,
            reference: vec![instance.d_lb; instance.horizon],
            scratch: Vec::with_capacity(instance.horizon),
        })
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.instance
    }

    /// Current slot `t` (1-based); zero before the first observation.
    pub fn t(&self) -> usize {
        self.observed.len()
    }

    pub fn observed(&self) -> &[f64] {
        &self.observed
    }

    pub fn actions(&self) -> &DischargeSchedule {
        &self.actions
    }

    pub fn into_schedule(self) -> DischargeSchedule {
        self.actions
    }

    pub fn used_capacity(&self) -> f64 {
        self.actions.used_capacity()
    }

    pub fn remaining_capacity(&self) -> f64 {
        self.instance.capacity - self.actions.used_capacity()
    }

    /// `max_{k <= t} d_k`.
    pub fn running_max(&self) -> f64 {
        self.running_max
    }

    /// `max_{k < t} (d_k - delta_k)` with the empty maximum taken as zero.
    pub fn running_online_peak(&self) -> f64 {
        self.running_online_peak
    }

    pub fn current_ratio(&self) -> f64 {
        self.current_ratio
    }

    pub(crate) fn set_current_ratio(&mut self, ratio: f64) {
        self.current_ratio = ratio;
    }

    /// `sigma(d^t)` for the reference profile of the latest observation.
    pub fn reference_reduction(&self) -> f64 {
        self.reference_reduction
    }

    /// True when slot `t` has been observed but not yet acted on.
    pub fn awaiting_action(&self) -> bool {
        self.observed.len() == self.actions.len() + 1
    }

    /// Reveals the demand of the next slot.
    pub fn observe(&mut self, demand: f64) -> Result<()> {
        let inst = self.instance;
        let slot = self.observed.len();
        if self.awaiting_action() || slot >= inst.horizon {
            return Err(Error::LengthMismatch {
                expected: inst.horizon,
                actual: slot + 1,
            });
        }
        if !(demand >= inst.d_lb - TOL && demand <= inst.d_ub + TOL) {
            return Err(Error::DemandOutOfBounds {
                slot,
                value: demand,
                lower: inst.d_lb,
                upper: inst.d_ub,
            });
        }
        self.observed.push(demand);
        self.running_max = self.running_max.max(demand);
        self.reference[slot] = demand;
        self.reference_reduction =
            reduction_of(&self.reference, inst.capacity, inst.delta_max, &mut self.scratch);
        Ok(())
    }

    /// The discharge that keeps the offline-to-online ratio on the reference
    /// profile at `ratio`: `[d_t - max_{k<=t} d_k + sigma(d^t) / ratio]^+`.
    pub fn pursuit_discharge(&self, ratio: f64) -> f64 {
        let d_t = *self.observed.last().expect("no observed slot");
        (d_t - self.running_max + self.reference_reduction / ratio).max(0.0)
    }

    /// Commits the discharge for the latest observed slot.
    pub fn commit(&mut self, delta: f64, check_capacity: bool) -> Result<()> {
        if !self.awaiting_action() {
            return Err(Error::LengthMismatch {
                expected: self.observed.len(),
                actual: self.actions.len() + 1,
            });
        }
        let used = self.actions.used_capacity() + delta;
        if check_capacity && used > self.instance.capacity + TOL {
            return Err(Error::CapacityViolation {
                slot: self.observed.len() - 1,
                used,
                capacity: self.instance.capacity,
            });
        }
        let d_t = *self.observed.last().unwrap();
        self.running_online_peak = self.running_online_peak.max(d_t - delta);
        self.actions.push(delta);
        Ok(())
    }
}
