//! Problem instances, demand profiles and discharge schedules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on kWh quantities.
pub const TOL: f64 = 1e-9;

/// Horizon, storage parameters and per-slot demand bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    /// Number of slots `T`.
    pub horizon: usize,
    /// Storage capacity in kWh.
    pub capacity: f64,
    /// Maximum discharge per slot in kWh.
    pub delta_max: f64,
    /// Lower demand bound in kWh.
    pub d_lb: f64,
    /// Upper demand bound in kWh.
    pub d_ub: f64,
}

impl ProblemInstance {
    pub fn new(horizon: usize, capacity: f64, delta_max: f64, d_lb: f64, d_ub: f64) -> Result<Self> {
        ProblemInstance {
            horizon,
            capacity,
            delta_max,
            d_lb,
            d_ub,
        }
        .validate()
    }

    /// Returns the instance unchanged if every field is admissible.
    pub fn validate(self) -> Result<Self> {
        let invalid = |field, reason: &str| Error::InvalidInstance {
            field,
            reason: reason.to_string(),
        };
        if self.horizon == 0 {
            return Err(invalid("T", "horizon must be at least one slot"));
        }
        if !(self.capacity.is_finite() && self.capacity > 0.0) {
            return Err(invalid("c", "capacity must be positive and finite"));
        }
        if !(self.delta_max.is_finite() && self.delta_max > 0.0) {
            return Err(invalid("delta_max", "discharge limit must be positive and finite"));
        }
        if !(self.d_lb.is_finite() && self.d_ub.is_finite()) {
            return Err(invalid("bounds", "demand bounds must be finite"));
        }
        if self.d_lb < 0.0 {
            return Err(invalid("bounds", "lower demand bound must be non-negative"));
        }
        if self.d_lb > self.d_ub {
            return Err(invalid("bounds", "lower demand bound exceeds upper bound"));
        }
        Ok(self)
    }

    pub fn with_capacity(self, capacity: f64) -> Self {
        ProblemInstance { capacity, ..self }
    }

    pub fn with_horizon(self, horizon: usize) -> Self {
        ProblemInstance { horizon, ..self }
    }

    pub fn with_delta_max(self, delta_max: f64) -> Self {
        ProblemInstance { delta_max, ..self }
    }

    pub fn with_bounds(self, d_lb: f64, d_ub: f64) -> Self {
        ProblemInstance { d_lb, d_ub, ..self }
    }

    pub fn mid_demand(&self) -> f64 {
        0.5 * (self.d_lb + self.d_ub)
    }

    /// Checks that `d` has length `T` and every entry lies within the bounds.
    pub fn check_profile(&self, d: &DemandProfile) -> Result<()> {
        self.check_len(d.len())?;
        for (slot, &value) in d.iter().enumerate() {
            if !(value >= self.d_lb - TOL && value <= self.d_ub + TOL) {
                return Err(Error::DemandOutOfBounds {
                    slot,
                    value,
                    lower: self.d_lb,
                    upper: self.d_ub,
                });
            }
        }
        Ok(())
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.horizon {
            return Err(Error::LengthMismatch {
                expected: self.horizon,
                actual: len,
            });
        }
        Ok(())
    }
}

/// Per-slot net demands in kWh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DemandProfile(Vec<f64>);

impl DemandProfile {
    pub fn new(values: Vec<f64>) -> Self {
        DemandProfile(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn peak(&self) -> f64 {
        max_of(&self.0)
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl From<Vec<f64>> for DemandProfile {
    fn from(values: Vec<f64>) -> Self {
        DemandProfile(values)
    }
}

impl std::ops::Index<usize> for DemandProfile {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

/// Per-slot discharge quantities with the running total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DischargeSchedule {
    values: Vec<f64>,
    used_capacity: f64,
}

impl DischargeSchedule {
    pub fn new() -> Self {
        DischargeSchedule {
            values: Vec::new(),
            used_capacity: 0.0,
        }
    }

    pub fn with_capacity(horizon: usize) -> Self {
        DischargeSchedule {
            values: Vec::with_capacity(horizon),
            used_capacity: 0.0,
        }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        let used_capacity = values.iter().sum();
        DischargeSchedule {
            values,
            used_capacity,
        }
    }

    pub fn push(&mut self, delta: f64) {
        self.values.push(delta);
        self.used_capacity += delta;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn used_capacity(&self) -> f64 {
        self.used_capacity
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Peak of `d - delta` over the scheduled slots.
    pub fn peak_after(&self, d: &DemandProfile) -> f64 {
        self.values
            .iter()
            .zip(d.iter())
            .map(|(delta, demand)| demand - delta)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Default for DischargeSchedule {
    fn default() -> Self {
        Self::new()
    }
}

pub(crate) fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn pos(x: f64) -> f64 {
    x.max(0.0)
}
