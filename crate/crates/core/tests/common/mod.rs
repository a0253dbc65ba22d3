#![allow(dead_code)]

use proptest::prelude::*;

use prm_core::{DemandProfile, ProblemInstance};

/// A valid instance with `T` in `1..=max_horizon`.
pub fn instance(max_horizon: usize) -> impl Strategy<Value = ProblemInstance> {
    (1..=max_horizon, 0.0..500.0f64, 1.0..500.0f64, 0.05..1.5f64, 0.05..1.0f64).prop_map(
        |(t, d_lb, span, rate_frac, cap_frac)| {
            let d_ub = d_lb + span;
            let delta_max = (rate_frac * d_ub).max(1e-3);
            let capacity = (cap_frac * t as f64 * delta_max).max(1e-3);
            ProblemInstance::new(t, capacity, delta_max, d_lb, d_ub).unwrap()
        },
    )
}

/// An instance paired with an in-bounds profile.
pub fn instance_and_profile(max_horizon: usize) -> impl Strategy<Value = (ProblemInstance, DemandProfile)> {
    instance(max_horizon).prop_flat_map(|inst| {
        (Just(inst), proptest::collection::vec(0.0..=1.0f64, inst.horizon)).prop_map(|(inst, u)| {
            let d = u.iter().map(|x| inst.d_lb + x * (inst.d_ub - inst.d_lb)).collect();
            (inst, DemandProfile::new(d))
        })
    })
}

/// Profile of fractions mapped onto the bounds of `inst`.
pub fn scale(inst: &ProblemInstance, u: &[f64]) -> DemandProfile {
    DemandProfile::new(u.iter().map(|x| inst.d_lb + x * (inst.d_ub - inst.d_lb)).collect())
}
