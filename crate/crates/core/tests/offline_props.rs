mod common;

use proptest::prelude::*;

use prm_core::model::ProblemInstance;
use prm_core::oracle::brute_force_offline;
use prm_core::{evaluate_schedule, reference_profile, solve_offline};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn closed_form_matches_linear_program((inst, d) in common::instance_and_profile(12)) {
        let fast = solve_offline(&inst, &d).unwrap();
        let slow = brute_force_offline(&inst, &d).unwrap();
        prop_assert!((fast.reduction - slow.reduction).abs() <= 1e-7, "{} vs {}", fast.reduction, slow.reduction);
        prop_assert!((fast.reduction - (d.peak() - fast.peak_after)).abs() <= 1e-9);
    }

    #[test]
    fn offline_schedule_is_feasible((inst, d) in common::instance_and_profile(12)) {
        let s = solve_offline(&inst, &d).unwrap();
        let ev = evaluate_schedule(&inst, &d, &s.schedule).unwrap();
        prop_assert!(ev.feasible, "{:?}", ev.violations);
        prop_assert!((ev.reduction - s.reduction).abs() <= 1e-9);
        if s.capacity_limited {
            let filled: f64 = d.iter().map(|x| (x - s.water_level).max(0.0)).sum();
            prop_assert!((filled - inst.capacity).abs() <= 1e-9 * inst.capacity.max(1.0));
        }
    }

    #[test]
    fn reduction_monotone_in_capacity_and_rate((inst, d) in common::instance_and_profile(10), k in 1.0..3.0f64) {
        let base = solve_offline(&inst, &d).unwrap().reduction;
        let more_c = solve_offline(&inst.with_capacity(inst.capacity * k), &d).unwrap().reduction;
        let more_r = solve_offline(&inst.with_delta_max(inst.delta_max * k), &d).unwrap().reduction;
        prop_assert!(more_c >= base - 1e-9);
        prop_assert!(more_r >= base - 1e-9);
    }

    #[test]
    fn discharging_slots_share_one_level((inst, d) in common::instance_and_profile(12)) {
        let s = solve_offline(&inst, &d).unwrap();
        let active: Vec<f64> = d
            .iter()
            .zip(s.schedule.values())
            .filter(|(_, &x)| x > 1e-12 && x < inst.delta_max - 1e-9)
            .map(|(&x, &delta)| x - delta)
            .collect();
        for level in &active {
            prop_assert!((level - s.peak_after).abs() <= 1e-9, "{level} vs {}", s.peak_after);
        }
    }

    #[test]
    fn reference_levels_grow_with_t((inst, d) in common::instance_and_profile(12)) {
        let mut last = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for t in 1..=inst.horizon {
            let r = reference_profile(&d.values()[..t], t, &inst).unwrap();
            let s = solve_offline(&inst, &r).unwrap();
            prop_assert!(r.peak() >= last.0);
            prop_assert!(s.peak_after >= last.1 - 1e-9);
            last = (r.peak(), s.peak_after);
        }
    }
}

#[test]
fn empty_capacity_use_is_rejected_by_validation() {
    assert!(ProblemInstance::new(2, 0.0, 1.0, 0.0, 1.0).is_err());
}

/// The reference reduction itself can shrink as the stream grows: a second
/// near-peak slot forces the capacity to be shared.
#[test]
fn reference_reduction_is_not_monotone() {
    let inst = ProblemInstance::new(2, 0.005, 0.05, 0.0, 1.0).unwrap();
    let d = [0.705143394741161, 0.7015308409963548];
    let s1 = solve_offline(&inst, &reference_profile(&d[..1], 1, &inst).unwrap()).unwrap();
    let s2 = solve_offline(&inst, &reference_profile(&d, 2, &inst).unwrap()).unwrap();
    assert!(s2.reduction < s1.reduction - 1e-4);
    assert!(s2.peak_after > s1.peak_after);
}
