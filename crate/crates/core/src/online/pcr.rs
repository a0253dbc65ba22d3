use super::OnlineState;
use crate::error::{Error, Result};
use crate::model::{DemandProfile, DischargeSchedule, ProblemInstance};

/// Observes `demand` and commits the discharge that pursues `ratio`:
/// `[d_t - max_{k<=t} d_k + sigma(d^t) / ratio]^+`.
///
/// Fails with [`Error::CapacityViolation`] if the discharge would overdraw
/// the storage, which only happens when `ratio` is below the optimal ratio.
pub fn pcr_step(state: &mut OnlineState, ratio: f64, demand: f64) -> Result<f64> {
    if !(ratio >= 1.0) {
        return Err(Error::InvalidRatio(ratio));
    }
    state.observe(demand)?;
    let delta = state.pursuit_discharge(ratio);
    state.commit(delta, true)?;
    Ok(delta)
}

/// Runs the ratio-pursuit policy over a whole profile.
pub fn run_pcr(inst: &ProblemInstance, ratio: f64, d: &DemandProfile) -> Result<DischargeSchedule> {
    inst.check_len(d.len())?;
    let mut state = OnlineState::new(*inst, ratio)?;
    for &demand in d.iter() {
        pcr_step(&mut state, ratio, demand)?;
    }
    Ok(state.into_schedule())
}

/// Discharges of the ratio-pursuit policy with the inventory check disabled,
/// so that ratios below the optimum can be measured. `ratio` may be any
/// positive value.
pub fn pcr_discharges_unchecked(inst: &ProblemInstance, ratio: f64, d: &[f64]) -> Result<Vec<f64>> {
    inst.check_len(d.len())?;
    let mut state = OnlineState::new(*inst, 1.0)?;
    let mut out = Vec::with_capacity(d.len());
    for &demand in d {
        state.observe(demand)?;
        let delta = state.pursuit_discharge(ratio);
        state.commit(delta, false)?;
        out.push(delta);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst() -> ProblemInstance {
        ProblemInstance::new(2, 4.0, 10.0, 1.0, 10.0).unwrap()
    }

    #[test]
    fn two_slot_example() {
        let mut state = OnlineState::new(inst(), 2.0).unwrap();
        let d1 = pcr_step(&mut state, 2.0, 10.0).unwrap();
        assert!((state.reference_reduction() - 4.0).abs() < 1e-12);
        assert!((d1 - 2.0).abs() < 1e-12);
        let d2 = pcr_step(&mut state, 2.0, 8.0).unwrap();
        assert!((state.reference_reduction() - 3.0).abs() < 1e-12);
        assert_eq!(d2, 0.0);
        assert!((state.used_capacity() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn low_demand_below_running_max_discharges_nothing() {
        let i = ProblemInstance::new(3, 1.0, 10.0, 1.0, 10.0).unwrap();
        let mut state = OnlineState::new(i, 1.5).unwrap();
        pcr_step(&mut state, 1.5, 10.0).unwrap();
        // sigma(d^2)/pi < running_max - d_lb
        assert_eq!(pcr_step(&mut state, 1.5, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn ratio_below_one_rejected() {
        let mut state = OnlineState::new(inst(), 1.0).unwrap();
        assert!(matches!(pcr_step(&mut state, 0.5, 3.0), Err(Error::InvalidRatio(_))));
        assert!(OnlineState::new(inst(), 0.9).is_err());
    }

    #[test]
    fn overdraw_reported() {
        // Rising demands force repeated discharges at ratio one.
        let i = ProblemInstance::new(3, 1.0, 1.0, 1.0, 5.0).unwrap();
        let err = run_pcr(&i, 1.0, &vec![2.0, 3.0, 4.0].into()).unwrap_err();
        assert!(matches!(err, Error::CapacityViolation { .. }));
        let raw = pcr_discharges_unchecked(&i, 1.0, &[2.0, 3.0, 4.0]).unwrap();
        assert!(raw.iter().sum::<f64>() > 1.0);
    }

    #[test]
    fn out_of_bounds_demand_rejected() {
        let mut state = OnlineState::new(inst(), 2.0).unwrap();
        assert!(matches!(
            pcr_step(&mut state, 2.0, 11.0),
            Err(Error::DemandOutOfBounds { .. })
        ));
    }

    #[test]
    fn horizon_overrun_rejected() {
        let mut state = OnlineState::new(inst(), 2.0).unwrap();
        pcr_step(&mut state, 2.0, 5.0).unwrap();
        pcr_step(&mut state, 2.0, 5.0).unwrap();
        assert!(matches!(
            pcr_step(&mut state, 2.0, 5.0),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
