//! Thermodynamic state functions for each stage of the cycle.
//!
//! Every stage has a closed form and a Boltzmann-sum route over the
//! corresponding spectrum; the two are independent and are compared in
//! the test suite. The moving-barrier stage has no closed form and is
//! computed from the Dirichlet spectrum only.

use std::f64::consts::{LN_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::solve_dirichlet_unchecked;
use crate::spectrum::{
    barrier_levels, harmonic_levels, side_levels, solve_dirichlet, DirichletLevels, LevelCount,
    Spectrum,
};

/// Relative truncation tail allowed in a spectral partition function.
pub const TAIL_TOLERANCE: f64 = 1e-13;
/// Finite-difference step in x0 for the barrier force.
pub const FORCE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", content = "x0", rename_all = "snake_case")]
pub enum Stage {
    /// Free oscillator before the barrier is inserted.
    Initial,
    /// Impenetrable barrier at the centre, particle on either side.
    BarrierIn,
    PostMeasureL,
    PostMeasureR,
    /// Particle on the right, wall displaced to x0 ≤ 0.
    Expanding(f64),
}

/// (Z, A, E, S) in natural units: A and E in ħω, S in k_B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoState {
    pub z: f64,
    pub a_free: f64,
    pub e_avg: f64,
    pub s: f64,
    pub theta: f64,
    pub stage: Stage,
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::Domain(format!(
            "theta = {theta} must be positive and finite"
        )));
    }
    Ok(())
}

/// ln(1 - e^{-x}) for x > 0.
fn ln1m_exp(x: f64) -> f64 {
    if x < LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

/// x e^{-x} / (1 - e^{-x}), the thermal excitation term.
fn bose_term(x: f64) -> f64 {
    x / x.exp_m1()
}

/// Closed-form state functions for the four fixed stages.
pub fn closed_form(stage: Stage, theta: f64) -> Result<ThermoState> {
    check_theta(theta)?;
    let t = theta;
    // (ln z, e_avg, s)
    let (ln_z, e_avg, s) = match stage {
        Stage::Initial => {
            let ln_z = -0.5 * t - ln1m_exp(t);
            let e = 0.5 + 1.0 / t.exp_m1();
            let s = bose_term(t) - ln1m_exp(t);
            (ln_z, e, s)
        }
        Stage::BarrierIn | Stage::PostMeasureL | Stage::PostMeasureR => {
            // one side: levels 2n + 3/2
            let ln_z_side = -1.5 * t - ln1m_exp(2.0 * t);
            let e = 1.5 + 2.0 / (2.0 * t).exp_m1();
            let s_side = bose_term(2.0 * t) - ln1m_exp(2.0 * t);
            if stage == Stage::BarrierIn {
                (ln_z_side + LN_2, e, s_side + LN_2)
            } else {
                (ln_z_side, e, s_side)
            }
        }
        Stage::Expanding(_) => {
            return Err(Error::NoClosedForm(
                "the moving-barrier stage has only a spectral form".into(),
            ))
        }
    };
    Ok(ThermoState {
        z: ln_z.exp(),
        a_free: -ln_z / t,
        e_avg,
        s,
        theta: t,
        stage,
    })
}

/// Boltzmann sums over a truncated spectrum, with a checked tail.
pub fn from_spectrum(spec: &Spectrum, theta: f64, stage: Stage) -> Result<ThermoState> {
    check_theta(theta)?;
    let energies = spec.energies();
    let e_min = *energies
        .first()
        .ok_or_else(|| Error::Domain("empty spectrum".into()))?;
    let mut w_sum = 0.0;
    let mut we_sum = 0.0;
    for &e in &energies {
        let w = (-theta * (e - e_min)).exp();
        w_sum += w;
        we_sum += w * (e - e_min);
    }
    let tail = spec.tail().boltzmann_tail(theta) * (theta * e_min).exp() / w_sum;
    if tail.is_nan() || tail >= TAIL_TOLERANCE {
        return Err(Error::Truncation {
            tail,
            tolerance: TAIL_TOLERANCE,
        });
    }
    let ln_z = w_sum.ln() - theta * e_min;
    let mean_shift = we_sum / w_sum;
    Ok(ThermoState {
        z: ln_z.exp(),
        a_free: -ln_z / theta,
        e_avg: e_min + mean_shift,
        s: w_sum.ln() + theta * mean_shift,
        theta,
        stage,
    })
}

/// Smallest level count (at least `min_levels`) whose truncation tail at
/// θ passes the spectral-sum check for a closed-form spectrum.
pub fn thermal_level_count(theta: f64, spacing: f64, min_levels: usize) -> Result<usize> {
    check_theta(theta)?;
    // tail/z ≤ e^{-θ spacing n} / (1 - e^{-θ spacing}), up to O(1)
    let x = theta * spacing;
    let need = (-(TAIL_TOLERANCE * 1e-2).ln() - ln1m_exp(x)) / x;
    Ok(min_levels.max(need.ceil() as usize + 1))
}

/// Spectrum of a fixed stage, deep enough for a spectral sum at θ.
pub fn stage_spectrum(stage: Stage, theta: f64, min_levels: usize) -> Result<Spectrum> {
    match stage {
        Stage::Initial => harmonic_levels(thermal_level_count(theta, 1.0, min_levels)?),
        Stage::BarrierIn => {
            barrier_levels(f64::INFINITY, thermal_level_count(theta, 2.0, min_levels)?)
        }
        Stage::PostMeasureL => side_levels(thermal_level_count(theta, 2.0, min_levels)?, false),
        Stage::PostMeasureR => side_levels(thermal_level_count(theta, 2.0, min_levels)?, true),
        Stage::Expanding(_) => Err(Error::Domain(
            "use expansion_state for the moving-barrier stage".into(),
        )),
    }
}

/// State of the right-localized particle with the wall at x0.
pub fn expansion_state(x0: f64, theta: f64, count: LevelCount) -> Result<ThermoState> {
    let levels = solve_dirichlet(x0, count, None)?;
    from_spectrum(&levels.spectrum, theta, Stage::Expanding(x0))
}

/// A(x0) for the right-localized particle, in ħω.
pub fn free_energy_of_expansion(x0: f64, theta: f64, count: LevelCount) -> Result<f64> {
    Ok(expansion_state(x0, theta, count)?.a_free)
}

fn free_energy_near(x0: f64, theta: f64, n: usize, seed: &DirichletLevels) -> Result<f64> {
    let lv = solve_dirichlet_unchecked(x0, LevelCount::Fixed(n), Some(seed))?;
    Ok(from_spectrum(&lv.spectrum, theta, Stage::Expanding(x0))?.a_free)
}

/// F = -dA/dq0 by a five-point difference in x0 with one Richardson
/// step (h and 2h), in ħω per unit q0.
pub fn force_on_barrier(x0: f64, theta: f64, count: LevelCount) -> Result<f64> {
    check_theta(theta)?;
    let centre = solve_dirichlet(x0, count, None)?;
    let n = centre.spectrum.len();
    let h = FORCE_STEP;
    let a = |k: f64| free_energy_near(x0 + k * h, theta, n, &centre);
    let (p1, m1, p2, m2, p4, m4) = (a(1.0)?, a(-1.0)?, a(2.0)?, a(-2.0)?, a(4.0)?, a(-4.0)?);
    let d_h = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
    let d_2h = (8.0 * (p2 - m2) - (p4 - m4)) / (24.0 * h);
    let da_dx0 = (16.0 * d_h - d_2h) / 15.0;
    Ok(-SQRT_2 * da_dx0)
}

/// F = -Σ p_n dE_n/dq0 from the level slopes, in ħω per unit q0.
pub fn force_from_slopes(levels: &DirichletLevels, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let energies = levels.energies();
    let e_min = energies[0];
    let mut w_sum = 0.0;
    let mut ws_sum = 0.0;
    for (e, s) in energies.iter().zip(&levels.slopes_dx0) {
        let w = (-theta * (e - e_min)).exp();
        w_sum += w;
        ws_sum += w * s;
    }
    Ok(-SQRT_2 * ws_sum / w_sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcePrefactor {
    /// -(1/√π) (1 - e^{-2θ})^{-1/2}
    MainText,
    /// -(2/√π) (1 - e^{-2θ})^{-1/2}
    Appendix,
}

impl ForcePrefactor {
    pub fn factor(self) -> f64 {
        match self {
            ForcePrefactor::MainText => 1.0,
            ForcePrefactor::Appendix => 2.0,
        }
    }
}

/// Analytic force at the start of the expansion, x0 = 0, in ħω per unit q0.
pub fn initial_force_closed_form(theta: f64, which: ForcePrefactor) -> Result<f64> {
    check_theta(theta)?;
    Ok(-which.factor() / PI.sqrt() / (-(-2.0 * theta).exp_m1()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_stage_values() {
        let s = closed_form(Stage::Initial, 1.0).unwrap();
        assert!((s.z - 0.5 / 0.5f64.sinh()).abs() < 1e-15);
        assert!((s.z - 0.959_517_375_6).abs() < 1e-10);
        let cold = closed_form(Stage::Initial, 50.0).unwrap();
        assert!((cold.e_avg - 0.5).abs() < 1e-15);
        assert!(cold.s < 1e-15);
        let hot = closed_form(Stage::Initial, 0.01).unwrap();
        assert!((hot.e_avg - 100.0).abs() < 1.0);
        assert!(closed_form(Stage::Initial, 0.0).is_err());
    }

    #[test]
    fn identities_hold_for_every_stage() {
        for &t in &[0.01, 0.05, 0.5, 1.0, 5.0, 50.0, 100.0] {
            for stage in [
                Stage::Initial,
                Stage::BarrierIn,
                Stage::PostMeasureL,
                Stage::PostMeasureR,
            ] {
                let st = closed_form(stage, t).unwrap();
                assert!((st.a_free + st.z.ln() / t).abs() < 1e-12 * st.a_free.abs().max(1.0));
                assert!((st.s - t * (st.e_avg - st.a_free)).abs() < 1e-12 * st.s.abs().max(1.0));
            }
        }
    }

    #[test]
    fn barrier_stage_closed_forms() {
        let t: f64 = 0.7;
        let b = closed_form(Stage::BarrierIn, t).unwrap();
        assert!((b.z - (-t / 2.0).exp() / t.sinh()).abs() < 1e-14);
        assert!((b.a_free - (t.sinh().ln() / t + 0.5)).abs() < 1e-14);
        assert!((b.e_avg - (1.0 / t.tanh() + 0.5)).abs() < 1e-14);
        let r = closed_form(Stage::PostMeasureR, t).unwrap();
        assert!((r.z - b.z / 2.0).abs() < 1e-15);
        assert_eq!(r.e_avg, b.e_avg);
        assert!((r.s - b.s + LN_2).abs() < 1e-15);
    }

    #[test]
    fn insertion_and_expansion_free_energy_changes() {
        for &t in &[0.5f64, 5.0, 50.0] {
            let a_in = closed_form(Stage::Initial, t).unwrap().a_free;
            let a_b = closed_form(Stage::BarrierIn, t).unwrap().a_free;
            let a_r = closed_form(Stage::PostMeasureR, t).unwrap().a_free;
            let lncosh = (0.5 * t).cosh().ln();
            assert!((a_b - a_in - (0.5 + lncosh / t)).abs() < 1e-12);
            assert!((a_r - a_b - LN_2 / t).abs() < 1e-12);
            assert!((a_in - a_r - (-0.5 - lncosh / t - LN_2 / t)).abs() < 1e-12);
        }
    }

    #[test]
    fn high_temperature_limits() {
        let t = 0.001;
        let s_in = closed_form(Stage::Initial, t).unwrap().s;
        let s_b = closed_form(Stage::BarrierIn, t).unwrap().s;
        // leading log plus the classical constant 1
        assert!((s_in - (1.0 / t).ln() - 1.0).abs() < 1e-3);
        assert!((s_in - s_b).abs() < 2e-3);
        let s_r = closed_form(Stage::PostMeasureR, 50.0).unwrap().s;
        assert!(s_r >= -1e-10);
    }

    #[test]
    fn spectral_sums_match_closed_forms() {
        for &t in &[0.05, 0.2, 1.0, 5.0, 50.0] {
            for stage in [
                Stage::Initial,
                Stage::BarrierIn,
                Stage::PostMeasureL,
                Stage::PostMeasureR,
            ] {
                let cf = closed_form(stage, t).unwrap();
                let spec = stage_spectrum(stage, t, 64).unwrap();
                let sp = from_spectrum(&spec, t, stage).unwrap();
                assert!(((sp.z - cf.z) / cf.z).abs() < 1e-9, "{stage:?} {t}");
                assert!((sp.s - cf.s).abs() < 1e-8, "{stage:?} {t}");
                assert!((sp.e_avg - cf.e_avg).abs() < 1e-9 * cf.e_avg);
            }
        }
    }

    #[test]
    fn short_spectrum_is_rejected() {
        let spec = harmonic_levels(64).unwrap();
        assert!(matches!(
            from_spectrum(&spec, 0.05, Stage::Initial),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn expansion_endpoints() {
        let t = 1.0;
        let a0 = free_energy_of_expansion(0.0, t, LevelCount::Thermal(t)).unwrap();
        let r = closed_form(Stage::PostMeasureR, t).unwrap().a_free;
        assert!((a0 - r).abs() < 1e-12);
        let far = free_energy_of_expansion(-10.0, t, LevelCount::Thermal(t)).unwrap();
        let a_in = closed_form(Stage::Initial, t).unwrap().a_free;
        assert!((far - a_in).abs() < 1e-6);
    }

    #[test]
    fn free_energy_increases_with_x0() {
        let t = 1.0;
        let mut prev = f64::NEG_INFINITY;
        for i in (0..=16).rev() {
            let x0 = -0.5 * i as f64;
            let a = free_energy_of_expansion(x0, t, LevelCount::Fixed(64)).unwrap();
            assert!(a >= prev);
            prev = a;
        }
    }

    #[test]
    fn two_force_routes_agree() {
        for &(x0, t) in &[(0.0, 1.0), (-0.7, 1.0), (-2.5, 0.5), (0.0, 50.0)] {
            let fd = force_on_barrier(x0, t, LevelCount::Thermal(t)).unwrap();
            let lv = solve_dirichlet(x0, LevelCount::Thermal(t), None).unwrap();
            let sl = force_from_slopes(&lv, t).unwrap();
            assert!(fd < 0.0);
            assert!(((fd - sl) / sl).abs() < 1e-6, "x0={x0} θ={t}: {fd} vs {sl}");
        }
    }

    #[test]
    fn initial_force_verdict_is_appendix() {
        for &t in &[1.0, 50.0] {
            let fd = force_on_barrier(0.0, t, LevelCount::Thermal(t)).unwrap();
            let app = initial_force_closed_form(t, ForcePrefactor::Appendix).unwrap();
            let main = initial_force_closed_form(t, ForcePrefactor::MainText).unwrap();
            assert!(((fd - app) / app).abs() < 1e-6, "θ={t}: {fd} vs {app}");
            assert!(((fd - main) / main).abs() > 0.5);
        }
        let far = force_on_barrier(-10.0, 1.0, LevelCount::Thermal(1.0)).unwrap();
        assert!(far.abs() < 1e-6);
    }
}
