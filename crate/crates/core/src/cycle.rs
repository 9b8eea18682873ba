//! One engine cycle: insertion, measurement, expansion, reset.
//!
//! Work signs: `w_insert` is work done on the particle by the demon,
//! `w_extract` is work delivered by the particle to the demon. All work in
//! ħω, entropy in k_B.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::demon::{self, JointState, PointerState};
use crate::error::{Error, Result};
use crate::spectrum::{solve_dirichlet, DirichletLevels, LevelCount, DEFAULT_LEVELS, X0_LIMIT};
use crate::thermo::{self, closed_form, force_from_slopes, from_spectrum, Stage};

pub const DEFAULT_POINTS: usize = 400;
/// Grid point closest to the origin in the default expansion grid.
pub const GRID_NEAR: f64 = -1e-3;
/// Grid points per continuation chunk; sweeps restart the level scan at
/// each chunk so results do not depend on the worker count.
pub const CHUNK: usize = 40;

/// `points` log-spaced positions from `near` to `far` (both negative,
/// |near| < |far|), in order of increasing |x0|.
pub fn log_grid(near: f64, far: f64, points: usize) -> Result<Vec<f64>> {
    if !(near < 0.0 && far < near) || points < 2 {
        return Err(Error::Domain(format!(
            "log grid needs far < near < 0 and at least 2 points (near {near}, far {far}, {points} points)"
        )));
    }
    let (l0, l1) = ((-near).ln(), (-far).ln());
    let step = (l1 - l0) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                far
            } else {
                -(l0 + step * i as f64).exp()
            }
        })
        .collect())
}

/// 0 followed by the default log grid out to `far`.
pub fn expansion_grid(far: f64, points: usize) -> Result<Vec<f64>> {
    let mut g = vec![0.0];
    g.extend(log_grid(GRID_NEAR, far, points)?);
    Ok(g)
}

/// The default grid: 0, then 400 points from -1e-3 to -12.
pub fn default_x0_grid() -> Vec<f64> {
    expansion_grid(crate::spectrum::X0_MIN_DEFAULT, DEFAULT_POINTS).expect("valid default grid")
}

/// Wall position beyond which the thermally relevant levels no longer
/// feel the wall: twice the classical turning radius of energy 25/θ + 2,
/// plus a margin.
pub fn expansion_end(theta: f64) -> f64 {
    let e_c = 25.0 / theta + 2.0;
    -(2.0 * e_c.sqrt() + 4.0).clamp(12.0, X0_LIMIT)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionPoint {
    pub x0: f64,
    /// A(x0), ħω.
    pub a_free: f64,
    /// F = -dA/dq0 from the level slopes, ħω per unit q0.
    pub force: f64,
    pub energies: Vec<f64>,
}

fn point_from_levels(levels: &DirichletLevels, theta: f64) -> Result<ExpansionPoint> {
    let st = from_spectrum(&levels.spectrum, theta, Stage::Expanding(levels.x0))?;
    Ok(ExpansionPoint {
        x0: levels.x0,
        a_free: st.a_free,
        force: force_from_slopes(levels, theta)?,
        energies: levels.energies(),
    })
}

fn chunk_curve(theta: f64, chunk: &[f64], count: LevelCount) -> Result<Vec<ExpansionPoint>> {
    let mut prev: Option<DirichletLevels> = None;
    let mut out = Vec::with_capacity(chunk.len());
    for &x0 in chunk {
        let lv = solve_dirichlet(x0, count, prev.as_ref())?;
        out.push(point_from_levels(&lv, theta)?);
        prev = Some(lv);
    }
    Ok(out)
}

/// (x0, A, F) along a grid of wall positions. Chunks of the grid are
/// evaluated in parallel when the `parallel` feature is on.
pub fn expansion_work_curve(
    theta: f64,
    x0_grid: &[f64],
    count: LevelCount,
) -> Result<Vec<ExpansionPoint>> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::Domain(format!(
            "theta = {theta} must be positive and finite"
        )));
    }
    if x0_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("x0 grid must be strictly descending".into()));
    }
    let chunks: Vec<&[f64]> = x0_grid.chunks(CHUNK).collect();
    #[cfg(feature = "parallel")]
    let parts: Vec<Result<Vec<ExpansionPoint>>> = {
        use rayon::prelude::*;
        chunks
            .par_iter()
            .map(|c| chunk_curve(theta, c, count))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Result<Vec<ExpansionPoint>>> = chunks
        .iter()
        .map(|c| chunk_curve(theta, c, count))
        .collect();
    let mut out = Vec::with_capacity(x0_grid.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkIntegral {
    /// ∫ F dq0 taken with x0 increasing, ħω.
    pub value: f64,
    /// |T_h - T_2h| / 3 on the log-spaced part.
    pub error_estimate: f64,
}

/// ∫ F dq0 over the curve, x0 ascending. The part away from the origin is
/// integrated by trapezoids in u = ln(-x0) with one Richardson step, a
/// point at x0 = 0 by a plain trapezoid to its neighbour.
pub fn work_integral(curve: &[ExpansionPoint]) -> Result<WorkIntegral> {
    let mut pts: Vec<&ExpansionPoint> = curve.iter().collect();
    pts.sort_by(|a, b| b.x0.total_cmp(&a.x0));
    if pts.len() < 2 || pts.last().is_some_and(|p| p.x0 > 0.0) || pts[0].x0 > 0.0 {
        return Err(Error::Domain(
            "work integral needs at least 2 points with x0 <= 0".into(),
        ));
    }
    let mut total = 0.0;
    let mut rest = &pts[..];
    if pts[0].x0 == 0.0 {
        let (a, b) = (pts[0], pts[1]);
        total += 0.5 * (a.force + b.force) * (a.x0 - b.x0) / SQRT_2;
        rest = &pts[1..];
    }
    // x0 = -e^u, dq0 = x0 du / √2; g = -F x0 / √2 integrated over
    // increasing u gives the integral with x0 ascending
    let u: Vec<f64> = rest.iter().map(|p| (-p.x0).ln()).collect();
    let g: Vec<f64> = rest.iter().map(|p| -p.force * p.x0 / SQRT_2).collect();
    let n = u.len() - 1;
    let mut t_h = 0.0;
    for i in 0..n {
        t_h += 0.5 * (g[i] + g[i + 1]) * (u[i + 1] - u[i]);
    }
    let mut t_2h = 0.0;
    let even = n - n % 2;
    for i in (0..even).step_by(2) {
        t_2h += 0.5 * (g[i] + g[i + 2]) * (u[i + 2] - u[i]);
    }
    for i in even..n {
        t_2h += 0.5 * (g[i] + g[i + 1]) * (u[i + 1] - u[i]);
    }
    let corrected = if even >= 2 {
        t_h + (t_h - t_2h) / 3.0
    } else {
        t_h
    };
    total += corrected;
    Ok(WorkIntegral {
        value: total,
        error_estimate: (t_h - t_2h).abs() / 3.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResetSource {
    /// Pointer entropy of the measured joint density matrix.
    DemonState,
    /// Particle entropy drop across the measurement.
    EntropyDrop,
}

/// The ledger recomputed from spectra, level sums and quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCheck {
    pub w_insert: f64,
    pub ds_measure: f64,
    pub w_extract: f64,
    pub w_reset_min: f64,
    pub net_gain_full: f64,
    pub x0_end: f64,
    /// A(x0_end) - A_in from spectral sums; the unrecovered remainder.
    pub end_residual: f64,
    pub quadrature_error: f64,
    pub reset_source: ResetSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CrossCheck {
    Done(SpectralCheck),
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleLedger {
    pub theta: f64,
    /// A_⊥ - A_in.
    pub w_insert: f64,
    /// S_R - S_⊥.
    pub ds_measure: f64,
    /// A_R - A_in.
    pub w_extract: f64,
    /// (1/θ) ln 2.
    pub w_reset_min: f64,
    pub net_gain_naive: f64,
    pub net_gain_full: f64,
    pub spectral: CrossCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleOptions {
    pub min_levels: usize,
    pub points: usize,
    pub spectral: bool,
}

impl Default for CycleOptions {
    fn default() -> Self {
        CycleOptions {
            min_levels: DEFAULT_LEVELS,
            points: DEFAULT_POINTS,
            spectral: true,
        }
    }
}

/// Largest joint dimension handed to the dense eigensolver for the reset
/// cross-check.
const DEMON_MAX_PAIRS: usize = 100;

pub fn run_cycle(theta: f64, opts: &CycleOptions) -> Result<CycleLedger> {
    let a_in = closed_form(Stage::Initial, theta)?.a_free;
    let perp = closed_form(Stage::BarrierIn, theta)?;
    let right = closed_form(Stage::PostMeasureR, theta)?;
    let w_insert = perp.a_free - a_in;
    let w_extract = right.a_free - a_in;
    let w_reset_min = demon::landauer_bound(theta);
    let net_gain_naive = w_extract - w_insert;
    let spectral = if opts.spectral {
        match spectral_check(theta, opts) {
            Ok(c) => CrossCheck::Done(c),
            Err(e @ Error::Truncation { .. }) => CrossCheck::Skipped {
                reason: format!("spectral sums infeasible at this temperature: {e}"),
            },
            Err(e) => return Err(e),
        }
    } else {
        CrossCheck::Skipped {
            reason: "disabled".into(),
        }
    };
    Ok(CycleLedger {
        theta,
        w_insert,
        ds_measure: right.s - perp.s,
        w_extract,
        w_reset_min,
        net_gain_naive,
        net_gain_full: net_gain_naive - w_reset_min,
        spectral,
    })
}

fn spectral_check(theta: f64, opts: &CycleOptions) -> Result<SpectralCheck> {
    let sum = |stage| -> Result<thermo::ThermoState> {
        from_spectrum(
            &thermo::stage_spectrum(stage, theta, opts.min_levels)?,
            theta,
            stage,
        )
    };
    let init = sum(Stage::Initial)?;
    let perp = sum(Stage::BarrierIn)?;
    let right = sum(Stage::PostMeasureR)?;

    let x0_end = expansion_end(theta);
    let grid = expansion_grid(x0_end, opts.points)?;
    let curve = expansion_work_curve(theta, &grid, LevelCount::Thermal(theta))?;
    let work = work_integral(&curve)?;
    let end = curve.last().expect("non-empty grid");

    let ds_measure = right.s - perp.s;
    let n_pair = (-(1e-12f64).ln() / (2.0 * theta)).ceil() as usize;
    let (w_reset_min, reset_source) = if n_pair <= DEMON_MAX_PAIRS {
        let before = JointState::product(
            &demon::rho_perp(theta, n_pair)?,
            &PointerState::neutral(),
            theta,
        )?;
        let after = demon::measure(&before)?;
        let reset = demon::reset_cost(theta, &after.pointer())?;
        (reset.w_min, ResetSource::DemonState)
    } else {
        (-ds_measure / theta, ResetSource::EntropyDrop)
    };
    let w_insert = perp.a_free - init.a_free;
    // work delivered while the wall moves left: -∫ F dq0 along the path
    let w_extract = -work.value;
    Ok(SpectralCheck {
        w_insert,
        ds_measure,
        w_extract,
        w_reset_min,
        net_gain_full: w_extract - w_insert - w_reset_min,
        x0_end,
        end_residual: end.a_free - init.a_free,
        quadrature_error: work.error_estimate,
        reset_source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn grids() {
        let g = default_x0_grid();
        assert_eq!(g.len(), 401);
        assert_eq!(g[0], 0.0);
        assert!((g[1] + 1e-3).abs() < 1e-15);
        assert_eq!(*g.last().unwrap(), -12.0);
        assert!(log_grid(0.0, -1.0, 4).is_err());
        assert_eq!(expansion_end(1.0), -(2.0 * 27f64.sqrt() + 4.0));
        assert_eq!(expansion_end(50.0), -12.0);
    }

    #[test]
    fn closed_form_ledger_closes() {
        for &t in &[0.01, 0.2, 1.0, 5.0, 50.0] {
            let l = run_cycle(
                t,
                &CycleOptions {
                    spectral: false,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(l.w_insert > 0.0);
            assert!((l.ds_measure + LN_2).abs() < 1e-12);
            assert!((l.w_extract - l.w_insert - LN_2 / t).abs() < 1e-10 * l.w_extract.max(1.0));
            assert!((l.net_gain_naive - LN_2 / t).abs() < 1e-10 * l.net_gain_naive.max(1.0));
            assert!(l.net_gain_full.abs() < 1e-12 * l.w_extract.max(1.0));
        }
        let cold = run_cycle(
            50.0,
            &CycleOptions {
                spectral: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((cold.w_insert - (0.5 + 25f64.cosh().ln() / 50.0)).abs() < 1e-12);
    }

    #[test]
    fn quadrature_matches_endpoints() {
        let t = 1.0;
        let grid = expansion_grid(-12.0, 120).unwrap();
        let curve = expansion_work_curve(t, &grid, LevelCount::Thermal(t)).unwrap();
        let w = work_integral(&curve).unwrap();
        let d_a = curve.last().unwrap().a_free - curve[0].a_free;
        assert!(
            (w.value - d_a).abs() < 1e-4 * d_a.abs(),
            "{} vs {d_a}",
            w.value
        );
        for p in &curve {
            assert!(p.force <= 0.0);
        }
        for w in curve.windows(2) {
            assert!(w[1].a_free <= w[0].a_free + 1e-13);
        }
    }

    #[test]
    fn chunking_is_deterministic() {
        let grid = expansion_grid(-3.0, 40).unwrap();
        let a = expansion_work_curve(1.0, &grid, LevelCount::Fixed(40)).unwrap();
        let b = expansion_work_curve(1.0, &grid, LevelCount::Fixed(40)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn low_temperature_check_is_skipped() {
        let l = run_cycle(0.05, &CycleOptions::default()).unwrap();
        assert!(matches!(l.spectral, CrossCheck::Skipped { .. }));
    }
}
