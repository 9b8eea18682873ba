//! Levels of the well bounded by an impenetrable wall at x0 ≤ 0.
//!
//! The states living on x > x0 are D_a(x) with D_a(x0) = 0; each zero in
//! the order a is one level e = a + 1/2. At x0 = 0 these are the odd
//! oscillator levels 2n + 3/2, and as x0 → -∞ they fall to n + 1/2.

use serde::{Deserialize, Serialize};

use super::{Level, LevelLabel, ScaledEnergy, Spectrum, TailBound};
use crate::error::{Error, Result};
use crate::roots::{newton_bracketed, newton_in_sign_bracket};
use crate::specfun::{pcf_scaled_with_derivs, A_MAX};

/// Most negative barrier position accepted.
pub const X0_LIMIT: f64 = 40.0;
/// End of the default expansion stroke.
pub const X0_MIN_DEFAULT: f64 = -12.0;
/// Internal tolerance for positive x0 used by central differences at 0.
const X0_POSITIVE_SLACK: f64 = 0.05;

const SCAN_START: f64 = -0.5 + 0.0123;
const SCAN_STEP: f64 = 0.25;
const ROOT_TOL: f64 = 1e-14;
const PREDICT_HALF_WIDTH: f64 = 0.45;
const PREDICT_MAX_SHIFT: f64 = 0.3;
/// Relative Boltzmann weight of the omitted tail for `LevelCount::Thermal`.
const THERMAL_TAIL: f64 = 1e-15;
const THERMAL_MIN_LEVELS: usize = 8;
/// Where the scan resumes above a found root; below the unit spacing.
const MIN_SPACING_MARGIN: f64 = 0.9;

/// How many Dirichlet levels to find.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LevelCount {
    Fixed(usize),
    /// Enough levels that the omitted Boltzmann tail at this θ is
    /// negligible against the ground-state weight.
    Thermal(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletLevels {
    pub x0: f64,
    pub spectrum: Spectrum,
    /// dE_n/dx0 for each level, in ħω per unit x0.
    pub slopes_dx0: Vec<f64>,
}

impl DirichletLevels {
    pub fn energies(&self) -> Vec<f64> {
        self.spectrum.energies()
    }
}

fn check_x0(x0: f64, slack: f64) -> Result<()> {
    if !x0.is_finite() || x0 > slack || x0 < -X0_LIMIT {
        return Err(Error::Domain(format!(
            "barrier position x0 = {x0} outside [-{X0_LIMIT}, 0]"
        )));
    }
    Ok(())
}

/// D_a(x0) and the Newton ratio D / ∂a D, on a common scale.
fn residual(a: f64, x0: f64) -> (f64, f64) {
    let st = pcf_scaled_with_derivs(a, x0);
    (st.y, st.y / st.ya)
}

fn slope(a: f64, x0: f64) -> f64 {
    let st = pcf_scaled_with_derivs(a, x0);
    -st.yp / st.ya
}

fn refine(x0: f64, lo: f64, hi: f64, guess: f64) -> Result<f64> {
    newton_bracketed(
        |a| residual(a, x0),
        lo,
        hi,
        guess,
        ROOT_TOL,
        "Dirichlet level",
    )
}

/// Plain Newton from a close guess; gives up if it leaves [lo, hi].
fn polish(x0: f64, guess: f64, lo: f64, hi: f64) -> Option<f64> {
    let mut a = guess;
    for _ in 0..8 {
        let (_, step) = residual(a, x0);
        if !step.is_finite() {
            return None;
        }
        a -= step;
        if a <= lo || a >= hi {
            return None;
        }
        // quadratic convergence: the next correction is below rounding
        if step.abs() < 1e-9 {
            return Some(a);
        }
    }
    None
}

fn tail_for(roots: &[f64]) -> TailBound {
    let n = roots.len();
    let last_e = roots.last().map_or(f64::NEG_INFINITY, |a| a + 0.5);
    TailBound {
        next_min: (n as f64 + 0.5).max(last_e + 1.0),
        spacing: 1.0,
        multiplicity: 1.0,
    }
}

fn enough(roots: &[f64], count: LevelCount) -> bool {
    match count {
        LevelCount::Fixed(n) => roots.len() >= n,
        LevelCount::Thermal(theta) => {
            if roots.len() < THERMAL_MIN_LEVELS {
                return false;
            }
            let e0 = roots[0] + 0.5;
            let tail = tail_for(roots);
            tail.boltzmann_tail(theta) * (theta * e0).exp() < THERMAL_TAIL
        }
    }
}

/// Scans upward from `start` and appends roots until `count` is satisfied.
fn extend_by_scan(x0: f64, roots: &mut Vec<f64>, start: f64, count: LevelCount) -> Result<()> {
    let mut lo = start;
    let mut f_lo = residual(lo, x0).0;
    while !enough(roots, count) {
        let hi = lo + SCAN_STEP;
        if hi > A_MAX {
            let tail = tail_for(roots);
            let tolerance = match count {
                LevelCount::Thermal(_) => THERMAL_TAIL,
                LevelCount::Fixed(_) => 0.0,
            };
            return Err(Error::Truncation {
                tail: match count {
                    LevelCount::Thermal(theta) if !roots.is_empty() => {
                        tail.boltzmann_tail(theta) * (theta * (roots[0] + 0.5)).exp()
                    }
                    _ => f64::INFINITY,
                },
                tolerance,
            });
        }
        let f_hi = residual(hi, x0).0;
        if f_hi == 0.0 {
            roots.push(hi);
            lo = hi + 1e-9;
            f_lo = residual(lo, x0).0;
            continue;
        }
        if f_lo.signum() != f_hi.signum() {
            let guess = lo + (hi - lo) * f_lo / (f_lo - f_hi);
            let root = match polish(x0, guess, lo, hi) {
                Some(r) => r,
                None => newton_in_sign_bracket(
                    |a| residual(a, x0),
                    lo,
                    hi,
                    f_lo,
                    f_hi,
                    guess,
                    ROOT_TOL,
                    "Dirichlet level",
                )?,
            };
            roots.push(root);
            // levels are at least one unit apart
            lo = root + MIN_SPACING_MARGIN;
            f_lo = residual(lo, x0).0;
            continue;
        }
        lo = hi;
        f_lo = f_hi;
    }
    Ok(())
}

fn continue_from(x0: f64, seed: &DirichletLevels, count: LevelCount) -> Option<Vec<f64>> {
    let dx = x0 - seed.x0;
    let prev = seed.spectrum.energies();
    let mut roots = Vec::with_capacity(prev.len());
    for (e, s) in prev.iter().zip(&seed.slopes_dx0) {
        // fast-moving levels are left to the scan
        if (s * dx).abs() >= PREDICT_MAX_SHIFT {
            break;
        }
        let guess = e - 0.5 + s * dx;
        let lo = (guess - PREDICT_HALF_WIDTH).max(SCAN_START);
        let hi = guess + PREDICT_HALF_WIDTH;
        let root = match polish(x0, guess, lo, hi) {
            Some(r) => r,
            None => refine(x0, lo, hi, guess).ok()?,
        };
        if let Some(&last) = roots.last() {
            if root <= last + 0.5 {
                return None;
            }
        }
        roots.push(root);
        if let LevelCount::Fixed(n) = count {
            if roots.len() == n {
                break;
            }
        }
    }
    if roots.is_empty() {
        return None;
    }
    // the lowest level must be the true ground state
    let below = residual(roots[0] - PREDICT_HALF_WIDTH, x0).0;
    let floor = residual(SCAN_START, x0).0;
    if roots[0] - PREDICT_HALF_WIDTH > SCAN_START && below.signum() != floor.signum() {
        return None;
    }
    Some(roots)
}

pub(crate) fn solve_dirichlet_unchecked(
    x0: f64,
    count: LevelCount,
    seed: Option<&DirichletLevels>,
) -> Result<DirichletLevels> {
    check_x0(x0, X0_POSITIVE_SLACK)?;
    match count {
        LevelCount::Fixed(0) => {
            return Err(Error::Domain("level count must be at least 1".into()));
        }
        LevelCount::Thermal(theta) if !(theta > 0.0 && theta.is_finite()) => {
            return Err(Error::Domain(format!("theta = {theta} must be positive")));
        }
        _ => {}
    }
    let mut roots = seed
        .and_then(|s| continue_from(x0, s, count))
        .unwrap_or_default();
    if let LevelCount::Fixed(n) = count {
        roots.truncate(n);
    }
    let start = roots.last().map_or(SCAN_START, |a| a + MIN_SPACING_MARGIN);
    extend_by_scan(x0, &mut roots, start, count)?;

    let slopes = roots.iter().map(|&a| slope(a, x0)).collect();
    let tail = tail_for(&roots);
    let n = roots.len();
    let levels = roots
        .iter()
        .enumerate()
        .map(|(i, &a)| Level {
            energy: ScaledEnergy::from_order(a),
            label: LevelLabel::Right(i),
        })
        .collect();
    Ok(DirichletLevels {
        x0,
        spectrum: Spectrum::new(levels, n, tail),
        slopes_dx0: slopes,
    })
}

/// Dirichlet levels and their slopes at x0, optionally continued from a
/// nearby solution.
pub fn solve_dirichlet(
    x0: f64,
    count: LevelCount,
    seed: Option<&DirichletLevels>,
) -> Result<DirichletLevels> {
    check_x0(x0, 0.0)?;
    solve_dirichlet_unchecked(x0, count, seed)
}

/// The lowest `n` levels with the wall at x0.
pub fn dirichlet_levels_at_x0(x0: f64, n: usize) -> Result<Spectrum> {
    Ok(solve_dirichlet(x0, LevelCount::Fixed(n), None)?.spectrum)
}

/// Levels along a path of barrier positions, each continued from the last.
pub fn dirichlet_sweep(x0s: &[f64], count: LevelCount) -> Result<Vec<DirichletLevels>> {
    let mut out: Vec<DirichletLevels> = Vec::with_capacity(x0s.len());
    for &x0 in x0s {
        let next = solve_dirichlet(x0, count, out.last())?;
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wall_at_origin_gives_odd_levels() {
        let e = dirichlet_levels_at_x0(0.0, 10).unwrap().energies();
        for (n, v) in e.iter().enumerate() {
            assert!((v - (2.0 * n as f64 + 1.5)).abs() < 1e-12, "{n}: {v}");
        }
    }

    #[test]
    fn continuation_matches_fresh_scan() {
        let x0s: Vec<f64> = (1..=30).map(|i| -0.1 * i as f64).collect();
        let swept = dirichlet_sweep(&x0s, LevelCount::Fixed(12)).unwrap();
        for lv in swept.iter().step_by(7) {
            let fresh = dirichlet_levels_at_x0(lv.x0, 12).unwrap().energies();
            for (a, b) in lv.energies().iter().zip(&fresh) {
                assert!((a - b).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn slopes_match_differences() {
        let h = 1e-4;
        let x0 = -1.3;
        let mid = solve_dirichlet(x0, LevelCount::Fixed(6), None).unwrap();
        let up = dirichlet_levels_at_x0(x0 + h, 6).unwrap().energies();
        let dn = dirichlet_levels_at_x0(x0 - h, 6).unwrap().energies();
        for n in 0..6 {
            let fd = (up[n] - dn[n]) / (2.0 * h);
            assert!((fd - mid.slopes_dx0[n]).abs() < 1e-6, "{n}");
        }
    }

    #[test]
    fn rejects_positive_and_far_positions() {
        assert!(dirichlet_levels_at_x0(0.1, 3).is_err());
        assert!(dirichlet_levels_at_x0(-41.0, 3).is_err());
        assert!(solve_dirichlet_unchecked(0.004, LevelCount::Fixed(3), None).is_ok());
    }

    #[test]
    fn thermal_count_grows_at_high_temperature() {
        let cold = solve_dirichlet(-1.0, LevelCount::Thermal(5.0), None).unwrap();
        let warm = solve_dirichlet(-1.0, LevelCount::Thermal(1.0), None).unwrap();
        assert!(cold.spectrum.len() >= THERMAL_MIN_LEVELS);
        assert!(warm.spectrum.len() > cold.spectrum.len());
        assert!(matches!(
            solve_dirichlet(-1.0, LevelCount::Thermal(0.05), None),
            Err(Error::Truncation { .. })
        ));
    }
}
