//! The acceptance checks, each returning a pass/fail outcome with detail.

use std::f64::consts::{LN_2, PI, SQRT_2};
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cycle::{self, CrossCheck, CycleOptions};
use crate::demon::{self, JointState, PointerState};
use crate::error::Result;
use crate::spectrum::{
    dirichlet_levels_at_x0, even_levels_at_g, general_dE_dq0, series_identity_check, slope_factor,
    solve_dirichlet, LevelCount, ScaledEnergy,
};
use crate::thermo::{
    closed_form, force_on_barrier, free_energy_of_expansion, from_spectrum,
    initial_force_closed_form, stage_spectrum, ForcePrefactor, Stage,
};
use crate::tolerances as tol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    /// Skips the full work-integral sweep and the θ = 0.2 cycle.
    pub quick: bool,
    /// Prefactor the force check expects to win; the default is the one
    /// the finite-difference oracle selects. Setting the other one is a
    /// negative control.
    pub expected_prefactor: ForcePrefactor,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            quick: false,
            expected_prefactor: ForcePrefactor::Appendix,
        }
    }
}

/// Bookkeeping for one check: worst error seen and whether it stayed in
/// tolerance.
struct Tally {
    ok: bool,
    notes: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            ok: true,
            notes: Vec::new(),
        }
    }

    fn expect(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.ok = false;
            self.notes.push(what.into());
        }
    }
}

fn finish(
    id: u8,
    name: &str,
    start: Instant,
    limit_s: Option<f64>,
    body: Result<(Tally, String)>,
) -> CheckOutcome {
    let elapsed_s = start.elapsed().as_secs_f64();
    let (passed, detail) = match body {
        Ok((mut t, summary)) => {
            if let Some(l) = limit_s {
                t.expect(
                    elapsed_s < l,
                    format!("runtime {elapsed_s:.2} s over {l} s"),
                );
            }
            let detail = if t.notes.is_empty() {
                summary
            } else {
                format!("{summary}; FAILED: {}", t.notes.join("; "))
            };
            (t.ok, detail)
        }
        Err(e) => (false, format!("error: {e}")),
    };
    CheckOutcome {
        id,
        name: name.to_string(),
        passed,
        detail,
        elapsed_s,
    }
}

const FIXED_STAGES: [Stage; 4] = [
    Stage::Initial,
    Stage::BarrierIn,
    Stage::PostMeasureL,
    Stage::PostMeasureR,
];

pub fn check_closed_vs_spectral() -> CheckOutcome {
    let start = Instant::now();
    let body = (|| {
        let mut t = Tally::new();
        let (mut worst_z, mut worst_s) = (0.0f64, 0.0f64);
        for &theta in &tol::THETAS_THERMO {
            for stage in FIXED_STAGES {
                let cf = closed_form(stage, theta)?;
                let sp = from_spectrum(
                    &stage_spectrum(stage, theta, crate::spectrum::DEFAULT_LEVELS)?,
                    theta,
                    stage,
                )?;
                let dz = ((sp.z - cf.z) / cf.z).abs();
                let da = ((sp.a_free - cf.a_free) / cf.a_free).abs();
                let de = ((sp.e_avg - cf.e_avg) / cf.e_avg).abs();
                let ds = (sp.s - cf.s).abs();
                worst_z = worst_z.max(dz).max(da).max(de);
                worst_s = worst_s.max(ds);
                t.expect(
                    dz < tol::Z_REL && da < tol::Z_REL && de < tol::Z_REL,
                    format!("{stage:?} θ={theta}: rel Z/A/E gap {dz:.1e}/{da:.1e}/{de:.1e}"),
                );
                t.expect(
                    ds < tol::S_ABS,
                    format!("{stage:?} θ={theta}: S gap {ds:.1e}"),
                );
            }
        }
        Ok((
            t,
            format!("max rel gap Z/A/E {worst_z:.1e}, max S gap {worst_s:.1e}"),
        ))
    })();
    finish(
        1,
        "closed form vs level sums",
        start,
        Some(tol::THERMO_RUNTIME_S),
        body,
    )
}

pub fn check_barrier_limit() -> CheckOutcome {
    let start = Instant::now();
    let body = (|| {
        let mut t = Tally::new();
        let e = even_levels_at_g(tol::BARRIER_LIMIT_G, tol::BARRIER_LIMIT_KMAX + 1)?.energies();
        let mut worst = 0.0f64;
        for (k, v) in e.iter().enumerate() {
            let gap = (v - (2.0 * k as f64 + 1.5)).abs();
            worst = worst.max(gap);
            t.expect(
                gap < tol::BARRIER_LIMIT_ABS,
                format!("k={k}: gap {gap:.1e}"),
            );
        }
        Ok((t, format!("max |e_2k - (2k+3/2)| = {worst:.1e} at g = 1e8")))
    })();
    finish(
        2,
        "barrier insertion limit",
        start,
        Some(tol::BARRIER_RUNTIME_S),
        body,
    )
}

pub fn check_entropy_drop() -> CheckOutcome {
    let start = Instant::now();
    let body = (|| {
        let mut t = Tally::new();
        let mut worst = 0.0f64;
        for &theta in &tol::THETAS_THERMO {
            let perp = closed_form(Stage::BarrierIn, theta)?.s;
            for stage in [Stage::PostMeasureL, Stage::PostMeasureR] {
                let gap = (closed_form(stage, theta)?.s - perp + LN_2).abs();
                worst = worst.max(gap);
                t.expect(
                    gap < tol::ENTROPY_DROP_ABS,
                    format!("{stage:?} θ={theta}: {gap:.1e}"),
                );
            }
        }
        Ok((t, format!("max |ΔS + ln 2| = {worst:.1e}")))
    })();
    finish(3, "entropy drop of one bit", start, None, body)
}

pub fn check_expansion_endpoints() -> CheckOutcome {
    let start = Instant::now();
    let body = (|| {
        let mut t = Tally::new();
        let theta = tol::EXPANSION_THETA;
        let count = LevelCount::Thermal(theta);
        let a_far = free_energy_of_expansion(tol::EXPANSION_FAR_X0, theta, count)?;
        let a_in = closed_form(Stage::Initial, theta)?.a_free;
        let f_far = force_on_barrier(tol::EXPANSION_FAR_X0, theta, count)?;
        let gap = (a_far - a_in).abs();
        t.expect(
            gap < tol::EXPANSION_ENDPOINT_ABS,
            format!("A gap {gap:.1e}"),
        );
        t.expect(
            f_far.abs() < tol::EXPANSION_ENDPOINT_ABS,
            format!("F = {f_far:.1e}"),
        );
        Ok((
            t,
            format!(
                "|A(-10) - A_in| = {gap:.1e}, |F(-10)| = {:.1e}",
                f_far.abs()
            ),
        ))
    })();
    finish(4, "expansion endpoints", start, None, body)
}

/// Which prefactor the finite-difference force at x0 = 0 selects, if any.
pub fn force_verdict(theta: f64) -> Result<(f64, Option<ForcePrefactor>)> {
    let fd = force_on_barrier(0.0, theta, LevelCount::Thermal(theta))?;
    let mut winners = Vec::new();
    for which in [ForcePrefactor::MainText, ForcePrefactor::Appendix] {
        let cf = initial_force_closed_form(theta, which)?;
        if ((fd - cf) / cf).abs() < tol::FORCE_REL {
            winners.push(which);
        }
    }
    Ok((
        fd,
        if winners.len() == 1 {
            Some(winners[0])
        } else {
            None
        },
    ))
}

pub fn check_force_prefactor(expected: ForcePrefactor) -> CheckOutcome {
    let start = Instant::now();
    let body = (|| {
        let mut t = Tally::new();
        let theta = tol::FORCE_THETA;
        let (fd, winner) = force_verdict(theta)?;
        let main = initial_force_closed_form(theta, ForcePrefactor::MainText)?;
        let app = initial_force_closed_form(theta, ForcePrefactor::Appendix)?;
        t.expect(winner.is_some(), "no unique prefactor matches");
        t.expect(
            winner == Some(expected),
            format!("expected {expected:?}, oracle selects {winner:?}"),
        );
        let name = match winner {
            Some(ForcePrefactor::Appendix) => "-2/sqrt(pi) (appendix form)",
            Some(ForcePrefactor::MainText) => "-1/sqrt(pi) (main-text form)",
            None => "none",
        };
        Ok((
            t,
            format!("F_fd(0) = {fd:.7} vs {main:.7} / {app:.7}; winner {name}"),
        ))
    })();
    finish(5, "initial force prefactor", start, None, body)
}

pub fn check_appendix_slope() -> CheckOutcome {
    let start = Instant::now();
    let body = (|| {
        let mut t = Tally::new();
        let n_levels = tol::SLOPE_NMAX + 1;
        let h = tol::SLOPE_FD_STEP;
        let e0 = solve_dirichlet(0.0, LevelCount::Fixed(n_levels), None)?.energies();
        let e1 = dirichlet_levels_at_x0(-h, n_levels)?.energies();
        let e2 = dirichlet_levels_at_x0(-2.0 * h, n_levels)?.energies();
        let (mut worst_cf, mut worst_fd) = (0.0f64, 0.0f64);
        for n in 0..=tol::SLOPE_NMAX {
            let closed = slope_factor(n) / PI.sqrt();
            let general = general_dE_dq0(ScaledEnergy::new(2.0 * n as f64 + 1.5))?;
            let rel = ((general - closed) / closed).abs();
            let fd = SQRT_2 * (3.0 * e0[n] - 4.0 * e1[n] + e2[n]) / (2.0 * h);
            let rel_fd = ((fd - closed) / closed).abs();
            worst_cf = worst_cf.max(rel);
            worst_fd = worst_fd.max(rel_fd);
            t.expect(
                rel < tol::SLOPE_CLOSED_REL,
                format!("n={n}: closed rel {rel:.1e}"),
            );
            t.expect(
                rel_fd < tol::SLOPE_FD_REL,
                format!("n={n}: difference rel {rel_fd:.1e}"),
            );
        }
        Ok((
            t,
            format!(
                "n<=10: vs factorial form {worst_cf:.1e}, vs branch differences {worst_fd:.1e}"
            ),
        ))
    })();
    finish(6, "level slope at the origin", start, None, body)
}

pub fn check_series_identity() -> CheckOutcome {
    let start = Instant::now();
    let body = (|| {
        let mut t = Tally::new();
        let mut parts = Vec::new();
        for &(x, terms) in &tol::SERIES_CASES {
            let err = series_identity_check(x, terms)?;
            t.expect(err < tol::SERIES_ABS, format!("x={x}: {err:.1e}"));
            parts.push(format!("x={x} ({terms} terms) {err:.1e}"));
        }
        Ok((t, parts.join(", ")))
    })();
    finish(7, "generating-function identity", start, None, body)
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

pub fn check_demon_measurement() -> CheckOutcome {
    let start = Instant::now();
    let body = (|| {
        let mut t = Tally::new();
        let (theta, n) = (tol::DEMON_THETA, tol::DEMON_PAIRS);
        let before =
            JointState::product(&demon::rho_perp(theta, n)?, &PointerState::neutral(), theta)?;
        let u = demon::measurement_unitary(n, demon::PROJECTIVE_ANGLE)?;
        let unit_err = max_abs(&(&u * u.transpose() - DMatrix::identity(4 * n, 4 * n)));
        let after = demon::measure(&before)?;
        let mut block = 0.0f64;
        for i in 0..4 * n {
            for j in 0..4 * n {
                if i % 2 != j % 2 {
                    block = block.max(after.rho[(i, j)].abs());
                }
            }
        }
        let sd0 = before.pointer().entropy()?;
        let sd1 = after.pointer().entropy()?;
        let sp0 = demon::vn_entropy(&before.particle().rho)?;
        let sp1 = demon::vn_entropy(&after.particle().rho)?;
        let mi = demon::mutual_information(&after)?;
        t.expect(
            unit_err < tol::DEMON_UNITARY_ABS,
            format!("unitarity {unit_err:.1e}"),
        );
        t.expect(
            block < tol::DEMON_BLOCK_ABS,
            format!("off-block {block:.1e}"),
        );
        t.expect(
            sd0.abs() < tol::DEMON_ENTROPY_ABS,
            format!("pointer before {sd0:.1e}"),
        );
        t.expect(
            (sd1 - LN_2).abs() < tol::DEMON_ENTROPY_ABS,
            format!("pointer after {sd1}"),
        );
        t.expect(
            (sp1 - sp0).abs() < tol::DEMON_ENTROPY_ABS,
            "particle entropy changed",
        );
        t.expect(
            (mi - LN_2).abs() < tol::DEMON_ENTROPY_ABS,
            format!("mutual info {mi}"),
        );
        Ok((
            t,
            format!(
                "|UU^T - 1| {unit_err:.1e}, off-block {block:.1e}, S_D {sd0:.1e} -> {sd1:.10}, I = {mi:.10}"
            ),
        ))
    })();
    finish(8, "demon measurement", start, None, body)
}

pub fn check_cycle_closure(quick: bool) -> CheckOutcome {
    let start = Instant::now();
    let body = (|| {
        let mut t = Tally::new();
        let mut parts = Vec::new();
        for &theta in &tol::CYCLE_THETAS {
            let spectral = !(quick && theta < 1.0);
            let ledger = cycle::run_cycle(
                theta,
                &CycleOptions {
                    spectral,
                    ..Default::default()
                },
            )?;
            let naive_gap = (ledger.net_gain_naive - LN_2 / theta).abs();
            t.expect(
                naive_gap < tol::CYCLE_CLOSED_ABS,
                format!("θ={theta}: naive gain gap {naive_gap:.1e}"),
            );
            match (&ledger.spectral, spectral) {
                (CrossCheck::Done(c), _) => {
                    t.expect(
                        c.net_gain_full.abs() < tol::CYCLE_SPECTRAL_ABS,
                        format!("θ={theta}: spectral net gain {:.1e}", c.net_gain_full),
                    );
                    parts.push(format!("θ={theta}: net {:.1e}", c.net_gain_full));
                }
                (CrossCheck::Skipped { reason }, true) => {
                    t.expect(false, format!("θ={theta}: spectral path skipped: {reason}"));
                }
                (CrossCheck::Skipped { .. }, false) => {
                    parts.push(format!("θ={theta}: closed form only (quick)"));
                }
            }
        }
        Ok((t, parts.join(", ")))
    })();
    finish(9, "cycle ledger closure", start, None, body)
}

pub fn check_work_integral() -> CheckOutcome {
    let start = Instant::now();
    let body = (|| {
        let mut t = Tally::new();
        let theta = tol::WORK_THETA;
        let grid = cycle::default_x0_grid();
        let curve = cycle::expansion_work_curve(theta, &grid, LevelCount::Thermal(theta))?;
        let w = cycle::work_integral(&curve)?;
        let d_a = curve[curve.len() - 1].a_free - curve[0].a_free;
        let rel = ((w.value - d_a) / d_a).abs();
        t.expect(rel < tol::WORK_REL, format!("relative gap {rel:.1e}"));
        Ok((
            t,
            format!(
                "∫F dq0 = {:.10}, ΔA = {d_a:.10}, rel gap {rel:.1e}",
                w.value
            ),
        ))
    })();
    finish(
        10,
        "work integral vs free energy",
        start,
        Some(tol::WORK_RUNTIME_S),
        body,
    )
}

pub fn check_limits() -> CheckOutcome {
    let start = Instant::now();
    let body = (|| {
        let mut t = Tally::new();
        let cold = closed_form(Stage::Initial, tol::LIMIT_COLD_THETA)?;
        let hot = closed_form(Stage::Initial, tol::LIMIT_HOT_THETA)?;
        let kt = 1.0 / tol::LIMIT_HOT_THETA;
        let hot_rel = ((hot.e_avg - kt) / kt).abs();
        t.expect(
            (cold.e_avg - 0.5).abs() < tol::LIMIT_COLD_E_ABS,
            format!("cold E = {}", cold.e_avg),
        );
        t.expect(
            hot_rel < tol::LIMIT_HOT_REL,
            format!("hot E rel {hot_rel:.1e}"),
        );
        t.expect(
            cold.s < tol::LIMIT_COLD_S_MAX,
            format!("cold S = {:.1e}", cold.s),
        );
        Ok((
            t,
            format!(
                "E(θ=50) = {:.12}, E(θ=0.01)·θ = {:.6}, S(θ=50) = {:.1e}",
                cold.e_avg,
                hot.e_avg * tol::LIMIT_HOT_THETA,
                cold.s
            ),
        ))
    })();
    finish(11, "temperature limits", start, None, body)
}

/// Runs every check in order.
pub fn run_all(opts: &ValidationOptions) -> Vec<CheckOutcome> {
    let mut out = vec![
        check_closed_vs_spectral(),
        check_barrier_limit(),
        check_entropy_drop(),
        check_expansion_endpoints(),
        check_force_prefactor(opts.expected_prefactor),
        check_appendix_slope(),
        check_series_identity(),
        check_demon_measurement(),
        check_cycle_closure(opts.quick),
    ];
    if !opts.quick {
        out.push(check_work_integral());
    }
    out.push(check_limits());
    out
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<30} {:>7.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_s,
            self.detail
        )
    }
}
