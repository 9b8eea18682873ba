//! The subcommands. Each builds a [`Table`]; `main` decides where it goes.

use std::f64::consts::LN_2;

use nalgebra::DMatrix;
use serde_json::json;
use szilard_core::cycle::{self, CrossCheck, CycleLedger, CycleOptions};
use szilard_core::demon::{self, JointState, PointerState};
use szilard_core::spectrum::{
    dirichlet_sweep, even_levels_at_g, quantization_rhs, LevelCount, DEFAULT_LEVELS,
};
use szilard_core::validation::{self, CheckOutcome, ValidationOptions};

use crate::config::{RunConfig, UsageError};
use crate::output::{Cell, Column, Table};

fn max_abs<'a>(it: impl IntoIterator<Item = &'a f64>) -> f64 {
    it.into_iter().fold(0.0, |a, x| a.max(x.abs()))
}

const E: &str = "hbar*omega";

/// Quantization condition for the even levels: samples of g(e) over
/// (0, e_max), the roots g(e) = g, and the zeros and poles of g(e).
pub fn spectrum(cfg: &RunConfig) -> anyhow::Result<Table> {
    let mut cols = vec![
        Column::new("kind", "sample | root | zero | asymptote"),
        Column::new("e", E),
        Column::new("rhs", "dimensionless g"),
    ];
    if cfg.units.is_some() {
        cols.push(Column::new("energy_si", "J"));
    }
    let mut t = Table::new("spectrum", cols);
    t.notes.push(
        "rhs(e) = -2 Gamma(3/4 - e/2) / Gamma(1/4 - e/2); even levels solve rhs(e) = g".into(),
    );
    t.notes
        .push("zeros at e = 2k + 1/2 (g = 0 levels), asymptotes at e = 2k + 3/2 (g = inf)".into());
    let scale = cfg.units.map(|u| u.energy_scale());
    let mut row = |kind: &str, e: f64, rhs: f64| {
        let mut r = vec![Cell::from(kind), e.into(), rhs.into()];
        if let Some(s) = scale {
            r.push((e * s).into());
        }
        t.push(r);
    };
    let n = cfg.points;
    for i in 0..n {
        let e = cfg.e_max * (i as f64 + 0.5) / n as f64;
        row("sample", e, quantization_rhs(e));
    }
    // brackets (2k + 1/2, 2k + 3/2] that start below e_max
    let k_max = ((cfg.e_max - 0.5) / 2.0).ceil().max(0.0) as usize;
    if k_max > 0 {
        let roots = even_levels_at_g(cfg.g, k_max)?;
        for e in roots.energies().into_iter().filter(|&e| e < cfg.e_max) {
            row("root", e, cfg.g);
        }
    }
    for k in 0..k_max {
        row("zero", 2.0 * k as f64 + 0.5, 0.0);
    }
    for k in 0.. {
        let e = 2.0 * k as f64 + 1.5;
        if e >= cfg.e_max {
            break;
        }
        row("asymptote", e, f64::INFINITY);
    }
    Ok(t)
}

/// Level branches, free energy and force while the wall moves from
/// x0_max to x0_min.
pub fn expansion(cfg: &RunConfig) -> anyhow::Result<Table> {
    let grid = if cfg.x0_max == 0.0 {
        cycle::expansion_grid(cfg.x0_min, cfg.points)?
    } else {
        cycle::log_grid(cfg.x0_max, cfg.x0_min, cfg.points)?
    };
    let curve = cycle::expansion_work_curve(cfg.theta, &grid, LevelCount::Thermal(cfg.theta))?;
    // a cold run keeps only a few levels; the printed branches may need more
    let branches: Vec<Vec<f64>> = if curve.iter().all(|p| p.energies.len() >= cfg.levels) {
        curve.iter().map(|p| p.energies.clone()).collect()
    } else {
        dirichlet_sweep(&grid, LevelCount::Fixed(cfg.levels))?
            .iter()
            .map(|l| l.energies())
            .collect()
    };

    let mut cols = vec![
        Column::new("x0", "dimensionless"),
        Column::new("A", E),
        Column::new("F", "hbar*omega per oscillator length"),
    ];
    cols.extend((0..cfg.levels).map(|k| Column::new(format!("E_{k}"), E)));
    if cfg.units.is_some() {
        cols.push(Column::new("q0_si", "m"));
        cols.push(Column::new("A_si", "J"));
        cols.push(Column::new("F_si", "N"));
    }
    let mut t = Table::new("expansion", cols);
    t.notes.push(
        "A and F from thermally converged level sums; F = -dA/dq0 is the force on the wall, negative means it is pushed left".into(),
    );
    for (p, e) in curve.iter().zip(&branches) {
        let mut r: Vec<Cell> = vec![p.x0.into(), p.a_free.into(), p.force.into()];
        r.extend(e[..cfg.levels].iter().map(|&e| Cell::from(e)));
        if let Some(u) = &cfg.units {
            r.push(u.position_from_x0(p.x0).into());
            r.push((p.a_free * u.energy_scale()).into());
            r.push((p.force * u.force_scale()).into());
        }
        t.push(r);
    }
    Ok(t)
}

fn quantity_table(command: &'static str, cfg: &RunConfig) -> Table {
    let mut cols = vec![
        Column::new("quantity", "name"),
        Column::new("value", "see unit column"),
        Column::new("unit", "text"),
    ];
    if cfg.units.is_some() {
        cols.push(Column::new("value_si", "J or J/K"));
    }
    Table::new(command, cols)
}

fn quantity(t: &mut Table, cfg: &RunConfig, name: &str, value: f64, unit: &str) {
    let mut r = vec![Cell::from(name), value.into(), Cell::from(unit)];
    if let Some(u) = &cfg.units {
        let si = match unit {
            E => value * u.energy_scale(),
            "k_B" => u.entropy(value),
            _ => f64::NAN,
        };
        r.push(si.into());
    }
    t.push(r);
}

pub struct CycleReport {
    pub ledger: CycleLedger,
    pub table: Table,
}

pub fn cycle(cfg: &RunConfig) -> anyhow::Result<CycleReport> {
    let opts = CycleOptions {
        min_levels: cfg.levels.max(DEFAULT_LEVELS),
        points: cfg.points,
        spectral: !cfg.quick,
    };
    let ledger = cycle::run_cycle(cfg.theta, &opts)?;
    let mut t = quantity_table("cycle", cfg);
    t.notes.push(
        "w_insert: work done by the demon on the particle; w_extract: work the particle delivers to the demon"
            .into(),
    );
    t.notes
        .push("net_gain = w_extract - w_insert (naive), minus w_reset_min (full)".into());
    let l = &ledger;
    for (name, v, unit) in [
        ("w_insert", l.w_insert, E),
        ("ds_measure", l.ds_measure, "k_B"),
        ("w_extract", l.w_extract, E),
        ("w_reset_min", l.w_reset_min, E),
        ("net_gain_naive", l.net_gain_naive, E),
        ("net_gain_full", l.net_gain_full, E),
    ] {
        quantity(&mut t, cfg, name, v, unit);
    }
    if let CrossCheck::Done(c) = &l.spectral {
        for (name, v, unit) in [
            ("spectral_w_insert", c.w_insert, E),
            ("spectral_ds_measure", c.ds_measure, "k_B"),
            ("spectral_w_extract", c.w_extract, E),
            ("spectral_w_reset_min", c.w_reset_min, E),
            ("spectral_net_gain_full", c.net_gain_full, E),
            ("spectral_x0_end", c.x0_end, "dimensionless"),
            ("spectral_end_residual", c.end_residual, E),
            ("spectral_quadrature_error", c.quadrature_error, E),
        ] {
            quantity(&mut t, cfg, name, v, unit);
        }
    }
    t.extra
        .insert("ledger".into(), serde_json::to_value(&ledger)?);
    Ok(CycleReport { ledger, table: t })
}

pub fn cycle_text(l: &CycleLedger) -> String {
    let mut s = format!("cycle ledger at theta = {}\n", l.theta);
    s += "  signs: w_insert demon -> particle, w_extract particle -> demon; hbar*omega, k_B\n";
    s += &format!(
        "  insertion work       w_insert       = {:+.12}\n",
        l.w_insert
    );
    s += &format!(
        "  measurement entropy  ds_measure     = {:+.12}  (ln 2 = {LN_2:.12})\n",
        l.ds_measure
    );
    s += &format!(
        "  expansion work       w_extract      = {:+.12}\n",
        l.w_extract
    );
    s += &format!(
        "  minimal reset work   w_reset_min    = {:+.12}\n",
        l.w_reset_min
    );
    s += &format!(
        "  net gain, no reset   net_gain_naive = {:+.12}\n",
        l.net_gain_naive
    );
    s += &format!(
        "  net gain with reset  net_gain_full  = {:+.3e}\n",
        l.net_gain_full
    );
    match &l.spectral {
        CrossCheck::Done(c) => {
            s += &format!(
                "  spectral cross-check: w_insert {:+.12}, w_extract {:+.12}, w_reset_min {:+.12}\n",
                c.w_insert, c.w_extract, c.w_reset_min
            );
            s += &format!(
                "                        net {:+.3e}, wall stopped at x0 = {:.3}, quadrature error {:.1e}\n",
                c.net_gain_full, c.x0_end, c.quadrature_error
            );
        }
        CrossCheck::Skipped { reason } => {
            s += &format!("  spectral cross-check skipped: {reason}\n")
        }
    }
    s
}

/// Largest pair count accepted for the dense joint density matrix.
const DEMON_MAX_PAIRS: usize = 150;

/// The pointer measurement on the thermal state behind the barrier.
pub fn demon(cfg: &RunConfig) -> anyhow::Result<Table> {
    // smallest truncation whose dropped Boltzmann weight is below 1e-12
    let thermal = (13.9 / cfg.theta).ceil() as usize;
    let n = cfg.levels.max(thermal);
    if n > DEMON_MAX_PAIRS {
        return Err(UsageError(format!(
            "theta = {} needs {n} level pairs; the dense demon model stops at {DEMON_MAX_PAIRS} (theta >= {:.3})",
            cfg.theta,
            13.9 / DEMON_MAX_PAIRS as f64
        ))
        .into());
    }
    let theta = cfg.theta;
    let before = JointState::product(&demon::rho_perp(theta, n)?, &PointerState::neutral(), theta)?;
    let u = demon::measurement_unitary(n, demon::PROJECTIVE_ANGLE)?;
    let unitarity = max_abs((&u * u.transpose() - DMatrix::identity(4 * n, 4 * n)).iter());
    let after = demon::measure(&before)?;
    let off_block = max_abs(
        after
            .rho
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let (i, j) = (k % (4 * n), k / (4 * n));
                i % 2 != j % 2
            })
            .map(|(_, x)| x),
    );
    let reset = demon::reset_cost(theta, &after.pointer())?;

    let mut t = quantity_table("demon", cfg);
    t.notes.push(format!(
        "{n} level pairs behind the barrier, pointer starts neutral; measurement angle pi/4"
    ));
    let rows = [
        ("n_pair", n as f64, "count"),
        ("unitarity_error", unitarity, "dimensionless"),
        ("off_block_max", off_block, "dimensionless"),
        (
            "s_particle_before",
            demon::vn_entropy(&before.particle().rho)?,
            "k_B",
        ),
        (
            "s_particle_after",
            demon::vn_entropy(&after.particle().rho)?,
            "k_B",
        ),
        ("s_pointer_before", before.pointer().entropy()?, "k_B"),
        ("s_pointer_after", reset.pointer_entropy, "k_B"),
        (
            "mutual_information",
            demon::mutual_information(&after)?,
            "k_B",
        ),
        ("w_reset_min", reset.w_min, E),
        ("landauer_bound", demon::landauer_bound(theta), E),
    ];
    for (name, v, unit) in rows {
        quantity(&mut t, cfg, name, v, unit);
    }
    Ok(t)
}

pub fn validate(opts: &ValidationOptions) -> Vec<CheckOutcome> {
    validation::run_all(opts)
}

pub fn validation_table(outcomes: &[CheckOutcome]) -> Table {
    let mut t = Table::new(
        "validate",
        vec![
            Column::new("id", "criterion number"),
            Column::new("name", "text"),
            Column::new("passed", "pass | fail"),
            Column::new("elapsed", "s"),
            Column::new("detail", "text"),
        ],
    );
    for o in outcomes {
        t.push(vec![
            (o.id as f64).into(),
            Cell::Text(o.name.clone()),
            Cell::from(if o.passed { "pass" } else { "fail" }),
            o.elapsed_s.into(),
            Cell::Text(o.detail.clone()),
        ]);
    }
    t.extra.insert("outcomes".into(), json!(outcomes));
    t
}
