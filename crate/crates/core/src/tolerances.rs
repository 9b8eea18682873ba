//! Acceptance tolerances.

/// Temperatures for the closed-form versus level-sum comparison.
pub const THETAS_THERMO: [f64; 5] = [0.05, 0.2, 1.0, 5.0, 50.0];
pub const Z_REL: f64 = 1e-9;
pub const S_ABS: f64 = 1e-8;
pub const THERMO_RUNTIME_S: f64 = 1.0;

pub const BARRIER_LIMIT_G: f64 = 1e8;
pub const BARRIER_LIMIT_ABS: f64 = 1e-7;
pub const BARRIER_LIMIT_KMAX: usize = 5;
pub const BARRIER_RUNTIME_S: f64 = 1.0;

pub const ENTROPY_DROP_ABS: f64 = 1e-12;

pub const EXPANSION_THETA: f64 = 1.0;
pub const EXPANSION_FAR_X0: f64 = -10.0;
pub const EXPANSION_ENDPOINT_ABS: f64 = 1e-6;

pub const FORCE_THETA: f64 = 50.0;
pub const FORCE_REL: f64 = 1e-4;

pub const SLOPE_NMAX: usize = 10;
pub const SLOPE_CLOSED_REL: f64 = 1e-9;
pub const SLOPE_FD_REL: f64 = 1e-6;
/// One-sided difference step in x0 for branch slopes at the origin.
pub const SLOPE_FD_STEP: f64 = 1e-4;

/// (x, terms) for the generating-function identity.
pub const SERIES_CASES: [(f64, usize); 3] = [(0.0, 200), (0.5, 200), (0.9, 500)];
pub const SERIES_ABS: f64 = 1e-10;

pub const DEMON_THETA: f64 = 1.0;
pub const DEMON_PAIRS: usize = 20;
pub const DEMON_UNITARY_ABS: f64 = 1e-12;
pub const DEMON_BLOCK_ABS: f64 = 1e-12;
pub const DEMON_ENTROPY_ABS: f64 = 1e-8;

pub const CYCLE_THETAS: [f64; 3] = [0.2, 1.0, 5.0];
pub const CYCLE_CLOSED_ABS: f64 = 1e-10;
pub const CYCLE_SPECTRAL_ABS: f64 = 1e-6;

pub const WORK_THETA: f64 = 1.0;
pub const WORK_REL: f64 = 1e-4;
pub const WORK_RUNTIME_S: f64 = 30.0;

pub const LIMIT_COLD_THETA: f64 = 50.0;
pub const LIMIT_COLD_E_ABS: f64 = 1e-10;
pub const LIMIT_COLD_S_MAX: f64 = 1e-15;
pub const LIMIT_HOT_THETA: f64 = 0.01;
pub const LIMIT_HOT_REL: f64 = 0.01;
