//! Browser bindings: the even-level quantization curve, the expansion
//! branches and the cycle ledger. Results cross the boundary as flat
//! `Float64Array`s or JSON strings.

use serde_json::json;
use szilard_core::cycle::{self, CycleOptions};
use szilard_core::spectrum::{even_levels_at_g, quantization_rhs, LevelCount};
use wasm_bindgen::prelude::*;

fn js(e: szilard_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `points` samples of the quantization condition over (0, e_max), as
/// interleaved pairs `e0, rhs0, e1, rhs1, ...`. Poles come back as ±inf.
#[wasm_bindgen]
pub fn quantization_curve(e_max: f64, points: usize) -> Vec<f64> {
    (0..points)
        .flat_map(|i| {
            let e = e_max * (i as f64 + 0.5) / points as f64;
            [e, quantization_rhs(e)]
        })
        .collect()
}

/// The lowest `count` even levels at barrier strength `g`.
#[wasm_bindgen]
pub fn even_levels(g: f64, count: usize) -> Result<Vec<f64>, JsError> {
    Ok(even_levels_at_g(g, count).map_err(js)?.energies())
}

/// Expansion stroke at θ from x0 = 0 to the default far wall:
/// `{x0: [...], a: [...], f: [...], branches: [[E_0...], ...]}`.
#[wasm_bindgen]
pub fn expansion_curve_json(theta: f64, points: usize, branches: usize) -> Result<String, JsError> {
    let grid = cycle::expansion_grid(cycle::expansion_end(theta).max(-16.0), points).map_err(js)?;
    let curve =
        cycle::expansion_work_curve(theta, &grid, LevelCount::Thermal(theta)).map_err(js)?;
    let n = branches.min(curve.iter().map(|p| p.energies.len()).min().unwrap_or(0));
    let col = |f: &dyn Fn(&cycle::ExpansionPoint) -> f64| curve.iter().map(f).collect::<Vec<_>>();
    let b: Vec<Vec<f64>> = (0..n).map(|k| col(&|p| p.energies[k])).collect();
    Ok(json!({
        "x0": col(&|p| p.x0),
        "a": col(&|p| p.a_free),
        "f": col(&|p| p.force),
        "branches": b,
    })
    .to_string())
}

/// The cycle ledger at θ as JSON. `spectral` adds the level-sum
/// cross-check, which takes noticeably longer at small θ.
#[wasm_bindgen]
pub fn cycle_ledger_json(theta: f64, spectral: bool) -> Result<String, JsError> {
    let opts = CycleOptions {
        spectral,
        ..Default::default()
    };
    let ledger = cycle::run_cycle(theta, &opts).map_err(js)?;
    serde_json::to_string(&ledger).map_err(|e| JsError::new(&e.to_string()))
}
