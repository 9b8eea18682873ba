use szilard_wasm::*;

#[test]
fn curve_is_interleaved_and_roots_lie_on_it() {
    let c = quantization_curve(8.0, 16);
    assert_eq!(c.len(), 32);
    assert_eq!(c[0], 0.25);
    let levels = even_levels(1.0, 4).unwrap();
    assert!((levels[0] - 0.892_744_045_308_952).abs() < 1e-12);
    for e in levels {
        let rhs = quantization_curve(2.0 * e, 1)[1];
        assert!((rhs - 1.0).abs() < 1e-9, "{e}: {rhs}");
    }
}

#[test]
fn expansion_json_has_matching_columns() {
    let v: serde_json::Value =
        serde_json::from_str(&expansion_curve_json(1.0, 60, 3).unwrap()).unwrap();
    let n = v["x0"].as_array().unwrap().len();
    assert_eq!(n, 61);
    assert_eq!(v["a"].as_array().unwrap().len(), n);
    assert_eq!(v["branches"].as_array().unwrap().len(), 3);
    assert_eq!(v["branches"][0][0], 1.5);
}

#[test]
fn ledger_json_closes() {
    let v: serde_json::Value =
        serde_json::from_str(&cycle_ledger_json(2.0, false).unwrap()).unwrap();
    assert!(v["net_gain_full"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(v["spectral"]["status"], "skipped");
}
