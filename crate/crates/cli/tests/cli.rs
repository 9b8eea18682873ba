use std::f64::consts::LN_2;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use serde_json::Value;
use szilard_core::cycle::{run_cycle, CycleLedger, CycleOptions};

fn szilard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_szilard"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header names and rows of a CSV body, skipping `#` lines.
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let head = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (head, rows)
}

fn column(head: &[String], name: &str) -> usize {
    head.iter().position(|h| h == name).unwrap()
}

fn kind_values(text: &str, kind: &str) -> Vec<f64> {
    let (head, rows) = csv(text);
    let (k, e) = (column(&head, "kind"), column(&head, "e"));
    rows.iter()
        .filter(|r| r[k] == kind)
        .map(|r| r[e].parse().unwrap())
        .collect()
}

#[test]
fn spectrum_roots_at_zero_strength_are_even_oscillator_levels() {
    let o = szilard(&["spectrum", "--g", "0", "--no-timestamp"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(kind_values(&text, "root"), vec![0.5, 2.5, 4.5, 6.5]);
    assert_eq!(kind_values(&text, "asymptote"), vec![1.5, 3.5, 5.5, 7.5]);
    assert_eq!(kind_values(&text, "zero"), vec![0.5, 2.5, 4.5, 6.5]);
    assert!(text.contains("# g = 0\n"));
    assert!(text.contains("# unit e = hbar*omega\n"));
}

#[test]
fn spectrum_roots_solve_the_condition() {
    let o = szilard(&["spectrum", "--g", "1", "--no-timestamp"]);
    let roots = kind_values(&stdout(&o), "root");
    assert_eq!(roots.len(), 4);
    assert!((roots[0] - 0.892_744_045_308_952).abs() < 1e-12);
    for (k, e) in roots.iter().enumerate() {
        let lo = 2.0 * k as f64 + 0.5;
        assert!(*e > lo && *e < lo + 1.0);
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "theta = 1\ncolour = red\n").unwrap();
    let o = szilard(&["spectrum", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key 'colour'"));

    for args in [
        &["expansion", "--x0-max", "0.5"][..],
        &["expansion", "--theta", "-1"],
        &["demon", "--levels", "2"],
        &["spectrum", "--points", "lots"],
        &["warp"],
    ] {
        assert_eq!(szilard(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "# sweep\ng = 0\ne_max = 4\nformat = json\n").unwrap();
    let c = conf.to_str().unwrap();
    let o = szilard(&[
        "spectrum",
        "--config",
        c,
        "--format",
        "csv",
        "--no-timestamp",
    ]);
    let text = stdout(&o);
    assert!(text.contains("# e_max = 4\n"));
    assert_eq!(kind_values(&text, "root"), vec![0.5, 2.5]);
}

#[test]
fn expansion_branches_fall_and_force_points_left() {
    let o = szilard(&["expansion", "--levels", "6", "--no-timestamp"]);
    assert!(o.status.success());
    let (head, rows) = csv(&stdout(&o));
    let num = |r: &Vec<String>, c: &str| -> f64 { r[column(&head, c)].parse().unwrap() };
    assert_eq!(rows.len(), 401);
    assert_eq!(num(&rows[0], "x0"), 0.0);
    assert!((num(&rows[0], "E_0") - 1.5).abs() < 1e-12);
    assert_eq!(num(&rows[400], "x0"), -12.0);
    assert!((num(&rows[400], "E_0") - 0.5).abs() < 1e-10);
    for w in rows.windows(2) {
        for k in 0..6 {
            let c = format!("E_{k}");
            assert!(num(&w[1], &c) <= num(&w[0], &c) + 1e-12);
        }
    }
    // F vanishes far out; allow rounding noise there
    for r in &rows {
        assert!(
            num(r, "F") <= 1e-14,
            "F = {} at {}",
            num(r, "F"),
            num(r, "x0")
        );
    }
    let f0 = num(&rows[0], "F");
    let closed = -2.0 / std::f64::consts::PI.sqrt() / (1.0 - (-2.0f64).exp()).sqrt();
    assert!(((f0 - closed) / closed).abs() < 1e-6);
}

#[test]
fn output_is_reproducible_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs: &str, name: &str| {
        let p = dir.path().join(name);
        let o = szilard(&[
            "expansion",
            "--theta",
            "0.5",
            "--points",
            "120",
            "--format",
            "json",
            "--jobs",
            jobs,
            "--no-timestamp",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        std::fs::read(&p).unwrap()
    };
    let a = run("1", "a.json");
    let b = run("3", "b.json");
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["config"]["theta"], 0.5);
    assert_eq!(v["columns"][0], "x0");
    assert_eq!(v["rows"].as_array().unwrap().len(), 121);
}

#[test]
fn timestamp_line_is_optional() {
    let with = stdout(&szilard(&["spectrum", "--points", "4"]));
    let without = stdout(&szilard(&["spectrum", "--points", "4", "--no-timestamp"]));
    assert!(with.contains("# generated_unix = "));
    assert!(!without.contains("generated_unix"));
}

fn ledger_json(dir: &Path, theta: &str, extra: &[&str]) -> (Value, CycleLedger) {
    let p = dir.join(format!("cycle_{theta}.json"));
    let mut args = vec![
        "cycle",
        "--theta",
        theta,
        "--format",
        "json",
        "--no-timestamp",
        "--out",
        p.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = szilard(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("net_gain_full"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let ledger: CycleLedger = serde_json::from_value(v["ledger"].clone()).unwrap();
    (v, ledger)
}

#[test]
fn cycle_ledger_round_trips_and_closes() {
    let dir = tempfile::tempdir().unwrap();
    let (v, ledger) = ledger_json(dir.path(), "1", &[]);
    let direct = run_cycle(1.0, &CycleOptions::default()).unwrap();
    assert_eq!(ledger, direct);
    assert!((ledger.net_gain_naive - LN_2).abs() < 1e-10);
    assert!(ledger.net_gain_full.abs() < 1e-10);
    let names: Vec<&str> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r[0].as_str().unwrap())
        .collect();
    assert!(names.contains(&"spectral_net_gain_full"));

    for theta in ["0.01", "50"] {
        let (_, l) = ledger_json(dir.path(), theta, &["--quick"]);
        let t: f64 = theta.parse().unwrap();
        assert!((l.net_gain_naive - LN_2 / t).abs() < 1e-10 * (1.0 / t).max(1.0));
        assert!(l.net_gain_full.abs() < 1e-10 * (1.0 / t).max(1.0));
    }
}

#[test]
fn demon_reports_one_bit_of_correlation() {
    let o = szilard(&["demon", "--format", "json", "--no-timestamp"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let get = |name: &str| -> f64 {
        v["rows"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r[0] == name)
            .unwrap()[1]
            .as_f64()
            .unwrap()
    };
    assert!((get("mutual_information") - LN_2).abs() < 1e-8);
    assert!((get("s_pointer_after") - LN_2).abs() < 1e-8);
    assert!(get("unitarity_error") < 1e-12);
    assert!((get("s_particle_after") - get("s_particle_before")).abs() < 1e-8);
}

#[test]
fn physical_units_are_echoed_and_converted() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("si.conf");
    // θ = 2 with unit ħ and k_B
    std::fs::write(
        &conf,
        "mass = 2\nomega = 3\nhbar = 1\nk_b = 1\ntemperature = 1.5\n",
    )
    .unwrap();
    let o = szilard(&[
        "demon",
        "--config",
        conf.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("# theta = 2\n"));
    assert!(text.contains("# temperature = 1.5\n"));
    let (head, rows) = csv(&text);
    let r = rows.iter().find(|r| r[0] == "w_reset_min").unwrap();
    let w: f64 = r[column(&head, "value")].parse().unwrap();
    let si: f64 = r[column(&head, "value_si")].parse().unwrap();
    assert!((si - 3.0 * w).abs() < 1e-14);
}

#[test]
fn quick_validation_passes_fast() {
    let start = Instant::now();
    let o = szilard(&["validate", "--quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(start.elapsed().as_secs_f64() < 10.0);
    let text = stdout(&o);
    assert!(text.contains("[PASS]  5 initial force prefactor"));
    assert!(!text.contains("[FAIL]"));
}

#[test]
fn wrong_prefactor_fails_validation() {
    let o = szilard(&["validate", "--quick", "--inject-prefactor", "main-text"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let line = text
        .lines()
        .find(|l| l.contains(" 5 initial force"))
        .unwrap();
    assert!(line.starts_with("[FAIL]"), "{line}");
}
