//! One line per acceptance criterion.

use std::io::Write;

use szilard_core::validation::{run_all, ValidationOptions};

#[test]
fn acceptance_criteria() {
    let outcomes = run_all(&ValidationOptions::default());
    // straight to stderr so the table shows without --nocapture
    let mut err = std::io::stderr().lock();
    writeln!(err).unwrap();
    for o in &outcomes {
        writeln!(err, "{o}").unwrap();
    }
    assert_eq!(outcomes.len(), 11);
    let failed: Vec<u8> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn wrong_prefactor_is_caught() {
    let o = szilard_core::validation::check_force_prefactor(
        szilard_core::thermo::ForcePrefactor::MainText,
    );
    assert!(!o.passed, "{o}");
}
