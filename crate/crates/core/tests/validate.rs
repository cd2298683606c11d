use rmtwork::ensembles::EnsembleSpec;
use rmtwork::validate::{run_validation, ValidationOptions};

#[test]
fn default_run_passes() {
    let r = run_validation(&ValidationOptions::default()).unwrap();
    assert!(r.passed, "{:#?}", r.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
}

#[test]
fn wrong_radius_fails_the_semicircle_check() {
    let opts = ValidationOptions { seed: 0, radius: |s: &EnsembleSpec| s.radius() / 2f64.sqrt() };
    let r = run_validation(&opts).unwrap();
    assert!(!r.passed);
    let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    assert_eq!(failed, ["semicircle/goe N=400 Kolmogorov distance"]);
}
