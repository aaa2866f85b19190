use schwarz::casebook::{run_case, CASES, SCHEMA_VERSION};

fn assert_passes(name: &str) {
    let r = run_case(name).unwrap();
    let failed: Vec<String> = r
        .failures()
        .map(|c| format!("{}: expected {}, computed {}", c.description, c.expected, c.computed))
        .collect();
    assert!(r.pass, "{name} failed:\n{}", failed.join("\n"));
    assert_eq!(r.schema_version, SCHEMA_VERSION);
    assert!(!r.sources.is_empty());
}

#[test]
fn modular_j() {
    assert_passes("modular-j");
}

#[test]
fn landen_chi2() {
    assert_passes("landen-chi2");
}

#[test]
fn avoiding_permutations() {
    assert_passes("avoiding-permutations");
}

#[test]
fn heun_premodular() {
    assert_passes("heun-premodular");
}

#[test]
fn sym_power_gallery() {
    assert_passes("sym-power-gallery");
}

#[test]
fn hadamard_cy_fails_only_on_the_yukawa_coefficients() {
    let r = run_case("hadamard-cy").unwrap();
    let failed: Vec<&str> = r.failures().map(|c| c.description.as_str()).collect();
    assert!(!failed.is_empty());
    assert!(
        failed
            .iter()
            .all(|d| d.starts_with("K_x coefficient") || d.starts_with("K_q coefficient")),
        "{failed:?}"
    );
    assert!(failed.contains(&"K_x coefficient 1 against the printed value"));
}

#[test]
fn registry_is_complete() {
    assert_eq!(CASES.len(), 6);
    for name in CASES {
        assert_eq!(run_case(name).unwrap().case_name, name);
    }
}

#[test]
fn reports_round_trip_through_json() {
    let r = run_case("landen-chi2").unwrap();
    let js = serde_json::to_string(&r).unwrap();
    let back: schwarz::casebook::CaseReport = serde_json::from_str(&js).unwrap();
    assert_eq!(back, r);
}
