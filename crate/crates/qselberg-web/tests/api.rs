use qselberg_web::api;
use serde_json::Value;

const RANK_ONE: &str = r#"{"n":1,"q":[0.25,0.05],"x1":[1.1,0.2],"x2":[-0.7,0.5],
  "exponents":{"alpha":[1.7,0],"beta1":[0.6,0.3],"beta2":[0.45,-0.2],"gamma":[0.3,0]}}"#;

fn parse(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn r_matrix_has_consistent_factors() {
    let v = parse(&api::r_matrix(RANK_ONE).unwrap());
    assert_eq!(v["r21"].as_array().unwrap().len(), 2);
    assert!(v["inverse_residual"].as_f64().unwrap() < 1e-12);
    assert!(v["determinant_residual"].as_f64().unwrap() < 1e-12);
    // The lower factor is unipotent lower triangular.
    assert_eq!(v["lower"][0][0], serde_json::json!([1.0, 0.0]));
    assert_eq!(v["lower"][0][1], serde_json::json!([0.0, 0.0]));
}

#[test]
fn r_matrix_rejects_bad_input() {
    assert!(api::r_matrix("not json").is_err());
    assert!(api::r_matrix(&RANK_ONE.replace("\"n\":1", "\"n\":0")).is_err());
}

#[test]
fn qkz_check_passes_for_rank_one() {
    let v = parse(&api::qkz_check(RANK_ONE, 80).unwrap());
    assert_eq!(v["pass"], true);
    assert!(v["residual"].as_f64().unwrap() <= 1e-7);
    assert!(api::qkz_check(RANK_ONE, 0).is_err());
    assert!(api::qkz_check(RANK_ONE, api::MAX_RADIUS + 1).is_err());
}

#[test]
fn lemma_sweep_summary_is_seed_deterministic() {
    let a = api::lemma_sweep(7, 5, 4).unwrap();
    assert_eq!(a, api::lemma_sweep(7, 5, 4).unwrap());
    let v = parse(&a);
    assert_eq!(v["failed"], 0);
    assert!(v["checks"].as_u64().unwrap() > 0);
    assert!(api::lemma_sweep(7, 0, 4).is_err());
}
