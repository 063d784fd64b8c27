//! Every certificate kind the library emits must conform to the shipped
//! JSON schema, parse back to an equal value, and replay cleanly.

use conecert::certificate::{
    cone_certificate, emit_csv, emit_json, kodaira_violation, parse_certificate, replay,
    theorem_kod_fails, Certificate,
};

fn schema_validator() -> jsonschema::Validator {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/schema/certificate.schema.json");
    let schema: serde_json::Value =
        serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn check(cert: &Certificate) {
    let validator = schema_validator();
    let bytes = emit_json(cert);
    let instance: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    let errors: Vec<String> = validator.iter_errors(&instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{}: schema violations {errors:?}", cert.kind);
    let parsed = parse_certificate(&bytes).unwrap();
    assert_eq!(&parsed, cert, "{}: parse roundtrip", cert.kind);
    replay(&parsed).unwrap();
    let csv = emit_csv(cert);
    let lines = csv.iter().filter(|&&c| c == b'\n').count();
    assert_eq!(lines, cert.nodes.len() + 1, "{}: csv row count", cert.kind);
}

#[test]
fn thm_certificates_conform() {
    check(&theorem_kod_fails(2, 3).unwrap());
    check(&theorem_kod_fails(3, 3).unwrap());
}

#[test]
fn violation_certificate_conforms() {
    check(&kodaira_violation(2, 3).unwrap());
}

#[test]
fn cone_certificate_conforms() {
    check(&cone_certificate(2, 3).unwrap().certificate);
}
