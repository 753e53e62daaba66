use pivotal_wasm::{front_json, gauge_json, recommend_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn gauge_follows_the_toggles() {
    assert_eq!(parse(&gauge_json("[]", 0.5).unwrap())["h"], 1.0);
    assert_eq!(parse(&gauge_json("[5]", 0.5).unwrap())["h"], 0.5);
    assert_eq!(parse(&gauge_json("[3, 5, 9, 10, 13]", 0.5).unwrap())["h"], 0.03125);
    assert!(gauge_json("[15]", 0.5).is_err());
    assert!(gauge_json("nope", 0.5).is_err());
    assert!(gauge_json("[1]", 1.5).is_err());
}

#[test]
fn recommendations_for_toggles() {
    let v = parse(&recommend_json("[13]", 0.5, 0).unwrap());
    let names: Vec<&str> = v["recommendations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["strategy"]["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        ["Early detection before impact", "Rapid identification after event"]
    );
    assert_eq!(v["gaps"]["absent_properties"].as_array().unwrap().len(), 13);
    let top = parse(&recommend_json("[6]", 0.5, 2).unwrap());
    assert_eq!(top["recommendations"].as_array().unwrap().len(), 2);
    assert_eq!(
        parse(&recommend_json("[]", 0.5, 0).unwrap())["gaps"]["hardest_nut"],
        true
    );
}

#[test]
fn front_for_a_document() {
    let doc = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/parabolas.dproblem.json"
    ))
    .unwrap();
    let a = front_json(&doc, 42, 32, 40).unwrap();
    assert_eq!(a, front_json(&doc, 42, 32, 40).unwrap());
    let v = parse(&a);
    assert_eq!(v["metrics"], serde_json::json!(["f1", "f2"]));
    assert!(!v["front"]["members"].as_array().unwrap().is_empty());
    assert!(front_json(&doc, 1, 1000, 1000).is_err());
    assert!(front_json("{}", 1, 8, 2).unwrap_err().contains("MALFORMED_DOCUMENT"));
}
