//! Problem documents (`*.dproblem.json`).
//!
//! The canonical form is pretty-printed JSON with object keys sorted and
//! reals written in their shortest round-trip form. Parsing is strict:
//! unknown fields are rejected, and the parsed problem must validate.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::problem::DecisionProblem;
use crate::Error;

pub const FORMAT_VERSION: &str = "1";
pub const FILE_EXTENSION: &str = ".dproblem.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub format_version: String,
    pub problem: DecisionProblem,
}

impl ProblemDocument {
    pub fn new(problem: DecisionProblem) -> Self {
        ProblemDocument {
            format_version: FORMAT_VERSION.to_owned(),
            problem,
        }
    }
}

/// Parses and validates a problem document.
pub fn parse_problem(text: &str) -> Result<DecisionProblem, Error> {
    let problem = read_document(text)?;
    problem.ensure_valid()?;
    Ok(problem)
}

/// Like [`parse_problem`] for an already-parsed JSON value.
pub fn parse_problem_value(value: Value) -> Result<DecisionProblem, Error> {
    let problem = read_document_value(value)?;
    problem.ensure_valid()?;
    Ok(problem)
}

/// Syntax and schema checks only; the problem may still fail validation.
pub fn read_document(text: &str) -> Result<DecisionProblem, Error> {
    let value = parse_json(text)?;
    check_version(&value)?;
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: ProblemDocument = serde_path_to_error::deserialize(&mut de).map_err(schema_error)?;
    Ok(doc.problem)
}

pub fn read_document_value(value: Value) -> Result<DecisionProblem, Error> {
    check_version(&value)?;
    let doc: ProblemDocument = serde_path_to_error::deserialize(value).map_err(schema_error)?;
    Ok(doc.problem)
}

/// Parses JSON text, reporting syntax errors as [`Error::Malformed`].
pub fn parse_json(text: &str) -> Result<Value, Error> {
    if text.trim().is_empty() {
        return Err(Error::Malformed {
            message: "document is empty".into(),
            path: String::new(),
            line: 0,
            column: 0,
        });
    }
    serde_json::from_str(text).map_err(|e| Error::Malformed {
        message: without_position(&e),
        path: String::new(),
        line: e.line(),
        column: e.column(),
    })
}

fn check_version(value: &Value) -> Result<(), Error> {
    let Some(obj) = value.as_object() else {
        return Err(Error::Malformed {
            message: "document must be a JSON object".into(),
            path: String::new(),
            line: 0,
            column: 0,
        });
    };
    match obj.get("format_version") {
        Some(Value::String(v)) if v == FORMAT_VERSION => Ok(()),
        Some(Value::String(v)) => Err(Error::UnsupportedVersion(v.clone())),
        Some(other) => Err(Error::UnsupportedVersion(other.to_string())),
        None => Err(Error::Malformed {
            message: "missing field `format_version`".into(),
            path: String::new(),
            line: 0,
            column: 0,
        }),
    }
}

fn schema_error<E: std::fmt::Display + JsonPosition>(err: serde_path_to_error::Error<E>) -> Error {
    let path = err.path().to_string();
    let inner = err.inner();
    let message = without_position(inner);
    if let Some(field) = message
        .strip_prefix("unknown field `")
        .and_then(|rest| rest.split('`').next())
    {
        return Error::UnknownField {
            field: field.to_owned(),
            path,
        };
    }
    let (line, column) = inner.position();
    Error::Malformed {
        message,
        path,
        line,
        column,
    }
}

/// serde_json appends " at line L column C"; the position is kept separately.
fn without_position(err: &impl std::fmt::Display) -> String {
    let text = err.to_string();
    match text.rfind(" at line ") {
        Some(i) => text[..i].to_owned(),
        None => text,
    }
}

trait JsonPosition {
    fn position(&self) -> (usize, usize);
}

impl JsonPosition for serde_json::Error {
    fn position(&self) -> (usize, usize) {
        (self.line(), self.column())
    }
}

/// Canonical document text for a problem.
pub fn serialize_problem(problem: &DecisionProblem) -> String {
    to_canonical_json(&ProblemDocument::new(problem.clone()))
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    // `Value` objects are ordered maps, which sorts every key.
    let value = serde_json::to_value(value).expect("engine types serialize to JSON");
    let mut text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::tests::continuous;

    #[test]
    fn round_trip_and_reals() {
        let mut p = continuous(&["x^2", "(x - 2)^2"], -5.0, 5.0);
        p.action_space.variables[0].lower = 0.1;
        let text = serialize_problem(&p);
        let back = parse_problem(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.action_space.variables[0].lower, 0.1);
        assert_eq!(serialize_problem(&back), text);
        assert!(text.contains("\"lower\": 0.1"));
    }

    #[test]
    fn keys_are_sorted() {
        let text = serialize_problem(&continuous(&["x"], 0.0, 1.0));
        let fv = text.find("\"format_version\"").unwrap();
        let pr = text.find("\"problem\"").unwrap();
        assert!(fv < pr);
        let id = text.find("\"id\"").unwrap();
        let title = text.find("\"title\"").unwrap();
        let obj = text.find("\"objectives\"").unwrap();
        assert!(obj < title && id < obj);
    }

    #[test]
    fn empty_document() {
        assert!(matches!(parse_problem(""), Err(Error::Malformed { .. })));
        assert!(matches!(parse_problem("  \n"), Err(Error::Malformed { .. })));
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        match parse_problem("{\n  \"format_version\": \"1\",\n  oops\n}") {
            Err(Error::Malformed { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_named() {
        let mut v: Value = serde_json::from_str(&serialize_problem(&continuous(&["x"], 0.0, 1.0))).unwrap();
        v["colour"] = Value::from("red");
        match parse_problem(&v.to_string()) {
            Err(Error::UnknownField { field, .. }) => assert_eq!(field, "colour"),
            other => panic!("{other:?}"),
        }
        let mut v: Value = serde_json::from_str(&serialize_problem(&continuous(&["x"], 0.0, 1.0))).unwrap();
        v["problem"]["action_space"]["variables"][0]["step"] = Value::from(1);
        match parse_problem(&v.to_string()) {
            Err(Error::UnknownField { field, path }) => {
                assert_eq!(field, "step");
                assert!(path.starts_with("problem.action_space.variables[0]"), "{path}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn versions() {
        let text = serialize_problem(&continuous(&["x"], 0.0, 1.0)).replace("\"1\"", "\"2\"");
        assert!(matches!(parse_problem(&text), Err(Error::UnsupportedVersion(v)) if v == "2"));
        assert!(matches!(
            parse_problem("{\"problem\": {}}"),
            Err(Error::Malformed { .. })
        ));
        assert!(matches!(parse_problem("[1]"), Err(Error::Malformed { .. })));
    }

    #[test]
    fn bad_expressions_are_malformed_with_a_path() {
        let text = serialize_problem(&continuous(&["x"], 0.0, 1.0))
            .replace("\"definition\": \"x\"", "\"definition\": \"x +\"");
        match parse_problem(&text) {
            Err(Error::Malformed { path, message, .. }) => {
                assert_eq!(path, "problem.objectives[0].definition");
                assert!(message.contains("position 3"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_problems_are_rejected() {
        let mut p = continuous(&["x"], 0.0, 1.0);
        p.objectives.clear();
        assert!(matches!(parse_problem(&serialize_problem(&p)), Err(Error::Invalid(_))));
    }
}
