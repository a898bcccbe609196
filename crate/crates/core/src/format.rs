//! JSON transducer files.
//!
//! ```json
//! {
//!   "formatVersion": 1,
//!   "inputAlphabet": ["a", "b"],
//!   "outputAlphabet": ["a", "b"],
//!   "states": [{ "id": "q", "priority": 0 }],
//!   "initial": "q",
//!   "transitions": [{ "from": "q", "input": "a", "output": "a", "to": "q" }]
//! }
//! ```
//!
//! Symbols are single characters. Input and output words are strings of symbols; the empty
//! string is the empty word. Strings longer than one character in an alphabet are rejected
//! so that multi-character symbols can be given a syntax later without breaking files.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::transducer::{Transducer, Transition, ValidationError};
use crate::Priority;

pub const FORMAT_VERSION: u32 = 1;

/// Malformed file: bad JSON, missing or unknown fields, or values of the wrong shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let (Some(l), Some(c)) = (self.line, self.column) {
            write!(f, "line {l}, column {c}: ")?;
        }
        if let Some(field) = &self.field {
            write!(f, "field {field}: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct SpecFile {
    format_version: u32,
    input_alphabet: Vec<String>,
    output_alphabet: Vec<String>,
    states: Vec<StateEntry>,
    initial: String,
    transitions: Vec<TransitionEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateEntry {
    id: String,
    priority: Priority,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionEntry {
    from: String,
    input: String,
    output: String,
    to: String,
}

fn field_error(field: String, message: String) -> ParseError {
    ParseError { line: None, column: None, field: Some(field), message }
}

fn symbols(field: &str, raw: &[String]) -> Result<Vec<char>, ParseError> {
    raw.iter()
        .enumerate()
        .map(|(i, s)| {
            let mut it = s.chars();
            match (it.next(), it.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(field_error(format!("{field}[{i}]"), format!("symbol {s:?} is not a single character"))),
            }
        })
        .collect()
}

pub fn parse_spec(text: &str) -> Result<Transducer, FormatError> {
    let file: SpecFile = serde_json::from_str(text).map_err(|e| ParseError {
        line: Some(e.line()),
        column: Some(e.column()),
        field: None,
        message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
    })?;
    if file.format_version != FORMAT_VERSION {
        return Err(field_error(
            "formatVersion".into(),
            format!("unsupported version {}, expected {FORMAT_VERSION}", file.format_version),
        )
        .into());
    }
    let input = symbols("inputAlphabet", &file.input_alphabet)?;
    let output = symbols("outputAlphabet", &file.output_alphabet)?;
    let index: HashMap<&str, usize> = file.states.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();
    let mut violations = Vec::new();
    let mut resolve = |what: String, name: &str| match index.get(name) {
        Some(&i) => i,
        None => {
            violations.push(format!("{what} state {name:?} is not declared"));
            0
        }
    };
    let initial = resolve("initial".into(), &file.initial);
    let transitions: Vec<Transition> = file
        .transitions
        .iter()
        .enumerate()
        .map(|(i, t)| Transition {
            from: resolve(format!("transition {i}: from"), &t.from),
            input: t.input.chars().collect(),
            output: t.output.chars().collect(),
            to: resolve(format!("transition {i}: to"), &t.to),
        })
        .collect();
    let states = file.states.into_iter().map(|s| (s.id, s.priority)).collect();
    match Transducer::new(input, output, states, initial, transitions) {
        Ok(t) if violations.is_empty() => Ok(t),
        Ok(_) => Err(ValidationError { violations }.into()),
        Err(mut e) => {
            violations.append(&mut e.violations);
            Err(ValidationError { violations }.into())
        }
    }
}

pub fn emit_spec(t: &Transducer) -> String {
    let file = SpecFile {
        format_version: FORMAT_VERSION,
        input_alphabet: t.input_alphabet().iter().map(char::to_string).collect(),
        output_alphabet: t.output_alphabet().iter().map(char::to_string).collect(),
        states: (0..t.state_count())
            .map(|q| StateEntry { id: t.state_name(q).to_string(), priority: t.priority(q) })
            .collect(),
        initial: t.state_name(t.initial()).to_string(),
        transitions: t
            .transitions()
            .iter()
            .map(|tr| TransitionEntry {
                from: t.state_name(tr.from).to_string(),
                input: tr.input.iter().collect(),
                output: tr.output.iter().collect(),
                to: t.state_name(tr.to).to_string(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("spec files always serialize") + "\n"
}
