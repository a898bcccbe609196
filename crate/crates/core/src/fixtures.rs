//! Bundled example transducers, also shipped as files under `fixtures/`.

use crate::format::parse_spec;
use crate::transducer::Transducer;

pub const ALL: &[(&str, &str)] = &[
    ("id", include_str!("../../../fixtures/id.spec")),
    ("shift", include_str!("../../../fixtures/shift.spec")),
    ("f1", include_str!("../../../fixtures/f1.spec")),
    ("f2", include_str!("../../../fixtures/f2.spec")),
    ("r1", include_str!("../../../fixtures/r1.spec")),
    ("fivestate", include_str!("../../../fixtures/fivestate.spec")),
    ("drat", include_str!("../../../fixtures/drat.spec")),
    ("mixed", include_str!("../../../fixtures/mixed.spec")),
];

/// Parses the bundled fixture `name`. Panics on unknown names.
pub fn load(name: &str) -> Transducer {
    let (_, text) = ALL
        .iter()
        .find(|(n, _)| *n == name)
        .unwrap_or_else(|| panic!("no fixture named {name:?}"));
    parse_spec(text).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}
