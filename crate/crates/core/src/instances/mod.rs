//! Built-in rules and the generic monoid builder.

pub mod forests;
pub mod graphs;
pub mod monoid;
pub mod words;

use crate::error::{HopfError, Result};
use crate::rule::{ObjectKey, Rule};

pub use monoid::{monoid_rule_from_generators, MonoidRule};
pub use words::Alphabet;

/// Names accepted by [`make_rule`].
pub const INSTANCES: [&str; 6] = ["free", "symmetric", "shuffle", "polynomial", "graph", "forest"];

/// Alphabet used by the word instances when none is given.
pub const DEFAULT_ALPHABET: &str = "ab";

/// Builds a built-in rule by name. `alphabet` applies to `free`, `symmetric`
/// and `shuffle`; the other instances ignore it.
pub fn make_rule(name: &str, alphabet: Option<&str>) -> Result<Rule> {
    let letters = || Alphabet::parse(alphabet.unwrap_or(DEFAULT_ALPHABET));
    match name {
        "free" => words::free(letters()?),
        "symmetric" => words::symmetric(letters()?),
        "shuffle" => words::shuffle_algebra(letters()?),
        "polynomial" => words::polynomial(),
        "graph" => graphs::graph(),
        "forest" => forests::forest(),
        other => Err(HopfError::UnknownInstance(other.to_string())),
    }
}

/// All canonical objects of size ≤ `bound`, ascending by size then key, Ø first.
pub fn enumerate_basis(rule: &Rule, bound: usize) -> Result<Vec<ObjectKey>> {
    rule.enumerate_basis(bound)
        .ok_or_else(|| HopfError::InvalidRule(format!("rule `{}` cannot enumerate its objects", rule.name())))
}

pub fn parse_object(rule: &Rule, text: &str) -> Result<ObjectKey> {
    rule.parse_object(text)
}
