//! Combinatorial Hopf algebras generated from composition/decomposition rules.
//!
//! A [`Rule`] describes how objects of a combinatorial class combine and
//! split. From it, [`hopf`] builds the product, coproduct, counit, antipode
//! and grading over exact rationals, and [`axioms`] checks the conditions a
//! rule claims on bounded domains.

pub mod axioms;
pub mod cli;
pub mod error;
pub mod hopf;
pub mod instances;
pub mod multiset;
pub mod rule;
pub mod vector;

pub use error::{HopfError, Result};
pub use instances::{make_rule, Alphabet};
pub use multiset::Multiset;
pub use rule::{Condition, ObjectKey, Rule, Strategy};
pub use vector::{Element, Rational, TensorElement};
