//! Hilbert-style derivations: axiom schemas with checked side conditions,
//! the rules MP, NECK and NECAS, and a line-by-line checker.

mod check;
mod schema;
mod taut;

pub use check::{apply_rule, as_implication, check_derivation, Derivation, Justification, ProofError, ProofLine, Rule, RuleError, System, Theorem};
pub use schema::{
    diamond_announce, diamond_assign, instantiate_schema, no_miracles, perfect_recall, Binding, Bindings, Kind,
    SchemaError, SchemaId,
};
pub use taut::{check_tautology, is_tautology, skeleton_atoms, TautVerdict, MAX_TAUT_ATOMS};
