//! Reduction of dynamic operators to the static fragment.

mod compose;
mod translate;

pub use compose::compose_models;
pub use translate::{complexity, pos_plus, translate, translate_with, Axiom, RewriteTrace, Step, Strategy};
