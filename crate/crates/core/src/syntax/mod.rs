//! Formulas, event models, binding structure, sugar, printing and parsing.

mod formula;
mod parse;
mod print;
mod signature;
mod subst;
mod sugar;
mod symbol;

pub use formula::{EventModel, EventModelBuilder, EventModelError, Formula, Symbols, Term};
pub use parse::{parse_formula, parse_formula_in, parse_term, parse_with_arities, ParseError};
pub use print::{is_conventional_var, var_text};
pub use signature::{ParseEnv, Signature};
pub use subst::{
    all_vars, free_vars, fresh_var, is_admissible, is_free_in, occurs_in, reletter, subst_event_model, substitute,
    Path, SubstError,
};
pub(crate) use subst::subst_unchecked;
pub use sugar::{desugar, Sugar};
pub use symbol::{Agent, EventId, Name, Pred, Var, RESERVED_PREFIX};
