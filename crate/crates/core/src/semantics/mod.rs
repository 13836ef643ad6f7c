//! Truth evaluation, announcement restriction and update products.
//!
//! The evaluator computes the truth set of a formula over all worlds at
//! once, so each announcement restricts and each update builds its product
//! a single time per assignment.

mod eval;
mod explain;
mod update;

use crate::model::PointedModel;
use crate::search::Verdict;
use crate::syntax::Formula;

pub use eval::{check_evaluable, check_symbols, eval, truth_set, EvalContext, EvalError};
pub(crate) use eval::sat;
pub use explain::{explain, Explanation};
pub use update::{product, restrict};

/// Whether `instance` holds at every pointed model of `models`; the first
/// falsifying one is returned as a countermodel.
pub fn check_axiom_pair(
    models: impl IntoIterator<Item = PointedModel>,
    instance: &Formula,
) -> Result<Verdict, EvalError> {
    let mut checked = 0;
    for pm in models {
        if !eval(&pm, instance)? {
            return Ok(Verdict::Countermodel(Box::new(pm)));
        }
        checked += 1;
    }
    Ok(Verdict::ValidWithinBounds { checked })
}
