//! Binding structure: free variables, admissible substitution of variables,
//! fresh variables and relettering of assignment binders.
//!
//! `[x := t]` binds `x` in its body only; `t` sits outside the scope.
//! Announcements and updates bind nothing, so the variables of the
//! announced formula and of every event precondition count as free.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::formula::{EventModel, Formula, Term};
use super::symbol::Var;

/// Position of a subformula, as child indices from the root (see
/// [`Formula::children`]).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Path(pub Vec<usize>);

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubstError {
    #[error("substituting {y} for {x} is not admissible: the binder of {y} at {binder} would capture it")]
    Inadmissible { x: Var, y: Var, binder: Path },
    #[error("expected an assignment binding {0}")]
    NotAnAssignment(Var),
    #[error("{0} is not fresh")]
    NotFresh(Var),
}

fn term_var(t: &Term, out: &mut BTreeSet<Var>) {
    if let Term::Var(v) = t {
        out.insert(v.clone());
    }
}

pub fn free_vars(f: &Formula) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    collect_free(f, &mut out);
    out
}

fn collect_free(f: &Formula, out: &mut BTreeSet<Var>) {
    match f {
        Formula::Top => {}
        Formula::Eq(a, b) => {
            term_var(a, out);
            term_var(b, out);
        }
        Formula::Pred(_, ts) => ts.iter().for_each(|t| term_var(t, out)),
        Formula::Not(g) | Formula::Know(_, g) => collect_free(g, out),
        Formula::And(a, b) | Formula::Announce(a, b) => {
            collect_free(a, out);
            collect_free(b, out);
        }
        Formula::Assign(x, t, g) => {
            let mut inner = BTreeSet::new();
            collect_free(g, &mut inner);
            inner.remove(x);
            out.extend(inner);
            term_var(t, out);
        }
        Formula::Update(em, _, g) => {
            em.preconditions().iter().for_each(|p| collect_free(p, out));
            collect_free(g, out);
        }
    }
}

pub fn is_free_in(x: &Var, f: &Formula) -> bool {
    free_vars(f).contains(x)
}

/// Every variable occurring in `f`, free, bound or as a binder.
pub fn all_vars(f: &Formula) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    collect_all(f, &mut out);
    out
}

fn collect_all(f: &Formula, out: &mut BTreeSet<Var>) {
    match f {
        Formula::Top => {}
        Formula::Eq(a, b) => {
            term_var(a, out);
            term_var(b, out);
        }
        Formula::Pred(_, ts) => ts.iter().for_each(|t| term_var(t, out)),
        Formula::Not(g) | Formula::Know(_, g) => collect_all(g, out),
        Formula::And(a, b) | Formula::Announce(a, b) => {
            collect_all(a, out);
            collect_all(b, out);
        }
        Formula::Assign(x, t, g) => {
            out.insert(x.clone());
            term_var(t, out);
            collect_all(g, out);
        }
        Formula::Update(em, _, g) => {
            em.preconditions().iter().for_each(|p| collect_all(p, out));
            collect_all(g, out);
        }
    }
}

pub fn occurs_in(x: &Var, f: &Formula) -> bool {
    all_vars(f).contains(x)
}

/// First reserved variable `z0, z1, ...` that occurs nowhere in the given
/// formulas and terms.
pub fn fresh_var(formulas: &[&Formula], terms: &[&Term]) -> Var {
    let mut used = BTreeSet::new();
    for f in formulas {
        collect_all(f, &mut used);
    }
    for t in terms {
        term_var(t, &mut used);
    }
    (0..)
        .map(Var::reserved)
        .find(|z| !used.contains(z))
        .expect("finite formulas leave reserved variables unused")
}

/// True iff every `y` introduced at a free occurrence of `x` stays free.
pub fn is_admissible(f: &Formula, x: &Var, y: &Var) -> bool {
    find_capture(f, x, y, &mut vec![]).is_none()
}

fn find_capture(f: &Formula, x: &Var, y: &Var, path: &mut Vec<usize>) -> Option<Path> {
    if x == y {
        return None;
    }
    match f {
        Formula::Top | Formula::Eq(..) | Formula::Pred(..) => None,
        Formula::Assign(v, _, body) => {
            if v == x {
                return None;
            }
            if v == y && is_free_in(x, body) {
                return Some(Path(path.clone()));
            }
            path.push(0);
            let r = find_capture(body, x, y, path);
            path.pop();
            r
        }
        _ => {
            for (i, c) in f.children().into_iter().enumerate() {
                path.push(i);
                let r = find_capture(c, x, y, path);
                path.pop();
                if r.is_some() {
                    return r;
                }
            }
            None
        }
    }
}

/// `f[y/x]`: replace the free occurrences of variable `x` by `y`.
pub fn substitute(f: &Formula, x: &Var, y: &Var) -> Result<Formula, SubstError> {
    if let Some(binder) = find_capture(f, x, y, &mut vec![]) {
        return Err(SubstError::Inadmissible {
            x: x.clone(),
            y: y.clone(),
            binder,
        });
    }
    Ok(subst_unchecked(f, x, y))
}

fn subst_term(t: &Term, x: &Var, y: &Var) -> Term {
    match t {
        Term::Var(v) if v == x => Term::Var(y.clone()),
        _ => t.clone(),
    }
}

pub(crate) fn subst_unchecked(f: &Formula, x: &Var, y: &Var) -> Formula {
    match f {
        Formula::Top => Formula::Top,
        Formula::Eq(a, b) => Formula::Eq(subst_term(a, x, y), subst_term(b, x, y)),
        Formula::Pred(p, ts) => Formula::Pred(p.clone(), ts.iter().map(|t| subst_term(t, x, y)).collect()),
        Formula::Not(g) => Formula::not(subst_unchecked(g, x, y)),
        Formula::And(a, b) => Formula::and(subst_unchecked(a, x, y), subst_unchecked(b, x, y)),
        Formula::Know(i, g) => Formula::know(i.clone(), subst_unchecked(g, x, y)),
        Formula::Assign(v, t, g) => {
            let t = subst_term(t, x, y);
            let body = if v == x { (**g).clone() } else { subst_unchecked(g, x, y) };
            Formula::assign(v.clone(), t, body)
        }
        Formula::Announce(a, b) => Formula::announce(subst_unchecked(a, x, y), subst_unchecked(b, x, y)),
        Formula::Update(em, e, g) => Formula::update(subst_event_model(em, x, y), e.clone(), subst_unchecked(g, x, y)),
    }
}

/// The event model whose preconditions are all `pre[y/x]`; unchanged (same
/// `Arc`) when `x` is free in no precondition.
pub fn subst_event_model(em: &Arc<EventModel>, x: &Var, y: &Var) -> Arc<EventModel> {
    if !em.preconditions().iter().any(|p| is_free_in(x, p)) {
        return em.clone();
    }
    let name = format!("{}[{}/{}]", em.name(), super::print::var_text(y), super::print::var_text(x));
    Arc::new(em.map_preconditions(name, |p| subst_unchecked(p, x, y)))
}

/// `[x := t]ψ` becomes `[z := t]ψ[z/x]`, for `z` fresh in `ψ` and `t`.
pub fn reletter(f: &Formula, x: &Var, z: &Var) -> Result<Formula, SubstError> {
    let Formula::Assign(v, t, body) = f else {
        return Err(SubstError::NotAnAssignment(x.clone()));
    };
    if v != x {
        return Err(SubstError::NotAnAssignment(x.clone()));
    }
    if z != x && (occurs_in(z, body) || t.as_var() == Some(z)) {
        return Err(SubstError::NotFresh(z.clone()));
    }
    let renamed = substitute(body, x, z)?;
    Ok(Formula::assign(z.clone(), t.clone(), renamed))
}
