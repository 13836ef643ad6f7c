use smallvec::SmallVec;
use thiserror::Error;

use crate::model::{Assignment, KripkeModel, LiftError, PointedModel, WorldSet};
use crate::syntax::{free_vars, is_free_in, Agent, EventModel, Formula, Name, Pred, Term, Var};

use super::update::{product_on, restrict_to};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("name {0} is not interpreted by the model")]
    UninterpretedName(Name),
    #[error("predicate {0} is not interpreted by the model")]
    UninterpretedPredicate(Pred),
    #[error("predicate {pred} has arity {expected} in the model but is applied to {found} terms")]
    Arity { pred: Pred, expected: usize, found: usize },
    #[error("agent {0} is not declared by the model")]
    UnknownAgent(Agent),
    #[error("free variable {0} has no value under the assignment")]
    UnassignedVariable(Var),
    #[error("postcondition of event model `{model}` maps to name {name}, which the model does not interpret")]
    UninterpretedPostcondition { model: String, name: Name },
}

impl From<LiftError> for EvalError {
    fn from(e: LiftError) -> Self {
        match e {
            LiftError::UnassignedVariable(x) => EvalError::UnassignedVariable(x),
            LiftError::UninterpretedName(a) => EvalError::UninterpretedName(a),
        }
    }
}

/// Evaluation context: model, world and assignment.
pub type EvalContext = PointedModel;

/// Checks that every symbol of `f` is interpreted and every free variable
/// assigned, so that evaluation cannot fail afterwards.
pub fn check_evaluable(m: &KripkeModel, sigma: &Assignment, f: &Formula) -> Result<(), EvalError> {
    for x in free_vars(f) {
        if sigma.get(&x).is_none() {
            return Err(EvalError::UnassignedVariable(x));
        }
    }
    check_symbols(m, f)
}

/// The symbol half of [`check_evaluable`].
pub fn check_symbols(m: &KripkeModel, f: &Formula) -> Result<(), EvalError> {
    let v = m.vocab();
    let term = |t: &Term| match t {
        Term::Name(a) if v.name_index(a).is_none() => Err(EvalError::UninterpretedName(a.clone())),
        _ => Ok(()),
    };
    match f {
        Formula::Top => Ok(()),
        Formula::Eq(a, b) => term(a).and(term(b)),
        Formula::Pred(p, ts) => {
            let i = v.pred_index(p).ok_or_else(|| EvalError::UninterpretedPredicate(p.clone()))?;
            let expected = m.predicates()[i].1;
            if expected != ts.len() {
                return Err(EvalError::Arity {
                    pred: p.clone(),
                    expected,
                    found: ts.len(),
                });
            }
            ts.iter().try_for_each(term)
        }
        Formula::Know(i, g) => {
            if v.agent_index(i).is_none() {
                return Err(EvalError::UnknownAgent(i.clone()));
            }
            check_symbols(m, g)
        }
        Formula::Assign(_, t, g) => term(t).and_then(|_| check_symbols(m, g)),
        Formula::Update(em, _, g) => {
            check_event_model(m, em)?;
            check_symbols(m, g)
        }
        _ => f.children().into_iter().try_for_each(|c| check_symbols(m, c)),
    }
}

pub(crate) fn check_event_model(m: &KripkeModel, em: &EventModel) -> Result<(), EvalError> {
    for i in 0..em.len() {
        for b in em.pos_at(i).values() {
            if m.vocab().name_index(b).is_none() {
                return Err(EvalError::UninterpretedPostcondition {
                    model: em.name().to_string(),
                    name: b.clone(),
                });
            }
        }
    }
    em.preconditions().iter().try_for_each(|p| check_symbols(m, p))
}

/// `M, w, σ ⊨ φ`
pub fn eval(ctx: &EvalContext, f: &Formula) -> Result<bool, EvalError> {
    Ok(truth_set(&ctx.model, &ctx.assignment, f)?.contains(ctx.world))
}

/// The worlds of `m` where `f` holds under `sigma`.
pub fn truth_set(m: &KripkeModel, sigma: &Assignment, f: &Formula) -> Result<WorldSet, EvalError> {
    check_evaluable(m, sigma, f)?;
    Ok(sat(m, sigma, f))
}

#[derive(Clone, Copy)]
enum Val {
    Obj(u32),
    Name(usize),
}

fn resolve(m: &KripkeModel, sigma: &Assignment, t: &Term) -> Val {
    match t {
        Term::Var(x) => Val::Obj(sigma.get(x).expect("checked: variable assigned")),
        Term::Name(a) => Val::Name(m.vocab().name_index(a).expect("checked: name interpreted")),
    }
}

fn value(m: &KripkeModel, v: Val, w: usize) -> u32 {
    match v {
        Val::Obj(o) => o,
        Val::Name(i) => m.eta(i, w),
    }
}

/// Truth set without the up-front checks; callers guarantee
/// [`check_evaluable`] holds.
pub(crate) fn sat(m: &KripkeModel, sigma: &Assignment, f: &Formula) -> WorldSet {
    let n = m.num_worlds();
    match f {
        Formula::Top => WorldSet::full(n),
        Formula::Eq(a, b) => {
            let (a, b) = (resolve(m, sigma, a), resolve(m, sigma, b));
            WorldSet::from_fn(n, |w| value(m, a, w) == value(m, b, w))
        }
        Formula::Pred(p, ts) => {
            let pi = m.vocab().pred_index(p).expect("checked: predicate interpreted");
            let args: SmallVec<[Val; 4]> = ts.iter().map(|t| resolve(m, sigma, t)).collect();
            WorldSet::from_fn(n, |w| {
                let key: SmallVec<[u32; 4]> = args.iter().map(|&v| value(m, v, w)).collect();
                m.holds(pi, w, &key)
            })
        }
        Formula::Not(g) => sat(m, sigma, g).complement(n),
        Formula::And(a, b) => {
            let mut s = sat(m, sigma, a);
            if !s.is_empty() {
                s.intersect_with(&sat(m, sigma, b));
            }
            s
        }
        Formula::Know(i, g) => {
            let ai = m.vocab().agent_index(i).expect("checked: agent declared");
            let s = sat(m, sigma, g);
            WorldSet::from_fn(n, |w| m.successors(ai, w).is_subset(&s))
        }
        Formula::Assign(x, t, g) => match t {
            _ if !is_free_in(x, g) => sat(m, sigma, g),
            Term::Var(y) => sat(m, &sigma.with(x, sigma.get(y).expect("checked: variable assigned")), g),
            Term::Name(a) => {
                let ni = m.vocab().name_index(a).expect("checked: name interpreted");
                let mut values: SmallVec<[u32; 8]> = (0..n).map(|w| m.eta(ni, w)).collect();
                values.sort_unstable();
                values.dedup();
                let mut out = WorldSet::empty(n);
                for o in values {
                    let s = sat(m, &sigma.with(x, o), g);
                    for w in s.iter() {
                        if m.eta(ni, w) == o {
                            out.insert(w);
                        }
                    }
                }
                out
            }
        },
        Formula::Announce(psi, g) => {
            let s = sat(m, sigma, psi);
            if s.count() == n {
                return sat(m, sigma, g);
            }
            let mut out = s.complement(n);
            if s.is_empty() {
                return out;
            }
            let (sub, kept) = restrict_to(m, &s, false);
            let t = sat(&sub, sigma, g);
            for (new, &old) in kept.iter().enumerate() {
                if t.contains(new) {
                    out.insert(old);
                }
            }
            out
        }
        Formula::Update(em, e, g) => {
            let pres: Vec<WorldSet> = em.preconditions().iter().map(|p| sat(m, sigma, p)).collect();
            let ei = em.index_of(e).expect("parsed updates name an existing event");
            let mut out = pres[ei].complement(n);
            if pres[ei].is_empty() {
                return out;
            }
            let (prod, index) = product_on(m, em, &pres, false);
            let t = sat(&prod, sigma, g);
            for w in pres[ei].iter() {
                if t.contains(index[w][ei].expect("precondition holds")) {
                    out.insert(w);
                }
            }
            out
        }
    }
}
