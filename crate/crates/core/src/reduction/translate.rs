use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::syntax::{fresh_var, subst_event_model, subst_unchecked, EventId, EventModel, Formula, Path, Term};

use super::compose::compose_models;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Axiom {
    AAtom,
    ANeg,
    ACon,
    AK,
    ACom,
    AAssi,
    UAtom,
    UNeg,
    UCon,
    UK,
    UCom,
    UAssi,
    UAssiPos,
}

impl Axiom {
    pub const ALL: [Axiom; 13] = [
        Axiom::AAtom,
        Axiom::ANeg,
        Axiom::ACon,
        Axiom::AK,
        Axiom::ACom,
        Axiom::AAssi,
        Axiom::UAtom,
        Axiom::UNeg,
        Axiom::UCon,
        Axiom::UK,
        Axiom::UCom,
        Axiom::UAssi,
        Axiom::UAssiPos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::AAtom => "AATOM",
            Axiom::ANeg => "ANEG",
            Axiom::ACon => "ACON",
            Axiom::AK => "AK",
            Axiom::ACom => "ACOM",
            Axiom::AAssi => "AASSI",
            Axiom::UAtom => "UATOM",
            Axiom::UNeg => "UNEG",
            Axiom::UCon => "UCON",
            Axiom::UK => "UK",
            Axiom::UCom => "UCOM",
            Axiom::UAssi => "UASSI",
            Axiom::UAssiPos => "UASSI'",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How nested dynamic operators are eliminated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Merge `[!ψ][!χ]` and Pos-free `[E,e][E',e']` by ACOM/UCOM.
    #[default]
    Compose,
    /// Always eliminate the inner operator first.
    InnerFirst,
}

/// One rewrite: the redex at `path` of the current formula was replaced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub axiom: Axiom,
    pub path: Path,
    pub before: Formula,
    pub after: Formula,
}

impl Step {
    /// The biconditional instance of the axiom used.
    pub fn instance(&self) -> Formula {
        Formula::iff(self.before.clone(), self.after.clone())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RewriteTrace {
    pub steps: Vec<Step>,
}

#[derive(Serialize)]
struct StepRecord<'a> {
    axiom: &'a str,
    position: String,
    before: String,
    after: String,
}

impl RewriteTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn to_json(&self) -> String {
        let records: Vec<StepRecord> = self
            .steps
            .iter()
            .map(|s| StepRecord {
                axiom: s.axiom.name(),
                position: s.path.to_string(),
                before: s.before.to_string(),
                after: s.after.to_string(),
            })
            .collect();
        serde_json::to_string_pretty(&records).expect("trace serializes")
    }
}

impl fmt::Display for RewriteTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.steps.iter().enumerate() {
            writeln!(f, "{:>3}. {:<7} at {}", k + 1, s.axiom.name(), s.path)?;
            writeln!(f, "       {}", s.before)?;
            writeln!(f, "    => {}", s.after)?;
        }
        Ok(())
    }
}

/// `Pos⁺(t, e)`: variables stay, names move through the postcondition.
pub fn pos_plus(em: &EventModel, t: &Term, e: &EventId) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Name(a) => match em.index_of(e) {
            Some(i) => Term::Name(em.pos_of(i, a)),
            None => t.clone(),
        },
    }
}

fn pos_plus_at(em: &EventModel, t: &Term, i: usize) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Name(a) => Term::Name(em.pos_of(i, a)),
    }
}

/// The dynamic-operator-free equivalent of `f`, with its rewrite trace.
pub fn translate(f: &Formula) -> (Formula, RewriteTrace) {
    translate_with(f, Strategy::default(), true)
}

/// As [`translate`]; the trace is left empty unless `record` is set.
pub fn translate_with(f: &Formula, strategy: Strategy, record: bool) -> (Formula, RewriteTrace) {
    let mut t = Translator {
        strategy,
        record,
        trace: RewriteTrace::default(),
        path: vec![],
    };
    let out = t.tr(f);
    (out, t.trace)
}

struct Translator {
    strategy: Strategy,
    record: bool,
    trace: RewriteTrace,
    path: Vec<usize>,
}

impl Translator {
    fn at<T>(&mut self, child: usize, run: impl FnOnce(&mut Self) -> T) -> T {
        self.path.push(child);
        let r = run(self);
        self.path.pop();
        r
    }

    fn step(&mut self, axiom: Axiom, before: &Formula, after: &Formula) {
        if self.record {
            self.trace.steps.push(Step {
                axiom,
                path: Path(self.path.clone()),
                before: before.clone(),
                after: after.clone(),
            });
        }
    }

    fn tr(&mut self, f: &Formula) -> Formula {
        if f.is_dynamic_free() {
            return f.clone();
        }
        match f {
            Formula::Top | Formula::Eq(..) | Formula::Pred(..) => f.clone(),
            Formula::Not(g) => Formula::not(self.at(0, |t| t.tr(g))),
            Formula::And(a, b) => {
                let a = self.at(0, |t| t.tr(a));
                let b = self.at(1, |t| t.tr(b));
                Formula::and(a, b)
            }
            Formula::Know(i, g) => Formula::know(i.clone(), self.at(0, |t| t.tr(g))),
            Formula::Assign(x, s, g) => Formula::assign(x.clone(), s.clone(), self.at(0, |t| t.tr(g))),
            Formula::Announce(psi, body) => {
                let psi = self.at(0, |t| t.tr(psi));
                self.announce(psi, body)
            }
            Formula::Update(em, e, body) => {
                let em = self.static_preconditions(em, e, body);
                self.update(em, e, body)
            }
        }
    }

    /// Translates every dynamic precondition in place, as rewrites at the
    /// precondition positions of the update node.
    fn static_preconditions(&mut self, em: &Arc<EventModel>, e: &EventId, body: &Formula) -> Arc<EventModel> {
        if em.preconditions().iter().all(Formula::is_dynamic_free) {
            return em.clone();
        }
        let mut cur = Formula::update(em.clone(), e.clone(), body.clone());
        for i in 0..em.len() {
            if em.pre_at(i).is_dynamic_free() {
                continue;
            }
            let new = self.at(1 + i, |t| t.tr(em.pre_at(i)));
            *cur.subformula_mut(&[1 + i]).expect("precondition path") = new;
        }
        match cur {
            Formula::Update(em, _, _) => em,
            _ => unreachable!(),
        }
    }

    /// `[!ψ]body` with `ψ` already static.
    fn announce(&mut self, psi: Formula, body: &Formula) -> Formula {
        let redex = Formula::announce(psi.clone(), body.clone());
        match body {
            Formula::Top | Formula::Eq(..) | Formula::Pred(..) => {
                let out = Formula::implies(psi, body.clone());
                self.step(Axiom::AAtom, &redex, &out);
                out
            }
            Formula::Not(g) => {
                let out = Formula::implies(psi.clone(), Formula::not(Formula::announce(psi, (**g).clone())));
                self.step(Axiom::ANeg, &redex, &out);
                self.tr(&out)
            }
            Formula::And(a, b) => {
                let out = Formula::and(
                    Formula::announce(psi.clone(), (**a).clone()),
                    Formula::announce(psi, (**b).clone()),
                );
                self.step(Axiom::ACon, &redex, &out);
                self.tr(&out)
            }
            Formula::Know(i, g) => {
                let out = Formula::implies(psi.clone(), Formula::know(i.clone(), Formula::announce(psi, (**g).clone())));
                self.step(Axiom::AK, &redex, &out);
                self.tr(&out)
            }
            Formula::Assign(x, s, g) => {
                let z = fresh_var(&[&redex], &[]);
                let out = Formula::assign(
                    z.clone(),
                    Term::Var(x.clone()),
                    Formula::assign(
                        x.clone(),
                        s.clone(),
                        Formula::announce(subst_unchecked(&psi, x, &z), (**g).clone()),
                    ),
                );
                self.step(Axiom::AAssi, &redex, &out);
                self.tr(&out)
            }
            Formula::Announce(chi, g) if self.strategy == Strategy::Compose => {
                let merged = Formula::and(psi.clone(), Formula::announce(psi, (**chi).clone()));
                let out = Formula::announce(merged, (**g).clone());
                self.step(Axiom::ACom, &redex, &out);
                self.tr(&out)
            }
            Formula::Announce(..) | Formula::Update(..) => {
                let inner = self.at(1, |t| t.tr(body));
                self.announce(psi, &inner)
            }
        }
    }

    /// `[E,e]body` with every precondition of `E` already static.
    fn update(&mut self, em: Arc<EventModel>, e: &EventId, body: &Formula) -> Formula {
        let redex = Formula::update(em.clone(), e.clone(), body.clone());
        let ei = em.index_of(e).expect("update names an event of its model");
        let pre = em.pre_at(ei).clone();
        match body {
            Formula::Top => {
                let out = Formula::implies(pre, Formula::Top);
                self.step(Axiom::UAtom, &redex, &out);
                out
            }
            Formula::Eq(a, b) => {
                let out = Formula::implies(pre, Formula::Eq(pos_plus_at(&em, a, ei), pos_plus_at(&em, b, ei)));
                self.step(Axiom::UAtom, &redex, &out);
                out
            }
            Formula::Pred(p, ts) => {
                let ts = ts.iter().map(|t| pos_plus_at(&em, t, ei)).collect();
                let out = Formula::implies(pre, Formula::Pred(p.clone(), ts));
                self.step(Axiom::UAtom, &redex, &out);
                out
            }
            Formula::Not(g) => {
                let out = Formula::implies(pre, Formula::not(Formula::update(em.clone(), e.clone(), (**g).clone())));
                self.step(Axiom::UNeg, &redex, &out);
                self.tr(&out)
            }
            Formula::And(a, b) => {
                let out = Formula::and(
                    Formula::update(em.clone(), e.clone(), (**a).clone()),
                    Formula::update(em.clone(), e.clone(), (**b).clone()),
                );
                self.step(Axiom::UCon, &redex, &out);
                self.tr(&out)
            }
            Formula::Know(i, g) => {
                let conj = Formula::conjunction(
                    em.successors(i, ei)
                        .map(|f| Formula::know(i.clone(), Formula::update(em.clone(), em.events()[f].clone(), (**g).clone())))
                        .collect::<Vec<_>>(),
                );
                let out = Formula::implies(pre, conj);
                self.step(Axiom::UK, &redex, &out);
                self.tr(&out)
            }
            Formula::Assign(x, s, g) => {
                let z = fresh_var(&[&redex], &[]);
                let renamed = subst_event_model(&em, x, &z);
                let (axiom, s) = if em.has_factual_change() {
                    (Axiom::UAssiPos, pos_plus_at(&em, s, ei))
                } else {
                    (Axiom::UAssi, s.clone())
                };
                let out = Formula::assign(
                    z,
                    Term::Var(x.clone()),
                    Formula::assign(x.clone(), s, Formula::update(renamed, e.clone(), (**g).clone())),
                );
                self.step(axiom, &redex, &out);
                self.tr(&out)
            }
            Formula::Update(em2, e2, g)
                if self.strategy == Strategy::Compose && !em.has_factual_change() && !em2.has_factual_change() =>
            {
                let composite = Arc::new(compose_models(&em, em2));
                let out = Formula::update(composite, EventId::pair(e.clone(), e2.clone()), (**g).clone());
                self.step(Axiom::UCom, &redex, &out);
                self.tr(&out)
            }
            Formula::Announce(..) | Formula::Update(..) => {
                let inner = self.at(0, |t| t.tr(body));
                self.update(em, e, &inner)
            }
        }
    }
}

/// Termination weight: dynamic operators multiply the weight of their
/// scope, so every reduction step strictly decreases the weight of its
/// redex.
pub fn complexity(f: &Formula) -> u128 {
    match f {
        Formula::Top | Formula::Eq(..) | Formula::Pred(..) => 1,
        Formula::Not(g) | Formula::Know(_, g) | Formula::Assign(_, _, g) => complexity(g).saturating_add(1),
        Formula::And(a, b) => complexity(a).max(complexity(b)).saturating_add(1),
        Formula::Announce(psi, g) => complexity(psi).saturating_add(4).saturating_mul(complexity(g)),
        Formula::Update(em, _, g) => {
            let pre = em.preconditions().iter().map(complexity).max().unwrap_or(1);
            pre.saturating_add(4 + em.len() as u128).saturating_mul(complexity(g))
        }
    }
}
