//! Derived operators. Everything here expands to primitive formulas; the
//! bound variable of every expansion is drawn from the reserved namespace
//! and avoids the operator's arguments, so "x not free in φ" always holds.

use super::formula::{Formula, Term};
use super::subst::fresh_var;
use super::symbol::{Agent, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sugar {
    /// Agent knows the value of a term.
    Kv(Agent, Term),
    /// Public announcement of the actual value of a term.
    AnnounceValue(Term, Formula),
    /// `K_i [!φ] Kv_i c`
    KvCond(Agent, Formula, Term),
    /// `K_i [!c] Kv_i d`: how `d` functionally depends on `c`.
    KvFunc(Agent, Term, Term),
    /// `K_i [!c] (K_i φ ∨ K_i ¬φ)`
    KvTruth(Agent, Term, Formula),
    /// `K_i ([!ψ](K_i φ ∨ K_i ¬φ) ∧ [!¬ψ](K_i φ ∨ K_i ¬φ))`
    KvDep(Agent, Formula, Formula),
    Or(Formula, Formula),
    Implies(Formula, Formula),
    Iff(Formula, Formula),
    DualK(Agent, Formula),
    DualAssign(Var, Term, Formula),
    DualAnnounce(Formula, Formula),
}

fn whether(i: &Agent, phi: Formula) -> Formula {
    Formula::or(
        Formula::know(i.clone(), phi.clone()),
        Formula::know(i.clone(), Formula::not(phi)),
    )
}

pub fn desugar(s: Sugar) -> Formula {
    match s {
        Sugar::Kv(i, a) => {
            let z = fresh_var(&[], &[&a]);
            Formula::assign(z.clone(), a.clone(), Formula::know(i, Formula::eq(Term::Var(z), a)))
        }
        Sugar::AnnounceValue(a, phi) => {
            let z = fresh_var(&[&phi], &[&a]);
            Formula::assign(
                z.clone(),
                a.clone(),
                Formula::announce(Formula::eq(Term::Var(z), a), phi),
            )
        }
        Sugar::KvCond(i, phi, c) => {
            let kv = desugar(Sugar::Kv(i.clone(), c));
            Formula::know(i, Formula::announce(phi, kv))
        }
        Sugar::KvFunc(i, c, d) => {
            let kv = desugar(Sugar::Kv(i.clone(), d));
            Formula::know(i, desugar(Sugar::AnnounceValue(c, kv)))
        }
        Sugar::KvTruth(i, c, phi) => {
            let w = whether(&i, phi);
            Formula::know(i, desugar(Sugar::AnnounceValue(c, w)))
        }
        Sugar::KvDep(i, psi, phi) => {
            let w = whether(&i, phi);
            Formula::know(
                i,
                Formula::and(
                    Formula::announce(psi.clone(), w.clone()),
                    Formula::announce(Formula::not(psi), w),
                ),
            )
        }
        Sugar::Or(a, b) => Formula::or(a, b),
        Sugar::Implies(a, b) => Formula::implies(a, b),
        Sugar::Iff(a, b) => Formula::iff(a, b),
        Sugar::DualK(i, phi) => Formula::not(Formula::know(i, Formula::not(phi))),
        Sugar::DualAssign(x, t, phi) => Formula::not(Formula::assign(x, t, Formula::not(phi))),
        Sugar::DualAnnounce(psi, phi) => Formula::not(Formula::announce(psi, Formula::not(phi))),
    }
}
