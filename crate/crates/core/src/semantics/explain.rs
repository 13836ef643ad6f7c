use std::fmt;

use crate::model::{Assignment, KripkeModel};
use crate::syntax::{Formula, Term};

use super::eval::{check_evaluable, sat, EvalError};
use super::update::{product_on, restrict_to};

/// Clause-by-clause record of one evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanation {
    pub formula: String,
    pub world: String,
    pub value: bool,
    pub note: String,
    pub children: Vec<Explanation>,
}

impl Explanation {
    fn write(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let mark = if self.value { "true " } else { "false" };
        write!(f, "{:indent$}{mark} {}  @ {}", "", self.formula, self.world, indent = 2 * depth)?;
        if !self.note.is_empty() {
            write!(f, "  ({})", self.note)?;
        }
        writeln!(f)?;
        for c in &self.children {
            c.write(f, depth + 1)?;
        }
        Ok(())
    }
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

/// Evaluates `f` at world `w` one clause at a time, recording every step.
pub fn explain(m: &KripkeModel, w: usize, sigma: &Assignment, f: &Formula) -> Result<Explanation, EvalError> {
    check_evaluable(m, sigma, f)?;
    Ok(go(m, w, sigma, f))
}

fn term_value(m: &KripkeModel, w: usize, sigma: &Assignment, t: &Term) -> String {
    let o = m.sigma_lift(w, sigma, t).expect("checked");
    m.object_name(o).to_string()
}

fn go(m: &KripkeModel, w: usize, sigma: &Assignment, f: &Formula) -> Explanation {
    let node = |value: bool, note: String, children: Vec<Explanation>| Explanation {
        formula: f.to_string(),
        world: m.world_id(w).to_string(),
        value,
        note,
        children,
    };
    match f {
        Formula::Top => node(true, String::new(), vec![]),
        Formula::Eq(a, b) => {
            let (va, vb) = (term_value(m, w, sigma, a), term_value(m, w, sigma, b));
            node(va == vb, format!("{a} = {va}, {b} = {vb}"), vec![])
        }
        Formula::Pred(p, ts) => {
            let vals: Vec<String> = ts.iter().map(|t| term_value(m, w, sigma, t)).collect();
            let value = sat(m, sigma, f).contains(w);
            let rel = if value { "in" } else { "not in" };
            node(value, format!("({}) {rel} rho({p})", vals.join(", ")), vec![])
        }
        Formula::Not(g) => {
            let c = go(m, w, sigma, g);
            node(!c.value, String::new(), vec![c])
        }
        Formula::And(a, b) => {
            let ca = go(m, w, sigma, a);
            let cb = go(m, w, sigma, b);
            node(ca.value && cb.value, String::new(), vec![ca, cb])
        }
        Formula::Know(i, g) => {
            let ai = m.vocab().agent_index(i).expect("checked");
            let kids: Vec<Explanation> = m.successors(ai, w).iter().map(|v| go(m, v, sigma, g)).collect();
            let note = if kids.is_empty() { format!("no {i}-successors") } else { String::new() };
            node(kids.iter().all(|c| c.value), note, kids)
        }
        Formula::Assign(x, t, g) => {
            let o = m.sigma_lift(w, sigma, t).expect("checked");
            let c = go(m, w, &sigma.with(x, o), g);
            node(c.value, format!("{x} := {}", m.object_name(o)), vec![c])
        }
        Formula::Announce(psi, g) => {
            let pre = go(m, w, sigma, psi);
            if !pre.value {
                return node(true, "announcement not truthful here".into(), vec![pre]);
            }
            let (sub, kept) = restrict_to(m, &sat(m, sigma, psi), true);
            let nw = kept.iter().position(|&v| v == w).expect("w satisfies psi");
            let c = go(&sub, nw, sigma, g);
            let note = format!("restricted to {} of {} worlds", sub.num_worlds(), m.num_worlds());
            node(c.value, note, vec![pre, c])
        }
        Formula::Update(em, e, g) => {
            let ei = em.index_of(e).expect("parsed");
            let pre = go(m, w, sigma, em.pre_at(ei));
            if !pre.value {
                return node(true, format!("precondition of {e} fails"), vec![pre]);
            }
            let pres: Vec<_> = em.preconditions().iter().map(|p| sat(m, sigma, p)).collect();
            let (prod, index) = product_on(m, em, &pres, true);
            let c = go(&prod, index[w][ei].expect("precondition holds"), sigma, g);
            let note = format!("product has {} worlds", prod.num_worlds());
            node(c.value, note, vec![pre, c])
        }
    }
}
