//! ASCII printer. The output parses back to the same tree under the same
//! signature: derived connectives are printed only where their expansion
//! is literally present.

use std::fmt::{self, Write};

use super::formula::{Formula, Term};
use super::symbol::{EventId, Var};

const IFF: u8 = 0;
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

/// Variables that the parser reads as variables without a `?` prefix.
pub fn is_conventional_var(s: &str) -> bool {
    s.chars().next().is_some_and(|c| ('u'..='z').contains(&c))
}

pub fn var_text(v: &Var) -> String {
    if is_conventional_var(v.as_str()) {
        v.as_str().to_string()
    } else {
        format!("?{v}")
    }
}

pub(crate) fn write_term(f: &mut impl Write, t: &Term) -> fmt::Result {
    match t {
        Term::Var(v) => f.write_str(&var_text(v)),
        Term::Name(n) => f.write_str(n.as_str()),
    }
}

fn as_implies(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Not(inner) => match &**inner {
            Formula::And(a, nb) => match &**nb {
                Formula::Not(b) => Some((a, b)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

fn as_or(f: &Formula) -> Option<(&Formula, &Formula)> {
    let (na, b) = as_implies(f)?;
    match na {
        Formula::Not(a) => Some((a, b)),
        _ => None,
    }
}

fn as_iff(f: &Formula) -> Option<(&Formula, &Formula)> {
    let Formula::And(l, r) = f else { return None };
    let (a, b) = as_implies(l)?;
    let (b2, a2) = as_implies(r)?;
    (a == a2 && b == b2).then_some((a, b))
}

fn write_event_id(f: &mut impl Write, e: &EventId) -> fmt::Result {
    write!(f, "{e}")
}

pub(crate) fn write_formula(f: &mut impl Write, phi: &Formula) -> fmt::Result {
    write_prec(f, phi, IFF)
}

fn prec_of(phi: &Formula) -> u8 {
    if as_iff(phi).is_some() {
        IFF
    } else if is_false(phi) {
        UNARY
    } else if as_or(phi).is_some() {
        OR
    } else if as_implies(phi).is_some() {
        IMPLIES
    } else if matches!(phi, Formula::And(..)) {
        AND
    } else {
        UNARY
    }
}

fn is_false(phi: &Formula) -> bool {
    matches!(phi, Formula::Not(t) if **t == Formula::Top)
}

fn write_prec(f: &mut impl Write, phi: &Formula, min: u8) -> fmt::Result {
    if prec_of(phi) < min {
        f.write_char('(')?;
        write_bare(f, phi)?;
        f.write_char(')')
    } else {
        write_bare(f, phi)
    }
}

fn write_bare(f: &mut impl Write, phi: &Formula) -> fmt::Result {
    if let Some((a, b)) = as_iff(phi) {
        write_prec(f, a, IMPLIES)?;
        f.write_str(" <-> ")?;
        write_prec(f, b, IMPLIES)
    } else if is_false(phi) {
        f.write_str("false")
    } else if let Some((a, b)) = as_or(phi) {
        write_prec(f, a, OR)?;
        f.write_str(" | ")?;
        write_prec(f, b, AND)
    } else if let Some((a, b)) = as_implies(phi) {
        write_prec(f, a, OR)?;
        f.write_str(" -> ")?;
        write_prec(f, b, IMPLIES)
    } else if let Formula::And(a, b) = phi {
        write_prec(f, a, AND)?;
        f.write_str(" & ")?;
        write_prec(f, b, UNARY)
    } else {
        write_unary(f, phi)
    }
}

fn write_unary(f: &mut impl Write, phi: &Formula) -> fmt::Result {
    match phi {
        Formula::Top => f.write_str("true"),
        Formula::Eq(a, b) => {
            write_term(f, a)?;
            f.write_str(" ~ ")?;
            write_term(f, b)
        }
        Formula::Pred(p, ts) => {
            f.write_str(p.as_str())?;
            f.write_char('(')?;
            for (k, t) in ts.iter().enumerate() {
                if k > 0 {
                    f.write_str(", ")?;
                }
                write_term(f, t)?;
            }
            f.write_char(')')
        }
        Formula::Not(inner) => {
            if let Formula::Eq(a, b) = &**inner {
                write_term(f, a)?;
                f.write_str(" != ")?;
                return write_term(f, b);
            }
            f.write_char('~')?;
            write_prec(f, inner, UNARY)
        }
        Formula::Know(i, g) => {
            write!(f, "K{{{i}}} ")?;
            write_prec(f, g, UNARY)
        }
        Formula::Assign(x, t, g) => {
            write!(f, "[{} := ", var_text(x))?;
            write_term(f, t)?;
            f.write_str("] ")?;
            write_prec(f, g, UNARY)
        }
        Formula::Announce(psi, g) => {
            f.write_str("[! ")?;
            write_prec(f, psi, IFF)?;
            f.write_str("] ")?;
            write_prec(f, g, UNARY)
        }
        Formula::Update(em, e, g) => {
            write!(f, "[{} @ ", em.name())?;
            write_event_id(f, e)?;
            f.write_str("] ")?;
            write_prec(f, g, UNARY)
        }
        Formula::And(..) => unreachable!("conjunctions are printed by write_bare"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: &str) -> Formula {
        Formula::pred("P", vec![Term::name(t)])
    }

    #[test]
    fn derived_connectives_print_compactly() {
        let f = Formula::implies(p("a"), Formula::know("i", Formula::implies(p("a"), p("a"))));
        assert_eq!(f.to_string(), "P(a) -> K{i} (P(a) -> P(a))");
        assert_eq!(Formula::or(p("a"), p("b")).to_string(), "P(a) | P(b)");
        assert_eq!(Formula::iff(p("a"), p("b")).to_string(), "P(a) <-> P(b)");
        assert_eq!(Formula::bottom().to_string(), "false");
        assert_eq!(Formula::not(Formula::eq(Term::var("x"), Term::name("a"))).to_string(), "x != a");
    }

    #[test]
    fn binary_operands_are_parenthesized() {
        let f = Formula::and(p("a"), Formula::and(p("b"), p("c")));
        assert_eq!(f.to_string(), "P(a) & (P(b) & P(c))");
        let f = Formula::and(Formula::and(p("a"), p("b")), p("c"));
        assert_eq!(f.to_string(), "P(a) & P(b) & P(c)");
        let f = Formula::implies(Formula::and(p("a"), p("b")), Formula::implies(p("b"), p("c")));
        assert_eq!(f.to_string(), "P(a) & P(b) -> P(b) -> P(c)");
        // a nested implication on the left is literally a disjunction
        let f = Formula::implies(Formula::implies(p("a"), p("b")), p("c"));
        assert_eq!(f.to_string(), "P(a) & ~P(b) | P(c)");
        let f = Formula::not(Formula::and(p("a"), p("b")));
        assert_eq!(f.to_string(), "~(P(a) & P(b))");
    }

    #[test]
    fn binders_and_odd_variables() {
        let f = Formula::assign("x", Term::name("a"), Formula::know("i", Formula::eq(Term::var("x"), Term::name("a"))));
        assert_eq!(f.to_string(), "[x := a] K{i} x ~ a");
        let f = Formula::assign("foo", Term::name("a"), Formula::pred("P", vec![Term::var("foo")]));
        assert_eq!(f.to_string(), "[?foo := a] P(?foo)");
        let f = Formula::announce(Formula::eq(Term::name("a"), Term::name("b")), Formula::Top);
        assert_eq!(f.to_string(), "[! a ~ b] true");
    }
}
