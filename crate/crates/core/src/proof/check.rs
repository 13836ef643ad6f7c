use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::syntax::{is_free_in, parse_formula_in, Formula, ParseEnv, Signature};

use super::schema::{instantiate_schema, Bindings, Kind, SchemaError, SchemaId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum System {
    Sbelas,
    Sbelas5,
    Spalas,
    Spalas5,
    Sdelas,
    Sdelas5,
}

impl System {
    pub const ALL: [System; 6] = [
        System::Sbelas,
        System::Sbelas5,
        System::Spalas,
        System::Spalas5,
        System::Sdelas,
        System::Sdelas5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            System::Sbelas => "SBELAS",
            System::Sbelas5 => "SBELAS5",
            System::Spalas => "SPALAS",
            System::Spalas5 => "SPALAS5",
            System::Sdelas => "SDELAS",
            System::Sdelas5 => "SDELAS5",
        }
    }

    /// Sound over epistemic models only.
    pub fn is_s5(self) -> bool {
        matches!(self, System::Sbelas5 | System::Spalas5 | System::Sdelas5)
    }

    pub fn admits(self, schema: SchemaId) -> bool {
        if schema.is_s5() {
            return self.is_s5();
        }
        if schema.is_announcement() {
            return matches!(self, System::Spalas | System::Spalas5);
        }
        if schema.is_update() {
            return matches!(self, System::Sdelas | System::Sdelas5);
        }
        true
    }

    pub fn schemas(self) -> impl Iterator<Item = SchemaId> {
        SchemaId::ALL.into_iter().filter(move |s| self.admits(*s))
    }

    /// Whether `f` belongs to the language of the system.
    pub fn speaks(self, f: &Formula) -> Result<(), String> {
        match self {
            System::Sbelas | System::Sbelas5 if !f.is_dynamic_free() => {
                Err("dynamic operators are outside the language of this system".into())
            }
            System::Spalas | System::Spalas5 if f.contains_update() => {
                Err("event-model updates are outside the language of this system".into())
            }
            System::Sdelas | System::Sdelas5 if f.contains_announce() => {
                Err("announcements are outside the language of this system".into())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = String;

    fn from_str(s: &str) -> Result<System, String> {
        System::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown proof system `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Mp,
    NecK,
    NecAs,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Mp => "MP",
            Rule::NecK => "NECK",
            Rule::NecAs => "NECAS",
        }
    }

    pub fn premise_count(self) -> usize {
        match self {
            Rule::Mp => 2,
            Rule::NecK | Rule::NecAs => 1,
        }
    }

    pub fn metavariables(self) -> &'static [(&'static str, Kind, bool)] {
        match self {
            Rule::Mp => &[],
            Rule::NecK => &[("i", Kind::Agent, false)],
            Rule::NecAs => &[("x", Kind::Var, false), ("t", Kind::Term, false)],
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Rule, String> {
        match s {
            "MP" => Ok(Rule::Mp),
            "NECK" => Ok(Rule::NecK),
            "NECAS" => Ok(Rule::NecAs),
            _ => Err(format!("unknown rule `{s}`")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("{rule} takes {expected} premises, got {found}")]
    PremiseCount { rule: Rule, expected: usize, found: usize },
    #[error("MP needs a premise of the form `φ -> ψ` whose antecedent is the other premise")]
    MpShape,
    #[error("NECAS needs a premise of the form `φ -> ψ`")]
    NecAsShape,
    #[error("NECAS side condition violated: {x} is free in the antecedent {antecedent}")]
    NecAsFree { x: String, antecedent: String },
    #[error(transparent)]
    Binding(#[from] SchemaError),
}

/// `(a, b)` when `f` is `a → b`, i.e. `¬(a ∧ ¬b)`.
pub fn as_implication(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Not(g) => match &**g {
            Formula::And(a, nb) => match &**nb {
                Formula::Not(b) => Some((a, b)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

/// The conclusion of `rule` from `premises`.
pub fn apply_rule(rule: Rule, premises: &[&Formula], b: &Bindings) -> Result<Formula, RuleError> {
    b.check_keys(rule.metavariables())?;
    if premises.len() != rule.premise_count() {
        return Err(RuleError::PremiseCount {
            rule,
            expected: rule.premise_count(),
            found: premises.len(),
        });
    }
    match rule {
        Rule::Mp => {
            let (p, q) = (premises[0], premises[1]);
            match as_implication(q) {
                Some((a, c)) if a == p => Ok(c.clone()),
                _ => match as_implication(p) {
                    Some((a, c)) if a == q => Ok(c.clone()),
                    _ => Err(RuleError::MpShape),
                },
            }
        }
        Rule::NecK => Ok(Formula::know(b.agent_of("i")?.clone(), premises[0].clone())),
        Rule::NecAs => {
            let (x, t) = (b.var_of("x")?, b.term_of("t")?);
            let (a, c) = as_implication(premises[0]).ok_or(RuleError::NecAsShape)?;
            if is_free_in(x, a) {
                return Err(RuleError::NecAsFree {
                    x: x.to_string(),
                    antecedent: a.to_string(),
                });
            }
            Ok(Formula::implies(a.clone(), Formula::assign(x.clone(), t.clone(), c.clone())))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Axiom {
        schema: SchemaId,
        bindings: BTreeMap<String, String>,
    },
    Rule {
        rule: Rule,
        from: Vec<usize>,
        bindings: BTreeMap<String, String>,
    },
    Premise,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofLine {
    pub number: usize,
    pub formula: Formula,
    pub justification: Justification,
}

/// A Hilbert-style derivation; its conclusion is the last line.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub system: System,
    pub env: ParseEnv,
    pub lines: Vec<ProofLine>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem {
    pub system: System,
    pub conclusion: Formula,
    /// Hypotheses the conclusion depends on; empty for a theorem proper.
    pub premises: Vec<Formula>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProofError {
    #[error("source line {source_line}: {message}")]
    Parse { source_line: usize, message: String },
    #[error("line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error("derivation has no lines")]
    Empty,
}

impl ProofError {
    /// The proof line number at fault, for errors found while checking.
    pub fn line(&self) -> Option<usize> {
        match self {
            ProofError::Line { line, .. } => Some(*line),
            _ => None,
        }
    }
}

impl Derivation {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }

    /// Parses the proof file format:
    ///
    /// ```text
    /// system SBELAS
    /// signature P/1, Q/1
    /// 1. P(a) -> P(a) ; axiom TAUT
    /// 2. K{i} (P(a) -> P(a)) ; rule NECK from 1 {i=i}
    /// ```
    ///
    /// `#` starts a comment. Event models referenced by update formulas or
    /// bindings must already be in `env`.
    pub fn parse(text: &str, env: &ParseEnv) -> Result<Derivation, ProofError> {
        let mut env = env.clone().allowing_reserved();
        let mut system = None;
        let mut lines = vec![];
        for (k, raw) in text.lines().enumerate() {
            let src = k + 1;
            let err = |m: String| ProofError::Parse {
                source_line: src,
                message: m,
            };
            let line = raw.split_once('#').map_or(raw, |(a, _)| a).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("system ") {
                if system.is_some() || !lines.is_empty() {
                    return Err(err("`system` must come once, before the first line".into()));
                }
                system = Some(rest.trim().parse::<System>().map_err(err)?);
                continue;
            }
            if let Some(rest) = line.strip_prefix("signature ") {
                let decl = Signature::parse_decl(rest).map_err(err)?;
                for (p, n) in decl.predicates {
                    match env.signature.predicates.get(&p) {
                        Some(&m) if m != n => return Err(err(format!("predicate {p} already has arity {m}"))),
                        _ => {
                            env.signature.predicates.insert(p, n);
                        }
                    }
                }
                continue;
            }
            let (number, rest) = line
                .split_once('.')
                .and_then(|(n, r)| Some((n.trim().parse::<usize>().ok()?, r)))
                .ok_or_else(|| err("expected `<n>. <formula> ; <justification>`".into()))?;
            if number != lines.len() + 1 {
                return Err(err(format!("line number {number} out of sequence; expected {}", lines.len() + 1)));
            }
            let (formula_text, just_text) = rest
                .rsplit_once(';')
                .ok_or_else(|| err("missing `;` before the justification".into()))?;
            let formula = parse_formula_in(formula_text.trim(), &env).map_err(|e| err(e.to_string()))?;
            let justification = parse_justification(just_text.trim()).map_err(err)?;
            lines.push(ProofLine {
                number,
                formula,
                justification,
            });
        }
        Ok(Derivation {
            system: system.unwrap_or(System::Sbelas),
            env,
            lines,
        })
    }

    /// Checks every line in order and stops at the first failure.
    pub fn check(&self) -> Result<Theorem, ProofError> {
        if self.lines.is_empty() {
            return Err(ProofError::Empty);
        }
        let mut premises = vec![];
        for (k, line) in self.lines.iter().enumerate() {
            let fail = |reason: String| ProofError::Line {
                line: line.number,
                reason,
            };
            self.system.speaks(&line.formula).map_err(fail)?;
            match &line.justification {
                Justification::Premise => premises.push(line.formula.clone()),
                Justification::Axiom { schema, bindings } => {
                    if !self.system.admits(*schema) {
                        return Err(fail(format!("axiom {schema} is not part of {}", self.system)));
                    }
                    let mut typed =
                        Bindings::parse(bindings, schema.metavariables(), &self.env).map_err(|e| fail(e.to_string()))?;
                    if *schema == SchemaId::Taut && !typed.0.contains_key("phi") {
                        typed = typed.formula("phi", line.formula.clone());
                    }
                    let inst = instantiate_schema(*schema, &typed).map_err(|e| fail(e.to_string()))?;
                    if inst != line.formula {
                        return Err(fail(format!("formula is not the {schema} instance {inst}")));
                    }
                }
                Justification::Rule { rule, from, bindings } => {
                    let mut prem = vec![];
                    for &n in from {
                        if n == 0 || n > k {
                            return Err(fail(format!("premise {n} does not refer to an earlier line")));
                        }
                        prem.push(&self.lines[n - 1].formula);
                    }
                    let typed =
                        Bindings::parse(bindings, rule.metavariables(), &self.env).map_err(|e| fail(e.to_string()))?;
                    let concl = apply_rule(*rule, &prem, &typed).map_err(|e| fail(e.to_string()))?;
                    if concl != line.formula {
                        return Err(fail(format!("formula is not the {rule} conclusion {concl}")));
                    }
                }
            }
        }
        Ok(Theorem {
            system: self.system,
            conclusion: self.lines.last().expect("non-empty").formula.clone(),
            premises,
        })
    }
}

/// Checks a derivation; see [`Derivation::check`].
pub fn check_derivation(d: &Derivation) -> Result<Theorem, ProofError> {
    d.check()
}

fn split_bindings(text: &str) -> Result<(&str, BTreeMap<String, String>), String> {
    let Some(open) = text.find('{') else {
        return Ok((text, BTreeMap::new()));
    };
    let body = text[open..].strip_suffix('}').ok_or("bindings must end the justification with `}`")?;
    let body = &body[1..];
    let mut parts = vec![];
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in body.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err("unbalanced brackets in bindings".into());
        }
    }
    if depth != 0 {
        return Err("unbalanced brackets in bindings".into());
    }
    parts.push(&body[start..]);
    let mut map = BTreeMap::new();
    for p in parts.into_iter().map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = p.split_once('=').ok_or_else(|| format!("binding `{p}` is not `name=value`"))?;
        let k = k.trim();
        if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '\'' || c == '_') {
            return Err(format!("bad metavariable `{k}`"));
        }
        if map.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(format!("metavariable `{k}` bound twice"));
        }
    }
    Ok((&text[..open], map))
}

fn parse_justification(text: &str) -> Result<Justification, String> {
    let (head, bindings) = split_bindings(text)?;
    let words: Vec<&str> = head.split_whitespace().collect();
    match words.as_slice() {
        ["premise"] if bindings.is_empty() => Ok(Justification::Premise),
        ["axiom", name] => Ok(Justification::Axiom {
            schema: name.parse()?,
            bindings,
        }),
        ["rule", name, "from", refs @ ..] if !refs.is_empty() => {
            let from = refs
                .join("")
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|_| format!("bad line reference `{s}`")))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Justification::Rule {
                rule: name.parse()?,
                from,
                bindings,
            })
        }
        _ => Err(format!(
            "unrecognized justification `{text}`; expected `premise`, `axiom NAME {{..}}` or `rule NAME from n,.. {{..}}`"
        )),
    }
}

fn write_bindings(f: &mut fmt::Formatter<'_>, b: &BTreeMap<String, String>) -> fmt::Result {
    if b.is_empty() {
        return Ok(());
    }
    let parts: Vec<String> = b.iter().map(|(k, v)| format!("{k}={v}")).collect();
    write!(f, " {{{}}}", parts.join(", "))
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Premise => f.write_str("premise"),
            Justification::Axiom { schema, bindings } => {
                write!(f, "axiom {schema}")?;
                write_bindings(f, bindings)
            }
            Justification::Rule { rule, from, bindings } => {
                let refs: Vec<String> = from.iter().map(usize::to_string).collect();
                write!(f, "rule {rule} from {}", refs.join(","))?;
                write_bindings(f, bindings)
            }
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "system {}", self.system)?;
        let sig: Vec<String> = self.env.signature.predicates.iter().map(|(p, n)| format!("{p}/{n}")).collect();
        if !sig.is_empty() {
            writeln!(f, "signature {}", sig.join(", "))?;
        }
        for l in &self.lines {
            writeln!(f, "{}. {} ; {}", l.number, l.formula, l.justification)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Term;

    fn env() -> ParseEnv {
        ParseEnv::new(Signature::new().with_predicate("P", 1).with_predicate("Q", 1))
    }

    fn parse(s: &str) -> Formula {
        parse_formula_in(s, &env()).unwrap()
    }

    #[test]
    fn rule_examples() {
        let none = Bindings::new();
        assert_eq!(apply_rule(Rule::Mp, &[&parse("P(a)"), &parse("P(a) -> Q(a)")], &none).unwrap(), parse("Q(a)"));
        assert_eq!(
            apply_rule(Rule::NecK, &[&parse("a ~ a")], &Bindings::new().agent("i", "i")).unwrap(),
            parse("K{i} a ~ a")
        );
        let b = Bindings::new().var("x", "x").term("t", Term::name("b"));
        assert_eq!(
            apply_rule(Rule::NecAs, &[&parse("P(a) -> Q(a)")], &b).unwrap(),
            parse("P(a) -> [x := b] Q(a)")
        );
        assert!(matches!(
            apply_rule(Rule::NecAs, &[&parse("P(x) -> Q(a)")], &b),
            Err(RuleError::NecAsFree { .. })
        ));
        assert_eq!(apply_rule(Rule::Mp, &[&parse("P(b)"), &parse("P(a) -> Q(a)")], &none), Err(RuleError::MpShape));
    }

    const SMALL: &str = "system SBELAS
        # a comment
        1. P(a) -> P(a) ; axiom TAUT
        2. K{i} (P(a) -> P(a)) ; rule NECK from 1 {i=i}
        3. K{i} (P(a) -> P(a)) -> (K{i} P(a) -> K{i} P(a)) ; axiom DISTK {i=i, phi=P(a), psi=P(a)}
        4. K{i} P(a) -> K{i} P(a) ; rule MP from 2,3
    ";

    #[test]
    fn small_derivation_checks() {
        let d = Derivation::parse(SMALL, &env()).unwrap();
        let thm = d.check().unwrap();
        assert_eq!(thm.conclusion, parse("K{i} P(a) -> K{i} P(a)"));
        assert!(thm.premises.is_empty());
        let again = Derivation::parse(&d.to_string(), &env()).unwrap();
        assert_eq!(again.lines, d.lines);
    }

    #[test]
    fn errors_name_their_line() {
        let bad = SMALL.replace("DISTK {i=i,", "DISTK {i=j,");
        let e = Derivation::parse(&bad, &env()).unwrap().check().unwrap_err();
        assert_eq!(e.line(), Some(3));
        let forward = SMALL.replace("from 2,3", "from 2,4");
        assert_eq!(Derivation::parse(&forward, &env()).unwrap().check().unwrap_err().line(), Some(4));
        let s5 = SMALL.replace("axiom TAUT", "axiom T {i=i, phi=P(a)}");
        let e = Derivation::parse(&s5, &env()).unwrap().check().unwrap_err();
        assert!(e.to_string().contains("not part of SBELAS"), "{e}");
    }

    #[test]
    fn layout_errors_carry_source_lines() {
        let e = Derivation::parse("system SBELAS\n2. P(a) ; premise", &env()).unwrap_err();
        assert_eq!(e, ProofError::Parse { source_line: 2, message: "line number 2 out of sequence; expected 1".into() });
        assert!(matches!(Derivation::parse("1. P(a) premise", &env()), Err(ProofError::Parse { source_line: 1, .. })));
        assert!(matches!(Derivation::parse("system S4", &env()), Err(ProofError::Parse { .. })));
    }

    #[test]
    fn language_is_enforced() {
        let d = Derivation::parse("1. [! P(a)] P(a) ; premise", &env()).unwrap();
        assert!(d.check().unwrap_err().to_string().contains("outside the language"));
    }
}
