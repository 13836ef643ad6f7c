//! Recursive-descent parser for the ASCII formula syntax.
//!
//! Binding strength, tightest first: prefix operators (`~`, `K{i}`,
//! `Kv{i}`, `[..]`, `<..>`), `&`, `|`, `->` (right associative), `<->`.
//! `~` between two terms is equality. Derived operators are expanded as
//! they are read.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::formula::{EventModel, Formula, Term};
use super::print::is_conventional_var;
use super::signature::{ParseEnv, Signature};
use super::subst::subst_event_model;
use super::sugar::{desugar, Sugar};
use super::symbol::{Agent, EventId, Name, Pred, Var};
use crate::reduction::compose_models;

const MAX_DEPTH: usize = 200;
const MAX_SIZE: usize = 1 << 20;
const MAX_EVENTS: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn at(src: &str, offset: usize, message: impl Into<String>) -> ParseError {
        let before = &src[..offset.min(src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError {
            offset,
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    QVar(String),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    at: usize,
}

const SYMBOLS: &[(&str, &str)] = &[
    ("<->", "<->"),
    ("->", "->"),
    (":=", ":="),
    ("!=", "!="),
    ("~", "~"),
    ("!", "!"),
    ("&", "&"),
    ("|", "|"),
    ("(", "("),
    (")", ")"),
    ("[", "["),
    ("]", "]"),
    ("{", "{"),
    ("}", "}"),
    (",", ","),
    ("@", "@"),
    ("<", "<"),
    (">", ">"),
    ("*", "*"),
    ("/", "/"),
    ("¬", "~"),
    ("≈", "~"),
    ("≠", "!="),
    ("∧", "&"),
    ("∨", "|"),
    ("→", "->"),
    ("↔", "<->"),
];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = vec![];
    let mut i = 0;
    'outer: while i < src.len() {
        let rest = &src[i..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if is_ident_start(c) || c == '?' {
            let start = i;
            let body_start = if c == '?' { i + 1 } else { i };
            let len = src[body_start..].find(|c: char| !is_ident_char(c)).unwrap_or(src.len() - body_start);
            let text = &src[body_start..body_start + len];
            if c == '?' {
                if !text.starts_with(is_ident_start) {
                    return Err(ParseError::at(src, start, "expected a variable identifier after `?`"));
                }
                out.push(Token { tok: Tok::QVar(text.to_string()), at: start });
            } else {
                out.push(Token { tok: Tok::Ident(text.to_string()), at: start });
            }
            i = body_start + len;
            continue;
        }
        if let Some(n) = rest.strip_prefix('⊤').map(|_| '⊤'.len_utf8()) {
            out.push(Token { tok: Tok::Ident("true".into()), at: i });
            i += n;
            continue;
        }
        if let Some(n) = rest.strip_prefix('⊥').map(|_| '⊥'.len_utf8()) {
            out.push(Token { tok: Tok::Ident("false".into()), at: i });
            i += n;
            continue;
        }
        for (text, sym) in SYMBOLS {
            if rest.starts_with(text) {
                out.push(Token { tok: Tok::Sym(sym), at: i });
                i += text.len();
                continue 'outer;
            }
        }
        return Err(ParseError::at(src, i, format!("unexpected character `{c}`")));
    }
    out.push(Token { tok: Tok::Eof, at: src.len() });
    Ok(out)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::QVar(s) => format!("`?{s}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "K" | "Kv" | "M" | "true" | "false" | "not")
}

fn is_pred_ident(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase()) && !is_keyword(s)
}

fn is_term_ident(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') && !is_keyword(s)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    env: &'a ParseEnv,
    arities: BTreeMap<Pred, usize>,
    checked_models: Vec<*const EventModel>,
    depth: usize,
}

enum Arg {
    Term(Term),
    Formula(Formula),
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, env: &'a ParseEnv) -> Result<Parser<'a>, ParseError> {
        Ok(Parser {
            src,
            toks: lex(src)?,
            pos: 0,
            env,
            arities: env.signature.predicates.clone(),
            checked_models: vec![],
            depth: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> usize {
        self.toks[self.pos].at
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::at(self.src, self.here(), message))
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        self.err(format!("expected {wanted}, found {}", describe(self.peek())))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn token_is_term(t: &Tok) -> bool {
        match t {
            Tok::QVar(_) => true,
            Tok::Ident(s) => is_term_ident(s),
            _ => false,
        }
    }

    fn sugar(&self, s: Sugar, at: usize) -> Result<Formula, ParseError> {
        let f = desugar(s);
        if f.size() > MAX_SIZE {
            return Err(ParseError::at(self.src, at, "formula too large after expanding derived operators"));
        }
        Ok(f)
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.err("formula nested too deeply");
        }
        let r = self.iff();
        self.depth -= 1;
        r
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let at = self.here();
        let a = self.implies()?;
        if self.eat("<->") {
            let b = self.implies()?;
            return self.sugar(Sugar::Iff(a, b), at);
        }
        Ok(a)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let a = self.or()?;
        if self.eat("->") {
            let b = self.implies()?;
            return Ok(Formula::implies(a, b));
        }
        Ok(a)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut a = self.and()?;
        while self.eat("|") {
            let b = self.and()?;
            a = Formula::or(a, b);
        }
        Ok(a)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut a = self.unary()?;
        while self.eat("&") {
            let b = self.unary()?;
            a = Formula::and(a, b);
        }
        Ok(a)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.err("formula nested too deeply");
        }
        let r = self.unary_inner();
        self.depth -= 1;
        r
    }

    fn unary_inner(&mut self) -> Result<Formula, ParseError> {
        let at = self.here();
        match self.peek().clone() {
            Tok::Sym("~") => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(s) if s == "not" => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(s) if s == "K" => {
                self.bump();
                let i = self.agent_braces()?;
                Ok(Formula::know(i, self.unary()?))
            }
            Tok::Ident(s) if s == "Kv" => {
                self.bump();
                let i = self.agent_braces()?;
                self.kv_args(i, at)
            }
            Tok::Ident(s) if s == "M" => self.err("`M` is a reserved word"),
            Tok::Sym("[") => {
                self.bump();
                self.bracket(at)
            }
            Tok::Sym("<") => {
                self.bump();
                self.dual(at)
            }
            _ => self.primary(),
        }
    }

    fn agent_braces(&mut self) -> Result<Agent, ParseError> {
        self.expect("{")?;
        let a = match self.peek() {
            Tok::Ident(s) => Agent::new(s),
            _ => return self.unexpected("an agent"),
        };
        self.bump();
        self.expect("}")?;
        Ok(a)
    }

    fn kv_args(&mut self, i: Agent, at: usize) -> Result<Formula, ParseError> {
        if !self.eat("(") {
            if Self::token_is_term(self.peek()) {
                let t = self.term()?;
                return self.sugar(Sugar::Kv(i, t), at);
            }
            return self.unexpected("a term or `(` after `Kv{..}`");
        }
        let mut args = vec![self.arg()?];
        while self.eat(",") {
            args.push(self.arg()?);
        }
        self.expect(")")?;
        let s = match <[Arg; 1]>::try_from(args) {
            Ok([Arg::Term(t)]) => Sugar::Kv(i, t),
            Ok([Arg::Formula(_)]) => return Err(ParseError::at(self.src, at, "`Kv` of a single argument needs a term")),
            Err(args) => match <[Arg; 2]>::try_from(args) {
                Ok([Arg::Formula(phi), Arg::Term(c)]) => Sugar::KvCond(i, phi, c),
                Ok([Arg::Term(c), Arg::Term(d)]) => Sugar::KvFunc(i, c, d),
                Ok([Arg::Term(c), Arg::Formula(phi)]) => Sugar::KvTruth(i, c, phi),
                Ok([Arg::Formula(psi), Arg::Formula(phi)]) => Sugar::KvDep(i, psi, phi),
                Err(_) => return Err(ParseError::at(self.src, at, "`Kv` takes one or two arguments")),
            },
        };
        self.sugar(s, at)
    }

    fn arg(&mut self) -> Result<Arg, ParseError> {
        if Self::token_is_term(self.peek()) && matches!(self.peek_at(1), Tok::Sym(",") | Tok::Sym(")")) {
            return Ok(Arg::Term(self.term()?));
        }
        Ok(Arg::Formula(self.formula()?))
    }

    fn bracket(&mut self, at: usize) -> Result<Formula, ParseError> {
        if self.eat("!") {
            if Self::token_is_term(self.peek()) && matches!(self.peek_at(1), Tok::Sym("]")) {
                let t = self.term()?;
                self.expect("]")?;
                let body = self.unary()?;
                return self.sugar(Sugar::AnnounceValue(t, body), at);
            }
            let psi = self.formula()?;
            self.expect("]")?;
            let body = self.unary()?;
            return Ok(Formula::announce(psi, body));
        }
        if Self::token_is_term(self.peek()) && matches!(self.peek_at(1), Tok::Sym(":=")) {
            let x = self.variable()?;
            self.expect(":=")?;
            let t = self.term()?;
            self.expect("]")?;
            let body = self.unary()?;
            return Ok(Formula::assign(x, t, body));
        }
        let em = self.event_expr()?;
        self.expect("@")?;
        let e_at = self.here();
        let e = self.event_id()?;
        if !em.contains(&e) {
            return Err(ParseError::at(
                self.src,
                e_at,
                format!("event model `{}` has no event `{e}`", em.name()),
            ));
        }
        self.expect("]")?;
        let body = self.unary()?;
        Ok(Formula::update(em, e, body))
    }

    fn dual(&mut self, at: usize) -> Result<Formula, ParseError> {
        let s = match self.peek().clone() {
            Tok::Ident(k) if k == "K" => {
                self.bump();
                let i = self.agent_braces()?;
                self.expect(">")?;
                Sugar::DualK(i, self.unary()?)
            }
            Tok::Sym("!") => {
                self.bump();
                let psi = self.formula()?;
                self.expect(">")?;
                Sugar::DualAnnounce(psi, self.unary()?)
            }
            t if Self::token_is_term(&t) => {
                let x = self.variable()?;
                self.expect(":=")?;
                let t = self.term()?;
                self.expect(">")?;
                Sugar::DualAssign(x, t, self.unary()?)
            }
            _ => return self.unexpected("`K{..}`, `!` or an assignment after `<`"),
        };
        self.sugar(s, at)
    }

    fn event_expr(&mut self) -> Result<Arc<EventModel>, ParseError> {
        let mut em = self.event_atom()?;
        while self.eat("*") {
            let at = self.here();
            let rhs = self.event_atom()?;
            if em.len() * rhs.len() > MAX_EVENTS {
                return Err(ParseError::at(self.src, at, "composite event model too large"));
            }
            em = Arc::new(compose_models(&em, &rhs));
        }
        Ok(em)
    }

    fn event_atom(&mut self) -> Result<Arc<EventModel>, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.err("event model expression nested too deeply");
        }
        let mut em = if self.eat("(") {
            let em = self.event_expr()?;
            self.expect(")")?;
            em
        } else {
            let at = self.here();
            let em = match self.peek() {
                Tok::Ident(name) => match self.env.event_models.get(name) {
                    Some(em) => em.clone(),
                    None => return Err(ParseError::at(self.src, at, format!("unknown event model `{name}`"))),
                },
                _ => return self.unexpected("an event model"),
            };
            self.bump();
            em
        };
        while self.eat("[") {
            let y = self.variable()?;
            self.expect("/")?;
            let x = self.variable()?;
            self.expect("]")?;
            em = subst_event_model(&em, &x, &y);
        }
        self.depth -= 1;
        self.check_event_model(&em)?;
        Ok(em)
    }

    fn event_id(&mut self) -> Result<EventId, ParseError> {
        if self.eat("(") {
            let a = self.event_id()?;
            self.expect(",")?;
            let b = self.event_id()?;
            self.expect(")")?;
            return Ok(EventId::pair(a, b));
        }
        let e = match self.peek() {
            Tok::Ident(s) => EventId::new(s),
            _ => return self.unexpected("an event"),
        };
        self.bump();
        Ok(e)
    }

    fn check_event_model(&mut self, em: &Arc<EventModel>) -> Result<(), ParseError> {
        let key = Arc::as_ptr(em);
        if self.checked_models.contains(&key) {
            return Ok(());
        }
        self.checked_models.push(key);
        let at = self.here();
        for p in em.preconditions() {
            self.check_arities(p, at)?;
        }
        Ok(())
    }

    fn check_arities(&mut self, f: &Formula, at: usize) -> Result<(), ParseError> {
        match f {
            Formula::Pred(p, ts) => self.record_arity(p, ts.len(), at),
            Formula::Update(em, _, body) => {
                self.check_event_model(em)?;
                self.check_arities(body, at)
            }
            _ => {
                for c in f.children() {
                    self.check_arities(c, at)?;
                }
                Ok(())
            }
        }
    }

    fn record_arity(&mut self, p: &Pred, n: usize, at: usize) -> Result<(), ParseError> {
        match self.arities.get(p) {
            Some(&k) if k == n => Ok(()),
            Some(&k) => Err(ParseError::at(
                self.src,
                at,
                format!("predicate {p} has arity {k} but is applied to {n} terms"),
            )),
            None if self.env.signature.infer_predicates => {
                self.arities.insert(p.clone(), n);
                Ok(())
            }
            None => Err(ParseError::at(self.src, at, format!("undeclared predicate {p}"))),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let at = self.here();
        match self.peek().clone() {
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Formula::bottom())
            }
            Tok::Sym("(") => {
                self.bump();
                let f = self.formula()?;
                self.expect(")")?;
                Ok(f)
            }
            Tok::Ident(s) if is_pred_ident(&s) => {
                self.bump();
                let p = Pred::new(&s);
                let mut args = vec![];
                if self.eat("(") {
                    if !self.is_sym(")") {
                        args.push(self.term()?);
                        while self.eat(",") {
                            args.push(self.term()?);
                        }
                    }
                    self.expect(")")?;
                }
                self.record_arity(&p, args.len(), at)?;
                Ok(Formula::Pred(p, args))
            }
            t if Self::token_is_term(&t) => {
                let a = self.term()?;
                if self.eat("~") {
                    Ok(Formula::Eq(a, self.term()?))
                } else if self.eat("!=") {
                    Ok(Formula::not(Formula::Eq(a, self.term()?)))
                } else {
                    self.unexpected("`~` or `!=` after a term")
                }
            }
            _ => self.unexpected("a formula"),
        }
    }

    fn check_reserved(&self, v: &Var, at: usize) -> Result<(), ParseError> {
        if v.is_reserved() && !self.env.allow_reserved {
            return Err(ParseError::at(
                self.src,
                at,
                format!("`{v}` belongs to the reserved variable namespace"),
            ));
        }
        Ok(())
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let at = self.here();
        let sig: &Signature = &self.env.signature;
        let t = match self.peek().clone() {
            Tok::QVar(s) => Term::Var(Var::new(s)),
            Tok::Ident(s) if is_term_ident(&s) => {
                if sig.variables.contains(s.as_str()) {
                    Term::Var(Var::new(s))
                } else if sig.names.contains(s.as_str()) {
                    Term::Name(Name::new(s))
                } else if is_conventional_var(&s) {
                    Term::Var(Var::new(s))
                } else {
                    Term::Name(Name::new(s))
                }
            }
            _ => return self.unexpected("a term"),
        };
        self.bump();
        if let Term::Var(v) = &t {
            self.check_reserved(v, at)?;
        }
        Ok(t)
    }

    fn variable(&mut self) -> Result<Var, ParseError> {
        let at = self.here();
        match self.term()? {
            Term::Var(v) => Ok(v),
            Term::Name(n) => Err(ParseError::at(
                self.src,
                at,
                format!("`{n}` is a name, not a variable (write `?{n}` for a variable)"),
            )),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }
}

/// Parses under `sig`, with no event models in scope.
pub fn parse_formula(src: &str, sig: &Signature) -> Result<Formula, ParseError> {
    parse_formula_in(src, &ParseEnv::new(sig.clone()))
}

pub fn parse_formula_in(src: &str, env: &ParseEnv) -> Result<Formula, ParseError> {
    parse_with_arities(src, env).map(|(f, _)| f)
}

/// Also returns every predicate arity in force after parsing, including
/// those inferred under [`Signature::infer_predicates`].
pub fn parse_with_arities(src: &str, env: &ParseEnv) -> Result<(Formula, BTreeMap<Pred, usize>), ParseError> {
    let mut p = Parser::new(src, env)?;
    let f = p.formula()?;
    p.finish()?;
    Ok((f, p.arities))
}

pub fn parse_term(src: &str, env: &ParseEnv) -> Result<Term, ParseError> {
    let mut p = Parser::new(src, env)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new().with_predicate("P", 1).with_predicate("R", 2)
    }

    fn parse(s: &str) -> Formula {
        parse_formula(s, &sig()).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    fn p(t: Term) -> Formula {
        Formula::pred("P", vec![t])
    }

    #[test]
    fn precedence_and_associativity() {
        let a = p(Term::name("a"));
        let b = p(Term::name("b"));
        let c = p(Term::name("c"));
        assert_eq!(parse("P(a) & P(b) | P(c)"), Formula::or(Formula::and(a.clone(), b.clone()), c.clone()));
        assert_eq!(
            parse("P(a) -> P(b) -> P(c)"),
            Formula::implies(a.clone(), Formula::implies(b.clone(), c.clone()))
        );
        assert_eq!(parse("~P(a) & P(b)"), Formula::and(Formula::not(a.clone()), b.clone()));
        assert_eq!(parse("K{i} P(a) & P(b)"), Formula::and(Formula::know("i", a.clone()), b.clone()));
        assert_eq!(parse("P(a) <-> P(b)"), Formula::iff(a, b));
    }

    #[test]
    fn equality_uses_tilde_between_terms() {
        assert_eq!(parse("a ~ x"), Formula::eq(Term::name("a"), Term::var("x")));
        assert_eq!(parse("~a ~ b"), Formula::not(Formula::eq(Term::name("a"), Term::name("b"))));
        assert_eq!(parse("a != b"), Formula::not(Formula::eq(Term::name("a"), Term::name("b"))));
        assert_eq!(parse("a ≈ b"), parse("a ~ b"));
    }

    #[test]
    fn announcement_body_binds_tightly() {
        let f = parse("[! a ~ b] K{i} a ~ b");
        let ab = Formula::eq(Term::name("a"), Term::name("b"));
        assert_eq!(f, Formula::announce(ab.clone(), Formula::know("i", ab)));
    }

    #[test]
    fn assignment_and_variable_resolution() {
        let f = parse("[x := a] P(x)");
        assert_eq!(f, Formula::assign("x", Term::name("a"), p(Term::var("x"))));
        let f = parse("[?foo := a] P(?foo)");
        assert_eq!(f, Formula::assign("foo", Term::name("a"), p(Term::var("foo"))));
        let s = sig().with_name("x").with_variable("b");
        let f = parse_formula("P(x) & P(b)", &s).unwrap();
        assert_eq!(f, Formula::and(p(Term::name("x")), p(Term::var("b"))));
        assert!(parse_formula("[a := b] P(a)", &sig()).is_err());
    }

    #[test]
    fn knowing_value_sugar() {
        let f = parse("Kv{i} a");
        let z = Term::Var(Var::reserved(0));
        assert_eq!(f, Formula::assign(Var::reserved(0), Term::name("a"), Formula::know("i", Formula::eq(z, Term::name("a")))));
        assert_eq!(parse("Kv{i}(a)"), f);
        let kvf = parse("Kv{i}(c, d)");
        assert_eq!(kvf, desugar(Sugar::KvFunc("i".into(), Term::name("c"), Term::name("d"))));
        let cond = parse("Kv{i}(P(a), d)");
        assert_eq!(cond, desugar(Sugar::KvCond("i".into(), p(Term::name("a")), Term::name("d"))));
        let truth = parse("Kv{i}(c, P(a))");
        assert_eq!(truth, desugar(Sugar::KvTruth("i".into(), Term::name("c"), p(Term::name("a")))));
        let dep = parse("Kv{i}(P(b), P(a))");
        assert_eq!(dep, desugar(Sugar::KvDep("i".into(), p(Term::name("b")), p(Term::name("a")))));
    }

    #[test]
    fn value_announcement() {
        let f = parse("[! a] P(a)");
        assert_eq!(f, desugar(Sugar::AnnounceValue(Term::name("a"), p(Term::name("a")))));
    }

    #[test]
    fn duals() {
        let a = p(Term::name("a"));
        assert_eq!(parse("<K{i}> P(a)"), Formula::not(Formula::know("i", Formula::not(a.clone()))));
        assert_eq!(
            parse("<x := a> P(a)"),
            Formula::not(Formula::assign("x", Term::name("a"), Formula::not(a.clone())))
        );
        assert_eq!(
            parse("<! P(a)> P(a)"),
            Formula::not(Formula::announce(a.clone(), Formula::not(a)))
        );
    }

    #[test]
    fn reserved_namespace_is_refused_by_default() {
        let err = parse_formula("[z0 := a] P(z0)", &sig()).unwrap_err();
        assert!(err.message.contains("reserved"), "{err}");
        let env = ParseEnv::new(sig()).allowing_reserved();
        assert!(parse_formula_in("[z0 := a] P(z0)", &env).is_ok());
    }

    #[test]
    fn arity_errors() {
        assert!(parse_formula("P(a, b)", &sig()).is_err());
        assert!(parse_formula("Q(a)", &sig()).is_err());
        let (_, ar) = parse_with_arities("Q(a) & Q(b)", &ParseEnv::new(Signature::open())).unwrap();
        assert_eq!(ar.get(&Pred::new("Q")), Some(&1));
        assert!(parse_formula("Q(a) & Q(a, b)", &Signature::open()).is_err());
    }

    #[test]
    fn error_positions() {
        let e = parse_formula("P(a) &\n  & P(b)", &sig()).unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = parse_formula("P(a) P(b)", &sig()).unwrap_err();
        assert_eq!(e.offset, 5);
    }

    #[test]
    fn errors_at_the_end_of_input() {
        for (src, offset) in [("", 0), ("a ~", 3), ("K{", 2), ("[x :=", 5), ("P(a) & [! P(a)] P(", 18)] {
            let e = parse_formula(src, &sig()).unwrap_err();
            assert_eq!(e.offset, offset, "{src:?}: {e}");
            assert!(e.message.contains("end of input"), "{src:?}: {e}");
        }
        let env = ParseEnv::new(sig()).with_event_model(Arc::new(
            EventModel::builder("E").event("e", Formula::Top).build().unwrap(),
        ));
        for src in ["[", "[E @", "[E @ (e,"] {
            assert_eq!(parse_formula_in(src, &env).unwrap_err().offset, src.len(), "{src:?}");
        }
    }

    #[test]
    fn updates_and_compositions() {
        let em = Arc::new(
            EventModel::builder("E")
                .event("e", p(Term::var("x")))
                .event("f", Formula::Top)
                .equivalence("i", &[("e", "f")])
                .build()
                .unwrap(),
        );
        let env = ParseEnv::new(sig()).with_event_model(em.clone()).allowing_reserved();
        let f = parse_formula_in("[E @ e] P(a)", &env).unwrap();
        assert_eq!(f, Formula::update(em.clone(), "e".into(), p(Term::name("a"))));
        assert!(parse_formula_in("[E @ g] P(a)", &env).is_err());
        assert!(parse_formula_in("[F @ e] P(a)", &env).is_err());
        let f = parse_formula_in("[E[y/x] @ e] true", &env).unwrap();
        let Formula::Update(sub, _, _) = &f else { panic!() };
        assert_eq!(sub.pre_at(0), &p(Term::var("y")));
        assert_eq!(sub.name(), "E[y/x]");
        let f = parse_formula_in("[(E * E) @ (e,f)] true", &env).unwrap();
        let Formula::Update(c, e, _) = &f else { panic!() };
        assert_eq!(c.len(), 4);
        assert_eq!(e.to_string(), "(e,f)");
    }

    #[test]
    fn pathological_inputs_fail_cleanly() {
        let deep = "~".repeat(10_000) + "P(a)";
        assert!(parse_formula(&deep, &sig()).is_err());
        let nested = "(".repeat(5000);
        assert!(parse_formula(&nested, &sig()).is_err());
        let mut blow = "P(a)".to_string();
        for _ in 0..30 {
            blow = format!("Kv{{i}}(P(a), {blow})");
        }
        assert!(parse_formula(&blow, &sig()).is_err());
        assert!(parse_formula("?", &sig()).is_err());
        assert!(parse_formula("#", &sig()).is_err());
    }
}
