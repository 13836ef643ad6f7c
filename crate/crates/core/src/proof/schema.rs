use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::model::parse_event_id;
use crate::reduction::{compose_models, pos_plus};
use crate::syntax::{
    all_vars, fresh_var, is_admissible, parse_formula_in, parse_term, subst_event_model, substitute, Agent, EventId,
    EventModel, Formula, ParseEnv, Pred, Term, Var,
};

use super::taut::{check_tautology, TautVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemaId {
    Taut,
    DistK,
    Id,
    Sym,
    Trans,
    SubAs,
    SubP,
    RigidP,
    RigidN,
    Kas,
    DetAs,
    Das,
    EfAs,
    Sub2As,
    T,
    Four,
    Five,
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

impl SchemaId {
    pub const ALL: [SchemaId; 30] = [
        SchemaId::Taut,
        SchemaId::DistK,
        SchemaId::Id,
        SchemaId::Sym,
        SchemaId::Trans,
        SchemaId::SubAs,
        SchemaId::SubP,
        SchemaId::RigidP,
        SchemaId::RigidN,
        SchemaId::Kas,
        SchemaId::DetAs,
        SchemaId::Das,
        SchemaId::EfAs,
        SchemaId::Sub2As,
        SchemaId::T,
        SchemaId::Four,
        SchemaId::Five,
        SchemaId::AAtom,
        SchemaId::ANeg,
        SchemaId::ACon,
        SchemaId::AK,
        SchemaId::ACom,
        SchemaId::AAssi,
        SchemaId::UAtom,
        SchemaId::UNeg,
        SchemaId::UCon,
        SchemaId::UK,
        SchemaId::UCom,
        SchemaId::UAssi,
        SchemaId::UAssiPos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemaId::Taut => "TAUT",
            SchemaId::DistK => "DISTK",
            SchemaId::Id => "ID",
            SchemaId::Sym => "SYM",
            SchemaId::Trans => "TRANS",
            SchemaId::SubAs => "SUBAS",
            SchemaId::SubP => "SUBP",
            SchemaId::RigidP => "RIGIDP",
            SchemaId::RigidN => "RIGIDN",
            SchemaId::Kas => "KAS",
            SchemaId::DetAs => "DETAS",
            SchemaId::Das => "DAS",
            SchemaId::EfAs => "EFAS",
            SchemaId::Sub2As => "SUB2AS",
            SchemaId::T => "T",
            SchemaId::Four => "4",
            SchemaId::Five => "5",
            SchemaId::AAtom => "AATOM",
            SchemaId::ANeg => "ANEG",
            SchemaId::ACon => "ACON",
            SchemaId::AK => "AK",
            SchemaId::ACom => "ACOM",
            SchemaId::AAssi => "AASSI",
            SchemaId::UAtom => "UATOM",
            SchemaId::UNeg => "UNEG",
            SchemaId::UCon => "UCON",
            SchemaId::UK => "UK",
            SchemaId::UCom => "UCOM",
            SchemaId::UAssi => "UASSI",
            SchemaId::UAssiPos => "UASSI'",
        }
    }

    pub fn is_s5(self) -> bool {
        matches!(self, SchemaId::T | SchemaId::Four | SchemaId::Five)
    }

    pub fn is_announcement(self) -> bool {
        matches!(
            self,
            SchemaId::AAtom | SchemaId::ANeg | SchemaId::ACon | SchemaId::AK | SchemaId::ACom | SchemaId::AAssi
        )
    }

    pub fn is_update(self) -> bool {
        matches!(
            self,
            SchemaId::UAtom
                | SchemaId::UNeg
                | SchemaId::UCon
                | SchemaId::UK
                | SchemaId::UCom
                | SchemaId::UAssi
                | SchemaId::UAssiPos
        )
    }

    /// Metavariables in binding order; the flag marks optional ones.
    pub fn metavariables(self) -> &'static [(&'static str, Kind, bool)] {
        use Kind::*;
        match self {
            SchemaId::Taut => &[("phi", Formula, false)],
            SchemaId::DistK => &[("i", Agent, false), ("phi", Formula, false), ("psi", Formula, false)],
            SchemaId::Id => &[("t", Term, false)],
            SchemaId::Sym => &[("t", Term, false), ("t'", Term, false)],
            SchemaId::Trans => &[("t", Term, false), ("t'", Term, false), ("t''", Term, false)],
            SchemaId::SubAs => &[("t", Term, false), ("t'", Term, false), ("x", Var, false), ("phi", Formula, false)],
            SchemaId::SubP => &[("P", Pred, false), ("t", Terms, false), ("t'", Terms, false)],
            SchemaId::RigidP | SchemaId::RigidN => &[("x", Var, false), ("y", Var, false), ("i", Agent, false)],
            SchemaId::Kas => &[("x", Var, false), ("t", Term, false), ("phi", Formula, false), ("psi", Formula, false)],
            SchemaId::DetAs => &[("x", Var, false), ("t", Term, false), ("phi", Formula, false)],
            SchemaId::Das | SchemaId::EfAs => &[("x", Var, false), ("t", Term, false)],
            SchemaId::Sub2As => &[("phi", Formula, false), ("x", Var, false), ("y", Var, false)],
            SchemaId::T | SchemaId::Four | SchemaId::Five => &[("i", Agent, false), ("phi", Formula, false)],
            SchemaId::AAtom => &[("psi", Formula, false), ("p", Formula, false)],
            SchemaId::ANeg => &[("psi", Formula, false), ("phi", Formula, false)],
            SchemaId::ACon => &[("psi", Formula, false), ("phi", Formula, false), ("chi", Formula, false)],
            SchemaId::AK => &[("psi", Formula, false), ("i", Agent, false), ("phi", Formula, false)],
            SchemaId::ACom => &[("psi", Formula, false), ("chi", Formula, false), ("phi", Formula, false)],
            SchemaId::AAssi => &[
                ("psi", Formula, false),
                ("x", Var, false),
                ("t", Term, false),
                ("phi", Formula, false),
                ("z", Var, true),
            ],
            SchemaId::UAtom => &[("E", EventModel, false), ("e", Event, false), ("p", Formula, false)],
            SchemaId::UNeg => &[("E", EventModel, false), ("e", Event, false), ("phi", Formula, false)],
            SchemaId::UCon => &[
                ("E", EventModel, false),
                ("e", Event, false),
                ("phi", Formula, false),
                ("psi", Formula, false),
            ],
            SchemaId::UK => &[
                ("E", EventModel, false),
                ("e", Event, false),
                ("i", Agent, false),
                ("phi", Formula, false),
            ],
            SchemaId::UCom => &[
                ("E", EventModel, false),
                ("e", Event, false),
                ("E'", EventModel, false),
                ("e'", Event, false),
                ("phi", Formula, false),
            ],
            SchemaId::UAssi | SchemaId::UAssiPos => &[
                ("E", EventModel, false),
                ("e", Event, false),
                ("x", Var, false),
                ("t", Term, false),
                ("phi", Formula, false),
                ("z", Var, true),
            ],
        }
    }
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemaId {
    type Err = String;

    fn from_str(s: &str) -> Result<SchemaId, String> {
        let s = if s == "UASSI′" { "UASSI'" } else { s };
        SchemaId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| format!("unknown axiom schema `{s}`"))
    }
}

/// What a metavariable ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Formula,
    Term,
    Var,
    Agent,
    Pred,
    Terms,
    EventModel,
    Event,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Formula => "a formula",
            Kind::Term => "a term",
            Kind::Var => "a variable",
            Kind::Agent => "an agent",
            Kind::Pred => "a predicate symbol",
            Kind::Terms => "a term list",
            Kind::EventModel => "an event model",
            Kind::Event => "an event",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Binding {
    Formula(Formula),
    Term(Term),
    Agent(Agent),
    Pred(Pred),
    Terms(Vec<Term>),
    EventModel(Arc<EventModel>),
    Event(EventId),
}

/// Metavariable assignment for a schema or rule.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings(pub BTreeMap<String, Binding>);

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    fn with(mut self, key: &str, b: Binding) -> Bindings {
        self.0.insert(key.to_string(), b);
        self
    }

    pub fn formula(self, key: &str, f: Formula) -> Bindings {
        self.with(key, Binding::Formula(f))
    }

    pub fn term(self, key: &str, t: impl Into<Term>) -> Bindings {
        self.with(key, Binding::Term(t.into()))
    }

    pub fn var(self, key: &str, x: impl Into<Var>) -> Bindings {
        self.with(key, Binding::Term(Term::Var(x.into())))
    }

    pub fn agent(self, key: &str, i: impl Into<Agent>) -> Bindings {
        self.with(key, Binding::Agent(i.into()))
    }

    pub fn pred(self, key: &str, p: impl Into<Pred>) -> Bindings {
        self.with(key, Binding::Pred(p.into()))
    }

    pub fn terms(self, key: &str, ts: Vec<Term>) -> Bindings {
        self.with(key, Binding::Terms(ts))
    }

    pub fn event_model(self, key: &str, em: Arc<EventModel>) -> Bindings {
        self.with(key, Binding::EventModel(em))
    }

    pub fn event(self, key: &str, e: impl Into<EventId>) -> Bindings {
        self.with(key, Binding::Event(e.into()))
    }

    /// Types textual bindings by the kinds of `spec`. Event models are
    /// looked up by name in `env`.
    pub fn parse(
        raw: &BTreeMap<String, String>,
        spec: &[(&str, Kind, bool)],
        env: &ParseEnv,
    ) -> Result<Bindings, SchemaError> {
        let mut out = Bindings::new();
        for (key, text) in raw {
            let Some(&(_, kind, _)) = spec.iter().find(|(k, _, _)| k == key) else {
                return Err(SchemaError::UnexpectedBinding(key.clone()));
            };
            let bad = |why: String| SchemaError::BadBinding {
                key: key.clone(),
                message: why,
            };
            let text = text.trim();
            let b = match kind {
                Kind::Formula => Binding::Formula(parse_formula_in(text, env).map_err(|e| bad(e.to_string()))?),
                Kind::Term => Binding::Term(parse_term(text, env).map_err(|e| bad(e.to_string()))?),
                Kind::Var => match parse_term(text, env).map_err(|e| bad(e.to_string()))? {
                    t @ Term::Var(_) => Binding::Term(t),
                    Term::Name(a) => return Err(bad(format!("`{a}` is a name, not a variable"))),
                },
                Kind::Agent => {
                    if text.is_empty() || !text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                        return Err(bad(format!("`{text}` is not an agent identifier")));
                    }
                    Binding::Agent(Agent::new(text))
                }
                Kind::Pred => {
                    if !text.starts_with(|c: char| c.is_ascii_uppercase())
                        || !text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
                    {
                        return Err(bad(format!("`{text}` is not a predicate symbol")));
                    }
                    Binding::Pred(Pred::new(text))
                }
                Kind::Terms => {
                    let inner = text.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(text);
                    let mut ts = vec![];
                    for part in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        ts.push(parse_term(part, env).map_err(|e| bad(e.to_string()))?);
                    }
                    Binding::Terms(ts)
                }
                Kind::EventModel => match env.event_models.get(text) {
                    Some(em) => Binding::EventModel(em.clone()),
                    None => return Err(bad(format!("no event model named `{text}` is loaded"))),
                },
                Kind::Event => match parse_event_id(text) {
                    Some(e) => Binding::Event(e),
                    None => return Err(bad(format!("`{text}` is not an event identifier"))),
                },
            };
            out.0.insert(key.clone(), b);
        }
        Ok(out)
    }

    fn get(&self, key: &str, kind: Kind, optional: bool) -> Result<Option<&Binding>, SchemaError> {
        match self.0.get(key) {
            None if optional => Ok(None),
            None => Err(SchemaError::MissingBinding(key.to_string())),
            Some(b) => {
                let ok = matches!(
                    (kind, b),
                    (Kind::Formula, Binding::Formula(_))
                        | (Kind::Term, Binding::Term(_))
                        | (Kind::Var, Binding::Term(Term::Var(_)))
                        | (Kind::Agent, Binding::Agent(_))
                        | (Kind::Pred, Binding::Pred(_))
                        | (Kind::Terms, Binding::Terms(_))
                        | (Kind::EventModel, Binding::EventModel(_))
                        | (Kind::Event, Binding::Event(_))
                );
                if ok {
                    Ok(Some(b))
                } else {
                    Err(SchemaError::WrongKind {
                        key: key.to_string(),
                        expected: kind,
                    })
                }
            }
        }
    }

    pub(crate) fn formula_of(&self, key: &str) -> Result<&Formula, SchemaError> {
        match self.get(key, Kind::Formula, false)? {
            Some(Binding::Formula(f)) => Ok(f),
            _ => unreachable!(),
        }
    }

    pub(crate) fn term_of(&self, key: &str) -> Result<&Term, SchemaError> {
        match self.get(key, Kind::Term, false)? {
            Some(Binding::Term(t)) => Ok(t),
            _ => unreachable!(),
        }
    }

    pub(crate) fn var_of(&self, key: &str) -> Result<&Var, SchemaError> {
        self.opt_var_of(key)?.ok_or_else(|| SchemaError::MissingBinding(key.to_string()))
    }

    fn opt_var_of(&self, key: &str) -> Result<Option<&Var>, SchemaError> {
        match self.get(key, Kind::Var, true)? {
            Some(Binding::Term(Term::Var(x))) => Ok(Some(x)),
            _ => Ok(None),
        }
    }

    pub(crate) fn agent_of(&self, key: &str) -> Result<&Agent, SchemaError> {
        match self.get(key, Kind::Agent, false)? {
            Some(Binding::Agent(a)) => Ok(a),
            _ => unreachable!(),
        }
    }

    fn pred_of(&self, key: &str) -> Result<&Pred, SchemaError> {
        match self.get(key, Kind::Pred, false)? {
            Some(Binding::Pred(p)) => Ok(p),
            _ => unreachable!(),
        }
    }

    fn terms_of(&self, key: &str) -> Result<&[Term], SchemaError> {
        match self.get(key, Kind::Terms, false)? {
            Some(Binding::Terms(ts)) => Ok(ts),
            _ => unreachable!(),
        }
    }

    fn event_model_of(&self, key: &str) -> Result<&Arc<EventModel>, SchemaError> {
        match self.get(key, Kind::EventModel, false)? {
            Some(Binding::EventModel(em)) => Ok(em),
            _ => unreachable!(),
        }
    }

    fn event_of(&self, key: &str) -> Result<&EventId, SchemaError> {
        match self.get(key, Kind::Event, false)? {
            Some(Binding::Event(e)) => Ok(e),
            _ => unreachable!(),
        }
    }

    pub(crate) fn check_keys(&self, spec: &[(&str, Kind, bool)]) -> Result<(), SchemaError> {
        for key in self.0.keys() {
            if !spec.iter().any(|(k, _, _)| k == key) {
                return Err(SchemaError::UnexpectedBinding(key.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemaError {
    #[error("missing binding for metavariable `{0}`")]
    MissingBinding(String),
    #[error("metavariable `{0}` does not occur in this schema")]
    UnexpectedBinding(String),
    #[error("metavariable `{key}` must be bound to {expected}")]
    WrongKind { key: String, expected: Kind },
    #[error("binding for `{key}`: {message}")]
    BadBinding { key: String, message: String },
    #[error("side condition of {schema} violated: {condition}")]
    SideCondition { schema: SchemaId, condition: String },
}

fn side(schema: SchemaId, condition: impl Into<String>) -> SchemaError {
    SchemaError::SideCondition {
        schema,
        condition: condition.into(),
    }
}

/// `⟨x:=t⟩φ`, the dual of the assignment operator.
pub fn diamond_assign(x: &Var, t: &Term, phi: Formula) -> Formula {
    Formula::not(Formula::assign(x.clone(), t.clone(), Formula::not(phi)))
}

/// `⟨!ψ⟩φ`, the dual of the announcement operator.
pub fn diamond_announce(psi: Formula, phi: Formula) -> Formula {
    Formula::not(Formula::announce(psi, Formula::not(phi)))
}

/// Perfect recall: `K_i[!ψ]φ → [!ψ]K_iφ`.
pub fn perfect_recall(i: &Agent, psi: &Formula, phi: &Formula) -> Formula {
    Formula::implies(
        Formula::know(i.clone(), Formula::announce(psi.clone(), phi.clone())),
        Formula::announce(psi.clone(), Formula::know(i.clone(), phi.clone())),
    )
}

/// No miracles: `⟨!ψ⟩K_iφ → K_i[!ψ]φ`.
pub fn no_miracles(i: &Agent, psi: &Formula, phi: &Formula) -> Formula {
    Formula::implies(
        diamond_announce(psi.clone(), Formula::know(i.clone(), phi.clone())),
        Formula::know(i.clone(), Formula::announce(psi.clone(), phi.clone())),
    )
}

fn event_index(schema: SchemaId, em: &EventModel, e: &EventId) -> Result<usize, SchemaError> {
    em.index_of(e)
        .ok_or_else(|| side(schema, format!("event {e} does not belong to event model `{}`", em.name())))
}

/// `z` for AASSI/UASSI: the binding when given, else the first reserved
/// variable fresh in the whole redex.
fn freshness(schema: SchemaId, b: &Bindings, redex: &Formula, scope: &[&Formula], t: &Term) -> Result<Var, SchemaError> {
    match b.opt_var_of("z")? {
        None => Ok(fresh_var(&[redex], &[])),
        Some(z) => {
            for f in scope {
                if all_vars(f).contains(z) {
                    return Err(side(schema, format!("{z} occurs in {f}")));
                }
            }
            if t.as_var() == Some(z) {
                return Err(side(schema, format!("{z} is the assigned term")));
            }
            Ok(z.clone())
        }
    }
}

/// The instance of `id` under `b`, after checking its side conditions.
pub fn instantiate_schema(id: SchemaId, b: &Bindings) -> Result<Formula, SchemaError> {
    b.check_keys(id.metavariables())?;
    let f = |k: &str| b.formula_of(k).cloned();
    let t = |k: &str| b.term_of(k).cloned();
    let v = |k: &str| b.var_of(k).cloned();
    let k = |i: &Agent, phi: Formula| Formula::know(i.clone(), phi);
    use Formula as F;
    Ok(match id {
        SchemaId::Taut => {
            let phi = f("phi")?;
            match check_tautology(&phi) {
                TautVerdict::Tautology => phi,
                TautVerdict::Falsified(row) => {
                    let row: Vec<String> = row.iter().map(|(a, v)| format!("{a} = {v}")).collect();
                    return Err(side(id, format!("not a tautology; falsified by {}", row.join(", "))));
                }
                TautVerdict::TooManyAtoms(n) => {
                    return Err(side(id, format!("Boolean skeleton has {n} atoms, more than the 20 supported")))
                }
            }
        }
        SchemaId::DistK => {
            let (i, phi, psi) = (b.agent_of("i")?, f("phi")?, f("psi")?);
            F::implies(
                k(i, F::implies(phi.clone(), psi.clone())),
                F::implies(k(i, phi), k(i, psi)),
            )
        }
        SchemaId::Id => {
            let t = t("t")?;
            F::Eq(t.clone(), t)
        }
        SchemaId::Sym => {
            let (a, c) = (t("t")?, t("t'")?);
            F::iff(F::Eq(a.clone(), c.clone()), F::Eq(c, a))
        }
        SchemaId::Trans => {
            let (a, c, d) = (t("t")?, t("t'")?, t("t''")?);
            F::implies(F::and(F::Eq(a.clone(), c.clone()), F::Eq(c, d.clone())), F::Eq(a, d))
        }
        SchemaId::SubAs => {
            let (a, c, x, phi) = (t("t")?, t("t'")?, v("x")?, f("phi")?);
            F::implies(
                F::Eq(a.clone(), c.clone()),
                F::iff(F::assign(x.clone(), a, phi.clone()), F::assign(x, c, phi)),
            )
        }
        SchemaId::SubP => {
            let (p, ts, us) = (b.pred_of("P")?, b.terms_of("t")?, b.terms_of("t'")?);
            if ts.len() != us.len() {
                return Err(side(id, format!("term lists of lengths {} and {}", ts.len(), us.len())));
            }
            let eqs = F::conjunction(ts.iter().zip(us).map(|(a, c)| F::Eq(a.clone(), c.clone())).collect::<Vec<_>>());
            F::implies(eqs, F::iff(F::Pred(p.clone(), ts.to_vec()), F::Pred(p.clone(), us.to_vec())))
        }
        SchemaId::RigidP => {
            let (x, y, i) = (v("x")?, v("y")?, b.agent_of("i")?);
            let eq = F::eq(Term::Var(x), Term::Var(y));
            F::implies(eq.clone(), k(i, eq))
        }
        SchemaId::RigidN => {
            let (x, y, i) = (v("x")?, v("y")?, b.agent_of("i")?);
            let ne = F::not(F::eq(Term::Var(x), Term::Var(y)));
            F::implies(ne.clone(), k(i, ne))
        }
        SchemaId::Kas => {
            let (x, s, phi, psi) = (v("x")?, t("t")?, f("phi")?, f("psi")?);
            let a = |g: Formula| F::assign(x.clone(), s.clone(), g);
            F::implies(a(F::implies(phi.clone(), psi.clone())), F::implies(a(phi), a(psi)))
        }
        SchemaId::DetAs => {
            let (x, s, phi) = (v("x")?, t("t")?, f("phi")?);
            F::implies(diamond_assign(&x, &s, phi.clone()), F::assign(x, s, phi))
        }
        SchemaId::Das => diamond_assign(&v("x")?, &t("t")?, F::Top),
        SchemaId::EfAs => {
            let (x, s) = (v("x")?, t("t")?);
            F::assign(x.clone(), s.clone(), F::Eq(Term::Var(x), s))
        }
        SchemaId::Sub2As => {
            let (phi, x, y) = (f("phi")?, v("x")?, v("y")?);
            if !is_admissible(&phi, &x, &y) {
                return Err(side(id, format!("{y} for {x} is not admissible in {phi}")));
            }
            let inst = substitute(&phi, &x, &y).expect("admissible");
            F::implies(inst, F::assign(x, Term::Var(y), phi))
        }
        SchemaId::T => {
            let (i, phi) = (b.agent_of("i")?, f("phi")?);
            F::implies(k(i, phi.clone()), phi)
        }
        SchemaId::Four => {
            let (i, phi) = (b.agent_of("i")?, f("phi")?);
            F::implies(k(i, phi.clone()), k(i, k(i, phi)))
        }
        SchemaId::Five => {
            let (i, phi) = (b.agent_of("i")?, f("phi")?);
            let nk = F::not(k(i, phi));
            F::implies(nk.clone(), k(i, nk))
        }
        SchemaId::AAtom => {
            let (psi, p) = (f("psi")?, f("p")?);
            if !p.is_atomic() && p != F::Top {
                return Err(side(id, format!("{p} is not atomic")));
            }
            F::iff(F::announce(psi.clone(), p.clone()), F::implies(psi, p))
        }
        SchemaId::ANeg => {
            let (psi, phi) = (f("psi")?, f("phi")?);
            F::iff(
                F::announce(psi.clone(), F::not(phi.clone())),
                F::implies(psi.clone(), F::not(F::announce(psi, phi))),
            )
        }
        SchemaId::ACon => {
            let (psi, phi, chi) = (f("psi")?, f("phi")?, f("chi")?);
            F::iff(
                F::announce(psi.clone(), F::and(phi.clone(), chi.clone())),
                F::and(F::announce(psi.clone(), phi), F::announce(psi, chi)),
            )
        }
        SchemaId::AK => {
            let (psi, i, phi) = (f("psi")?, b.agent_of("i")?, f("phi")?);
            F::iff(
                F::announce(psi.clone(), k(i, phi.clone())),
                F::implies(psi.clone(), k(i, F::announce(psi, phi))),
            )
        }
        SchemaId::ACom => {
            let (psi, chi, phi) = (f("psi")?, f("chi")?, f("phi")?);
            F::iff(
                F::announce(psi.clone(), F::announce(chi.clone(), phi.clone())),
                F::announce(F::and(psi.clone(), F::announce(psi, chi)), phi),
            )
        }
        SchemaId::AAssi => {
            let (psi, x, s, phi) = (f("psi")?, v("x")?, t("t")?, f("phi")?);
            let lhs = F::announce(psi.clone(), F::assign(x.clone(), s.clone(), phi.clone()));
            let z = freshness(id, b, &lhs, &[&lhs], &s)?;
            let renamed = substitute(&psi, &x, &z).map_err(|e| side(id, e.to_string()))?;
            let rhs = F::assign(z, Term::Var(x.clone()), F::assign(x, s, F::announce(renamed, phi)));
            F::iff(lhs, rhs)
        }
        SchemaId::UAtom => {
            let (em, e, p) = (b.event_model_of("E")?, b.event_of("e")?, f("p")?);
            let ei = event_index(id, em, e)?;
            let moved = match &p {
                F::Eq(a, c) => F::Eq(pos_plus(em, a, e), pos_plus(em, c, e)),
                F::Pred(q, ts) => F::Pred(q.clone(), ts.iter().map(|s| pos_plus(em, s, e)).collect()),
                F::Top => F::Top,
                _ => return Err(side(id, format!("{p} is not atomic"))),
            };
            F::iff(F::update(em.clone(), e.clone(), p), F::implies(em.pre_at(ei).clone(), moved))
        }
        SchemaId::UNeg => {
            let (em, e, phi) = (b.event_model_of("E")?, b.event_of("e")?, f("phi")?);
            let ei = event_index(id, em, e)?;
            F::iff(
                F::update(em.clone(), e.clone(), F::not(phi.clone())),
                F::implies(em.pre_at(ei).clone(), F::not(F::update(em.clone(), e.clone(), phi))),
            )
        }
        SchemaId::UCon => {
            let (em, e, phi, psi) = (b.event_model_of("E")?, b.event_of("e")?, f("phi")?, f("psi")?);
            event_index(id, em, e)?;
            let u = |g: Formula| F::update(em.clone(), e.clone(), g);
            F::iff(u(F::and(phi.clone(), psi.clone())), F::and(u(phi), u(psi)))
        }
        SchemaId::UK => {
            let (em, e, i, phi) = (b.event_model_of("E")?, b.event_of("e")?, b.agent_of("i")?, f("phi")?);
            let ei = event_index(id, em, e)?;
            let conj = F::conjunction(
                em.successors(i, ei)
                    .map(|g| k(i, F::update(em.clone(), em.events()[g].clone(), phi.clone())))
                    .collect::<Vec<_>>(),
            );
            F::iff(F::update(em.clone(), e.clone(), k(i, phi)), F::implies(em.pre_at(ei).clone(), conj))
        }
        SchemaId::UCom => {
            let (em, e) = (b.event_model_of("E")?, b.event_of("e")?);
            let (em2, e2) = (b.event_model_of("E'")?, b.event_of("e'")?);
            let phi = f("phi")?;
            event_index(id, em, e)?;
            event_index(id, em2, e2)?;
            if em.has_factual_change() || em2.has_factual_change() {
                return Err(side(id, "composition is only defined for event models without postconditions"));
            }
            let composite = Arc::new(compose_models(em, em2));
            F::iff(
                F::update(em.clone(), e.clone(), F::update(em2.clone(), e2.clone(), phi.clone())),
                F::update(composite, EventId::pair(e.clone(), e2.clone()), phi),
            )
        }
        SchemaId::UAssi | SchemaId::UAssiPos => {
            let (em, e) = (b.event_model_of("E")?, b.event_of("e")?);
            let (x, s, phi) = (v("x")?, t("t")?, f("phi")?);
            event_index(id, em, e)?;
            if id == SchemaId::UAssi && em.has_factual_change() {
                return Err(side(id, "event model has postconditions; use UASSI'"));
            }
            let lhs = F::update(em.clone(), e.clone(), F::assign(x.clone(), s.clone(), phi.clone()));
            let mut scope: Vec<&Formula> = vec![&phi];
            scope.extend(em.preconditions());
            let z = freshness(id, b, &lhs, &scope, &s)?;
            let renamed = subst_event_model(em, &x, &z);
            let s = if id == SchemaId::UAssiPos { pos_plus(em, &s, e) } else { s };
            let rhs = F::assign(z, Term::Var(x.clone()), F::assign(x, s, F::update(renamed, e.clone(), phi)));
            F::iff(lhs, rhs)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula_in, Signature};

    fn env() -> ParseEnv {
        ParseEnv::new(Signature::new().with_predicate("P", 1).with_predicate("Q", 1).with_predicate("R", 2))
            .allowing_reserved()
    }

    fn parse(s: &str) -> Formula {
        parse_formula_in(s, &env()).unwrap()
    }

    #[test]
    fn equality_effect_and_identity() {
        let efas = instantiate_schema(SchemaId::EfAs, &Bindings::new().var("x", "x").term("t", Term::name("a"))).unwrap();
        assert_eq!(efas, parse("[x := a] (x ~ a)"));
        assert_eq!(efas.to_string(), "[x := a] x ~ a");
        let id = instantiate_schema(SchemaId::Id, &Bindings::new().term("t", Term::name("c"))).unwrap();
        assert_eq!(id, parse("c ~ c"));
    }

    #[test]
    fn sub2as_requires_admissibility() {
        let b = Bindings::new().formula("phi", parse("[y := a] P(x)")).var("x", "x").var("y", "y");
        assert!(matches!(
            instantiate_schema(SchemaId::Sub2As, &b),
            Err(SchemaError::SideCondition { schema: SchemaId::Sub2As, .. })
        ));
        let b = Bindings::new().formula("phi", parse("K{i} P(x)")).var("x", "x").var("y", "y");
        assert_eq!(instantiate_schema(SchemaId::Sub2As, &b).unwrap(), parse("K{i} P(y) -> [x := y] K{i} P(x)"));
    }

    #[test]
    fn missing_and_foreign_bindings() {
        assert_eq!(
            instantiate_schema(SchemaId::Id, &Bindings::new()),
            Err(SchemaError::MissingBinding("t".into()))
        );
        assert_eq!(
            instantiate_schema(SchemaId::Id, &Bindings::new().term("t", Term::name("a")).agent("i", "i")),
            Err(SchemaError::UnexpectedBinding("i".into()))
        );
        assert!(matches!(
            instantiate_schema(SchemaId::EfAs, &Bindings::new().term("x", Term::name("b")).term("t", Term::name("a"))),
            Err(SchemaError::WrongKind { .. })
        ));
    }

    #[test]
    fn taut_reports_a_falsifying_row() {
        let err = instantiate_schema(SchemaId::Taut, &Bindings::new().formula("phi", parse("P(a) -> P(b)"))).unwrap_err();
        assert!(err.to_string().contains("P(a) = true, P(b) = false"), "{err}");
    }

    #[test]
    fn aassi_matches_the_translation() {
        let b = Bindings::new()
            .formula("psi", parse("P(x)"))
            .var("x", "x")
            .term("t", Term::name("a"))
            .formula("phi", parse("Q(x)"));
        let inst = instantiate_schema(SchemaId::AAssi, &b).unwrap();
        assert_eq!(inst, parse("[! P(x)] [x := a] Q(x) <-> [z0 := x] [x := a] [! P(z0)] Q(x)"));
        let clash = b.clone().var("z", "x");
        assert!(instantiate_schema(SchemaId::AAssi, &clash).is_err());
    }

    #[test]
    fn uk_quantifies_over_successor_events() {
        let em = Arc::new(
            EventModel::builder("E")
                .event("e", parse("P(x)"))
                .event("f", parse("Q(x)"))
                .edge("i", "e", "e")
                .edge("i", "e", "f")
                .build()
                .unwrap(),
        );
        let b = Bindings::new()
            .event_model("E", em.clone())
            .event("e", "e")
            .agent("i", "i")
            .formula("phi", parse("P(a)"));
        let env = env().with_event_model(em);
        let expected = parse_formula_in("[E @ e] K{i} P(a) <-> (P(x) -> K{i} [E @ e] P(a) & K{i} [E @ f] P(a))", &env).unwrap();
        assert_eq!(instantiate_schema(SchemaId::UK, &b).unwrap(), expected);
    }

    #[test]
    fn subp_builds_pointwise_equalities() {
        let b = Bindings::new()
            .pred("P", "R")
            .terms("t", vec![Term::name("a"), Term::var("x")])
            .terms("t'", vec![Term::name("b"), Term::var("y")]);
        assert_eq!(
            instantiate_schema(SchemaId::SubP, &b).unwrap(),
            parse("a ~ b & x ~ y -> (R(a, x) <-> R(b, y))")
        );
    }

    #[test]
    fn textual_bindings_are_typed() {
        let raw = BTreeMap::from([("phi".to_string(), "K{i} P(x)".to_string()), ("i".to_string(), "j".to_string())]);
        let b = Bindings::parse(&raw, SchemaId::T.metavariables(), &env()).unwrap();
        assert_eq!(instantiate_schema(SchemaId::T, &b).unwrap(), parse("K{j} K{i} P(x) -> K{i} P(x)"));
        let raw = BTreeMap::from([("x".to_string(), "a".to_string()), ("t".to_string(), "b".to_string())]);
        assert!(Bindings::parse(&raw, SchemaId::EfAs.metavariables(), &env()).is_err());
    }

    #[test]
    fn schema_names_round_trip() {
        for id in SchemaId::ALL {
            assert_eq!(id.name().parse::<SchemaId>().unwrap(), id);
        }
        assert_eq!("UASSI′".parse::<SchemaId>().unwrap(), SchemaId::UAssiPos);
    }
}
