use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::symbol::{Agent, EventId, Name, Pred, Var};

/// The leaves of every formula: a rigid variable or a non-rigid name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Var(Var),
    Name(Name),
}

impl Term {
    pub fn var(s: impl AsRef<str>) -> Term {
        Term::Var(Var::new(s))
    }

    pub fn name(s: impl AsRef<str>) -> Term {
        Term::Name(Name::new(s))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::Name(_) => None,
        }
    }

    pub fn symbol(&self) -> &str {
        match self {
            Term::Var(v) => v.as_str(),
            Term::Name(n) => n.as_str(),
        }
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Term {
        Term::Var(v)
    }
}

impl From<Name> for Term {
    fn from(n: Name) -> Term {
        Term::Name(n)
    }
}

/// Formulas of the static language extended with announcements and event
/// updates. Event models and formulas are mutually recursive: preconditions
/// are formulas and `Update` embeds an event model.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    Top,
    Eq(Term, Term),
    Pred(Pred, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Know(Agent, Box<Formula>),
    Assign(Var, Term, Box<Formula>),
    Announce(Box<Formula>, Box<Formula>),
    Update(Arc<EventModel>, EventId, Box<Formula>),
}

impl Formula {
    pub fn eq(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::Eq(a.into(), b.into())
    }

    pub fn pred(p: impl Into<Pred>, args: Vec<Term>) -> Formula {
        Formula::Pred(p.into(), args)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    /// `¬(¬a ∧ ¬b)`
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// `¬(a ∧ ¬b)`
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn bottom() -> Formula {
        Formula::not(Formula::Top)
    }

    pub fn know(i: impl Into<Agent>, f: Formula) -> Formula {
        Formula::Know(i.into(), Box::new(f))
    }

    pub fn assign(x: impl Into<Var>, t: impl Into<Term>, f: Formula) -> Formula {
        Formula::Assign(x.into(), t.into(), Box::new(f))
    }

    pub fn announce(psi: Formula, f: Formula) -> Formula {
        Formula::Announce(Box::new(psi), Box::new(f))
    }

    pub fn update(em: Arc<EventModel>, e: EventId, f: Formula) -> Formula {
        Formula::Update(em, e, Box::new(f))
    }

    /// Right-nested conjunction; the empty conjunction is `⊤`.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Formula::Top;
        };
        while let Some(f) = items.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    /// Equality and predicate atoms. `⊤` is a Boolean constant, not an atom.
    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Eq(..) | Formula::Pred(..))
    }

    pub fn is_dynamic(&self) -> bool {
        matches!(self, Formula::Announce(..) | Formula::Update(..))
    }

    /// True when no announcement or update occurs anywhere, including in
    /// event preconditions.
    pub fn is_dynamic_free(&self) -> bool {
        match self {
            Formula::Top | Formula::Eq(..) | Formula::Pred(..) => true,
            Formula::Not(f) | Formula::Know(_, f) | Formula::Assign(_, _, f) => f.is_dynamic_free(),
            Formula::And(a, b) => a.is_dynamic_free() && b.is_dynamic_free(),
            Formula::Announce(..) | Formula::Update(..) => false,
        }
    }

    pub fn contains_announce(&self) -> bool {
        match self {
            Formula::Top | Formula::Eq(..) | Formula::Pred(..) => false,
            Formula::Not(f) | Formula::Know(_, f) | Formula::Assign(_, _, f) => f.contains_announce(),
            Formula::And(a, b) => a.contains_announce() || b.contains_announce(),
            Formula::Announce(..) => true,
            Formula::Update(em, _, f) => em.pre.iter().any(Formula::contains_announce) || f.contains_announce(),
        }
    }

    pub fn contains_update(&self) -> bool {
        match self {
            Formula::Top | Formula::Eq(..) | Formula::Pred(..) => false,
            Formula::Not(f) | Formula::Know(_, f) | Formula::Assign(_, _, f) => f.contains_update(),
            Formula::And(a, b) => a.contains_update() || b.contains_update(),
            Formula::Announce(a, b) => a.contains_update() || b.contains_update(),
            Formula::Update(..) => true,
        }
    }

    /// Number of nodes, counting event preconditions once per occurrence.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Eq(..) | Formula::Pred(..) => 1,
            Formula::Not(f) | Formula::Know(_, f) | Formula::Assign(_, _, f) => 1 + f.size(),
            Formula::And(a, b) | Formula::Announce(a, b) => 1 + a.size() + b.size(),
            Formula::Update(em, _, f) => 1 + f.size() + em.pre.iter().map(Formula::size).sum::<usize>(),
        }
    }

    /// Maximum nesting of dynamic operators (event preconditions included).
    pub fn dynamic_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Eq(..) | Formula::Pred(..) => 0,
            Formula::Not(f) | Formula::Know(_, f) | Formula::Assign(_, _, f) => f.dynamic_depth(),
            Formula::And(a, b) => a.dynamic_depth().max(b.dynamic_depth()),
            Formula::Announce(a, b) => 1 + a.dynamic_depth().max(b.dynamic_depth()),
            Formula::Update(em, _, f) => {
                let pre = em.pre.iter().map(Formula::dynamic_depth).max().unwrap_or(0);
                1 + pre.max(f.dynamic_depth())
            }
        }
    }

    /// Direct subformulas, in path order: announced formula before body,
    /// update body before the event preconditions.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Top | Formula::Eq(..) | Formula::Pred(..) => vec![],
            Formula::Not(f) | Formula::Know(_, f) | Formula::Assign(_, _, f) => vec![f],
            Formula::And(a, b) | Formula::Announce(a, b) => vec![a, b],
            Formula::Update(em, _, f) => {
                let mut v: Vec<&Formula> = vec![f];
                v.extend(em.pre.iter());
                v
            }
        }
    }

    pub fn subformula(&self, path: &[usize]) -> Option<&Formula> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children().get(i).copied()?.subformula(rest),
        }
    }

    pub fn subformula_mut(&mut self, path: &[usize]) -> Option<&mut Formula> {
        let Some((&i, rest)) = path.split_first() else {
            return Some(self);
        };
        let child: &mut Formula = match (self, i) {
            (Formula::Not(f) | Formula::Know(_, f) | Formula::Assign(_, _, f), 0) => f,
            (Formula::And(a, _) | Formula::Announce(a, _), 0) => a,
            (Formula::And(_, b) | Formula::Announce(_, b), 1) => b,
            (Formula::Update(_, _, f), 0) => f,
            (Formula::Update(em, _, _), k) if k >= 1 => Arc::make_mut(em).pre.get_mut(k - 1)?,
            _ => return None,
        };
        child.subformula_mut(rest)
    }

    pub fn collect_symbols(&self, out: &mut Symbols) {
        match self {
            Formula::Top => {}
            Formula::Eq(a, b) => {
                out.add_term(a);
                out.add_term(b);
            }
            Formula::Pred(p, ts) => {
                out.predicates.insert(p.clone(), ts.len());
                ts.iter().for_each(|t| out.add_term(t));
            }
            Formula::Not(f) => f.collect_symbols(out),
            Formula::And(a, b) | Formula::Announce(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Formula::Know(i, f) => {
                out.agents.insert(i.clone());
                f.collect_symbols(out);
            }
            Formula::Assign(x, t, f) => {
                out.variables.insert(x.clone());
                out.add_term(t);
                f.collect_symbols(out);
            }
            Formula::Update(em, _, f) => {
                em.collect_symbols(out);
                f.collect_symbols(out);
            }
        }
    }

    pub fn symbols(&self) -> Symbols {
        let mut s = Symbols::default();
        self.collect_symbols(&mut s);
        s
    }
}

/// Symbols occurring in a formula (free or bound variables alike).
/// Agents are those of knowledge operators only: an event model's relation
/// for an agent that no `K` mentions never affects truth.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Symbols {
    pub agents: BTreeSet<Agent>,
    pub names: BTreeSet<Name>,
    pub variables: BTreeSet<Var>,
    pub predicates: BTreeMap<Pred, usize>,
}

impl Symbols {
    fn add_term(&mut self, t: &Term) {
        match t {
            Term::Var(v) => {
                self.variables.insert(v.clone());
            }
            Term::Name(n) => {
                self.names.insert(n.clone());
            }
        }
    }
}

/// Finite event model with per-agent relations, a precondition per event and
/// an optional name postcondition per event (absent entries are identity).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EventModel {
    name: String,
    events: Vec<EventId>,
    pre: Vec<Formula>,
    relations: BTreeMap<Agent, BTreeSet<(usize, usize)>>,
    pos: Vec<BTreeMap<Name, Name>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EventModelError {
    #[error("event model `{0}` has no events")]
    Empty(String),
    #[error("event `{0}` declared twice")]
    DuplicateEvent(EventId),
    #[error("unknown event `{0}`")]
    UnknownEvent(EventId),
}

impl EventModel {
    pub fn builder(name: impl Into<String>) -> EventModelBuilder {
        EventModelBuilder {
            name: name.into(),
            events: vec![],
            pre: vec![],
            edges: vec![],
            pos: vec![],
        }
    }

    /// A single reflexive event for every given agent, no factual change.
    pub fn singleton(name: impl Into<String>, e: EventId, pre: Formula, agents: &[Agent]) -> EventModel {
        let mut relations = BTreeMap::new();
        for a in agents {
            relations.insert(a.clone(), BTreeSet::from([(0, 0)]));
        }
        EventModel {
            name: name.into(),
            events: vec![e],
            pre: vec![pre],
            relations,
            pos: vec![BTreeMap::new()],
        }
    }

    pub(crate) fn from_parts(
        name: String,
        events: Vec<EventId>,
        pre: Vec<Formula>,
        relations: BTreeMap<Agent, BTreeSet<(usize, usize)>>,
        pos: Vec<BTreeMap<Name, Name>>,
    ) -> EventModel {
        debug_assert_eq!(events.len(), pre.len());
        debug_assert_eq!(events.len(), pos.len());
        let pos = pos
            .into_iter()
            .map(|m| m.into_iter().filter(|(a, b)| a != b).collect())
            .collect();
        EventModel { name, events, pre, relations, pos }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> EventModel {
        self.name = name.into();
        self
    }

    /// Declares `agent` with no edges at all.
    pub fn with_empty_relation(mut self, agent: Agent) -> EventModel {
        self.relations.entry(agent).or_default();
        self
    }

    pub fn events(&self) -> &[EventId] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn index_of(&self, e: &EventId) -> Option<usize> {
        self.events.iter().position(|x| x == e)
    }

    pub fn contains(&self, e: &EventId) -> bool {
        self.index_of(e).is_some()
    }

    pub fn preconditions(&self) -> &[Formula] {
        &self.pre
    }

    pub fn pre(&self, e: &EventId) -> Option<&Formula> {
        self.index_of(e).map(|i| &self.pre[i])
    }

    pub fn pre_at(&self, i: usize) -> &Formula {
        &self.pre[i]
    }

    pub fn agents(&self) -> impl Iterator<Item = &Agent> {
        self.relations.keys()
    }

    pub fn relation(&self, agent: &Agent) -> Option<&BTreeSet<(usize, usize)>> {
        self.relations.get(agent)
    }

    pub fn successors(&self, agent: &Agent, from: usize) -> impl Iterator<Item = usize> + '_ {
        self.relations
            .get(agent)
            .into_iter()
            .flat_map(move |r| r.range((from, 0)..=(from, usize::MAX)).map(|&(_, to)| to))
    }

    pub fn has_edge(&self, agent: &Agent, from: usize, to: usize) -> bool {
        self.relations.get(agent).is_some_and(|r| r.contains(&(from, to)))
    }

    /// Postcondition map of event `i`; names not listed keep their value.
    pub fn pos_at(&self, i: usize) -> &BTreeMap<Name, Name> {
        &self.pos[i]
    }

    pub fn pos_of(&self, i: usize, a: &Name) -> Name {
        self.pos[i].get(a).cloned().unwrap_or_else(|| a.clone())
    }

    pub fn has_factual_change(&self) -> bool {
        self.pos.iter().any(|m| !m.is_empty())
    }

    /// Every relation is an equivalence relation over the events.
    pub fn is_epistemic(&self) -> bool {
        let n = self.events.len();
        self.relations.values().all(|r| {
            (0..n).all(|i| r.contains(&(i, i)))
                && r.iter().all(|&(a, b)| r.contains(&(b, a)))
                && r.iter().all(|&(a, b)| r.range((b, 0)..=(b, usize::MAX)).all(|&(_, c)| r.contains(&(a, c))))
        })
    }

    /// Same events, relations and postconditions; preconditions replaced.
    pub fn map_preconditions(&self, name: impl Into<String>, mut f: impl FnMut(&Formula) -> Formula) -> EventModel {
        EventModel {
            name: name.into(),
            events: self.events.clone(),
            pre: self.pre.iter().map(&mut f).collect(),
            relations: self.relations.clone(),
            pos: self.pos.clone(),
        }
    }

    pub fn collect_symbols(&self, out: &mut Symbols) {
        for p in &self.pre {
            p.collect_symbols(out);
        }
        for m in &self.pos {
            for (a, b) in m {
                out.names.insert(a.clone());
                out.names.insert(b.clone());
            }
        }
    }
}

pub struct EventModelBuilder {
    name: String,
    events: Vec<EventId>,
    pre: Vec<Formula>,
    edges: Vec<(Agent, EventId, EventId)>,
    pos: Vec<(EventId, Name, Name)>,
}

impl EventModelBuilder {
    pub fn event(mut self, e: impl Into<EventId>, pre: Formula) -> Self {
        self.events.push(e.into());
        self.pre.push(pre);
        self
    }

    pub fn edge(mut self, agent: impl Into<Agent>, from: impl Into<EventId>, to: impl Into<EventId>) -> Self {
        self.edges.push((agent.into(), from.into(), to.into()));
        self
    }

    /// Reflexive loops on every event plus both directions of each pair given.
    pub fn equivalence(mut self, agent: impl Into<Agent>, linked: &[(&str, &str)]) -> Self {
        let agent = agent.into();
        for e in self.events.clone() {
            self.edges.push((agent.clone(), e.clone(), e));
        }
        for (a, b) in linked {
            self.edges.push((agent.clone(), EventId::new(a), EventId::new(b)));
            self.edges.push((agent.clone(), EventId::new(b), EventId::new(a)));
        }
        self
    }

    pub fn pos(mut self, e: impl Into<EventId>, from: impl Into<Name>, to: impl Into<Name>) -> Self {
        self.pos.push((e.into(), from.into(), to.into()));
        self
    }

    pub fn build(self) -> Result<EventModel, EventModelError> {
        if self.events.is_empty() {
            return Err(EventModelError::Empty(self.name));
        }
        let mut seen = BTreeSet::new();
        for e in &self.events {
            if !seen.insert(e.clone()) {
                return Err(EventModelError::DuplicateEvent(e.clone()));
            }
        }
        let index = |e: &EventId| {
            self.events
                .iter()
                .position(|x| x == e)
                .ok_or_else(|| EventModelError::UnknownEvent(e.clone()))
        };
        let mut relations: BTreeMap<Agent, BTreeSet<(usize, usize)>> = BTreeMap::new();
        for (a, from, to) in &self.edges {
            relations.entry(a.clone()).or_default().insert((index(from)?, index(to)?));
        }
        let mut pos = vec![BTreeMap::new(); self.events.len()];
        for (e, from, to) in &self.pos {
            pos[index(e)?].insert(from.clone(), to.clone());
        }
        Ok(EventModel::from_parts(self.name, self.events, self.pre, relations, pos))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::print::write_term(f, self)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::print::write_formula(f, self)
    }
}
