use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use super::file::{validate, RawModel, Violation};
use super::worldset::WorldSet;
use crate::syntax::{Agent, EventId, Name, Pred, Signature, Term, Var};

/// World identifier; update products pair a world with an event.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WorldId {
    Atom(Arc<str>),
    Pair(Arc<WorldId>, EventId),
}

impl WorldId {
    pub fn new(s: impl AsRef<str>) -> WorldId {
        WorldId::Atom(Arc::from(s.as_ref()))
    }

    pub fn pair(w: WorldId, e: EventId) -> WorldId {
        WorldId::Pair(Arc::new(w), e)
    }
}

impl fmt::Display for WorldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorldId::Atom(s) => f.write_str(s),
            WorldId::Pair(w, e) => write!(f, "({w},{e})"),
        }
    }
}

impl fmt::Debug for WorldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WorldId({self})")
    }
}

pub type Tuple = SmallVec<[u32; 2]>;

/// Symbols a model interprets, shared by the model and all its updates.
#[derive(Debug, PartialEq, Eq)]
pub struct Vocab {
    pub(crate) objects: Vec<Arc<str>>,
    pub(crate) object_index: BTreeMap<Arc<str>, u32>,
    pub(crate) agents: Vec<Agent>,
    pub(crate) preds: Vec<(Pred, usize)>,
    pub(crate) names: Vec<Name>,
}

impl Vocab {
    pub(crate) fn new(objects: Vec<Arc<str>>, mut agents: Vec<Agent>, mut preds: Vec<(Pred, usize)>, mut names: Vec<Name>) -> Vocab {
        agents.sort();
        agents.dedup();
        preds.sort();
        preds.dedup_by(|a, b| a.0 == b.0);
        names.sort();
        names.dedup();
        let object_index = objects.iter().enumerate().map(|(i, o)| (o.clone(), i as u32)).collect();
        Vocab {
            objects,
            object_index,
            agents,
            preds,
            names,
        }
    }

    pub fn agent_index(&self, a: &Agent) -> Option<usize> {
        self.agents.binary_search(a).ok()
    }

    pub fn pred_index(&self, p: &Pred) -> Option<usize> {
        self.preds.binary_search_by(|(q, _)| q.cmp(p)).ok()
    }

    pub fn name_index(&self, a: &Name) -> Option<usize> {
        self.names.binary_search(a).ok()
    }
}

/// Finite constant-domain Kripke model.
///
/// Worlds are `0..n`. Predicate extensions are stored once per original
/// world and shared by every update of the model: `base[w]` names the
/// original world whose extensions world `w` copies.
#[derive(Clone, Debug)]
pub struct KripkeModel {
    pub(crate) vocab: Arc<Vocab>,
    pub(crate) ids: Vec<WorldId>,
    pub(crate) n: usize,
    pub(crate) base: Vec<u32>,
    /// `rho[p][base world]`, sorted tuples
    pub(crate) rho: Arc<Vec<Vec<Vec<Tuple>>>>,
    /// `rel[agent][w]`: successors of `w`
    pub(crate) rel: Vec<Vec<WorldSet>>,
    /// `eta[name][w]`
    pub(crate) eta: Vec<Vec<u32>>,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("bad assignment `{0}`: expected `variable=object`")]
    BadBinding(String),
}

impl KripkeModel {
    pub fn from_json(text: &str) -> Result<KripkeModel, ModelError> {
        let raw: RawModel = serde_json::from_str(text)?;
        KripkeModel::from_raw(&raw)
    }

    pub fn from_raw(raw: &RawModel) -> Result<KripkeModel, ModelError> {
        validate(raw).map_err(ModelError::Invalid)?;
        let objects: Vec<Arc<str>> = raw.domain.iter().map(|o| Arc::from(o.as_str())).collect();
        let vocab = Vocab::new(
            objects,
            raw.agents.iter().map(Agent::new).collect(),
            raw.signature.iter().map(|(p, &n)| (Pred::new(p), n)).collect(),
            raw.eta.keys().map(Name::new).collect(),
        );
        let n = raw.worlds.len();
        let world: BTreeMap<&str, usize> = raw.worlds.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
        let obj = |o: &String| vocab.object_index[o.as_str()];
        let mut rel = vec![vec![WorldSet::empty(n); n]; vocab.agents.len()];
        for (a, edges) in &raw.relations {
            let ai = vocab.agent_index(&Agent::new(a)).expect("validated");
            for (v, w) in edges {
                rel[ai][world[v.as_str()]].insert(world[w.as_str()]);
            }
        }
        let mut rho = vec![vec![vec![]; n]; vocab.preds.len()];
        for (p, per_world) in &raw.rho {
            let pi = vocab.pred_index(&Pred::new(p)).expect("validated");
            for (w, tuples) in per_world {
                let ext: &mut Vec<Tuple> = &mut rho[pi][world[w.as_str()]];
                ext.extend(tuples.iter().map(|t| t.iter().map(obj).collect::<Tuple>()));
                ext.sort();
                ext.dedup();
            }
        }
        let eta = vocab
            .names
            .iter()
            .map(|a| raw.worlds.iter().map(|w| obj(&raw.eta[a.as_str()][w])).collect())
            .collect();
        Ok(KripkeModel {
            vocab: Arc::new(vocab),
            ids: raw.worlds.iter().map(WorldId::new).collect(),
            n,
            base: (0..n as u32).collect(),
            rho: Arc::new(rho),
            rel,
            eta,
        })
    }

    /// Serializable form; `from_raw(to_raw())` reproduces the model up to
    /// world identifiers, which are flattened to their display strings.
    pub fn to_raw(&self) -> RawModel {
        let wname = |w: usize| self.ids[w].to_string();
        let oname = |o: u32| self.vocab.objects[o as usize].to_string();
        let mut raw = RawModel {
            worlds: (0..self.n).map(wname).collect(),
            domain: self.vocab.objects.iter().map(|o| o.to_string()).collect(),
            agents: self.vocab.agents.iter().map(|a| a.to_string()).collect(),
            ..RawModel::default()
        };
        for (ai, a) in self.vocab.agents.iter().enumerate() {
            let edges = (0..self.n)
                .flat_map(|w| self.rel[ai][w].iter().map(move |v| (wname(w), wname(v))))
                .collect();
            raw.relations.insert(a.to_string(), edges);
        }
        for (pi, (p, arity)) in self.vocab.preds.iter().enumerate() {
            raw.signature.insert(p.to_string(), *arity);
            let mut per_world = BTreeMap::new();
            for w in 0..self.n {
                let ext = &self.rho[pi][self.base[w] as usize];
                if !ext.is_empty() {
                    per_world.insert(wname(w), ext.iter().map(|t| t.iter().map(|&o| oname(o)).collect()).collect());
                }
            }
            if !per_world.is_empty() {
                raw.rho.insert(p.to_string(), per_world);
            }
        }
        for (ni, a) in self.vocab.names.iter().enumerate() {
            raw.eta.insert(a.to_string(), (0..self.n).map(|w| (wname(w), oname(self.eta[ni][w]))).collect());
        }
        raw
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("models serialize")
    }

    pub fn num_worlds(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn world_id(&self, w: usize) -> &WorldId {
        &self.ids[w]
    }

    pub fn world_ids(&self) -> &[WorldId] {
        &self.ids
    }

    /// Index of the world whose identifier displays as `id`.
    pub fn world_index(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|w| w.to_string() == id)
    }

    pub fn domain(&self) -> &[Arc<str>] {
        &self.vocab.objects
    }

    pub fn domain_size(&self) -> usize {
        self.vocab.objects.len()
    }

    pub fn object_index(&self, o: &str) -> Option<u32> {
        self.vocab.object_index.get(o).copied()
    }

    pub fn object_name(&self, o: u32) -> &str {
        &self.vocab.objects[o as usize]
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn agents(&self) -> &[Agent] {
        &self.vocab.agents
    }

    pub fn names(&self) -> &[Name] {
        &self.vocab.names
    }

    pub fn predicates(&self) -> &[(Pred, usize)] {
        &self.vocab.preds
    }

    /// Declares the model's predicates and names, so formulas about the
    /// model parse without a separate signature.
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for (p, k) in &self.vocab.preds {
            sig = sig.with_predicate(p.clone(), *k);
        }
        for a in &self.vocab.names {
            sig = sig.with_name(a.clone());
        }
        sig
    }

    pub fn successors(&self, agent: usize, w: usize) -> &WorldSet {
        &self.rel[agent][w]
    }

    pub fn has_edge(&self, agent: &Agent, v: usize, w: usize) -> bool {
        self.vocab.agent_index(agent).is_some_and(|a| self.rel[a][v].contains(w))
    }

    pub fn holds(&self, pred: usize, w: usize, args: &[u32]) -> bool {
        self.rho[pred][self.base[w] as usize]
            .binary_search_by(|t| t.as_slice().cmp(args))
            .is_ok()
    }

    pub fn extension(&self, pred: usize, w: usize) -> &[Tuple] {
        &self.rho[pred][self.base[w] as usize]
    }

    pub fn eta(&self, name: usize, w: usize) -> u32 {
        self.eta[name][w]
    }

    /// Every relation is reflexive, symmetric and transitive.
    pub fn is_epistemic(&self) -> bool {
        self.rel.iter().all(|r| {
            (0..self.n).all(|w| {
                r[w].contains(w) && r[w].iter().all(|v| r[v].contains(w) && r[v].is_subset(&r[w]))
            })
        })
    }

    /// `σ_w(t)`: the variable's value, or the name's denotation at `w`.
    pub fn sigma_lift(&self, w: usize, sigma: &Assignment, t: &Term) -> Result<u32, LiftError> {
        match t {
            Term::Var(x) => sigma.get(x).ok_or_else(|| LiftError::UnassignedVariable(x.clone())),
            Term::Name(a) => self
                .vocab
                .name_index(a)
                .map(|i| self.eta[i][w])
                .ok_or_else(|| LiftError::UninterpretedName(a.clone())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("variable {0} has no value under the assignment")]
    UnassignedVariable(Var),
    #[error("name {0} is not interpreted by the model")]
    UninterpretedName(Name),
}

/// Variable assignment, total on the variables it declares. Values are
/// object indices of the model it is used with.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    pairs: SmallVec<[(Var, u32); 4]>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn get(&self, x: &Var) -> Option<u32> {
        self.pairs
            .binary_search_by(|(v, _)| v.cmp(x))
            .ok()
            .map(|i| self.pairs[i].1)
    }

    pub fn set(&mut self, x: Var, o: u32) {
        match self.pairs.binary_search_by(|(v, _)| v.cmp(&x)) {
            Ok(i) => self.pairs[i].1 = o,
            Err(i) => self.pairs.insert(i, (x, o)),
        }
    }

    /// `σ[x ↦ o]`
    pub fn with(&self, x: &Var, o: u32) -> Assignment {
        let mut s = self.clone();
        s.set(x.clone(), o);
        s
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, u32)> {
        self.pairs.iter().map(|(v, o)| (v, *o))
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.pairs.iter().map(|(v, _)| v)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Parses `x=o` bindings against the model's domain.
    pub fn parse_bindings<S: AsRef<str>>(model: &KripkeModel, bindings: &[S]) -> Result<Assignment, ModelError> {
        let mut s = Assignment::new();
        for b in bindings {
            let b = b.as_ref();
            let (x, o) = b.split_once('=').ok_or_else(|| ModelError::BadBinding(b.to_string()))?;
            let (x, o) = (x.trim().trim_start_matches('?'), o.trim());
            if x.is_empty() {
                return Err(ModelError::BadBinding(b.to_string()));
            }
            let oi = model.object_index(o).ok_or_else(|| ModelError::UnknownObject(o.to_string()))?;
            s.set(Var::new(x), oi);
        }
        Ok(s)
    }

    pub fn display<'a>(&'a self, model: &'a KripkeModel) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Assignment, &'a KripkeModel);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("{")?;
                for (k, (x, o)) in self.0.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}={}", self.1.object_name(o))?;
                }
                f.write_str("}")
            }
        }
        D(self, model)
    }
}

/// A model, one of its worlds and an assignment.
#[derive(Clone, Debug)]
pub struct PointedModel {
    pub model: Arc<KripkeModel>,
    pub world: usize,
    pub assignment: Assignment,
}

impl PointedModel {
    pub fn new(model: Arc<KripkeModel>, world: usize, assignment: Assignment) -> PointedModel {
        assert!(world < model.num_worlds(), "world index out of range");
        assert!(
            assignment.iter().all(|(_, o)| (o as usize) < model.domain_size()),
            "assignment leaves the domain"
        );
        PointedModel { model, world, assignment }
    }
}

impl fmt::Display for PointedModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "world {} under {}\n{}",
            self.model.world_id(self.world),
            self.assignment.display(&self.model),
            self.model.to_json()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const EXAMPLE: &str = r#"{
        "worlds": ["s", "t"],
        "domain": ["o1", "o2"],
        "agents": ["i"],
        "relations": {"i": [["s","s"],["s","t"],["t","s"],["t","t"]]},
        "rho": {"P": {"s": [["o1"]], "t": [["o2"]]}},
        "eta": {"a": {"s": "o1", "t": "o2"}, "b": {"s": "o2", "t": "o1"}},
        "signature": {"P": 1}
    }"#;

    #[test]
    fn sigma_lift_reads_names_per_world() {
        let m = KripkeModel::from_json(EXAMPLE).unwrap();
        let s = m.world_index("s").unwrap();
        let t = m.world_index("t").unwrap();
        let sigma = Assignment::new();
        assert_eq!(m.object_name(m.sigma_lift(s, &sigma, &Term::name("a")).unwrap()), "o1");
        assert_eq!(m.object_name(m.sigma_lift(t, &sigma, &Term::name("b")).unwrap()), "o1");
        let sigma = Assignment::parse_bindings(&m, &["x=o2"]).unwrap();
        for w in [s, t] {
            assert_eq!(m.sigma_lift(w, &sigma, &Term::var("x")), Ok(1));
        }
        assert_eq!(
            m.sigma_lift(s, &sigma, &Term::var("y")),
            Err(LiftError::UnassignedVariable(Var::new("y")))
        );
        assert!(m.sigma_lift(s, &sigma, &Term::name("c")).is_err());
    }

    #[test]
    fn epistemic_checks() {
        let m = KripkeModel::from_json(EXAMPLE).unwrap();
        assert!(m.is_epistemic());
        let lonely = KripkeModel::from_json(r#"{"worlds":["w"],"domain":["o"],"agents":["i"]}"#).unwrap();
        assert!(!lonely.is_epistemic());
        let directed = KripkeModel::from_json(
            r#"{"worlds":["s","t"],"domain":["o"],"agents":["i"],
                "relations":{"i":[["s","s"],["t","t"],["s","t"]]}}"#,
        )
        .unwrap();
        assert!(!directed.is_epistemic());
    }

    #[test]
    fn raw_round_trip() {
        let m = KripkeModel::from_json(EXAMPLE).unwrap();
        let raw = m.to_raw();
        assert_eq!(validate(&raw), Ok(()));
        let again = KripkeModel::from_raw(&raw).unwrap();
        assert_eq!(again.to_raw(), raw);
        let original: RawModel = serde_json::from_str(EXAMPLE).unwrap();
        assert_eq!(raw, original);
    }

    #[test]
    fn assignment_bindings() {
        let m = KripkeModel::from_json(EXAMPLE).unwrap();
        let s = Assignment::parse_bindings(&m, &["y=o1", "?x = o2"]).unwrap();
        assert_eq!(s.display(&m).to_string(), "{x=o2, y=o1}");
        assert!(matches!(Assignment::parse_bindings(&m, &["x=o9"]), Err(ModelError::UnknownObject(_))));
        assert!(matches!(Assignment::parse_bindings(&m, &["x"]), Err(ModelError::BadBinding(_))));
    }
}
