//! Bounded model enumeration and countermodel search.
//!
//! A verdict of [`Verdict::ValidWithinBounds`] only says that no model
//! inside the bounds falsifies the formula.

mod check;
mod enumerate;
mod fuzz;
mod generate;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::PointedModel;
use crate::semantics::EvalError;
use crate::syntax::{free_vars, Agent, Formula, Name, Pred, Var};

pub use check::{find_countermodel, find_countermodel_in, find_disagreement, ModelSource};
pub use enumerate::{enumerate_models, model_count};
pub use fuzz::{fuzz_axioms, fuzz_axioms_with, fuzz_schema, random_bindings, FuzzFailure, FuzzReport, SchemaReport};
pub use generate::{Generator, GeneratorConfig};

/// The caveat attached to every bounded validity verdict.
pub const CAVEAT: &str = "valid within bounds is not a validity proof";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ModelClass {
    #[default]
    Arbitrary,
    /// every relation an equivalence
    Epistemic,
}

impl ModelClass {
    pub fn name(self) -> &'static str {
        match self {
            ModelClass::Arbitrary => "arbitrary",
            ModelClass::Epistemic => "epistemic",
        }
    }
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelClass {
    type Err = String;

    fn from_str(s: &str) -> Result<ModelClass, String> {
        match s {
            "arbitrary" => Ok(ModelClass::Arbitrary),
            "epistemic" => Ok(ModelClass::Epistemic),
            _ => Err(format!("unknown model class `{s}`: expected arbitrary or epistemic")),
        }
    }
}

/// Size limits of an enumeration. Worlds and domain are upper bounds on
/// the shapes enumerated; agents, names and variables cap the vocabulary a
/// query may use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_worlds: usize,
    pub max_domain: usize,
    pub max_agents: usize,
    pub max_names: usize,
    pub max_variables: usize,
    pub class: ModelClass,
}

impl Default for Bounds {
    fn default() -> Bounds {
        Bounds {
            max_worlds: 2,
            max_domain: 2,
            max_agents: 2,
            max_names: 2,
            max_variables: 2,
            class: ModelClass::Arbitrary,
        }
    }
}

impl Bounds {
    pub fn new(max_worlds: usize, max_domain: usize) -> Bounds {
        Bounds {
            max_worlds,
            max_domain,
            ..Bounds::default()
        }
    }

    pub fn with_class(mut self, class: ModelClass) -> Bounds {
        self.class = class;
        self
    }

    /// Reads `worlds=N,domain=N,agents=N,names=N,variables=N`, each key
    /// optional, on top of `self`.
    pub fn parse_overrides(mut self, text: &str) -> Result<Bounds, SearchError> {
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| SearchError::BadBounds(format!("`{part}`: expected key=N")))?;
            let n: usize = value
                .trim()
                .parse()
                .map_err(|_| SearchError::BadBounds(format!("`{part}`: not a number")))?;
            match key.trim() {
                "worlds" => self.max_worlds = n,
                "domain" => self.max_domain = n,
                "agents" => self.max_agents = n,
                "names" => self.max_names = n,
                "variables" | "vars" => self.max_variables = n,
                other => return Err(SearchError::BadBounds(format!("unknown bound `{other}`"))),
            }
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.max_worlds == 0 || self.max_domain == 0 {
            return Err(SearchError::BadBounds("worlds and domain must be positive".into()));
        }
        if self.max_worlds > enumerate::MAX_WORLDS {
            return Err(SearchError::BadBounds(format!(
                "at most {} worlds are supported, got {}",
                enumerate::MAX_WORLDS,
                self.max_worlds
            )));
        }
        if self.max_domain > u32::MAX as usize {
            return Err(SearchError::BadBounds("domain too large".into()));
        }
        Ok(())
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "worlds={},domain={},agents={},names={},variables={} ({})",
            self.max_worlds, self.max_domain, self.max_agents, self.max_names, self.max_variables, self.class
        )
    }
}

/// Symbols an enumerated model interprets, each list sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub agents: Vec<Agent>,
    pub names: Vec<Name>,
    /// assigned by every enumerated assignment
    pub variables: Vec<Var>,
    pub predicates: Vec<(Pred, usize)>,
}

impl Vocabulary {
    /// Exactly the symbols `f` depends on: its agents, names (postcondition
    /// names included), predicates and free variables.
    pub fn of(f: &Formula) -> Vocabulary {
        let s = f.symbols();
        Vocabulary {
            agents: s.agents.into_iter().collect(),
            names: s.names.into_iter().collect(),
            variables: free_vars(f).into_iter().collect(),
            predicates: s.predicates.into_iter().collect(),
        }
    }

    pub fn new(agents: &[&str], names: &[&str], variables: &[&str], predicates: &[(&str, usize)]) -> Vocabulary {
        let mut v = Vocabulary {
            agents: agents.iter().map(Agent::new).collect(),
            names: names.iter().map(Name::new).collect(),
            variables: variables.iter().map(Var::new).collect(),
            predicates: predicates.iter().map(|&(p, k)| (Pred::new(p), k)).collect(),
        };
        v.normalize();
        v
    }

    pub fn union(&self, other: &Vocabulary) -> Vocabulary {
        let mut v = self.clone();
        v.agents.extend(other.agents.iter().cloned());
        v.names.extend(other.names.iter().cloned());
        v.variables.extend(other.variables.iter().cloned());
        v.predicates.extend(other.predicates.iter().cloned());
        v.normalize();
        v
    }

    pub(crate) fn normalize(&mut self) {
        self.agents.sort();
        self.agents.dedup();
        self.names.sort();
        self.names.dedup();
        self.variables.sort();
        self.variables.dedup();
        self.predicates.sort();
        self.predicates.dedup_by(|a, b| a.0 == b.0);
    }

    pub(crate) fn fits(&self, b: &Bounds) -> Result<(), SearchError> {
        let check = |kind: &'static str, found: usize, max: usize| {
            if found > max {
                Err(SearchError::VocabularyTooLarge { kind, found, max })
            } else {
                Ok(())
            }
        };
        check("agents", self.agents.len(), b.max_agents)?;
        check("names", self.names.len(), b.max_names)?;
        check("variables", self.variables.len(), b.max_variables)
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("bad bounds: {0}")]
    BadBounds(String),
    #[error("the query uses {found} {kind}, the bounds allow {max}")]
    VocabularyTooLarge { kind: &'static str, found: usize, max: usize },
    #[error("predicate {pred}/{arity} has too many argument tuples for the domain bound")]
    PredicateTooWide { pred: String, arity: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("countermodel failed re-verification")]
    Unconfirmed,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    /// no enumerated pointed model falsifies the query
    ValidWithinBounds { checked: usize },
    Countermodel(Box<PointedModel>),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::ValidWithinBounds { .. })
    }

    pub fn countermodel(&self) -> Option<&PointedModel> {
        match self {
            Verdict::Countermodel(pm) => Some(pm),
            Verdict::ValidWithinBounds { .. } => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ValidWithinBounds { checked } => {
                write!(f, "valid within bounds ({checked} pointed models checked; {CAVEAT})")
            }
            Verdict::Countermodel(pm) => write!(f, "countermodel: {pm}"),
        }
    }
}
