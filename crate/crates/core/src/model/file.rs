//! JSON file formats for Kripke models and event models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// On-disk Kripke model. Predicates and worlds missing from `rho` denote
/// the empty relation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub worlds: Vec<String>,
    pub domain: Vec<String>,
    #[serde(default)]
    pub agents: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub rho: BTreeMap<String, BTreeMap<String, Vec<Vec<String>>>>,
    #[serde(default)]
    pub eta: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub signature: BTreeMap<String, usize>,
}

/// On-disk event model; preconditions are formula strings.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEventModel {
    #[serde(default)]
    pub name: Option<String>,
    pub events: Vec<String>,
    #[serde(default)]
    pub agents: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<(String, String)>>,
    pub pre: BTreeMap<String, String>,
    #[serde(default)]
    pub pos: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub signature: BTreeMap<String, usize>,
}

/// One broken invariant of a model file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

pub(crate) fn is_name_ident(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !matches!(s, "true" | "false" | "not")
}

pub(crate) fn is_pred_ident(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !matches!(s, "K" | "Kv" | "M")
}

pub(crate) fn is_agent_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

struct Collector(Vec<Violation>);

impl Collector {
    fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.0.push(Violation {
            location: location.into(),
            message: message.into(),
        });
    }

    fn unique<'a>(&mut self, what: &str, items: impl IntoIterator<Item = &'a String>) -> BTreeSet<&'a str> {
        let mut seen = BTreeSet::new();
        for s in items {
            if !seen.insert(s.as_str()) {
                self.push(format!("{what} `{s}`"), "declared twice");
            }
        }
        seen
    }
}

/// Every invariant violation of `raw`, in file order.
pub fn validate(raw: &RawModel) -> Result<(), Vec<Violation>> {
    let mut c = Collector(vec![]);
    if raw.worlds.is_empty() {
        c.push("worlds", "at least one world is required");
    }
    if raw.domain.is_empty() {
        c.push("domain", "at least one object is required");
    }
    let worlds = c.unique("world", &raw.worlds);
    let domain = c.unique("object", &raw.domain);
    let agents = c.unique("agent", &raw.agents);
    for a in &raw.agents {
        if !is_agent_ident(a) {
            c.push(format!("agent `{a}`"), "agent ids are alphanumeric");
        }
    }
    for (a, edges) in &raw.relations {
        if !agents.contains(a.as_str()) {
            c.push(format!("relations.{a}"), "agent not listed in `agents`");
        }
        for (k, (v, w)) in edges.iter().enumerate() {
            for end in [v, w] {
                if !worlds.contains(end.as_str()) {
                    c.push(format!("relations.{a}[{k}]"), format!("unknown world `{end}`"));
                }
            }
        }
    }
    for (p, n) in &raw.signature {
        if !is_pred_ident(p) {
            c.push(format!("signature.{p}"), "predicate symbols start with an uppercase letter");
        }
        if *n > 8 {
            c.push(format!("signature.{p}"), format!("arity {n} exceeds the supported maximum of 8"));
        }
    }
    for (p, per_world) in &raw.rho {
        let arity = raw.signature.get(p);
        if arity.is_none() {
            c.push(format!("rho.{p}"), "predicate missing from `signature`");
        }
        for (w, tuples) in per_world {
            if !worlds.contains(w.as_str()) {
                c.push(format!("rho.{p}.{w}"), "unknown world");
            }
            for (k, t) in tuples.iter().enumerate() {
                if let Some(&n) = arity {
                    if t.len() != n {
                        c.push(format!("rho.{p}.{w}[{k}]"), format!("tuple of length {} for arity {n}", t.len()));
                    }
                }
                for o in t {
                    if !domain.contains(o.as_str()) {
                        c.push(format!("rho.{p}.{w}[{k}]"), format!("object `{o}` outside the domain"));
                    }
                }
            }
        }
    }
    for (a, per_world) in &raw.eta {
        if !is_name_ident(a) {
            c.push(format!("eta.{a}"), "names start with a lowercase letter or digit");
        }
        for (w, o) in per_world {
            if !worlds.contains(w.as_str()) {
                c.push(format!("eta.{a}.{w}"), "unknown world");
            }
            if !domain.contains(o.as_str()) {
                c.push(format!("eta.{a}.{w}"), format!("object `{o}` outside the domain"));
            }
        }
        for w in &raw.worlds {
            if !per_world.contains_key(w) {
                c.push(format!("eta.{a}"), format!("eta not total: no value at world `{w}`"));
            }
        }
    }
    if c.0.is_empty() {
        Ok(())
    } else {
        Err(c.0)
    }
}
