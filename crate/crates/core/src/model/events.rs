use std::collections::BTreeMap;

use thiserror::Error;

use super::file::{is_agent_ident, is_name_ident, is_pred_ident, RawEventModel};
use crate::syntax::{parse_formula_in, EventId, EventModel, EventModelError, ParseEnv, ParseError, Pred};

#[derive(Debug, Error)]
pub enum EventFileError {
    #[error("malformed event model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("precondition of event `{event}`: {error}")]
    Pre { event: String, error: ParseError },
    #[error("event `{0}` has no precondition")]
    MissingPre(String),
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
    #[error(transparent)]
    Structure(#[from] EventModelError),
}

fn invalid(location: impl Into<String>, message: impl Into<String>) -> EventFileError {
    EventFileError::Invalid {
        location: location.into(),
        message: message.into(),
    }
}

/// Reads `e`, or a pair `(e,f)` as produced by composition.
pub fn parse_event_id(s: &str) -> Option<EventId> {
    fn go(s: &str) -> Option<(EventId, &str)> {
        let s = s.trim_start();
        if let Some(rest) = s.strip_prefix('(') {
            let (a, rest) = go(rest)?;
            let rest = rest.trim_start().strip_prefix(',')?;
            let (b, rest) = go(rest)?;
            let rest = rest.trim_start().strip_prefix(')')?;
            return Some((EventId::pair(a, b), rest));
        }
        let end = s.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '\'')).unwrap_or(s.len());
        (end > 0).then(|| (EventId::new(&s[..end]), &s[end..]))
    }
    let (e, rest) = go(s)?;
    rest.trim().is_empty().then_some(e)
}

impl RawEventModel {
    pub fn from_json(text: &str) -> Result<RawEventModel, EventFileError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Builds the event model, parsing preconditions under `env` extended
    /// with the file's own signature. The model is named after the file's
    /// `name`, or `E` by default.
    pub fn build(&self, env: &ParseEnv) -> Result<EventModel, EventFileError> {
        let mut env = env.clone();
        for (p, &n) in &self.signature {
            if !is_pred_ident(p) {
                return Err(invalid(format!("signature.{p}"), "predicate symbols start with an uppercase letter"));
            }
            match env.signature.predicates.insert(Pred::new(p), n) {
                Some(old) if old != n => {
                    return Err(invalid(format!("signature.{p}"), format!("arity {n} conflicts with {old}")));
                }
                _ => {}
            }
        }
        let name = self.name.clone().unwrap_or_else(|| "E".to_string());
        if !name.starts_with(|c: char| c.is_ascii_alphabetic()) || !is_agent_ident(&name) {
            return Err(invalid("name", "event model names are alphanumeric identifiers"));
        }
        let mut ids = BTreeMap::new();
        for e in &self.events {
            let id = parse_event_id(e).ok_or_else(|| invalid(format!("events.{e}"), "not an event identifier"))?;
            ids.insert(e.as_str(), id);
        }
        let id = |e: &String, loc: String| ids.get(e.as_str()).cloned().ok_or_else(|| invalid(loc, format!("unknown event `{e}`")));
        let mut b = EventModel::builder(name);
        for e in &self.events {
            let text = self.pre.get(e).ok_or_else(|| EventFileError::MissingPre(e.clone()))?;
            let pre = parse_formula_in(text, &env).map_err(|error| EventFileError::Pre { event: e.clone(), error })?;
            b = b.event(ids[e.as_str()].clone(), pre);
        }
        for e in self.pre.keys() {
            id(e, format!("pre.{e}"))?;
        }
        for (a, edges) in &self.relations {
            if !is_agent_ident(a) || (!self.agents.is_empty() && !self.agents.contains(a)) {
                return Err(invalid(format!("relations.{a}"), "agent not listed in `agents`"));
            }
            for (k, (u, v)) in edges.iter().enumerate() {
                let loc = format!("relations.{a}[{k}]");
                b = b.edge(a.as_str(), id(u, loc.clone())?, id(v, loc)?);
            }
        }
        for (e, map) in &self.pos {
            let eid = id(e, format!("pos.{e}"))?;
            for (from, to) in map {
                for n in [from, to] {
                    if !is_name_ident(n) {
                        return Err(invalid(format!("pos.{e}"), format!("`{n}` is not a name")));
                    }
                }
                b = b.pos(eid.clone(), from.as_str(), to.as_str());
            }
        }
        let mut em = b.build()?;
        for a in &self.agents {
            if em.relation(&a.as_str().into()).is_none() {
                em = em.with_empty_relation(a.as_str().into());
            }
        }
        Ok(em)
    }
}
