use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::formula::EventModel;
use super::symbol::{Name, Pred, Var};

/// Predicate arities plus declarations that override the default
/// variable/name convention of the parser.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub predicates: BTreeMap<Pred, usize>,
    pub names: BTreeSet<Name>,
    pub variables: BTreeSet<Var>,
    /// Accept undeclared predicates, fixing the arity at first use.
    pub infer_predicates: bool,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn open() -> Signature {
        Signature {
            infer_predicates: true,
            ..Signature::default()
        }
    }

    pub fn with_predicate(mut self, p: impl Into<Pred>, arity: usize) -> Signature {
        self.predicates.insert(p.into(), arity);
        self
    }

    pub fn with_name(mut self, n: impl Into<Name>) -> Signature {
        self.names.insert(n.into());
        self
    }

    pub fn with_variable(mut self, v: impl Into<Var>) -> Signature {
        self.variables.insert(v.into());
        self
    }

    pub fn arity(&self, p: &Pred) -> Option<usize> {
        self.predicates.get(p).copied()
    }

    /// Parses `P/1, R/2`.
    pub fn parse_decl(text: &str) -> Result<Signature, String> {
        let mut sig = Signature::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (p, n) = item
                .split_once('/')
                .ok_or_else(|| format!("expected `Pred/arity`, found `{item}`"))?;
            let p = p.trim();
            if !p.starts_with(|c: char| c.is_ascii_uppercase()) || !p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(format!("invalid predicate symbol `{p}`"));
            }
            if p == "K" || p == "Kv" || p == "M" {
                return Err(format!("`{p}` is a reserved word"));
            }
            let n: usize = n.trim().parse().map_err(|_| format!("invalid arity in `{item}`"))?;
            if let Some(old) = sig.predicates.insert(Pred::new(p), n) {
                if old != n {
                    return Err(format!("predicate {p} declared with arities {old} and {n}"));
                }
            }
        }
        Ok(sig)
    }
}

/// Everything the parser resolves against.
#[derive(Clone, Debug, Default)]
pub struct ParseEnv {
    pub signature: Signature,
    pub event_models: BTreeMap<String, Arc<EventModel>>,
    /// Accept reserved `z<digits>` variables, as produced by translations.
    pub allow_reserved: bool,
}

impl ParseEnv {
    pub fn new(signature: Signature) -> ParseEnv {
        ParseEnv {
            signature,
            ..ParseEnv::default()
        }
    }

    pub fn with_event_model(mut self, em: Arc<EventModel>) -> ParseEnv {
        self.event_models.insert(em.name().to_string(), em);
        self
    }

    pub fn allowing_reserved(mut self) -> ParseEnv {
        self.allow_reserved = true;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declarations() {
        let s = Signature::parse_decl("P/1, R/2").unwrap();
        assert_eq!(s.arity(&"R".into()), Some(2));
        assert!(Signature::parse_decl("p/1").is_err());
        assert!(Signature::parse_decl("K/1").is_err());
        assert!(Signature::parse_decl("P/1,P/2").is_err());
        assert!(Signature::parse_decl("P").is_err());
        assert_eq!(Signature::parse_decl("").unwrap(), Signature::new());
    }
}
