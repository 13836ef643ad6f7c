//! Shared by the proof corpus tests and the acceptance target.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use delas::proof::{Derivation, Justification, Rule, SchemaId};
use delas::syntax::{parse_formula_in, Formula, ParseEnv};

pub const CORPUS: [(&str, &str); 5] = [
    ("dbaseq", "~[x := a] ~K{i} P(x) <-> [x := a] K{i} P(x)"),
    ("cnecas", "[x := a] (P(x) & Q(a)) -> Q(a)"),
    ("eas", "[x := b] K{i} P(a) <-> K{i} P(a)"),
    ("subaseq", "P(y) & K{i} Q(y) <-> [x := y] (P(x) & K{i} Q(x))"),
    ("necas_prime", "[x := a] (P(x) | ~P(x))"),
];

pub fn examples_dir() -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "examples"].iter().collect()
}

pub fn load(name: &str) -> Derivation {
    let path = examples_dir().join("proofs").join(format!("{name}.proof"));
    let text = std::fs::read_to_string(&path).unwrap();
    Derivation::parse(&text, &ParseEnv::default()).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mutation {
    Negate,
    WrapK,
    SwapAgent,
    SelfReference,
    DropBinding,
    ChangeTerm,
    Rename,
}

pub const MUTATIONS: [Mutation; 7] = [
    Mutation::Negate,
    Mutation::WrapK,
    Mutation::SwapAgent,
    Mutation::SelfReference,
    Mutation::DropBinding,
    Mutation::ChangeTerm,
    Mutation::Rename,
];

fn renamed_schema(s: SchemaId) -> SchemaId {
    match s {
        SchemaId::Taut => SchemaId::Id,
        SchemaId::Kas => SchemaId::DetAs,
        SchemaId::Das => SchemaId::EfAs,
        SchemaId::Sub2As => SchemaId::SubAs,
        SchemaId::DetAs => SchemaId::Kas,
        _ => SchemaId::Taut,
    }
}

/// `d` with line `k` mutated, when the mutation applies to that line.
pub fn mutate(d: &Derivation, k: usize, m: Mutation) -> Option<Derivation> {
    let mut d = d.clone();
    let line = &mut d.lines[k];
    let number = line.number;
    let taut = matches!(line.justification, Justification::Axiom { schema: SchemaId::Taut, .. });
    match (m, &mut line.justification) {
        (_, Justification::Premise) => return None,
        (Mutation::Negate, _) => line.formula = Formula::not(line.formula.clone()),
        (Mutation::WrapK, _) => line.formula = Formula::know("i", line.formula.clone()),
        (Mutation::SwapAgent, _) => {
            let text = line.formula.to_string();
            if taut || !text.contains("K{i}") {
                return None;
            }
            line.formula = parse_formula_in(&text.replacen("K{i}", "K{j}", 1), &d.env).unwrap();
        }
        (Mutation::SelfReference, Justification::Rule { from, .. }) => from[0] = number,
        (Mutation::DropBinding, Justification::Axiom { bindings, .. } | Justification::Rule { bindings, .. }) => {
            let key = bindings.keys().next()?.clone();
            bindings.remove(&key);
        }
        (Mutation::ChangeTerm, Justification::Axiom { bindings, .. } | Justification::Rule { bindings, .. }) => {
            let t = bindings.get_mut("t")?;
            *t = if t == "c" { "a".into() } else { "c".into() };
        }
        (Mutation::Rename, Justification::Axiom { schema, .. }) => *schema = renamed_schema(*schema),
        (Mutation::Rename, Justification::Rule { rule, .. }) => {
            *rule = if *rule == Rule::NecK { Rule::NecAs } else { Rule::NecK }
        }
        _ => return None,
    }
    Some(d)
}

pub fn mutants(d: &Derivation, wanted: usize) -> Vec<(usize, Mutation, Derivation)> {
    let mut seen = BTreeSet::new();
    let mut out = vec![];
    for round in 0..MUTATIONS.len() {
        for k in 0..d.lines.len() {
            let m = MUTATIONS[(k + round) % MUTATIONS.len()];
            if out.len() < wanted && seen.insert((k, m)) {
                if let Some(mutant) = mutate(d, k, m) {
                    out.push((d.lines[k].number, m, mutant));
                }
            }
        }
    }
    out
}

#[derive(serde::Deserialize)]
pub struct Manifest {
    pub checks: Vec<Check>,
    pub proofs: Vec<ProofEntry>,
}

#[derive(serde::Deserialize)]
pub struct Check {
    pub id: String,
    #[serde(default)]
    pub criterion: Option<u32>,
    pub model: String,
    #[serde(default)]
    pub events: Vec<String>,
    pub formula: String,
    pub world: String,
    pub expected: bool,
}

#[derive(serde::Deserialize)]
pub struct ProofEntry {
    pub id: String,
    pub file: String,
    pub conclusion: String,
}

pub fn manifest() -> Manifest {
    let text = std::fs::read_to_string(examples_dir().join("manifest.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn read_example(rel: &str) -> String {
    std::fs::read_to_string(examples_dir().join(rel)).unwrap()
}

/// Loads the model and event files of `c` and evaluates its formula.
pub fn run_check(c: &Check) -> bool {
    use std::sync::Arc;

    use delas::model::{Assignment, KripkeModel, PointedModel, RawEventModel};
    use delas::semantics::eval;

    let m = Arc::new(KripkeModel::from_json(&read_example(&c.model)).unwrap());
    let mut env = ParseEnv::new(m.signature());
    for e in &c.events {
        let em = RawEventModel::from_json(&read_example(e)).unwrap().build(&env).unwrap();
        env = env.with_event_model(Arc::new(em));
    }
    let f = parse_formula_in(&c.formula, &env).unwrap();
    let w = m.world_index(&c.world).unwrap();
    eval(&PointedModel::new(m, w, Assignment::new()), &f).unwrap()
}
