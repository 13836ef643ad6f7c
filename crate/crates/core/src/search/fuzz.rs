use std::fmt;

use rand::Rng;
use serde_json::{json, Value};

use crate::model::PointedModel;
use crate::proof::{instantiate_schema, is_tautology, Bindings, Kind, SchemaError, SchemaId, System};
use crate::syntax::Formula;

use super::{find_countermodel_in, Bounds, Generator, GeneratorConfig, ModelSource, Verdict};

/// Attempts at satisfying a schema's side conditions per instance.
const ATTEMPTS: usize = 64;

#[derive(Clone, Debug)]
pub struct SchemaReport {
    pub system: System,
    pub schema: SchemaId,
    pub passed: usize,
    pub failed: usize,
    /// instances whose side conditions no random binding met
    pub skipped: usize,
    /// searches that could not run, with the reason
    pub errors: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct FuzzFailure {
    pub system: System,
    pub schema: SchemaId,
    pub instance: Formula,
    pub countermodel: PointedModel,
}

#[derive(Clone, Debug, Default)]
pub struct FuzzReport {
    pub schemas: Vec<SchemaReport>,
    pub failures: Vec<FuzzFailure>,
}

impl FuzzReport {
    /// No countermodel and no search error.
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty() && self.schemas.iter().all(|s| s.errors.is_empty())
    }

    pub fn instances(&self) -> usize {
        self.schemas.iter().map(|s| s.passed + s.failed).sum()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schemas": self.schemas.iter().map(|s| json!({
                "system": s.system.name(),
                "schema": s.schema.name(),
                "passed": s.passed,
                "failed": s.failed,
                "skipped": s.skipped,
                "errors": s.errors,
            })).collect::<Vec<_>>(),
            "failures": self.failures.iter().map(|f| json!({
                "system": f.system.name(),
                "schema": f.schema.name(),
                "instance": f.instance.to_string(),
                "world": f.countermodel.model.world_id(f.countermodel.world).to_string(),
                "assignment": f.countermodel.assignment.display(&f.countermodel.model).to_string(),
                "model": serde_json::from_str::<Value>(&f.countermodel.model.to_json()).unwrap_or(Value::Null),
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.schemas {
            write!(
                f,
                "{:<8} {:<7} passed {:>4} failed {:>4} skipped {:>4}",
                s.system.name(),
                s.schema.name(),
                s.passed,
                s.failed,
                s.skipped
            )?;
            for e in &s.errors {
                write!(f, " error: {e}")?;
            }
            writeln!(f)?;
        }
        for x in &self.failures {
            writeln!(f, "FAIL {} {}: {}", x.system, x.schema, x.instance)?;
            writeln!(f, "{}", x.countermodel)?;
        }
        Ok(())
    }
}

/// Generator settings matching the language of `system`.
pub(crate) fn config_for(system: System) -> GeneratorConfig {
    let mut c = GeneratorConfig {
        depth: 2,
        epistemic_events: system.is_s5(),
        ..GeneratorConfig::default()
    };
    c.announcements = matches!(system, System::Spalas | System::Spalas5);
    c.updates = matches!(system, System::Sdelas | System::Sdelas5);
    c
}

fn tautology(g: &mut Generator) -> Formula {
    let d = g.config.depth.saturating_sub(1);
    let (a, b, c) = (g.formula_at(d), g.formula_at(d), g.formula_at(d));
    use Formula as F;
    let f = match g.rng().gen_range(0..8) {
        0 => F::implies(a.clone(), a),
        1 => F::or(a.clone(), F::not(a)),
        2 => F::implies(F::and(a.clone(), b), a),
        3 => F::implies(a.clone(), F::implies(b, a)),
        4 => F::implies(F::implies(F::implies(a.clone(), b), a.clone()), a),
        5 => F::implies(F::implies(a.clone(), b.clone()), F::implies(F::not(b), F::not(a))),
        6 => F::iff(F::not(F::not(a.clone())), a),
        _ => F::iff(
            F::and(a.clone(), F::or(b.clone(), c.clone())),
            F::or(F::and(a.clone(), b), F::and(a, c)),
        ),
    };
    debug_assert!(is_tautology(&f));
    f
}

/// Random bindings for every metavariable of `id`. Side conditions are not
/// checked here.
pub fn random_bindings(id: SchemaId, g: &mut Generator) -> Bindings {
    let mut b = Bindings::new();
    let pos_free = matches!(id, SchemaId::UCom | SchemaId::UAssi);
    let arity = g.config.predicates.first().map_or(0, |p| p.1);
    let mut models = std::collections::BTreeMap::new();
    for &(key, kind, optional) in id.metavariables() {
        if optional && g.rng().gen_bool(0.5) {
            continue;
        }
        b = match kind {
            Kind::Formula if id == SchemaId::Taut => {
                let f = tautology(g);
                b.formula(key, f)
            }
            Kind::Formula if key == "p" => {
                let f = g.atom();
                b.formula(key, f)
            }
            Kind::Formula => {
                let f = g.formula();
                b.formula(key, f)
            }
            Kind::Term => {
                let t = g.term();
                b.term(key, t)
            }
            Kind::Var => {
                let x = g.var();
                b.var(key, x)
            }
            Kind::Agent => {
                let i = g.agent();
                b.agent(key, i)
            }
            Kind::Pred => {
                let p = g.config.predicates[0].0.clone();
                b.pred(key, p)
            }
            Kind::Terms => {
                let ts = g.terms(arity);
                b.terms(key, ts)
            }
            Kind::EventModel => {
                let d = g.config.depth.saturating_sub(1);
                let factual = g.config.factual_change && !pos_free;
                let em = g.event_model_with(d, factual);
                models.insert(key, em.clone());
                b.event_model(key, em)
            }
            Kind::Event => {
                let model_key = if key == "e'" { "E'" } else { "E" };
                let e = g.event_of(&models[model_key]);
                b.event(key, e)
            }
        };
    }
    b
}

/// [`fuzz_axioms_with`] over the exhaustive enumeration within `b`.
pub fn fuzz_axioms(systems: &[System], count: usize, b: &Bounds, seed: u64) -> FuzzReport {
    fuzz_axioms_with(systems, count, &[ModelSource::Exhaustive(b.clone())], seed)
}

/// For each schema of each system, `count` random instances respecting the
/// side conditions, each searched for a countermodel in every source.
pub fn fuzz_axioms_with(systems: &[System], count: usize, sources: &[ModelSource], seed: u64) -> FuzzReport {
    let mut report = FuzzReport::default();
    for &system in systems {
        for schema in system.schemas() {
            fuzz_schema(system, schema, count, sources, seed, &mut report);
        }
    }
    report
}

/// Fuzzes one schema of `system`, appending to `report`. The instance stream
/// depends only on `(system, schema, seed)`.
pub fn fuzz_schema(
    system: System,
    schema: SchemaId,
    count: usize,
    sources: &[ModelSource],
    seed: u64,
    report: &mut FuzzReport,
) {
    let salt = (system as u64) << 32 | schema as u64;
    let mut g = Generator::new(config_for(system), seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut entry = SchemaReport {
        system,
        schema,
        passed: 0,
        failed: 0,
        skipped: 0,
        errors: vec![],
    };
    for _ in 0..count {
        let Some(instance) = (0..ATTEMPTS).find_map(|_| match instantiate_schema(schema, &random_bindings(schema, &mut g)) {
            Ok(f) => Some(Ok(f)),
            Err(SchemaError::SideCondition { .. }) => None,
            Err(e) => Some(Err(e)),
        }) else {
            entry.skipped += 1;
            continue;
        };
        let instance = match instance {
            Ok(f) => f,
            Err(e) => {
                entry.errors.push(e.to_string());
                continue;
            }
        };
        let mut failed = false;
        for source in sources {
            match find_countermodel_in(&instance, source) {
                Ok(Verdict::ValidWithinBounds { .. }) => {}
                Ok(Verdict::Countermodel(pm)) => {
                    report.failures.push(FuzzFailure {
                        system,
                        schema,
                        instance: instance.clone(),
                        countermodel: *pm,
                    });
                    failed = true;
                    break;
                }
                Err(e) => {
                    entry.errors.push(format!("{instance}: {e}"));
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            entry.failed += 1;
        } else {
            entry.passed += 1;
        }
    }
    report.schemas.push(entry);
}
