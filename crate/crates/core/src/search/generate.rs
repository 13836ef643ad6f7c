use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Agent, EventId, EventModel, Formula, Name, Pred, Term, Var};

use super::enumerate::partitions;

/// Shape of generated formulas.
#[derive(Clone, Debug)]
pub struct GeneratorConfig {
    /// operator nesting depth cap
    pub depth: usize,
    /// chance that an inner node is an announcement or update, when allowed
    pub dynamic_probability: f64,
    pub announcements: bool,
    pub updates: bool,
    /// allow postconditions in generated event models
    pub factual_change: bool,
    /// only equivalence relations in generated event models
    pub epistemic_events: bool,
    pub max_events: usize,
    pub agents: Vec<Agent>,
    pub names: Vec<Name>,
    pub variables: Vec<Var>,
    pub predicates: Vec<(Pred, usize)>,
}

impl Default for GeneratorConfig {
    fn default() -> GeneratorConfig {
        GeneratorConfig {
            depth: 3,
            dynamic_probability: 0.3,
            announcements: true,
            updates: true,
            factual_change: true,
            epistemic_events: false,
            max_events: 2,
            agents: vec![Agent::new("i"), Agent::new("j")],
            names: vec![Name::new("a"), Name::new("b")],
            variables: vec![Var::new("x"), Var::new("y")],
            predicates: vec![(Pred::new("P"), 1)],
        }
    }
}

impl GeneratorConfig {
    pub fn static_only(mut self) -> GeneratorConfig {
        self.announcements = false;
        self.updates = false;
        self
    }
}

/// Seeded grammar-directed generator of terms, formulas and event models.
pub struct Generator {
    pub config: GeneratorConfig,
    rng: ChaCha8Rng,
    models: usize,
}

impl Generator {
    pub fn new(config: GeneratorConfig, seed: u64) -> Generator {
        Generator {
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
            models: 0,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn var(&mut self) -> Var {
        self.config.variables.choose(&mut self.rng).expect("a variable").clone()
    }

    pub fn agent(&mut self) -> Agent {
        self.config.agents.choose(&mut self.rng).expect("an agent").clone()
    }

    pub fn name(&mut self) -> Name {
        self.config.names.choose(&mut self.rng).expect("a name").clone()
    }

    pub fn term(&mut self) -> Term {
        if self.rng.gen_bool(0.5) {
            Term::Var(self.var())
        } else {
            Term::Name(self.name())
        }
    }

    pub fn terms(&mut self, n: usize) -> Vec<Term> {
        (0..n).map(|_| self.term()).collect()
    }

    /// `⊤`, an equality or a predicate atom.
    pub fn atom(&mut self) -> Formula {
        match self.rng.gen_range(0..8) {
            0 => Formula::Top,
            1..=3 => Formula::eq(self.term(), self.term()),
            _ => {
                let (p, k) = self.config.predicates.choose(&mut self.rng).expect("a predicate").clone();
                let ts = self.terms(k);
                Formula::Pred(p, ts)
            }
        }
    }

    pub fn formula(&mut self) -> Formula {
        let d = self.config.depth;
        self.formula_at(d)
    }

    pub fn formula_at(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.15) {
            return self.atom();
        }
        let dynamic = self.config.announcements || self.config.updates;
        if dynamic && self.rng.gen_bool(self.config.dynamic_probability) {
            let announce = !self.config.updates || (self.config.announcements && self.rng.gen_bool(0.5));
            return if announce {
                let psi = self.formula_at(depth - 1);
                Formula::announce(psi, self.formula_at(depth - 1))
            } else {
                let em = self.event_model_at(depth - 1);
                let e = em.events().choose(&mut self.rng).expect("an event").clone();
                Formula::update(em, e, self.formula_at(depth - 1))
            };
        }
        match self.rng.gen_range(0..6) {
            0 => Formula::not(self.formula_at(depth - 1)),
            1 => Formula::and(self.formula_at(depth - 1), self.formula_at(depth - 1)),
            2 => Formula::implies(self.formula_at(depth - 1), self.formula_at(depth - 1)),
            3 => {
                let i = self.agent();
                Formula::know(i, self.formula_at(depth - 1))
            }
            4 => {
                let x = self.var();
                let t = self.term();
                Formula::assign(x, t, self.formula_at(depth - 1))
            }
            _ => Formula::or(self.formula_at(depth - 1), self.formula_at(depth - 1)),
        }
    }

    pub fn event_model(&mut self) -> Arc<EventModel> {
        let d = self.config.depth.saturating_sub(1);
        self.event_model_at(d)
    }

    /// An event model of at most `max_events` events whose preconditions
    /// have depth below `depth`.
    pub fn event_model_at(&mut self, depth: usize) -> Arc<EventModel> {
        self.event_model_with(depth, self.config.factual_change)
    }

    pub fn event_model_with(&mut self, depth: usize, factual_change: bool) -> Arc<EventModel> {
        self.models += 1;
        let n = self.rng.gen_range(1..=self.config.max_events.max(1));
        let events: Vec<EventId> = (0..n).map(|k| EventId::new(format!("e{k}"))).collect();
        let mut b = EventModel::builder(format!("E{}", self.models));
        for e in &events {
            let pre = if self.rng.gen_bool(0.3) { Formula::Top } else { self.formula_at(depth.min(2)) };
            b = b.event(e.clone(), pre);
        }
        let parts = partitions(n);
        for agent in self.config.agents.clone() {
            if self.config.epistemic_events {
                let mask = parts[self.rng.gen_range(0..parts.len())];
                for u in 0..n {
                    for v in 0..n {
                        if mask >> (u * n + v) & 1 == 1 {
                            b = b.edge(agent.clone(), events[u].clone(), events[v].clone());
                        }
                    }
                }
            } else {
                for u in 0..n {
                    for v in 0..n {
                        if self.rng.gen_bool(0.5) {
                            b = b.edge(agent.clone(), events[u].clone(), events[v].clone());
                        }
                    }
                }
            }
        }
        if factual_change {
            for e in &events {
                for a in self.config.names.clone() {
                    if self.rng.gen_bool(0.3) {
                        let target = self.name();
                        b = b.pos(e.clone(), a, target);
                    }
                }
            }
        }
        let mut em = b.build().expect("generated events are distinct");
        for agent in &self.config.agents {
            em = em.with_empty_relation(agent.clone());
        }
        Arc::new(em)
    }

    pub fn event_of(&mut self, em: &EventModel) -> EventId {
        em.events().choose(&mut self.rng).expect("an event").clone()
    }
}
