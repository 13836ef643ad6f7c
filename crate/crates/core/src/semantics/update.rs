use crate::model::{Assignment, KripkeModel, WorldId, WorldSet};
use crate::syntax::{EventModel, Formula};

use super::eval::{check_evaluable, check_event_model, sat, EvalError};

/// Submodel on the worlds of `keep`, plus the old index of every new world.
pub(crate) fn restrict_to(m: &KripkeModel, keep: &WorldSet, with_ids: bool) -> (KripkeModel, Vec<usize>) {
    let kept: Vec<usize> = keep.iter().collect();
    let n = kept.len();
    let mut new_index = vec![usize::MAX; m.n];
    for (new, &old) in kept.iter().enumerate() {
        new_index[old] = new;
    }
    let rel = m
        .rel
        .iter()
        .map(|r| {
            kept.iter()
                .map(|&old| {
                    let mut s = WorldSet::empty(n);
                    for v in r[old].iter() {
                        if keep.contains(v) {
                            s.insert(new_index[v]);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    let sub = KripkeModel {
        vocab: m.vocab.clone(),
        ids: if with_ids { kept.iter().map(|&w| m.ids[w].clone()).collect() } else { vec![] },
        n,
        base: kept.iter().map(|&w| m.base[w]).collect(),
        rho: m.rho.clone(),
        rel,
        eta: m.eta.iter().map(|row| kept.iter().map(|&w| row[w]).collect()).collect(),
    };
    (sub, kept)
}

/// Update product given the truth set of every precondition. Returns the
/// index of `(w, f)` in the product, when present, as `index[w][f]`.
pub(crate) fn product_on(
    m: &KripkeModel,
    em: &EventModel,
    pres: &[WorldSet],
    with_ids: bool,
) -> (KripkeModel, Vec<Vec<Option<usize>>>) {
    let k = em.len();
    let mut index = vec![vec![None; k]; m.n];
    let mut pairs = vec![];
    for (w, row) in index.iter_mut().enumerate() {
        for (f, slot) in row.iter_mut().enumerate() {
            if pres[f].contains(w) {
                *slot = Some(pairs.len());
                pairs.push((w, f));
            }
        }
    }
    let n = pairs.len();
    let rel = m
        .vocab
        .agents
        .iter()
        .enumerate()
        .map(|(ai, agent)| {
            pairs
                .iter()
                .map(|&(w, f)| {
                    let mut s = WorldSet::empty(n);
                    for g in em.successors(agent, f) {
                        for v in m.rel[ai][w].iter() {
                            if let Some(j) = index[v][g] {
                                s.insert(j);
                            }
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    let eta = m
        .vocab
        .names
        .iter()
        .enumerate()
        .map(|(ni, a)| {
            pairs
                .iter()
                .map(|&(w, f)| {
                    let src = match em.pos_at(f).get(a) {
                        Some(b) => m.vocab.name_index(b).expect("checked: postcondition interpreted"),
                        None => ni,
                    };
                    m.eta[src][w]
                })
                .collect()
        })
        .collect();
    let ids = if with_ids {
        pairs
            .iter()
            .map(|&(w, f)| WorldId::pair(m.ids[w].clone(), em.events()[f].clone()))
            .collect()
    } else {
        vec![]
    };
    let prod = KripkeModel {
        vocab: m.vocab.clone(),
        ids,
        n,
        base: pairs.iter().map(|&(w, _)| m.base[w]).collect(),
        rho: m.rho.clone(),
        rel,
        eta,
    };
    (prod, index)
}

/// `M|^σ_ψ`: the submodel of the worlds where `psi` holds. May be empty.
pub fn restrict(m: &KripkeModel, sigma: &Assignment, psi: &Formula) -> Result<KripkeModel, EvalError> {
    check_evaluable(m, sigma, psi)?;
    Ok(restrict_to(m, &sat(m, sigma, psi), true).0)
}

/// `(M ⊗ E)^σ`: pairs `(w, e)` with `M, w, σ ⊨ Pre(e)`, relations taken
/// componentwise and names moved through the postconditions. Agents of
/// `M` without a relation in `E` end up with no edges.
pub fn product(m: &KripkeModel, sigma: &Assignment, em: &EventModel) -> Result<KripkeModel, EvalError> {
    for p in em.preconditions() {
        check_evaluable(m, sigma, p)?;
    }
    check_event_model(m, em)?;
    let pres: Vec<WorldSet> = em.preconditions().iter().map(|p| sat(m, sigma, p)).collect();
    Ok(product_on(m, em, &pres, true).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PointedModel;
    use crate::semantics::eval;
    use crate::syntax::{parse_formula_in, ParseEnv, Signature, Term};
    use std::sync::Arc;

    const EXAMPLE: &str = r#"{
        "worlds": ["s", "t"],
        "domain": ["o1", "o2"],
        "agents": ["i"],
        "relations": {"i": [["s","s"],["s","t"],["t","s"],["t","t"]]},
        "rho": {"P": {"s": [["o1"]], "t": [["o2"]]}},
        "eta": {"a": {"s": "o1", "t": "o2"}, "b": {"s": "o2", "t": "o1"}},
        "signature": {"P": 1}
    }"#;

    const PASSWORD_CORE: &str = r#"{
        "worlds": ["s", "t"],
        "domain": ["4", "12", "34"],
        "agents": ["1", "2"],
        "relations": {
            "1": [["s","s"],["s","t"],["t","s"],["t","t"]],
            "2": [["s","s"],["s","t"],["t","s"],["t","t"]]
        },
        "eta": {"c": {"s": "12", "t": "4"}, "d": {"s": "34", "t": "12"}}
    }"#;

    fn model() -> KripkeModel {
        KripkeModel::from_json(EXAMPLE).unwrap()
    }

    #[test]
    fn restriction_examples() {
        let m = model();
        let p = Formula::pred("P", vec![Term::name("a")]);
        assert_eq!(restrict(&m, &Assignment::new(), &p).unwrap().num_worlds(), 2);
        let sigma = Assignment::parse_bindings(&m, &["x=o1"]).unwrap();
        let r = restrict(&m, &sigma, &Formula::eq(Term::var("x"), Term::name("a"))).unwrap();
        assert_eq!(r.world_ids(), &[WorldId::new("s")]);
        assert!(r.has_edge(&"i".into(), 0, 0));
        let same = restrict(&m, &Assignment::new(), &Formula::Top).unwrap();
        assert_eq!(same.to_raw(), m.to_raw());
        let none = restrict(&m, &Assignment::new(), &Formula::bottom()).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn singleton_product_keeps_precondition_worlds() {
        let m = model();
        let sigma = Assignment::parse_bindings(&m, &["x=o1"]).unwrap();
        let em = EventModel::singleton("E", "e".into(), Formula::pred("P", vec![Term::var("x")]), &["i".into()]);
        let p = product(&m, &sigma, &em).unwrap();
        assert_eq!(p.num_worlds(), 1);
        assert_eq!(p.world_id(0).to_string(), "(s,e)");
        let id = EventModel::singleton("I", "e".into(), Formula::Top, &["i".into()]);
        let p = product(&m, &sigma, &id).unwrap();
        assert_eq!(p.num_worlds(), 2);
        assert!(p.is_epistemic());
        assert_eq!(p.eta, m.eta);
    }

    #[test]
    fn password_product_on_the_core() {
        let m = KripkeModel::from_json(PASSWORD_CORE).unwrap();
        let em = crate::model::RawEventModel::from_json(
            r#"{"name":"E","events":["e","f"],"agents":["1","2"],
                "relations":{"1":[["e","e"],["f","f"]],"2":[["e","e"],["f","f"],["e","f"],["f","e"]]},
                "pre":{"e":"x ~ c","f":"x ~ d"}}"#,
        )
        .unwrap()
        .build(&ParseEnv::default())
        .unwrap();
        let sigma = Assignment::parse_bindings(&m, &["x=12"]).unwrap();
        let p = product(&m, &sigma, &em).unwrap();
        let ids: Vec<String> = p.world_ids().iter().map(|w| w.to_string()).collect();
        assert_eq!(ids, ["(s,e)", "(t,f)"]);
        assert!(p.has_edge(&"2".into(), 0, 1) && p.has_edge(&"2".into(), 1, 0));
        assert!(!p.has_edge(&"1".into(), 0, 1) && !p.has_edge(&"1".into(), 1, 0));
        assert!(p.has_edge(&"1".into(), 0, 0) && p.has_edge(&"1".into(), 1, 1));

        let env = ParseEnv::new(Signature::new()).with_event_model(Arc::new(em));
        let f = parse_formula_in(
            "[x := c] [E @ e] (Kv{1} c & ~Kv{1} d & ~Kv{2} c & ~Kv{2} d & K{2} (Kv{1} c | Kv{1} d))",
            &env,
        )
        .unwrap();
        let ctx = PointedModel::new(Arc::new(m), 0, Assignment::new());
        // on two worlds agent 1 learns d too, so only the ¬Kv_1 d conjunct fails
        assert!(!eval(&ctx, &f).unwrap());
        let g = parse_formula_in(
            "[x := c] [E @ e] (Kv{1} c & Kv{1} d & ~Kv{2} c & ~Kv{2} d & K{2} (Kv{1} c | Kv{1} d))",
            &env,
        )
        .unwrap();
        assert!(eval(&ctx, &g).unwrap());
    }

    #[test]
    fn postconditions_swap_names() {
        let m = model();
        let em = EventModel::builder("S")
            .event("e", Formula::Top)
            .equivalence("i", &[])
            .pos("e", "a", "b")
            .pos("e", "b", "a")
            .build()
            .unwrap();
        let p = product(&m, &Assignment::new(), &em).unwrap();
        let (a, b) = (p.vocab().name_index(&"a".into()).unwrap(), p.vocab().name_index(&"b".into()).unwrap());
        for w in 0..2 {
            assert_eq!(p.eta(a, w), m.eta(b, w));
            assert_eq!(p.eta(b, w), m.eta(a, w));
        }
        let bad = EventModel::builder("B").event("e", Formula::Top).pos("e", "a", "zz").build().unwrap();
        assert!(product(&m, &Assignment::new(), &bad).is_err());
    }

    #[test]
    fn empty_products_are_legal() {
        let m = model();
        let em = EventModel::singleton("E", "e".into(), Formula::bottom(), &["i".into()]);
        assert!(product(&m, &Assignment::new(), &em).unwrap().is_empty());
    }
}
