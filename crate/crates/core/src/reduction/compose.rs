use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::syntax::{EventId, EventModel, Formula, Name};

/// Sequential composition `E ; F`: executing `E` then `F` is executing the
/// composite at the pair of events. Events are ordered lexicographically.
pub fn compose_models(e1: &Arc<EventModel>, e2: &Arc<EventModel>) -> EventModel {
    let (n, m) = (e1.len(), e2.len());
    let idx = |i: usize, j: usize| i * m + j;
    let mut events = Vec::with_capacity(n * m);
    let mut pre = Vec::with_capacity(n * m);
    let mut pos = Vec::with_capacity(n * m);
    for (i, e) in e1.events().iter().enumerate() {
        for (j, f) in e2.events().iter().enumerate() {
            events.push(EventId::pair(e.clone(), f.clone()));
            pre.push(Formula::and(
                e1.pre_at(i).clone(),
                Formula::update(e1.clone(), e.clone(), e2.pre_at(j).clone()),
            ));
            let mut names: BTreeSet<&Name> = e1.pos_at(i).keys().collect();
            names.extend(e2.pos_at(j).keys());
            let map: BTreeMap<Name, Name> = names
                .into_iter()
                .map(|a| (a.clone(), e1.pos_of(i, &e2.pos_of(j, a))))
                .collect();
            pos.push(map);
        }
    }
    let mut relations: BTreeMap<_, BTreeSet<(usize, usize)>> = BTreeMap::new();
    let agents: BTreeSet<_> = e1.agents().chain(e2.agents()).cloned().collect();
    for a in agents {
        let mut r = BTreeSet::new();
        if let (Some(r1), Some(r2)) = (e1.relation(&a), e2.relation(&a)) {
            for &(i, k) in r1 {
                for &(j, l) in r2 {
                    r.insert((idx(i, j), idx(k, l)));
                }
            }
        }
        relations.insert(a, r);
    }
    let name = format!("({} * {})", e1.name(), e2.name());
    EventModel::from_parts(name, events, pre, relations, pos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Term;

    #[test]
    fn postconditions_compose_right_to_left() {
        let e = Arc::new(EventModel::builder("E").event("e", Formula::Top).pos("e", "a", "b").build().unwrap());
        let f = Arc::new(EventModel::builder("F").event("f", Formula::Top).pos("f", "c", "a").build().unwrap());
        let c = compose_models(&e, &f);
        assert_eq!(c.name(), "(E * F)");
        assert_eq!(c.pos_of(0, &Name::new("c")), Name::new("b"));
        assert_eq!(c.pos_of(0, &Name::new("a")), Name::new("b"));
        assert_eq!(c.pos_of(0, &Name::new("b")), Name::new("b"));
    }

    #[test]
    fn relations_are_pointwise_products() {
        let p = Formula::eq(Term::name("a"), Term::name("b"));
        let e = Arc::new(
            EventModel::builder("E")
                .event("e", p.clone())
                .event("f", Formula::Top)
                .edge("i", "e", "f")
                .build()
                .unwrap(),
        );
        let g = Arc::new(EventModel::builder("G").event("g", Formula::Top).edge("i", "g", "g").edge("j", "g", "g").build().unwrap());
        let c = compose_models(&e, &g);
        assert_eq!(c.len(), 2);
        assert!(c.has_edge(&"i".into(), 0, 1));
        assert!(!c.has_edge(&"i".into(), 1, 0));
        assert_eq!(c.relation(&"j".into()).map(|r| r.len()), Some(0));
        assert_eq!(
            c.pre_at(0),
            &Formula::and(p, Formula::update(e.clone(), "e".into(), Formula::Top))
        );
    }
}
