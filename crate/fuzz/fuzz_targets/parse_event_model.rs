#![no_main]

use std::sync::Arc;

use delas::model::{parse_event_id, RawEventModel};
use delas::syntax::{parse_formula_in, Formula, ParseEnv, Signature};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(raw) = RawEventModel::from_json(text) else { return };
    let Ok(em) = raw.build(&ParseEnv::new(Signature::open())) else { return };
    for e in em.events() {
        assert_eq!(parse_event_id(&e.to_string()).as_ref(), Some(e));
    }
    let em = Arc::new(em);
    let Some(e) = em.events().first().cloned() else { return };
    let env = ParseEnv::new(Signature::open()).with_event_model(em.clone());
    let f = Formula::update(em, e, Formula::Top);
    assert_eq!(parse_formula_in(&f.to_string(), &env).expect("updates print parseably"), f);
});
