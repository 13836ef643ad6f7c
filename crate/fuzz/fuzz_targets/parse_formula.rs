#![no_main]

use delas::syntax::{parse_formula, parse_term, ParseEnv, Signature};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_formula(text, &Signature::open());
    let _ = parse_formula(text, &Signature::new().with_predicate("P", 1));
    let _ = parse_term(text, &ParseEnv::default());
});
