#![no_main]

use delas::proof::Derivation;
use delas::syntax::ParseEnv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(d) = Derivation::parse(text, &ParseEnv::default()) else { return };
    let verdict = d.check();
    let again = Derivation::parse(&d.to_string(), &ParseEnv::default()).expect("printed derivations parse");
    assert_eq!(again.lines, d.lines);
    assert_eq!(again.check().map(|t| t.conclusion), verdict.map(|t| t.conclusion));
});
