#![no_main]

use delas::syntax::{parse_formula_in, ParseEnv, Signature};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let env = ParseEnv::new(Signature::open());
    let Ok(f) = parse_formula_in(text, &env) else { return };
    let printed = f.to_string();
    let back = match parse_formula_in(&printed, &env.clone().allowing_reserved()) {
        Ok(g) => g,
        // desugaring can push the printed form past the nesting cap
        Err(e) if e.message.contains("nested too deeply") => return,
        Err(e) => panic!("printed formula does not parse: {e}\n{printed}"),
    };
    assert_eq!(back, f);
    assert_eq!(back.to_string(), printed);
});
