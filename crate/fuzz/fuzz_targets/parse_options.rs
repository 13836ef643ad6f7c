#![no_main]

use delas::model::parse_event_id;
use delas::search::{Bounds, ModelClass};
use delas::syntax::Signature;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = Signature::parse_decl(text);
    let _ = text.parse::<ModelClass>();
    if let Ok(b) = Bounds::default().parse_overrides(text) {
        assert!(b.validate().is_ok());
    }
    if let Some(e) = parse_event_id(text) {
        assert_eq!(parse_event_id(&e.to_string()), Some(e));
    }
});
