#![no_main]

use delas::model::{validate, KripkeModel, RawModel};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(raw) = serde_json::from_str::<RawModel>(text) {
        let _ = validate(&raw);
    }
    let Ok(m) = KripkeModel::from_json(text) else { return };
    let again = KripkeModel::from_json(&m.to_json()).expect("written models load");
    assert_eq!(again.to_raw(), m.to_raw());
});
