#![no_main]

use fakenews_core::persist::ModelEnvelope;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(envelope) = ModelEnvelope::from_json(text) else {
        return;
    };
    let _ = envelope.clone().into_gnn();
    let _ = envelope.into_member(None);
});
