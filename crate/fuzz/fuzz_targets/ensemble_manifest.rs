#![no_main]

use fakenews_core::persist::EnsembleManifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(manifest) = EnsembleManifest::from_json(text) {
        for member in &manifest.members {
            assert!(!member.model.contains('/') && !member.model.starts_with('.'));
        }
    }
});
