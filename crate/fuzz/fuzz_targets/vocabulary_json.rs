#![no_main]

use fakenews_core::features::Vocabulary;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(vocab) = Vocabulary::from_json(text) {
        let again = Vocabulary::from_json(&vocab.to_json()).expect("serialized vocabulary parses");
        assert_eq!(again.content_hash(), vocab.content_hash());
    }
});
