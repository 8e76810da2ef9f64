#![no_main]

use fakenews_core::features::EmbeddingTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = EmbeddingTable::parse(text) {
        let again = EmbeddingTable::parse(&table.format()).expect("formatted table parses");
        assert_eq!(again, table);
    }
});
