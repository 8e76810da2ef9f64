#![no_main]

use fakenews_core::predictions::{format_predictions, parse_predictions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(parsed) = parse_predictions(text) {
        let again = parse_predictions(&format_predictions(parsed.task, &parsed.rows)).expect("formatted rows parse");
        assert_eq!(again, parsed);
    }
});
