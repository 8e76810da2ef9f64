#![no_main]

use fakenews_core::corpus::{clean_text, StopWords};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let words = StopWords::parse(text);
    assert_eq!(StopWords::parse(&words.to_file_string()), words);
    // the same bytes double as tweet text
    let tokens = clean_text(text, &words);
    assert_eq!(clean_text(&tokens.join(" "), &words), tokens);
});
