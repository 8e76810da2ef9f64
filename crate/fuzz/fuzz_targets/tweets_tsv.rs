#![no_main]

use fakenews_core::corpus::{format_tweets, parse_tweets};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(tweets) = parse_tweets(text) {
        // anything accepted must survive a write/read cycle
        let again = parse_tweets(&format_tweets(&tweets)).expect("formatted tweets parse");
        assert_eq!(again, tweets);
    }
});
