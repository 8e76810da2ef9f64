#![no_main]

use fakenews_core::corpus::{format_graphs, parse_graphs};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(graphs) = parse_graphs(text) {
        let again = parse_graphs(&format_graphs(&graphs)).expect("formatted graphs parse");
        assert_eq!(again, graphs);
        for g in &graphs {
            let degrees = g.degrees();
            assert_eq!(degrees.iter().sum::<usize>(), 2 * g.edges().len());
        }
    }
});
