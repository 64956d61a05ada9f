#![no_main]

use libfuzzer_sys::fuzz_target;
use tvg_core::ingest::{format_linestring, parse_linestring};

fuzz_target!(|text: &str| {
    if let Ok(points) = parse_linestring(text) {
        let again = parse_linestring(&format_linestring(&points)).expect("formatted WKT parses");
        assert_eq!(points.len(), again.len());
    }
});
