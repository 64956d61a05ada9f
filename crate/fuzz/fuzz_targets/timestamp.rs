#![no_main]

use libfuzzer_sys::fuzz_target;
use tvg_core::metrics::parse_hours;
use tvg_core::Timestamp;

fuzz_target!(|text: &str| {
    if let Ok(t) = text.parse::<Timestamp>() {
        assert_eq!(t.to_string().parse::<Timestamp>().unwrap(), t);
    }
    if let Ok((a, b)) = parse_hours(text) {
        assert!(a <= b && b < 24);
    }
});
