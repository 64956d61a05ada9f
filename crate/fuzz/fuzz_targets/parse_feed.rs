#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(feed) = tvg_core::ingest::parse_feed(data) {
        for pings in feed.groups.values() {
            assert!(pings.windows(2).all(|w| w[0].ts <= w[1].ts));
        }
    }
});
