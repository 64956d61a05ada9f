#![no_main]

use libfuzzer_sys::fuzz_target;
use tvg_core::ingest::network::{
    parse_weekday_list, read_bus_stops, read_calendar, read_intersections, read_routes, read_streets,
};

// First byte picks the file kind, the rest is the file body.
fuzz_target!(|data: &[u8]| {
    let Some((&kind, body)) = data.split_first() else { return };
    match kind % 6 {
        0 => drop(read_bus_stops(body)),
        1 => drop(read_streets(body)),
        2 => drop(read_intersections(body)),
        3 => drop(read_routes(body)),
        4 => drop(read_calendar(body)),
        _ => {
            if let Ok(s) = std::str::from_utf8(body) {
                drop(parse_weekday_list(s));
            }
        }
    }
});
