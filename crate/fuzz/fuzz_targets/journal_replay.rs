#![no_main]

use libfuzzer_sys::fuzz_target;
use tvg_core::GraphStore;

fuzz_target!(|data: &[u8]| {
    let Ok(store) = GraphStore::replay(data) else { return };
    let mut out = Vec::new();
    store.write_journal(&mut out).unwrap();
    let again = GraphStore::replay(out.as_slice()).expect("written journal replays");
    assert_eq!(store.edges(), again.edges());
});
