mod support;

use tvg_core::feedgen::{generate, Anomalies, Scenario};
use tvg_core::ingest::{ingest_paths, IngestOptions};
use tvg_core::metrics::{diameter, trip_connectivity, ViewSpec, Weight};
use tvg_core::{EdgeLabel, TimeWindow};

#[test]
fn removing_one_next_edge_breaks_the_trip_there() {
    let sc = Scenario {
        trips_per_line: 2,
        anomalies: Anomalies::none(),
        ..Scenario::default()
    };
    let dir = tempfile::tempdir().unwrap();
    generate(&sc).unwrap().write_to(dir.path()).unwrap();
    let (store, _) = ingest_paths(
        dir.path(),
        &dir.path().join("pings.csv"),
        &IngestOptions::default(),
    )
    .unwrap();

    let before = trip_connectivity(&store, "51-2").unwrap();
    assert!(before.connected);
    assert_eq!(before.next_edges + 1, before.chain_length);

    for k in [0, before.chain_length / 2, before.chain_length - 2] {
        let (a, b) = (before.episodes[k], before.episodes[k + 1]);
        let cut = store
            .out_edges(a)
            .iter()
            .map(|e| store.edge(*e).unwrap())
            .find(|e| e.label == EdgeLabel::Next && e.target == b)
            .unwrap()
            .id;
        let severed = support::rebuild_without(&store, cut);
        let after = trip_connectivity(&severed, "51-2").unwrap();
        assert!(!after.connected);
        assert_eq!(after.broken_links.len(), 1);
        assert_eq!(after.broken_links[0].index, k);
        assert_eq!(
            (after.broken_links[0].from, after.broken_links[0].to),
            (a, b)
        );
        assert!(trip_connectivity(&severed, "51-1").unwrap().connected);
    }
}

#[test]
fn diameter_grows_with_the_window() {
    let dir = tempfile::tempdir().unwrap();
    let sc = Scenario {
        trips_per_line: 4,
        ..Scenario::default()
    };
    generate(&sc).unwrap().write_to(dir.path()).unwrap();
    let (store, _) = ingest_paths(
        dir.path(),
        &dir.path().join("pings.csv"),
        &IngestOptions::default(),
    )
    .unwrap();
    // Trajectory edges only point forward in time, so widening a window
    // can only add paths.
    let spec = ViewSpec::trajectory();
    let start = support::ts(support::DAY);
    let mut last = 0.0;
    for hours in 1..=24 {
        let w = TimeWindow::new(start, support::ts(support::DAY + hours * 3_600 - 1)).unwrap();
        let d = diameter(&spec.view(&store, &w), Weight::Wt).unwrap();
        assert!(d >= last, "{hours}h: {d} < {last}");
        last = d;
    }
    assert!(last > 0.0);
}
