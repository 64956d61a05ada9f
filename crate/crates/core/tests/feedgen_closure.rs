//! Ingesting generated feeds reproduces their ground truth.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use tvg_core::feedgen::{generate, Anomalies, GroundTruth, HourTable, PlantedAnomaly, Scenario};
use tvg_core::ingest::{ingest_paths, EpisodeKind, IngestOptions, IngestReport};
use tvg_core::metrics::{
    congestion_degree, degree_centrality, hour_window, trip_connectivity, AnchorKind,
    CentralityTable, EntityClass,
};
use tvg_core::{EdgeLabel, GraphStore, NodeLabel};

fn ingest(sc: &Scenario) -> (GroundTruth, GraphStore, IngestReport, tempfile::TempDir) {
    let g = generate(sc).unwrap();
    let dir = tempfile::tempdir().unwrap();
    g.write_to(dir.path()).unwrap();
    let (store, report) = ingest_paths(
        dir.path(),
        &dir.path().join("pings.csv"),
        &IngestOptions::default(),
    )
    .unwrap();
    (g.truth, store, report, dir)
}

fn nonzero(t: &CentralityTable) -> BTreeMap<String, u64> {
    t.rows
        .iter()
        .filter(|r| r.score != 0.0)
        .map(|r| (r.id.clone(), r.score as u64))
        .collect()
}

fn check_table(
    day: NaiveDate,
    expected: &HourTable,
    f: impl Fn(&tvg_core::TimeWindow) -> CentralityTable,
) {
    for hour in 0..24 {
        let w = hour_window(day, hour).unwrap();
        let got = nonzero(&f(&w));
        let want = expected.get(&hour).cloned().unwrap_or_default();
        assert_eq!(got, want, "hour {hour}");
    }
}

fn anchor_of(store: &GraphStore, ep: tvg_core::NodeId) -> (AnchorKind, String) {
    for e in store.out_edges(ep).iter().map(|e| store.edge(*e).unwrap()) {
        let t = store.node(e.target).unwrap();
        let kind = match (e.label, t.label) {
            (EdgeLabel::StoppedAt, NodeLabel::BusStop) => AnchorKind::BusStop,
            (EdgeLabel::LocatedOn, NodeLabel::StreetSegment) => AnchorKind::StreetSegment,
            (EdgeLabel::LocatedOn, NodeLabel::StreetIntersection) => AnchorKind::StreetIntersection,
            _ => continue,
        };
        return (kind, t.text("ext_id").unwrap().to_owned());
    }
    (AnchorKind::Unmatched, String::new())
}

fn check_closure(sc: &Scenario) -> GroundTruth {
    let (truth, store, report, _dir) = ingest(sc);
    assert!(
        report.rejected_trips.is_empty(),
        "{:?}",
        report.rejected_trips
    );
    assert!(
        report.rejected_lines.is_empty(),
        "{:?}",
        report.rejected_lines
    );
    assert_eq!(report.trips.len(), truth.expected.trips);

    for (got, want) in report.trips.iter().zip(&truth.trips) {
        assert_eq!(got.trip_id, want.trip_id);
        assert_eq!(
            got.did_not_stop_at,
            want.did_not_stop_at.len(),
            "{}",
            want.trip_id
        );
        let r = trip_connectivity(&store, &want.trip_id).unwrap();
        assert!(r.connected, "{}", want.trip_id);
        assert_eq!(r.episodes.len(), want.episodes.len(), "{}", want.trip_id);
        for (n, e) in r.episodes.iter().zip(&want.episodes) {
            let node = store.node(*n).unwrap();
            let kind = if node.label == NodeLabel::Stop {
                EpisodeKind::Stop
            } else {
                EpisodeKind::Move
            };
            assert_eq!(kind, e.kind);
            assert_eq!(node.timestamp, Some(e.start));
            if kind == EpisodeKind::Stop {
                assert_eq!(node.text("end"), Some(e.end.to_string().as_str()));
            }
            assert_eq!(anchor_of(&store, *n), (e.anchor.kind, e.anchor.id.clone()));
        }
    }

    let dnsa = store
        .edges()
        .iter()
        .filter(|e| e.label == EdgeLabel::DidNotStopAt)
        .count();
    assert_eq!(dnsa, truth.expected.did_not_stop_at);

    let day = sc.date;
    let ex = &truth.expected;
    check_table(day, &ex.street_degree, |w| {
        degree_centrality(&store, EntityClass::Street, w)
    });
    check_table(day, &ex.bus_stop_degree, |w| {
        degree_centrality(&store, EntityClass::BusStop, w)
    });
    check_table(day, &ex.line_degree, |w| {
        degree_centrality(&store, EntityClass::Line, w)
    });
    check_table(day, &ex.congestion, |w| congestion_degree(&store, w));
    truth
}

#[test]
fn seed_42_closes() {
    let truth = check_closure(&Scenario::default());
    let planted = &truth.anomalies;
    let count = |f: fn(&PlantedAnomaly) -> bool| planted.iter().filter(|a| f(a)).count();
    assert_eq!(count(|a| matches!(a, PlantedAnomaly::SkipStop { .. })), 3);
    assert_eq!(count(|a| matches!(a, PlantedAnomaly::TripGap { .. })), 1);
    assert_eq!(truth.expected.did_not_stop_at, 3);
    // One extra trip from the gap.
    assert_eq!(truth.expected.trips, 3 * 18 + 1);
}

#[test]
fn other_seeds_close() {
    for seed in [1, 7, 2016] {
        check_closure(&Scenario {
            seed,
            anomalies: Anomalies {
                skip_stops: 5,
                congestion_stops: 5,
                intersection_stops: 5,
                trip_gaps: 2,
            },
            trips_per_line: 6,
            ..Scenario::default()
        });
    }
}

#[test]
fn one_line_three_stops() {
    let sc = Scenario {
        lines: 1,
        stops: 3,
        trips_per_line: 1,
        anomalies: Anomalies::none(),
        ..Scenario::default()
    };
    let truth = check_closure(&sc);
    assert_eq!(truth.trips.len(), 1);
    let stops = truth.trips[0]
        .episodes
        .iter()
        .filter(|e| e.kind == EpisodeKind::Stop)
        .count();
    assert_eq!(stops, 3);
}

#[test]
fn intersection_stop_shows_in_trip_report() {
    let (truth, store, _, _dir) = ingest(&Scenario::default());
    let trip = truth
        .anomalies
        .iter()
        .find_map(|a| match a {
            PlantedAnomaly::IntersectionStop { trip_id, .. } => Some(trip_id.clone()),
            _ => None,
        })
        .unwrap();
    let r = trip_connectivity(&store, &trip).unwrap();
    assert!(r
        .stops
        .iter()
        .any(|s| s.anchor_kind == AnchorKind::StreetIntersection));
}

#[test]
fn same_seed_same_bytes() {
    use sha2::{Digest, Sha256};
    let digest = |g: &tvg_core::feedgen::Generated| {
        let mut h = Sha256::new();
        for (name, body) in &g.files {
            h.update(name.as_bytes());
            h.update(body.as_bytes());
        }
        h.finalize()
    };
    let a = generate(&Scenario::default()).unwrap();
    let b = generate(&Scenario::default()).unwrap();
    assert_eq!(digest(&a), digest(&b));
    let c = generate(&Scenario {
        seed: 43,
        ..Scenario::default()
    })
    .unwrap();
    assert_ne!(digest(&a), digest(&c));
}

#[test]
fn ping_steps_respect_cruise_speed() {
    let sc = Scenario::default();
    let g = generate(&sc).unwrap();
    let limit = sc.cruise_speed * sc.ping_period_s as f64 + 0.5;
    for w in g.pings.windows(2) {
        if w[0].vehicle_id != w[1].vehicle_id {
            continue;
        }
        let d = tvg_core::haversine(w[0].position, w[1].position);
        assert!(d <= limit, "{d} m between {} and {}", w[0].ts, w[1].ts);
    }
}

#[test]
fn ping_order_does_not_change_the_journal() {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    let sc = Scenario {
        trips_per_line: 4,
        ..Scenario::default()
    };
    let g = generate(&sc).unwrap();
    let dir = tempfile::tempdir().unwrap();
    g.write_to(dir.path()).unwrap();
    let journal = |pings: &std::path::Path| {
        let (store, _) = ingest_paths(dir.path(), pings, &IngestOptions::default()).unwrap();
        let mut buf = Vec::new();
        store.write_journal(&mut buf).unwrap();
        buf
    };
    let sorted = journal(&dir.path().join("pings.csv"));

    let text = &g.files[tvg_core::feedgen::Generated::PINGS];
    let mut lines: Vec<&str> = text.lines().collect();
    let header = lines.remove(0);
    lines.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(9));
    let shuffled = dir.path().join("shuffled.csv");
    std::fs::write(&shuffled, format!("{header}\n{}\n", lines.join("\n"))).unwrap();
    assert_eq!(journal(&shuffled), sorted);
}
