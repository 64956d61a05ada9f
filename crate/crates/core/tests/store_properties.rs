//! Time-tree lookups, journal round-trips and the window scan bound.

mod support;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;
use support::*;
use tvg_core::{EdgeClass, GraphStore, NodeLabel, TimeTree, Timestamp};

const EPISODES: [NodeLabel; 2] = [NodeLabel::Move, NodeLabel::Stop];

proptest! {
    #[test]
    fn resolve_window_is_a_filter(
        instants in prop::collection::vec(0i64..200_000, 0..300),
        a in -1_000i64..201_000,
        len in 0i64..50_000,
    ) {
        let mut tree = TimeTree::new();
        for t in &instants {
            tree.ensure_instant(ts(DAY + t));
        }
        let w = window(DAY + a, DAY + a + len);
        let got: Vec<Timestamp> = tree.resolve_window(&w).iter().map(|i| i.utc_key).collect();
        let want: Vec<Timestamp> = instants
            .iter()
            .map(|t| ts(DAY + t))
            .filter(|t| w.contains(*t))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn insertion_order_does_not_change_the_tree(mut instants in prop::collection::vec(0i64..10_000_000, 1..100)) {
        let build = |v: &[i64]| {
            let mut t = TimeTree::new();
            for x in v {
                t.ensure_instant(ts(DAY + x));
            }
            t.shape()
        };
        let a = build(&instants);
        instants.reverse();
        prop_assert_eq!(a, build(&instants));
    }
}

#[test]
fn events_in_window_match_linear_scan() {
    let mut r = rng(11);
    let store = random_event_store(&mut r, 2_000, DAY, DAY + 86_399);
    for _ in 0..200 {
        let w = random_window(&mut r, DAY, DAY + 86_399);
        let mut got = store.events_in_window(&w, &EPISODES);
        got.sort_unstable();
        assert_eq!(got, scan_events(&store, &w, &EPISODES), "{w}");
    }
}

#[test]
fn journal_round_trip_rederives_classes() {
    let mut r = rng(12);
    let store = random_edge_store(&mut r, 2_000);
    let mut buf = Vec::new();
    store.write_journal(&mut buf).unwrap();
    let back = GraphStore::replay(buf.as_slice()).unwrap();
    assert_eq!(back.edges(), store.edges());
    assert_eq!(back.nodes(), store.nodes());
    for e in back.edges() {
        assert_eq!(e.derived_class(), Some(e.class));
        assert_eq!(e.label.rule().class, Some(e.class));
    }
    let classes: BTreeSet<EdgeClass> = back.edges().iter().map(|e| e.class).collect();
    assert_eq!(classes.len(), 3);
}

#[test]
fn tampered_class_is_rejected() {
    let mut r = rng(13);
    let store = random_edge_store(&mut r, 20);
    let mut buf = Vec::new();
    store.write_journal(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let bad = text.replacen("\"class\":\"Spatial\"", "\"class\":\"Temporal\"", 1);
    assert!(GraphStore::replay(bad.as_bytes()).is_err());
}

#[test]
fn scan_cost_ignores_events_outside_the_window() {
    let w = window(DAY + 3_600, DAY + 3_659);
    let mut r = rng(14);
    let mut store = GraphStore::new();
    for k in 0..60 {
        add_episode(&mut store, &mut r, NodeLabel::Move, DAY + 3_600 + k);
    }
    let base = store.scan_window(&w, &EPISODES);
    for _ in 0..10 {
        for _ in 0..5_000 {
            let t = if r.random_bool(0.5) {
                DAY + r.random_range(0..3_600)
            } else {
                DAY + r.random_range(3_660..86_400)
            };
            add_episode(&mut store, &mut r, NodeLabel::Move, t);
        }
        let scan = store.scan_window(&w, &EPISODES);
        assert_eq!(scan.nodes, base.nodes);
        assert_eq!(scan.leaves_visited, base.leaves_visited);
        assert_eq!(scan.nodes_touched, base.nodes_touched);
        assert!(scan.nodes_touched <= scan.leaves_visited + scan.nodes.len());
    }
}
