//! Whether a trip's Origin, episode chain and Destination form one path.

use serde::{Deserialize, Serialize};

use crate::store::{EdgeLabel, GraphStore, NodeId, NodeLabel, TvgNode};
use crate::time::{TimeWindow, Timestamp};

use super::MetricsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnchorKind {
    BusStop,
    StreetSegment,
    StreetIntersection,
    Unmatched,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopEvent {
    pub seq: usize,
    pub node: NodeId,
    pub start: Timestamp,
    pub end: Option<Timestamp>,
    pub anchor_kind: AnchorKind,
    pub anchor: Option<NodeId>,
    pub anchor_id: Option<String>,
    pub anchor_name: Option<String>,
}

/// Episode `index` has no NEXT edge to episode `index + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrokenLink {
    pub index: usize,
    pub from: NodeId,
    pub to: NodeId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripReport {
    pub trip_id: String,
    pub trip: NodeId,
    pub connected: bool,
    /// Number of Move and Stop episodes.
    pub chain_length: usize,
    pub start: Timestamp,
    pub end: Option<Timestamp>,
    pub origin: Option<NodeId>,
    pub destination: Option<NodeId>,
    pub episodes: Vec<NodeId>,
    pub next_edges: usize,
    pub broken_links: Vec<BrokenLink>,
    /// Meters along the NEXT chain.
    pub total_w_s: f64,
    /// Seconds along the NEXT chain.
    pub total_w_t: i64,
    pub stops: Vec<StopEvent>,
}

pub fn find_trip(store: &GraphStore, trip_id: &str) -> Option<NodeId> {
    store
        .nodes_with_label(NodeLabel::Trip)
        .iter()
        .copied()
        .find(|n| store.node(*n).and_then(|t| t.text("trip_id")) == Some(trip_id))
}

fn single_target(store: &GraphStore, from: NodeId, label: EdgeLabel) -> Option<NodeId> {
    store
        .out_edges(from)
        .iter()
        .filter_map(|e| store.edge(*e))
        .find(|e| e.label == label)
        .map(|e| e.target)
}

/// Episodes carrying `trip_id`, found through the time-tree over the trip's
/// span and ordered by their `seq` property.
pub fn trip_episodes(store: &GraphStore, trip: &TvgNode, trip_id: &str) -> Vec<NodeId> {
    let Some(start) = trip.timestamp else {
        return Vec::new();
    };
    let end = trip
        .text("end")
        .and_then(|s| s.parse::<Timestamp>().ok())
        .unwrap_or(start)
        .max(start);
    let w = TimeWindow::new(start, end).expect("ordered");
    let mut eps: Vec<(i64, NodeId)> = store
        .events_in_window(&w, &[NodeLabel::Move, NodeLabel::Stop])
        .into_iter()
        .filter_map(|n| {
            let node = store.node(n)?;
            (node.text("trip_id") == Some(trip_id)).then(|| {
                (
                    node.property("seq")
                        .and_then(|s| s.as_i64())
                        .unwrap_or(i64::MAX),
                    n,
                )
            })
        })
        .collect();
    eps.sort_unstable();
    eps.into_iter().map(|(_, n)| n).collect()
}

fn stop_anchor(store: &GraphStore, stop: NodeId) -> (AnchorKind, Option<&TvgNode>) {
    for e in store.out_edges(stop).iter().filter_map(|e| store.edge(*e)) {
        let target = store.node(e.target).expect("endpoint");
        let kind = match (e.label, target.label) {
            (EdgeLabel::StoppedAt, NodeLabel::BusStop) => AnchorKind::BusStop,
            (EdgeLabel::LocatedOn, NodeLabel::StreetSegment) => AnchorKind::StreetSegment,
            (EdgeLabel::LocatedOn, NodeLabel::StreetIntersection) => AnchorKind::StreetIntersection,
            _ => continue,
        };
        return (kind, Some(target));
    }
    (AnchorKind::Unmatched, None)
}

/// Checks the trip's structure: STARTS_AT/ENDS_AT present and a NEXT edge
/// from every episode to its successor.
pub fn trip_connectivity(store: &GraphStore, trip_id: &str) -> Result<TripReport, MetricsError> {
    let trip =
        find_trip(store, trip_id).ok_or_else(|| MetricsError::UnknownTrip(trip_id.to_owned()))?;
    let node = store.node(trip).expect("found");
    let episodes = trip_episodes(store, node, trip_id);
    let origin = single_target(store, trip, EdgeLabel::StartsAt);
    let destination = single_target(store, trip, EdgeLabel::EndsAt);

    let mut broken_links = Vec::new();
    let mut next_edges = 0;
    let (mut total_w_s, mut total_w_t) = (0.0, 0);
    for (i, w) in episodes.windows(2).enumerate() {
        let link = store
            .out_edges(w[0])
            .iter()
            .filter_map(|e| store.edge(*e))
            .find(|e| e.label == EdgeLabel::Next && e.target == w[1]);
        match link {
            Some(e) => {
                next_edges += 1;
                total_w_s += e.w_s.unwrap_or(0.0);
                total_w_t += e.w_t.unwrap_or(0);
            }
            None => broken_links.push(BrokenLink {
                index: i,
                from: w[0],
                to: w[1],
            }),
        }
    }

    let stops = episodes
        .iter()
        .enumerate()
        .filter_map(|(seq, &n)| {
            let ep = store.node(n)?;
            (ep.label == NodeLabel::Stop).then(|| {
                let (anchor_kind, target) = stop_anchor(store, n);
                StopEvent {
                    seq,
                    node: n,
                    start: ep.timestamp.expect("stop has a timestamp"),
                    end: ep.text("end").and_then(|s| s.parse().ok()),
                    anchor_kind,
                    anchor: target.map(|t| t.id),
                    anchor_id: target.and_then(|t| t.text("ext_id")).map(str::to_owned),
                    anchor_name: target.map(|t| t.display_name()),
                }
            })
        })
        .collect();

    Ok(TripReport {
        trip_id: trip_id.to_owned(),
        trip,
        connected: origin.is_some()
            && destination.is_some()
            && !episodes.is_empty()
            && broken_links.is_empty(),
        chain_length: episodes.len(),
        start: node.timestamp.expect("trip has a timestamp"),
        end: node.text("end").and_then(|s| s.parse().ok()),
        origin,
        destination,
        episodes,
        next_edges,
        broken_links,
        total_w_s,
        total_w_t,
        stops,
    })
}
