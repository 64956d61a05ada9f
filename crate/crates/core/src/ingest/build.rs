//! Writing the network and trip subgraphs into the store.

use std::collections::{BTreeMap, BTreeSet};

use chrono::Datelike;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geo::{haversine, GeoPoint};
use crate::store::{
    EdgeFields, EdgeLabel, GraphStore, NodeId, NodeKind, NodeLabel, Properties, Scalar, StoreError,
};
use crate::time::Timestamp;

use super::feed::ParsedFeed;
use super::matching::{match_episode, passing_bus_stop, Anchor, Hit, MatchRadii};
use super::network::NetworkContext;
use super::segment::{segment_sessions, Episode, EpisodeKind, SegmentParams};
use super::{IngestError, LineIssue};

/// Node ids of the network features, parallel to the context tables.
#[derive(Debug, Clone, Default)]
pub struct NetworkHandles {
    pub bus_stops: Vec<NodeId>,
    pub streets: Vec<NodeId>,
    pub intersections: Vec<NodeId>,
    pub lines: BTreeMap<String, NodeId>,
    calendars: BTreeMap<(String, String), NodeId>,
    line_position: Option<GeoPoint>,
    trips_per_route: BTreeMap<String, usize>,
}

fn props<const N: usize>(pairs: [(&str, Scalar); N]) -> Properties {
    pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
}

/// Inserts every network feature plus intersection-to-street incidence.
///
/// Lines have no geometry in the network files; their node sits at the
/// network centroid. A street node sits at the midpoint of its polyline.
pub fn insert_network(
    store: &mut GraphStore,
    ctx: &NetworkContext,
) -> Result<NetworkHandles, StoreError> {
    let mut h = NetworkHandles {
        line_position: ctx.centroid(),
        ..Default::default()
    };
    for s in &ctx.bus_stops {
        h.bus_stops.push(store.add_node(
            NodeLabel::BusStop,
            NodeKind::Spatial,
            Some(s.position),
            None,
            props([
                ("ext_id", s.id.as_str().into()),
                ("name", s.name.as_str().into()),
            ]),
        )?);
    }
    for s in &ctx.streets {
        let (mid, length) = polyline_midpoint(&s.polyline);
        h.streets.push(store.add_node(
            NodeLabel::StreetSegment,
            NodeKind::Spatial,
            Some(mid),
            None,
            props([
                ("ext_id", s.id.as_str().into()),
                ("name", s.name.as_str().into()),
                ("length_m", length.into()),
            ]),
        )?);
    }
    for x in &ctx.intersections {
        h.intersections.push(store.add_node(
            NodeLabel::StreetIntersection,
            NodeKind::Spatial,
            Some(x.position),
            None,
            props([("ext_id", x.id.as_str().into())]),
        )?);
    }
    for &(i, s) in &ctx.incidence {
        let d =
            crate::geo::point_to_polyline(ctx.intersections[i].position, &ctx.streets[s].polyline);
        store.add_edge(
            EdgeLabel::LocatedOn,
            h.intersections[i],
            h.streets[s],
            EdgeFields::spatial(d),
        )?;
    }
    for r in &ctx.routes {
        h.line_node(store, &r.id, &r.name)?;
    }
    Ok(h)
}

impl NetworkHandles {
    fn line_node(
        &mut self,
        store: &mut GraphStore,
        id: &str,
        name: &str,
    ) -> Result<NodeId, StoreError> {
        if let Some(n) = self.lines.get(id) {
            return Ok(*n);
        }
        let n = store.add_node(
            NodeLabel::Line,
            NodeKind::Spatial,
            Some(self.line_position.unwrap_or(GeoPoint::new(0.0, 0.0))),
            None,
            props([("ext_id", id.into()), ("name", name.into())]),
        )?;
        self.lines.insert(id.to_owned(), n);
        Ok(n)
    }

    /// Calendar node for the service running on `ts`'s date, created lazily.
    fn calendar_node(
        &mut self,
        store: &mut GraphStore,
        ctx: &NetworkContext,
        ts: Timestamp,
    ) -> Result<Option<NodeId>, StoreError> {
        let date = ts.datetime().date_naive();
        let Some(service) = ctx.service_for(date.weekday()) else {
            return Ok(None);
        };
        let key = (
            service.service_id.clone(),
            date.format("%Y-%m-%d").to_string(),
        );
        if let Some(n) = self.calendars.get(&key) {
            return Ok(Some(*n));
        }
        let n = store.add_node(
            NodeLabel::Calendar,
            NodeKind::Temporal,
            None,
            Some(ts.truncate(crate::time::Level::Day)),
            props([
                ("ext_id", format!("{}@{}", key.0, key.1).into()),
                ("service_id", key.0.as_str().into()),
                ("date", key.1.as_str().into()),
            ]),
        )?;
        self.calendars.insert(key, n);
        Ok(Some(n))
    }

    fn next_trip_id(&mut self, route: &str) -> String {
        let n = self.trips_per_route.entry(route.to_owned()).or_insert(0);
        *n += 1;
        format!("{route}-{n}")
    }
}

/// Point halfway along the polyline and the polyline length.
fn polyline_midpoint(pts: &[GeoPoint]) -> (GeoPoint, f64) {
    let legs: Vec<f64> = pts.windows(2).map(|w| haversine(w[0], w[1])).collect();
    let total: f64 = legs.iter().sum();
    let mut remaining = total / 2.0;
    for (w, len) in pts.windows(2).zip(&legs) {
        if remaining <= *len && *len > 0.0 {
            let t = remaining / len;
            let p = GeoPoint::new(
                w[0].lon + t * (w[1].lon - w[0].lon),
                w[0].lat + t * (w[1].lat - w[0].lat),
            );
            return (p, total);
        }
        remaining -= len;
    }
    (pts[0], total)
}

/// One segmented, matched trip awaiting insertion.
#[derive(Debug, Clone)]
pub struct TripInput {
    pub vehicle_id: String,
    pub route_id: String,
    pub episodes: Vec<Episode>,
    pub anchors: Vec<Anchor>,
    /// Bus stop passed within radius, per episode (Moves only).
    pub passing: Vec<Option<Hit>>,
}

impl TripInput {
    /// Anchors already segmented `episodes` against `ctx`.
    pub fn matched(
        vehicle_id: &str,
        route_id: &str,
        episodes: Vec<Episode>,
        ctx: &NetworkContext,
        radii: &MatchRadii,
    ) -> Self {
        let anchors = episodes
            .iter()
            .map(|e| match_episode(e, ctx, radii))
            .collect();
        let passing = episodes
            .iter()
            .map(|e| passing_bus_stop(e, ctx, radii))
            .collect();
        TripInput {
            vehicle_id: vehicle_id.to_owned(),
            route_id: route_id.to_owned(),
            episodes,
            anchors,
            passing,
        }
    }

    pub fn start(&self) -> Option<Timestamp> {
        self.episodes.first().map(|e| e.start)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error("trip has {0} episode(s), needs at least 2")]
    TooFewEpisodes(usize),
    #[error("{anchors} anchors and {passing} passing entries for {episodes} episodes")]
    Misaligned {
        episodes: usize,
        anchors: usize,
        passing: usize,
    },
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripSummary {
    pub trip_id: String,
    pub node: NodeId,
    pub vehicle_id: String,
    pub route_id: String,
    pub start: Timestamp,
    pub end: Timestamp,
    pub moves: usize,
    pub stops: usize,
    pub did_not_stop_at: usize,
}

/// Writes one trip subgraph and returns its summary.
///
/// Edges written: NEXT between consecutive episodes (`t_a`/`t_b` the two
/// episode starts, `w_s` their distance), STARTS_AT/ENDS_AT to the origin
/// and destination, HAS from the line (`w_s` the trip length), SCHEDULED_AT
/// to the day's calendar, LOCATED_ON/STOPPED_AT from anchors, ARRIVES_AT and
/// DEPARTS_AT per bus-stop Stop, DID_NOT_STOP_AT per Move passing a stop.
pub fn build_trip_graph(
    store: &mut GraphStore,
    ctx: &NetworkContext,
    handles: &mut NetworkHandles,
    trip: &TripInput,
    allowed_passing: Option<&BTreeSet<usize>>,
) -> Result<TripSummary, BuildError> {
    let eps = &trip.episodes;
    if eps.len() < 2 {
        return Err(BuildError::TooFewEpisodes(eps.len()));
    }
    if trip.anchors.len() != eps.len() || trip.passing.len() != eps.len() {
        return Err(BuildError::Misaligned {
            episodes: eps.len(),
            anchors: trip.anchors.len(),
            passing: trip.passing.len(),
        });
    }
    let start = eps[0].start;
    let end = eps[eps.len() - 1].end;
    let trip_id = handles.next_trip_id(&trip.route_id);
    let steps: Vec<f64> = eps
        .windows(2)
        .map(|w| haversine(w[0].position, w[1].position))
        .collect();
    let length: f64 = steps.iter().sum();

    let trip_node = store.add_node(
        NodeLabel::Trip,
        NodeKind::Temporal,
        None,
        Some(start),
        props([
            ("ext_id", trip_id.as_str().into()),
            ("trip_id", trip_id.as_str().into()),
            ("vehicle_id", trip.vehicle_id.as_str().into()),
            ("route_id", trip.route_id.as_str().into()),
            ("end", end.to_string().into()),
            ("episodes", (eps.len() as i64).into()),
        ]),
    )?;
    let tagged = |extra: Vec<(&str, Scalar)>| {
        let mut p = props([("trip_id", trip_id.as_str().into())]);
        p.extend(extra.into_iter().map(|(k, v)| (k.to_owned(), v)));
        p
    };
    let origin = store.add_node(
        NodeLabel::TripOrigin,
        NodeKind::SpatioTemporal,
        Some(eps[0].position),
        Some(start),
        tagged(vec![]),
    )?;
    let destination = store.add_node(
        NodeLabel::TripDestination,
        NodeKind::SpatioTemporal,
        Some(eps[eps.len() - 1].position),
        Some(end),
        tagged(vec![]),
    )?;

    let mut episode_nodes = Vec::with_capacity(eps.len());
    for (seq, e) in eps.iter().enumerate() {
        let (label, extra) = match e.kind {
            EpisodeKind::Move => (NodeLabel::Move, vec![("seq", (seq as i64).into())]),
            EpisodeKind::Stop => (
                NodeLabel::Stop,
                vec![
                    ("seq", (seq as i64).into()),
                    ("end", e.end.to_string().into()),
                    ("dwell_s", e.duration().into()),
                    ("pings", (e.pings.len() as i64).into()),
                ],
            ),
        };
        episode_nodes.push(store.add_node(
            label,
            NodeKind::SpatioTemporal,
            Some(e.position),
            Some(e.start),
            tagged(extra),
        )?);
    }

    for (i, w) in episode_nodes.windows(2).enumerate() {
        store.add_edge(
            EdgeLabel::Next,
            w[0],
            w[1],
            EdgeFields::spatio_temporal(eps[i].start, eps[i + 1].start, steps[i]),
        )?;
    }
    store.add_edge(
        EdgeLabel::StartsAt,
        trip_node,
        origin,
        EdgeFields::temporal(start, start),
    )?;
    store.add_edge(
        EdgeLabel::EndsAt,
        trip_node,
        destination,
        EdgeFields::temporal(start, end),
    )?;

    let route_name = ctx
        .route(&trip.route_id)
        .map(|r| r.name.clone())
        .unwrap_or_else(|| trip.route_id.clone());
    let line = handles.line_node(store, &trip.route_id, &route_name)?;
    store.add_edge(EdgeLabel::Has, line, trip_node, EdgeFields::spatial(length))?;
    if let Some(cal) = handles.calendar_node(store, ctx, start)? {
        store.add_edge(
            EdgeLabel::ScheduledAt,
            trip_node,
            cal,
            EdgeFields::temporal(start, start),
        )?;
    }

    let mut skipped = 0;
    for (i, e) in eps.iter().enumerate() {
        let node = episode_nodes[i];
        match trip.anchors[i] {
            Anchor::BusStop(h) => {
                let stop = handles.bus_stops[h.index];
                store.add_edge(
                    EdgeLabel::StoppedAt,
                    node,
                    stop,
                    EdgeFields::spatial(h.distance),
                )?;
                store.add_edge(
                    EdgeLabel::ArrivesAt,
                    trip_node,
                    stop,
                    EdgeFields::temporal(start, e.start),
                )?;
                store.add_edge(
                    EdgeLabel::DepartsAt,
                    trip_node,
                    stop,
                    EdgeFields::temporal(start, e.end),
                )?;
            }
            Anchor::StreetSegment(h) => {
                store.add_edge(
                    EdgeLabel::LocatedOn,
                    node,
                    handles.streets[h.index],
                    EdgeFields::spatial(h.distance),
                )?;
            }
            Anchor::StreetIntersection(h) => {
                store.add_edge(
                    EdgeLabel::LocatedOn,
                    node,
                    handles.intersections[h.index],
                    EdgeFields::spatial(h.distance),
                )?;
            }
            Anchor::Unmatched => {}
        }
        if let Some(h) = trip.passing[i] {
            if allowed_passing.is_none_or(|s| s.contains(&h.index)) {
                store.add_edge(
                    EdgeLabel::DidNotStopAt,
                    node,
                    handles.bus_stops[h.index],
                    EdgeFields::spatial(h.distance),
                )?;
                skipped += 1;
            }
        }
    }

    Ok(TripSummary {
        trip_id,
        node: trip_node,
        vehicle_id: trip.vehicle_id.clone(),
        route_id: trip.route_id.clone(),
        start,
        end,
        moves: eps.iter().filter(|e| e.kind == EpisodeKind::Move).count(),
        stops: eps.iter().filter(|e| e.kind == EpisodeKind::Stop).count(),
        did_not_stop_at: skipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IngestOptions {
    pub segment: SegmentParams,
    pub radii: MatchRadii,
    /// Only emit DID_NOT_STOP_AT towards bus stops that some trip of the
    /// same route stopped at in this feed.
    pub served_stops_only: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedTrip {
    pub vehicle_id: String,
    pub route_id: String,
    pub start: Option<Timestamp>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub pings: usize,
    pub trips: Vec<TripSummary>,
    pub rejected_trips: Vec<RejectedTrip>,
    pub rejected_lines: Vec<LineIssue>,
    pub warnings: Vec<String>,
}

/// Segments and matches every vehicle group in parallel, then inserts trips
/// one at a time ordered by route, start time and vehicle, so trip numbering
/// and node ids do not depend on thread scheduling.
pub fn ingest_feed(
    store: &mut GraphStore,
    ctx: &NetworkContext,
    handles: &mut NetworkHandles,
    feed: &ParsedFeed,
    opts: &IngestOptions,
) -> Result<IngestReport, IngestError> {
    let groups: Vec<_> = feed.groups.iter().collect();
    let mut trips: Vec<TripInput> = groups
        .par_iter()
        .flat_map_iter(|(key, pings)| {
            segment_sessions(pings, &opts.segment)
                .into_iter()
                .map(|eps| {
                    TripInput::matched(&key.vehicle_id, &key.route_id, eps, ctx, &opts.radii)
                })
        })
        .collect();
    trips.sort_by(|a, b| {
        (&a.route_id, a.start(), &a.vehicle_id).cmp(&(&b.route_id, b.start(), &b.vehicle_id))
    });

    let served: Option<BTreeMap<&str, BTreeSet<usize>>> = opts.served_stops_only.then(|| {
        let mut m: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
        for t in &trips {
            let set = m.entry(t.route_id.as_str()).or_default();
            set.extend(t.anchors.iter().filter_map(|a| match a {
                Anchor::BusStop(h) => Some(h.index),
                _ => None,
            }));
        }
        m
    });
    let empty = BTreeSet::new();

    let mut report = IngestReport {
        pings: feed.ping_count(),
        rejected_lines: feed.rejected.clone(),
        warnings: feed.warnings.clone(),
        ..Default::default()
    };
    for t in &trips {
        let allowed = served
            .as_ref()
            .map(|m| m.get(t.route_id.as_str()).unwrap_or(&empty));
        match build_trip_graph(store, ctx, handles, t, allowed) {
            Ok(summary) => report.trips.push(summary),
            Err(BuildError::Store(e)) => return Err(IngestError::Store(e)),
            Err(e) => report.rejected_trips.push(RejectedTrip {
                vehicle_id: t.vehicle_id.clone(),
                route_id: t.route_id.clone(),
                start: t.start(),
                reason: e.to_string(),
            }),
        }
    }
    Ok(report)
}
