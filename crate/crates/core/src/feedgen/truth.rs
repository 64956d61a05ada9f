use std::collections::BTreeMap;

use chrono::Timelike;
use serde::{Deserialize, Serialize};

use crate::ingest::EpisodeKind;
use crate::metrics::AnchorKind;
use crate::time::Timestamp;

use super::{Planted, Scenario, SimTrip, TRIP_GAP_OUTAGE_S};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthAnchor {
    pub kind: AnchorKind,
    pub id: String,
}

impl TruthAnchor {
    pub(super) fn new(kind: AnchorKind, id: &str) -> Self {
        TruthAnchor {
            kind,
            id: id.to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthEpisode {
    pub kind: EpisodeKind,
    pub start: Timestamp,
    pub end: Timestamp,
    pub pings: usize,
    pub anchor: TruthAnchor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthTrip {
    pub trip_id: String,
    pub vehicle_id: String,
    pub route_id: String,
    pub start: Timestamp,
    pub end: Timestamp,
    /// Stops passed at full speed; each yields one DID_NOT_STOP_AT.
    pub did_not_stop_at: Vec<String>,
    pub episodes: Vec<TruthEpisode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlantedAnomaly {
    SkipStop {
        trip_id: String,
        stop_id: String,
        at: Timestamp,
    },
    CongestionStop {
        trip_id: String,
        street_id: String,
        start: Timestamp,
        end: Timestamp,
    },
    IntersectionStop {
        trip_id: String,
        intersection_id: String,
        start: Timestamp,
        end: Timestamp,
    },
    TripGap {
        before: String,
        after: String,
        stop_id: String,
        outage_s: i64,
    },
}

/// hour -> entity id -> count; entities with a zero count are left out.
pub type HourTable = BTreeMap<u32, BTreeMap<String, u64>>;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedTables {
    pub trips: usize,
    pub did_not_stop_at: usize,
    /// Moves on each street.
    pub street_degree: HourTable,
    /// Stops on each street, intersection stops counted on every street through it.
    pub congestion: HourTable,
    /// Stops at each bus stop.
    pub bus_stop_degree: HourTable,
    /// Trips starting on each line.
    pub line_degree: HourTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruth {
    pub scenario: Scenario,
    pub trips: Vec<TruthTrip>,
    pub anomalies: Vec<PlantedAnomaly>,
    pub expected: ExpectedTables,
}

impl GroundTruth {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("ground truth serializes");
        s.push('\n');
        s
    }

    pub fn trip(&self, id: &str) -> Option<&TruthTrip> {
        self.trips.iter().find(|t| t.trip_id == id)
    }
}

pub(super) struct LineMeta {
    pub route_id: String,
    pub vehicle_id: String,
}

fn ts(t: i64) -> Timestamp {
    Timestamp::from_unix(t).expect("scenario times are in range")
}

fn bump(table: &mut HourTable, hour: u32, id: &str) {
    *table
        .entry(hour)
        .or_default()
        .entry(id.to_owned())
        .or_default() += 1;
}

/// Numbers the simulated runs per route in start order and tallies the tables.
pub(super) fn build(
    sc: &Scenario,
    lines: &[LineMeta],
    intersection_streets: &BTreeMap<String, Vec<String>>,
    runs: Vec<SimTrip>,
) -> GroundTruth {
    let mut counters: BTreeMap<usize, usize> = BTreeMap::new();
    let ids: Vec<String> = runs
        .iter()
        .map(|r| {
            let n = counters.entry(r.line).or_insert(0);
            *n += 1;
            format!("{}-{n}", lines[r.line].route_id)
        })
        .collect();

    let mut trips = Vec::with_capacity(runs.len());
    let mut anomalies = Vec::new();
    let mut expected = ExpectedTables::default();
    for (i, run) in runs.iter().enumerate() {
        let line = &lines[run.line];
        let trip_id = ids[i].clone();
        let episodes: Vec<TruthEpisode> = run
            .episodes
            .iter()
            .map(|e| TruthEpisode {
                kind: e.kind,
                start: ts(e.start),
                end: ts(e.end),
                pings: e.pings,
                anchor: e.anchor.clone(),
            })
            .collect();
        for e in &episodes {
            let hour = e.start.datetime().hour();
            match (e.kind, e.anchor.kind) {
                (EpisodeKind::Move, AnchorKind::StreetSegment) => {
                    bump(&mut expected.street_degree, hour, &e.anchor.id)
                }
                (EpisodeKind::Stop, AnchorKind::StreetSegment) => {
                    bump(&mut expected.congestion, hour, &e.anchor.id)
                }
                (EpisodeKind::Stop, AnchorKind::StreetIntersection) => {
                    for s in &intersection_streets[&e.anchor.id] {
                        bump(&mut expected.congestion, hour, s);
                    }
                }
                (EpisodeKind::Stop, AnchorKind::BusStop) => {
                    bump(&mut expected.bus_stop_degree, hour, &e.anchor.id)
                }
                _ => {}
            }
        }
        let start = episodes.first().expect("runs are nonempty").start;
        let end = episodes.last().expect("runs are nonempty").end;
        bump(
            &mut expected.line_degree,
            start.datetime().hour(),
            &line.route_id,
        );
        expected.did_not_stop_at += run.skipped.len();

        for (kind, id, a, b) in &run.planted {
            anomalies.push(match kind {
                Planted::Skip => PlantedAnomaly::SkipStop {
                    trip_id: trip_id.clone(),
                    stop_id: id.clone(),
                    at: ts(*a),
                },
                Planted::Congestion => PlantedAnomaly::CongestionStop {
                    trip_id: trip_id.clone(),
                    street_id: id.clone(),
                    start: ts(*a),
                    end: ts(*b),
                },
                Planted::Intersection => PlantedAnomaly::IntersectionStop {
                    trip_id: trip_id.clone(),
                    intersection_id: id.clone(),
                    start: ts(*a),
                    end: ts(*b),
                },
                Planted::Gap => PlantedAnomaly::TripGap {
                    before: trip_id.clone(),
                    after: ids[i + 1].clone(),
                    stop_id: id.clone(),
                    outage_s: TRIP_GAP_OUTAGE_S,
                },
            });
        }
        trips.push(TruthTrip {
            trip_id,
            vehicle_id: line.vehicle_id.clone(),
            route_id: line.route_id.clone(),
            start,
            end,
            did_not_stop_at: run.skipped.iter().map(|s| s.0.clone()).collect(),
            episodes,
        });
    }
    expected.trips = trips.len();
    GroundTruth {
        scenario: sc.clone(),
        trips,
        anomalies,
        expected,
    }
}
