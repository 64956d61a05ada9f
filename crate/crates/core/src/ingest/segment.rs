//! Ping sequences to Move and Stop episodes.

use serde::{Deserialize, Serialize};

use crate::geo::{haversine, GeoPoint};
use crate::time::Timestamp;

use super::feed::Ping;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentParams {
    /// m/s; a step slower than this is stationary.
    pub stop_speed: f64,
    /// Seconds a stationary run must last to count as a Stop.
    pub min_stop_duration: i64,
    /// A silence longer than this many seconds ends the trip.
    pub gap_split: i64,
}

impl Default for SegmentParams {
    fn default() -> Self {
        SegmentParams {
            stop_speed: 0.5,
            min_stop_duration: 10,
            gap_split: 600,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EpisodeKind {
    Move,
    Stop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub kind: EpisodeKind,
    pub start: Timestamp,
    pub end: Timestamp,
    /// Centroid for a Stop, the ping itself for a Move.
    pub position: GeoPoint,
    pub pings: Vec<Ping>,
}

impl Episode {
    pub fn duration(&self) -> i64 {
        self.end.unix() - self.start.unix()
    }
}

/// Cuts a sorted ping list wherever consecutive pings are more than
/// `gap_split` seconds apart.
pub fn split_sessions(pings: &[Ping], gap_split: i64) -> Vec<&[Ping]> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..pings.len() {
        if pings[i].ts.unix() - pings[i - 1].ts.unix() > gap_split {
            out.push(&pings[start..i]);
            start = i;
        }
    }
    if start < pings.len() {
        out.push(&pings[start..]);
    }
    out
}

/// Segments each gap-delimited session of `pings`.
pub fn segment_sessions(pings: &[Ping], params: &SegmentParams) -> Vec<Vec<Episode>> {
    split_sessions(pings, params.gap_split)
        .into_iter()
        .map(|s| segment_trip(s, params))
        .collect()
}

/// Stop/Move segmentation of one session.
///
/// A step between consecutive pings is stationary when its speed is below
/// `stop_speed` (a zero-length step always is). A maximal run of stationary
/// steps spanning at least `min_stop_duration` becomes one Stop; every other
/// ping becomes its own Move. Steps across a gap longer than `gap_split`
/// are never stationary, so a Stop never straddles a gap.
pub fn segment_trip(pings: &[Ping], params: &SegmentParams) -> Vec<Episode> {
    let slow: Vec<bool> = pings
        .windows(2)
        .map(|w| {
            let dt = w[1].ts.unix() - w[0].ts.unix();
            if dt > params.gap_split {
                return false;
            }
            let d = haversine(w[0].position, w[1].position);
            d == 0.0 || (dt > 0 && d / (dt as f64) < params.stop_speed)
        })
        .collect();

    let mut out = Vec::new();
    let mut i = 0;
    while i < pings.len() {
        // Steps i, i+1, ..., j-1 are stationary: pings i..=j form a run.
        let mut j = i;
        while j < slow.len() && slow[j] {
            j += 1;
        }
        if j > i && pings[j].ts.unix() - pings[i].ts.unix() >= params.min_stop_duration {
            let run = &pings[i..=j];
            let pts: Vec<GeoPoint> = run.iter().map(|p| p.position).collect();
            out.push(Episode {
                kind: EpisodeKind::Stop,
                start: run[0].ts,
                end: run[run.len() - 1].ts,
                position: GeoPoint::centroid(&pts).expect("run is nonempty"),
                pings: run.to_vec(),
            });
            i = j + 1;
        } else {
            out.push(Episode {
                kind: EpisodeKind::Move,
                start: pings[i].ts,
                end: pings[i].ts,
                position: pings[i].position,
                pings: vec![pings[i].clone()],
            });
            i += 1;
        }
    }
    out
}
