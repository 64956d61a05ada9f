//! Network files and GPS pings to trip subgraphs.
//!
//! The pipeline is: [`feed::parse_feed`] groups pings per vehicle and route,
//! [`segment::segment_sessions`] cuts them into gap-delimited trips of Move and
//! Stop episodes, [`matching`] anchors episodes to the network and
//! [`build`] writes the trip subgraphs into a [`GraphStore`].

pub mod build;
pub mod feed;
pub mod matching;
pub mod network;
pub mod segment;
pub mod wkt;

use serde::{Deserialize, Serialize};

pub use crate::geo::haversine;
pub use build::{
    build_trip_graph, ingest_feed, insert_network, BuildError, IngestOptions, IngestReport,
    NetworkHandles, RejectedTrip, TripInput, TripSummary,
};
pub use feed::{parse_feed, ParsedFeed, Ping, VehicleRoute};
pub use matching::{match_episode, passing_bus_stop, Anchor, Hit, MatchRadii};
pub use network::{
    load_network, BusStop, CalendarEntry, FeatureClass, Intersection, NetworkContext, Route, Street,
};
pub use segment::{
    segment_sessions, segment_trip, split_sessions, Episode, EpisodeKind, SegmentParams,
};
pub use wkt::{format_linestring, parse_linestring, WktError};

use crate::store::StoreError;

/// A rejected input row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineIssue {
    pub table: String,
    /// 1-based, counting the header as line 1.
    pub line: u64,
    pub reason: String,
}

impl LineIssue {
    pub fn new(table: &str, line: u64, reason: impl Into<String>) -> Self {
        LineIssue {
            table: table.to_owned(),
            line,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{table}: unusable header: {reason}")]
    Header { table: &'static str, reason: String },
    #[error("{table}: duplicate id {id:?} on line {line}")]
    DuplicateId {
        table: &'static str,
        id: String,
        line: u64,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("store rejected ingest output: {0}")]
    Store(#[from] StoreError),
}

/// Locates each required column by name.
pub(crate) fn column_indices(
    table: &'static str,
    header: &csv::StringRecord,
    required: &[&str],
) -> Result<Vec<usize>, IngestError> {
    required
        .iter()
        .map(|name| {
            header
                .iter()
                .position(|h| h.trim().eq_ignore_ascii_case(name))
                .ok_or_else(|| IngestError::Header {
                    table,
                    reason: format!("missing column {name:?}"),
                })
        })
        .collect()
}

/// A fresh store holding the network in `network_dir` and every trip in the
/// ping file at `pings`.
pub fn ingest_paths(
    network_dir: &std::path::Path,
    pings: &std::path::Path,
    opts: &IngestOptions,
) -> Result<(crate::store::GraphStore, IngestReport), IngestError> {
    let ctx = load_network(network_dir, opts.radii.max())?;
    let file = std::fs::File::open(pings).map_err(|source| IngestError::Io {
        path: pings.display().to_string(),
        source,
    })?;
    let feed = parse_feed(std::io::BufReader::new(file))?;
    let mut store = crate::store::GraphStore::new();
    let mut handles = insert_network(&mut store, &ctx)?;
    let mut report = ingest_feed(&mut store, &ctx, &mut handles, &feed, opts)?;
    report
        .rejected_lines
        .splice(0..0, ctx.rejected.iter().cloned());
    Ok((store, report))
}
