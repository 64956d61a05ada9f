//! GPS ping feed: `vehicle_id,route_id,timestamp,lat,lon`.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::geo::GeoPoint;
use crate::time::Timestamp;

use super::{IngestError, LineIssue};

pub const FEED_COLUMNS: [&str; 5] = ["vehicle_id", "route_id", "timestamp", "lat", "lon"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ping {
    pub vehicle_id: String,
    pub route_id: String,
    pub ts: Timestamp,
    pub position: GeoPoint,
}

/// Pings for one vehicle on one route.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VehicleRoute {
    pub vehicle_id: String,
    pub route_id: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedFeed {
    /// Time-sorted pings per vehicle/route, keyed in lexical order.
    pub groups: BTreeMap<VehicleRoute, Vec<Ping>>,
    pub rejected: Vec<LineIssue>,
    pub warnings: Vec<String>,
}

impl ParsedFeed {
    pub fn ping_count(&self) -> usize {
        self.groups.values().map(Vec::len).sum()
    }
}

/// Reads a ping CSV. Malformed rows are collected in `rejected` with their
/// line number; only an unusable header is fatal. Groups whose rows arrived
/// out of time order are stably re-sorted and a warning is recorded.
pub fn parse_feed<R: Read>(input: R) -> Result<ParsedFeed, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = reader.headers().map_err(|e| IngestError::Header {
        table: "pings",
        reason: e.to_string(),
    })?;
    let columns = super::column_indices("pings", header, &FEED_COLUMNS)?;

    let mut feed = ParsedFeed::default();
    let mut unordered: BTreeMap<VehicleRoute, bool> = BTreeMap::new();
    for row in reader.records() {
        let record = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                feed.rejected
                    .push(LineIssue::new("pings", line, e.to_string()));
                continue;
            }
        };
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        match parse_ping(&record, &columns) {
            Ok(ping) => {
                let key = VehicleRoute {
                    vehicle_id: ping.vehicle_id.clone(),
                    route_id: ping.route_id.clone(),
                };
                let group = feed.groups.entry(key.clone()).or_default();
                if group.last().is_some_and(|last| last.ts > ping.ts) {
                    unordered.insert(key, true);
                }
                group.push(ping);
            }
            Err(reason) => feed.rejected.push(LineIssue::new("pings", line, reason)),
        }
    }
    for key in unordered.keys() {
        if let Some(group) = feed.groups.get_mut(key) {
            group.sort_by_key(|p| p.ts);
        }
        feed.warnings.push(format!(
            "pings for vehicle {} on route {} were out of time order and have been sorted",
            key.vehicle_id, key.route_id
        ));
    }
    Ok(feed)
}

fn parse_ping(record: &csv::StringRecord, columns: &[usize]) -> Result<Ping, String> {
    let field = |i: usize| {
        record
            .get(columns[i])
            .ok_or_else(|| format!("missing {}", FEED_COLUMNS[i]))
    };
    let vehicle_id = field(0)?;
    let route_id = field(1)?;
    if vehicle_id.is_empty() || route_id.is_empty() {
        return Err("empty vehicle_id or route_id".into());
    }
    let ts: Timestamp = field(2)?
        .parse()
        .map_err(|e: crate::time::TimeError| e.to_string())?;
    let lat: f64 = field(3)?
        .parse()
        .map_err(|_| format!("bad lat {:?}", field(3).unwrap_or("")))?;
    let lon: f64 = field(4)?
        .parse()
        .map_err(|_| format!("bad lon {:?}", field(4).unwrap_or("")))?;
    let position = GeoPoint::new(lon, lat);
    if !position.is_valid() {
        return Err(format!("coordinate lat={lat} lon={lon} out of range"));
    }
    Ok(Ping {
        vehicle_id: vehicle_id.to_owned(),
        route_id: route_id.to_owned(),
        ts,
        position,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "vehicle_id,route_id,timestamp,lat,lon\n";

    #[test]
    fn groups_well_formed_lines() {
        let text = format!(
            "{HEADER}v1,50,2016-06-09T08:00:00Z,46.09,-64.78\n\
             v1,50,2016-06-09T08:00:05Z,46.0901,-64.78\n\
             v1,50,2016-06-09T08:00:10Z,46.0902,-64.78\n"
        );
        let feed = parse_feed(text.as_bytes()).unwrap();
        assert_eq!(feed.groups.len(), 1);
        assert_eq!(feed.ping_count(), 3);
        assert!(feed.rejected.is_empty() && feed.warnings.is_empty());
    }

    #[test]
    fn reorders_and_warns() {
        let text = format!(
            "{HEADER}v1,50,2016-06-09T08:00:10Z,46.09,-64.78\n\
             v1,50,2016-06-09T08:00:00Z,46.09,-64.78\n\
             v2,51,2016-06-09T08:00:00Z,46.09,-64.78\n"
        );
        let feed = parse_feed(text.as_bytes()).unwrap();
        let g = feed.groups.values().next().unwrap();
        assert!(g[0].ts < g[1].ts);
        assert_eq!(feed.warnings.len(), 1);
    }

    #[test]
    fn rejects_out_of_range_latitude() {
        let text = format!(
            "{HEADER}v1,50,2016-06-09T08:00:00Z,95,-64.78\n\
             v1,50,2016-06-09T08:00:05Z,46.09,-64.78\n\
             v1,50,not-a-time,46.09,-64.78\n"
        );
        let feed = parse_feed(text.as_bytes()).unwrap();
        assert_eq!(feed.ping_count(), 1);
        assert_eq!(feed.rejected.len(), 2);
        assert_eq!(feed.rejected[0].line, 2);
        assert_eq!(feed.rejected[1].line, 4);
    }

    #[test]
    fn header_columns_may_be_reordered() {
        let text =
            "lon,lat,timestamp,route_id,vehicle_id\n-64.78,46.09,2016-06-09T08:00:00Z,50,v1\n";
        let feed = parse_feed(text.as_bytes()).unwrap();
        let p = &feed.groups.values().next().unwrap()[0];
        assert_eq!(p.position, GeoPoint::new(-64.78, 46.09));
    }

    #[test]
    fn missing_column_is_fatal() {
        let text = "vehicle_id,timestamp,lat,lon\nv1,2016-06-09T08:00:00Z,46,-64\n";
        assert!(matches!(
            parse_feed(text.as_bytes()),
            Err(IngestError::Header { .. })
        ));
    }
}
