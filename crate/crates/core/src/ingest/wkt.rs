//! Minimal WKT reader for `LINESTRING(lon lat, ...)`.

use crate::geo::GeoPoint;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WktError {
    #[error("expected LINESTRING(...), got {0:?}")]
    NotLineString(String),
    #[error("coordinate {0:?} is not a `lon lat` pair")]
    BadCoordinate(String),
    #[error("linestring has {0} point(s), needs at least 2")]
    TooFewPoints(usize),
    #[error("coordinate {lon} {lat} is out of range")]
    OutOfRange { lon: String, lat: String },
}

/// Parses a 2-D linestring. An optional `Z`/`M` tag and extra ordinates are
/// rejected rather than silently dropped.
pub fn parse_linestring(text: &str) -> Result<Vec<GeoPoint>, WktError> {
    let trimmed = text.trim();
    let body = strip_keyword(trimmed, "LINESTRING")
        .map(str::trim_start)
        .and_then(|rest| rest.strip_prefix('('))
        .and_then(|rest| rest.trim_end().strip_suffix(')'))
        .ok_or_else(|| WktError::NotLineString(truncate(trimmed)))?;

    let mut points = Vec::new();
    for pair in body.split(',') {
        let mut parts = pair.split_whitespace();
        let (Some(lon), Some(lat), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(WktError::BadCoordinate(truncate(pair.trim())));
        };
        let (Ok(x), Ok(y)) = (lon.parse::<f64>(), lat.parse::<f64>()) else {
            return Err(WktError::BadCoordinate(truncate(pair.trim())));
        };
        let p = GeoPoint::new(x, y);
        if !p.is_valid() {
            return Err(WktError::OutOfRange {
                lon: lon.to_owned(),
                lat: lat.to_owned(),
            });
        }
        points.push(p);
    }
    if points.len() < 2 {
        return Err(WktError::TooFewPoints(points.len()));
    }
    Ok(points)
}

/// Formats vertices as `LINESTRING(lon lat, ...)`.
pub fn format_linestring(points: &[GeoPoint]) -> String {
    let body: Vec<String> = points
        .iter()
        .map(|p| format!("{} {}", p.lon, p.lat))
        .collect();
    format!("LINESTRING({})", body.join(", "))
}

fn strip_keyword<'a>(text: &'a str, keyword: &str) -> Option<&'a str> {
    let head = text.get(..keyword.len())?;
    head.eq_ignore_ascii_case(keyword)
        .then(|| &text[keyword.len()..])
}

fn truncate(s: &str) -> String {
    s.chars().take(64).collect()
}
