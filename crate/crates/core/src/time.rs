//! UTC second-precision timestamps, inclusive windows and calendar levels.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime, TimeZone, Timelike, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Earliest representable instant: 0001-01-01T00:00:00Z.
const MIN_SECONDS: i64 = -62_135_596_800;
/// Latest representable instant: 9999-12-31T23:59:59Z.
const MAX_SECONDS: i64 = 253_402_300_799;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TimeError {
    #[error("malformed timestamp {0:?}: expected ISO-8601 such as 2016-06-09T08:00:05Z")]
    Parse(String),
    #[error("leap second in {0:?} is not supported")]
    LeapSecond(String),
    #[error("timestamp {0} s outside years 1..=9999")]
    OutOfRange(i64),
    #[error("window start {start} is after end {end}")]
    InvertedWindow { start: Timestamp, end: Timestamp },
}

/// A UTC instant truncated to whole seconds since the Unix epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(i64);

impl Timestamp {
    pub fn from_unix(seconds: i64) -> Result<Self, TimeError> {
        if (MIN_SECONDS..=MAX_SECONDS).contains(&seconds) {
            Ok(Timestamp(seconds))
        } else {
            Err(TimeError::OutOfRange(seconds))
        }
    }

    pub fn from_ymd_hms(
        year: i32,
        month: u32,
        day: u32,
        hour: u32,
        minute: u32,
        second: u32,
    ) -> Result<Self, TimeError> {
        let text = format!("{year:04}-{month:02}-{day:02}T{hour:02}:{minute:02}:{second:02}Z");
        Utc.with_ymd_and_hms(year, month, day, hour, minute, second)
            .single()
            .ok_or(TimeError::Parse(text))
            .and_then(|dt| Timestamp::from_unix(dt.timestamp()))
    }

    pub fn unix(self) -> i64 {
        self.0
    }

    /// Offsets by `seconds`, failing if the result leaves the supported range.
    pub fn offset(self, seconds: i64) -> Result<Self, TimeError> {
        Timestamp::from_unix(self.0.saturating_add(seconds))
    }

    pub fn datetime(self) -> DateTime<Utc> {
        DateTime::from_timestamp(self.0, 0).expect("range checked at construction")
    }

    /// Calendar components `[year, month, day, hour, minute, second]`.
    pub fn components(self) -> [i64; 6] {
        let dt = self.datetime();
        [
            i64::from(dt.year()),
            i64::from(dt.month()),
            i64::from(dt.day()),
            i64::from(dt.hour()),
            i64::from(dt.minute()),
            i64::from(dt.second()),
        ]
    }

    /// Start of the calendar span at `level` that contains this instant.
    pub fn truncate(self, level: Level) -> Timestamp {
        let dt = self.datetime();
        let date = dt.date_naive();
        let start = match level {
            Level::Root => return Timestamp(MIN_SECONDS),
            Level::Year => ymd(date.year(), 1, 1).and_hms_opt(0, 0, 0),
            Level::Month => ymd(date.year(), date.month(), 1).and_hms_opt(0, 0, 0),
            Level::Day => date.and_hms_opt(0, 0, 0),
            Level::Hour => date.and_hms_opt(dt.hour(), 0, 0),
            Level::Minute => date.and_hms_opt(dt.hour(), dt.minute(), 0),
            Level::Second => return self,
        };
        Timestamp(start.expect("valid calendar fields").and_utc().timestamp())
    }

    /// Last second of the span at `level` starting at `self.truncate(level)`.
    pub fn span_end(self, level: Level) -> Timestamp {
        let start = self.truncate(level);
        let date = start.datetime().date_naive();
        let next: Option<NaiveDateTime> = match level {
            Level::Root => return Timestamp(MAX_SECONDS),
            Level::Year => {
                NaiveDate::from_ymd_opt(date.year() + 1, 1, 1).and_then(|d| d.and_hms_opt(0, 0, 0))
            }
            Level::Month => {
                let (y, m) = if date.month() == 12 {
                    (date.year() + 1, 1)
                } else {
                    (date.year(), date.month() + 1)
                };
                NaiveDate::from_ymd_opt(y, m, 1).and_then(|d| d.and_hms_opt(0, 0, 0))
            }
            Level::Day => return Timestamp((start.0 + 86_399).min(MAX_SECONDS)),
            Level::Hour => return Timestamp((start.0 + 3_599).min(MAX_SECONDS)),
            Level::Minute => return Timestamp((start.0 + 59).min(MAX_SECONDS)),
            Level::Second => return start,
        };
        match next {
            Some(n) => Timestamp((n.and_utc().timestamp() - 1).min(MAX_SECONDS)),
            None => Timestamp(MAX_SECONDS),
        }
    }

    /// The calendar component at `level`: year, month 1-12, day 1-31, hour 0-23, ...
    pub fn component(self, level: Level) -> i64 {
        let c = self.components();
        match level {
            Level::Root => 0,
            Level::Year => c[0],
            Level::Month => c[1],
            Level::Day => c[2],
            Level::Hour => c[3],
            Level::Minute => c[4],
            Level::Second => c[5],
        }
    }
}

fn ymd(year: i32, month: u32, day: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(year, month, day).expect("valid calendar date")
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.datetime().format("%Y-%m-%dT%H:%M:%SZ"))
    }
}

impl FromStr for Timestamp {
    type Err = TimeError;

    /// Accepts RFC 3339 (any offset, normalized to UTC) or a bare
    /// `YYYY-MM-DDTHH:MM:SS` / `YYYY-MM-DD HH:MM:SS`, which is read as UTC.
    /// Fractional seconds are floored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let parsed: DateTime<Utc> = if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
            dt.with_timezone(&Utc)
        } else {
            let naive = NaiveDateTime::parse_from_str(text, "%Y-%m-%dT%H:%M:%S%.f")
                .or_else(|_| NaiveDateTime::parse_from_str(text, "%Y-%m-%d %H:%M:%S%.f"))
                .map_err(|_| TimeError::Parse(s.to_owned()))?;
            naive.and_utc()
        };
        if parsed.nanosecond() >= 1_000_000_000 {
            return Err(TimeError::LeapSecond(s.to_owned()));
        }
        Timestamp::from_unix(parsed.timestamp())
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Closed interval `[start, end]` of UTC seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimeWindow {
    start: Timestamp,
    end: Timestamp,
}

impl TimeWindow {
    pub fn new(start: Timestamp, end: Timestamp) -> Result<Self, TimeError> {
        if start > end {
            return Err(TimeError::InvertedWindow { start, end });
        }
        Ok(TimeWindow { start, end })
    }

    /// Every representable second.
    pub fn all() -> Self {
        TimeWindow {
            start: Timestamp(MIN_SECONDS),
            end: Timestamp(MAX_SECONDS),
        }
    }

    /// The calendar span at `level` containing `ts`.
    pub fn span(ts: Timestamp, level: Level) -> Self {
        TimeWindow {
            start: ts.truncate(level),
            end: ts.span_end(level),
        }
    }

    pub fn start(&self) -> Timestamp {
        self.start
    }

    pub fn end(&self) -> Timestamp {
        self.end
    }

    pub fn contains(&self, ts: Timestamp) -> bool {
        self.start <= ts && ts <= self.end
    }

    pub fn intersects(&self, other: &TimeWindow) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// Granularity of a time-tree node, coarsest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    Root,
    Year,
    Month,
    Day,
    Hour,
    Minute,
    Second,
}

impl Level {
    pub const ALL: [Level; 7] = [
        Level::Root,
        Level::Year,
        Level::Month,
        Level::Day,
        Level::Hour,
        Level::Minute,
        Level::Second,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn finer(self) -> Option<Level> {
        Level::ALL.get(self.index() + 1).copied()
    }

    pub fn coarser(self) -> Option<Level> {
        self.index().checked_sub(1).map(|i| Level::ALL[i])
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Level::ALL
            .iter()
            .copied()
            .find(|l| l.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown time level {s:?}"))
    }
}
