//! One metric evaluated per window, and hour by hour across a day.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::store::GraphStore;
use crate::time::{TimeWindow, Timestamp};

use super::centrality::{
    betweenness_centrality, congestion_degree, degree_centrality, pagerank_centrality,
    view_betweenness, view_degree, view_pagerank, CentralityTable, EntityClass, ViewSpec,
};
use super::density::{density, Density};
use super::graph::Weight;
use super::pagerank::PageRankParams;
use super::paths::{longest_shortest_path, PathResult};
use super::MetricsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Degree,
    PageRank,
    Betweenness,
    Diameter,
    Density,
    Congestion,
}

impl MetricKind {
    pub const ALL: [MetricKind; 6] = [
        MetricKind::Degree,
        MetricKind::PageRank,
        MetricKind::Betweenness,
        MetricKind::Diameter,
        MetricKind::Density,
        MetricKind::Congestion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Degree => "degree",
            MetricKind::PageRank => "pagerank",
            MetricKind::Betweenness => "betweenness",
            MetricKind::Diameter => "diameter",
            MetricKind::Density => "density",
            MetricKind::Congestion => "congestion",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MetricKind::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown metric {s:?}"))
    }
}

/// Everything needed to evaluate a metric on a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRequest {
    pub metric: MetricKind,
    /// Entity-class form; `None` evaluates on the raw `view`.
    pub class: Option<EntityClass>,
    pub view: ViewSpec,
    /// Path weight for diameter and generic betweenness.
    pub weight: Weight,
    pub normalized: bool,
    pub top: Option<usize>,
    pub pagerank: PageRankParams,
}

impl MetricRequest {
    pub fn new(metric: MetricKind) -> Self {
        MetricRequest {
            metric,
            class: None,
            view: ViewSpec::default(),
            weight: Weight::Ws,
            normalized: false,
            top: None,
            pagerank: PageRankParams::default(),
        }
    }

    pub fn with_class(mut self, class: Option<EntityClass>) -> Self {
        self.class = class;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MetricOutput {
    Table(CentralityTable),
    Diameter {
        window: TimeWindow,
        weight: Weight,
        value: f64,
        path: Option<PathResult>,
    },
    Density {
        window: TimeWindow,
        #[serde(flatten)]
        density: Density,
        value: f64,
    },
}

impl MetricOutput {
    pub fn table(&self) -> Option<&CentralityTable> {
        match self {
            MetricOutput::Table(t) => Some(t),
            _ => None,
        }
    }

    /// The single number of a diameter or density result.
    pub fn value(&self) -> Option<f64> {
        match self {
            MetricOutput::Table(_) => None,
            MetricOutput::Diameter { value, .. } | MetricOutput::Density { value, .. } => {
                Some(*value)
            }
        }
    }
}

pub fn evaluate(
    store: &GraphStore,
    req: &MetricRequest,
    w: &TimeWindow,
) -> Result<MetricOutput, MetricsError> {
    let view = || req.view.view(store, w);
    let table = match (req.metric, req.class) {
        (MetricKind::Diameter, _) => {
            let path = longest_shortest_path(&view(), req.weight)?;
            let value = path.as_ref().map_or(0.0, |p| match req.weight {
                Weight::Ws => p.total_w_s,
                Weight::Wt => p.total_w_t as f64,
                Weight::Hops => p.hops as f64,
            });
            return Ok(MetricOutput::Diameter {
                window: *w,
                weight: req.weight,
                value,
                path,
            });
        }
        (MetricKind::Density, _) => {
            let d = density(&view());
            return Ok(MetricOutput::Density {
                window: *w,
                density: d,
                value: d.value(),
            });
        }
        (MetricKind::Congestion, Some(c)) if c != EntityClass::Street => {
            return Err(MetricsError::UnsupportedClass {
                metric: "congestion",
                class: c,
            })
        }
        (MetricKind::Congestion, _) => congestion_degree(store, w),
        (MetricKind::Degree, Some(c)) => degree_centrality(store, c, w),
        (MetricKind::Degree, None) => view_degree(&view()),
        (MetricKind::PageRank, Some(c)) => pagerank_centrality(store, c, w, &req.pagerank),
        (MetricKind::PageRank, None) => view_pagerank(&view(), &req.pagerank),
        (MetricKind::Betweenness, Some(c)) => betweenness_centrality(store, c, w, req.normalized),
        (MetricKind::Betweenness, None) => view_betweenness(&view(), req.weight, req.normalized)?,
    };
    Ok(MetricOutput::Table(table.truncate(req.top)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRow {
    pub hour: u32,
    pub result: MetricOutput,
}

/// Whole-hour window `day hour:00:00 ..= hour:59:59` in UTC.
pub fn hour_window(day: NaiveDate, hour: u32) -> Result<TimeWindow, MetricsError> {
    if hour > 23 {
        return Err(MetricsError::InvalidHours(format!(
            "hour {hour} is not 0..=23"
        )));
    }
    let start = day
        .and_hms_opt(hour, 0, 0)
        .map(|dt| Timestamp::from_unix(dt.and_utc().timestamp()))
        .ok_or_else(|| MetricsError::InvalidHours(format!("{day} {hour}")))?
        .map_err(|e| MetricsError::InvalidHours(e.to_string()))?;
    Ok(TimeWindow::span(start, crate::time::Level::Hour))
}

/// Parses `6:23` (inclusive) or a single hour `8`.
pub fn parse_hours(s: &str) -> Result<(u32, u32), MetricsError> {
    let bad = || MetricsError::InvalidHours(s.to_owned());
    let (a, b) = match s.split_once([':', '-', '.']) {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('.')),
        None => (s.trim(), s.trim()),
    };
    let from: u32 = a.parse().map_err(|_| bad())?;
    let to: u32 = b.parse().map_err(|_| bad())?;
    if from > to || to > 23 {
        return Err(bad());
    }
    Ok((from, to))
}

/// Evaluates `req` on each hour of `day` from `from` to `to` inclusive.
/// Hours run in parallel; rows come back in hour order.
pub fn hourly_sweep(
    store: &GraphStore,
    req: &MetricRequest,
    day: NaiveDate,
    from: u32,
    to: u32,
) -> Result<Vec<SweepRow>, MetricsError> {
    if from > to || to > 23 {
        return Err(MetricsError::InvalidHours(format!("{from}:{to}")));
    }
    (from..=to)
        .into_par_iter()
        .map(|hour| {
            let w = hour_window(day, hour)?;
            Ok(SweepRow {
                hour,
                result: evaluate(store, req, &w)?,
            })
        })
        .collect()
}

/// Average of one hour's scalar over several days.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HourMean {
    pub hour: u32,
    pub mean: f64,
    /// One value per day, in day order.
    pub values: Vec<f64>,
}

/// [`hourly_sweep`] on every day of `first..=last`, averaged per hour.
/// Only diameter and density have a scalar to average.
pub fn mean_sweep(
    store: &GraphStore,
    req: &MetricRequest,
    first: NaiveDate,
    last: NaiveDate,
    from: u32,
    to: u32,
) -> Result<Vec<HourMean>, MetricsError> {
    if !matches!(req.metric, MetricKind::Diameter | MetricKind::Density) {
        return Err(MetricsError::NotScalar(req.metric));
    }
    if last < first {
        return Err(MetricsError::InvertedDays { first, last });
    }
    let days: Vec<Vec<SweepRow>> = first
        .iter_days()
        .take_while(|d| *d <= last)
        .map(|d| hourly_sweep(store, req, d, from, to))
        .collect::<Result<_, _>>()?;
    Ok((from..=to)
        .enumerate()
        .map(|(i, hour)| {
            let values: Vec<f64> = days
                .iter()
                .map(|rows| rows[i].result.value().expect("scalar metric"))
                .collect();
            HourMean {
                hour,
                mean: values.iter().sum::<f64>() / values.len() as f64,
                values,
            }
        })
        .collect())
}
