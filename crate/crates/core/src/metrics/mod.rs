//! Graph metrics over windowed views: shortest paths and diameter, density,
//! degree, PageRank, betweenness, trip connectivity and hourly sweeps.
//!
//! Everything here is a pure function of an immutable store or view. The
//! numeric kernels run on a compact [`Digraph`] built from a view, indexed
//! by the view's sorted node ids, so results are deterministic under any
//! thread count.

pub mod betweenness;
pub mod centrality;
pub mod connectivity;
pub mod density;
pub mod export;
pub mod graph;
pub mod pagerank;
pub mod paths;
pub mod sweep;

use crate::store::NodeId;

pub use betweenness::{betweenness, normalize};
pub use centrality::{
    betweenness_centrality, congestion_degree, degree_centrality, pagerank_centrality,
    trips_with_episodes, view_betweenness, view_degree, view_pagerank, CentralityRow,
    CentralityTable, EntityClass, ViewSpec,
};
pub use connectivity::{
    find_trip, trip_connectivity, trip_episodes, AnchorKind, BrokenLink, StopEvent, TripReport,
};
pub use density::{density, Density};
pub use graph::{Arc, Digraph, Weight};
pub use pagerank::{pagerank, PageRank, PageRankParams};
pub use paths::{
    all_pairs, diameter, dijkstra, graph_diameter, longest_shortest_path, shortest_path,
    PathResult, ShortestTree,
};
pub use sweep::{
    evaluate, hour_window, hourly_sweep, mean_sweep, parse_hours, HourMean, MetricKind,
    MetricOutput, MetricRequest, SweepRow,
};

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("negative edge weight in view; shortest paths need w >= 0")]
    NegativeWeight,
    #[error("node {0} is not in the view")]
    NodeNotInView(NodeId),
    #[error("unknown trip {0:?}")]
    UnknownTrip(String),
    #[error("invalid hour range {0:?}")]
    InvalidHours(String),
    #[error("day range {first}..{last} is inverted")]
    InvertedDays {
        first: chrono::NaiveDate,
        last: chrono::NaiveDate,
    },
    #[error("{0} has no scalar value to average across days")]
    NotScalar(MetricKind),
    #[error("{metric} is not defined for class {class}")]
    UnsupportedClass {
        metric: &'static str,
        class: EntityClass,
    },
}
