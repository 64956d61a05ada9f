//! Time-varying graph engine for bus-transit networks.
//!
//! The graph is one aggregated, time-indexed property graph: spatial nodes
//! (bus stops, streets, lines), temporal nodes (trips, calendar days) and
//! spatio-temporal nodes (moves, stops) joined by typed directed edges, with
//! every timestamped node hung from a sparse calendar [`time_tree`].
//!
//! - [`store`] holds the graph, validates it and answers windowed lookups.
//! - [`ingest`] turns network CSVs and GPS pings into trip subgraphs.
//! - [`metrics`] computes paths, centralities, density and sweeps over views.
//! - [`feedgen`] writes deterministic synthetic feeds with ground truth.

pub mod feedgen;
pub mod geo;
pub mod ingest;
pub mod metrics;
pub mod store;
pub mod time;
pub mod time_tree;

pub use geo::{haversine, GeoPoint};
pub use store::{
    Direction, EdgeClass, EdgeFields, EdgeId, EdgeLabel, GraphStore, NodeId, NodeKind, NodeLabel,
    Properties, Scalar, StoreError, SubgraphView, TvgEdge, TvgNode,
};
pub use time::{Level, TimeError, TimeWindow, Timestamp};
pub use time_tree::{InstantId, TimeInstant, TimeTree};
