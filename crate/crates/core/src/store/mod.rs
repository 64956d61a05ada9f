//! The typed temporal property graph.
//!
//! Nodes and edges are validated against [`schema`] on insertion. Every node
//! carrying a timestamp is attached (`HAPPENS_AT`) to its second leaf in the
//! [`TimeTree`], and time-windowed lookups start from those leaves rather
//! than from the node table.

pub mod journal;
pub mod schema;
mod view;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geo::GeoPoint;
use crate::time::{TimeWindow, Timestamp};
use crate::time_tree::{InstantId, TimeTree};

pub use journal::{JournalError, JournalRecord};
pub use schema::{EdgeClass, EdgeLabel, EdgeRule, NodeKind, NodeLabel};
pub use view::SubgraphView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u64);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A property value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

impl Scalar {
    pub fn as_str(&self) -> Option<&str> {
        match self {
            Scalar::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Scalar::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Scalar::Float(v) => Some(*v),
            Scalar::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Bool(v) => write!(f, "{v}"),
            Scalar::Int(v) => write!(f, "{v}"),
            Scalar::Float(v) => write!(f, "{v}"),
            Scalar::Text(v) => f.write_str(v),
        }
    }
}

impl From<&str> for Scalar {
    fn from(v: &str) -> Self {
        Scalar::Text(v.to_owned())
    }
}

impl From<String> for Scalar {
    fn from(v: String) -> Self {
        Scalar::Text(v)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Int(v)
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Float(v)
    }
}

impl From<bool> for Scalar {
    fn from(v: bool) -> Self {
        Scalar::Bool(v)
    }
}

pub type Properties = BTreeMap<String, Scalar>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvgNode {
    pub id: NodeId,
    pub label: NodeLabel,
    pub kind: NodeKind,
    pub position: Option<GeoPoint>,
    pub timestamp: Option<Timestamp>,
    #[serde(default)]
    pub properties: Properties,
}

impl TvgNode {
    pub fn property(&self, key: &str) -> Option<&Scalar> {
        self.properties.get(key)
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.property(key).and_then(Scalar::as_str)
    }

    /// `name`, else `ext_id`, else the label.
    pub fn display_name(&self) -> String {
        self.text("name")
            .or_else(|| self.text("ext_id"))
            .map(str::to_owned)
            .unwrap_or_else(|| self.label.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvgEdge {
    pub id: EdgeId,
    pub label: EdgeLabel,
    pub class: EdgeClass,
    pub source: NodeId,
    pub target: NodeId,
    pub t_source: Option<Timestamp>,
    pub t_target: Option<Timestamp>,
    /// Distance in meters.
    pub w_s: Option<f64>,
    /// Duration in seconds.
    pub w_t: Option<i64>,
}

impl TvgEdge {
    pub fn fields(&self) -> EdgeFields {
        EdgeFields {
            t_source: self.t_source,
            t_target: self.t_target,
            w_s: self.w_s,
        }
    }

    /// Class implied by which optional fields are present.
    pub fn derived_class(&self) -> Option<EdgeClass> {
        self.fields().class()
    }
}

/// The caller-supplied optional parts of an edge; `w_t` is always derived.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EdgeFields {
    pub t_source: Option<Timestamp>,
    pub t_target: Option<Timestamp>,
    pub w_s: Option<f64>,
}

impl EdgeFields {
    pub fn spatial(w_s: f64) -> Self {
        EdgeFields {
            w_s: Some(w_s),
            ..Default::default()
        }
    }

    pub fn temporal(t_source: Timestamp, t_target: Timestamp) -> Self {
        EdgeFields {
            t_source: Some(t_source),
            t_target: Some(t_target),
            w_s: None,
        }
    }

    pub fn spatio_temporal(t_source: Timestamp, t_target: Timestamp, w_s: f64) -> Self {
        EdgeFields {
            t_source: Some(t_source),
            t_target: Some(t_target),
            w_s: Some(w_s),
        }
    }

    pub fn class(&self) -> Option<EdgeClass> {
        EdgeClass::derive(
            self.t_source.is_some(),
            self.t_target.is_some(),
            self.w_s.is_some(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StoreError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("label {label} requires kind {expected}, got {got}")]
    LabelKindMismatch {
        label: NodeLabel,
        expected: NodeKind,
        got: NodeKind,
    },
    #[error("{label} node needs a position")]
    MissingPosition { label: NodeLabel },
    #[error("{label} node must not carry a position")]
    UnexpectedPosition { label: NodeLabel },
    #[error("{label} node needs a timestamp")]
    MissingTimestamp { label: NodeLabel },
    #[error("{label} node must not carry a timestamp")]
    UnexpectedTimestamp { label: NodeLabel },
    #[error("invalid coordinate lon={lon} lat={lat}")]
    InvalidPosition { lon: f64, lat: f64 },
    #[error("property {key:?} is not a finite number")]
    NonFiniteProperty { key: String },
    #[error("{label} is reserved for the time-tree")]
    ReservedLabel { label: EdgeLabel },
    #[error("{label} edge fields (t_a={t_a}, t_b={t_b}, w_s={w_s}) match no edge class")]
    FieldSetMismatch {
        label: EdgeLabel,
        t_a: bool,
        t_b: bool,
        w_s: bool,
    },
    #[error("{label} edges are {expected}, fields describe {got}")]
    LabelClassMismatch {
        label: EdgeLabel,
        expected: EdgeClass,
        got: EdgeClass,
    },
    #[error("{label} cannot join {source_label} -> {target_label}")]
    EndpointMismatch {
        label: EdgeLabel,
        source_label: NodeLabel,
        target_label: NodeLabel,
    },
    #[error("{label} edge ends before it starts ({t_a} -> {t_b})")]
    NegativeDuration {
        label: EdgeLabel,
        t_a: Timestamp,
        t_b: Timestamp,
    },
    #[error("{label} edge distance {w_s} must be finite and non-negative")]
    InvalidDistance { label: EdgeLabel, w_s: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
    Both,
}

/// Insertion log entry; replaying these in order rebuilds the store.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Insertion {
    Node(NodeId),
    Edge(EdgeId),
}

/// What a windowed lookup visited.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WindowScan {
    pub nodes: Vec<NodeId>,
    /// Second leaves walked on the time-tree chain.
    pub leaves_visited: usize,
    /// Node records read while collecting matches.
    pub nodes_touched: usize,
}

#[derive(Debug, Clone, Default)]
pub struct GraphStore {
    nodes: Vec<TvgNode>,
    edges: Vec<TvgEdge>,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
    by_label: [Vec<NodeId>; 10],
    tree: TimeTree,
    attached: HashMap<(InstantId, NodeLabel), Vec<NodeId>>,
    happens_at: Vec<Option<InstantId>>,
    log: Vec<Insertion>,
}

impl GraphStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn time_tree(&self) -> &TimeTree {
        &self.tree
    }

    pub fn node(&self, id: NodeId) -> Option<&TvgNode> {
        self.nodes.get(id.index())
    }

    pub fn edge(&self, id: EdgeId) -> Option<&TvgEdge> {
        self.edges.get(id.index())
    }

    pub fn nodes(&self) -> &[TvgNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[TvgEdge] {
        &self.edges
    }

    /// Nodes with `label`, in id order.
    pub fn nodes_with_label(&self, label: NodeLabel) -> &[NodeId] {
        &self.by_label[label.index()]
    }

    /// The second leaf a node hangs from, if it has a timestamp.
    pub fn happens_at(&self, id: NodeId) -> Option<InstantId> {
        self.happens_at.get(id.index()).copied().flatten()
    }

    /// Nodes with `label` attached to leaf `leaf`.
    pub fn attached(&self, leaf: InstantId, label: NodeLabel) -> &[NodeId] {
        self.attached
            .get(&(leaf, label))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Count of insertions so far; journal offsets are expressed in these.
    pub fn insertions(&self) -> usize {
        self.log.len()
    }

    pub(crate) fn insertion(&self, i: usize) -> Insertion {
        self.log[i]
    }

    pub fn add_node(
        &mut self,
        label: NodeLabel,
        kind: NodeKind,
        position: Option<GeoPoint>,
        timestamp: Option<Timestamp>,
        properties: Properties,
    ) -> Result<NodeId, StoreError> {
        let expected = label.kind();
        if expected != kind {
            return Err(StoreError::LabelKindMismatch {
                label,
                expected,
                got: kind,
            });
        }
        match (kind.has_position(), position) {
            (true, None) => return Err(StoreError::MissingPosition { label }),
            (false, Some(_)) => return Err(StoreError::UnexpectedPosition { label }),
            (true, Some(p)) if !p.is_valid() => {
                return Err(StoreError::InvalidPosition {
                    lon: p.lon,
                    lat: p.lat,
                })
            }
            _ => {}
        }
        match (kind.has_timestamp(), timestamp) {
            (true, None) => return Err(StoreError::MissingTimestamp { label }),
            (false, Some(_)) => return Err(StoreError::UnexpectedTimestamp { label }),
            _ => {}
        }
        if let Some((key, _)) = properties
            .iter()
            .find(|(_, v)| matches!(v, Scalar::Float(f) if !f.is_finite()))
        {
            return Err(StoreError::NonFiniteProperty { key: key.clone() });
        }

        let id = NodeId(self.nodes.len() as u64);
        let leaf = timestamp.map(|ts| self.tree.ensure_instant(ts).id);
        if let Some(leaf) = leaf {
            self.attached.entry((leaf, label)).or_default().push(id);
        }
        self.nodes.push(TvgNode {
            id,
            label,
            kind,
            position,
            timestamp,
            properties,
        });
        self.out_adj.push(Vec::new());
        self.in_adj.push(Vec::new());
        self.happens_at.push(leaf);
        self.by_label[label.index()].push(id);
        self.log.push(Insertion::Node(id));
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        label: EdgeLabel,
        source: NodeId,
        target: NodeId,
        fields: EdgeFields,
    ) -> Result<EdgeId, StoreError> {
        let rule = label.rule();
        let Some(expected) = rule.class else {
            return Err(StoreError::ReservedLabel { label });
        };
        let source_label = self
            .node(source)
            .ok_or(StoreError::UnknownNode(source))?
            .label;
        let target_label = self
            .node(target)
            .ok_or(StoreError::UnknownNode(target))?
            .label;
        let got = fields.class().ok_or(StoreError::FieldSetMismatch {
            label,
            t_a: fields.t_source.is_some(),
            t_b: fields.t_target.is_some(),
            w_s: fields.w_s.is_some(),
        })?;
        if got != expected {
            return Err(StoreError::LabelClassMismatch {
                label,
                expected,
                got,
            });
        }
        if !rule.allows(source_label, target_label) {
            return Err(StoreError::EndpointMismatch {
                label,
                source_label,
                target_label,
            });
        }
        if let Some(w_s) = fields.w_s {
            if !w_s.is_finite() || w_s < 0.0 {
                return Err(StoreError::InvalidDistance { label, w_s });
            }
        }
        let w_t = match (fields.t_source, fields.t_target) {
            (Some(t_a), Some(t_b)) => {
                if t_b < t_a {
                    return Err(StoreError::NegativeDuration { label, t_a, t_b });
                }
                self.tree.ensure_instant(t_a);
                self.tree.ensure_instant(t_b);
                Some(t_b.unix() - t_a.unix())
            }
            _ => None,
        };

        let id = EdgeId(self.edges.len() as u64);
        self.edges.push(TvgEdge {
            id,
            label,
            class: got,
            source,
            target,
            t_source: fields.t_source,
            t_target: fields.t_target,
            w_s: fields.w_s,
            w_t,
        });
        self.out_adj[source.index()].push(id);
        self.in_adj[target.index()].push(id);
        self.log.push(Insertion::Edge(id));
        Ok(id)
    }

    pub fn out_edges(&self, id: NodeId) -> &[EdgeId] {
        self.out_adj
            .get(id.index())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn in_edges(&self, id: NodeId) -> &[EdgeId] {
        self.in_adj
            .get(id.index())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Adjacent `(edge, other endpoint)` pairs ordered by edge label, then
    /// other endpoint id, then edge id.
    pub fn neighbors(
        &self,
        id: NodeId,
        direction: Direction,
        labels: Option<&[EdgeLabel]>,
    ) -> Result<Vec<(EdgeId, NodeId)>, StoreError> {
        if self.node(id).is_none() {
            return Err(StoreError::UnknownNode(id));
        }
        let keep = |e: &TvgEdge| labels.is_none_or(|ls| ls.contains(&e.label));
        let mut out: Vec<(EdgeLabel, NodeId, EdgeId)> = Vec::new();
        if matches!(direction, Direction::Out | Direction::Both) {
            out.extend(
                self.out_edges(id)
                    .iter()
                    .map(|e| &self.edges[e.index()])
                    .filter(|e| keep(e))
                    .map(|e| (e.label, e.target, e.id)),
            );
        }
        if matches!(direction, Direction::In | Direction::Both) {
            out.extend(
                self.in_edges(id)
                    .iter()
                    .map(|e| &self.edges[e.index()])
                    .filter(|e| keep(e))
                    .map(|e| (e.label, e.source, e.id)),
            );
        }
        out.sort_unstable();
        Ok(out.into_iter().map(|(_, n, e)| (e, n)).collect())
    }

    /// Nodes whose label is in `labels` and whose leaf lies in `w`.
    pub fn events_in_window(&self, w: &TimeWindow, labels: &[NodeLabel]) -> Vec<NodeId> {
        self.scan_window(w, labels).nodes
    }

    /// [`Self::events_in_window`] plus traversal counters. Results come in
    /// leaf order, then node id.
    pub fn scan_window(&self, w: &TimeWindow, labels: &[NodeLabel]) -> WindowScan {
        let mut scan = WindowScan::default();
        let temporal: Vec<NodeLabel> = labels
            .iter()
            .copied()
            .filter(|l| l.kind().has_timestamp())
            .collect();
        if temporal.is_empty() {
            return scan;
        }
        for leaf in self.tree.leaves(w) {
            scan.leaves_visited += 1;
            let start = scan.nodes.len();
            for &label in &temporal {
                let hits = self.attached(leaf.id, label);
                scan.nodes_touched += hits.len();
                scan.nodes.extend_from_slice(hits);
            }
            if temporal.len() > 1 {
                scan.nodes[start..].sort_unstable();
            }
        }
        scan
    }

    /// Read-only view of one window: temporal nodes come from the time-tree,
    /// spatial nodes of the requested labels are always included, and an edge
    /// qualifies when both endpoints are in the view and its `t_source` (if
    /// any) lies in `w`.
    pub fn window_subgraph(
        &self,
        w: &TimeWindow,
        node_labels: &[NodeLabel],
        edge_labels: &[EdgeLabel],
    ) -> SubgraphView<'_> {
        let mut nodes = self.events_in_window(w, node_labels);
        for label in node_labels.iter().filter(|l| !l.kind().has_timestamp()) {
            nodes.extend_from_slice(self.nodes_with_label(*label));
        }
        nodes.sort_unstable();
        nodes.dedup();

        let mut member = vec![false; self.nodes.len()];
        for n in &nodes {
            member[n.index()] = true;
        }
        let mut edges: Vec<EdgeId> = nodes
            .iter()
            .flat_map(|n| self.out_edges(*n))
            .map(|e| &self.edges[e.index()])
            .filter(|e| {
                edge_labels.contains(&e.label)
                    && member[e.target.index()]
                    && e.t_source.is_none_or(|t| w.contains(t))
            })
            .map(|e| e.id)
            .collect();
        edges.sort_unstable();
        SubgraphView::new(self, *w, nodes, edges)
    }

    /// Whole graph (minus the time-tree) as a view.
    pub fn full_view(&self) -> SubgraphView<'_> {
        self.window_subgraph(&TimeWindow::all(), &NodeLabel::ALL, &EdgeLabel::ALL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> Timestamp {
        s.parse().unwrap()
    }

    fn props(pairs: &[(&str, &str)]) -> Properties {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), Scalar::from(*v)))
            .collect()
    }

    fn mv(store: &mut GraphStore, t: &str) -> NodeId {
        store
            .add_node(
                NodeLabel::Move,
                NodeKind::SpatioTemporal,
                Some(GeoPoint::new(-64.78, 46.09)),
                Some(ts(t)),
                Properties::new(),
            )
            .unwrap()
    }

    #[test]
    fn spatial_node_is_not_attached() {
        let mut store = GraphStore::new();
        let id = store
            .add_node(
                NodeLabel::BusStop,
                NodeKind::Spatial,
                Some(GeoPoint::new(-64.78, 46.09)),
                None,
                props(&[("name", "Plaza Blvd (Walmart)")]),
            )
            .unwrap();
        assert_eq!(store.happens_at(id), None);
        assert!(store.time_tree().is_empty());
        assert_eq!(
            store.node(id).unwrap().display_name(),
            "Plaza Blvd (Walmart)"
        );
    }

    #[test]
    fn temporal_node_hangs_from_its_leaf() {
        let mut store = GraphStore::new();
        let id = mv(&mut store, "2016-06-09T08:00:05Z");
        let leaf = store.happens_at(id).unwrap();
        assert_eq!(
            store.time_tree().instant(leaf).utc_key,
            ts("2016-06-09T08:00:05Z")
        );
        assert_eq!(store.attached(leaf, NodeLabel::Move), &[id]);
    }

    #[test]
    fn node_validation_errors() {
        let mut store = GraphStore::new();
        let p = Some(GeoPoint::new(-64.78, 46.09));
        let t = Some(ts("2016-06-09T08:00:05Z"));
        assert!(matches!(
            store.add_node(
                NodeLabel::Move,
                NodeKind::Spatial,
                p,
                None,
                Properties::new()
            ),
            Err(StoreError::LabelKindMismatch { .. })
        ));
        assert!(matches!(
            store.add_node(
                NodeLabel::BusStop,
                NodeKind::Spatial,
                None,
                None,
                Properties::new()
            ),
            Err(StoreError::MissingPosition { .. })
        ));
        assert!(matches!(
            store.add_node(
                NodeLabel::Trip,
                NodeKind::Temporal,
                None,
                None,
                Properties::new()
            ),
            Err(StoreError::MissingTimestamp { .. })
        ));
        assert!(matches!(
            store.add_node(NodeLabel::Trip, NodeKind::Temporal, p, t, Properties::new()),
            Err(StoreError::UnexpectedPosition { .. })
        ));
        assert!(matches!(
            store.add_node(
                NodeLabel::BusStop,
                NodeKind::Spatial,
                Some(GeoPoint::new(0.0, 95.0)),
                None,
                Properties::new()
            ),
            Err(StoreError::InvalidPosition { .. })
        ));
        assert_eq!(store.node_count(), 0);
    }

    #[test]
    fn next_edge_derives_duration() {
        let mut store = GraphStore::new();
        let a = mv(&mut store, "2016-06-09T08:00:05Z");
        let b = mv(&mut store, "2016-06-09T08:00:10Z");
        let e = store
            .add_edge(
                EdgeLabel::Next,
                a,
                b,
                EdgeFields::spatio_temporal(
                    ts("2016-06-09T08:00:05Z"),
                    ts("2016-06-09T08:00:10Z"),
                    62.0,
                ),
            )
            .unwrap();
        let edge = store.edge(e).unwrap();
        assert_eq!(edge.class, EdgeClass::SpatioTemporal);
        assert_eq!(edge.w_t, Some(5));
        assert_eq!(edge.w_s, Some(62.0));
    }

    #[test]
    fn edge_validation_errors() {
        let mut store = GraphStore::new();
        let a = mv(&mut store, "2016-06-09T08:00:05Z");
        let b = mv(&mut store, "2016-06-09T08:00:10Z");
        let t1 = ts("2016-06-09T08:00:05Z");
        let t0 = ts("2016-06-09T08:00:00Z");
        assert!(matches!(
            store.add_edge(EdgeLabel::Next, a, NodeId(99), EdgeFields::spatial(1.0)),
            Err(StoreError::UnknownNode(NodeId(99)))
        ));
        assert!(matches!(
            store.add_edge(EdgeLabel::Next, a, b, EdgeFields::spatial(1.0)),
            Err(StoreError::LabelClassMismatch { .. })
        ));
        assert!(matches!(
            store.add_edge(
                EdgeLabel::Next,
                a,
                b,
                EdgeFields {
                    t_source: Some(t1),
                    ..Default::default()
                }
            ),
            Err(StoreError::FieldSetMismatch { .. })
        ));
        assert!(matches!(
            store.add_edge(
                EdgeLabel::Next,
                a,
                b,
                EdgeFields::spatio_temporal(t1, t0, 1.0)
            ),
            Err(StoreError::NegativeDuration { .. })
        ));
        assert!(matches!(
            store.add_edge(EdgeLabel::HappensAt, a, b, EdgeFields::spatial(0.0)),
            Err(StoreError::ReservedLabel { .. })
        ));
        assert!(matches!(
            store.add_edge(EdgeLabel::StoppedAt, a, b, EdgeFields::spatial(0.0)),
            Err(StoreError::EndpointMismatch { .. })
        ));
        assert!(matches!(
            store.add_edge(
                EdgeLabel::Next,
                a,
                b,
                EdgeFields::spatio_temporal(t0, t1, -1.0)
            ),
            Err(StoreError::InvalidDistance { .. })
        ));
        assert_eq!(store.edge_count(), 0);
    }

    #[test]
    fn arrival_before_trip_start_is_rejected() {
        let mut store = GraphStore::new();
        let trip = store
            .add_node(
                NodeLabel::Trip,
                NodeKind::Temporal,
                None,
                Some(ts("2016-06-09T08:00:00Z")),
                Properties::new(),
            )
            .unwrap();
        let bus_stop = store
            .add_node(
                NodeLabel::BusStop,
                NodeKind::Spatial,
                Some(GeoPoint::new(-64.7, 46.1)),
                None,
                Properties::new(),
            )
            .unwrap();
        let err = store.add_edge(
            EdgeLabel::ArrivesAt,
            trip,
            bus_stop,
            EdgeFields::temporal(ts("2016-06-09T08:05:00Z"), ts("2016-06-09T08:04:00Z")),
        );
        assert!(matches!(err, Err(StoreError::NegativeDuration { .. })));
    }

    #[test]
    fn neighbors_order_and_counts() {
        let mut store = GraphStore::new();
        let a = mv(&mut store, "2016-06-09T08:00:05Z");
        let b = mv(&mut store, "2016-06-09T08:00:10Z");
        let c = mv(&mut store, "2016-06-09T08:00:15Z");
        let f = |x: &str, y: &str| EdgeFields::spatio_temporal(ts(x), ts(y), 1.0);
        store
            .add_edge(
                EdgeLabel::Next,
                a,
                c,
                f("2016-06-09T08:00:05Z", "2016-06-09T08:00:15Z"),
            )
            .unwrap();
        store
            .add_edge(
                EdgeLabel::Next,
                a,
                b,
                f("2016-06-09T08:00:05Z", "2016-06-09T08:00:10Z"),
            )
            .unwrap();
        store
            .add_edge(
                EdgeLabel::Next,
                b,
                c,
                f("2016-06-09T08:00:10Z", "2016-06-09T08:00:15Z"),
            )
            .unwrap();
        let out = store.neighbors(a, Direction::Out, None).unwrap();
        assert_eq!(out.iter().map(|p| p.1).collect::<Vec<_>>(), vec![b, c]);
        let both = store.neighbors(b, Direction::Both, None).unwrap().len();
        let ins = store.neighbors(b, Direction::In, None).unwrap().len();
        let outs = store.neighbors(b, Direction::Out, None).unwrap().len();
        assert_eq!(both, ins + outs);
        let lonely = store
            .add_node(
                NodeLabel::BusStop,
                NodeKind::Spatial,
                Some(GeoPoint::new(0.0, 0.0)),
                None,
                Properties::new(),
            )
            .unwrap();
        assert!(store
            .neighbors(lonely, Direction::Both, None)
            .unwrap()
            .is_empty());
        assert!(store.neighbors(NodeId(42), Direction::Both, None).is_err());
    }

    #[test]
    fn events_in_window_filters_by_label_and_time() {
        let mut store = GraphStore::new();
        let inside = mv(&mut store, "2016-06-09T08:30:00Z");
        mv(&mut store, "2016-06-09T09:30:00Z");
        let hour = TimeWindow::new(ts("2016-06-09T08:00:00Z"), ts("2016-06-09T08:59:59Z")).unwrap();
        assert_eq!(
            store.events_in_window(&hour, &[NodeLabel::Move]),
            vec![inside]
        );
        assert!(store.events_in_window(&hour, &[NodeLabel::Stop]).is_empty());
        assert!(store
            .events_in_window(&hour, &[NodeLabel::BusStop])
            .is_empty());
        let early =
            TimeWindow::new(ts("2016-06-08T00:00:00Z"), ts("2016-06-08T00:00:00Z")).unwrap();
        assert!(store
            .events_in_window(&early, &[NodeLabel::Move])
            .is_empty());
    }
}
