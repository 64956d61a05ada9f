//! Degree, congestion, PageRank and betweenness tables per entity class.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::store::{EdgeLabel, GraphStore, NodeId, NodeLabel, SubgraphView};
use crate::time::{TimeWindow, Timestamp};

use super::betweenness::{betweenness, normalize};
use super::graph::{Digraph, Weight};
use super::pagerank::{pagerank, PageRankParams};
use super::MetricsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityClass {
    Street,
    BusStop,
    Line,
}

impl EntityClass {
    pub fn label(self) -> NodeLabel {
        match self {
            EntityClass::Street => NodeLabel::StreetSegment,
            EntityClass::BusStop => NodeLabel::BusStop,
            EntityClass::Line => NodeLabel::Line,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EntityClass::Street => "street",
            EntityClass::BusStop => "busstop",
            EntityClass::Line => "line",
        }
    }
}

impl fmt::Display for EntityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntityClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['_', '-'], "").as_str() {
            "street" | "streets" => Ok(EntityClass::Street),
            "busstop" | "busstops" | "stop" => Ok(EntityClass::BusStop),
            "line" | "lines" | "route" => Ok(EntityClass::Line),
            _ => Err(format!(
                "unknown entity class {s:?} (expected street, busstop or line)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CentralityRow {
    pub rank: usize,
    pub node: NodeId,
    pub id: String,
    pub name: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CentralityTable {
    pub metric: String,
    pub class: Option<EntityClass>,
    pub window: TimeWindow,
    /// PageRank only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    pub rows: Vec<CentralityRow>,
}

impl CentralityTable {
    /// Sorts by score descending, then id, then node id, and ranks from 1.
    pub fn new(
        store: &GraphStore,
        metric: &str,
        class: Option<EntityClass>,
        window: TimeWindow,
        scores: impl IntoIterator<Item = (NodeId, f64)>,
    ) -> Self {
        let mut rows: Vec<CentralityRow> = scores
            .into_iter()
            .map(|(node, score)| {
                let n = store.node(node).expect("scored node exists");
                CentralityRow {
                    rank: 0,
                    node,
                    id: n
                        .text("ext_id")
                        .map(str::to_owned)
                        .unwrap_or_else(|| node.to_string()),
                    name: n.display_name(),
                    score,
                }
            })
            .collect();
        rows.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.id.cmp(&b.id))
                .then(a.node.cmp(&b.node))
        });
        for (i, r) in rows.iter_mut().enumerate() {
            r.rank = i + 1;
        }
        CentralityTable {
            metric: metric.to_owned(),
            class,
            window,
            converged: None,
            rows,
        }
    }

    pub fn truncate(mut self, top: Option<usize>) -> Self {
        if let Some(k) = top {
            self.rows.truncate(k);
        }
        self
    }

    pub fn score_of(&self, id: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.id == id).map(|r| r.score)
    }
}

/// Entity-class degree: streets count LOCATED_ON edges from Moves, bus stops
/// count STOPPED_AT edges from Stops, lines count HAS edges to Trips, each
/// restricted to events in `w`. Every entity gets a row, zeros included.
pub fn degree_centrality(
    store: &GraphStore,
    class: EntityClass,
    w: &TimeWindow,
) -> CentralityTable {
    let entity = class.label();
    let mut counts: BTreeMap<NodeId, f64> = store
        .nodes_with_label(entity)
        .iter()
        .map(|n| (*n, 0.0))
        .collect();
    match class {
        EntityClass::Street | EntityClass::BusStop => {
            let (event, edge) = if class == EntityClass::Street {
                (NodeLabel::Move, EdgeLabel::LocatedOn)
            } else {
                (NodeLabel::Stop, EdgeLabel::StoppedAt)
            };
            let view = store.window_subgraph(w, &[event, entity], &[edge]);
            for e in view.edges() {
                if label_of(store, e.source) == event {
                    if let Some(c) = counts.get_mut(&e.target) {
                        *c += 1.0;
                    }
                }
            }
        }
        EntityClass::Line => {
            let view =
                store.window_subgraph(w, &[NodeLabel::Trip, NodeLabel::Line], &[EdgeLabel::Has]);
            for e in view.edges() {
                if let Some(c) = counts.get_mut(&e.source) {
                    *c += 1.0;
                }
            }
        }
    }
    CentralityTable::new(store, "degree", Some(class), *w, counts)
}

/// Streets that each intersection lies on, from the network's LOCATED_ON edges.
fn intersection_streets(store: &GraphStore, x: NodeId) -> BTreeSet<NodeId> {
    store
        .out_edges(x)
        .iter()
        .filter_map(|e| store.edge(*e))
        .filter(|e| {
            e.label == EdgeLabel::LocatedOn && label_of(store, e.target) == NodeLabel::StreetSegment
        })
        .map(|e| e.target)
        .collect()
}

/// Roadway suspensions: Stops in `w` anchored on a street segment, or on an
/// intersection (credited to every street through it). Only streets with at
/// least one such Stop appear.
pub fn congestion_degree(store: &GraphStore, w: &TimeWindow) -> CentralityTable {
    let view = store.window_subgraph(
        w,
        &[
            NodeLabel::Stop,
            NodeLabel::StreetSegment,
            NodeLabel::StreetIntersection,
        ],
        &[EdgeLabel::LocatedOn],
    );
    let mut counts: BTreeMap<NodeId, f64> = BTreeMap::new();
    let mut through: HashMap<NodeId, BTreeSet<NodeId>> = HashMap::new();
    for e in view.edges() {
        if label_of(store, e.source) != NodeLabel::Stop {
            continue;
        }
        match label_of(store, e.target) {
            NodeLabel::StreetSegment => *counts.entry(e.target).or_default() += 1.0,
            NodeLabel::StreetIntersection => {
                let streets = through
                    .entry(e.target)
                    .or_insert_with(|| intersection_streets(store, e.target));
                for s in streets.iter() {
                    *counts.entry(*s).or_default() += 1.0;
                }
            }
            _ => {}
        }
    }
    CentralityTable::new(store, "congestion", Some(EntityClass::Street), *w, counts)
}

fn label_of(store: &GraphStore, id: NodeId) -> NodeLabel {
    store.node(id).expect("edge endpoint exists").label
}

/// Node labels and edge labels selecting a view.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewSpec {
    pub nodes: Vec<NodeLabel>,
    pub edges: Vec<EdgeLabel>,
}

impl ViewSpec {
    /// Every label.
    pub fn all() -> Self {
        ViewSpec {
            nodes: NodeLabel::ALL.to_vec(),
            edges: EdgeLabel::ALL.to_vec(),
        }
    }

    /// Move and Stop nodes joined by NEXT: the vehicle trajectories.
    pub fn trajectory() -> Self {
        ViewSpec {
            nodes: vec![NodeLabel::Move, NodeLabel::Stop],
            edges: vec![EdgeLabel::Next],
        }
    }

    pub fn view<'a>(&self, store: &'a GraphStore, w: &TimeWindow) -> SubgraphView<'a> {
        store.window_subgraph(w, &self.nodes, &self.edges)
    }
}

impl Default for ViewSpec {
    fn default() -> Self {
        ViewSpec::trajectory()
    }
}

/// In-degree plus out-degree of every view node.
pub fn view_degree(view: &SubgraphView<'_>) -> CentralityTable {
    let scores = view
        .node_ids()
        .iter()
        .map(|&n| (n, (view.in_degree(n) + view.out_degree(n)) as f64));
    CentralityTable::new(view.store(), "degree", None, view.window(), scores)
}

pub fn view_pagerank(view: &SubgraphView<'_>, params: &PageRankParams) -> CentralityTable {
    let g = Digraph::from_view(view, Weight::Hops);
    let pr = pagerank(&g, params);
    let mut t = CentralityTable::new(
        view.store(),
        "pagerank",
        None,
        view.window(),
        view.node_ids().iter().copied().zip(pr.scores),
    );
    t.converged = Some(pr.converged);
    t
}

pub fn view_betweenness(
    view: &SubgraphView<'_>,
    weight: Weight,
    normalized: bool,
) -> Result<CentralityTable, MetricsError> {
    let g = Digraph::from_view(view, weight);
    if g.has_negative_weight() {
        return Err(MetricsError::NegativeWeight);
    }
    let mut bc = betweenness(&g);
    if normalized {
        normalize(&mut bc);
    }
    Ok(CentralityTable::new(
        view.store(),
        "betweenness",
        None,
        view.window(),
        view.node_ids().iter().copied().zip(bc),
    ))
}

/// Graph over `entities` plus helper nodes, with `arcs` between their ids.
fn projection(entities: &[NodeId], extra: &BTreeSet<NodeId>, arcs: &[(NodeId, NodeId)]) -> Digraph {
    let mut ids: Vec<NodeId> = entities
        .iter()
        .copied()
        .chain(extra.iter().copied())
        .collect();
    ids.sort_unstable();
    ids.dedup();
    let idx = |n: NodeId| ids.binary_search(&n).expect("projection node");
    let arcs: Vec<(usize, usize, f64)> = arcs.iter().map(|&(u, v)| (idx(u), idx(v), 1.0)).collect();
    Digraph::with_ids(ids, arcs)
}

fn entity_scores(g: &Digraph, entities: &[NodeId], scores: &[f64]) -> Vec<(NodeId, f64)> {
    entities
        .iter()
        .map(|&e| (e, scores[g.index_of(e).expect("entity in projection")]))
        .collect()
}

/// Event-to-entity arcs in `w`: Move to street, Stop to bus stop, Trip to line.
fn event_entity_arcs(
    store: &GraphStore,
    class: EntityClass,
    w: &TimeWindow,
) -> Vec<(NodeId, NodeId)> {
    let entity = class.label();
    let (event, edge) = match class {
        EntityClass::Street => (NodeLabel::Move, EdgeLabel::LocatedOn),
        EntityClass::BusStop => (NodeLabel::Stop, EdgeLabel::StoppedAt),
        EntityClass::Line => (NodeLabel::Trip, EdgeLabel::Has),
    };
    let view = store.window_subgraph(w, &[event, entity], &[edge]);
    view.edges()
        .filter_map(|e| match class {
            EntityClass::Line => Some((e.target, e.source)),
            _ => (label_of(store, e.source) == event).then_some((e.source, e.target)),
        })
        .collect()
}

/// PageRank on the event/entity bipartite projection of `w` (Moves to
/// streets, Stops to bus stops, Trips to lines); rows for every entity.
pub fn pagerank_centrality(
    store: &GraphStore,
    class: EntityClass,
    w: &TimeWindow,
    params: &PageRankParams,
) -> CentralityTable {
    let entities = store.nodes_with_label(class.label());
    let arcs = event_entity_arcs(store, class, w);
    let events: BTreeSet<NodeId> = arcs.iter().map(|a| a.0).collect();
    let g = projection(entities, &events, &arcs);
    let pr = pagerank(&g, params);
    let mut t = CentralityTable::new(
        store,
        "pagerank",
        Some(class),
        *w,
        entity_scores(&g, entities, &pr.scores),
    );
    t.converged = Some(pr.converged);
    t
}

/// Episodes of every trip starting in `w`, in sequence order.
pub fn trips_with_episodes(store: &GraphStore, w: &TimeWindow) -> Vec<(NodeId, Vec<NodeId>)> {
    let trips = store.events_in_window(w, &[NodeLabel::Trip]);
    let mut by_id: BTreeMap<&str, usize> = BTreeMap::new();
    let mut out: Vec<(NodeId, Vec<(i64, NodeId)>)> = Vec::new();
    let mut last = w.start();
    for t in &trips {
        let node = store.node(*t).expect("trip");
        if let Some(id) = node.text("trip_id") {
            by_id.insert(id, out.len());
            out.push((*t, Vec::new()));
        }
        if let Some(end) = node.text("end").and_then(|s| s.parse::<Timestamp>().ok()) {
            last = last.max(end);
        }
    }
    if out.is_empty() {
        return Vec::new();
    }
    let span = TimeWindow::new(w.start(), last.max(w.start())).expect("ordered");
    for e in store.events_in_window(&span, &[NodeLabel::Move, NodeLabel::Stop]) {
        let node = store.node(e).expect("episode");
        let Some(slot) = node.text("trip_id").and_then(|id| by_id.get(id)) else {
            continue;
        };
        let seq = node
            .property("seq")
            .and_then(|s| s.as_i64())
            .unwrap_or(i64::MAX);
        out[*slot].1.push((seq, e));
    }
    out.into_iter()
        .map(|(t, mut eps)| {
            eps.sort_unstable();
            (t, eps.into_iter().map(|(_, n)| n).collect())
        })
        .collect()
}

/// The entity an episode is anchored to, for the class.
fn episode_entity(store: &GraphStore, ep: NodeId, class: EntityClass) -> Option<NodeId> {
    let (edge, target) = match class {
        EntityClass::Street => (EdgeLabel::LocatedOn, NodeLabel::StreetSegment),
        EntityClass::BusStop => (EdgeLabel::StoppedAt, NodeLabel::BusStop),
        EntityClass::Line => return None,
    };
    store
        .out_edges(ep)
        .iter()
        .filter_map(|e| store.edge(*e))
        .find(|e| e.label == edge && label_of(store, e.target) == target)
        .map(|e| e.target)
}

/// Betweenness on an entity graph for `w`. Streets and bus stops: an arc
/// joins consecutive distinct entities visited by a trip. Lines: lines and
/// the bus stops their trips stopped at, joined both ways. Arcs are
/// deduplicated and unweighted.
pub fn betweenness_centrality(
    store: &GraphStore,
    class: EntityClass,
    w: &TimeWindow,
    normalized: bool,
) -> CentralityTable {
    let entities = store.nodes_with_label(class.label());
    let mut arcs: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    let mut extra = BTreeSet::new();
    for (trip, eps) in trips_with_episodes(store, w) {
        match class {
            EntityClass::Street | EntityClass::BusStop => {
                let mut prev: Option<NodeId> = None;
                for ep in eps {
                    let Some(cur) = episode_entity(store, ep, class) else {
                        continue;
                    };
                    if let Some(p) = prev {
                        if p != cur {
                            arcs.insert((p, cur));
                        }
                    }
                    prev = Some(cur);
                }
            }
            EntityClass::Line => {
                let Some(line) = store
                    .in_edges(trip)
                    .iter()
                    .filter_map(|e| store.edge(*e))
                    .find(|e| e.label == EdgeLabel::Has)
                    .map(|e| e.source)
                else {
                    continue;
                };
                for ep in eps {
                    if let Some(stop) = episode_entity(store, ep, EntityClass::BusStop) {
                        extra.insert(stop);
                        arcs.insert((line, stop));
                        arcs.insert((stop, line));
                    }
                }
            }
        }
    }
    let arcs: Vec<_> = arcs.into_iter().collect();
    let g = projection(entities, &extra, &arcs);
    let mut bc = betweenness(&g);
    if normalized {
        normalize(&mut bc);
    }
    CentralityTable::new(
        store,
        "betweenness",
        Some(class),
        *w,
        entity_scores(&g, entities, &bc),
    )
}
