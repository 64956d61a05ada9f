//! Independent oracles and random fixtures shared by the property tests and
//! the acceptance harness. Nothing here calls the algorithm under test.
#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tvg_core::store::journal::JournalRecord;
use tvg_core::{
    EdgeClass, EdgeFields, EdgeId, EdgeLabel, GeoPoint, GraphStore, NodeId, NodeLabel, Properties,
    TimeWindow, Timestamp,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` nodes and arcs `(u, v, w)`. Integer weights keep every path sum exact.
pub struct RandomGraph {
    pub n: usize,
    pub arcs: Vec<(usize, usize, f64)>,
}

/// Each ordered pair gets an arc with probability `p`, a parallel twin
/// with probability `p / 4`; self-loops appear now and then.
pub fn random_digraph(
    r: &mut impl Rng,
    n: usize,
    p: f64,
    weights: std::ops::RangeInclusive<u32>,
) -> RandomGraph {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            let p_here = if u == v { p / 8.0 } else { p };
            if r.random_bool(p_here) {
                arcs.push((u, v, r.random_range(weights.clone()) as f64));
                if r.random_bool(p / 4.0) {
                    arcs.push((u, v, r.random_range(weights.clone()) as f64));
                }
            }
        }
    }
    RandomGraph { n, arcs }
}

pub fn floyd_warshall(g: &RandomGraph) -> Vec<Vec<Option<f64>>> {
    let n = g.n;
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(u, v, w) in &g.arcs {
        if w < d[u][v] {
            d[u][v] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| x.is_finite().then_some(x))
                .collect()
        })
        .collect()
}

/// Largest finite distance over ordered pairs with `s != t`, 0 when none.
pub fn fw_diameter(d: &[Vec<Option<f64>>]) -> f64 {
    let mut best = 0.0f64;
    for (s, row) in d.iter().enumerate() {
        for (t, x) in row.iter().enumerate() {
            if let (true, Some(x)) = (s != t, x) {
                best = best.max(*x);
            }
        }
    }
    best
}

/// Betweenness by enumerating every shortest simple path, one per arc
/// sequence so parallel arcs count separately. Needs positive weights.
pub fn brute_betweenness(g: &RandomGraph) -> Vec<f64> {
    let n = g.n;
    let d = floyd_warshall(g);
    let mut out: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(u, v, w) in &g.arcs {
        if u != v {
            out[u].push((v, w));
        }
    }
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            let Some(target) = d[s][t] else { continue };
            if s == t {
                continue;
            }
            let mut total = 0u64;
            let mut through = vec![0u64; n];
            let mut path = vec![s];
            let mut seen = vec![false; n];
            seen[s] = true;
            enumerate(
                &out,
                &d,
                t,
                target,
                0.0,
                &mut path,
                &mut seen,
                &mut total,
                &mut through,
            );
            for v in 0..n {
                if v != s && v != t {
                    bc[v] += through[v] as f64 / total as f64;
                }
            }
        }
    }
    bc
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    out: &[Vec<(usize, f64)>],
    d: &[Vec<Option<f64>>],
    t: usize,
    target: f64,
    len: f64,
    path: &mut Vec<usize>,
    seen: &mut [bool],
    total: &mut u64,
    through: &mut [u64],
) {
    let u = *path.last().unwrap();
    if u == t {
        if len == target {
            *total += 1;
            for &v in &path[1..path.len() - 1] {
                through[v] += 1;
            }
        }
        return;
    }
    for &(v, w) in &out[u] {
        // Only extend prefixes that can still finish on a shortest path.
        let rest = d[v][t].unwrap_or(f64::INFINITY);
        if seen[v] || len + w + rest > target {
            continue;
        }
        seen[v] = true;
        path.push(v);
        enumerate(out, d, t, target, len + w, path, seen, total, through);
        path.pop();
        seen[v] = false;
    }
}

/// Stationary vector of the damped walk, solved directly:
/// `(I - d P) x = (1 - d) / n`, where dangling columns are uniform.
pub fn dense_pagerank(g: &RandomGraph, damping: f64) -> Vec<f64> {
    let n = g.n;
    let mut outdeg = vec![0usize; n];
    for &(u, _, _) in &g.arcs {
        outdeg[u] += 1;
    }
    let mut p = vec![vec![0.0; n]; n];
    for &(u, v, _) in &g.arcs {
        p[v][u] += 1.0 / outdeg[u] as f64;
    }
    for (u, &deg) in outdeg.iter().enumerate() {
        if deg == 0 {
            for row in p.iter_mut() {
                row[u] = 1.0 / n as f64;
            }
        }
    }
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).map(|j| -damping * p[i][j]).collect();
            row[i] += 1.0;
            row.push((1.0 - damping) / n as f64);
            row
        })
        .collect();
    // Gauss-Jordan with partial pivoting.
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, piv);
        let lead = a[col][col];
        for x in a[col].iter_mut() {
            *x /= lead;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    let pivot_row = a[col].clone();
                    for (x, y) in a[r].iter_mut().zip(pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
    }
    a.into_iter().map(|row| row[n]).collect()
}

pub const DAY: i64 = 1_465_430_400; // 2016-06-09T00:00:00Z

pub fn ts(unix: i64) -> Timestamp {
    Timestamp::from_unix(unix).unwrap()
}

pub fn window(a: i64, b: i64) -> TimeWindow {
    TimeWindow::new(ts(a.min(b)), ts(a.max(b))).unwrap()
}

/// A window that is sometimes calendar-aligned, sometimes ragged, sometimes empty.
pub fn random_window(r: &mut impl Rng, lo: i64, hi: i64) -> TimeWindow {
    match r.random_range(0..4) {
        0 => {
            let t = ts(r.random_range(lo..=hi));
            let level = *[
                tvg_core::Level::Minute,
                tvg_core::Level::Hour,
                tvg_core::Level::Day,
            ]
            .choose(r)
            .unwrap();
            TimeWindow::span(t, level)
        }
        1 => {
            let a = r.random_range(lo..=hi);
            window(a, a + r.random_range(0..120))
        }
        2 => window(lo - 10_000, lo - 1),
        _ => window(r.random_range(lo..=hi), r.random_range(lo..=hi)),
    }
}

fn point(r: &mut impl Rng) -> GeoPoint {
    GeoPoint::new(
        -64.78 + r.random_range(-0.01..0.01),
        46.09 + r.random_range(-0.01..0.01),
    )
}

pub fn add_episode(store: &mut GraphStore, r: &mut impl Rng, label: NodeLabel, at: i64) -> NodeId {
    store
        .add_node(
            label,
            label.kind(),
            Some(point(r)),
            Some(ts(at)),
            Properties::new(),
        )
        .unwrap()
}

pub fn add_spatial(store: &mut GraphStore, r: &mut impl Rng, label: NodeLabel) -> NodeId {
    store
        .add_node(label, label.kind(), Some(point(r)), None, Properties::new())
        .unwrap()
}

/// Moves and Stops spread over `[lo, hi]`, NEXT edges forward in time,
/// some bus stops with STOPPED_AT and street segments with LOCATED_ON.
pub fn random_event_store(r: &mut impl Rng, events: usize, lo: i64, hi: i64) -> GraphStore {
    let mut store = GraphStore::new();
    let bus_stops: Vec<NodeId> = (0..5)
        .map(|_| add_spatial(&mut store, r, NodeLabel::BusStop))
        .collect();
    let streets: Vec<NodeId> = (0..5)
        .map(|_| add_spatial(&mut store, r, NodeLabel::StreetSegment))
        .collect();
    let mut eps = Vec::new();
    for _ in 0..events {
        let label = if r.random_bool(0.3) {
            NodeLabel::Stop
        } else {
            NodeLabel::Move
        };
        let at = r.random_range(lo..=hi);
        eps.push(add_episode(&mut store, r, label, at));
    }
    for _ in 0..events * 2 {
        let (a, b) = (*eps.choose(r).unwrap(), *eps.choose(r).unwrap());
        let (ta, tb) = (
            store.node(a).unwrap().timestamp.unwrap(),
            store.node(b).unwrap().timestamp.unwrap(),
        );
        let (a, b, ta, tb) = if ta <= tb {
            (a, b, ta, tb)
        } else {
            (b, a, tb, ta)
        };
        store
            .add_edge(
                EdgeLabel::Next,
                a,
                b,
                EdgeFields::spatio_temporal(ta, tb, r.random_range(1..500) as f64),
            )
            .unwrap();
    }
    for &e in &eps {
        let node = store.node(e).unwrap();
        if node.label == NodeLabel::Stop && r.random_bool(0.5) {
            let b = *bus_stops.choose(r).unwrap();
            store
                .add_edge(EdgeLabel::StoppedAt, e, b, EdgeFields::spatial(12.0))
                .unwrap();
        } else if r.random_bool(0.5) {
            let s = *streets.choose(r).unwrap();
            store
                .add_edge(EdgeLabel::LocatedOn, e, s, EdgeFields::spatial(3.0))
                .unwrap();
        }
    }
    store
}

/// Nodes whose timestamp lies in `w`, by linear scan.
pub fn scan_events(store: &GraphStore, w: &TimeWindow, labels: &[NodeLabel]) -> Vec<NodeId> {
    let mut v: Vec<NodeId> = store
        .nodes()
        .iter()
        .filter(|n| labels.contains(&n.label) && n.timestamp.is_some_and(|t| w.contains(t)))
        .map(|n| n.id)
        .collect();
    v.sort_unstable();
    v
}

/// Node and edge counts of a window view, recomputed from the raw lists.
pub fn scan_view_counts(
    store: &GraphStore,
    w: &TimeWindow,
    node_labels: &[NodeLabel],
    edge_labels: &[EdgeLabel],
) -> (u64, u64) {
    let member = |id: NodeId| {
        let n = store.node(id).unwrap();
        node_labels.contains(&n.label) && n.timestamp.is_none_or(|t| w.contains(t))
    };
    let nodes = store.nodes().iter().filter(|n| member(n.id)).count() as u64;
    let edges = store
        .edges()
        .iter()
        .filter(|e| {
            edge_labels.contains(&e.label)
                && member(e.source)
                && member(e.target)
                && e.t_source.is_none_or(|t| w.contains(t))
        })
        .count() as u64;
    (nodes, edges)
}

/// One random edge of every insertable label in turn, endpoints created on
/// demand from the label's rule.
pub fn random_edge_store(r: &mut impl Rng, edges: usize) -> GraphStore {
    let mut store = GraphStore::new();
    let labels: Vec<EdgeLabel> = EdgeLabel::insertable().collect();
    let mut pool: std::collections::BTreeMap<NodeLabel, Vec<NodeId>> = Default::default();
    let mut endpoint = |store: &mut GraphStore, r: &mut ChaCha8Rng, allowed: &[NodeLabel]| {
        let label = *allowed.choose(r).unwrap();
        let ids = pool.entry(label).or_default();
        if ids.len() < 4 || r.random_bool(0.2) {
            let id = if label.kind().has_timestamp() {
                let at = DAY + r.random_range(0..86_400);
                if label.kind().has_position() {
                    add_episode(store, r, label, at)
                } else {
                    store
                        .add_node(label, label.kind(), None, Some(ts(at)), Properties::new())
                        .unwrap()
                }
            } else {
                add_spatial(store, r, label)
            };
            ids.push(id);
        }
        *ids.choose(r).unwrap()
    };
    let mut r2 = rng(r.random());
    for i in 0..edges {
        let label = labels[i % labels.len()];
        let rule = label.rule();
        let s = endpoint(&mut store, &mut r2, rule.sources);
        let t = endpoint(&mut store, &mut r2, rule.targets);
        let a = DAY + r2.random_range(0..86_400);
        let b = a + r2.random_range(0..3_600);
        let w_s = r2.random_range(0.0..5_000.0);
        let fields = match rule.class.unwrap() {
            EdgeClass::Spatial => EdgeFields::spatial(w_s),
            EdgeClass::Temporal => EdgeFields::temporal(ts(a), ts(b)),
            EdgeClass::SpatioTemporal => EdgeFields::spatio_temporal(ts(a), ts(b), w_s),
        };
        store.add_edge(label, s, t, fields).unwrap();
    }
    store
}

/// Re-inserts every record of `store` through the public API, leaving out `skip`.
pub fn rebuild_without(store: &GraphStore, skip: EdgeId) -> GraphStore {
    let mut out = GraphStore::new();
    for i in 0..store.insertions() {
        match store.record(i) {
            JournalRecord::Node(n) => {
                out.add_node(n.label, n.kind, n.position, n.timestamp, n.properties)
                    .unwrap();
            }
            JournalRecord::Edge(e) if e.id == skip => {}
            JournalRecord::Edge(e) => {
                out.add_edge(e.label, e.source, e.target, e.fields())
                    .unwrap();
            }
        }
    }
    out
}
