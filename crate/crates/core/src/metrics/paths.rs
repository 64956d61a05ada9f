//! Dijkstra shortest paths, longest shortest path and diameter.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::store::{EdgeId, NodeId, SubgraphView};

use super::graph::{Digraph, Weight};
use super::MetricsError;

/// Single-source result. `pred[v]` is the arc into `v` on its chosen path.
#[derive(Debug, Clone)]
pub struct ShortestTree {
    pub source: usize,
    pub dist: Vec<f64>,
    pub hops: Vec<usize>,
    pub pred: Vec<Option<usize>>,
}

impl ShortestTree {
    pub fn reachable(&self, v: usize) -> bool {
        self.dist[v].is_finite()
    }

    /// Nodes and arcs from the source to `v`.
    pub fn path_to(&self, g: &Digraph, v: usize) -> Option<(Vec<usize>, Vec<usize>)> {
        if !self.reachable(v) {
            return None;
        }
        let mut nodes = vec![v];
        let mut arcs = Vec::new();
        let mut cur = v;
        while let Some(a) = self.pred[cur] {
            arcs.push(a);
            cur = g.arc(a).source;
            nodes.push(cur);
        }
        nodes.reverse();
        arcs.reverse();
        Some((nodes, arcs))
    }

    /// Lexicographic order of the node sequences from the source to `a` and
    /// to `b`, which must have equal hop counts.
    fn cmp_paths(&self, g: &Digraph, mut a: usize, mut b: usize) -> Ordering {
        // Walk both chains back together; the difference nearest the
        // source decides.
        let mut decided = Ordering::Equal;
        while a != b {
            decided = a.cmp(&b);
            match (self.pred[a], self.pred[b]) {
                (Some(pa), Some(pb)) => {
                    a = g.arc(pa).source;
                    b = g.arc(pb).source;
                }
                _ => break,
            }
        }
        decided
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    hops: usize,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on (dist, hops, node).
        other
            .dist
            .total_cmp(&self.dist)
            .then(other.hops.cmp(&self.hops))
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `source`. Among equally short paths the one with fewer
/// hops wins, then the lexicographically smaller node sequence, then the
/// smaller arc index. Self-loops are ignored. Weights must be >= 0.
pub fn dijkstra(g: &Digraph, source: usize) -> ShortestTree {
    let n = g.node_count();
    let mut t = ShortestTree {
        source,
        dist: vec![f64::INFINITY; n],
        hops: vec![usize::MAX; n],
        pred: vec![None; n],
    };
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    t.dist[source] = 0.0;
    t.hops[source] = 0;
    heap.push(Entry {
        dist: 0.0,
        hops: 0,
        node: source,
    });
    while let Some(Entry { node: u, .. }) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &a in g.out_arcs(u) {
            let arc = g.arc(a);
            let v = arc.target;
            if v == u || done[v] {
                continue;
            }
            let d = t.dist[u] + arc.weight;
            let h = t.hops[u] + 1;
            let better = match d.total_cmp(&t.dist[v]).then(h.cmp(&t.hops[v])) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => {
                    let prev = t.pred[v].expect("finite distance has a predecessor");
                    match t.cmp_paths(g, u, g.arc(prev).source) {
                        Ordering::Less => true,
                        Ordering::Equal => a < prev,
                        Ordering::Greater => false,
                    }
                }
            };
            if better {
                t.dist[v] = d;
                t.hops[v] = h;
                t.pred[v] = Some(a);
                heap.push(Entry {
                    dist: d,
                    hops: h,
                    node: v,
                });
            }
        }
    }
    t
}

/// Shortest-path totals for every ordered pair; `None` when unreachable.
pub fn all_pairs(g: &Digraph) -> Vec<Vec<Option<f64>>> {
    (0..g.node_count())
        .into_par_iter()
        .map(|s| {
            let t = dijkstra(g, s);
            t.dist.iter().map(|d| d.is_finite().then_some(*d)).collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexPath {
    pub nodes: Vec<usize>,
    pub arcs: Vec<usize>,
    pub total: f64,
}

pub fn shortest_index_path(g: &Digraph, src: usize, dst: usize) -> Option<IndexPath> {
    let t = dijkstra(g, src);
    let (nodes, arcs) = t.path_to(g, dst)?;
    Some(IndexPath {
        nodes,
        arcs,
        total: t.dist[dst],
    })
}

/// The reachable ordered pair `(s, t)`, `s != t`, with the largest
/// shortest-path total, and its path. Ties go to the smaller `(s, t)`.
pub fn longest_shortest_index_path(g: &Digraph) -> Option<IndexPath> {
    let best = (0..g.node_count())
        .into_par_iter()
        .filter_map(|s| {
            let t = dijkstra(g, s);
            (0..g.node_count())
                .filter(|&v| v != s && t.reachable(v))
                .map(|v| (t.dist[v], s, v))
                .reduce(|a, b| if b.0 > a.0 { b } else { a })
        })
        .reduce_with(
            |a, b| match b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))) {
                Ordering::Greater => b,
                _ => a,
            },
        )?;
    shortest_index_path(g, best.1, best.2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub weight: Weight,
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    /// Meters; edges without a distance add nothing.
    pub total_w_s: f64,
    /// Seconds; edges without a duration add nothing.
    pub total_w_t: i64,
    pub hops: usize,
}

impl PathResult {
    fn from_index(view: &SubgraphView<'_>, g: &Digraph, weight: Weight, p: &IndexPath) -> Self {
        let nodes: Vec<NodeId> = p
            .nodes
            .iter()
            .map(|&i| g.node_id(i).expect("view graph"))
            .collect();
        let edges: Vec<EdgeId> = p
            .arcs
            .iter()
            .map(|&a| g.arc_id(a).expect("view graph"))
            .collect();
        let store = view.store();
        let total_w_s = edges
            .iter()
            .filter_map(|e| store.edge(*e).and_then(|e| e.w_s))
            .sum();
        let total_w_t = edges
            .iter()
            .filter_map(|e| store.edge(*e).and_then(|e| e.w_t))
            .sum();
        PathResult {
            weight,
            hops: edges.len(),
            nodes,
            edges,
            total_w_s,
            total_w_t,
        }
    }
}

fn view_graph(view: &SubgraphView<'_>, weight: Weight) -> Result<Digraph, MetricsError> {
    let g = Digraph::from_view(view, weight);
    if g.has_negative_weight() {
        return Err(MetricsError::NegativeWeight);
    }
    Ok(g)
}

/// Minimum-weight directed path from `src` to `dst` within the view.
pub fn shortest_path(
    view: &SubgraphView<'_>,
    src: NodeId,
    dst: NodeId,
    weight: Weight,
) -> Result<Option<PathResult>, MetricsError> {
    let g = view_graph(view, weight)?;
    let s = g.index_of(src).ok_or(MetricsError::NodeNotInView(src))?;
    let t = g.index_of(dst).ok_or(MetricsError::NodeNotInView(dst))?;
    Ok(shortest_index_path(&g, s, t).map(|p| PathResult::from_index(view, &g, weight, &p)))
}

/// Longest of all shortest paths over reachable pairs; `None` without any.
pub fn longest_shortest_path(
    view: &SubgraphView<'_>,
    weight: Weight,
) -> Result<Option<PathResult>, MetricsError> {
    let g = view_graph(view, weight)?;
    Ok(longest_shortest_index_path(&g).map(|p| PathResult::from_index(view, &g, weight, &p)))
}

/// Total weight of the longest shortest path, 0 when there is none.
pub fn diameter(view: &SubgraphView<'_>, weight: Weight) -> Result<f64, MetricsError> {
    let g = view_graph(view, weight)?;
    Ok(graph_diameter(&g))
}

pub fn graph_diameter(g: &Digraph) -> f64 {
    longest_shortest_index_path(g).map_or(0.0, |p| p.total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_prefers_two_cheap_hops() {
        let g = Digraph::from_arcs(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)]);
        let p = shortest_index_path(&g, 0, 2).unwrap();
        assert_eq!(p.nodes, vec![0, 1, 2]);
        assert_eq!(p.total, 2.0);
    }

    #[test]
    fn identity_path() {
        let g = Digraph::from_arcs(2, [(0, 1, 1.0)]);
        let p = shortest_index_path(&g, 1, 1).unwrap();
        assert_eq!((p.nodes, p.arcs.len(), p.total), (vec![1], 0, 0.0));
        assert!(shortest_index_path(&g, 1, 0).is_none());
    }

    #[test]
    fn ties_prefer_fewer_hops_then_smaller_ids() {
        // 0->3 directly (2) vs 0->1->3 (1+1): fewer hops wins.
        let g = Digraph::from_arcs(4, [(0, 1, 1.0), (1, 3, 1.0), (0, 3, 2.0)]);
        assert_eq!(shortest_index_path(&g, 0, 3).unwrap().nodes, vec![0, 3]);
        // 0->2->3 vs 0->1->3, equal weight and hops: via 1.
        let g = Digraph::from_arcs(4, [(0, 2, 1.0), (2, 3, 1.0), (0, 1, 1.0), (1, 3, 1.0)]);
        assert_eq!(shortest_index_path(&g, 0, 3).unwrap().nodes, vec![0, 1, 3]);
        // Divergence early in the path decides, not late.
        let g = Digraph::from_arcs(
            6,
            [
                (0, 1, 1.0),
                (1, 4, 1.0),
                (4, 5, 1.0),
                (0, 2, 1.0),
                (2, 3, 1.0),
                (3, 5, 1.0),
            ],
        );
        assert_eq!(
            shortest_index_path(&g, 0, 5).unwrap().nodes,
            vec![0, 1, 4, 5]
        );
    }

    #[test]
    fn zero_weight_edges() {
        let g = Digraph::from_arcs(3, [(0, 1, 0.0), (1, 2, 0.0), (0, 2, 0.0)]);
        let p = shortest_index_path(&g, 0, 2).unwrap();
        assert_eq!((p.nodes, p.total), (vec![0, 2], 0.0));
    }

    #[test]
    fn longest_shortest_and_diameter() {
        let chain = Digraph::from_arcs(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]);
        let p = longest_shortest_index_path(&chain).unwrap();
        assert_eq!((p.nodes, p.total), (vec![0, 1, 2, 3], 3.0));
        let split = Digraph::from_arcs(4, [(0, 1, 1.0), (2, 3, 1.0)]);
        assert_eq!(graph_diameter(&split), 1.0);
        assert_eq!(graph_diameter(&Digraph::new(1)), 0.0);
        assert!(longest_shortest_index_path(&Digraph::new(3)).is_none());
    }
}
