//! Brandes betweenness over directed shortest paths.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::graph::Digraph;

/// Sources per parallel work unit. Partial sums are combined in source
/// order, so results do not depend on the thread count.
const CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

fn distances(g: &Digraph, s: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.node_count()];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(Reverse(Key(0.0, s)));
    while let Some(Reverse(Key(d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &a in g.out_arcs(u) {
            let arc = g.arc(a);
            let nd = d + arc.weight;
            if nd < dist[arc.target] {
                dist[arc.target] = nd;
                heap.push(Reverse(Key(nd, arc.target)));
            }
        }
    }
    dist
}

/// Dependency of every node on source `s`, added into `acc`.
fn accumulate(g: &Digraph, s: usize, acc: &mut [f64]) {
    let n = g.node_count();
    let dist = distances(g, s);
    let tight = |a: usize| {
        let arc = g.arc(a);
        arc.source != arc.target && dist[arc.source] + arc.weight == dist[arc.target]
    };

    // Topological order of the shortest-path DAG. Zero-weight arcs can join
    // nodes at equal distance, so distance order alone is not enough.
    let mut indeg = vec![0usize; n];
    for (a, arc) in g.arcs().iter().enumerate() {
        if dist[arc.source].is_finite() && tight(a) {
            indeg[arc.target] += 1;
        }
    }
    let mut ready = BinaryHeap::new();
    let mut pending: BinaryHeap<Reverse<Key>> = BinaryHeap::new();
    for v in 0..n {
        if dist[v].is_finite() {
            pending.push(Reverse(Key(dist[v], v)));
            if indeg[v] == 0 {
                ready.push(Reverse(Key(dist[v], v)));
            }
        }
    }
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut sigma = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    sigma[s] = 1.0;
    loop {
        let v = match ready.pop() {
            Some(Reverse(Key(_, v))) if !done[v] => v,
            Some(_) => continue,
            None => {
                // Only a zero-weight cycle gets here; cut it at the smallest
                // remaining (distance, index) node and drop its pending in-arcs.
                match std::iter::from_fn(|| pending.pop()).find(|Reverse(Key(_, v))| !done[*v]) {
                    Some(Reverse(Key(_, v))) => v,
                    None => break,
                }
            }
        };
        done[v] = true;
        order.push(v);
        for &a in g.out_arcs(v) {
            if !tight(a) {
                continue;
            }
            let w = g.arc(a).target;
            if done[w] {
                continue;
            }
            sigma[w] += sigma[v];
            preds[w].push(v);
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.push(Reverse(Key(dist[w], w)));
            }
        }
    }

    let mut delta = vec![0.0f64; n];
    for &w in order.iter().rev() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
        if w != s {
            acc[w] += delta[w];
        }
    }
}

/// Raw betweenness: for every ordered pair `(s, t)` of distinct nodes, the
/// fraction of shortest `s -> t` paths through each intermediate node.
/// Parallel arcs are distinct paths; self-loops are ignored.
pub fn betweenness(g: &Digraph) -> Vec<f64> {
    let n = g.node_count();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            for &s in chunk {
                accumulate(g, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for p in partials {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total
}

/// Divides by `(n - 1)(n - 2)`, the number of ordered pairs excluding a node.
pub fn normalize(scores: &mut [f64]) {
    let n = scores.len() as f64;
    if scores.len() > 2 {
        let k = (n - 1.0) * (n - 2.0);
        for s in scores {
            *s /= k;
        }
    }
}
