//! Compact index-based digraph that the algorithms run on.

use serde::{Deserialize, Serialize};

use crate::store::{EdgeId, NodeId, SubgraphView, TvgEdge};

/// Which edge attribute weighs a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weight {
    /// Distance in meters.
    Ws,
    /// Duration in seconds.
    Wt,
    /// Every edge counts 1.
    Hops,
}

impl Weight {
    pub fn of(self, e: &TvgEdge) -> Option<f64> {
        match self {
            Weight::Ws => e.w_s,
            Weight::Wt => e.w_t.map(|t| t as f64),
            Weight::Hops => Some(1.0),
        }
    }
}

impl std::str::FromStr for Weight {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ws" | "w_s" | "distance" => Ok(Weight::Ws),
            "wt" | "w_t" | "time" => Ok(Weight::Wt),
            "hops" | "unit" => Ok(Weight::Hops),
            _ => Err(format!("unknown weight {s:?} (expected ws, wt or hops)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// Nodes are `0..n`; arcs keep insertion order and may be parallel.
#[derive(Debug, Clone, Default)]
pub struct Digraph {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    /// Store ids behind each node and arc, when built from a view.
    node_ids: Vec<NodeId>,
    arc_ids: Vec<EdgeId>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph {
            arcs: Vec::new(),
            out: vec![Vec::new(); n],
            inc: vec![Vec::new(); n],
            node_ids: Vec::new(),
            arc_ids: Vec::new(),
        }
    }

    /// `n` nodes and `(u, v, w)` arcs.
    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut g = Digraph::new(n);
        for (u, v, w) in arcs {
            g.add_arc(u, v, w);
        }
        g
    }

    /// View nodes in id order; arcs are the view edges carrying `weight`.
    pub fn from_view(view: &SubgraphView<'_>, weight: Weight) -> Self {
        let ids = view.node_ids();
        let mut g = Digraph::new(ids.len());
        g.node_ids = ids.to_vec();
        for e in view.edges() {
            let Some(w) = weight.of(e) else { continue };
            let (Ok(u), Ok(v)) = (ids.binary_search(&e.source), ids.binary_search(&e.target))
            else {
                continue;
            };
            g.add_arc(u, v, w);
            g.arc_ids.push(e.id);
        }
        g
    }

    /// Builds from store ids; `arcs` refer to positions in `nodes`.
    pub fn with_ids(
        nodes: Vec<NodeId>,
        arcs: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        let mut g = Digraph::from_arcs(nodes.len(), arcs);
        g.node_ids = nodes;
        g
    }

    pub fn add_arc(&mut self, source: usize, target: usize, weight: f64) -> usize {
        let i = self.arcs.len();
        self.arcs.push(Arc {
            source,
            target,
            weight,
        });
        self.out[source].push(i);
        self.inc[target].push(i);
        i
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arc(&self, i: usize) -> &Arc {
        &self.arcs[i]
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn out_arcs(&self, u: usize) -> &[usize] {
        &self.out[u]
    }

    pub fn in_arcs(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    pub fn node_id(&self, i: usize) -> Option<NodeId> {
        self.node_ids.get(i).copied()
    }

    pub fn arc_id(&self, i: usize) -> Option<EdgeId> {
        self.arc_ids.get(i).copied()
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.node_ids.binary_search(&id).ok()
    }

    pub fn has_negative_weight(&self) -> bool {
        self.arcs
            .iter()
            .any(|a| a.weight.is_nan() || a.weight < 0.0)
    }
}
