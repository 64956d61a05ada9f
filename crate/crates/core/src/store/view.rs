use crate::time::TimeWindow;

use super::{EdgeId, GraphStore, NodeId, TvgEdge, TvgNode};

/// Immutable id sets over a store, produced by a windowed query.
///
/// Ids are copied at construction so the view does not change even if the
/// caller later builds another view from the same store.
#[derive(Debug, Clone)]
pub struct SubgraphView<'a> {
    store: &'a GraphStore,
    window: TimeWindow,
    nodes: Vec<NodeId>,
    edges: Vec<EdgeId>,
}

impl<'a> SubgraphView<'a> {
    /// `nodes` and `edges` must be sorted and deduplicated; every edge
    /// endpoint must be in `nodes`.
    pub(crate) fn new(
        store: &'a GraphStore,
        window: TimeWindow,
        nodes: Vec<NodeId>,
        edges: Vec<EdgeId>,
    ) -> Self {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        SubgraphView {
            store,
            window,
            nodes,
            edges,
        }
    }

    pub fn store(&self) -> &'a GraphStore {
        self.store
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edge_ids(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_node(&self, id: NodeId) -> bool {
        self.nodes.binary_search(&id).is_ok()
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.edges.binary_search(&id).is_ok()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &'a TvgNode> + '_ {
        let store = self.store;
        self.nodes.iter().map(move |id| &store.nodes[id.index()])
    }

    pub fn edges(&self) -> impl Iterator<Item = &'a TvgEdge> + '_ {
        let store = self.store;
        self.edges.iter().map(move |id| &store.edges[id.index()])
    }

    /// Out-degree of `id` counting only view edges.
    pub fn out_degree(&self, id: NodeId) -> usize {
        self.store
            .out_edges(id)
            .iter()
            .filter(|e| self.contains_edge(**e))
            .count()
    }

    /// In-degree of `id` counting only view edges.
    pub fn in_degree(&self, id: NodeId) -> usize {
        self.store
            .in_edges(id)
            .iter()
            .filter(|e| self.contains_edge(**e))
            .count()
    }
}
