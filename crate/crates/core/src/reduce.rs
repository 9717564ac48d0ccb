//! Degree reduction: turns a rooted spanning tree into one where every
//! vertex has at most two children, without changing any distance between
//! original vertices.
//!
//! Every vertex `u` with `h >= 3` children `v_1..v_h` receives a balanced
//! binary gadget of zero-weight tree edges rooted at `u` with leaves
//! `x_1..x_h`; the tree edge `(u, v_i)` is re-attached as `(x_i, v_i)` and
//! keeps both its weight and its edge id. Non-tree edges are untouched, so
//! every original edge id keeps its meaning in the reduced instance.

use crate::graph::{EdgeId, Instance, RootedTree, ValidatedInstance, VertexId, WeightedGraph};

/// Correspondence between an instance and its degree-reduced form.
#[derive(Clone, Debug)]
pub struct ReductionMap {
    /// Original edge id -> reduced edge id, for tree edges.
    forward: Vec<Option<EdgeId>>,
    /// Reduced vertex -> original vertex, `None` for gadget vertices.
    vertex_origin: Vec<Option<VertexId>>,
    original_m: usize,
}

impl ReductionMap {
    /// The reduced tree edge that stands for original tree edge `e`.
    pub fn forward(&self, e: EdgeId) -> Option<EdgeId> {
        self.forward.get(e).copied().flatten()
    }

    pub fn vertex_origin(&self, v: VertexId) -> Option<VertexId> {
        self.vertex_origin[v]
    }

    /// Whether reduced edge `id` was added by the reduction.
    pub fn is_gadget_edge(&self, id: EdgeId) -> bool {
        id >= self.original_m
    }

    /// True when no gadget vertex was added.
    pub fn is_identity(&self) -> bool {
        self.vertex_origin.iter().all(Option::is_some)
    }
}

/// Reduces `instance` so that every vertex of the tree has at most two
/// children. Returns the reduced instance (which may contain zero-weight
/// tree edges and need not be 2-edge-connected) and the mapping back.
pub fn reduce_to_binary(instance: &ValidatedInstance) -> (Instance, ReductionMap) {
    let tree = &instance.tree;
    let n = instance.graph.n();
    let m = instance.graph.m();
    let mut graph: WeightedGraph = instance.graph.clone();
    let mut tree_edges: Vec<EdgeId> = tree.tree_edges().collect();

    for u in 0..n {
        let kids = tree.children(u);
        if kids.len() <= 2 {
            continue;
        }
        let leaves: Vec<(VertexId, EdgeId)> = kids
            .iter()
            .map(|&v| (v, tree.parent_edge(v).expect("child has a parent edge")))
            .collect();
        attach_gadget(&mut graph, &mut tree_edges, u, &leaves);
    }

    let mut forward = vec![None; m];
    for e in tree.tree_edges() {
        forward[e] = Some(e);
    }
    let vertex_origin = (0..graph.n()).map(|v| (v < n).then_some(v)).collect();
    let reduced_tree = RootedTree::new(&graph, &tree_edges, tree.root());
    debug_assert!(reduced_tree.max_children() <= 2);
    (
        Instance {
            graph,
            tree: reduced_tree,
        },
        ReductionMap {
            forward,
            vertex_origin,
            original_m: m,
        },
    )
}

// Splits `leaves` into halves under `at`. A half with one child edge gets a
// leaf vertex x_i carrying the re-attached edge; larger halves recurse.
fn attach_gadget(graph: &mut WeightedGraph, tree_edges: &mut Vec<EdgeId>, at: VertexId, leaves: &[(VertexId, EdgeId)]) {
    let mid = leaves.len().div_ceil(2);
    for half in [&leaves[..mid], &leaves[mid..]] {
        let node = graph.add_vertex();
        tree_edges.push(graph.add_edge(at, node, 0));
        if let [(child, id)] = half {
            let owner = graph.edge(*id).other(*child);
            graph.reattach(*id, owner, node);
        } else {
            attach_gadget(graph, tree_edges, node, half);
        }
    }
}
