//! Centroid decomposition of a rooted tree with bounded degree.
//!
//! Each node of the decomposition is a connected vertex set of the tree.
//! A node with more than one vertex has centroid `c` and children
//! `{c}` followed by the components of `node - c` (ordered by the
//! neighbour of `c` they contain). Single-vertex nodes are leaves.

use std::fmt::Write as _;

use crate::graph::{EdgeId, RootedTree, VertexId};

pub type NodeId = usize;

#[derive(Clone, Debug)]
pub struct DecompNode {
    pub centroid: VertexId,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub size: usize,
    pub depth: usize,
    /// The member closest to the tree root.
    pub top: VertexId,
    /// Sorted Euler entry times of the members.
    pub tin_sorted: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct CentroidTree {
    nodes: Vec<DecompNode>,
    root: NodeId,
    /// For each vertex, the nodes containing it from the root down to its leaf.
    vertex_nodes: Vec<Vec<NodeId>>,
}

/// A vertex of the connected set `vertices` minimizing the largest
/// component left after its removal; ties go to the smaller id.
pub fn find_centroid(tree: &RootedTree, vertices: &[VertexId]) -> VertexId {
    let mut in_set = vec![false; tree.n()];
    for &v in vertices {
        in_set[v] = true;
    }
    let mut scratch = Scratch::new(tree.n());
    centroid_of(tree, vertices, &in_set, &mut scratch)
}

struct Scratch {
    sub: Vec<usize>,
    par: Vec<VertexId>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            sub: vec![0; n],
            par: vec![usize::MAX; n],
        }
    }
}

fn tree_neighbors(tree: &RootedTree, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
    tree.parent(v).into_iter().chain(tree.children(v).iter().copied())
}

fn centroid_of(tree: &RootedTree, vertices: &[VertexId], in_set: &[bool], s: &mut Scratch) -> VertexId {
    let total = vertices.len();
    debug_assert!(total > 0);
    if total == 1 {
        return vertices[0];
    }
    // DFS order rooted at the first member
    let start = vertices[0];
    let mut order = Vec::with_capacity(total);
    let mut stack = vec![start];
    s.par[start] = usize::MAX;
    while let Some(v) = stack.pop() {
        order.push(v);
        for w in tree_neighbors(tree, v) {
            if in_set[w] && w != s.par[v] {
                s.par[w] = v;
                stack.push(w);
            }
        }
    }
    debug_assert_eq!(order.len(), total, "vertex set is not connected");
    for &v in order.iter().rev() {
        s.sub[v] = 1;
        for w in tree_neighbors(tree, v) {
            if in_set[w] && w != s.par[v] {
                s.sub[v] += s.sub[w];
            }
        }
    }
    let mut best = (usize::MAX, usize::MAX);
    for &v in &order {
        let mut worst = total - s.sub[v];
        for w in tree_neighbors(tree, v) {
            if in_set[w] && w != s.par[v] {
                worst = worst.max(s.sub[w]);
            }
        }
        best = best.min((worst, v));
    }
    best.1
}

impl CentroidTree {
    pub fn build(tree: &RootedTree) -> Self {
        let n = tree.n();
        let mut ct = CentroidTree {
            nodes: Vec::with_capacity(2 * n),
            root: 0,
            vertex_nodes: vec![Vec::new(); n],
        };
        if n == 0 {
            return ct;
        }
        let mut in_set = vec![false; n];
        let mut removed = vec![false; n];
        let mut scratch = Scratch::new(n);

        // (member list, parent node)
        let all: Vec<VertexId> = tree.preorder().to_vec();
        let mut work: Vec<(Vec<VertexId>, Option<NodeId>)> = vec![(all, None)];
        while let Some((members, parent)) = work.pop() {
            let id = ct.push_node(tree, &members, parent);
            if members.len() == 1 {
                ct.nodes[id].centroid = members[0];
                continue;
            }
            for &v in &members {
                in_set[v] = true;
            }
            let c = centroid_of(tree, &members, &in_set, &mut scratch);
            ct.nodes[id].centroid = c;
            removed[c] = true;

            let mut parts: Vec<Vec<VertexId>> = vec![vec![c]];
            let mut nbrs: Vec<VertexId> = tree_neighbors(tree, c).filter(|&w| in_set[w] && !removed[w]).collect();
            nbrs.sort_unstable();
            for w in nbrs {
                let mut comp = Vec::new();
                let mut stack = vec![w];
                in_set[w] = false;
                while let Some(x) = stack.pop() {
                    comp.push(x);
                    for y in tree_neighbors(tree, x) {
                        if in_set[y] && !removed[y] {
                            in_set[y] = false;
                            stack.push(y);
                        }
                    }
                }
                parts.push(comp);
            }
            in_set[c] = false;
            // children get consecutive ids in τ0, τ1, ... order
            for part in parts.into_iter().rev() {
                work.push((part, Some(id)));
            }
        }
        for v in 0..n {
            debug_assert!(!ct.vertex_nodes[v].is_empty());
        }
        ct
    }

    fn push_node(&mut self, tree: &RootedTree, members: &[VertexId], parent: Option<NodeId>) -> NodeId {
        let id = self.nodes.len();
        let depth = parent.map_or(0, |p| self.nodes[p].depth + 1);
        let mut tin_sorted: Vec<u32> = members.iter().map(|&v| tree.tin(v)).collect();
        tin_sorted.sort_unstable();
        let top = *members.iter().min_by_key(|&&v| tree.depth(v)).expect("non-empty node");
        self.nodes.push(DecompNode {
            centroid: usize::MAX,
            parent,
            children: Vec::new(),
            size: members.len(),
            depth,
            top,
            tin_sorted,
        });
        match parent {
            Some(p) => self.nodes[p].children.push(id),
            None => self.root = id,
        }
        for &v in members {
            debug_assert_eq!(self.vertex_nodes[v].len(), depth);
            self.vertex_nodes[v].push(id);
        }
        id
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &DecompNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[DecompNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    pub fn centroid(&self, id: NodeId) -> VertexId {
        self.nodes[id].centroid
    }

    #[inline]
    pub fn size(&self, id: NodeId) -> usize {
        self.nodes[id].size
    }

    /// Nodes containing `v`, root first, ending with its single-vertex leaf.
    pub fn vertex_nodes(&self, v: VertexId) -> &[NodeId] {
        &self.vertex_nodes[v]
    }

    pub fn vertex_leaf(&self, v: VertexId) -> NodeId {
        *self.vertex_nodes[v].last().expect("vertex has a leaf")
    }

    /// Number of levels (a single vertex has height 1).
    pub fn height(&self) -> usize {
        self.vertex_nodes.iter().map(Vec::len).max().unwrap_or(0)
    }

    #[inline]
    pub fn contains(&self, id: NodeId, v: VertexId) -> bool {
        self.vertex_nodes[v].get(self.nodes[id].depth) == Some(&id)
    }

    /// The child of `id` containing `v`; `v` must be a member of `id` and
    /// `id` must not be a leaf.
    #[inline]
    pub fn child_containing(&self, id: NodeId, v: VertexId) -> NodeId {
        debug_assert!(self.contains(id, v));
        self.vertex_nodes[v][self.nodes[id].depth + 1]
    }

    /// The vertex used as the split point for lines stored under `id`:
    /// the vertex itself for single-vertex nodes, otherwise the centroid of
    /// the parent node. `None` for the root.
    pub fn effective_parent_centroid(&self, id: NodeId) -> Option<VertexId> {
        let node = &self.nodes[id];
        let parent = node.parent?;
        if node.size == 1 {
            Some(node.centroid)
        } else {
            Some(self.nodes[parent].centroid)
        }
    }

    /// The `(c, y)`-tree of node `id` with centroid `c`: the child holding
    /// the first member on the tree path from `y` to `c`, or `None` when
    /// that member is `c` itself.
    pub fn cy_tree(&self, tree: &RootedTree, id: NodeId, y: VertexId) -> Option<NodeId> {
        let node = &self.nodes[id];
        let top = node.top;
        let z = if !tree.is_ancestor(top, y) {
            top
        } else {
            tree.deepest_ancestor_where(y, |a| !tree.is_ancestor(top, a) || self.contains(id, a))
        };
        if z == node.centroid {
            None
        } else {
            Some(self.child_containing(id, z))
        }
    }

    /// The nodes whose vertex set contains the lower endpoint of `e`, from
    /// the root down to that vertex's leaf.
    pub fn mark_de_path(&self, tree: &RootedTree, e: EdgeId) -> &[NodeId] {
        &self.vertex_nodes[tree.lower(e)]
    }

    /// Whether node `id` has a member below tree edge `e`.
    #[inline]
    pub fn intersects_de(&self, tree: &RootedTree, id: NodeId, e: EdgeId) -> bool {
        let q = tree.lower(e);
        let (lo, hi) = (tree.tin(q), tree.tout(q));
        let tins = &self.nodes[id].tin_sorted;
        let i = tins.partition_point(|&t| t < lo);
        i < tins.len() && tins[i] <= hi
    }

    /// Members of node `id` in increasing id order. O(n).
    pub fn members(&self, id: NodeId) -> Vec<VertexId> {
        (0..self.vertex_nodes.len()).filter(|&v| self.contains(id, v)).collect()
    }

    /// Indented text dump, one node per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        if self.nodes.is_empty() {
            return out;
        }
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            let members = self.members(id);
            let _ = writeln!(
                out,
                "{}node {} centroid={} size={} members={:?}",
                "  ".repeat(node.depth),
                id,
                node.centroid,
                node.size,
                members
            );
            stack.extend(node.children.iter().rev());
        }
        out
    }
}
