//! Weighted graphs, rooted spanning trees and instance validation.

use std::ops::Deref;

use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type Weight = i64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub w: Weight,
}

impl Edge {
    /// The endpoint that is not `x`. `x` must be an endpoint.
    #[inline]
    pub fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            debug_assert_eq!(self.v, x);
            self.u
        }
    }
}

/// Undirected edge-weighted graph stored as an edge list plus adjacency.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId, Weight)>) -> Self {
        let mut g = WeightedGraph::new(n);
        for (u, v, w) in edges {
            g.add_edge(u, v, w);
        }
        g
    }

    /// Appends an edge and returns its id. Ids are assigned consecutively.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, w: Weight) -> EdgeId {
        assert!(u < self.n && v < self.n, "edge ({u},{v}) out of range");
        let id = self.edges.len();
        self.edges.push(Edge { u, v, w });
        self.adj[u].push((v, id));
        if u != v {
            self.adj[v].push((u, id));
        }
        id
    }

    pub(crate) fn add_vertex(&mut self) -> VertexId {
        self.adj.push(Vec::new());
        self.n += 1;
        self.n - 1
    }

    /// Moves the `from` endpoint of edge `id` to `to`.
    pub(crate) fn reattach(&mut self, id: EdgeId, from: VertexId, to: VertexId) {
        let e = self.edges[id];
        let keep = e.other(from);
        self.adj[from].retain(|&(_, eid)| eid != id);
        self.adj[to].push((keep, id));
        for entry in self.adj[keep].iter_mut() {
            if entry.1 == id {
                entry.0 = to;
            }
        }
        let e = &mut self.edges[id];
        if e.u == from {
            e.u = to;
        } else {
            e.v = to;
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        if u >= self.n || v >= self.n {
            return None;
        }
        self.adj[u].iter().find(|&&(x, _)| x == v).map(|&(_, id)| id)
    }

    pub fn total_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// All edges whose removal disconnects the graph (iterative lowlink).
    pub fn bridges(&self) -> Vec<EdgeId> {
        let n = self.n;
        let mut tin = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut timer = 0;
        let mut out = Vec::new();
        // (vertex, edge used to enter, next adjacency index)
        let mut stack: Vec<(VertexId, EdgeId, usize)> = Vec::new();
        for s in 0..n {
            if tin[s] != usize::MAX {
                continue;
            }
            tin[s] = timer;
            low[s] = timer;
            timer += 1;
            stack.push((s, usize::MAX, 0));
            while let Some(&mut (v, pe, ref mut i)) = stack.last_mut() {
                if *i < self.adj[v].len() {
                    let (to, id) = self.adj[v][*i];
                    *i += 1;
                    if id == pe {
                        continue;
                    }
                    if tin[to] == usize::MAX {
                        tin[to] = timer;
                        low[to] = timer;
                        timer += 1;
                        stack.push((to, id, 0));
                    } else {
                        low[v] = low[v].min(tin[to]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _, _)) = stack.last() {
                        low[p] = low[p].min(low[v]);
                        if low[v] > tin[p] {
                            out.push(pe);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(to, _) in &self.adj[v] {
                if !seen[to] {
                    seen[to] = true;
                    count += 1;
                    stack.push(to);
                }
            }
        }
        count == self.n
    }
}

/// Which side of a failing tree edge a vertex lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// The component containing the root.
    Up,
    /// The subtree below the edge.
    Down,
}

/// A spanning tree rooted at a fixed vertex with O(1) LCA and weighted depths.
#[derive(Clone, Debug)]
pub struct RootedTree {
    root: VertexId,
    parent: Vec<Option<VertexId>>,
    parent_edge: Vec<Option<EdgeId>>,
    children: Vec<Vec<VertexId>>,
    depth: Vec<u32>,
    depth_w: Vec<Weight>,
    tin: Vec<u32>,
    tout: Vec<u32>,
    preorder: Vec<VertexId>,
    // edge id -> lower endpoint for tree edges
    lower: Vec<Option<VertexId>>,
    // Euler tour sparse table over first occurrences
    first: Vec<u32>,
    sparse: Vec<Vec<u32>>,
    // binary lifting, up[k][v] = 2^k-th ancestor (root maps to itself)
    up: Vec<Vec<u32>>,
}

impl RootedTree {
    /// Builds the rooted tree from `tree_edges` of `graph`. The edges must
    /// form a spanning tree; this is checked by [`validate_instance`], here
    /// it is only asserted.
    pub fn new(graph: &WeightedGraph, tree_edges: &[EdgeId], root: VertexId) -> Self {
        let n = graph.n();
        let mut tadj: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); n];
        let mut lower = vec![None; graph.m()];
        for &id in tree_edges {
            let e = graph.edge(id);
            tadj[e.u].push((e.v, id));
            tadj[e.v].push((e.u, id));
        }
        for list in tadj.iter_mut() {
            list.sort_unstable();
        }
        let mut parent = vec![None; n];
        let mut parent_edge = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0u32; n];
        let mut depth_w = vec![0; n];
        let mut tin = vec![0u32; n];
        let mut tout = vec![0u32; n];
        let mut preorder = Vec::with_capacity(n);
        let mut visited = vec![false; n];
        let mut euler: Vec<u32> = Vec::with_capacity(2 * n);
        let mut first = vec![0u32; n];

        let mut stack: Vec<(VertexId, usize)> = vec![(root, 0)];
        visited[root] = true;
        tin[root] = 0;
        preorder.push(root);
        first[root] = 0;
        euler.push(root as u32);
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < tadj[v].len() {
                let (to, id) = tadj[v][*i];
                *i += 1;
                if visited[to] {
                    continue;
                }
                visited[to] = true;
                parent[to] = Some(v);
                parent_edge[to] = Some(id);
                lower[id] = Some(to);
                children[v].push(to);
                depth[to] = depth[v] + 1;
                depth_w[to] = depth_w[v] + graph.edge(id).w;
                tin[to] = preorder.len() as u32;
                preorder.push(to);
                first[to] = euler.len() as u32;
                euler.push(to as u32);
                stack.push((to, 0));
            } else {
                tout[v] = preorder.len() as u32 - 1;
                stack.pop();
                if let Some(&(p, _)) = stack.last() {
                    euler.push(p as u32);
                }
            }
        }
        assert_eq!(preorder.len(), n, "tree edges do not span the graph");

        // sparse table over euler keyed by depth
        let len = euler.len();
        let mut sparse = vec![euler.clone()];
        let mut k = 1;
        while (1 << k) <= len {
            let prev = &sparse[k - 1];
            let half = 1 << (k - 1);
            let row: Vec<u32> = (0..=len - (1 << k))
                .map(|i| {
                    let a = prev[i];
                    let b = prev[i + half];
                    if depth[a as usize] <= depth[b as usize] {
                        a
                    } else {
                        b
                    }
                })
                .collect();
            sparse.push(row);
            k += 1;
        }

        let levels = (usize::BITS - n.max(1).leading_zeros()) as usize + 1;
        let mut up = Vec::with_capacity(levels);
        up.push((0..n).map(|v| parent[v].unwrap_or(v) as u32).collect::<Vec<_>>());
        for k in 1..levels {
            let prev = &up[k - 1];
            let row = (0..n).map(|v| prev[prev[v] as usize]).collect();
            up.push(row);
        }

        RootedTree {
            root,
            parent,
            parent_edge,
            children,
            depth,
            depth_w,
            tin,
            tout,
            preorder,
            lower,
            first,
            sparse,
            up,
        }
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn parent_edge(&self, v: VertexId) -> Option<EdgeId> {
        self.parent_edge[v]
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    pub fn depth(&self, v: VertexId) -> u32 {
        self.depth[v]
    }

    pub fn depth_w(&self, v: VertexId) -> Weight {
        self.depth_w[v]
    }

    pub fn tin(&self, v: VertexId) -> u32 {
        self.tin[v]
    }

    pub fn tout(&self, v: VertexId) -> u32 {
        self.tout[v]
    }

    pub fn preorder(&self) -> &[VertexId] {
        &self.preorder
    }

    /// Tree edges with their lower endpoints, in postorder of the lower endpoint.
    pub fn edges_postorder(&self) -> Vec<EdgeId> {
        self.preorder
            .iter()
            .rev()
            .filter_map(|&v| self.parent_edge[v])
            .collect()
    }

    pub fn is_tree_edge(&self, id: EdgeId) -> bool {
        self.lower.get(id).is_some_and(|l| l.is_some())
    }

    /// Lower endpoint of tree edge `e`. Panics if `e` is not a tree edge.
    pub fn lower(&self, e: EdgeId) -> VertexId {
        self.lower[e].expect("not a tree edge")
    }

    pub fn tree_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.preorder.iter().filter_map(|&v| self.parent_edge[v])
    }

    pub fn max_children(&self) -> usize {
        self.children.iter().map(Vec::len).max().unwrap_or(0)
    }

    #[inline]
    pub fn is_ancestor(&self, a: VertexId, b: VertexId) -> bool {
        self.tin[a] <= self.tin[b] && self.tin[b] <= self.tout[a]
    }

    #[inline]
    pub fn lca(&self, a: VertexId, b: VertexId) -> VertexId {
        let (mut l, mut r) = (self.first[a] as usize, self.first[b] as usize);
        if l > r {
            std::mem::swap(&mut l, &mut r);
        }
        let k = (usize::BITS - 1 - (r - l + 1).leading_zeros()) as usize;
        let x = self.sparse[k][l];
        let y = self.sparse[k][r + 1 - (1 << k)];
        if self.depth[x as usize] <= self.depth[y as usize] {
            x as usize
        } else {
            y as usize
        }
    }

    /// Weighted distance in the tree.
    #[inline]
    pub fn dist(&self, a: VertexId, b: VertexId) -> Weight {
        let c = self.lca(a, b);
        self.depth_w[a] + self.depth_w[b] - 2 * self.depth_w[c]
    }

    /// Which side of tree edge `e` the vertex `x` lies on.
    #[inline]
    pub fn cut_side(&self, e: EdgeId, x: VertexId) -> Side {
        if self.is_ancestor(self.lower(e), x) {
            Side::Down
        } else {
            Side::Up
        }
    }

    #[inline]
    pub fn in_down(&self, e: EdgeId, x: VertexId) -> bool {
        self.cut_side(e, x) == Side::Down
    }

    /// The deepest ancestor `a` of `v` (possibly `v` itself) with `pred(a)`.
    /// Along the path from the root down to `v`, `pred` must hold on a
    /// non-empty prefix starting at the root and fail everywhere below it.
    pub(crate) fn deepest_ancestor_where(&self, v: VertexId, pred: impl Fn(VertexId) -> bool) -> VertexId {
        if pred(v) {
            return v;
        }
        let mut cur = v;
        for k in (0..self.up.len()).rev() {
            let a = self.up[k][cur] as usize;
            if !pred(a) {
                cur = a;
            }
        }
        self.parent[cur].expect("predicate fails at the root")
    }
}

/// A graph together with a rooted spanning tree of it.
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: WeightedGraph,
    pub tree: RootedTree,
}

impl Instance {
    /// Whether `g` reconnects the two components of `T - e`.
    pub fn is_swap_edge(&self, e: EdgeId, g: EdgeId) -> bool {
        if g == e || self.tree.is_tree_edge(g) {
            return false;
        }
        let edge = self.graph.edge(g);
        self.tree.in_down(e, edge.u) != self.tree.in_down(e, edge.v)
    }

    /// All swap edges of tree edge `e`, in increasing id order.
    pub fn swap_edges(&self, e: EdgeId) -> Vec<EdgeId> {
        (0..self.graph.m()).filter(|&g| self.is_swap_edge(e, g)).collect()
    }

    /// Endpoints of swap edge `g` ordered as (U_e side, D_e side).
    #[inline]
    pub fn orient(&self, e: EdgeId, g: EdgeId) -> (VertexId, VertexId) {
        let edge = self.graph.edge(g);
        if self.tree.in_down(e, edge.v) {
            (edge.u, edge.v)
        } else {
            (edge.v, edge.u)
        }
    }

    pub fn tree_edge_ids(&self) -> Vec<EdgeId> {
        let mut ids: Vec<EdgeId> = self.tree.tree_edges().collect();
        ids.sort_unstable();
        ids
    }
}

/// An instance whose graph is 2-edge-connected with positive weights and
/// whose tree spans it.
#[derive(Clone, Debug)]
pub struct ValidatedInstance(Instance);

impl Deref for ValidatedInstance {
    type Target = Instance;
    fn deref(&self) -> &Instance {
        &self.0
    }
}

impl ValidatedInstance {
    pub fn into_inner(self) -> Instance {
        self.0
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("edge {0} has a non-positive weight")]
    NonPositiveWeight(EdgeId),
    #[error("edge {0} is a self-loop")]
    SelfLoop(EdgeId),
    #[error("edge {0} duplicates an earlier edge between the same endpoints")]
    ParallelEdge(EdgeId),
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(VertexId),
    #[error("tree edge id {0} does not exist")]
    UnknownTreeEdge(EdgeId),
    #[error("graph is not connected")]
    NotConnected,
    #[error("tree edges do not form a spanning tree")]
    NotSpanning,
    #[error("edge {0} is a bridge; the graph is not 2-edge-connected")]
    HasBridge(EdgeId),
}

/// Checks the preconditions of the swap-edge problem and builds the rooted tree.
pub fn validate_instance(
    graph: WeightedGraph,
    tree_edges: &[EdgeId],
    root: VertexId,
) -> Result<ValidatedInstance, ValidationError> {
    let n = graph.n();
    if root >= n {
        return Err(ValidationError::VertexOutOfRange(root));
    }
    let mut seen_pairs = std::collections::HashSet::new();
    for (id, e) in graph.edges().iter().enumerate() {
        if e.u == e.v {
            return Err(ValidationError::SelfLoop(id));
        }
        if e.w <= 0 {
            return Err(ValidationError::NonPositiveWeight(id));
        }
        if !seen_pairs.insert((e.u.min(e.v), e.u.max(e.v))) {
            return Err(ValidationError::ParallelEdge(id));
        }
    }
    if !graph.is_connected() {
        return Err(ValidationError::NotConnected);
    }
    if tree_edges.len() + 1 != n {
        return Err(ValidationError::NotSpanning);
    }
    let mut dsu = Dsu::new(n);
    let mut used = vec![false; graph.m()];
    for &id in tree_edges {
        if id >= graph.m() {
            return Err(ValidationError::UnknownTreeEdge(id));
        }
        if used[id] {
            return Err(ValidationError::NotSpanning);
        }
        used[id] = true;
        let e = graph.edge(id);
        if !dsu.union(e.u, e.v) {
            return Err(ValidationError::NotSpanning);
        }
    }
    if let Some(&b) = graph.bridges().first() {
        return Err(ValidationError::HasBridge(b));
    }
    let tree = RootedTree::new(&graph, tree_edges, root);
    Ok(ValidatedInstance(Instance { graph, tree }))
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fixture_g2;
    use proptest::prelude::*;

    fn c4(weights: [Weight; 4]) -> WeightedGraph {
        WeightedGraph::from_edges(
            4,
            [
                (0, 1, weights[0]),
                (1, 2, weights[1]),
                (2, 3, weights[2]),
                (0, 3, weights[3]),
            ],
        )
    }

    #[test]
    fn c4_with_path_tree_is_valid() {
        let inst = validate_instance(c4([1; 4]), &[0, 1, 2], 0).unwrap();
        assert_eq!(inst.tree.root(), 0);
        assert_eq!(inst.swap_edges(1), vec![3]);
    }

    #[test]
    fn path_graph_has_bridge() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1), (1, 2, 1)]);
        assert!(matches!(
            validate_instance(g, &[0, 1], 0),
            Err(ValidationError::HasBridge(_))
        ));
    }

    #[test]
    fn zero_weight_rejected() {
        let err = validate_instance(c4([1, 0, 1, 1]), &[0, 1, 2], 0).unwrap_err();
        assert_eq!(err, ValidationError::NonPositiveWeight(1));
    }

    #[test]
    fn cyclic_tree_rejected() {
        let g = WeightedGraph::from_edges(4, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (2, 3, 1), (3, 0, 1)]);
        assert_eq!(
            validate_instance(g, &[0, 1, 2], 0).unwrap_err(),
            ValidationError::NotSpanning
        );
    }

    #[test]
    fn disconnected_rejected() {
        let g = WeightedGraph::from_edges(6, [(0, 1, 1), (1, 2, 1), (2, 0, 1), (3, 4, 1), (4, 5, 1), (5, 3, 1)]);
        assert_eq!(
            validate_instance(g, &[0, 1, 3, 4], 0).unwrap_err(),
            ValidationError::NotConnected
        );
    }

    #[test]
    fn fixture_distances() {
        let inst = fixture_g2();
        let t = &inst.tree;
        assert_eq!(t.dist(0, 3), 3);
        assert_eq!(t.dist(3, 4), 2);
        for x in 0..5 {
            assert_eq!(t.dist(x, x), 0);
        }
    }

    #[test]
    fn fixture_cut_sides() {
        let inst = fixture_g2();
        let id = |u, v| inst.graph.find_edge(u, v).unwrap();
        let t = &inst.tree;
        assert_eq!(t.cut_side(id(1, 2), 4), Side::Down);
        assert_eq!(t.cut_side(id(1, 2), 0), Side::Up);
        assert_eq!(t.cut_side(id(0, 1), 1), Side::Down);
    }

    #[test]
    fn fixture_swap_predicate() {
        let inst = fixture_g2();
        let id = |u, v| inst.graph.find_edge(u, v).unwrap();
        assert!(inst.is_swap_edge(id(1, 2), id(0, 3)));
        assert!(!inst.is_swap_edge(id(2, 3), id(1, 4)));
        assert!(!inst.is_swap_edge(id(0, 1), id(1, 4)));
    }

    fn random_tree(n: usize, seed: u64) -> (WeightedGraph, Vec<EdgeId>) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut g = WeightedGraph::new(n);
        let ids = (1..n)
            .map(|v| {
                let p = rng.gen_range(0..v);
                g.add_edge(p, v, rng.gen_range(1..50))
            })
            .collect();
        (g, ids)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn lca_distance_matches_parent_walk(n in 1usize..200, seed in any::<u64>(), root_pick in any::<usize>()) {
            use rand::{Rng, SeedableRng};
            let (g, ids) = random_tree(n, seed);
            let root = root_pick % n;
            let t = RootedTree::new(&g, &ids, root);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            for _ in 0..25 {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                // walk up from the deeper endpoint
                let (mut x, mut y, mut d) = (a, b, 0);
                while x != y {
                    if t.depth(x) >= t.depth(y) {
                        d += g.edge(t.parent_edge(x).unwrap()).w;
                        x = t.parent(x).unwrap();
                    } else {
                        d += g.edge(t.parent_edge(y).unwrap()).w;
                        y = t.parent(y).unwrap();
                    }
                }
                prop_assert_eq!(t.dist(a, b), d);
            }
        }

        #[test]
        fn cut_sides_partition(n in 2usize..80, seed in any::<u64>()) {
            let (g, ids) = random_tree(n, seed);
            let t = RootedTree::new(&g, &ids, 0);
            for &e in &ids {
                let q = t.lower(e);
                let mut sub = vec![false; n];
                let mut stack = vec![q];
                while let Some(x) = stack.pop() {
                    sub[x] = true;
                    stack.extend_from_slice(t.children(x));
                }
                let down = (0..n).filter(|&x| t.cut_side(e, x) == Side::Down).count();
                let up = (0..n).filter(|&x| t.cut_side(e, x) == Side::Up).count();
                prop_assert_eq!(up + down, n);
                for (x, &in_sub) in sub.iter().enumerate() {
                    prop_assert_eq!(in_sub, t.cut_side(e, x) == Side::Down);
                }
            }
        }
    }
}
