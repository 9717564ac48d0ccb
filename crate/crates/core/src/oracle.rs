//! Brute-force references: shortest paths, true stretch of swap trees,
//! exhaustive best swap / best cut edges, and a direct enumeration of the
//! swap dictionary contents.
//!
//! Nothing here shares code with the fast path beyond the graph types;
//! tree distances and edge sides are recomputed by plain traversals.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::centroid::{CentroidTree, NodeId};
use crate::graph::{validate_instance, EdgeId, Instance, ValidatedInstance, VertexId, Weight, WeightedGraph};
use crate::ratio::Ratio;

/// Unreachable marker in distance tables.
pub const UNREACHABLE: Weight = Weight::MAX;

/// Dictionary contents as `(Ψ, Λ) -> sorted [(g, D-endpoint, A, den)]`.
pub type QSnapshot = BTreeMap<(NodeId, NodeId), Vec<(EdgeId, VertexId, Weight, Weight)>>;

/// The five-vertex instance used throughout the tests.
///
/// Tree edges (0,1,1) (1,2,1) (2,3,1) (2,4,1) with ids 0..3, non-tree
/// edges (0,3,2) and (1,4,1) with ids 4 and 5, rooted at 0.
pub fn fixture_g2() -> ValidatedInstance {
    let g = WeightedGraph::from_edges(5, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (2, 4, 1), (0, 3, 2), (1, 4, 1)]);
    validate_instance(g, &[0, 1, 2, 3], 0).expect("fixture is valid")
}

/// Dijkstra from every vertex, optionally ignoring one edge.
pub fn all_pairs_graph(graph: &WeightedGraph, excluded: Option<EdgeId>) -> Vec<Vec<Weight>> {
    (0..graph.n()).map(|s| dijkstra(graph, s, excluded)).collect()
}

fn dijkstra(graph: &WeightedGraph, s: VertexId, excluded: Option<EdgeId>) -> Vec<Weight> {
    let mut dist = vec![UNREACHABLE; graph.n()];
    let mut heap = BinaryHeap::new();
    dist[s] = 0;
    heap.push(Reverse((0, s)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for &(y, id) in graph.neighbors(x) {
            if Some(id) == excluded {
                continue;
            }
            let nd = d + graph.edge(id).w;
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(Reverse((nd, y)));
            }
        }
    }
    dist
}

/// All-pairs distances in the forest formed by `edges`, by DFS from every vertex.
pub fn forest_all_pairs(graph: &WeightedGraph, edges: &[EdgeId]) -> Vec<Vec<Weight>> {
    let n = graph.n();
    let mut adj = vec![Vec::new(); n];
    for &id in edges {
        let e = graph.edge(id);
        adj[e.u].push((e.v, e.w));
        adj[e.v].push((e.u, e.w));
    }
    let mut out = vec![vec![UNREACHABLE; n]; n];
    for (s, row) in out.iter_mut().enumerate() {
        row[s] = 0;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &(y, w) in &adj[x] {
                if row[y] == UNREACHABLE {
                    row[y] = row[x] + w;
                    stack.push(y);
                }
            }
        }
    }
    out
}

/// Cached tree distances and side tests for one instance.
pub struct Oracle<'a> {
    inst: &'a Instance,
    tree_edges: Vec<EdgeId>,
    td: Vec<Vec<Weight>>,
}

impl<'a> Oracle<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let tree_edges: Vec<EdgeId> = inst.tree.tree_edges().collect();
        let td = forest_all_pairs(&inst.graph, &tree_edges);
        Oracle { inst, tree_edges, td }
    }

    pub fn tree_dist(&self, a: VertexId, b: VertexId) -> Weight {
        self.td[a][b]
    }

    /// `true` for vertices of the component of `T - e` without the root.
    pub fn down_side(&self, e: EdgeId) -> Vec<bool> {
        let rest: Vec<EdgeId> = self.tree_edges.iter().copied().filter(|&id| id != e).collect();
        let reach = forest_all_pairs_from(&self.inst.graph, &rest, self.inst.tree.root());
        reach.iter().map(|&d| d == UNREACHABLE).collect()
    }

    /// Swap edges of `e` in increasing id order, each as (id, U endpoint, D endpoint).
    pub fn swap_edges(&self, e: EdgeId, down: &[bool]) -> Vec<(EdgeId, VertexId, VertexId)> {
        let mut out = Vec::new();
        for (id, edge) in self.inst.graph.edges().iter().enumerate() {
            if id == e || self.tree_edges.contains(&id) {
                continue;
            }
            match (down[edge.u], down[edge.v]) {
                (false, true) => out.push((id, edge.u, edge.v)),
                (true, false) => out.push((id, edge.v, edge.u)),
                _ => {}
            }
        }
        out
    }

    fn phi_oriented(&self, f: (EdgeId, VertexId, VertexId), g: (EdgeId, VertexId, VertexId)) -> Ratio {
        let (fid, v, u) = f;
        let (gid, x, y) = g;
        let num = self.td[x][v] + self.inst.graph.edge(fid).w + self.td[u][y];
        Ratio::new(num, self.inst.graph.edge(gid).w)
    }

    /// φ(f, g) for swap edges `f`, `g` of `e`.
    pub fn phi(&self, e: EdgeId, f: EdgeId, g: EdgeId) -> Ratio {
        let down = self.down_side(e);
        let s = self.swap_edges(e, &down);
        let find = |id| *s.iter().find(|t| t.0 == id).expect("not a swap edge");
        self.phi_oriented(find(f), find(g))
    }

    /// max over g ∈ S(e) of φ(f, g).
    pub fn varphi(&self, e: EdgeId, f: EdgeId) -> Ratio {
        let down = self.down_side(e);
        let s = self.swap_edges(e, &down);
        let fo = *s.iter().find(|t| t.0 == f).expect("not a swap edge");
        s.iter()
            .map(|&g| self.phi_oriented(fo, g))
            .max()
            .expect("S(e) contains f")
    }

    /// Best cut edge restricted to swap edges accepted by `keep`: argmin of
    /// varphi, ties by smaller id.
    fn bce_where(&self, e: EdgeId, keep: impl Fn(VertexId) -> bool) -> Option<(EdgeId, Ratio)> {
        let down = self.down_side(e);
        let s = self.swap_edges(e, &down);
        let mut best: Option<(EdgeId, Ratio)> = None;
        for &f in s.iter().filter(|f| keep(f.1)) {
            let val = s.iter().map(|&g| self.phi_oriented(f, g)).max().expect("non-empty");
            if best.is_none_or(|(_, b)| val < b) {
                best = Some((f.0, val));
            }
        }
        best
    }

    pub fn brute_bce(&self, e: EdgeId) -> Option<(EdgeId, Ratio)> {
        self.bce_where(e, |_| true)
    }

    pub fn brute_v_bce(&self, e: EdgeId, v: VertexId) -> Option<(EdgeId, Ratio)> {
        self.bce_where(e, |x| x == v)
    }

    /// σ_{G-e}(T_{e/f}) computed literally: build the swap tree, take all
    /// pair distances in it and in `G - e`.
    pub fn true_stretch(&self, e: EdgeId, f: EdgeId) -> Ratio {
        let mut edges: Vec<EdgeId> = self.tree_edges.iter().copied().filter(|&id| id != e).collect();
        edges.push(f);
        let ts = forest_all_pairs(&self.inst.graph, &edges);
        let gd = all_pairs_graph(&self.inst.graph, Some(e));
        let n = self.inst.graph.n();
        let mut best = Ratio::from_integer(1);
        for x in 0..n {
            for y in x + 1..n {
                assert!(ts[x][y] != UNREACHABLE, "f does not reconnect T - e");
                best = best.max(Ratio::new(ts[x][y], gd[x][y]));
            }
        }
        best
    }

    /// Stretch evaluator for many swap edges of the same `e`.
    pub fn stretch_table(&self, e: EdgeId) -> StretchTable<'_, 'a> {
        let down = self.down_side(e);
        let gd = all_pairs_graph(&self.inst.graph, Some(e));
        let n = self.inst.graph.n();
        // pairs on the same side keep their tree path in every swap tree
        let mut base = Ratio::from_integer(1);
        for x in 0..n {
            for y in x + 1..n {
                if down[x] == down[y] {
                    base = base.max(Ratio::new(self.td[x][y], gd[x][y]));
                }
            }
        }
        let ups = (0..n).filter(|&x| !down[x]).collect();
        let downs = (0..n).filter(|&x| down[x]).collect();
        StretchTable {
            oracle: self,
            down,
            gd,
            base,
            ups,
            downs,
        }
    }

    /// Best swap edge by true stretch, ties by smaller id.
    pub fn brute_bse(&self, e: EdgeId) -> Option<(EdgeId, Ratio)> {
        let table = self.stretch_table(e);
        let s = self.swap_edges(e, &table.down);
        let mut best: Option<(EdgeId, Ratio)> = None;
        for &(f, _, _) in &s {
            if let Some(val) = table.stretch_bounded(f, best.map(|b| b.1)) {
                if best.is_none_or(|(_, b)| val < b) {
                    best = Some((f, val));
                }
            }
        }
        best
    }

    /// The dictionary of `e` as it must look after its update step.
    pub fn rebuild_q(&self, ct: &CentroidTree, e: EdgeId) -> QSnapshot {
        let down = self.down_side(e);
        let mut out = QSnapshot::new();
        for (g, x, y) in self.swap_edges(e, &down) {
            let w = self.inst.graph.edge(g).w;
            for &psi in &ct.vertex_nodes(x)[1..] {
                let b = ct.effective_parent_centroid(psi).expect("non-root");
                for &lambda in &ct.vertex_nodes(y)[1..] {
                    let c = ct.effective_parent_centroid(lambda).expect("non-root");
                    let a = self.td[x][b] + self.td[c][y];
                    out.entry((psi, lambda)).or_default().push((g, y, a, w));
                }
            }
        }
        for lines in out.values_mut() {
            lines.sort_unstable();
        }
        out
    }
}

fn forest_all_pairs_from(graph: &WeightedGraph, edges: &[EdgeId], s: VertexId) -> Vec<Weight> {
    let n = graph.n();
    let mut adj = vec![Vec::new(); n];
    for &id in edges {
        let e = graph.edge(id);
        adj[e.u].push((e.v, e.w));
        adj[e.v].push((e.u, e.w));
    }
    let mut dist = vec![UNREACHABLE; n];
    dist[s] = 0;
    let mut stack = vec![s];
    while let Some(x) = stack.pop() {
        for &(y, w) in &adj[x] {
            if dist[y] == UNREACHABLE {
                dist[y] = dist[x] + w;
                stack.push(y);
            }
        }
    }
    dist
}

/// True stretch of swap trees of one failing edge.
pub struct StretchTable<'o, 'a> {
    oracle: &'o Oracle<'a>,
    down: Vec<bool>,
    gd: Vec<Vec<Weight>>,
    base: Ratio,
    ups: Vec<VertexId>,
    downs: Vec<VertexId>,
}

impl StretchTable<'_, '_> {
    pub fn stretch(&self, f: EdgeId) -> Ratio {
        self.stretch_bounded(f, None).expect("unbounded")
    }

    /// The stretch of the swap tree through `f`, or `None` as soon as it is
    /// known to exceed `bound`.
    pub fn stretch_bounded(&self, f: EdgeId, bound: Option<Ratio>) -> Option<Ratio> {
        let edge = self.oracle.inst.graph.edge(f);
        let (v, u) = if self.down[edge.v] {
            (edge.u, edge.v)
        } else {
            (edge.v, edge.u)
        };
        assert!(!self.down[v] && self.down[u], "f is not a swap edge");
        let td = &self.oracle.td;
        let mut best = self.base;
        if bound.is_some_and(|b| best > b) {
            return None;
        }
        for &x in &self.ups {
            let head = td[x][v] + edge.w;
            for &y in &self.downs {
                let r = Ratio::new(head + td[u][y], self.gd[x][y]);
                if r > best {
                    best = r;
                    if bound.is_some_and(|b| best > b) {
                        return None;
                    }
                }
            }
        }
        Some(best)
    }
}

// Free-function forms for one-off use.

pub fn phi(inst: &Instance, e: EdgeId, f: EdgeId, g: EdgeId) -> Ratio {
    Oracle::new(inst).phi(e, f, g)
}

pub fn true_stretch(inst: &Instance, e: EdgeId, f: EdgeId) -> Ratio {
    Oracle::new(inst).true_stretch(e, f)
}

pub fn brute_bse(inst: &Instance, e: EdgeId) -> Option<(EdgeId, Ratio)> {
    Oracle::new(inst).brute_bse(e)
}

pub fn brute_bce(inst: &Instance, e: EdgeId) -> Option<(EdgeId, Ratio)> {
    Oracle::new(inst).brute_bce(e)
}

pub fn brute_v_bce(inst: &Instance, e: EdgeId, v: VertexId) -> Option<(EdgeId, Ratio)> {
    Oracle::new(inst).brute_v_bce(e, v)
}

pub fn rebuild_q_oracle(inst: &Instance, ct: &CentroidTree, e: EdgeId) -> QSnapshot {
    Oracle::new(inst).rebuild_q(ct, e)
}
