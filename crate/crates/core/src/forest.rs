//! Per-vertex dynamic forests answering "which non-tree edge `(v, u)` with
//! `u` below the failing edge minimizes `w(v, u) + d_T(u, c)`".
//!
//! For an owner `v` the forest is `T` plus one marked leaf `ū` per non-tree
//! edge `(v, u)`, hanging off `u` by an edge of weight `w(v, u)`. Cutting
//! the failing edge and asking for the closest marked vertex from `c` gives
//! the answer. The forest is a link-cut tree without evert; each node keeps
//! the weight of the edge to its parent and the minimum marked distance of
//! its virtual subtrees.

use smallvec::SmallVec;

use crate::graph::{EdgeId, Instance, VertexId, Weight};

/// Distance to a marked leaf together with the edge that leaf stands for.
/// Ordered by distance, then edge id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    dist: Weight,
    edge: u32,
}

const INF: Key = Key {
    dist: Weight::MAX,
    edge: u32::MAX,
};

impl Key {
    #[inline]
    fn plus(self, d: Weight) -> Key {
        if self == INF {
            INF
        } else {
            Key {
                dist: self.dist + d,
                edge: self.edge,
            }
        }
    }
}

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct LinkCut {
    par: Vec<u32>,
    left: Vec<u32>,
    right: Vec<u32>,
    /// Weight of the edge to the represented parent.
    pw: Vec<Weight>,
    mark: Vec<Key>,
    virt: Vec<SmallVec<[Key; 3]>>,
    /// Sum of `pw` over the splay subtree.
    sum: Vec<Weight>,
    /// Closest mark seen from the parent of the topmost path node.
    lmin: Vec<Key>,
    /// Closest mark seen from the bottommost path node.
    rmin: Vec<Key>,
}

impl LinkCut {
    fn with_nodes(n: usize) -> Self {
        LinkCut {
            par: vec![NIL; n],
            left: vec![NIL; n],
            right: vec![NIL; n],
            pw: vec![0; n],
            mark: vec![INF; n],
            virt: vec![SmallVec::new(); n],
            sum: vec![0; n],
            lmin: vec![INF; n],
            rmin: vec![INF; n],
        }
    }

    #[inline]
    fn own(&self, x: usize) -> Key {
        self.virt[x].iter().copied().fold(self.mark[x], Key::min)
    }

    fn pull(&mut self, x: usize) {
        let (l, r) = (self.left[x], self.right[x]);
        let own = self.own(x);
        let pw = self.pw[x];
        let (sl, ll, rl) = if l == NIL {
            (0, INF, INF)
        } else {
            let l = l as usize;
            (self.sum[l], self.lmin[l], self.rmin[l])
        };
        let (sr, lr, rr) = if r == NIL {
            (0, INF, INF)
        } else {
            let r = r as usize;
            (self.sum[r], self.lmin[r], self.rmin[r])
        };
        self.sum[x] = sl + pw + sr;
        self.lmin[x] = ll.min(own.plus(sl + pw)).min(lr.plus(sl + pw));
        self.rmin[x] = rr.min(own.plus(sr)).min(rl.plus(sr + pw));
    }

    #[inline]
    fn is_splay_root(&self, x: usize) -> bool {
        let p = self.par[x];
        p == NIL || (self.left[p as usize] != x as u32 && self.right[p as usize] != x as u32)
    }

    fn rotate(&mut self, x: usize) {
        let p = self.par[x] as usize;
        let g = self.par[p];
        let xi = x as u32;
        let pi = p as u32;
        if !self.is_splay_root(p) {
            let g = g as usize;
            if self.left[g] == pi {
                self.left[g] = xi;
            } else {
                self.right[g] = xi;
            }
        }
        self.par[x] = g;
        if self.left[p] == xi {
            let b = self.right[x];
            self.left[p] = b;
            if b != NIL {
                self.par[b as usize] = pi;
            }
            self.right[x] = pi;
        } else {
            let b = self.left[x];
            self.right[p] = b;
            if b != NIL {
                self.par[b as usize] = pi;
            }
            self.left[x] = pi;
        }
        self.par[p] = xi;
        self.pull(p);
        self.pull(x);
    }

    fn splay(&mut self, x: usize) {
        while !self.is_splay_root(x) {
            let p = self.par[x] as usize;
            if !self.is_splay_root(p) {
                let g = self.par[p] as usize;
                let zigzig = (self.left[g] == p as u32) == (self.left[p] == x as u32);
                if zigzig {
                    self.rotate(p);
                } else {
                    self.rotate(x);
                }
            }
            self.rotate(x);
        }
    }

    fn virt_remove(&mut self, x: usize, key: Key) {
        let v = &mut self.virt[x];
        let pos = v
            .iter()
            .position(|&k| k == key)
            .expect("virtual child aggregate is tracked");
        v.swap_remove(pos);
    }

    fn access(&mut self, x: usize) {
        let mut last = NIL;
        let mut y = x as u32;
        while y != NIL {
            let yi = y as usize;
            self.splay(yi);
            let r = self.right[yi];
            if r != NIL {
                let k = self.lmin[r as usize];
                self.virt[yi].push(k);
            }
            if last != NIL {
                let k = self.lmin[last as usize];
                self.virt_remove(yi, k);
            }
            self.right[yi] = last;
            self.pull(yi);
            last = y;
            y = self.par[yi];
        }
        self.splay(x);
    }

    /// Detaches `x` from its represented parent.
    fn cut(&mut self, x: usize) {
        self.access(x);
        let l = self.left[x];
        debug_assert!(l != NIL, "cut of a represented root");
        self.par[l as usize] = NIL;
        self.left[x] = NIL;
        self.pull(x);
    }

    /// Attaches represented root `x` below `p`.
    fn link(&mut self, x: usize, p: usize) {
        self.access(x);
        debug_assert_eq!(self.left[x], NIL, "link of a non-root");
        self.access(p);
        self.par[x] = p as u32;
        let k = self.lmin[x];
        self.virt[p].push(k);
        self.pull(p);
    }

    fn closest(&mut self, c: usize) -> Key {
        self.access(c);
        self.rmin[c]
    }
}

/// Which implementation answers the closest-swap-edge queries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ForestBackend {
    #[default]
    Dynamic,
    /// Linear scan over the owner's incident edges.
    Scan,
}

/// The forests of all owners that have at least one non-tree edge.
pub struct SwapForests<'a> {
    inst: &'a Instance,
    backend: ForestBackend,
    slot: Vec<Option<usize>>,
    forests: Vec<LinkCut>,
    // per owner, the tree edge currently cut (scan backend bookkeeping too)
    cut_edge: Vec<Option<EdgeId>>,
}

impl<'a> SwapForests<'a> {
    pub fn build(inst: &'a Instance, backend: ForestBackend) -> Self {
        let n = inst.graph.n();
        let tree = &inst.tree;
        let mut slot = vec![None; n];
        let mut forests = Vec::new();
        for (v, slot_v) in slot.iter_mut().enumerate() {
            let marks: Vec<(VertexId, EdgeId)> = inst
                .graph
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&(_, id)| !tree.is_tree_edge(id))
                .collect();
            if marks.is_empty() {
                continue;
            }
            *slot_v = Some(forests.len());
            if backend == ForestBackend::Dynamic {
                forests.push(Self::build_one(inst, &marks));
            }
        }
        SwapForests {
            inst,
            backend,
            slot,
            forests,
            cut_edge: vec![None; n],
        }
    }

    fn build_one(inst: &Instance, marks: &[(VertexId, EdgeId)]) -> LinkCut {
        let n = inst.graph.n();
        let tree = &inst.tree;
        let mut lc = LinkCut::with_nodes(n + marks.len());
        for (i, &(u, id)) in marks.iter().enumerate() {
            let leaf = n + i;
            lc.par[leaf] = u as u32;
            lc.pw[leaf] = inst.graph.edge(id).w;
            lc.mark[leaf] = Key {
                dist: 0,
                edge: id as u32,
            };
            lc.pull(leaf);
            let k = lc.lmin[leaf];
            lc.virt[u].push(k);
        }
        // children before parents; every tree child starts as a virtual child
        for &x in tree.preorder().iter().rev() {
            if let Some(p) = tree.parent(x) {
                lc.par[x] = p as u32;
                lc.pw[x] = inst.graph.edge(tree.parent_edge(x).unwrap()).w;
            }
            lc.pull(x);
            if let Some(p) = tree.parent(x) {
                let k = lc.lmin[x];
                lc.virt[p].push(k);
            }
        }
        lc
    }

    pub fn backend(&self) -> ForestBackend {
        self.backend
    }

    /// Whether `v` owns a forest, i.e. has a non-tree edge.
    pub fn has_owner(&self, v: VertexId) -> bool {
        self.slot[v].is_some()
    }

    pub fn owners(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.slot.len()).filter(|&v| self.slot[v].is_some())
    }

    /// Removes tree edge `e` from the forest of `v`.
    pub fn cut(&mut self, v: VertexId, e: EdgeId) {
        assert!(self.cut_edge[v].is_none(), "forest of {v} already has a cut edge");
        self.cut_edge[v] = Some(e);
        if let (ForestBackend::Dynamic, Some(s)) = (self.backend, self.slot[v]) {
            self.forests[s].cut(self.inst.tree.lower(e));
        }
    }

    /// Restores tree edge `e` in the forest of `v`.
    pub fn link(&mut self, v: VertexId, e: EdgeId) {
        assert_eq!(self.cut_edge[v], Some(e), "link does not undo the last cut");
        self.cut_edge[v] = None;
        if let (ForestBackend::Dynamic, Some(s)) = (self.backend, self.slot[v]) {
            let q = self.inst.tree.lower(e);
            let p = self.inst.tree.parent(q).expect("tree edge has a parent");
            self.forests[s].link(q, p);
        }
    }

    /// With the failing edge cut, the edge `(v, u)` with `u` on the far side
    /// minimizing `w(v, u) + d_T(u, c)`, ties by smaller id, and that value.
    pub fn closest(&mut self, v: VertexId, c: VertexId) -> Option<(EdgeId, Weight)> {
        let e = self.cut_edge[v].expect("closest needs a cut edge");
        let s = self.slot[v]?;
        match self.backend {
            ForestBackend::Dynamic => {
                debug_assert!(self.inst.tree.in_down(e, c));
                let k = self.forests[s].closest(c);
                (k != INF).then_some((k.edge as EdgeId, k.dist))
            }
            ForestBackend::Scan => reference_min_swap_to(self.inst, v, e, c),
        }
    }

    /// cut, closest, link in one call.
    pub fn min_swap_to(&mut self, v: VertexId, e: EdgeId, c: VertexId) -> Option<(EdgeId, Weight)> {
        self.cut(v, e);
        let out = self.closest(v, c);
        self.link(v, e);
        out
    }
}

/// Linear scan of the non-tree edges at `v` that cross `e`.
pub fn reference_min_swap_to(inst: &Instance, v: VertexId, e: EdgeId, c: VertexId) -> Option<(EdgeId, Weight)> {
    let tree = &inst.tree;
    if tree.in_down(e, v) {
        return None;
    }
    inst.graph
        .neighbors(v)
        .iter()
        .filter(|&&(u, id)| !tree.is_tree_edge(id) && tree.in_down(e, u))
        .map(|&(u, id)| (inst.graph.edge(id).w + tree.dist(u, c), id))
        .min()
        .map(|(d, id)| (id, d))
}
