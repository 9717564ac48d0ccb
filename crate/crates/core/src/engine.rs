//! The phase loop over failing tree edges and the three search procedures
//! that locate, for each vertex `v` above the edge, a swap edge at `v`
//! minimizing its worst ratio `max_g φ(f, g)`.
//!
//! `φ(f, g) = (d(x, v) + w(f) + d(u, y)) / w(g)` for `f = (v, u)` and
//! `g = (x, y)`, with `v, x` above and `u, y` below the failing edge.

use std::time::{Duration, Instant};

use crate::centroid::{CentroidTree, NodeId};
use crate::dict::{DictContext, DictError, Stats, SwapDict};
use crate::forest::{ForestBackend, SwapForests};
use crate::graph::{EdgeId, Instance, ValidatedInstance, VertexId};
use crate::ratio::Ratio;
use crate::reduce::reduce_to_binary;

#[derive(Clone, Debug, Default)]
pub struct EngineOptions {
    pub backend: ForestBackend,
    /// Collect the dictionary counters.
    pub counters: bool,
    /// Record the result of every (edge, vertex) sub-phase.
    pub trace: bool,
    /// Test hook: report a wrong swap edge for one tree edge.
    #[doc(hidden)]
    pub mutate: bool,
}

/// Result of one sub-phase: the best swap edge at `v` for `e` and a
/// witness `g` maximizing `φ(f, g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubphaseTrace {
    pub e: EdgeId,
    pub v: VertexId,
    pub found: Option<(EdgeId, EdgeId, Ratio)>,
}

#[derive(Clone, Debug, Default)]
pub struct PhaseTimings {
    pub decomposition: Duration,
    pub forests: Duration,
    pub dictionaries: Duration,
    pub subphases: Duration,
}

/// Deepest recursion reached by each procedure, counted in decomposition levels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Depths {
    pub find_bce: usize,
    pub find_critical: usize,
    pub find_candidate: usize,
}

#[derive(Clone, Debug)]
pub struct EngineOutput {
    /// Indexed by edge id; `None` for non-tree edges and tree edges
    /// without swap edges.
    pub best: Vec<Option<(EdgeId, Ratio)>>,
    pub stats: Option<Stats>,
    pub timings: PhaseTimings,
    pub trace: Vec<SubphaseTrace>,
    pub depths: Depths,
    pub height: usize,
}

/// `f = (v, u)` with `v` above and `u` below the failing edge.
#[derive(Clone, Copy, Debug)]
struct Oriented {
    id: EdgeId,
    v: VertexId,
    u: VertexId,
}

/// A swap edge with its ratio and lower endpoint.
#[derive(Clone, Copy, Debug)]
struct Hit {
    phi: Ratio,
    g: EdgeId,
    y: VertexId,
}

// larger φ wins, ties by smaller id
fn max_hit(a: Option<Hit>, b: Option<Hit>) -> Option<Hit> {
    match (a, b) {
        (Some(x), Some(y)) => {
            if y.phi > x.phi || (y.phi == x.phi && y.g < x.g) {
                Some(y)
            } else {
                Some(x)
            }
        }
        (x, None) => x,
        (None, y) => y,
    }
}

struct Phase<'p, 'a> {
    inst: &'a Instance,
    ct: &'a CentroidTree,
    ctx: &'p DictContext<'a>,
    dict: &'p mut SwapDict,
    forests: &'p mut SwapForests<'a>,
    e: EdgeId,
    q: VertexId,
    depths: &'p mut Depths,
    memo: Vec<(EdgeId, Option<Hit>)>,
}

impl Phase<'_, '_> {
    #[inline]
    fn below(&self, x: VertexId) -> bool {
        self.inst.tree.is_ancestor(self.q, x)
    }

    fn phi(&self, f: Oriented, g: EdgeId, y: VertexId) -> Ratio {
        let tree = &self.inst.tree;
        let ge = self.inst.graph.edge(g);
        let x = ge.other(y);
        let num = tree.dist(x, f.v) + self.inst.graph.edge(f.id).w + tree.dist(f.u, y);
        Ratio::new(num, ge.w)
    }

    /// Best swap edge at `v` with its lower endpoint in `node`, together with
    /// its φ-maximizing partner. Ties go to the smaller φ, then smaller id.
    fn find_bce(&mut self, v: VertexId, node: Option<NodeId>, depth: usize) -> Option<(Ratio, EdgeId, EdgeId)> {
        let node = node?;
        self.depths.find_bce = self.depths.find_bce.max(depth);
        let c = self.ct.centroid(node);
        if !self.below(c) {
            // the part of the node below e sits in the child holding q
            if self.ct.size(node) == 1 || !self.ct.contains(node, self.q) {
                return None;
            }
            let child = self.ct.child_containing(node, self.q);
            return self.find_bce(v, Some(child), depth + 1);
        }
        let (fid, _) = self.forests.closest(v, c)?;
        let f = Oriented {
            id: fid,
            v,
            u: self.inst.graph.edge(fid).other(v),
        };
        let root = self.ct.root();
        let g1 = match self.memo.iter().find(|m| m.0 == fid) {
            Some(&(_, hit)) => hit,
            None => {
                let hit = self.find_critical(f, root, 1);
                self.memo.push((fid, hit));
                hit
            }
        }
        .expect("f itself is a candidate");
        let here = (g1.phi, fid, g1.g);
        let next = self.ct.cy_tree(&self.inst.tree, node, g1.y);
        match self.find_bce(v, next, depth + 1) {
            Some(other) if (other.0, other.1) < (here.0, here.1) => Some(other),
            _ => Some(here),
        }
    }

    /// A swap edge maximizing φ(f, ·) among those with lower endpoint in `node`.
    fn find_critical(&mut self, f: Oriented, node: NodeId, depth: usize) -> Option<Hit> {
        self.depths.find_critical = self.depths.find_critical.max(depth);
        let root = self.ct.root();
        if self.ct.size(node) == 1 {
            return self.find_candidate(f, root, node, 1);
        }
        let c = self.ct.centroid(node);
        let uchild = self.ct.child_containing(node, f.u);
        if !self.below(c) {
            return self.find_critical(f, uchild, depth + 1);
        }
        let mut best = None;
        for i in 0..self.ct.node(node).children.len() {
            let ch = self.ct.node(node).children[i];
            if ch != uchild {
                let hit = self.find_candidate(f, root, ch, 1);
                best = max_hit(best, hit);
            }
        }
        let rec = self.find_critical(f, uchild, depth + 1);
        max_hit(best, rec)
    }

    /// A swap edge maximizing φ(f, ·) among those with upper endpoint in
    /// `psi` and lower endpoint in `lambda`. `f.v` must lie in `psi`.
    fn find_candidate(&mut self, f: Oriented, psi: NodeId, lambda: NodeId, depth: usize) -> Option<Hit> {
        self.depths.find_candidate = self.depths.find_candidate.max(depth);
        if !self.ct.intersects_de(&self.inst.tree, lambda, self.e) {
            return None;
        }
        if self.ct.size(psi) == 1 {
            return self.query(f, psi, lambda);
        }
        let b = self.ct.centroid(psi);
        let vchild = self.ct.child_containing(psi, f.v);
        if self.below(b) {
            return self.find_candidate(f, vchild, lambda, depth + 1);
        }
        let mut best = None;
        for i in 0..self.ct.node(psi).children.len() {
            let ch = self.ct.node(psi).children[i];
            if ch != vchild {
                let hit = self.query(f, ch, lambda);
                best = max_hit(best, hit);
            }
        }
        let rec = self.find_candidate(f, vchild, lambda, depth + 1);
        max_hit(best, rec)
    }

    fn query(&mut self, f: Oriented, psi: NodeId, lambda: NodeId) -> Option<Hit> {
        let line = self.dict.query(self.ctx, f.id, f.v, f.u, psi, lambda)?;
        let (g, y) = (line.payload.edge, line.payload.down);
        Some(Hit {
            phi: self.phi(f, g, y),
            g,
            y,
        })
    }
}

/// Runs the phase loop on an instance whose tree has at most two children
/// per vertex. `hook` sees every dictionary right after its update step.
pub fn solve_all_with_hook(
    inst: &Instance,
    opts: &EngineOptions,
    hook: &mut dyn FnMut(EdgeId, &SwapDict, &CentroidTree),
) -> Result<EngineOutput, DictError> {
    let tree = &inst.tree;
    assert!(tree.max_children() <= 2, "tree must be binary; reduce it first");
    let mut timings = PhaseTimings::default();

    let clock = Instant::now();
    let ct = CentroidTree::build(tree);
    timings.decomposition = clock.elapsed();

    let clock = Instant::now();
    let mut forests = SwapForests::build(inst, opts.backend);
    let owners: Vec<VertexId> = forests.owners().collect();
    timings.forests = clock.elapsed();

    let ctx = DictContext::new(inst, &ct);
    let mut stats = opts.counters.then(Stats::default);
    let mut dicts: Vec<Option<SwapDict>> = vec![None; inst.graph.n()];
    let mut best = vec![None; inst.graph.m()];
    let mut trace = Vec::new();
    let mut depths = Depths::default();

    for e in tree.edges_postorder() {
        let q = tree.lower(e);
        let clock = Instant::now();
        let mut inputs = Vec::with_capacity(2);
        for &child in tree.children(q) {
            inputs.push(dicts[child].take().ok_or(DictError::MissingChildDict(child))?);
        }
        let mut dict = SwapDict::merge(&ctx, e, inputs, stats.as_mut())?;
        hook(e, &dict, &ct);
        timings.dictionaries += clock.elapsed();

        let clock = Instant::now();
        let mut phase = Phase {
            inst,
            ct: &ct,
            ctx: &ctx,
            dict: &mut dict,
            forests: &mut forests,
            e,
            q,
            depths: &mut depths,
            memo: Vec::new(),
        };
        let mut winner: Option<(Ratio, EdgeId)> = None;
        for &v in &owners {
            if phase.below(v) {
                continue;
            }
            phase.memo.clear();
            phase.forests.cut(v, e);
            let found = phase.find_bce(v, Some(ct.root()), 1);
            phase.forests.link(v, e);
            if let Some((phi, f, _)) = found {
                if winner.is_none_or(|w| (phi, f) < w) {
                    winner = Some((phi, f));
                }
            }
            if opts.trace {
                trace.push(SubphaseTrace {
                    e,
                    v,
                    found: found.map(|(phi, f, g)| (f, g, phi)),
                });
            }
        }
        best[e] = winner.map(|(phi, f)| (f, phi));
        dicts[q] = Some(dict);
        timings.subphases += clock.elapsed();
    }

    if opts.mutate {
        mutate_one(inst, &mut best);
    }

    Ok(EngineOutput {
        best,
        stats,
        timings,
        trace,
        depths,
        height: ct.height(),
    })
}

pub fn solve_all(inst: &Instance, opts: &EngineOptions) -> Result<EngineOutput, DictError> {
    solve_all_with_hook(inst, opts, &mut |_, _, _| {})
}

// Swaps the answer of the first tree edge that has another swap edge.
fn mutate_one(inst: &Instance, best: &mut [Option<(EdgeId, Ratio)>]) {
    for e in inst.tree_edge_ids() {
        if let Some((f, phi)) = best[e] {
            if let Some(&other) = inst.swap_edges(e).iter().rev().find(|&&g| g != f) {
                best[e] = Some((other, phi));
                return;
            }
        }
    }
}

/// Best swap edges of a validated instance, reported in its own edge ids.
#[derive(Clone, Debug)]
pub struct Solution {
    /// Indexed by original edge id; `Some` exactly for tree edges.
    pub best: Vec<Option<(EdgeId, Ratio)>>,
    pub stats: Option<Stats>,
    pub timings: PhaseTimings,
    pub reduced_n: usize,
    pub reduced_m: usize,
    pub height: usize,
}

impl Solution {
    pub fn get(&self, e: EdgeId) -> Option<(EdgeId, Ratio)> {
        self.best.get(e).copied().flatten()
    }
}

/// Reduces the instance to a binary tree, runs the engine and maps the
/// answers back.
pub fn solve(inst: &ValidatedInstance, opts: &EngineOptions) -> Result<Solution, DictError> {
    let (red, map) = reduce_to_binary(inst);
    let out = solve_all(&red, opts)?;
    let mut best = vec![None; inst.graph.m()];
    for e in inst.tree.tree_edges() {
        let r = map.forward(e).expect("tree edges map forward");
        // non-tree edges keep their ids in the reduced instance
        best[e] = out.best[r];
    }
    Ok(Solution {
        best,
        stats: out.stats,
        timings: out.timings,
        reduced_n: red.graph.n(),
        reduced_m: red.graph.m(),
        height: out.height,
    })
}
