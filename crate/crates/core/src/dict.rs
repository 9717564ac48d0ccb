//! Per-edge dictionaries mapping pairs of decomposition nodes `(Ψ, Λ)` to
//! envelopes of the lines `(t + d(x, b) + d(c, y)) / w(g)` for the swap
//! edges `g = (x, y)` with `x ∈ Ψ` above and `y ∈ Λ` below the edge.
//!
//! Dictionaries are built bottom-up: a child edge's dictionary is merged
//! into its parent's by moving the lines of the smaller one (by virtual
//! size) into the larger, then deleting the edges that stop crossing and
//! inserting the ones that start crossing.

use rustc_hash::FxHashMap as HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::centroid::{CentroidTree, NodeId};
use crate::envelope::{Envelope, EnvelopeError, Line, Payload};
use crate::graph::{EdgeId, Instance, VertexId, Weight};
use crate::oracle::QSnapshot;

pub type PhiKey = (NodeId, NodeId);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DictError {
    #[error("dictionary of the tree edge above vertex {0} is missing")]
    MissingChildDict(VertexId),
    #[error("key ({}, {}): {err}", .key.0, .key.1)]
    Envelope { key: PhiKey, err: EnvelopeError },
}

/// Read-only data shared by all dictionaries of one instance.
pub struct DictContext<'a> {
    pub inst: &'a Instance,
    pub ct: &'a CentroidTree,
    pub t_max: Weight,
    /// Non-tree edges bucketed by the lca of their endpoints.
    lca_bucket: Vec<Vec<EdgeId>>,
    /// Non-tree edges incident to each vertex, as (other endpoint, id).
    nontree_at: Vec<Vec<(VertexId, EdgeId)>>,
}

impl<'a> DictContext<'a> {
    pub fn new(inst: &'a Instance, ct: &'a CentroidTree) -> Self {
        let n = inst.graph.n();
        let tree = &inst.tree;
        let mut lca_bucket = vec![Vec::new(); n];
        let mut nontree_at = vec![Vec::new(); n];
        let mut max_w = 0;
        let mut tree_w = 0;
        for (id, e) in inst.graph.edges().iter().enumerate() {
            max_w = max_w.max(e.w);
            if tree.is_tree_edge(id) {
                tree_w += e.w;
                continue;
            }
            lca_bucket[tree.lca(e.u, e.v)].push(id);
            nontree_at[e.u].push((e.v, id));
            nontree_at[e.v].push((e.u, id));
        }
        DictContext {
            inst,
            ct,
            t_max: 2 * tree_w + max_w,
            lca_bucket,
            nontree_at,
        }
    }

    pub fn nontree_at(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.nontree_at[v]
    }

    /// Non-root nodes of the decomposition containing `v`, top down.
    fn keyed_nodes(&self, v: VertexId) -> &[NodeId] {
        &self.ct.vertex_nodes(v)[1..]
    }

    fn eff(&self, node: NodeId) -> VertexId {
        self.ct.effective_parent_centroid(node).expect("root is never a key")
    }
}

/// Instrumentation for the bounds on stored functions.
#[derive(Clone, Debug, Default)]
pub struct Stats {
    /// (Ψ, Λ, g, down endpoint) -> (inserts, moves)
    oriented: HashMap<(NodeId, NodeId, EdgeId, VertexId), (u32, u32)>,
    /// (Ψ, Λ, g) -> inserts over both orientations
    unoriented: HashMap<(NodeId, NodeId, EdgeId), u32>,
    pub max_nu: u64,
    pub merges: u64,
    pub total_inserts: u64,
    pub total_moves: u64,
    pub total_deletes: u64,
}

/// Summary of [`Stats`] for one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterReport {
    pub n: usize,
    pub m: usize,
    pub distinct_functions: usize,
    pub function_bound: u64,
    pub max_inserts_per_function: u32,
    pub max_moves_per_function: u32,
    pub move_bound: u32,
    pub max_nu: u64,
    pub total_inserts: u64,
    pub total_moves: u64,
    pub total_deletes: u64,
}

impl CounterReport {
    pub fn holds(&self) -> bool {
        self.distinct_functions as u64 <= self.function_bound
            && self.max_inserts_per_function <= 2
            && self.max_moves_per_function <= self.move_bound
    }

    /// `key=value` lines.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n={}", self.n);
        let _ = writeln!(s, "m={}", self.m);
        let _ = writeln!(s, "distinct_functions={}", self.distinct_functions);
        let _ = writeln!(s, "function_bound={}", self.function_bound);
        let _ = writeln!(s, "max_inserts_per_function={}", self.max_inserts_per_function);
        let _ = writeln!(s, "max_moves_per_function={}", self.max_moves_per_function);
        let _ = writeln!(s, "move_bound={}", self.move_bound);
        let _ = writeln!(s, "max_nu={}", self.max_nu);
        let _ = writeln!(s, "total_inserts={}", self.total_inserts);
        let _ = writeln!(s, "total_moves={}", self.total_moves);
        let _ = writeln!(s, "total_deletes={}", self.total_deletes);
        let _ = writeln!(s, "bounds_hold={}", self.holds());
        s
    }
}

fn floor_log2(x: u64) -> u32 {
    if x == 0 {
        0
    } else {
        63 - x.leading_zeros()
    }
}

fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

impl Stats {
    fn on_insert(&mut self, key: PhiKey, p: Payload) {
        self.total_inserts += 1;
        self.oriented.entry((key.0, key.1, p.edge, p.down)).or_default().0 += 1;
        *self.unoriented.entry((key.0, key.1, p.edge)).or_default() += 1;
    }

    fn on_move(&mut self, key: PhiKey, p: Payload) {
        self.total_moves += 1;
        self.oriented.entry((key.0, key.1, p.edge, p.down)).or_default().1 += 1;
    }

    /// Report against the bounds for an instance with `n` vertices and `m` edges.
    pub fn report(&self, n: usize, m: usize) -> CounterReport {
        let levels = floor_log2(n as u64) as u64 + 1;
        CounterReport {
            n,
            m,
            distinct_functions: self.oriented.len(),
            function_bound: 2 * m as u64 * levels * levels,
            max_inserts_per_function: self.unoriented.values().copied().max().unwrap_or(0),
            max_moves_per_function: self.oriented.values().map(|c| c.1).max().unwrap_or(0),
            move_bound: ceil_log2(self.max_nu),
            max_nu: self.max_nu,
            total_inserts: self.total_inserts,
            total_moves: self.total_moves,
            total_deletes: self.total_deletes,
        }
    }

    /// Largest number of inserts of a single oriented function.
    pub fn max_inserts_per_oriented(&self) -> u32 {
        self.oriented.values().map(|c| c.0).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, Default)]
pub struct SwapDict {
    table: HashMap<PhiKey, Envelope>,
    nu: u64,
}

impl SwapDict {
    pub fn new() -> Self {
        SwapDict::default()
    }

    /// Virtual size: inserts performed on this dictionary and on every
    /// dictionary merged into it.
    pub fn virtual_size(&self) -> u64 {
        self.nu
    }

    pub fn key_count(&self) -> usize {
        self.table.len()
    }

    pub fn line_count(&self) -> usize {
        self.table.values().map(Envelope::len).sum()
    }

    pub fn get(&self, key: PhiKey) -> Option<&Envelope> {
        self.table.get(&key)
    }

    fn insert_line(
        &mut self,
        ctx: &DictContext,
        key: PhiKey,
        line: Line,
        stats: Option<&mut Stats>,
    ) -> Result<(), DictError> {
        self.table
            .entry(key)
            .or_insert_with(|| Envelope::new(ctx.t_max))
            .insert(line)
            .map_err(|err| DictError::Envelope { key, err })?;
        self.nu += 1;
        if let Some(s) = stats {
            s.on_insert(key, line.payload);
            s.max_nu = s.max_nu.max(self.nu);
        }
        Ok(())
    }

    fn delete_line(&mut self, key: PhiKey, p: Payload, stats: Option<&mut Stats>) -> Result<(), DictError> {
        let env = self.table.get_mut(&key).ok_or(DictError::Envelope {
            key,
            err: EnvelopeError::NotPresent(p),
        })?;
        env.delete(p).map_err(|err| DictError::Envelope { key, err })?;
        if env.is_empty() {
            self.table.remove(&key);
        }
        if let Some(s) = stats {
            s.total_deletes += 1;
        }
        Ok(())
    }

    /// Inserts the lines of `g = (x, y)` with `x` above and `y` below.
    fn insert_edge(
        &mut self,
        ctx: &DictContext,
        g: EdgeId,
        x: VertexId,
        y: VertexId,
        mut stats: Option<&mut Stats>,
    ) -> Result<(), DictError> {
        let tree = &ctx.inst.tree;
        let w = ctx.inst.graph.edge(g).w;
        let payload = Payload { edge: g, down: y };
        for &psi in ctx.keyed_nodes(x) {
            let b = ctx.eff(psi);
            let dxb = tree.dist(x, b);
            for &lambda in ctx.keyed_nodes(y) {
                let c = ctx.eff(lambda);
                let line = Line::new(dxb + tree.dist(c, y), w, payload);
                self.insert_line(ctx, (psi, lambda), line, stats.as_deref_mut())?;
            }
        }
        Ok(())
    }

    fn delete_edge(
        &mut self,
        ctx: &DictContext,
        g: EdgeId,
        x: VertexId,
        y: VertexId,
        mut stats: Option<&mut Stats>,
    ) -> Result<(), DictError> {
        let payload = Payload { edge: g, down: y };
        for &psi in ctx.keyed_nodes(x) {
            for &lambda in ctx.keyed_nodes(y) {
                self.delete_line((psi, lambda), payload, stats.as_deref_mut())?;
            }
        }
        Ok(())
    }

    /// Dictionary of a tree edge whose lower endpoint is a leaf.
    pub fn build_from_scratch(ctx: &DictContext, e: EdgeId, stats: Option<&mut Stats>) -> Result<SwapDict, DictError> {
        debug_assert!(ctx.inst.tree.children(ctx.inst.tree.lower(e)).is_empty());
        SwapDict::merge(ctx, e, Vec::new(), stats)
    }

    /// Dictionary of tree edge `e = (p, q)` from the dictionaries of the
    /// tree edges below `q`, which are consumed.
    pub fn merge(
        ctx: &DictContext,
        e: EdgeId,
        inputs: Vec<SwapDict>,
        mut stats: Option<&mut Stats>,
    ) -> Result<SwapDict, DictError> {
        let tree = &ctx.inst.tree;
        let q = tree.lower(e);

        // join: keep the largest virtual size, first input on ties
        let mut inputs = inputs.into_iter();
        let mut dict = inputs.next().unwrap_or_default();
        for mut other in inputs {
            if other.nu > dict.nu {
                std::mem::swap(&mut dict, &mut other);
            }
            for (key, env) in other.table {
                let target = dict.table.entry(key).or_insert_with(|| Envelope::new(ctx.t_max));
                for line in env.live_lines() {
                    target.insert(*line).map_err(|err| DictError::Envelope { key, err })?;
                    if let Some(s) = stats.as_deref_mut() {
                        s.on_move(key, line.payload);
                    }
                }
            }
            dict.nu += other.nu;
        }
        if let Some(s) = stats.as_deref_mut() {
            s.merges += 1;
            s.max_nu = s.max_nu.max(dict.nu);
        }

        // update: edges whose endpoints both lie below e stop crossing
        for &g in &ctx.lca_bucket[q] {
            let edge = ctx.inst.graph.edge(g);
            for (x, y) in [(edge.u, edge.v), (edge.v, edge.u)] {
                if y != q {
                    dict.delete_edge(ctx, g, x, y, stats.as_deref_mut())?;
                }
            }
        }
        // ... and edges from q to outside the subtree start crossing
        for &(x, g) in &ctx.nontree_at[q] {
            if !tree.is_ancestor(q, x) {
                dict.insert_edge(ctx, g, x, q, stats.as_deref_mut())?;
            }
        }
        Ok(dict)
    }

    /// The envelope maximum for `f = (v, u)` (v above, u below) at key
    /// `(Ψ, Λ)`, evaluated at `t = d(b, v) + w(f) + d(u, c)`.
    pub fn query(
        &mut self,
        ctx: &DictContext,
        f: EdgeId,
        v: VertexId,
        u: VertexId,
        psi: NodeId,
        lambda: NodeId,
    ) -> Option<Line> {
        let env = self.table.get_mut(&(psi, lambda))?;
        let tree = &ctx.inst.tree;
        let b = ctx.eff(psi);
        let c = ctx.eff(lambda);
        let t = tree.dist(b, v) + ctx.inst.graph.edge(f).w + tree.dist(u, c);
        env.query_max(t)
    }

    /// Sorted contents, comparable with the oracle's enumeration.
    pub fn snapshot(&self) -> QSnapshot {
        self.table
            .iter()
            .map(|(&key, env)| {
                let mut lines: Vec<_> = env
                    .live_lines()
                    .map(|l| (l.payload.edge, l.payload.down, l.a, l.den))
                    .collect();
                lines.sort_unstable();
                (key, lines)
            })
            .collect()
    }
}
