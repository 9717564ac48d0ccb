//! Upper envelope of lines `(t + A) / den` over an integer domain `[0, t_max]`.
//!
//! Li Chao tree with nodes allocated on demand, so memory is linear in the
//! number of stored lines. Deletion is lazy: a deleted line stays in the
//! tree until the next rebuild, which happens once half of the stored lines
//! are dead, or when a query lands on a dead line (the tree cannot tell
//! which live line was shadowed by it).

use rustc_hash::FxHashMap as HashMap;
use std::cmp::Ordering;

use thiserror::Error;

use crate::graph::{EdgeId, VertexId, Weight};
use crate::ratio::Ratio;

/// Identifies a line inside one envelope: the non-tree edge and the
/// endpoint placed on the far side of the failing edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Payload {
    pub edge: EdgeId,
    pub down: VertexId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Line {
    pub a: Weight,
    pub den: Weight,
    pub payload: Payload,
}

impl Line {
    pub fn new(a: Weight, den: Weight, payload: Payload) -> Self {
        debug_assert!(den > 0);
        Line { a, den, payload }
    }

    pub fn value(&self, t: Weight) -> Ratio {
        Ratio::new(t + self.a, self.den)
    }

    /// Order at `t`: larger value first, then smaller den, then smaller
    /// edge id, then smaller down endpoint. `Greater` means `self` wins.
    pub fn cmp_at(&self, other: &Line, t: Weight) -> Ordering {
        let lhs = (t + self.a) as i128 * other.den as i128;
        let rhs = (t + other.a) as i128 * self.den as i128;
        lhs.cmp(&rhs)
            .then(other.den.cmp(&self.den))
            .then(other.payload.edge.cmp(&self.payload.edge))
            .then(other.payload.down.cmp(&self.payload.down))
    }

    fn beats(&self, other: &Line, t: Weight) -> bool {
        self.cmp_at(other, t) == Ordering::Greater
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnvelopeError {
    #[error("line for edge {} (down endpoint {}) is already present", .0.edge, .0.down)]
    DuplicatePayload(Payload),
    #[error("line for edge {} (down endpoint {}) is not present", .0.edge, .0.down)]
    NotPresent(Payload),
}

const NIL: u32 = u32::MAX;
// above this many stored lines, payload lookups go through a hash index
const INDEX_THRESHOLD: usize = 12;

#[derive(Clone, Copy, Debug)]
struct Node {
    line: u32,
    left: u32,
    right: u32,
}

#[derive(Clone, Debug)]
pub struct Envelope {
    t_max: Weight,
    lines: Vec<Line>,
    alive: Vec<bool>,
    live: usize,
    nodes: Vec<Node>,
    index: Option<HashMap<Payload, u32>>,
}

impl Envelope {
    pub fn new(t_max: Weight) -> Self {
        assert!(t_max >= 0);
        Envelope {
            t_max,
            lines: Vec::new(),
            alive: Vec::new(),
            live: 0,
            nodes: Vec::new(),
            index: None,
        }
    }

    pub fn t_max(&self) -> Weight {
        self.t_max
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn contains(&self, p: Payload) -> bool {
        self.find(p).is_some()
    }

    pub fn live_lines(&self) -> impl Iterator<Item = &Line> + '_ {
        self.lines.iter().zip(&self.alive).filter(|(_, &a)| a).map(|(l, _)| l)
    }

    fn find(&self, p: Payload) -> Option<u32> {
        match &self.index {
            Some(map) => map.get(&p).copied(),
            None => (0..self.lines.len())
                .rev()
                .find(|&i| self.alive[i] && self.lines[i].payload == p)
                .map(|i| i as u32),
        }
    }

    pub fn insert(&mut self, line: Line) -> Result<(), EnvelopeError> {
        if self.contains(line.payload) {
            return Err(EnvelopeError::DuplicatePayload(line.payload));
        }
        let id = self.lines.len() as u32;
        self.lines.push(line);
        self.alive.push(true);
        self.live += 1;
        if let Some(map) = &mut self.index {
            map.insert(line.payload, id);
        } else if self.lines.len() > INDEX_THRESHOLD {
            self.build_index();
        }
        self.tree_insert(id);
        Ok(())
    }

    pub fn delete(&mut self, p: Payload) -> Result<(), EnvelopeError> {
        let id = self.find(p).ok_or(EnvelopeError::NotPresent(p))?;
        self.alive[id as usize] = false;
        self.live -= 1;
        if let Some(map) = &mut self.index {
            map.remove(&p);
        }
        if 2 * self.live <= self.lines.len() {
            self.rebuild();
        }
        Ok(())
    }

    /// A live line of maximal value at `t` under the tie rule of
    /// [`Line::cmp_at`], or `None` when empty.
    pub fn query_max(&mut self, t: Weight) -> Option<Line> {
        assert!((0..=self.t_max).contains(&t), "t={t} outside [0, {}]", self.t_max);
        if self.live == 0 {
            return None;
        }
        let best = self.path_best(t).expect("non-empty tree");
        if self.alive[best as usize] {
            return Some(self.lines[best as usize]);
        }
        self.rebuild();
        let best = self.path_best(t).expect("non-empty tree");
        debug_assert!(self.alive[best as usize]);
        Some(self.lines[best as usize])
    }

    fn path_best(&self, t: Weight) -> Option<u32> {
        let mut best: Option<u32> = None;
        let (mut lo, mut hi) = (0, self.t_max);
        let mut cur = if self.nodes.is_empty() { NIL } else { 0 };
        while cur != NIL {
            let node = self.nodes[cur as usize];
            if best.is_none_or(|b| self.lines[node.line as usize].beats(&self.lines[b as usize], t)) {
                best = Some(node.line);
            }
            let mid = lo + (hi - lo) / 2;
            if t <= mid {
                hi = mid;
                cur = node.left;
            } else {
                lo = mid + 1;
                cur = node.right;
            }
        }
        best
    }

    fn new_node(&mut self, line: u32) -> u32 {
        self.nodes.push(Node {
            line,
            left: NIL,
            right: NIL,
        });
        self.nodes.len() as u32 - 1
    }

    fn tree_insert(&mut self, mut id: u32) {
        if self.nodes.is_empty() {
            self.new_node(id);
            return;
        }
        let (mut lo, mut hi) = (0, self.t_max);
        let mut cur = 0u32;
        loop {
            let mid = lo + (hi - lo) / 2;
            let here = self.nodes[cur as usize].line;
            let (new, old) = (self.lines[id as usize], self.lines[here as usize]);
            if new.beats(&old, mid) {
                self.nodes[cur as usize].line = id;
                id = here;
            }
            // `id` now holds the line that loses at mid; its winning range
            // is an interval touching lo or hi.
            let loser = self.lines[id as usize];
            let winner = self.lines[self.nodes[cur as usize].line as usize];
            if lo == hi {
                return;
            }
            if loser.beats(&winner, lo) {
                let next = self.nodes[cur as usize].left;
                hi = mid;
                if next == NIL {
                    let n = self.new_node(id);
                    self.nodes[cur as usize].left = n;
                    return;
                }
                cur = next;
            } else if loser.beats(&winner, hi) {
                let next = self.nodes[cur as usize].right;
                lo = mid + 1;
                if next == NIL {
                    let n = self.new_node(id);
                    self.nodes[cur as usize].right = n;
                    return;
                }
                cur = next;
            } else {
                return;
            }
        }
    }

    fn build_index(&mut self) {
        let map = (0..self.lines.len())
            .filter(|&i| self.alive[i])
            .map(|i| (self.lines[i].payload, i as u32))
            .collect();
        self.index = Some(map);
    }

    /// Drops dead lines and rebuilds the tree from the live ones.
    fn rebuild(&mut self) {
        let live: Vec<Line> = self.live_lines().copied().collect();
        self.lines = live;
        self.alive = vec![true; self.lines.len()];
        self.nodes.clear();
        self.index = None;
        if self.lines.len() > INDEX_THRESHOLD {
            self.build_index();
        }
        for id in 0..self.lines.len() as u32 {
            self.tree_insert(id);
        }
    }
}
