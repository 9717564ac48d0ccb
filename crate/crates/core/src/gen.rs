//! Seeded random instances: a Hamiltonian cycle plus random chords, so the
//! graph is always 2-edge-connected, with a uniformly random spanning tree
//! (Wilson's algorithm) or the minimum spanning tree.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{validate_instance, Dsu, EdgeId, ValidatedInstance, VertexId, Weight, WeightedGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub n: usize,
    pub m: usize,
    pub wmax: Weight,
    pub seed: u64,
    /// Use the minimum spanning tree instead of a uniform one.
    pub mst: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

/// Largest allowed `wmax * m`, keeping every distance sum far from overflow.
const WEIGHT_BUDGET: i128 = 1 << 40;

pub fn generate(p: &GenParams) -> Result<ValidatedInstance, GenError> {
    let n = p.n;
    if n < 3 {
        return Err(GenError::Infeasible(format!("n = {n}, need n >= 3")));
    }
    if p.m < n {
        return Err(GenError::Infeasible(format!(
            "m = {} < n = {n}; a 2-edge-connected graph needs at least n edges",
            p.m
        )));
    }
    let max_m = n * (n - 1) / 2;
    if p.m > max_m {
        return Err(GenError::Infeasible(format!("m = {} exceeds n(n-1)/2 = {max_m}", p.m)));
    }
    if p.wmax < 1 {
        return Err(GenError::Infeasible(format!("wmax = {} < 1", p.wmax)));
    }
    if p.wmax as i128 * p.m as i128 > WEIGHT_BUDGET {
        return Err(GenError::Infeasible(format!("wmax * m exceeds {WEIGHT_BUDGET}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut perm: Vec<VertexId> = (0..n).collect();
    perm.shuffle(&mut rng);
    let key = |a: VertexId, b: VertexId| (a.min(b), a.max(b));
    let mut pairs: Vec<(VertexId, VertexId)> = (0..n).map(|i| key(perm[i], perm[(i + 1) % n])).collect();
    let mut present: HashSet<(VertexId, VertexId)> = pairs.iter().copied().collect();
    let chords = p.m - n;
    if chords * 2 <= max_m - n {
        while pairs.len() < p.m {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b && present.insert(key(a, b)) {
                pairs.push(key(a, b));
            }
        }
    } else {
        let mut rest: Vec<(VertexId, VertexId)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|pair| !present.contains(pair))
            .collect();
        rest.shuffle(&mut rng);
        pairs.extend_from_slice(&rest[..chords]);
    }
    pairs.shuffle(&mut rng);

    let mut g = WeightedGraph::new(n);
    for &(a, b) in &pairs {
        g.add_edge(a, b, rng.gen_range(1..=p.wmax));
    }
    let tree = if p.mst { kruskal(&g) } else { wilson(&g, 0, &mut rng) };
    Ok(validate_instance(g, &tree, 0).expect("generated instance is valid"))
}

/// Uniform spanning tree by loop-erased random walks towards `root`.
fn wilson(g: &WeightedGraph, root: VertexId, rng: &mut ChaCha8Rng) -> Vec<EdgeId> {
    let n = g.n();
    let mut in_tree = vec![false; n];
    let mut next = vec![usize::MAX; n];
    in_tree[root] = true;
    let mut out = Vec::with_capacity(n - 1);
    for start in 0..n {
        let mut x = start;
        while !in_tree[x] {
            let nb = g.neighbors(x);
            let (_, id) = nb[rng.gen_range(0..nb.len())];
            next[x] = id;
            x = g.edge(id).other(x);
        }
        let mut x = start;
        while !in_tree[x] {
            in_tree[x] = true;
            out.push(next[x]);
            x = g.edge(next[x]).other(x);
        }
    }
    out
}

/// Minimum spanning tree, ties by smaller edge id.
fn kruskal(g: &WeightedGraph) -> Vec<EdgeId> {
    let mut ids: Vec<EdgeId> = (0..g.m()).collect();
    ids.sort_by_key(|&id| (g.edge(id).w, id));
    let mut dsu = Dsu::new(g.n());
    ids.into_iter()
        .filter(|&id| dsu.union(g.edge(id).u, g.edge(id).v))
        .collect()
}
