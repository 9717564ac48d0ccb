//! Acceptance suite. Runs every criterion and prints one PASS/FAIL line each;
//! exits non-zero if a gating criterion fails.
//!
//! Set `ACCEPTANCE_QUICK=1` to shrink the batch sizes for local iteration.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swapedge::centroid::CentroidTree;
use swapedge::envelope::{Envelope, Line, Payload};
use swapedge::gen::{generate, GenParams};
use swapedge::graph::{validate_instance, EdgeId, Instance, RootedTree, ValidatedInstance, VertexId, WeightedGraph};
use swapedge::oracle::{all_pairs_graph, Oracle};
use swapedge::{
    reduce_to_binary, reference_min_swap_to, solve, solve_all_with_hook, EngineOptions, ForestBackend, SwapForests,
};

struct Outcome {
    id: u32,
    name: &'static str,
    gating: bool,
    pass: bool,
    detail: String,
}

fn quick() -> bool {
    std::env::var("ACCEPTANCE_QUICK").is_ok_and(|v| v == "1")
}

fn scaled(full: usize) -> usize {
    if quick() {
        (full / 10).max(5)
    } else {
        full
    }
}

/// The seeded batch shared by criteria 1, 2 and 4.
fn batch_params(count: usize, n_max: usize, seed0: u64) -> Vec<GenParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed0);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(4..=n_max);
            let m = rng.gen_range(n..=n * (n - 1) / 2);
            GenParams {
                n,
                m,
                wmax: 100,
                seed: seed0 ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
                mst: i % 5 == 4,
            }
        })
        .collect()
}

struct BatchResult {
    c1: Outcome,
    c2: Outcome,
    c4: Outcome,
}

fn run_batch() -> BatchResult {
    let params = batch_params(scaled(200), 60, 0xacce97);
    let clock = Instant::now();
    let (mut edges, mut bad1, mut bad2) = (0usize, Vec::new(), Vec::new());
    let (mut max_ins, mut max_moves, mut bound_violations) = (0u32, 0u32, Vec::new());
    let mut worst_move_slack = i64::MIN;
    let mut worst_fn_ratio = 0f64;
    for p in &params {
        let inst = generate(p).expect("batch parameters are feasible");
        let o = Oracle::new(&inst);
        let opts = EngineOptions {
            counters: true,
            ..Default::default()
        };
        let sol = solve(&inst, &opts).expect("engine");
        let scan = solve(
            &inst,
            &EngineOptions {
                backend: ForestBackend::Scan,
                ..Default::default()
            },
        )
        .expect("engine");
        for e in inst.tree_edge_ids() {
            edges += 1;
            let want = o.brute_bce(e);
            let got = sol.get(e);
            if got != want || scan.get(e) != want {
                bad1.push(format!(
                    "seed {} e {e}: fast {got:?} scan {:?} oracle {want:?}",
                    p.seed,
                    scan.get(e)
                ));
            }
            let Some((f, _)) = got else { continue };
            let table = o.stretch_table(e);
            let (bse, best) = o.brute_bse(e).expect("swap edge exists");
            let mine = table.stretch(f);
            if mine != best {
                bad2.push(format!(
                    "seed {} e {e}: chose {f} stretch {mine}, best {bse} stretch {best}",
                    p.seed
                ));
            }
        }
        let rep = sol
            .stats
            .as_ref()
            .expect("counters on")
            .report(inst.graph.n(), inst.graph.m());
        max_ins = max_ins.max(rep.max_inserts_per_function);
        max_moves = max_moves.max(rep.max_moves_per_function);
        worst_move_slack = worst_move_slack.max(rep.max_moves_per_function as i64 - rep.move_bound as i64);
        worst_fn_ratio = worst_fn_ratio.max(rep.distinct_functions as f64 / rep.function_bound as f64);
        if !rep.holds() {
            bound_violations.push(format!("seed {}: {}", p.seed, rep.to_kv().replace('\n', " ")));
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    let first = |v: &Vec<String>| v.first().cloned().map(|s| format!("; first: {s}")).unwrap_or_default();
    BatchResult {
        c1: Outcome {
            id: 1,
            name: "oracle equivalence (varphi)",
            gating: true,
            pass: bad1.is_empty() && params.len() >= scaled(200),
            detail: format!(
                "{} instances, {edges} tree edges, {} mismatches, {secs:.1}s for the whole batch{}",
                params.len(),
                bad1.len(),
                first(&bad1)
            ),
        },
        c2: Outcome {
            id: 2,
            name: "oracle equivalence (true stretch)",
            gating: true,
            pass: bad2.is_empty(),
            detail: format!("{edges} tree edges, {} non-optimal choices{}", bad2.len(), first(&bad2)),
        },
        c4: Outcome {
            id: 4,
            name: "dictionary counters",
            gating: true,
            pass: bound_violations.is_empty() && max_ins <= 2,
            detail: format!(
                "max inserts/function {max_ins} (bound 2), max moves/function {max_moves} (worst moves - ceil(log2 nu_max) = {worst_move_slack}), distinct functions at most {:.3} of bound{}",
                worst_fn_ratio,
                first(&bound_violations)
            ),
        },
    }
}

fn dict_content() -> Outcome {
    let params = batch_params(scaled(50), 40, 0xd1c7);
    let (mut checked, mut bad) = (0usize, Vec::new());
    for p in &params {
        let inst = generate(p).unwrap();
        let (red, _) = reduce_to_binary(&inst);
        let o = Oracle::new(&red);
        // virtual size must equal the inserts made at every edge of the subtree
        let mut inserted = vec![0u64; red.graph.n()];
        let mut hook = |e: EdgeId, dict: &swapedge::SwapDict, ct: &CentroidTree| {
            checked += 1;
            let want = o.rebuild_q(ct, e);
            if dict.snapshot() != want {
                bad.push(format!(
                    "seed {} e {e}: keys {} vs oracle {}",
                    p.seed,
                    dict.key_count(),
                    want.len()
                ));
            }
            let q = red.tree.lower(e);
            let mut own = 0u64;
            for &(x, g) in red.graph.neighbors(q) {
                if !red.tree.is_tree_edge(g) && !red.tree.is_ancestor(q, x) {
                    own += ((ct.vertex_nodes(x).len() - 1) * (ct.vertex_nodes(q).len() - 1)) as u64;
                }
            }
            inserted[q] = own + red.tree.children(q).iter().map(|&c| inserted[c]).sum::<u64>();
            if dict.virtual_size() != inserted[q] {
                bad.push(format!(
                    "seed {} e {e}: nu {} vs {}",
                    p.seed,
                    dict.virtual_size(),
                    inserted[q]
                ));
            }
        };
        solve_all_with_hook(&red, &EngineOptions::default(), &mut hook).unwrap();
    }
    Outcome {
        id: 3,
        name: "dictionary contents after every merge",
        gating: true,
        pass: bad.is_empty() && params.len() >= scaled(50),
        detail: format!(
            "{} instances, {checked} dictionaries, {} mismatches{}",
            params.len(),
            bad.len(),
            bad.first().map(|s| format!("; first: {s}")).unwrap_or_default()
        ),
    }
}

fn envelope_differential() -> (usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe417);
    let total = scaled(100_000);
    let mut ops = 0;
    let mut bad = Vec::new();
    while ops < total {
        let t_max = rng.gen_range(1..300);
        let a_max = rng.gen_range(1..60);
        let den_max = rng.gen_range(1..12);
        let mut env = Envelope::new(t_max);
        let mut live: Vec<Line> = Vec::new();
        let mut next_edge = 0;
        let script = rng.gen_range(10..600);
        for _ in 0..script {
            ops += 1;
            let r = rng.gen_range(0..10);
            if r < 4 && live.len() < 200 {
                let edge = if !live.is_empty() && rng.gen_bool(0.1) {
                    // reuse a payload that was deleted earlier
                    rng.gen_range(0..next_edge.max(1))
                } else {
                    next_edge += 1;
                    next_edge - 1
                };
                let line = Line::new(
                    rng.gen_range(0..=a_max),
                    rng.gen_range(1..=den_max),
                    Payload {
                        edge,
                        down: rng.gen_range(0..2),
                    },
                );
                let dup = live.iter().any(|l| l.payload == line.payload);
                let res = env.insert(line);
                if dup != res.is_err() {
                    bad.push(format!("insert {line:?}: duplicate={dup} result={res:?}"));
                }
                if !dup {
                    live.push(line);
                }
            } else if r < 6 && !live.is_empty() {
                let i = rng.gen_range(0..live.len());
                let line = live.swap_remove(i);
                if let Err(err) = env.delete(line.payload) {
                    bad.push(format!("delete {line:?}: {err}"));
                }
            } else {
                let t = rng.gen_range(0..=t_max);
                let scan = live.iter().copied().max_by(|a, b| a.cmp_at(b, t));
                let got = env.query_max(t);
                if got != scan {
                    bad.push(format!("query t={t}: envelope {got:?} scan {scan:?}"));
                }
            }
        }
    }
    (ops, bad)
}

fn forest_differential() -> (usize, Vec<String>) {
    let total = scaled(100_000);
    let mut rng = ChaCha8Rng::seed_from_u64(0xf0e5);
    let mut queries = 0;
    let mut bad = Vec::new();
    let mut seed = 0;
    while queries < total {
        seed += 1;
        let n = rng.gen_range(3..=100);
        let m = rng.gen_range(n..=(n * (n - 1) / 2).min(4 * n));
        let inst = generate(&GenParams {
            n,
            m,
            wmax: rng.gen_range(1..20),
            seed,
            mst: rng.gen_bool(0.3),
        })
        .unwrap();
        let mut forests = SwapForests::build(&inst, ForestBackend::Dynamic);
        let owners: Vec<VertexId> = forests.owners().collect();
        let edges: Vec<EdgeId> = inst.tree.tree_edges().collect();
        for _ in 0..200 {
            let v = owners[rng.gen_range(0..owners.len())];
            let e = edges[rng.gen_range(0..edges.len())];
            if inst.tree.in_down(e, v) {
                continue;
            }
            let down: Vec<VertexId> = (0..n).filter(|&x| inst.tree.in_down(e, x)).collect();
            forests.cut(v, e);
            for _ in 0..rng.gen_range(1..8) {
                let c = down[rng.gen_range(0..down.len())];
                queries += 1;
                let got = forests.closest(v, c);
                let want = reference_min_swap_to(&inst, v, e, c);
                if got != want {
                    bad.push(format!("seed {seed} v {v} e {e} c {c}: {got:?} vs {want:?}"));
                }
            }
            forests.link(v, e);
        }
    }
    (queries, bad)
}

fn structures() -> Outcome {
    let (ops, bad_env) = envelope_differential();
    let (queries, bad_forest) = forest_differential();
    Outcome {
        id: 5,
        name: "structure differential tests",
        gating: true,
        pass: bad_env.is_empty() && bad_forest.is_empty(),
        detail: format!(
            "envelope {ops} ops, {} disagreements; closest swap edge {queries} queries, {} disagreements{}",
            bad_env.len(),
            bad_forest.len(),
            bad_env
                .iter()
                .chain(&bad_forest)
                .next()
                .map(|s| format!("; first: {s}"))
                .unwrap_or_default()
        ),
    }
}

fn random_binary_tree(n: usize, rng: &mut ChaCha8Rng) -> RootedTree {
    let mut g = WeightedGraph::new(n);
    let mut kids = vec![0; n];
    let mut ids = Vec::new();
    for v in 1..n {
        let p = loop {
            let p = rng.gen_range(0..v);
            if kids[p] < 2 {
                break p;
            }
        };
        kids[p] += 1;
        ids.push(g.add_edge(p, v, rng.gen_range(1..10)));
    }
    RootedTree::new(&g, &ids, 0)
}

fn tree_path(t: &RootedTree, a: VertexId, b: VertexId) -> Vec<VertexId> {
    let (mut x, mut y) = (a, b);
    let (mut left, mut right) = (Vec::new(), Vec::new());
    while x != y {
        if t.depth(x) >= t.depth(y) {
            left.push(x);
            x = t.parent(x).unwrap();
        } else {
            right.push(y);
            y = t.parent(y).unwrap();
        }
    }
    left.push(x);
    left.extend(right.into_iter().rev());
    left
}

fn centroid_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xce47);
    let mut problems = Vec::new();
    let mut trees = 0;
    let check_bounds = |t: &RootedTree, problems: &mut Vec<String>| {
        let ct = CentroidTree::build(t);
        let n = t.n();
        let levels = (usize::BITS - 1 - n.leading_zeros()) as usize + 1;
        if ct.height() > levels {
            problems.push(format!("n {n}: height {} > {levels}", ct.height()));
        }
        for node in ct.nodes() {
            for &c in &node.children {
                if ct.size(c) > node.size / 2 {
                    problems.push(format!("n {n}: child size {} of node size {}", ct.size(c), node.size));
                }
            }
        }
        ct
    };
    // binary trees of assorted sizes, including the reduced trees of a batch
    for n in (1..=400).step_by(3) {
        trees += 1;
        check_bounds(&random_binary_tree(n, &mut rng), &mut problems);
    }
    for p in batch_params(scaled(60), 60, 0xce) {
        let (red, _) = reduce_to_binary(&generate(&p).unwrap());
        trees += 1;
        check_bounds(&red.tree, &mut problems);
    }
    // separator property, exhaustive for n <= 30
    let mut pairs = 0u64;
    for n in 1..=30 {
        for _ in 0..4 {
            let t = random_binary_tree(n, &mut rng);
            let ct = check_bounds(&t, &mut problems);
            trees += 1;
            for node in ct.nodes().iter().filter(|x| x.size > 1) {
                let groups: Vec<Vec<VertexId>> = node.children.iter().map(|&c| ct.members(c)).collect();
                for (i, gi) in groups.iter().enumerate() {
                    for gj in &groups[i + 1..] {
                        for &a in gi {
                            for &b in gj {
                                pairs += 1;
                                if !tree_path(&t, a, b).contains(&node.centroid) {
                                    problems.push(format!("n {n}: path {a}-{b} avoids centroid {}", node.centroid));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Outcome {
        id: 6,
        name: "centroid decomposition",
        gating: true,
        pass: problems.is_empty(),
        detail: format!(
            "{trees} trees, {pairs} separator pairs, {} violations{}",
            problems.len(),
            problems.first().map(|s| format!("; first: {s}")).unwrap_or_default()
        ),
    }
}

/// Star tree from vertex 0 plus a cycle through the leaves and some chords.
fn star_instance(n: usize, chords: usize, rng: &mut ChaCha8Rng) -> ValidatedInstance {
    let mut g = WeightedGraph::new(n);
    let mut tree = Vec::new();
    for v in 1..n {
        tree.push(g.add_edge(0, v, rng.gen_range(1..=100)));
    }
    for v in 1..n {
        let w = if v + 1 < n { v + 1 } else { 1 };
        if g.find_edge(v, w).is_none() && v != w {
            g.add_edge(v, w, rng.gen_range(1..=100));
        }
    }
    for _ in 0..chords {
        let a = rng.gen_range(1..n);
        let b = rng.gen_range(1..n);
        if a != b && g.find_edge(a, b).is_none() {
            g.add_edge(a, b, rng.gen_range(1..=100));
        }
    }
    validate_instance(g, &tree, 0).expect("star plus cycle is 2-edge-connected")
}

fn reduction_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ed);
    let mut instances: Vec<ValidatedInstance> = Vec::new();
    for _ in 0..scaled(30) {
        let n = rng.gen_range(4..=40);
        let chords = rng.gen_range(0..2 * n);
        instances.push(star_instance(n, chords, &mut rng));
    }
    for p in batch_params(scaled(40), 40, 0x7ee) {
        instances.push(generate(&p).unwrap());
    }
    let mut problems = Vec::new();
    let (mut reduced_count, mut edges) = (0, 0);
    for inst in &instances {
        let (red, map) = reduce_to_binary(inst);
        if !map.is_identity() {
            reduced_count += 1;
        }
        if red.tree.max_children() > 2 {
            problems.push("reduced tree is not binary".to_string());
        }
        let n = inst.graph.n();
        let (dg, dr) = (all_pairs_graph(&inst.graph, None), all_pairs_graph(&red.graph, None));
        for a in 0..n {
            for b in 0..n {
                if dg[a][b] != dr[a][b] || inst.tree.dist(a, b) != red.tree.dist(a, b) {
                    problems.push(format!("n {n}: distance {a}-{b} changed"));
                }
            }
        }
        let sol = solve(inst, &EngineOptions::default()).unwrap();
        let o = Oracle::new(inst);
        for e in inst.tree_edge_ids() {
            edges += 1;
            if sol.get(e) != o.brute_bce(e) {
                problems.push(format!("n {n} e {e}: {:?} vs {:?}", sol.get(e), o.brute_bce(e)));
            }
        }
    }
    Outcome {
        id: 7,
        name: "degree reduction",
        gating: true,
        pass: problems.is_empty() && reduced_count > 0,
        detail: format!(
            "{} instances ({reduced_count} needed gadgets), {edges} tree edges mapped back, {} violations{}",
            instances.len(),
            problems.len(),
            problems.first().map(|s| format!("; first: {s}")).unwrap_or_default()
        ),
    }
}

fn scaling() -> Outcome {
    let sizes: &[usize] = if quick() { &[64, 128] } else { &[128, 256, 512] };
    let mut rows = Vec::new();
    for &n in sizes {
        let m = bench_edges(n);
        let inst = generate(&GenParams {
            n,
            m,
            wmax: 100,
            seed: n as u64,
            mst: false,
        })
        .unwrap();
        // best of two runs to damp allocator and cache warm-up noise
        let fast = (0..2)
            .map(|_| {
                let clock = Instant::now();
                solve(&inst, &EngineOptions::default()).unwrap();
                clock.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min);
        let oracle = sampled_oracle_seconds(&inst, 12);
        rows.push((n, m, fast, oracle));
    }
    let mut detail = String::new();
    let (mut fast_ok, mut oracle_ok) = (true, true);
    for w in rows.windows(2) {
        let (rf, ro) = (w[1].2 / w[0].2, w[1].3 / w[0].3);
        fast_ok &= rf <= 5.5;
        oracle_ok &= ro >= 12.0;
        detail.push_str(&format!("n {}->{}: fast x{rf:.2}, oracle x{ro:.2}; ", w[0].0, w[1].0));
    }
    for (n, m, f, o) in &rows {
        detail.push_str(&format!("[n={n} m={m} fast={f:.3}s oracle~{o:.2}s] "));
    }
    Outcome {
        id: 8,
        name: "scaling sanity (informational)",
        gating: false,
        pass: fast_ok && oracle_ok,
        detail: detail.trim_end().to_string(),
    }
}

/// Dense rows: a tenth of all vertex pairs, so m grows with n².
fn bench_edges(n: usize) -> usize {
    n * (n - 1) / 20
}

/// Oracle time for all tree edges, extrapolated from `k` sampled edges.
fn sampled_oracle_seconds(inst: &Instance, k: usize) -> f64 {
    let o = Oracle::new(inst);
    let edges = inst.tree_edge_ids();
    let step = (edges.len() / k).max(1);
    let sample: Vec<EdgeId> = edges.iter().copied().step_by(step).take(k).collect();
    let clock = Instant::now();
    for &e in &sample {
        std::hint::black_box(o.brute_bce(e));
    }
    clock.elapsed().as_secs_f64() * edges.len() as f64 / sample.len() as f64
}

fn main() {
    let clock = Instant::now();
    let batch = run_batch();
    let outcomes = vec![
        batch.c1,
        batch.c2,
        dict_content(),
        batch.c4,
        structures(),
        centroid_checks(),
        reduction_checks(),
        scaling(),
    ];
    let mut failed = false;
    println!();
    for o in &outcomes {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{tag}] {}: {}", o.id, o.name, o.detail);
        failed |= o.gating && !o.pass;
    }
    println!("acceptance finished in {:.1}s", clock.elapsed().as_secs_f64());
    if failed {
        std::process::exit(1);
    }
}
