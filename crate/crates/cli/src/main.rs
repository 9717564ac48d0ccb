use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use swapedge::gen::{generate, GenParams};
use swapedge::graph::{EdgeId, Instance, ValidatedInstance};
use swapedge::io::{format_instance, parse_instance, ParsedInstance};
use swapedge::oracle::Oracle;
use swapedge::{solve, CentroidTree, EngineOptions, ForestBackend, Ratio, Solution};

#[derive(Parser)]
#[command(name = "swapedge", version, about = "Best swap edges of a tree spanner")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Best swap edge for every tree edge, as TSV.
    Solve(SolveArgs),
    /// Check the engine (or a saved solution) against the brute-force oracles.
    Verify(VerifyArgs),
    /// Write a random 2-edge-connected instance.
    Gen(GenArgs),
    /// Time the engine on doubling instance sizes.
    Bench(BenchArgs),
    /// Run the built-in fixture and a small random batch through verify.
    Selftest,
    /// Print the centroid decomposition of the (degree-reduced) tree.
    Decomp { input: PathBuf },
}

#[derive(Args)]
struct EngineFlags {
    /// Answer closest-swap-edge queries by linear scan.
    #[arg(long)]
    no_dynforest: bool,
    /// Print dictionary counters as key=value lines on stderr.
    #[arg(long)]
    counters: bool,
}

impl EngineFlags {
    fn options(&self) -> EngineOptions {
        EngineOptions {
            backend: if self.no_dynforest {
                ForestBackend::Scan
            } else {
                ForestBackend::Dynamic
            },
            counters: self.counters,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    input: PathBuf,
    /// Output file (stdout when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Append the true stretch of each swap tree, computed by brute force.
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    engine: EngineFlags,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance files to check.
    inputs: Vec<PathBuf>,
    /// Check this saved `solve` output instead of running the engine (one input only).
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Also check a batch of this many random instances.
    #[arg(long, default_value_t = 0)]
    random: usize,
    /// Vertex count of the random instances.
    #[arg(long, default_value_t = 40)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Corrupt one answer before checking (harness self-test).
    #[arg(long, hide = true)]
    mutate: bool,
    #[command(flatten)]
    engine: EngineFlags,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 100)]
    wmax: i64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Use the minimum spanning tree instead of a uniform random one.
    #[arg(long)]
    mst: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance file to time instead of generated sizes.
    input: Option<PathBuf>,
    /// Vertex counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "128,256,512")]
    sizes: Vec<usize>,
    /// Edges per instance as a fraction of n(n-1)/2.
    #[arg(long, default_value_t = 0.1)]
    density: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Tree edges sampled to extrapolate the oracle time; 0 skips the oracle.
    #[arg(long, default_value_t = 8)]
    oracle_sample: usize,
    #[command(flatten)]
    engine: EngineFlags,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Solve(a) => cmd_solve(&a),
        Cmd::Verify(a) => cmd_verify(&a),
        Cmd::Gen(a) => cmd_gen(&a),
        Cmd::Bench(a) => cmd_bench(&a),
        Cmd::Selftest => cmd_selftest(),
        Cmd::Decomp { input } => cmd_decomp(&input),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<(ParsedInstance, ValidatedInstance)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = parse_instance(&text).with_context(|| format!("parsing {}", path.display()))?;
    let inst = parsed
        .validate()
        .with_context(|| format!("validating {}", path.display()))?;
    Ok((parsed, inst))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn frac(r: Ratio) -> String {
    let r = r.reduced();
    format!("{}\t{}", r.num(), r.den())
}

fn solve_tsv(parsed: &ParsedInstance, inst: &Instance, sol: &Solution, with_oracle: bool) -> String {
    let oracle = with_oracle.then(|| Oracle::new(inst));
    let mut out = String::new();
    for (&(u, v), &e) in parsed.tree_pairs.iter().zip(&parsed.tree_edges) {
        let mut row = format!("{u}\t{v}");
        match sol.get(e) {
            Some((f, phi)) => {
                let fe = inst.graph.edge(f);
                row += &format!("\t{}\t{}\t{}", fe.u, fe.v, frac(phi));
                if let Some(o) = &oracle {
                    row += &format!("\t{}", frac(o.true_stretch(e, f)));
                }
            }
            None => {
                row += "\t-\t-\t-\t-";
                if oracle.is_some() {
                    row += "\t-\t-";
                }
            }
        }
        out.push_str(&row);
        out.push('\n');
    }
    out
}

fn print_counters(sol: &Solution, inst: &Instance) {
    if let Some(stats) = &sol.stats {
        eprint!("{}", stats.report(inst.graph.n(), inst.graph.m()).to_kv());
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<ExitCode> {
    let (parsed, inst) = load(&a.input)?;
    let sol = solve(&inst, &a.engine.options())?;
    write_out(a.output.as_deref(), &solve_tsv(&parsed, &inst, &sol, a.oracle))?;
    if a.engine.counters {
        print_counters(&sol, &inst);
    }
    Ok(ExitCode::SUCCESS)
}

/// Claimed answers: (tree edge, best swap edge and its φ).
type Claims = Vec<(EdgeId, Option<(EdgeId, Ratio)>)>;

/// Parses `solve` rows back into (tree edge, swap edge, φ) triples.
fn parse_solution(text: &str, inst: &Instance) -> Result<Claims> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let cols: Vec<&str> = line.split('\t').collect();
        if line.trim().is_empty() {
            continue;
        }
        if cols.len() < 6 {
            bail!("solution line {}: expected at least 6 columns", i + 1);
        }
        let num = |s: &str| -> Result<i64> {
            s.parse()
                .with_context(|| format!("solution line {}: bad number `{s}`", i + 1))
        };
        let (u, v) = (num(cols[0])? as usize, num(cols[1])? as usize);
        let e = inst
            .graph
            .find_edge(u, v)
            .with_context(|| format!("solution line {}: ({u},{v}) is not an edge", i + 1))?;
        if cols[2] == "-" {
            rows.push((e, None));
            continue;
        }
        let (fu, fv) = (num(cols[2])? as usize, num(cols[3])? as usize);
        let f = inst
            .graph
            .find_edge(fu, fv)
            .with_context(|| format!("solution line {}: ({fu},{fv}) is not an edge", i + 1))?;
        let den = num(cols[5])?;
        if den <= 0 {
            bail!("solution line {}: non-positive denominator", i + 1);
        }
        rows.push((e, Some((f, Ratio::new(num(cols[4])?, den)))));
    }
    Ok(rows)
}

#[derive(Default)]
struct VerifyTally {
    edges: usize,
    mismatches: Vec<String>,
}

/// Checks claimed answers against brute_bce (edge and value) and brute_bse (stretch).
fn check_answers(name: &str, inst: &Instance, claims: &[(EdgeId, Option<(EdgeId, Ratio)>)]) -> VerifyTally {
    let oracle = Oracle::new(inst);
    let label = |id: EdgeId| {
        let e = inst.graph.edge(id);
        format!("({},{})", e.u, e.v)
    };
    let show = |x: Option<(EdgeId, Ratio)>| match x {
        Some((f, r)) => format!("{} phi={}", label(f), r),
        None => "none".to_string(),
    };
    let mismatches: Vec<String> = claims
        .par_iter()
        .filter_map(|&(e, claim)| {
            let want = oracle.brute_bce(e);
            if claim != want {
                return Some(format!(
                    "{name}: e={} engine {} oracle {}",
                    label(e),
                    show(claim),
                    show(want)
                ));
            }
            let (f, _) = claim?;
            let (bse, best) = oracle.brute_bse(e)?;
            let mine = oracle.stretch_table(e).stretch(f);
            (mine != best).then(|| {
                format!(
                    "{name}: e={} engine {} stretch {} but {} has stretch {}",
                    label(e),
                    label(f),
                    mine,
                    label(bse),
                    best
                )
            })
        })
        .collect();
    VerifyTally {
        edges: claims.len(),
        mismatches,
    }
}

fn cmd_verify(a: &VerifyArgs) -> Result<ExitCode> {
    if a.solution.is_some() && a.inputs.len() != 1 {
        bail!("--solution needs exactly one instance file");
    }
    if a.inputs.is_empty() && a.random == 0 {
        bail!("nothing to verify: give instance files or --random N");
    }
    let mut opts = a.engine.options();
    opts.mutate = a.mutate;
    let mut total = VerifyTally::default();
    let mut instances = 0;
    let mut counter_lines = Vec::new();

    let mut run = |name: String, inst: &ValidatedInstance, claims: Option<Claims>| -> Result<()> {
        let claims = match claims {
            Some(c) => c,
            None => {
                let sol = solve(inst, &opts)?;
                if let Some(stats) = &sol.stats {
                    let rep = stats.report(inst.graph.n(), inst.graph.m());
                    counter_lines.push(rep);
                }
                inst.tree_edge_ids().into_iter().map(|e| (e, sol.get(e))).collect()
            }
        };
        let t = check_answers(&name, inst, &claims);
        total.edges += t.edges;
        total.mismatches.extend(t.mismatches);
        instances += 1;
        Ok(())
    };

    for path in &a.inputs {
        let (_, inst) = load(path)?;
        let claims = match &a.solution {
            Some(sp) => {
                let text = fs::read_to_string(sp).with_context(|| format!("reading {}", sp.display()))?;
                Some(parse_solution(&text, &inst)?)
            }
            None => None,
        };
        run(path.display().to_string(), &inst, claims)?;
    }
    let n = a.n.max(3);
    for i in 0..a.random {
        let seed = a.seed.wrapping_add(i as u64);
        // spread densities across the batch
        let max_m = n * (n - 1) / 2;
        let m = n + (max_m - n) * (i % 10) / 10;
        let inst = generate(&GenParams {
            n,
            m,
            wmax: 100,
            seed,
            mst: false,
        })?;
        run(format!("random(n={n},m={m},seed={seed})"), &inst, None)?;
    }

    for line in &total.mismatches {
        println!("MISMATCH {line}");
    }
    if !counter_lines.is_empty() {
        let worst_ins = counter_lines
            .iter()
            .map(|r| r.max_inserts_per_function)
            .max()
            .unwrap_or(0);
        let worst_moves = counter_lines
            .iter()
            .map(|r| r.max_moves_per_function)
            .max()
            .unwrap_or(0);
        let all_hold = counter_lines.iter().all(|r| r.holds());
        println!("counters: max_inserts_per_function={worst_ins} max_moves_per_function={worst_moves} bounds_hold={all_hold}");
    }
    let ok = total.mismatches.is_empty();
    println!(
        "{}: {instances} instances, {} tree edges, {} mismatches",
        if ok { "PASS" } else { "FAIL" },
        total.edges,
        total.mismatches.len()
    );
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_gen(a: &GenArgs) -> Result<ExitCode> {
    let inst = generate(&GenParams {
        n: a.n,
        m: a.m,
        wmax: a.wmax,
        seed: a.seed,
        mst: a.mst,
    })?;
    write_out(a.output.as_deref(), &format_instance(&inst))?;
    Ok(ExitCode::SUCCESS)
}

fn peak_rss_kib() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn oracle_seconds(inst: &Instance, k: usize) -> Option<f64> {
    if k == 0 {
        return None;
    }
    let o = Oracle::new(inst);
    let edges = inst.tree_edge_ids();
    let step = (edges.len() / k).max(1);
    let sample: Vec<EdgeId> = edges.iter().copied().step_by(step).take(k).collect();
    let clock = Instant::now();
    for &e in &sample {
        std::hint::black_box(o.brute_bce(e));
    }
    Some(clock.elapsed().as_secs_f64() * edges.len() as f64 / sample.len() as f64)
}

fn cmd_bench(a: &BenchArgs) -> Result<ExitCode> {
    let opts = EngineOptions {
        counters: true,
        ..a.engine.options()
    };
    let mut instances: Vec<(String, ValidatedInstance)> = Vec::new();
    match &a.input {
        Some(p) => instances.push((p.display().to_string(), load(p)?.1)),
        None => {
            for &n in &a.sizes {
                let max_m = n * (n - 1) / 2;
                let m = ((max_m as f64 * a.density) as usize).clamp(n, max_m);
                let inst = generate(&GenParams {
                    n,
                    m,
                    wmax: 100,
                    seed: a.seed,
                    mst: false,
                })?;
                instances.push((format!("n={n}"), inst));
            }
        }
    }
    println!("# instance\tn\tm\treduced_n\theight\tdecomp_s\tforests_s\tdicts_s\tsubphases_s\ttotal_s\toracle_s\tpeak_rss_kib");
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for (name, inst) in &instances {
        let clock = Instant::now();
        let sol = solve(inst, &opts)?;
        let total = clock.elapsed().as_secs_f64();
        let oracle = oracle_seconds(inst, a.oracle_sample);
        let t = &sol.timings;
        println!(
            "{name}\t{}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{}\t{}",
            inst.graph.n(),
            inst.graph.m(),
            sol.reduced_n,
            sol.height,
            t.decomposition.as_secs_f64(),
            t.forests.as_secs_f64(),
            t.dictionaries.as_secs_f64(),
            t.subphases.as_secs_f64(),
            total,
            oracle.map_or("-".to_string(), |o| format!("{o:.4}")),
            peak_rss_kib().map_or("-".to_string(), |k| k.to_string()),
        );
        rows.push((name.clone(), total, oracle));
        if let Some(stats) = &sol.stats {
            reports.push((name.clone(), stats.report(inst.graph.n(), inst.graph.m())));
        }
    }
    if rows.len() > 1 {
        println!("# doubling\tfast_ratio\toracle_ratio");
        for w in rows.windows(2) {
            let oracle = match (w[0].2, w[1].2) {
                (Some(x), Some(y)) => format!("{:.2}", y / x),
                _ => "-".to_string(),
            };
            println!("{}->{}\t{:.2}\t{oracle}", w[0].0, w[1].0, w[1].1 / w[0].1);
        }
    }
    for (name, rep) in &reports {
        println!("# counters {name}");
        print!("{}", rep.to_kv());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_selftest() -> Result<ExitCode> {
    let inst = swapedge::oracle::fixture_g2();
    let sol = solve(&inst, &EngineOptions::default())?;
    let claims: Vec<_> = inst.tree_edge_ids().into_iter().map(|e| (e, sol.get(e))).collect();
    let fixture = check_answers("fixture", &inst, &claims);
    let mut bad = fixture.mismatches;
    let mut edges = fixture.edges;
    for seed in 0..20 {
        let inst = generate(&GenParams {
            n: 12 + seed as usize,
            m: 30 + 3 * seed as usize,
            wmax: 50,
            seed,
            mst: seed % 2 == 1,
        })?;
        for backend in [ForestBackend::Dynamic, ForestBackend::Scan] {
            let sol = solve(
                &inst,
                &EngineOptions {
                    backend,
                    ..Default::default()
                },
            )?;
            let claims: Vec<_> = inst.tree_edge_ids().into_iter().map(|e| (e, sol.get(e))).collect();
            let t = check_answers(&format!("seed {seed} {backend:?}"), &inst, &claims);
            edges += t.edges;
            bad.extend(t.mismatches);
        }
    }
    for line in &bad {
        println!("MISMATCH {line}");
    }
    println!(
        "{}: {edges} tree edges checked, {} mismatches",
        if bad.is_empty() { "PASS" } else { "FAIL" },
        bad.len()
    );
    Ok(if bad.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_decomp(input: &Path) -> Result<ExitCode> {
    let (_, inst) = load(input)?;
    let (red, map) = swapedge::reduce_to_binary(&inst);
    let ct = CentroidTree::build(&red.tree);
    if !map.is_identity() {
        println!("# tree was reduced: vertices >= {} are gadget vertices", inst.graph.n());
    }
    println!("# height {}", ct.height());
    print!("{}", ct.dump());
    Ok(ExitCode::SUCCESS)
}
