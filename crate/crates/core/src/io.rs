//! Plain-text instance format.
//!
//! ```text
//! # comment
//! p <n> <m>
//! e <u> <v> <w>      (m times, 0-indexed vertices)
//! t <u> <v>          (n-1 times, each naming an existing edge)
//! r <root>
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{
    validate_instance, EdgeId, Instance, ValidatedInstance, ValidationError, VertexId, Weight, WeightedGraph,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `p` header")]
    MissingHeader,
    #[error("missing `r` line")]
    MissingRoot,
    #[error("header announces {expected} edges but {found} `e` lines were given")]
    EdgeCount { expected: usize, found: usize },
}

#[derive(Clone, Debug)]
pub struct ParsedInstance {
    pub graph: WeightedGraph,
    /// Tree edges in the order of the `t` lines.
    pub tree_edges: Vec<EdgeId>,
    /// The `t` lines as written.
    pub tree_pairs: Vec<(VertexId, VertexId)>,
    pub root: VertexId,
}

impl ParsedInstance {
    pub fn validate(&self) -> Result<ValidatedInstance, ValidationError> {
        validate_instance(self.graph.clone(), &self.tree_edges, self.root)
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

fn fields<T: std::str::FromStr>(line: usize, tag: &str, rest: &[&str], count: usize) -> Result<Vec<T>, ParseError> {
    if rest.len() != count {
        return Err(syntax(
            line,
            format!("`{tag}` expects {count} fields, got {}", rest.len()),
        ));
    }
    rest.iter()
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| syntax(line, format!("`{tag}`: cannot parse `{s}`")))
        })
        .collect()
}

pub fn parse_instance(text: &str) -> Result<ParsedInstance, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut graph: Option<WeightedGraph> = None;
    let mut tree_lines: Vec<(usize, VertexId, VertexId)> = Vec::new();
    let mut root: Option<VertexId> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let parts: Vec<&str> = content.split_whitespace().collect();
        let (tag, rest) = (parts[0], &parts[1..]);
        match tag {
            "p" => {
                if header.is_some() {
                    return Err(syntax(line, "duplicate `p` header"));
                }
                let v: Vec<usize> = fields(line, tag, rest, 2)?;
                header = Some((v[0], v[1]));
                graph = Some(WeightedGraph::new(v[0]));
            }
            "e" => {
                let g = graph.as_mut().ok_or_else(|| syntax(line, "`e` before `p` header"))?;
                if rest.len() != 3 {
                    return Err(syntax(line, format!("`e` expects 3 fields, got {}", rest.len())));
                }
                let ends: Vec<VertexId> = fields(line, tag, &rest[..2], 2)?;
                let w: Vec<Weight> = fields(line, tag, &rest[2..], 1)?;
                for &x in &ends {
                    if x >= g.n() {
                        return Err(syntax(line, format!("vertex {x} out of range (n = {})", g.n())));
                    }
                }
                g.add_edge(ends[0], ends[1], w[0]);
            }
            "t" => {
                let v: Vec<VertexId> = fields(line, tag, rest, 2)?;
                tree_lines.push((line, v[0], v[1]));
            }
            "r" => {
                if root.is_some() {
                    return Err(syntax(line, "duplicate `r` line"));
                }
                let v: Vec<VertexId> = fields(line, tag, rest, 1)?;
                root = Some(v[0]);
            }
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }

    let (_, m) = header.ok_or(ParseError::MissingHeader)?;
    let graph = graph.expect("header creates the graph");
    if graph.m() != m {
        return Err(ParseError::EdgeCount {
            expected: m,
            found: graph.m(),
        });
    }
    let root = root.ok_or(ParseError::MissingRoot)?;
    let mut tree_edges = Vec::with_capacity(tree_lines.len());
    let mut tree_pairs = Vec::with_capacity(tree_lines.len());
    for (line, u, v) in tree_lines {
        let id = graph
            .find_edge(u, v)
            .ok_or_else(|| syntax(line, format!("tree edge ({u},{v}) is not an edge of the graph")))?;
        tree_edges.push(id);
        tree_pairs.push((u, v));
    }
    Ok(ParsedInstance {
        graph,
        tree_edges,
        tree_pairs,
        root,
    })
}

/// Writes an instance; tree edges are listed in increasing edge id.
pub fn format_instance(inst: &Instance) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "p {} {}", inst.graph.n(), inst.graph.m());
    for e in inst.graph.edges() {
        let _ = writeln!(s, "e {} {} {}", e.u, e.v, e.w);
    }
    for id in inst.tree_edge_ids() {
        let e = inst.graph.edge(id);
        let _ = writeln!(s, "t {} {}", e.u, e.v);
    }
    let _ = writeln!(s, "r {}", inst.tree.root());
    s
}
