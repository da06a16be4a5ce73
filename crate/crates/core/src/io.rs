//! Edge-list and score file formats, and atomic file output.
//!
//! Edge lists are whitespace-separated `u v` or `u v w` lines with `#`
//! comments. A comment of the form
//! `# nodes N edges M directed true weighted false` fixes the vertex count
//! and defaults for the flags; any other comment is ignored. Vertex ids may
//! be any nonnegative integers and are relabelled densely in ascending
//! order.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use tempfile::NamedTempFile;
use thiserror::Error;

use crate::graphgen::{Edge, Graph, GraphError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Flags read from a `# nodes ...` header line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EdgeListHeader {
    pub nodes: Option<u64>,
    pub directed: Option<bool>,
    pub weighted: Option<bool>,
}

/// Overrides for the header flags. `None` defers to the header, then to
/// undirected and unweighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseOptions {
    pub directed: Option<bool>,
    pub weighted: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedGraph {
    pub graph: Graph,
    /// `labels[v]` is the id vertex `v` had in the file.
    pub labels: Vec<u64>,
    pub header: EdgeListHeader,
}

fn parse_header(rest: &str) -> Option<EdgeListHeader> {
    let tokens: Vec<&str> = rest.split_whitespace().collect();
    if tokens.first() != Some(&"nodes") {
        return None;
    }
    let mut h = EdgeListHeader::default();
    for pair in tokens.chunks(2) {
        if let [key, value] = pair {
            match *key {
                "nodes" => h.nodes = value.parse().ok(),
                "directed" => h.directed = value.parse().ok(),
                "weighted" => h.weighted = value.parse().ok(),
                _ => {}
            }
        }
    }
    Some(h)
}

pub fn parse_edge_list(text: &str, options: ParseOptions) -> Result<ParsedGraph, IoError> {
    let mut header = EdgeListHeader::default();
    let mut raw: Vec<(usize, u64, u64, Option<f64>)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(h) = parse_header(rest) {
                header = h;
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |message: String| IoError::Parse { line: line_no, message };
        if fields.len() < 2 || fields.len() > 3 {
            return Err(bad(format!("expected `u v` or `u v w`, got {line:?}")));
        }
        let id = |s: &str| s.parse::<u64>().map_err(|_| bad(format!("invalid vertex id {s:?}")));
        let w = match fields.get(2) {
            Some(s) => Some(s.parse::<f64>().map_err(|_| bad(format!("invalid weight {s:?}")))?),
            None => None,
        };
        raw.push((line_no, id(fields[0])?, id(fields[1])?, w));
    }

    let directed = options.directed.or(header.directed).unwrap_or(false);
    let weighted = options.weighted.or(header.weighted).unwrap_or(false);

    let mut ids: BTreeSet<u64> = raw.iter().flat_map(|&(_, u, v, _)| [u, v]).collect();
    if let Some(n) = header.nodes {
        ids.extend(0..n);
    }
    let labels: Vec<u64> = ids.into_iter().collect();
    let dense = |x: u64| labels.binary_search(&x).expect("every id was collected");

    let mut edges = Vec::with_capacity(raw.len());
    for (line, u, v, w) in raw {
        let w = if weighted {
            w.ok_or_else(|| IoError::Parse { line, message: "weighted graph needs a weight on every edge".into() })?
        } else {
            1.0
        };
        edges.push(Edge { u: dense(u), v: dense(v), w });
    }
    let graph = Graph::from_edges_lenient(labels.len(), directed, weighted, edges)?;
    Ok(ParsedGraph { graph, labels, header })
}

/// Serializes `g` with a header line and extra comment lines. Parsing the
/// result gives back `g`.
pub fn write_edge_list(g: &Graph, comments: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# nodes {} edges {} directed {} weighted {}",
        g.n(),
        g.m(),
        g.is_directed(),
        g.is_weighted()
    );
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    for e in g.edges() {
        if g.is_weighted() {
            let _ = writeln!(out, "{} {} {}", e.u, e.v, e.w);
        } else {
            let _ = writeln!(out, "{} {}", e.u, e.v);
        }
    }
    out
}

/// `label \t score` rows; scores use the shortest decimal that round-trips.
pub fn write_scores(labels: &[u64], scores: &[f64]) -> String {
    let mut out = String::with_capacity(labels.len() * 16);
    for (l, s) in labels.iter().zip(scores) {
        let _ = writeln!(out, "{l}\t{s}");
    }
    out
}

pub fn parse_scores(text: &str) -> Result<Vec<(u64, f64)>, IoError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| {
            let bad = || IoError::Parse { line: i + 1, message: format!("expected `id<TAB>score`, got {l:?}") };
            let (id, score) = l.split_once('\t').ok_or_else(bad)?;
            Ok((id.trim().parse().map_err(|_| bad())?, score.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

/// Writes through a temporary file in the target directory, then renames
/// it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), IoError> {
    let err = |source| IoError::File { path: path.display().to_string(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents.as_bytes()).map_err(err)?;
    tmp.flush().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}
