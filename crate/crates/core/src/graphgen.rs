//! Graphs, seeded synthetic generators, and preprocessing.
//!
//! Vertex ids are dense `0..n`. Undirected graphs store each edge once; the
//! adjacency matrix expands them symmetrically.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::Weight;
use crate::spmat::SparseMatrix;

/// Partition probabilities (a, b, c, d) used when none are given.
pub const RMAT_DEFAULT_PROBS: [f64; 4] = [0.57, 0.19, 0.19, 0.05];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({u}, {v}) has weight {w}; weights must be positive and finite")]
    InvalidWeight { u: usize, v: usize, w: f64 },
    #[error("R-MAT probabilities {0:?} must be nonnegative and sum to 1")]
    InvalidProbabilities([f64; 4]),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    directed: bool,
    weighted: bool,
    edges: Vec<Edge>,
}

/// Derived size and degree statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    /// Mean degree, `2m/n`.
    pub mean_degree: f64,
    /// Maximum degree (in + out for directed graphs).
    pub max_degree: usize,
    /// Edges per vertex, `m/n`.
    pub edge_factor: f64,
    /// Fill percentage, `100 m / n^2`.
    pub fill: f64,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges, out-of-range
    /// endpoints and non-positive weights.
    pub fn new(n: usize, directed: bool, weighted: bool, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            for vertex in [e.u, e.v] {
                if vertex >= n {
                    return Err(GraphError::VertexOutOfRange { vertex, n });
                }
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop(e.u));
            }
            if Weight::edge(e.w).is_err() {
                return Err(GraphError::InvalidWeight { u: e.u, v: e.v, w: e.w });
            }
            if !seen.insert(edge_key(directed, e.u, e.v)) {
                return Err(GraphError::DuplicateEdge(e.u, e.v));
            }
        }
        Ok(Graph { n, directed, weighted, edges })
    }

    /// Builds a graph from raw edges, dropping self-loops and keeping the
    /// first occurrence of every duplicate. Weights are still validated.
    pub fn from_edges_lenient(
        n: usize,
        directed: bool,
        weighted: bool,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, GraphError> {
        let mut seen = HashSet::new();
        let kept = edges
            .into_iter()
            .filter(|e| e.u != e.v && seen.insert(edge_key(directed, e.u, e.v)))
            .collect();
        Graph::new(n, directed, weighted, kept)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// True when every edge weight is 1.
    pub fn has_unit_weights(&self) -> bool {
        self.edges.iter().all(|e| e.w == 1.0)
    }

    /// Same structure with every weight reset to 1.
    pub fn unweighted(&self) -> Graph {
        Graph {
            n: self.n,
            directed: self.directed,
            weighted: false,
            edges: self.edges.iter().map(|e| Edge { w: 1.0, ..*e }).collect(),
        }
    }

    /// `A(u, v)` is the weight of the edge `u -> v`.
    pub fn adjacency(&self) -> SparseMatrix<Weight> {
        let mut triplets = Vec::with_capacity(self.edges.len() * if self.directed { 1 } else { 2 });
        for e in &self.edges {
            let w = Weight::raw(e.w);
            triplets.push((e.u, e.v, w));
            if !self.directed {
                triplets.push((e.v, e.u, w));
            }
        }
        SparseMatrix::from_triplets(self.n, self.n, triplets).expect("validated edges are unique and in range")
    }

    /// Out-neighbors with weights; both directions for undirected graphs.
    pub fn neighbor_lists(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.u].push((e.v, e.w));
            if !self.directed {
                adj[e.v].push((e.u, e.w));
            }
        }
        for list in &mut adj {
            list.sort_by_key(|&(v, _)| v);
        }
        adj
    }

    /// Total degree per vertex (in + out).
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    pub fn stats(&self) -> GraphStats {
        let n = self.n;
        let m = self.m();
        let nf = n.max(1) as f64;
        GraphStats {
            n,
            m,
            mean_degree: 2.0 * m as f64 / nf,
            max_degree: self.degrees().into_iter().max().unwrap_or(0),
            edge_factor: m as f64 / nf,
            fill: 100.0 * m as f64 / (nf * nf),
        }
    }

    /// Largest hop distance between any connected ordered pair, by BFS from
    /// every vertex. Edge weights are ignored.
    pub fn hop_diameter(&self) -> usize {
        let adj = self.neighbor_lists();
        let mut best = 0;
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        for s in 0..self.n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                best = best.max(dist[u]);
                for &(v, _) in &adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        best
    }
}

fn edge_key(directed: bool, u: usize, v: usize) -> (usize, usize) {
    if directed || u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmatParams {
    /// log2 of the vertex count.
    pub scale: u32,
    /// Edge insertions per vertex before deduplication.
    pub edge_factor: u32,
    pub probs: [f64; 4],
    pub directed: bool,
}

impl RmatParams {
    pub fn new(scale: u32, edge_factor: u32) -> Self {
        RmatParams { scale, edge_factor, probs: RMAT_DEFAULT_PROBS, directed: false }
    }
}

/// Recursive-matrix generator on `2^scale` vertices with
/// `edge_factor * 2^scale` insertions. Self-loops are skipped and duplicate
/// insertions keep the first occurrence.
pub fn rmat(params: &RmatParams, seed: u64) -> Result<Graph, GraphError> {
    let [a, b, c, d] = params.probs;
    if params.probs.iter().any(|&x| !(x >= 0.0)) || ((a + b + c + d) - 1.0).abs() > 1e-9 {
        return Err(GraphError::InvalidProbabilities(params.probs));
    }
    if params.scale == 0 || params.scale > 40 {
        return Err(GraphError::InvalidParameter(format!("scale {} must be in 1..=40", params.scale)));
    }
    let n = 1usize << params.scale;
    let insertions = (params.edge_factor as usize)
        .checked_mul(n)
        .ok_or_else(|| GraphError::InvalidParameter("edge count overflows".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(insertions);
    for _ in 0..insertions {
        let (mut u, mut v) = (0usize, 0usize);
        for level in (0..params.scale).rev() {
            let r: f64 = rng.gen();
            let (down, right) = if r < a {
                (0, 0)
            } else if r < a + b {
                (0, 1)
            } else if r < a + b + c {
                (1, 0)
            } else {
                (1, 1)
            };
            u |= down << level;
            v |= right << level;
        }
        edges.push(Edge { u, v, w: 1.0 });
    }
    Graph::from_edges_lenient(n, params.directed, false, edges)
}

/// Expected density of a uniform random graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    /// Expected vertex degree `k`: each pair is an edge with probability
    /// `k / (n - 1)`.
    Degree(f64),
    /// Fill percentage `f`: each pair is an edge with probability `f / 100`.
    Fill(f64),
}

/// Erdős–Rényi graph: every vertex pair (ordered pairs when directed) is an
/// edge independently with the probability given by `density`.
pub fn uniform_random(n: usize, density: Density, directed: bool, seed: u64) -> Result<Graph, GraphError> {
    let prob = match density {
        Density::Degree(k) if k >= 0.0 && k.is_finite() => {
            if n > 1 {
                k / (n - 1) as f64
            } else {
                0.0
            }
        }
        Density::Fill(f) if (0.0..=100.0).contains(&f) => f / 100.0,
        other => return Err(GraphError::InvalidParameter(format!("density {other:?}"))),
    }
    .min(1.0);

    let row_len = |i: usize| if directed { n.saturating_sub(1) } else { n - 1 - i };
    let column = |i: usize, offset: usize| {
        if directed {
            // skip the diagonal
            if offset < i {
                offset
            } else {
                offset + 1
            }
        } else {
            i + 1 + offset
        }
    };

    let mut edges = Vec::new();
    if prob > 0.0 && n > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let log_q = (1.0 - prob).ln();
        let skip = |rng: &mut ChaCha8Rng| -> usize {
            if prob >= 1.0 {
                return 0;
            }
            let r: f64 = rng.gen();
            ((1.0 - r).ln() / log_q).floor() as usize
        };
        // geometric skipping over the row-major pair sequence
        let mut row = 0usize;
        let mut offset = skip(&mut rng);
        while row < n {
            while row < n && offset >= row_len(row) {
                offset -= row_len(row);
                row += 1;
            }
            if row >= n {
                break;
            }
            edges.push(Edge { u: row, v: column(row, offset), w: 1.0 });
            offset += 1 + skip(&mut rng);
        }
    }
    Graph::new(n, directed, false, edges)
}

/// Assigns independent integer weights drawn uniformly from `lo..=hi`.
pub fn assign_weights(g: &Graph, lo: u64, hi: u64, seed: u64) -> Result<Graph, GraphError> {
    if lo == 0 || lo > hi {
        return Err(GraphError::InvalidParameter(format!("weight range [{lo}, {hi}] must satisfy 1 <= lo <= hi")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = g
        .edges
        .iter()
        .map(|e| Edge { w: rng.gen_range(lo..=hi) as f64, ..*e })
        .collect();
    Ok(Graph { n: g.n, directed: g.directed, weighted: true, edges })
}

/// Maps the vertices of a reduced graph back to the graph it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMap {
    /// `original[new_id]` is the id in the source graph.
    pub original: Vec<usize>,
    pub original_n: usize,
}

impl VertexMap {
    pub fn identity(n: usize) -> Self {
        VertexMap { original: (0..n).collect(), original_n: n }
    }

    pub fn is_identity(&self) -> bool {
        self.original.len() == self.original_n && self.original.iter().enumerate().all(|(i, &o)| i == o)
    }

    /// Spreads per-vertex values of the reduced graph over the original ids;
    /// removed vertices get zero.
    pub fn expand(&self, values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.original_n];
        for (&orig, &v) in self.original.iter().zip(values) {
            out[orig] = v;
        }
        out
    }
}

/// Drops vertices with no incident edges and relabels the rest densely,
/// preserving relative order.
pub fn remove_disconnected(g: &Graph) -> (Graph, VertexMap) {
    let deg = g.degrees();
    let mut new_id = vec![usize::MAX; g.n];
    let mut original = Vec::new();
    for (v, &d) in deg.iter().enumerate() {
        if d > 0 {
            new_id[v] = original.len();
            original.push(v);
        }
    }
    let edges = g
        .edges
        .iter()
        .map(|e| Edge { u: new_id[e.u], v: new_id[e.v], w: e.w })
        .collect();
    let reduced = Graph { n: original.len(), directed: g.directed, weighted: g.weighted, edges };
    (reduced, VertexMap { original, original_n: g.n })
}
