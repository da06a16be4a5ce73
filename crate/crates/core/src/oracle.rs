//! Reference implementations used as ground truth for the algebraic
//! algorithms. Nothing here touches the sparse-matrix code: traversal is
//! queue/heap based over adjacency lists, and dependencies accumulate over
//! explicit predecessor lists.
//!
//! Scores count ordered pairs, so an undirected path `0-1-2` gives vertex 1
//! a score of 2.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

use crate::graphgen::Graph;

/// Shortest-path predecessors for one source: `preds[v]` lists every `u`
/// with `dist[u] + A(u, v) = dist[v]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredecessorLists {
    pub source: usize,
    pub dist: Vec<f64>,
    pub sigma: Vec<f64>,
    pub preds: Vec<Vec<usize>>,
    /// Vertices in nondecreasing distance order (reachable ones only).
    pub order: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapKey(f64);

impl Eq for HeapKey {}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Single-source shortest paths with path counting: BFS when every weight
/// is 1, Dijkstra (binary heap, ties popped by vertex id) otherwise.
pub fn single_source(g: &Graph, source: usize) -> PredecessorLists {
    let adj = g.neighbor_lists();
    single_source_with(&adj, g.has_unit_weights(), source)
}

fn single_source_with(adj: &[Vec<(usize, f64)>], unit: bool, source: usize) -> PredecessorLists {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut sigma = vec![0.0; n];
    let mut preds = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    dist[source] = 0.0;
    sigma[source] = 1.0;

    if unit {
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &(v, _) in &adj[u] {
                if dist[v].is_infinite() {
                    dist[v] = dist[u] + 1.0;
                    queue.push_back(v);
                }
                if dist[v] == dist[u] + 1.0 {
                    sigma[v] += sigma[u];
                    preds[v].push(u);
                }
            }
        }
    } else {
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::from([Reverse((HeapKey(0.0), source))]);
        while let Some(Reverse((HeapKey(d), u))) = heap.pop() {
            if done[u] || d > dist[u] {
                continue;
            }
            done[u] = true;
            order.push(u);
            for &(v, w) in &adj[u] {
                let cand = d + w;
                if cand < dist[v] {
                    dist[v] = cand;
                    sigma[v] = sigma[u];
                    preds[v].clear();
                    preds[v].push(u);
                    heap.push(Reverse((HeapKey(cand), v)));
                } else if cand == dist[v] && !done[v] {
                    sigma[v] += sigma[u];
                    preds[v].push(u);
                }
            }
        }
    }
    PredecessorLists { source, dist, sigma, preds, order }
}

/// Brandes' dependency accumulation from every source.
pub fn brandes(g: &Graph) -> Vec<f64> {
    let adj = g.neighbor_lists();
    let unit = g.has_unit_weights();
    let mut scores = vec![0.0; g.n()];
    let mut delta = vec![0.0; g.n()];
    for s in 0..g.n() {
        let sp = single_source_with(&adj, unit, s);
        for &v in &sp.order {
            delta[v] = 0.0;
        }
        for &w in sp.order.iter().rev() {
            for &v in &sp.preds[w] {
                delta[v] += sp.sigma[v] / sp.sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                scores[w] += delta[w];
            }
        }
    }
    scores
}

/// Dense all-pairs distance and path-count tables. `dist[s][s] = 0`,
/// `sigma[s][s] = 1`, unreachable pairs are `(inf, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApspTables {
    pub dist: Vec<Vec<f64>>,
    pub sigma: Vec<Vec<f64>>,
}

pub fn apsp_reference(g: &Graph) -> ApspTables {
    let adj = g.neighbor_lists();
    let unit = g.has_unit_weights();
    let (dist, sigma) = (0..g.n())
        .map(|s| {
            let sp = single_source_with(&adj, unit, s);
            (sp.dist, sp.sigma)
        })
        .unzip();
    ApspTables { dist, sigma }
}

/// Largest number of edges on any shortest path from `source`, i.e. the
/// depth of its shortest-path DAG.
pub fn shortest_path_dag_depth(g: &Graph, source: usize) -> usize {
    let sp = single_source(g, source);
    let mut hops = vec![0usize; g.n()];
    let mut depth = 0;
    for &v in &sp.order {
        if let Some(h) = sp.preds[v].iter().map(|&u| hops[u] + 1).max() {
            hops[v] = h;
            depth = depth.max(h);
        }
    }
    depth
}

/// Largest BFS hop distance from `source` to a reachable vertex.
pub fn hop_eccentricity(g: &Graph, source: usize) -> usize {
    let sp = single_source(&g.unweighted(), source);
    sp.dist.iter().filter(|d| d.is_finite()).fold(0.0f64, |a, &b| a.max(b)) as usize
}

/// Betweenness straight from its definition: enumerate every shortest
/// `s -> t` path and credit each interior vertex with its share. Distances
/// come from Floyd-Warshall. Exponential in the worst case; meant for
/// graphs of about ten vertices.
pub fn enumerate_betweenness(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let adj = g.neighbor_lists();
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for (u, row) in dist.iter_mut().enumerate() {
        row[u] = 0.0;
        for &(v, w) in &adj[u] {
            row[v] = row[v].min(w);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }

    fn walk(
        adj: &[Vec<(usize, f64)>],
        dist: &[Vec<f64>],
        s: usize,
        t: usize,
        path: &mut Vec<usize>,
        through: &mut [f64],
        total: &mut f64,
    ) {
        let x = *path.last().expect("path starts at the source");
        if x == t {
            *total += 1.0;
            for &v in &path[1..path.len() - 1] {
                through[v] += 1.0;
            }
            return;
        }
        for &(y, w) in &adj[x] {
            if dist[s][x] + w == dist[s][y] && dist[s][y] + dist[y][t] == dist[s][t] {
                path.push(y);
                walk(adj, dist, s, t, path, through, total);
                path.pop();
            }
        }
    }

    let mut scores = vec![0.0; n];
    let mut through = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t || dist[s][t].is_infinite() {
                continue;
            }
            through.iter_mut().for_each(|x| *x = 0.0);
            let mut total = 0.0;
            walk(&adj, &dist, s, t, &mut vec![s], &mut through, &mut total);
            for v in 0..n {
                scores[v] += through[v] / total;
            }
        }
    }
    scores
}

/// Largest per-vertex `|got - want| / max(|want|, 1)`. Unit floor keeps
/// zero scores from turning rounding noise into infinite error.
pub fn max_relative_error(got: &[f64], want: &[f64]) -> f64 {
    assert_eq!(got.len(), want.len(), "score vectors differ in length");
    got.iter()
        .zip(want)
        .map(|(a, b)| match (a - b).abs() / b.abs().max(1.0) {
            _ if a == b => 0.0,
            e if e.is_nan() => f64::INFINITY,
            e => e,
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::{assign_weights, uniform_random, Density, Edge};

    fn graph(n: usize, directed: bool, edges: &[(usize, usize, f64)]) -> Graph {
        let weighted = edges.iter().any(|e| e.2 != 1.0);
        Graph::new(n, directed, weighted, edges.iter().map(|&(u, v, w)| Edge { u, v, w }).collect()).unwrap()
    }

    fn diamond() -> Graph {
        graph(4, false, &[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)])
    }

    #[test]
    fn small_graph_scores() {
        let p3 = graph(3, false, &[(0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(brandes(&p3), vec![0.0, 2.0, 0.0]);
        let star = graph(4, false, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]);
        assert_eq!(brandes(&star), vec![6.0, 0.0, 0.0, 0.0]);
        // undirected, so the pair (1, 2) routes through 0 and 3
        assert_eq!(brandes(&diamond()), vec![1.0, 1.0, 1.0, 1.0]);
        assert_eq!(enumerate_betweenness(&diamond()), vec![1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn apsp_examples() {
        let t = apsp_reference(&diamond());
        assert_eq!((t.dist[0][3], t.sigma[0][3]), (2.0, 2.0));
        assert_eq!((t.dist[2][2], t.sigma[2][2]), (0.0, 1.0));

        let split = graph(4, false, &[(0, 1, 1.0), (2, 3, 1.0)]);
        let t = apsp_reference(&split);
        assert_eq!((t.dist[0][3], t.sigma[0][3]), (f64::INFINITY, 0.0));

        let tri = graph(3, false, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)]);
        let t = apsp_reference(&tri);
        assert_eq!((t.dist[0][2], t.sigma[0][2]), (2.0, 1.0));
    }

    #[test]
    fn dag_depth_and_eccentricity() {
        assert_eq!(shortest_path_dag_depth(&diamond(), 0), 2);
        assert_eq!(hop_eccentricity(&diamond(), 0), 2);
        // the 3-edge path 0-1-2-3 ties the direct edge 0-3 of weight 3
        let g = graph(4, false, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 3.0)]);
        assert_eq!(shortest_path_dag_depth(&g, 0), 3);
        assert_eq!(hop_eccentricity(&g, 0), 2);
    }

    #[test]
    fn dependency_sum_matches_path_enumeration() {
        for seed in 0..40 {
            let directed = seed % 2 == 1;
            let g = uniform_random(9, Density::Degree(3.0), directed, seed).unwrap();
            let g = if seed % 3 == 0 { assign_weights(&g, 1, 4, seed).unwrap() } else { g };
            let fast = brandes(&g);
            let slow = enumerate_betweenness(&g);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "seed {seed}: {fast:?} vs {slow:?}");
            }
            let (sa, sb): (f64, f64) = (fast.iter().sum(), slow.iter().sum());
            assert!((sa - sb).abs() <= 1e-9 * sb.max(1.0));
        }
    }
}
