//! Maximal-frontier betweenness centrality.
//!
//! [`mfbf`] runs a Bellman-Ford variant over multpaths: every iteration
//! multiplies the frontier (entries whose path information changed) with
//! the adjacency matrix and folds the result into `T`. On completion
//! `T(s, v) = (dist(s, v), #shortest paths)`.
//!
//! [`mfbr`] walks the shortest-path DAG from its leaves back to the source
//! over centpaths. Each `(s, v)` carries a counter of DAG successors that
//! have not reported yet; `v` joins a frontier exactly when the counter hits
//! zero, sends `1/σ(s,v) + ζ(s,v)` to its predecessors through `Aᵀ`, and is
//! marked `-1`. On completion `Z(s, v).p = ζ(s, v)`, the dependency divided
//! by the path count.
//!
//! [`mfbc`] batches sources, runs both passes per batch and accumulates
//! `λ(v) = Σ_s ζ(s, v) · σ(s, v)`.

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{centpath_combine, multpath_combine, Algebra, Centpath, Multpath, Weight};
use crate::spmat::{mm_general, SparseMatrix, SpmatError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MfbcError {
    #[error("adjacency matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("edge ({row}, {col}) has weight {weight}; weights must be positive and finite")]
    NonPositiveWeight { row: usize, col: usize, weight: f64 },
    #[error("source {vertex} out of range for {n} vertices")]
    SourceOutOfRange { vertex: usize, n: usize },
    #[error("source {0} listed twice")]
    DuplicateSource(usize),
    #[error("batch size {n_b} must be in 1..={n}")]
    InvalidBatchSize { n_b: usize, n: usize },
    #[error("no convergence after {0} iterations")]
    IterationLimit(usize),
    #[error("structural inconsistency: {0}")]
    StructuralInconsistency(String),
    #[error("{words} words per processor is below the minimum m/p = {minimum}")]
    InsufficientMemory { words: f64, minimum: f64 },
    #[error(transparent)]
    Spmat(#[from] SpmatError),
}

/// Distances and path counts for a batch of sources. Row `r` belongs to
/// `sources[r]`; the source's own column is never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct MultpathMatrix {
    pub t: SparseMatrix<Multpath>,
    pub sources: Vec<usize>,
}

/// Partial centrality factors with the same support as the
/// [`MultpathMatrix`] they were computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct CentpathMatrix {
    pub z: SparseMatrix<Centpath>,
}

/// Per-vertex betweenness scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector(pub Vec<f64>);

impl ScoreVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// nnz of the multiplied frontier and of the multiply output, one entry per
/// iteration.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrontierTrace {
    pub frontier_nnz: Vec<usize>,
    pub product_nnz: Vec<usize>,
    pub flops: u64,
}

impl FrontierTrace {
    pub fn iterations(&self) -> usize {
        self.frontier_nnz.len()
    }

    pub fn total_frontier_nnz(&self) -> usize {
        self.frontier_nnz.iter().sum()
    }

    pub fn total_product_nnz(&self) -> usize {
        self.product_nnz.iter().sum()
    }

    fn record(&mut self, frontier: usize, product: usize, flops: u64) {
        self.frontier_nnz.push(frontier);
        self.product_nnz.push(product);
        self.flops += flops;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchStats {
    pub sources: Vec<usize>,
    pub forward: FrontierTrace,
    pub backward: FrontierTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MfbcRun {
    pub scores: ScoreVector,
    pub batch_size: usize,
    pub batches: Vec<BatchStats>,
}

impl MfbcRun {
    pub fn forward_iterations(&self) -> usize {
        self.batches.iter().map(|b| b.forward.iterations()).sum()
    }

    pub fn backward_iterations(&self) -> usize {
        self.batches.iter().map(|b| b.backward.iterations()).sum()
    }
}

/// Checks that `a` is a square matrix of positive finite weights and strips
/// its diagonal.
pub fn prepare_adjacency(a: &SparseMatrix<Weight>) -> Result<SparseMatrix<Weight>, MfbcError> {
    let (rows, cols) = a.shape();
    if rows != cols {
        return Err(MfbcError::NotSquare(rows, cols));
    }
    if let Some((row, col, w)) = a.iter().find(|(_, _, w)| Weight::edge(w.value()).is_err()) {
        return Err(MfbcError::NonPositiveWeight { row, col, weight: w.value() });
    }
    Ok(a.sparsify(|i, j, _| i != j))
}

fn validate_sources(n: usize, sources: &[usize]) -> Result<(), MfbcError> {
    let mut seen = vec![false; n];
    for &s in sources {
        if s >= n {
            return Err(MfbcError::SourceOutOfRange { vertex: s, n });
        }
        if std::mem::replace(&mut seen[s], true) {
            return Err(MfbcError::DuplicateSource(s));
        }
    }
    Ok(())
}

/// Iteration bound `n (1 + max_w / min_w)` for the forward pass.
fn forward_iteration_limit(a: &SparseMatrix<Weight>) -> usize {
    let (lo, hi) = a
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), (_, _, w)| (lo.min(w.value()), hi.max(w.value())));
    if a.is_empty() {
        return a.n_rows();
    }
    (a.n_rows() as f64 * (1.0 + hi / lo)).ceil() as usize
}

/// Shortest distances and path multiplicities from `sources`.
pub fn mfbf(a: &SparseMatrix<Weight>, sources: &[usize]) -> Result<(MultpathMatrix, FrontierTrace), MfbcError> {
    let a = prepare_adjacency(a)?;
    mfbf_prepared(&a, sources)
}

fn mfbf_prepared(a: &SparseMatrix<Weight>, sources: &[usize]) -> Result<(MultpathMatrix, FrontierTrace), MfbcError> {
    let n = a.n_rows();
    validate_sources(n, sources)?;
    let limit = forward_iteration_limit(a);

    let mut initial = Vec::new();
    for (r, &s) in sources.iter().enumerate() {
        let (cols, weights) = a.row(s);
        initial.extend(cols.iter().zip(weights).map(|(&v, &w)| (r, v, Multpath { w, m: 1.0 })));
    }
    let mut t = SparseMatrix::from_triplets(sources.len(), n, initial)?;
    let mut frontier = t.clone();
    let mut trace = FrontierTrace::default();

    while !frontier.is_empty() {
        if trace.iterations() >= limit {
            return Err(MfbcError::IterationLimit(limit));
        }
        let (product, flops) = mm_general(&frontier, a, Algebra::bellman_ford())?;
        trace.record(frontier.nnz(), product.nnz(), flops.0);
        let product = product.sparsify(|r, v, _| v != sources[r]);
        t = t.elementwise_combine(&product, multpath_combine)?;
        frontier = product.sparsify(|r, v, x| {
            let best = t.get(r, v).expect("accumulated entry present");
            !(x.m == 0.0 || x.w > best.w)
        });
    }
    Ok((MultpathMatrix { t, sources: sources.to_vec() }, trace))
}

fn check_no_heavier(z: &SparseMatrix<Centpath>, contributions: &SparseMatrix<Centpath>) -> Result<(), MfbcError> {
    for (r, v, x) in contributions.iter() {
        if let Some(stored) = z.get(r, v) {
            if x.w > stored.w {
                return Err(MfbcError::StructuralInconsistency(format!(
                    "back-propagated weight {} exceeds stored distance {} at ({r}, {v})",
                    x.w, stored.w
                )));
            }
        }
    }
    Ok(())
}

fn validate_multpaths(a_t: &SparseMatrix<Weight>, t: &MultpathMatrix) -> Result<(), MfbcError> {
    let n = a_t.n_rows();
    if t.t.shape() != (t.sources.len(), n) {
        return Err(MfbcError::StructuralInconsistency(format!(
            "multpath matrix is {:?}, expected ({}, {n})",
            t.t.shape(),
            t.sources.len()
        )));
    }
    validate_sources(n, &t.sources)?;
    for (r, v, x) in t.t.iter() {
        if v == t.sources[r] {
            return Err(MfbcError::StructuralInconsistency(format!("source {v} stores a path to itself")));
        }
        if !(x.w.value() > 0.0) || !(x.m >= 1.0) {
            return Err(MfbcError::StructuralInconsistency(format!("invalid multpath {x:?} at ({r}, {v})")));
        }
    }
    Ok(())
}

/// Initial centpaths: `(dist, 0, #DAG successors)` for every stored entry of
/// `T`. Successors are counted with the same back-propagating multiply the
/// main loop uses, so counters and contributions always agree.
pub fn successor_counts(a: &SparseMatrix<Weight>, t: &MultpathMatrix) -> Result<SparseMatrix<Centpath>, MfbcError> {
    let a_t = prepare_adjacency(a)?.transpose();
    successor_counts_with(&a_t, t)
}

fn successor_counts_with(a_t: &SparseMatrix<Weight>, t: &MultpathMatrix) -> Result<SparseMatrix<Centpath>, MfbcError> {
    validate_multpaths(a_t, t)?;
    let zero = t.t.map(|_, _, x| Centpath { w: x.w, p: 0.0, c: 0 });
    let probe = t.t.map(|_, _, x| Centpath { w: x.w, p: 0.0, c: 1 });
    let (reported, _) = mm_general(&probe, a_t, Algebra::brandes())?;
    check_no_heavier(&zero, &reported)?;
    Ok(zero.combine_on_support(&reported, centpath_combine)?)
}

/// Back-propagates partial centrality factors over the shortest-path DAGs
/// described by `t`.
pub fn mfbr(a: &SparseMatrix<Weight>, t: &MultpathMatrix) -> Result<(CentpathMatrix, FrontierTrace), MfbcError> {
    let a_t = prepare_adjacency(a)?.transpose();
    mfbr_with(&a_t, t)
}

fn mfbr_with(a_t: &SparseMatrix<Weight>, t: &MultpathMatrix) -> Result<(CentpathMatrix, FrontierTrace), MfbcError> {
    let n = a_t.n_rows();
    let mut z = successor_counts_with(a_t, t)?;
    let multiplicity = |r: usize, v: usize| t.t.get(r, v).expect("same support as T").m;
    let next_frontier = |z: &SparseMatrix<Centpath>| {
        z.sparsify(|_, _, x| x.c == 0)
            .map(|r, v, x| Centpath { w: x.w, p: x.p + 1.0 / multiplicity(r, v), c: -1 })
    };

    let mut frontier = next_frontier(&z);
    let mut trace = FrontierTrace::default();
    while !frontier.is_empty() {
        if trace.iterations() >= n {
            return Err(MfbcError::IterationLimit(n));
        }
        let (contrib, flops) = mm_general(&frontier, a_t, Algebra::brandes())?;
        trace.record(frontier.nnz(), contrib.nnz(), flops.0);
        check_no_heavier(&z, &contrib)?;
        // entries that just reported are switched off before accumulating
        z = z.map(|_, _, x| if x.c == 0 { Centpath { c: -1, ..*x } } else { *x });
        z = z.combine_on_support(&contrib, centpath_combine)?;
        if let Some((r, v, x)) = z.iter().find(|(_, _, x)| x.c < -1) {
            return Err(MfbcError::StructuralInconsistency(format!(
                "counter {} below -1 at ({r}, {v})",
                x.c
            )));
        }
        frontier = next_frontier(&z);
    }
    if let Some((r, v, x)) = z.iter().find(|(_, _, x)| x.c >= 0) {
        return Err(MfbcError::StructuralInconsistency(format!(
            "vertex {v} of source {} never reported ({} successors pending)",
            t.sources[r], x.c
        )));
    }
    Ok((CentpathMatrix { z }, trace))
}

fn accumulate(t: &MultpathMatrix, z: &CentpathMatrix, scores: &mut [f64]) {
    for ((_, v, c), (_, _, m)) in z.z.iter().zip(t.t.iter()) {
        scores[v] += c.p * m.m;
    }
}

/// Betweenness of every vertex, processing `n_b` sources per batch.
pub fn mfbc(a: &SparseMatrix<Weight>, n_b: usize) -> Result<MfbcRun, MfbcError> {
    let order: Vec<usize> = (0..a.n_rows()).collect();
    mfbc_with_order(a, n_b, &order)
}

/// Like [`mfbc`] but with batches cut from `order`, which must be a
/// permutation of the vertices.
pub fn mfbc_with_order(a: &SparseMatrix<Weight>, n_b: usize, order: &[usize]) -> Result<MfbcRun, MfbcError> {
    let a = prepare_adjacency(a)?;
    let n = a.n_rows();
    if n == 0 {
        return Ok(MfbcRun { scores: ScoreVector(Vec::new()), batch_size: n_b, batches: Vec::new() });
    }
    if n_b == 0 || n_b > n {
        return Err(MfbcError::InvalidBatchSize { n_b, n });
    }
    if order.len() != n {
        return Err(MfbcError::StructuralInconsistency(format!("source order has {} entries for {n} vertices", order.len())));
    }
    validate_sources(n, order)?;
    let a_t = a.transpose();

    let partials: Vec<(Vec<f64>, BatchStats)> = order
        .par_chunks(n_b)
        .map(|sources| {
            let (t, forward) = mfbf_prepared(&a, sources)?;
            let (z, backward) = mfbr_with(&a_t, &t)?;
            let mut scores = vec![0.0; n];
            accumulate(&t, &z, &mut scores);
            Ok((scores, BatchStats { sources: sources.to_vec(), forward, backward }))
        })
        .collect::<Result<_, MfbcError>>()?;

    // batch order, not completion order
    let mut scores = vec![0.0; n];
    let mut batches = Vec::with_capacity(partials.len());
    for (part, stats) in partials {
        for (acc, x) in scores.iter_mut().zip(part) {
            *acc += x;
        }
        batches.push(stats);
    }
    Ok(MfbcRun { scores: ScoreVector(scores), batch_size: n_b, batches })
}

/// Batch size for `M` words of memory per processor on `p` processors:
/// replication `c = min(⌊M p / m⌋, p)` and `n_b = clamp(⌊c m / n⌋, 1, n)`.
pub fn choose_batch_size(n: usize, m: usize, words_per_proc: f64, p: usize) -> Result<usize, MfbcError> {
    if n == 0 || p == 0 {
        return Err(MfbcError::InvalidBatchSize { n_b: 0, n });
    }
    let minimum = m as f64 / p as f64;
    if !(words_per_proc >= minimum) {
        return Err(MfbcError::InsufficientMemory { words: words_per_proc, minimum });
    }
    let c = if m == 0 { p } else { ((words_per_proc * p as f64 / m as f64).floor() as usize).clamp(1, p) };
    let n_b = (c as u128 * m as u128 / n as u128) as usize;
    Ok(n_b.clamp(1, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Multpath;

    fn adjacency(n: usize, directed: bool, edges: &[(usize, usize, f64)]) -> SparseMatrix<Weight> {
        let mut trip = Vec::new();
        for &(u, v, w) in edges {
            trip.push((u, v, Weight::raw(w)));
            if !directed {
                trip.push((v, u, Weight::raw(w)));
            }
        }
        SparseMatrix::from_triplets(n, n, trip).unwrap()
    }

    fn p3() -> SparseMatrix<Weight> {
        adjacency(3, false, &[(0, 1, 1.0), (1, 2, 1.0)])
    }

    fn diamond() -> SparseMatrix<Weight> {
        adjacency(4, false, &[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)])
    }

    fn star3() -> SparseMatrix<Weight> {
        adjacency(4, false, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])
    }

    #[test]
    fn forward_examples() {
        let (t, trace) = mfbf(&p3(), &[0]).unwrap();
        assert_eq!(t.t.get(0, 1), Some(&Multpath::new(1.0, 1.0)));
        assert_eq!(t.t.get(0, 2), Some(&Multpath::new(2.0, 1.0)));
        assert_eq!(t.t.get(0, 0), None);
        assert_eq!(trace.iterations(), 2);

        let (t, _) = mfbf(&diamond(), &[0]).unwrap();
        assert_eq!(t.t.get(0, 3), Some(&Multpath::new(2.0, 2.0)));

        let tri = adjacency(3, false, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)]);
        let (t, _) = mfbf(&tri, &[0]).unwrap();
        assert_eq!(t.t.get(0, 2), Some(&Multpath::new(2.0, 1.0)));
    }

    #[test]
    fn forward_errors() {
        assert_eq!(mfbf(&p3(), &[3]), Err(MfbcError::SourceOutOfRange { vertex: 3, n: 3 }));
        assert_eq!(mfbf(&p3(), &[1, 1]), Err(MfbcError::DuplicateSource(1)));
        let bad = SparseMatrix::from_triplets(2, 2, [(0, 1, Weight::raw(-1.0))]).unwrap();
        assert!(matches!(mfbf(&bad, &[0]), Err(MfbcError::NonPositiveWeight { .. })));
        let zero = SparseMatrix::from_triplets(2, 2, [(0, 1, Weight::raw(0.0))]).unwrap();
        assert!(matches!(mfbf(&zero, &[0]), Err(MfbcError::NonPositiveWeight { .. })));
    }

    #[test]
    fn self_loops_are_ignored() {
        let mut trip = p3().triplets();
        trip.push((1, 1, Weight::raw(1.0)));
        let looped = SparseMatrix::from_triplets(3, 3, trip).unwrap();
        assert_eq!(mfbc(&looped, 3).unwrap().scores, mfbc(&p3(), 3).unwrap().scores);
    }

    #[test]
    fn successor_count_examples() {
        let (t, _) = mfbf(&diamond(), &[0]).unwrap();
        let z = successor_counts(&diamond(), &t).unwrap();
        let c: Vec<Option<i64>> = (0..4).map(|v| z.get(0, v).map(|x| x.c)).collect();
        // source column is not stored; c(1) = c(2) = 1, c(3) = 0
        assert_eq!(c, vec![None, Some(1), Some(1), Some(0)]);

        let (t, _) = mfbf(&p3(), &[0]).unwrap();
        let z = successor_counts(&p3(), &t).unwrap();
        assert_eq!((z.get(0, 1).unwrap().c, z.get(0, 2).unwrap().c), (1, 0));

        let (t, _) = mfbf(&star3(), &[0]).unwrap();
        let z = successor_counts(&star3(), &t).unwrap();
        assert!(z.iter().all(|(_, _, x)| x.c == 0 && x.p == 0.0));
    }

    #[test]
    fn diamond_source_counts_its_two_successors() {
        // the source itself is not stored, so check its out-degree in the DAG
        // through a second source whose DAG contains vertex 0 as an inner node
        let g = adjacency(5, false, &[(4, 0, 1.0), (0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)]);
        let (t, _) = mfbf(&g, &[4]).unwrap();
        let z = successor_counts(&g, &t).unwrap();
        assert_eq!(z.get(0, 0).unwrap().c, 2);
    }

    #[test]
    fn backward_examples() {
        let (t, _) = mfbf(&diamond(), &[0]).unwrap();
        let (z, trace) = mfbr(&diamond(), &t).unwrap();
        assert_eq!(z.z.get(0, 1).unwrap().p, 0.5);
        assert_eq!(z.z.get(0, 2).unwrap().p, 0.5);
        assert_eq!(z.z.get(0, 3).unwrap().p, 0.0);
        assert!(z.z.iter().all(|(_, _, x)| x.c == -1));
        assert_eq!(trace.iterations(), 2);

        let (t, _) = mfbf(&p3(), &[0]).unwrap();
        let (z, _) = mfbr(&p3(), &t).unwrap();
        assert_eq!((z.z.get(0, 1).unwrap().p, z.z.get(0, 2).unwrap().p), (1.0, 0.0));

        // two weighted paths of length 4 from 0 to 3: 0-1-3 (2+2) and 0-2-3 (1+3)
        let tie = adjacency(4, false, &[(0, 1, 2.0), (1, 3, 2.0), (0, 2, 1.0), (2, 3, 3.0)]);
        let (t, _) = mfbf(&tie, &[0]).unwrap();
        assert_eq!(t.t.get(0, 3), Some(&Multpath::new(4.0, 2.0)));
        let (z, _) = mfbr(&tie, &t).unwrap();
        assert_eq!((z.z.get(0, 1).unwrap().p, z.z.get(0, 2).unwrap().p), (0.5, 0.5));
    }

    #[test]
    fn corrupted_distances_are_detected() {
        let (mut t, _) = mfbf(&p3(), &[0]).unwrap();
        t.t = t.t.map(|_, v, x| if v == 2 { Multpath { w: Weight::raw(9.0), ..*x } } else { *x });
        assert!(matches!(mfbr(&p3(), &t), Err(MfbcError::StructuralInconsistency(_))));

        let (mut t, _) = mfbf(&p3(), &[0]).unwrap();
        let mut trip = t.t.triplets();
        trip.push((0, 0, Multpath::new(1.0, 1.0)));
        t.t = SparseMatrix::from_triplets(1, 3, trip).unwrap();
        assert!(matches!(mfbr(&p3(), &t), Err(MfbcError::StructuralInconsistency(_))));
    }

    #[test]
    fn score_examples() {
        assert_eq!(mfbc(&p3(), 1).unwrap().scores.0, vec![0.0, 2.0, 0.0]);
        assert_eq!(mfbc(&star3(), 2).unwrap().scores.0, vec![6.0, 0.0, 0.0, 0.0]);
        // a directed diamond only routes 0 -> 3 through the middle
        let directed = adjacency(4, true, &[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)]);
        assert_eq!(mfbc(&directed, 4).unwrap().scores.0, vec![0.0, 0.5, 0.5, 0.0]);
        assert_eq!(mfbc(&diamond(), 4).unwrap().scores.0, vec![1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn isolated_vertices_score_zero() {
        let g = adjacency(5, false, &[(0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(mfbc(&g, 2).unwrap().scores.0, vec![0.0, 2.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn batch_size_validation() {
        assert_eq!(mfbc(&p3(), 0), Err(MfbcError::InvalidBatchSize { n_b: 0, n: 3 }));
        assert_eq!(mfbc(&p3(), 4), Err(MfbcError::InvalidBatchSize { n_b: 4, n: 3 }));
        let empty = SparseMatrix::<Weight>::empty(0, 0);
        assert!(mfbc(&empty, 1).unwrap().scores.is_empty());
    }

    #[test]
    fn batch_size_choice() {
        let (n, m, p) = (1000, 10_000, 16);
        // memory for exactly c = 2
        assert_eq!(choose_batch_size(n, m, 2.0 * m as f64 / p as f64, p).unwrap(), 20);
        assert_eq!(choose_batch_size(100, 100, 100.0 / 4.0, 4).unwrap(), 1);
        assert_eq!(choose_batch_size(10, 90, 1e9, 64).unwrap(), 10);
        assert!(matches!(
            choose_batch_size(n, m, 1.0, p),
            Err(MfbcError::InsufficientMemory { .. })
        ));
    }
}
