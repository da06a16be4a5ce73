//! In-process simulation of the 1D, 2D and 3D distributed sparse multiply
//! schedules on a virtual processor grid.
//!
//! Operands are relabelled by seeded random permutations of their row,
//! inner and column indices and then cut into contiguous blocks, so every
//! block of a uniform operand carries about the same number of nonzeros.
//! Each virtual processor multiplies the blocks it owns; the partial
//! products are merged, un-permuted, and returned alongside a ledger of the
//! collectives the schedule would have issued.

use std::fmt::Write as _;
use std::ops::Range;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{Algebra, Element, Weight};
pub use crate::costmodel::{Operand, ProcGrid, Variant, Variant2D};
use crate::costmodel::{cost_1d, cost_2d, cost_3d, memory_3d, CostError, CostEstimate};
use crate::spmat::{mm_general, SparseMatrix, SpmatError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecompError {
    #[error("need at least one processor")]
    NoProcessors,
    #[error(transparent)]
    Grid(#[from] CostError),
    #[error(transparent)]
    Spmat(#[from] SpmatError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollectiveKind {
    Broadcast,
    Reduce,
    Scatter,
    Allgather,
    SparseReduce,
}

/// `(messages, words)` of one collective over `p` processors. For
/// [`CollectiveKind::SparseReduce`], `words` is the nnz of the reduced
/// output.
pub fn collective_cost(kind: CollectiveKind, words: f64, p: usize) -> (f64, f64) {
    if p <= 1 {
        return (0.0, 0.0);
    }
    let lg = (p as f64).log2();
    match kind {
        CollectiveKind::Broadcast | CollectiveKind::Reduce => (2.0 * lg, 2.0 * words),
        CollectiveKind::Scatter | CollectiveKind::Allgather | CollectiveKind::SparseReduce => (lg, words),
    }
}

/// Running totals for one virtual processor.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProcTotals {
    pub words: f64,
    pub messages: f64,
}

/// Cost of the most expensive dependent chain of collectives ending at a
/// processor. Each component is maximized independently.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PathCost {
    pub words: f64,
    pub messages: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommLedger {
    alpha: f64,
    beta: f64,
    totals: Vec<ProcTotals>,
    paths: Vec<PathCost>,
    /// Closed-form estimate of the same schedule.
    pub model: CostEstimate,
    /// Words per processor needed by the schedule's replicated operands.
    pub memory_words: f64,
}

impl CommLedger {
    pub fn new(p: usize, alpha: f64, beta: f64) -> Self {
        CommLedger {
            alpha,
            beta,
            totals: vec![ProcTotals::default(); p],
            paths: vec![PathCost::default(); p],
            model: CostEstimate::ZERO,
            memory_words: 0.0,
        }
    }

    pub fn p(&self) -> usize {
        self.totals.len()
    }

    pub fn totals(&self) -> &[ProcTotals] {
        &self.totals
    }

    pub fn paths(&self) -> &[PathCost] {
        &self.paths
    }

    /// Charges a collective among `participants`: each one's running total
    /// grows by the collective's cost, and each one's critical path becomes
    /// the longest path among the participants plus that cost.
    pub fn critical_path_merge(&mut self, kind: CollectiveKind, participants: &[usize], words: f64) {
        let (messages, words) = collective_cost(kind, words, participants.len());
        if messages == 0.0 && words == 0.0 {
            return;
        }
        let seconds = self.alpha * messages + self.beta * words;
        let mut start = PathCost::default();
        for &q in participants {
            let c = self.paths[q];
            start.words = start.words.max(c.words);
            start.messages = start.messages.max(c.messages);
            start.seconds = start.seconds.max(c.seconds);
        }
        let end = PathCost {
            words: start.words + words,
            messages: start.messages + messages,
            seconds: start.seconds + seconds,
        };
        for &q in participants {
            self.paths[q] = end;
            self.totals[q].words += words;
            self.totals[q].messages += messages;
        }
    }

    pub fn critical_path(&self) -> PathCost {
        self.paths.iter().fold(PathCost::default(), |a, c| PathCost {
            words: a.words.max(c.words),
            messages: a.messages.max(c.messages),
            seconds: a.seconds.max(c.seconds),
        })
    }

    pub fn max_proc_words(&self) -> f64 {
        self.totals.iter().map(|t| t.words).fold(0.0, f64::max)
    }

    /// Tab-separated report: a `#` header, one row per processor, and a
    /// final `critical` row.
    pub fn report(&self) -> String {
        let mut out = String::from("# proc\twords\tmessages\tpath_words\tpath_messages\tpath_seconds\n");
        for (q, (t, c)) in self.totals.iter().zip(&self.paths).enumerate() {
            let _ = writeln!(out, "{q}\t{}\t{}\t{}\t{}\t{}", t.words, t.messages, c.words, c.messages, c.seconds);
        }
        let c = self.critical_path();
        let _ = writeln!(
            out,
            "critical\t{}\t{}\t{}\t{}\t{}",
            self.max_proc_words(),
            self.totals.iter().map(|t| t.messages).fold(0.0, f64::max),
            c.words,
            c.messages,
            c.seconds
        );
        out
    }
}

/// Seeded relabelling of the row, inner and column index spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDist {
    pub row_order: Vec<usize>,
    pub inner_order: Vec<usize>,
    pub col_order: Vec<usize>,
}

impl BlockDist {
    pub fn random(m: usize, k: usize, n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut shuffled = |len: usize| {
            let mut v: Vec<usize> = (0..len).collect();
            v.shuffle(&mut rng);
            v
        };
        let row_order = shuffled(m);
        let inner_order = shuffled(k);
        let col_order = shuffled(n);
        BlockDist { row_order, inner_order, col_order }
    }

    pub fn identity(m: usize, k: usize, n: usize) -> Self {
        BlockDist { row_order: (0..m).collect(), inner_order: (0..k).collect(), col_order: (0..n).collect() }
    }
}

/// Part `idx` of `range` cut into `q` contiguous pieces whose sizes differ
/// by at most one.
pub fn split(range: &Range<usize>, q: usize, idx: usize) -> Range<usize> {
    let len = range.end - range.start;
    range.start + len * idx / q..range.start + len * (idx + 1) / q
}

/// Permutation seed and link costs for a simulated run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimConfig {
    pub seed: u64,
    pub link: LinkCost,
}

impl SimConfig {
    pub fn seeded(seed: u64) -> Self {
        SimConfig { seed, link: LinkCost::default() }
    }
}

/// Seconds per message and per word used for the ledger's modeled time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkCost {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for LinkCost {
    fn default() -> Self {
        LinkCost { alpha: 1.0, beta: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Cube {
    rows: Range<usize>,
    inner: Range<usize>,
    cols: Range<usize>,
}

#[derive(Debug, Clone)]
struct Charge {
    kind: CollectiveKind,
    participants: Vec<usize>,
    operand: Operand,
    rows: Range<usize>,
    cols: Range<usize>,
}

/// A schedule in permuted index space: local multiplies and the collectives
/// between them, in program order.
#[derive(Debug, Default)]
struct Schedule {
    pieces: Vec<Cube>,
    charges: Vec<Charge>,
}

impl Schedule {
    fn collective(&mut self, kind: CollectiveKind, participants: Vec<usize>, operand: Operand, rows: Range<usize>, cols: Range<usize>) {
        self.charges.push(Charge { kind, participants, operand, rows, cols });
    }

    fn replicate(&mut self, operand: Operand, participants: Vec<usize>, rows: Range<usize>, cols: Range<usize>) {
        self.collective(CollectiveKind::Broadcast, participants, operand, rows, cols);
    }

    fn reduce(&mut self, participants: Vec<usize>, rows: Range<usize>, cols: Range<usize>) {
        self.collective(CollectiveKind::SparseReduce, participants, Operand::C, rows, cols);
    }

    fn one_d(&mut self, x: Operand, cube: &Cube, procs: &[usize]) {
        let q = procs.len();
        if q == 1 {
            self.pieces.push(cube.clone());
            return;
        }
        match x {
            Operand::A => {
                self.replicate(Operand::A, procs.to_vec(), cube.rows.clone(), cube.inner.clone());
                for t in 0..q {
                    self.pieces.push(Cube { cols: split(&cube.cols, q, t), ..cube.clone() });
                }
            }
            Operand::B => {
                self.replicate(Operand::B, procs.to_vec(), cube.inner.clone(), cube.cols.clone());
                for t in 0..q {
                    self.pieces.push(Cube { rows: split(&cube.rows, q, t), ..cube.clone() });
                }
            }
            Operand::C => {
                for t in 0..q {
                    self.pieces.push(Cube { inner: split(&cube.inner, q, t), ..cube.clone() });
                }
                self.reduce(procs.to_vec(), cube.rows.clone(), cube.cols.clone());
            }
        }
    }

    fn two_d(&mut self, yz: Variant2D, cube: &Cube, p_r: usize, p_c: usize, proc: &dyn Fn(usize, usize) -> usize) {
        if p_r == 1 {
            let procs: Vec<usize> = (0..p_c).map(|j| proc(0, j)).collect();
            return self.one_d(yz.y(), cube, &procs);
        }
        if p_c == 1 {
            let procs: Vec<usize> = (0..p_r).map(|i| proc(i, 0)).collect();
            return self.one_d(yz.z(), cube, &procs);
        }
        let steps = p_r.max(p_c);
        let grid_row = |i: usize| (0..p_c).map(|j| proc(i, j)).collect::<Vec<_>>();
        let grid_col = |j: usize| (0..p_r).map(|i| proc(i, j)).collect::<Vec<_>>();
        match yz {
            Variant2D::AB => {
                for t in 0..steps {
                    let k = split(&cube.inner, steps, t);
                    for i in 0..p_r {
                        self.replicate(Operand::A, grid_row(i), split(&cube.rows, p_r, i), k.clone());
                    }
                    for j in 0..p_c {
                        self.replicate(Operand::B, grid_col(j), k.clone(), split(&cube.cols, p_c, j));
                    }
                    for i in 0..p_r {
                        for j in 0..p_c {
                            self.pieces.push(Cube {
                                rows: split(&cube.rows, p_r, i),
                                inner: k.clone(),
                                cols: split(&cube.cols, p_c, j),
                            });
                        }
                    }
                }
            }
            Variant2D::AC => {
                for t in 0..steps {
                    let r = split(&cube.rows, steps, t);
                    for i in 0..p_r {
                        self.replicate(Operand::A, grid_row(i), r.clone(), split(&cube.inner, p_r, i));
                    }
                    for i in 0..p_r {
                        for j in 0..p_c {
                            self.pieces.push(Cube {
                                rows: r.clone(),
                                inner: split(&cube.inner, p_r, i),
                                cols: split(&cube.cols, p_c, j),
                            });
                        }
                    }
                    for j in 0..p_c {
                        self.reduce(grid_col(j), r.clone(), split(&cube.cols, p_c, j));
                    }
                }
            }
            Variant2D::BC => {
                for t in 0..steps {
                    let c = split(&cube.cols, steps, t);
                    for i in 0..p_r {
                        self.replicate(Operand::B, grid_row(i), split(&cube.inner, p_r, i), c.clone());
                    }
                    for i in 0..p_r {
                        for j in 0..p_c {
                            self.pieces.push(Cube {
                                rows: split(&cube.rows, p_c, j),
                                inner: split(&cube.inner, p_r, i),
                                cols: c.clone(),
                            });
                        }
                    }
                    for j in 0..p_c {
                        self.reduce(grid_col(j), split(&cube.rows, p_c, j), c.clone());
                    }
                }
            }
        }
    }

    /// Processor `(l, i, j)` has id `l·p2·p3 + i·p3 + j`.
    fn three_d(&mut self, x: Operand, yz: Variant2D, cube: &Cube, grid: ProcGrid) {
        let ProcGrid { p1, p2, p3 } = grid;
        let id = move |l: usize, i: usize, j: usize| l * p2 * p3 + i * p3 + j;
        let fiber = |i: usize, j: usize| (0..p1).map(|l| id(l, i, j)).collect::<Vec<_>>();
        if p1 > 1 {
            for i in 0..p2 {
                for j in 0..p3 {
                    match x {
                        Operand::A => self.replicate(Operand::A, fiber(i, j), split(&cube.rows, p2, i), split(&cube.inner, p3, j)),
                        Operand::B => self.replicate(Operand::B, fiber(i, j), split(&cube.inner, p2, i), split(&cube.cols, p3, j)),
                        Operand::C => {}
                    }
                }
            }
        }
        for l in 0..p1 {
            let layer = match x {
                Operand::A => Cube { cols: split(&cube.cols, p1, l), ..cube.clone() },
                Operand::B => Cube { rows: split(&cube.rows, p1, l), ..cube.clone() },
                Operand::C => Cube { inner: split(&cube.inner, p1, l), ..cube.clone() },
            };
            self.two_d(yz, &layer, p2, p3, &move |i, j| id(l, i, j));
        }
        if p1 > 1 && x == Operand::C {
            for i in 0..p2 {
                for j in 0..p3 {
                    self.reduce(fiber(i, j), split(&cube.rows, p2, i), split(&cube.cols, p3, j));
                }
            }
        }
    }
}

fn execute<T: Element>(
    schedule: Schedule,
    p: usize,
    a: &SparseMatrix<T>,
    b: &SparseMatrix<Weight>,
    algebra: Algebra<T>,
    config: &SimConfig,
) -> Result<(SparseMatrix<T>, CommLedger), DecompError> {
    if a.n_cols() != b.n_rows() {
        return Err(SpmatError::DimensionMismatch { op: "simulate", lhs: a.shape(), rhs: b.shape() }.into());
    }
    let (m, k, n) = (a.n_rows(), a.n_cols(), b.n_cols());
    let dist = BlockDist::random(m, k, n, config.seed);
    let a_perm = a.permuted(&dist.row_order, &dist.inner_order);
    let b_perm = b.permuted(&dist.inner_order, &dist.col_order);

    let partials: Vec<Vec<(usize, usize, T)>> = schedule
        .pieces
        .par_iter()
        .map(|cube| {
            let lhs = a_perm.block(cube.rows.clone(), cube.inner.clone());
            let rhs = b_perm.block(cube.inner.clone(), cube.cols.clone());
            let (prod, _) = mm_general(&lhs, &rhs, algebra)?;
            Ok(prod.iter().map(|(i, j, &v)| (i + cube.rows.start, j + cube.cols.start, v)).collect())
        })
        .collect::<Result<_, SpmatError>>()?;
    let c_perm = SparseMatrix::from_triplets_combine(m, n, partials.into_iter().flatten(), algebra.combine)?;

    let mut ledger = CommLedger::new(p, config.link.alpha, config.link.beta);
    for ch in &schedule.charges {
        let nnz = match ch.operand {
            Operand::A => a_perm.block_nnz(ch.rows.clone(), ch.cols.clone()),
            Operand::B => b_perm.block_nnz(ch.rows.clone(), ch.cols.clone()),
            Operand::C => c_perm.block_nnz(ch.rows.clone(), ch.cols.clone()),
        };
        ledger.critical_path_merge(ch.kind, &ch.participants, nnz as f64);
    }

    let row_back = inverse(&dist.row_order);
    let col_back = inverse(&dist.col_order);
    Ok((c_perm.permuted(&row_back, &col_back), ledger))
}

fn inverse(order: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; order.len()];
    for (i, &o) in order.iter().enumerate() {
        inv[o] = i;
    }
    inv
}

fn full_cube<T: Element>(a: &SparseMatrix<T>, b: &SparseMatrix<Weight>) -> Cube {
    Cube { rows: 0..a.n_rows(), inner: 0..a.n_cols(), cols: 0..b.n_cols() }
}

fn nnz_of<T: Element>(op: Operand, a: &SparseMatrix<T>, b: &SparseMatrix<Weight>, c: &SparseMatrix<T>) -> f64 {
    match op {
        Operand::A => a.nnz() as f64,
        Operand::B => b.nnz() as f64,
        Operand::C => c.nnz() as f64,
    }
}

/// 1D variant `x` on `p` processors: A and B replicate their operand and
/// split the output by columns or rows; C splits the inner dimension and
/// reduces the output.
pub fn run_1d<T: Element>(
    x: Operand,
    a: &SparseMatrix<T>,
    b: &SparseMatrix<Weight>,
    p: usize,
    algebra: Algebra<T>,
    config: &SimConfig,
) -> Result<(SparseMatrix<T>, CommLedger), DecompError> {
    if p == 0 {
        return Err(DecompError::NoProcessors);
    }
    let mut schedule = Schedule::default();
    let procs: Vec<usize> = (0..p).collect();
    schedule.one_d(x, &full_cube(a, b), &procs);
    let (c, mut ledger) = execute(schedule, p, a, b, algebra, config)?;
    ledger.model = cost_1d(x, nnz_of(x, a, b, &c), p);
    let others: f64 = Operand::ALL.iter().filter(|&&o| o != x).map(|&o| nnz_of(o, a, b, &c)).sum();
    ledger.memory_words = memory_3d(nnz_of(x, a, b, &c), others, 0.0, p, p);
    Ok((c, ledger))
}

/// 2D variant on a `p_r x p_c` grid in `max(p_r, p_c)` steps. Processor
/// `(i, j)` has id `i·p_c + j`.
pub fn run_2d<T: Element>(
    yz: Variant2D,
    a: &SparseMatrix<T>,
    b: &SparseMatrix<Weight>,
    p_r: usize,
    p_c: usize,
    algebra: Algebra<T>,
    config: &SimConfig,
) -> Result<(SparseMatrix<T>, CommLedger), DecompError> {
    let grid = ProcGrid::two_d(p_r, p_c)?;
    let mut schedule = Schedule::default();
    schedule.two_d(yz, &full_cube(a, b), p_r, p_c, &|i, j| i * p_c + j);
    let (c, mut ledger) = execute(schedule, grid.p(), a, b, algebra, config)?;
    ledger.model = cost_2d(yz, nnz_of(yz.y(), a, b, &c), nnz_of(yz.z(), a, b, &c), p_r, p_c);
    ledger.memory_words = (a.nnz() + b.nnz() + c.nnz()) as f64 / grid.p() as f64;
    Ok((c, ledger))
}

/// 1D variant `x` across `p1` layers of a 2D variant `yz` on `p2 x p3`.
pub fn run_3d<T: Element>(
    x: Operand,
    yz: Variant2D,
    a: &SparseMatrix<T>,
    b: &SparseMatrix<Weight>,
    grid: ProcGrid,
    algebra: Algebra<T>,
    config: &SimConfig,
) -> Result<(SparseMatrix<T>, CommLedger), DecompError> {
    let grid = ProcGrid::new(grid.p1, grid.p2, grid.p3)?;
    let mut schedule = Schedule::default();
    schedule.three_d(x, yz, &full_cube(a, b), grid);
    let (c, mut ledger) = execute(schedule, grid.p(), a, b, algebra, config)?;
    let (na, nb, nc) = (a.nnz() as f64, b.nnz() as f64, c.nnz() as f64);
    ledger.model = cost_3d(x, yz, na, nb, nc, grid);
    let others: f64 = Operand::ALL.iter().filter(|&&o| o != x).map(|&o| nnz_of(o, a, b, &c)).sum();
    ledger.memory_words = memory_3d(nnz_of(x, a, b, &c), others, 0.0, grid.p(), grid.p1);
    Ok((c, ledger))
}

/// Dispatches on `variant`. 1D variants use all of `grid.p()`; 2D variants
/// take the `p2 x p3` layer of a grid with `p1 = 1`.
pub fn run_variant<T: Element>(
    variant: Variant,
    a: &SparseMatrix<T>,
    b: &SparseMatrix<Weight>,
    grid: ProcGrid,
    algebra: Algebra<T>,
    config: &SimConfig,
) -> Result<(SparseMatrix<T>, CommLedger), DecompError> {
    match variant {
        Variant::OneD(x) => run_1d(x, a, b, grid.p(), algebra, config),
        Variant::TwoD(yz) => {
            if grid.p1 != 1 {
                return Err(CostError::InvalidArgument(format!("2D variant {yz} needs p1 = 1, got grid {grid}")).into());
            }
            run_2d(yz, a, b, grid.p2, grid.p3, algebra, config)
        }
        Variant::ThreeD(x, yz) => run_3d(x, yz, a, b, grid, algebra, config),
    }
}
